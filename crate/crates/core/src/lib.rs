//! Conformal moduli of rings and semirings in `R^n`.
//!
//! The crate is organised by subsystem:
//!
//! * [`special2d`]: planar special functions (`K`, `μ`, `μ_G`, `μ_T` and friends).
//! * [`bounds_nd`]: dimension-general constants as [`ModulusBracket`]s.
//! * [`geometry`]: extended points, Möbius maps, annuli, rings and semirings.
//! * [`separation`]: annulus extraction, inversion separation and uniform perfectness.
//! * [`modsolve`]: a variational grid solver for curve-family moduli.
//! * [`qcbounds`]: quasiconformal distortion and Hölder certificates.
//!
//! Data-parallel loops run through [`Exec`]; with the `parallel` feature
//! disabled every policy degrades to the sequential path.

pub mod bounds_nd;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod modsolve;
pub mod qcbounds;
pub mod quad;
pub mod separation;
mod serde_ext;
pub mod special2d;

pub use bounds_nd::{Dimension, ModulusBracket, Provenance};
pub use error::{Error, Result};
pub use exec::Exec;

pub use geometry::{Annulus, ExtPoint, MoebiusMap, RingGeometry, Semiring};
