//! Points of `R^n ∪ {∞}`, Möbius maps and the condensers built from them.

mod continuum;
mod moebius;
mod point;
mod semiring;

pub use continuum::{Annulus, CanonicalRing, Continuum, Primitive, RingGeometry};
pub use moebius::{moebius_to_halfspace, Generator, MoebiusMap};
pub use point::{vector, ExtPoint};
pub use semiring::{apollonian_ball, hyperbolic_distance, Region, Semiring};

use crate::error::Result;

/// `mod A(a; r0, r1) = log(r1 / r0)`.
pub fn annulus_modulus(a: &Annulus) -> f64 {
    a.modulus()
}

/// Closed-form modulus of a canonical semiring.
pub fn semiring_canonical_modulus(s: &Semiring) -> Result<f64> {
    s.canonical_modulus()
}

pub use continuum::{canonical_ring, sphere_points};
