//! Constructive annulus separation: round annuli extracted from rings of
//! large modulus, inversion of annuli, the diameter/distance ratio bound,
//! uniform perfectness of sampled sets and semiring diameter bounds.

mod uniform;

pub use uniform::{
    converse_c_from_m, uniform_perfectness_analyze, UpGrid, UpReport, UpSet, UpVerdict,
};

use serde::{Deserialize, Serialize};

use crate::bounds_nd::{a_constant, q_constant, Dimension, ModulusBracket};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::geometry::{sphere_points, vector, Annulus, ExtPoint, RingGeometry};

/// Relative slack below which a modulus counts as equal to the constant it
/// must exceed. Rounding in `μ_T(1)` would otherwise let the boundary case in.
const BOUNDARY_SLACK: f64 = 1e-12;

/// A round annulus inside a ring, with the modulus it is guaranteed to have.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub annulus: Annulus,
    pub guaranteed_modulus: f64,
    pub input_modulus: f64,
    pub constant_used: ModulusBracket,
    /// Sampled points of `C1` closer to the centre than the outer radius.
    /// Nonzero means the modulus lower bound was not valid.
    pub c1_violations: usize,
}

/// Extracts a round annulus centred at `x0 ∈ C0` from a ring whose modulus
/// is at least `mod_lower`. The outer radius is `ρ0·exp(mod_lower − A_n)`
/// with the upper end of the `A_n` bracket, so the guarantee is sound for
/// every dimension.
pub fn teichmuller_annulus(
    ring: &RingGeometry,
    x0: &ExtPoint,
    mod_lower: f64,
    n: Dimension,
) -> Result<SeparationCertificate> {
    ensure(ring.dim() == n.get(), || {
        format!("ring lives in dimension {}, not {}", ring.dim(), n.get())
    })?;
    ensure(ring.c1.has_infinity(), || "C1 must contain ∞".into())?;
    let x0 = x0.coords().ok_or_else(|| Error::domain("x0 must be a finite point"))?;
    ensure(x0.len() == n.get(), || "x0 has the wrong dimension".into())?;
    let tol = 1e-9 * ring.scale();
    ensure(ring.c0.distance(x0) <= tol, || "x0 does not lie on C0".into())?;
    ensure(mod_lower.is_finite(), || format!("mod_lower must be finite, got {mod_lower}"))?;

    let constant = a_constant(n);
    let a_hi = constant.hi;
    if mod_lower - a_hi <= BOUNDARY_SLACK * a_hi.max(1.0) {
        return Err(Error::InsufficientModulus { available: mod_lower, required: a_hi });
    }

    let eps = ring.default_eps();
    let rho0 = ring
        .c0
        .samples(eps)
        .iter()
        .map(|p| vector::dist(p, x0))
        .fold(0.0, f64::max);
    ensure(rho0 > 0.0, || "C0 is a single point".into())?;
    let guaranteed = mod_lower - a_hi;
    let rho1 = rho0 * guaranteed.exp();
    let c1_violations = ring
        .c1
        .samples(eps)
        .iter()
        .filter(|p| vector::dist(p, x0) < rho1)
        .count();
    Ok(SeparationCertificate {
        annulus: Annulus::new(x0.to_vec(), rho0, rho1)?,
        guaranteed_modulus: guaranteed,
        input_modulus: mod_lower,
        constant_used: constant,
        c1_violations,
    })
}

/// Which complementary component of the annulus holds the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionCase {
    /// `|a| ≥ r1`: the origin is outside the outer sphere.
    OriginInC1,
    /// `|a| ≤ r0`: the origin is inside the inner ball.
    OriginInC0,
}

fn invert(x: &[f64]) -> Option<Vec<f64>> {
    let q = vector::norm_sq(x);
    (q > 0.0).then(|| vector::scale(x, 1.0 / q))
}

/// A round annulus inside the image of `A(a; r0, r1)` under `x ↦ x/|x|²`,
/// losing at most `log 3` of modulus.
pub fn inversion_separation(a: &Annulus, case: InversionCase) -> Result<Annulus> {
    let m = a.modulus();
    let log3 = 3f64.ln();
    if m <= log3 {
        return Err(Error::InsufficientModulus { available: m, required: log3 });
    }
    let na = vector::norm(&a.center);
    let (r0, r1) = (a.r0, a.r1);
    match case {
        InversionCase::OriginInC1 => {
            ensure(na >= r1, || format!("origin not in C1: |a| = {na} < r1 = {r1}"))?;
            let center = invert(&a.center).expect("|a| ≥ r1 > 0");
            Annulus::new(center, r0 / (na * (na - r0)), r1 / (na * (na + r1)))
        }
        InversionCase::OriginInC0 => {
            ensure(na <= r0, || format!("origin not in C0: |a| = {na} > r0 = {r0}"))?;
            Annulus::new(vec![0.0; a.dim()], 1.0 / (r1 - na), 1.0 / (r0 + na))
        }
    }
}

/// Counts boundary samples of `a` whose inverted images land on the wrong
/// side of `a0 = inversion_separation(a, case)`. `samples` points are used
/// on each of the two boundary spheres.
pub fn inversion_containment_violations(
    a: &Annulus,
    case: InversionCase,
    a0: &Annulus,
    samples: usize,
    exec: Exec,
) -> usize {
    // The image of the sphere that bounds the origin's component lies
    // outside a0's outer sphere in case C1 and inside its inner sphere in
    // case C0; the other sphere maps to the opposite side.
    let inner = sphere_points(&a.center, a.r0, samples);
    let outer = sphere_points(&a.center, a.r1, samples);
    let bad = |pts: &[Vec<f64>], beyond_r1: bool| -> usize {
        exec.map(pts.len(), |i| match invert(&pts[i]) {
            None => 0,
            Some(y) => {
                // The spheres touch at one point in exact arithmetic.
                let slack = 1e-12 * a0.r1;
                let d = vector::dist(&y, &a0.center);
                let ok = if beyond_r1 { d >= a0.r1 - slack } else { d <= a0.r0 + slack };
                usize::from(!ok)
            }
        })
        .into_iter()
        .sum()
    };
    match case {
        InversionCase::OriginInC1 => bad(&inner, false) + bad(&outer, true),
        InversionCase::OriginInC0 => bad(&inner, true) + bad(&outer, false),
    }
}

/// Upper bound for `diam C0 / dist(C0, C1)` in a ring with `∞ ∈ C1` and
/// modulus at least `mod_lower ≥ b > A_n`: `M e^{−mod_lower}` with
/// `M = 2/(e^{−A_n} − e^{−b})`.
pub fn diam_dist_bound(mod_lower: f64, b: f64, n: Dimension) -> Result<f64> {
    let a = a_constant(n).hi;
    ensure(b > a, || format!("B = {b} must exceed A_n = {a}"))?;
    ensure(mod_lower >= b, || format!("mod_lower = {mod_lower} is below B = {b}"))?;
    if mod_lower == f64::INFINITY {
        return Ok(0.0);
    }
    let m = 2.0 / ((-a).exp() - (-b).exp());
    Ok(m * (-mod_lower).exp())
}

/// Bounds on the smaller complementary diameter of a semiring in the unit
/// ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiringDiameterBound {
    /// `min(2, Q_n e^{−m/2})` with the upper end of the `Q_n` bracket.
    pub bound: f64,
    /// `2 / cosh(m/2)`, valid for semirings bounded by a hyperplane.
    pub hyperplane_bound: f64,
}

pub fn semiring_min_diameter_bound(mod_s: f64, n: Dimension) -> Result<SemiringDiameterBound> {
    ensure(mod_s >= 0.0, || format!("semiring modulus must be ≥ 0, got {mod_s}"))?;
    let q = q_constant(n).hi;
    Ok(SemiringDiameterBound {
        bound: (q * (-0.5 * mod_s).exp()).min(2.0),
        hyperplane_bound: 2.0 / (0.5 * mod_s).cosh(),
    })
}
