use serde::{Deserialize, Serialize};

use super::point::{vector, ExtPoint};
use crate::error::{ensure, Error, Result};

/// A semiring in `B^n` or `H^n` with distinguished boundary components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Semiring {
    /// `T(ξ; r0, r1) = {x ∈ Bⁿ : r0 ≤ |x − ξ|/|x + ξ| ≤ r1}`, `|ξ| = 1`.
    Canonical { xi: Vec<f64>, r0: f64, r1: f64 },
    /// `T_R = {x ∈ Hⁿ : 1 ≤ |x| ≤ R}` in dimension `dim`.
    Halfspace { dim: usize, radius: f64 },
    /// Boundary components known only through samples.
    ImageSamples { boundary0: Vec<Vec<f64>>, boundary1: Vec<Vec<f64>> },
}

/// Where a point sits relative to a semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Outside the ambient ball or half-space.
    Outside,
    /// The complementary component bounded by `∂0` (closed).
    Side0,
    /// The complementary component bounded by `∂1` (closed).
    Side1,
    Interior,
}

impl Semiring {
    pub fn canonical(xi: Vec<f64>, r0: f64, r1: f64) -> Result<Self> {
        let s = Semiring::Canonical { xi, r0, r1 };
        s.validate()?;
        Ok(s)
    }

    pub fn halfspace(dim: usize, radius: f64) -> Result<Self> {
        let s = Semiring::Halfspace { dim, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Semiring::Canonical { xi, r0, r1 } => {
                ensure(xi.len() >= 2 && (vector::norm(xi) - 1.0).abs() < 1e-10, || {
                    "canonical semiring needs a unit vector ξ".into()
                })?;
                ensure(*r0 > 0.0 && r0 < r1 && r1.is_finite(), || {
                    format!("canonical semiring needs 0 < r0 < r1, got ({r0}, {r1})")
                })
            }
            Semiring::Halfspace { dim, radius } => {
                ensure(*dim >= 2, || "semiring dimension must be at least 2".into())?;
                ensure(*radius > 1.0 && radius.is_finite(), || {
                    format!("half-space semiring needs R > 1, got {radius}")
                })
            }
            Semiring::ImageSamples { boundary0, boundary1 } => {
                ensure(!boundary0.is_empty() && !boundary1.is_empty(), || {
                    "sampled semiring needs both boundary components".into()
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Semiring::Canonical { xi, .. } => xi.len(),
            Semiring::Halfspace { dim, .. } => *dim,
            Semiring::ImageSamples { boundary0, .. } => boundary0.first().map_or(0, Vec::len),
        }
    }

    /// `log(r1/r0)` or `log R`.
    pub fn canonical_modulus(&self) -> Result<f64> {
        match self {
            Semiring::Canonical { r0, r1, .. } => Ok((r1 / r0).ln()),
            Semiring::Halfspace { radius, .. } => Ok(radius.ln()),
            Semiring::ImageSamples { .. } => Err(Error::Unsupported(
                "sampled semirings have no closed-form modulus; use the grid solver".into(),
            )),
        }
    }

    /// Classifies `x`; `None` for sampled semirings, which carry no regions.
    pub fn region(&self, x: &[f64]) -> Option<Region> {
        match self {
            Semiring::Canonical { xi, r0, r1 } => {
                if vector::norm_sq(x) > 1.0 {
                    return Some(Region::Outside);
                }
                let minus: Vec<f64> = xi.iter().map(|c| -c).collect();
                let num = vector::dist(x, xi);
                let den = vector::dist(x, &minus);
                Some(if num <= r0 * den {
                    Region::Side0
                } else if num >= r1 * den {
                    Region::Side1
                } else {
                    Region::Interior
                })
            }
            Semiring::Halfspace { dim, radius } => {
                if x[dim - 1] < 0.0 {
                    return Some(Region::Outside);
                }
                let r = vector::norm(x);
                Some(if r <= 1.0 {
                    Region::Side0
                } else if r >= *radius {
                    Region::Side1
                } else {
                    Region::Interior
                })
            }
            Semiring::ImageSamples { .. } => None,
        }
    }
}

/// The Apollonian ball `B(r) = {x ∈ Hⁿ : |x − e_n| ≤ r |x + e_n|}`, returned
/// as its centre `((1+r²)/(1−r²)) e_n` and radius `2r/(1−r²)`.
pub fn apollonian_ball(r: f64, n: usize) -> Result<(ExtPoint, f64)> {
    ensure(r > 0.0 && r < 1.0, || format!("Apollonian ball needs 0 < r < 1, got {r}"))?;
    ensure(n >= 2, || "dimension must be at least 2".into())?;
    let q = 1.0 - r * r;
    let center = vector::scale(&vector::last_axis(n), (1.0 + r * r) / q);
    Ok((ExtPoint::Finite(center), 2.0 * r / q))
}

/// Hyperbolic distance in `Bⁿ` for the metric `2|dx|/(1−|x|²)`.
pub fn hyperbolic_distance(x: &ExtPoint, y: &ExtPoint) -> Result<f64> {
    let (Some(x), Some(y)) = (x.coords(), y.coords()) else {
        return Err(Error::domain("hyperbolic distance needs points of the unit ball"));
    };
    let (ax, ay) = (1.0 - vector::norm_sq(x), 1.0 - vector::norm_sq(y));
    ensure(ax > 0.0 && ay > 0.0, || "hyperbolic distance needs |x|, |y| < 1".into())?;
    Ok(2.0 * (vector::dist(x, y) / (ax * ay).sqrt()).asinh())
}
