//! Quasiconformal test maps with analytically known dilatation.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::vector;

/// Self-maps of the unit ball or the upper half-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum TestMap {
    Identity { n: usize },
    /// Rotation by `angle` in the `(x_1, x_2)` plane.
    Rotation { n: usize, angle: f64 },
    /// The Möbius automorphism of the ball sending `a` to the origin.
    BallAutomorphism { a: Vec<f64> },
    /// `x ↦ x |x|^{k−1}`, a self-map of the ball.
    RadialStretch { n: usize, k: f64 },
    /// `(x', x_n) ↦ (k x', x_n)`, a self-map of the half-space.
    HorizontalStretch { n: usize, k: f64 },
}

fn radial_power(x: &[f64], p: f64) -> Vec<f64> {
    let r = vector::norm(x);
    if r == 0.0 {
        x.to_vec()
    } else {
        vector::scale(x, r.powf(p - 1.0))
    }
}

/// `T_a(x) = ((1−|a|²)(x−a) − |x−a|² a) / (1 − 2a·x + |a|²|x|²)`.
fn ball_moebius(a: &[f64], x: &[f64]) -> Vec<f64> {
    let aa = vector::norm_sq(a);
    let xa = vector::sub(x, a);
    let den = 1.0 - 2.0 * vector::dot(a, x) + aa * vector::norm_sq(x);
    let num = vector::axpy(&vector::scale(&xa, 1.0 - aa), -vector::norm_sq(&xa), a);
    vector::scale(&num, 1.0 / den)
}

impl TestMap {
    pub fn dim(&self) -> usize {
        match self {
            TestMap::Identity { n }
            | TestMap::Rotation { n, .. }
            | TestMap::RadialStretch { n, .. }
            | TestMap::HorizontalStretch { n, .. } => *n,
            TestMap::BallAutomorphism { a } => a.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        ensure(n >= 2, || "test maps need dimension at least 2".into())?;
        match self {
            TestMap::Rotation { angle, .. } => {
                ensure(angle.is_finite(), || "rotation angle must be finite".into())
            }
            TestMap::BallAutomorphism { a } => ensure(vector::norm(a) < 1.0, || {
                "ball automorphism needs |a| < 1".into()
            }),
            TestMap::RadialStretch { k, .. } | TestMap::HorizontalStretch { k, .. } => {
                ensure(*k > 0.0 && k.is_finite(), || format!("stretch factor must be positive, got {k}"))
            }
            TestMap::Identity { .. } => Ok(()),
        }
    }

    /// Maximal dilatation: `H^{n−1}` for a map of constant linear
    /// distortion `H`.
    pub fn dilatation(&self) -> f64 {
        let n = self.dim() as f64;
        match self {
            TestMap::RadialStretch { k, .. } | TestMap::HorizontalStretch { k, .. } => {
                k.max(1.0 / k).powf(n - 1.0)
            }
            _ => 1.0,
        }
    }

    pub fn maps_ball_to_itself(&self) -> bool {
        !matches!(self, TestMap::HorizontalStretch { .. })
    }

    pub fn maps_halfspace_to_itself(&self) -> bool {
        match self {
            TestMap::Identity { .. } | TestMap::HorizontalStretch { .. } => true,
            // A rotation of the first two axes keeps x_n fixed for n ≥ 3.
            TestMap::Rotation { n, angle } => *n >= 3 || *angle == 0.0,
            _ => false,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            TestMap::Identity { .. } => x.to_vec(),
            TestMap::Rotation { angle, .. } => rotate(x, *angle),
            TestMap::BallAutomorphism { a } => ball_moebius(a, x),
            TestMap::RadialStretch { k, .. } => radial_power(x, *k),
            TestMap::HorizontalStretch { k, .. } => stretch(x, *k),
        }
    }

    pub fn apply_inverse(&self, y: &[f64]) -> Vec<f64> {
        match self {
            TestMap::Identity { .. } => y.to_vec(),
            TestMap::Rotation { angle, .. } => rotate(y, -angle),
            TestMap::BallAutomorphism { a } => ball_moebius(&vector::scale(a, -1.0), y),
            TestMap::RadialStretch { k, .. } => radial_power(y, 1.0 / k),
            TestMap::HorizontalStretch { k, .. } => stretch(y, 1.0 / k),
        }
    }
}

fn rotate(x: &[f64], angle: f64) -> Vec<f64> {
    let (s, c) = angle.sin_cos();
    let mut y = x.to_vec();
    y[0] = c * x[0] - s * x[1];
    y[1] = s * x[0] + c * x[1];
    y
}

fn stretch(x: &[f64], k: f64) -> Vec<f64> {
    let n = x.len();
    x.iter().enumerate().map(|(i, &c)| if i + 1 == n { c } else { k * c }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_automorphism_properties() {
        let a = [0.3, -0.4];
        let m = TestMap::BallAutomorphism { a: a.to_vec() };
        assert!(vector::norm(&m.apply(&a)) < 1e-15);
        for th in [0.0f64, 1.0, 2.5, 4.0] {
            let xi = [th.cos(), th.sin()];
            assert!((vector::norm(&m.apply(&xi)) - 1.0).abs() < 1e-14);
        }
        let x = [0.1, 0.7];
        let back = m.apply_inverse(&m.apply(&x));
        assert!(vector::dist(&back, &x) < 1e-14);
    }

    #[test]
    fn inverses() {
        let maps = [
            TestMap::Rotation { n: 3, angle: 0.7 },
            TestMap::RadialStretch { n: 2, k: 2.0 },
            TestMap::HorizontalStretch { n: 2, k: 0.5 },
        ];
        let x = [0.2, 0.5, 0.1];
        for m in maps {
            let x = &x[..m.dim()];
            assert!(vector::dist(&m.apply_inverse(&m.apply(x)), x) < 1e-14);
        }
    }

    #[test]
    fn dilatations() {
        assert_eq!(TestMap::RadialStretch { n: 2, k: 0.5 }.dilatation(), 2.0);
        assert_eq!(TestMap::HorizontalStretch { n: 3, k: 2.0 }.dilatation(), 4.0);
        assert_eq!(TestMap::Rotation { n: 2, angle: 1.0 }.dilatation(), 1.0);
    }
}
