use serde::{Deserialize, Serialize};

use super::point::{vector, ExtPoint};
use crate::error::{ensure, Error, Result};

/// Elementary Möbius transformations of `R^n ∪ {∞}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Generator {
    /// `x ↦ c + ρ² (x − c)/|x − c|²`, swapping `c` and `∞`.
    SphereReflection { center: Vec<f64>, radius: f64 },
    /// `x ↦ x − 2 (x·ν − d) ν` for a unit normal `ν`.
    HyperplaneReflection { normal: Vec<f64>, offset: f64 },
    /// Row-major orthogonal matrix.
    Rotation { matrix: Vec<Vec<f64>> },
    /// `x ↦ s x + b` with `s ≠ 0`.
    Affine { scale: f64, translate: Vec<f64> },
}

impl Generator {
    fn apply(&self, x: &ExtPoint) -> ExtPoint {
        let Some(x) = x.coords() else {
            return match self {
                Generator::SphereReflection { center, .. } => ExtPoint::Finite(center.clone()),
                _ => ExtPoint::Infinity,
            };
        };
        match self {
            Generator::SphereReflection { center, radius } => {
                let d = vector::sub(x, center);
                let d2 = vector::norm_sq(&d);
                if d2 == 0.0 {
                    return ExtPoint::Infinity;
                }
                ExtPoint::Finite(vector::axpy(center, radius * radius / d2, &d))
            }
            Generator::HyperplaneReflection { normal, offset } => {
                let s = vector::dot(x, normal) - offset;
                ExtPoint::Finite(vector::axpy(x, -2.0 * s, normal))
            }
            Generator::Rotation { matrix } => {
                ExtPoint::Finite(matrix.iter().map(|row| vector::dot(row, x)).collect())
            }
            Generator::Affine { scale, translate } => {
                ExtPoint::Finite(x.iter().zip(translate).map(|(a, b)| scale * a + b).collect())
            }
        }
    }

    fn inverse(&self) -> Generator {
        match self {
            Generator::Rotation { matrix } => {
                let n = matrix.len();
                let t = (0..n).map(|i| (0..n).map(|j| matrix[j][i]).collect()).collect();
                Generator::Rotation { matrix: t }
            }
            Generator::Affine { scale, translate } => Generator::Affine {
                scale: 1.0 / scale,
                translate: vector::scale(translate, -1.0 / scale),
            },
            reflection => reflection.clone(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Generator::SphereReflection { center, .. } => center.len(),
            Generator::HyperplaneReflection { normal, .. } => normal.len(),
            Generator::Rotation { matrix } => matrix.len(),
            Generator::Affine { translate, .. } => translate.len(),
        }
    }
}

/// A finite composition of [`Generator`]s, applied first to last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    dim: usize,
    generators: Vec<Generator>,
}

impl MoebiusMap {
    pub fn identity(n: usize) -> Self {
        MoebiusMap { dim: n, generators: Vec::new() }
    }

    pub fn from_generators(n: usize, generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            ensure(g.dim() == n, || format!("generator of dimension {} in R^{n}", g.dim()))?;
            match g {
                Generator::SphereReflection { radius, .. } => {
                    ensure(*radius > 0.0, || "sphere radius must be positive".into())?
                }
                Generator::HyperplaneReflection { normal, .. } => {
                    ensure((vector::norm(normal) - 1.0).abs() < 1e-12, || {
                        "hyperplane normal must be a unit vector".into()
                    })?
                }
                Generator::Rotation { matrix } => {
                    ensure(matrix.iter().all(|r| r.len() == n), || "rotation must be n×n".into())?;
                    ensure(is_orthogonal(matrix), || "rotation matrix is not orthogonal".into())?
                }
                Generator::Affine { scale, .. } => {
                    ensure(*scale != 0.0 && scale.is_finite(), || "affine scale must be non-zero".into())?
                }
            }
        }
        Ok(MoebiusMap { dim: n, generators })
    }

    fn single(n: usize, g: Generator) -> Self {
        MoebiusMap { dim: n, generators: vec![g] }
    }

    /// Inversion in the unit sphere, `I(x) = x/|x|²`.
    pub fn inversion(n: usize) -> Self {
        Self::sphere_reflection(vec![0.0; n], 1.0)
    }

    /// `I_a(x) = a + (x − a)/|x − a|²`.
    pub fn translated_inversion(a: &[f64]) -> Self {
        Self::sphere_reflection(a.to_vec(), 1.0)
    }

    pub fn sphere_reflection(center: Vec<f64>, radius: f64) -> Self {
        Self::single(center.len(), Generator::SphereReflection { center, radius })
    }

    /// Reflection `P` in the hyperplane `x_n = 0`.
    pub fn reflect_last_axis(n: usize) -> Self {
        Self::single(
            n,
            Generator::HyperplaneReflection { normal: vector::last_axis(n), offset: 0.0 },
        )
    }

    /// Reflection `Q` in the sphere `|x − e_n|² = 2`.
    pub fn stereographic_reflection(n: usize) -> Self {
        Self::sphere_reflection(vector::last_axis(n), std::f64::consts::SQRT_2)
    }

    pub fn affine(scale: f64, translate: Vec<f64>) -> Self {
        Self::single(translate.len(), Generator::Affine { scale, translate })
    }

    /// A rotation `R` with `R(ξ) = e_n`. For `ξ_n ≥ 0` it acts in the plane
    /// spanned by `ξ` and `e_n`; otherwise it is preceded by the half-turn in
    /// the `(x_1, x_n)` plane.
    pub fn rotation_to_last_axis(xi: &[f64]) -> Result<Self> {
        let n = xi.len();
        ensure(n >= 2, || "rotation needs n ≥ 2".into())?;
        ensure((vector::norm(xi) - 1.0).abs() < 1e-10, || {
            format!("rotation_to_last_axis needs a unit vector, |ξ| = {}", vector::norm(xi))
        })?;
        // Half-turn in the (x_1, x_n) plane; sends −e_n to e_n.
        let half_turn = |v: &[f64]| -> Vec<f64> {
            let mut w = v.to_vec();
            w[0] = -w[0];
            w[n - 1] = -w[n - 1];
            w
        };
        let e = vector::last_axis(n);
        // Rodrigues is ill-conditioned for ξ near −e_n, so flip first.
        let flip = xi[n - 1] < 0.0;
        let target = if flip { half_turn(xi) } else { xi.to_vec() };
        let c = vector::dot(&target, &e);
        // R = I + K + K²/(1 + c), K = e ξᵀ − ξ eᵀ.
        let k: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| e[i] * target[j] - target[i] * e[j]).collect())
            .collect();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let k2: f64 = (0..n).map(|l| k[i][l] * k[l][j]).sum();
                m[i][j] = f64::from(u8::from(i == j)) + k[i][j] + k2 / (1.0 + c);
            }
        }
        if flip {
            // Right-multiply by the half-turn: negate columns 1 and n.
            for row in m.iter_mut() {
                row[0] = -row[0];
                row[n - 1] = -row[n - 1];
            }
        }
        Ok(Self::single(n, Generator::Rotation { matrix: m }))
    }

    /// A Möbius self-map of the unit ball sending `a` to the origin.
    pub fn ball_automorphism(a: &[f64]) -> Result<Self> {
        let n = a.len();
        let r2 = vector::norm_sq(a);
        ensure(r2 < 1.0, || "ball_automorphism needs |a| < 1".into())?;
        if r2 == 0.0 {
            return Ok(Self::identity(n));
        }
        // Reflection in the sphere orthogonal to ∂B through a's conjugate point,
        // then in the hyperplane ⟂ a to restore orientation.
        let center = vector::scale(a, 1.0 / r2);
        let radius = ((1.0 - r2) / r2).sqrt();
        let normal = vector::scale(a, 1.0 / r2.sqrt());
        Ok(MoebiusMap {
            dim: n,
            generators: vec![
                Generator::SphereReflection { center, radius },
                Generator::HyperplaneReflection { normal, offset: 0.0 },
            ],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `other ∘ self`: apply `self`, then `other`.
    pub fn then(mut self, other: MoebiusMap) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        self.generators.extend(other.generators);
        self
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap {
            dim: self.dim,
            generators: self.generators.iter().rev().map(Generator::inverse).collect(),
        }
    }

    pub fn apply(&self, x: &ExtPoint) -> ExtPoint {
        self.generators.iter().fold(x.clone(), |p, g| g.apply(&p))
    }

    /// Applies the map to a finite point; `None` if the image is `∞`.
    pub fn apply_finite(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self.apply(&ExtPoint::Finite(x.to_vec())) {
            ExtPoint::Finite(y) => Some(y),
            ExtPoint::Infinity => None,
        }
    }
}

fn is_orthogonal(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let d: f64 = (0..n).map(|k| m[k][i] * m[k][j]).sum();
            (d - f64::from(u8::from(i == j))).abs() < 1e-10
        })
    })
}

/// `M_ξ = P ∘ Q ∘ R`, mapping `B^n` onto the upper half-space with
/// `|M_ξ(x)| = |x + ξ| / |x − ξ|`.
pub fn moebius_to_halfspace(xi: &ExtPoint) -> Result<MoebiusMap> {
    let xi = xi
        .coords()
        .ok_or_else(|| Error::domain("moebius_to_halfspace needs a finite unit vector"))?;
    let n = xi.len();
    Ok(MoebiusMap::rotation_to_last_axis(xi)?
        .then(MoebiusMap::stereographic_reflection(n))
        .then(MoebiusMap::reflect_last_axis(n)))
}
