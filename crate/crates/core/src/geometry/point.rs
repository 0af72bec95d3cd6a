use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Slice arithmetic on coordinate vectors.
pub mod vector {
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn norm_sq(a: &[f64]) -> f64 {
        dot(a, a)
    }

    pub fn norm(a: &[f64]) -> f64 {
        norm_sq(a).sqrt()
    }

    pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    pub fn dist(a: &[f64], b: &[f64]) -> f64 {
        dist_sq(a, b).sqrt()
    }

    pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
        a.iter().map(|x| x * s).collect()
    }

    /// `a + s·b`
    pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + s * y).collect()
    }

    /// Standard basis vector `e_k` (zero-based `k`) of `R^n`.
    pub fn basis(n: usize, k: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        e
    }

    /// `e_n`, the last basis vector.
    pub fn last_axis(n: usize) -> Vec<f64> {
        basis(n, n - 1)
    }
}

/// A point of the extended space `R^n ∪ {∞}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtPoint {
    Finite(Vec<f64>),
    /// Serialized as JSON `null`.
    Infinity,
}

impl ExtPoint {
    pub fn finite(coords: Vec<f64>) -> Result<Self> {
        ensure(!coords.is_empty(), || "a point needs at least one coordinate".into())?;
        ensure(coords.iter().all(|c| c.is_finite()), || {
            format!("finite point has non-finite coordinates: {coords:?}")
        })?;
        Ok(ExtPoint::Finite(coords))
    }

    pub fn origin(n: usize) -> Self {
        ExtPoint::Finite(vec![0.0; n])
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            ExtPoint::Finite(c) => Some(c),
            ExtPoint::Infinity => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.coords().map(<[f64]>::len)
    }

    /// Euclidean norm, `+∞` at infinity.
    pub fn norm(&self) -> f64 {
        self.coords().map_or(f64::INFINITY, vector::norm)
    }

    /// Image in the inversion chart `x ↦ x/|x|²`, with `∞ ↦ 0` and `0 ↦ ∞`.
    /// Comparisons near infinity are made here.
    pub fn chart(&self, n: usize) -> ExtPoint {
        match self {
            ExtPoint::Infinity => ExtPoint::origin(n),
            ExtPoint::Finite(x) => {
                let r2 = vector::norm_sq(x);
                if r2 == 0.0 {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(vector::scale(x, 1.0 / r2))
                }
            }
        }
    }

    /// Euclidean distance; infinite if exactly one point is `∞`, zero if both are.
    pub fn distance(&self, other: &ExtPoint) -> f64 {
        match (self, other) {
            (ExtPoint::Finite(a), ExtPoint::Finite(b)) => vector::dist(a, b),
            (ExtPoint::Infinity, ExtPoint::Infinity) => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Approximate equality; points near `∞` are compared in the chart.
    pub fn approx_eq(&self, other: &ExtPoint, tol: f64) -> bool {
        let n = self.dim().or(other.dim()).unwrap_or(1);
        if self.norm() > 1.0 || other.norm() > 1.0 {
            self.chart(n).distance(&other.chart(n)) <= tol
        } else {
            self.distance(other) <= tol
        }
    }
}

impl From<Vec<f64>> for ExtPoint {
    fn from(v: Vec<f64>) -> Self {
        ExtPoint::Finite(v)
    }
}
