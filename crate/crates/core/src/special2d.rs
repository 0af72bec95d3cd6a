//! Planar special functions of the Grötzsch and Teichmüller rings.
//!
//! `K(w)` uses the *parameter* convention: `w` multiplies `x²` inside
//! `∫₀¹ dx / √((1−x²)(1−w x²))`, so `K(0) = π/2` and `K(w) → ∞` as `w → 1`.
//! Every modulus here is on the natural-log scale, so a round annulus
//! `r0 < |x| < r1` has modulus `log(r1/r0)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Below this modulus `μ(r)` is evaluated by its asymptote `log(4/r)`.
pub const MU_ASYMPTOTIC_THRESHOLD: f64 = 1e-8;

const AGM_MAX_ITER: usize = 64;

/// Parameter `w ∈ [0, 1)` of the complete elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EllipticParam(f64);

impl EllipticParam {
    pub fn new(w: f64) -> Result<Self> {
        ensure((0.0..1.0).contains(&w), || {
            format!("elliptic parameter must lie in [0, 1), got {w}")
        })?;
        Ok(Self(w))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A planar ring modulus (natural-log scale, non-negative).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlanarModulusValue(f64);

impl PlanarModulusValue {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<PlanarModulusValue> for f64 {
    fn from(v: PlanarModulusValue) -> f64 {
        v.0
    }
}

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(w) = (π/2) / AGM(1, √(1−w))`.
pub fn elliptic_k(w: EllipticParam) -> f64 {
    FRAC_PI_2 / agm(1.0, (1.0 - w.0).sqrt())
}

/// `K(w)` for a raw parameter, checking the domain.
pub fn elliptic_k_checked(w: f64) -> Result<f64> {
    EllipticParam::new(w).map(elliptic_k)
}

fn check_unit_interval(name: &str, r: f64) -> Result<()> {
    ensure(r > 0.0 && r < 1.0, || format!("{name} requires 0 < r < 1, got {r}"))
}

/// `μ(r)` from `r` and its complement `r' = √(1−r²)`, both supplied so that
/// callers working near `r = 1` do not lose the complement to rounding.
pub(crate) fn mu_from_pair(r: f64, rc: f64) -> f64 {
    if r < MU_ASYMPTOTIC_THRESHOLD {
        (4.0 / r).ln()
    } else if rc < MU_ASYMPTOTIC_THRESHOLD {
        PI * PI / (4.0 * (4.0 / rc).ln())
    } else {
        FRAC_PI_2 * agm(1.0, rc) / agm(1.0, r)
    }
}

fn complement(r: f64) -> f64 {
    ((1.0 - r) * (1.0 + r)).sqrt()
}

/// `μ(r) = (π/2) K(1−r²) / K(r²)`, the modulus of the planar Grötzsch ring
/// `B² \ [0, r]`. Strictly decreasing from `+∞` to `0` on `(0, 1)`.
pub fn mu(r: f64) -> Result<f64> {
    check_unit_interval("mu", r)?;
    Ok(mu_from_pair(r, complement(r)))
}

/// Modulus of the planar Teichmüller ring `R_T(t) = R([−1, 0], [t, ∞])`,
/// computed as `2 μ(1/√(t+1))`.
pub fn mu_t(t: f64) -> Result<PlanarModulusValue> {
    ensure(t > 0.0 && t.is_finite(), || format!("mu_t requires t > 0, got {t}"))?;
    let r = 1.0 / (t + 1.0).sqrt();
    let rc = (t / (t + 1.0)).sqrt();
    Ok(PlanarModulusValue(2.0 * mu_from_pair(r, rc)))
}

/// The second closed form `π K(t/(t+1)) / K(1/(t+1))` of the Teichmüller
/// modulus. Kept separate so the two expressions can be compared.
pub fn mu_t_elliptic(t: f64) -> Result<PlanarModulusValue> {
    ensure(t > 0.0 && t.is_finite(), || format!("mu_t requires t > 0, got {t}"))?;
    let num = elliptic_k_checked(t / (t + 1.0))?;
    let den = elliptic_k_checked(1.0 / (t + 1.0))?;
    Ok(PlanarModulusValue(PI * num / den))
}

/// Modulus of the planar Grötzsch ring `R_G(s) = R(B̄², [s, ∞])`, i.e. `μ(1/s)`.
pub fn mu_g(s: f64) -> Result<PlanarModulusValue> {
    ensure(s > 1.0 && s.is_finite(), || format!("mu_g requires s > 1, got {s}"))?;
    let r = 1.0 / s;
    let rc = ((s - 1.0) * (s + 1.0)).sqrt() / s;
    Ok(PlanarModulusValue(mu_from_pair(r, rc)))
}

/// `g(t) = μ_T(t) − log t`, strictly decreasing with `g(1) = π`.
pub fn teichmuller_excess(t: f64) -> Result<f64> {
    Ok(mu_t(t)?.get() - t.ln())
}

/// `μ'(r) = −π² / (4 r (1−r²) K(r²)²)`.
pub fn mu_prime(r: f64) -> Result<f64> {
    check_unit_interval("mu_prime", r)?;
    let k = FRAC_PI_2 / agm(1.0, complement(r));
    Ok(-PI * PI / (4.0 * r * (1.0 - r * r) * k * k))
}

/// Solves `μ(r) = m` for `m ≥ π/2`, i.e. `r ≤ 1/√2`. Returns `(r, √(1−r²))`.
fn inverse_mu_small_r(m: f64) -> Result<(f64, f64)> {
    // μ(r) < log(4/r), so the root lies below 4e^{-m}.
    let mut hi = (0.5f64).ln() * 0.5;
    let mut lo = (4.0f64).ln() - m - 1.0;
    while mu_from_pair(lo.exp(), complement(lo.exp())) < m {
        hi = lo;
        lo -= 1.0;
    }
    if lo.exp() == 0.0 {
        return Err(Error::domain(format!("inverse_mu underflows for m = {m}")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let r = mid.exp();
        if mu_from_pair(r, complement(r)) > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = (0.5 * (lo + hi)).exp();
    // One Newton step on μ(r) − m.
    if r >= MU_ASYMPTOTIC_THRESHOLD {
        let step = (mu_from_pair(r, complement(r)) - m) / mu_prime(r)?;
        let polished = r - step;
        if polished > 0.0 && polished < 1.0 {
            r = polished;
        }
    }
    Ok((r, complement(r)))
}

/// Inverse of `μ`, returning `(r, √(1−r²))` with both components accurate.
///
/// For `m < π/2` the root is found through the functional equation
/// `μ(r) μ(√(1−r²)) = π²/4`, which keeps `1 − r` resolvable when `r` is
/// within rounding of 1.
pub fn inverse_mu_pair(m: f64) -> Result<(f64, f64)> {
    ensure(m > 0.0 && m.is_finite(), || format!("inverse_mu requires m > 0, got {m}"))?;
    if m >= FRAC_PI_2 {
        inverse_mu_small_r(m)
    } else {
        let (rc, r) = inverse_mu_small_r(PI * PI / (4.0 * m))?;
        Ok((r, rc))
    }
}

/// The unique `r ∈ (0, 1)` with `μ(r) = m`.
///
/// For `m` below about `0.12` the root is closer to 1 than `f64` can
/// represent; use [`inverse_mu_pair`] to keep the complement.
pub fn inverse_mu(m: f64) -> Result<f64> {
    inverse_mu_pair(m).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    /// Direct quadrature of the defining integral after `x = sin θ`.
    fn k_by_quadrature(w: f64) -> f64 {
        quad::integrate(
            |th: f64| 1.0 / (1.0 - w * th.sin().powi(2)).sqrt(),
            0.0,
            FRAC_PI_2,
            1e-15,
            1e-14,
        )
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn elliptic_k_examples() {
        assert_eq!(elliptic_k(EllipticParam::new(0.0).unwrap()), FRAC_PI_2);
        // Frozen from the quadrature oracle.
        let k_half = elliptic_k_checked(0.5).unwrap();
        assert!((k_half - 1.854_074_677_301_372).abs() < 1e-12);
        assert!(rel(k_half, k_by_quadrature(0.5)) < 1e-12);
        assert!((elliptic_k_checked(0.99).unwrap() - k_by_quadrature(0.99)).abs() < 1e-10);
    }

    #[test]
    fn elliptic_k_domain() {
        assert!(matches!(elliptic_k_checked(1.0), Err(Error::Domain(_))));
        assert!(matches!(elliptic_k_checked(-0.1), Err(Error::Domain(_))));
        assert!(elliptic_k_checked(f64::NAN).is_err());
    }

    #[test]
    fn elliptic_k_increasing() {
        let mut prev = 0.0;
        for i in 0..200 {
            let k = elliptic_k_checked(i as f64 / 200.0).unwrap();
            assert!(k > prev);
            prev = k;
        }
    }

    #[test]
    fn mu_examples() {
        assert!((mu(std::f64::consts::FRAC_1_SQRT_2).unwrap() - FRAC_PI_2).abs() < 1e-14);
        let prod = mu(0.5).unwrap() * mu(0.75f64.sqrt()).unwrap();
        assert!((prod - PI * PI / 4.0).abs() < 1e-10);
        let r: f64 = 0.1;
        let oracle = FRAC_PI_2 * k_by_quadrature(1.0 - r * r) / k_by_quadrature(r * r);
        assert!((mu(r).unwrap() - oracle).abs() < 1e-10);
        assert!(mu(0.0).is_err() && mu(1.0).is_err());
    }

    #[test]
    fn mu_asymptote_is_continuous_at_threshold() {
        let r = MU_ASYMPTOTIC_THRESHOLD;
        let agm_side = FRAC_PI_2 * agm(1.0, complement(r)) / agm(1.0, r);
        assert!((agm_side - (4.0 / r).ln()).abs() < 1e-10);
    }

    #[test]
    fn mu_t_examples() {
        assert!((mu_t(1.0).unwrap().get() - PI).abs() < 1e-12);
        assert!((mu_t(3.0).unwrap().get() - 2.0 * mu(0.5).unwrap()).abs() < 1e-13);
        let v = mu_t(10.0).unwrap().get();
        assert!(v > 11f64.ln() && v < 10f64.ln() + PI);
        assert!(mu_t(0.0).is_err() && mu_t(-1.0).is_err());
    }

    #[test]
    fn mu_g_examples() {
        assert!((mu_g(2f64.sqrt()).unwrap().get() - FRAC_PI_2).abs() < 1e-13);
        assert!((mu_g(2.0).unwrap().get() - mu_t(3.0).unwrap().get() / 2.0).abs() < 1e-13);
        let v = mu_g(10.0).unwrap().get();
        assert!(v > 10f64.ln() && v < 40f64.ln());
        assert!(mu_g(1.0).is_err());
    }

    #[test]
    fn mu_prime_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let k = elliptic_k_checked(0.5).unwrap();
        let expect = -PI * PI / (4.0 * r * 0.5 * k * k);
        assert!(rel(mu_prime(r).unwrap(), expect) < 1e-14);
        let h = 1e-6;
        let fd = (mu(0.3 + h).unwrap() - mu(0.3 - h).unwrap()) / (2.0 * h);
        assert!(rel(mu_prime(0.3).unwrap(), fd) < 1e-5);
        assert!(mu_prime(1.0).is_err());
    }

    #[test]
    fn inverse_mu_examples() {
        let r = inverse_mu(FRAC_PI_2).unwrap();
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((inverse_mu(mu(0.25).unwrap()).unwrap() - 0.25).abs() < 1e-9);
        // μ_T(1) = π  ⟺  μ(1/√2) = π/2.
        let m = mu_t(1.0).unwrap().get() / 2.0;
        assert!((inverse_mu(m).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(inverse_mu(0.0).is_err());
    }

    #[test]
    fn inverse_mu_keeps_complement_near_one() {
        // μ(r) small: r rounds to 1 but the complement stays accurate.
        let m = 0.05;
        let (r, rc) = inverse_mu_pair(m).unwrap();
        assert!(r <= 1.0 && rc > 0.0);
        assert!(rel(mu_from_pair(r, rc), m) < 1e-10);
    }

    #[test]
    fn inverse_mu_large_m() {
        let m = 40.0;
        let r = inverse_mu(m).unwrap();
        assert!((mu(r).unwrap() - m).abs() < 1e-10);
        assert!(rel(r, 4.0 * (-m).exp()) < 1e-9);
    }
}
