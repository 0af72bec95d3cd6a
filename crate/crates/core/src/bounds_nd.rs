//! Dimension-general constants of the Grötzsch and Teichmüller rings.
//!
//! For `n = 2` everything is known in closed form through [`special2d`];
//! for `n ≥ 3` only two-sided estimates exist, so every quantity is a
//! [`ModulusBracket`] tagged with where its endpoints come from.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::quad;
use crate::special2d;

/// Ambient dimension `n ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub const TWO: Dimension = Dimension(2);
    pub const THREE: Dimension = Dimension(3);

    pub fn new(n: usize) -> Result<Self> {
        ensure(n >= 2, || format!("dimension must be at least 2, got {n}"))?;
        Ok(Dimension(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `n` as a float, for exponents.
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_planar(self) -> bool {
        self.0 == 2
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(n: Dimension) -> usize {
        n.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed form, `lo == hi`.
    Exact,
    /// Endpoints from proven inequalities.
    AnalyticBound,
    /// Endpoints from a numerical computation without a proof of enclosure.
    Numeric,
}

/// Closed interval `[lo, hi]` enclosing a modulus or constant.
///
/// `hi` may be `+∞` for an unbounded enclosure; `lo` is always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusBracket {
    pub lo: f64,
    #[serde(with = "crate::serde_ext::inf_as_null")]
    pub hi: f64,
    pub provenance: Provenance,
}

impl ModulusBracket {
    pub fn exact(value: f64) -> Self {
        debug_assert!(value.is_finite());
        ModulusBracket { lo: value, hi: value, provenance: Provenance::Exact }
    }

    pub fn bound(lo: f64, hi: f64) -> Self {
        Self::with_provenance(lo, hi, Provenance::AnalyticBound)
    }

    pub fn numeric(lo: f64, hi: f64) -> Self {
        Self::with_provenance(lo, hi, Provenance::Numeric)
    }

    fn with_provenance(lo: f64, hi: f64, provenance: Provenance) -> Self {
        debug_assert!(lo.is_finite() && !hi.is_nan() && lo <= hi, "bad bracket [{lo}, {hi}]");
        ModulusBracket { lo, hi, provenance }
    }

    pub fn is_exact(&self) -> bool {
        self.provenance == Provenance::Exact
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    /// Midpoint for exact brackets, `None` otherwise.
    pub fn value(&self) -> Option<f64> {
        self.is_exact().then_some(self.lo)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    /// Image under an increasing function.
    pub fn map_increasing(self, f: impl Fn(f64) -> f64) -> Self {
        if self.is_exact() {
            return Self::exact(f(self.lo));
        }
        Self::with_provenance(f(self.lo), f(self.hi), self.provenance)
    }

    /// Image under a decreasing function; the endpoints swap.
    pub fn map_decreasing(self, f: impl Fn(f64) -> f64) -> Self {
        if self.is_exact() {
            return Self::exact(f(self.lo));
        }
        Self::with_provenance(f(self.hi), f(self.lo), self.provenance)
    }
}

/// Lanczos approximation (g = 7, nine terms).
#[allow(clippy::excessive_precision)]
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Surface area `ω_{n−1} = n π^{n/2} / Γ(n/2 + 1)` of the unit sphere in `R^n`.
pub fn omega(n: Dimension) -> f64 {
    let nf = n.as_f64();
    nf * PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0)
}

/// Upper estimate `2^{n/(n−1)} e^{n(n−2)/(n−1)}` of the Grötzsch constant.
pub fn lambda_upper(n: Dimension) -> f64 {
    let nf = n.as_f64();
    2f64.powf(nf / (nf - 1.0)) * (nf * (nf - 2.0) / (nf - 1.0)).exp()
}

/// Grötzsch constant `λ_n`: exactly 4 in the plane, `[4, λ_n^hi]` otherwise.
pub fn lambda_bracket(n: Dimension) -> ModulusBracket {
    if n.is_planar() {
        ModulusBracket::exact(4.0)
    } else {
        lambda_bound(n)
    }
}

/// The analytic `λ_n` bracket evaluated for any `n`, including `n = 2`.
pub fn lambda_bound(n: Dimension) -> ModulusBracket {
    ModulusBracket::bound(4.0, lambda_upper(n))
}

/// `Φ_n(s) = exp(mod R_{G,n}(s))`.
pub fn phi_bracket(n: Dimension, s: f64) -> Result<ModulusBracket> {
    if n.is_planar() {
        Ok(ModulusBracket::exact(special2d::mu_g(s)?.get().exp()))
    } else {
        phi_bound(n, s)
    }
}

/// `s ≤ Φ_n(s) ≤ λ_n s` for any `n`.
pub fn phi_bound(n: Dimension, s: f64) -> Result<ModulusBracket> {
    ensure(s > 1.0 && s.is_finite(), || format!("Phi_n requires s > 1, got {s}"))?;
    Ok(ModulusBracket::bound(s, lambda_upper(n) * s))
}

/// `Ψ_n(t) = exp(mod R_{T,n}(t))`.
pub fn psi_bracket(n: Dimension, t: f64) -> Result<ModulusBracket> {
    if n.is_planar() {
        Ok(ModulusBracket::exact(special2d::mu_t(t)?.get().exp()))
    } else {
        psi_bound(n, t)
    }
}

/// `t + 1 ≤ Ψ_n(t) ≤ λ_n² (√(1+t) + √t)² / 4` for any `n`.
pub fn psi_bound(n: Dimension, t: f64) -> Result<ModulusBracket> {
    ensure(t > 0.0 && t.is_finite(), || format!("Psi_n requires t > 0, got {t}"))?;
    let lam = lambda_upper(n);
    let root = (1.0 + t).sqrt() + t.sqrt();
    Ok(ModulusBracket::bound(t + 1.0, lam * lam * root * root / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingFamily {
    /// `γ_n(s)`, the modulus of the curve family of the Grötzsch ring.
    Gamma,
    /// `τ_n(t)`, the same for the Teichmüller ring.
    Tau,
}

/// `γ_n(s) = ω_{n−1} / (log Φ_n(s))^{n−1}` or the `τ_n` analogue.
pub fn gamma_tau_bracket(n: Dimension, arg: f64, which: RingFamily) -> Result<ModulusBracket> {
    let exp_modulus = match which {
        RingFamily::Gamma => phi_bracket(n, arg)?,
        RingFamily::Tau => psi_bracket(n, arg)?,
    };
    let w = omega(n);
    let power = n.as_f64() - 1.0;
    Ok(exp_modulus.map_decreasing(|v| w / v.ln().powf(power)))
}

/// Upper estimate `2 log((1+√2) λ_n / 2)` of `A_n`.
pub fn a_upper(n: Dimension) -> f64 {
    2.0 * ((1.0 + SQRT_2) * lambda_upper(n) / 2.0).ln()
}

/// `A_n = sup_{t>1} (mod R_{T,n}(t) − log t)`; exactly `π` in the plane.
///
/// For `n ≥ 3` the floor is `log 2`, from `Ψ_n(t) ≥ t + 1` as `t → 1⁺`.
pub fn a_constant(n: Dimension) -> ModulusBracket {
    if n.is_planar() {
        ModulusBracket::exact(PI)
    } else {
        a_bound(n)
    }
}

/// The analytic `A_n` bracket evaluated for any `n`, including `n = 2`.
pub fn a_bound(n: Dimension) -> ModulusBracket {
    ModulusBracket::bound(LN_2, a_upper(n))
}

/// `Q_n = 4 exp(A_n / 2)`.
pub fn q_constant(n: Dimension) -> ModulusBracket {
    a_constant(n).map_increasing(|a| 4.0 * (a / 2.0).exp())
}

/// Quadrature value of `∫₁^b ((r²+1)/(r²−1))^{(n−2)/(n−1)} dr/r` with
/// `b = a + √(a²+1)`, an upper bound for the modulus of the ring between
/// `[−e₁, e₁]` and the exterior of the ellipsoid with semi-axes
/// `√(a²+1), a, …, a`. Equal to `log b` in the plane.
pub fn re_modulus_upper(n: Dimension, a: f64) -> Result<f64> {
    ensure(a > 1.0 && a.is_finite(), || format!("R_E requires a > 1, got {a}"))?;
    let b = a + (a * a + 1.0).sqrt();
    if n.is_planar() {
        return Ok(b.ln());
    }
    let p = (n.as_f64() - 2.0) / (n.as_f64() - 1.0);
    let q = n.as_f64() - 1.0;
    // [1, 2] with r = 1 + v^{n−1}: the (r−1)^{−p} singularity cancels exactly.
    let near = quad::integrate(
        |v: f64| {
            let r = 1.0 + v.powf(q);
            q * ((r * r + 1.0) / (r + 1.0)).powf(p) / r
        },
        0.0,
        1.0,
        1e-13,
        1e-14,
    )?;
    // [2, b] with r = e^u.
    let far = quad::integrate(
        |u: f64| {
            let r = u.exp();
            (1.0 + 2.0 / (r * r - 1.0)).powf(p)
        },
        LN_2,
        b.ln(),
        1e-13,
        1e-14,
    )?;
    Ok(near + far)
}

/// `re_modulus_upper(n, a_max) − log(a_max / 2)`: converges to `log 4` in the
/// plane. For `n ≥ 3` this estimates an *upper bound* of `log λ_n` and must
/// only ever be reported as a numeric estimate.
pub fn lambda_estimate(n: Dimension, a_max: f64) -> Result<f64> {
    ensure(a_max > 10.0, || format!("lambda_estimate requires a_max > 10, got {a_max}"))?;
    Ok(re_modulus_upper(n, a_max)? - (a_max / 2.0).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special2d::{mu, mu_t};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    /// The even/odd case formula for `ω_{n−1}`.
    fn omega_by_parity(n: usize) -> f64 {
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        if n.is_multiple_of(2) {
            let k = n / 2;
            2.0 * k as f64 * PI.powi(k as i32) / fact(k)
        } else {
            let k = n.div_ceil(2);
            (2 * k - 1) as f64 * fact(k) * 2f64.powi(2 * k as i32) * PI.powi(k as i32 - 1)
                / fact(2 * k)
        }
    }

    #[test]
    fn dimension_rejects_one() {
        assert!(Dimension::new(1).is_err());
        assert_eq!(Dimension::new(3).unwrap(), Dimension::THREE);
    }

    #[test]
    fn omega_values() {
        assert!((omega(dim(2)) - 2.0 * PI).abs() < 1e-13);
        assert!((omega(dim(3)) - 4.0 * PI).abs() < 1e-13);
        assert!((omega(dim(4)) - 2.0 * PI * PI).abs() < 1e-12);
        for n in 2..=12 {
            let a = omega(dim(n));
            assert!(((a - omega_by_parity(n)) / a).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn gamma_matches_factorials() {
        let mut f = 1.0;
        for k in 1..20 {
            assert!(((gamma(k as f64) - f) / f).abs() < 1e-13);
            f *= k as f64;
        }
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lambda_brackets() {
        let b2 = lambda_bracket(dim(2));
        assert_eq!((b2.lo, b2.hi, b2.provenance), (4.0, 4.0, Provenance::Exact));
        // The generic upper formula collapses to 4 in the plane.
        assert!((lambda_upper(dim(2)) - 4.0).abs() < 1e-15);
        let b3 = lambda_bracket(dim(3));
        assert_eq!(b3.provenance, Provenance::AnalyticBound);
        assert!((b3.hi - 2f64.powf(1.5) * 1.5f64.exp()).abs() < 1e-12);
        assert!((b3.hi - 12.676).abs() < 1e-3);
    }

    #[test]
    fn phi_examples() {
        let p = phi_bracket(dim(2), SQRT_2).unwrap();
        assert!(p.is_exact() && (p.lo - (PI / 2.0).exp()).abs() < 1e-12);
        let p3 = phi_bracket(dim(3), 2.0).unwrap();
        assert_eq!(p3.lo, 2.0);
        assert!((p3.hi - 2.0 * 2f64.powf(1.5) * 1.5f64.exp()).abs() < 1e-12);
        // Φ_2(s) → 1 as s → 1⁺, logarithmically slowly.
        let mut prev = f64::INFINITY;
        for k in 1..15 {
            let v = phi_bracket(dim(2), 1.0 + 10f64.powi(-k)).unwrap().lo;
            assert!(v > 1.0 && v < prev);
            prev = v;
        }
        assert!(prev < 1.2);
        assert!(phi_bracket(dim(3), 1.0).is_err());
    }

    #[test]
    fn psi_examples() {
        let p = psi_bracket(dim(2), 1.0).unwrap();
        assert!(p.is_exact() && (p.lo - PI.exp()).abs() < 1e-10);
        let p3 = psi_bracket(dim(3), 1.0).unwrap();
        let lam = lambda_upper(dim(3));
        assert_eq!(p3.lo, 2.0);
        assert!((p3.hi - lam * lam * (SQRT_2 + 1.0).powi(2) / 4.0).abs() < 1e-10);
        assert!(psi_bracket(dim(4), 0.0).is_err());
    }

    #[test]
    fn gamma_tau_examples() {
        let g = gamma_tau_bracket(dim(2), SQRT_2, RingFamily::Gamma).unwrap();
        assert!(g.is_exact() && (g.lo - 4.0).abs() < 1e-12);
        assert!((g.lo - 2.0 * PI / mu(1.0 / SQRT_2).unwrap()).abs() < 1e-12);
        let t = gamma_tau_bracket(dim(2), 1.0, RingFamily::Tau).unwrap();
        assert!((t.lo - 2.0).abs() < 1e-12);
        let t3 = gamma_tau_bracket(dim(3), 1.0, RingFamily::Tau).unwrap();
        let psi = psi_bracket(dim(3), 1.0).unwrap();
        assert!((t3.lo - 4.0 * PI / psi.hi.ln().powi(2)).abs() < 1e-12);
        assert!((t3.hi - 4.0 * PI / LN_2.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn a_and_q_constants() {
        let a2 = a_constant(dim(2));
        assert!(a2.is_exact() && a2.lo == PI);
        let generic = a_upper(dim(2));
        assert!((generic - 3.14904).abs() < 5e-6);
        assert!(generic >= PI);
        let a3 = a_constant(dim(3));
        assert_eq!(a3.lo, LN_2);
        let expect = 2.0 * ((1.0 + SQRT_2) * 2f64.powf(1.5) * 1.5f64.exp() / 2.0).ln();
        assert!((a3.hi - expect).abs() < 1e-12);

        let q2 = q_constant(dim(2));
        assert!((q2.lo - 4.0 * (PI / 2.0).exp()).abs() < 1e-12);
        assert!((q2.lo - 19.2419).abs() < 1e-4);
        let q3 = q_constant(dim(3));
        assert!((q3.lo - 4.0 * (LN_2 / 2.0).exp()).abs() < 1e-12);
        assert!((q3.hi - 4.0 * (a3.hi / 2.0).exp()).abs() < 1e-9);
    }

    #[test]
    fn a_constant_is_sup_of_teichmuller_excess() {
        let sup = (1..=2000)
            .map(|i| 1.0 + 1e-9 * (i as f64).powi(2))
            .map(|t| mu_t(t).unwrap().get() - t.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((sup - a_constant(dim(2)).lo).abs() < 1e-6);
    }

    #[test]
    fn re_integral() {
        for a in [2.0, 10.0, 100.0] {
            let b = a + (a * a + 1.0f64).sqrt();
            assert!((re_modulus_upper(dim(2), a).unwrap() - b.ln()).abs() < 1e-12);
        }
        let v = re_modulus_upper(dim(3), 10.0).unwrap();
        assert!(v >= (10.0 + 101f64.sqrt()).ln());
        assert!(re_modulus_upper(dim(3), 1.0).is_err());
    }

    #[test]
    fn re_integral_by_plain_quadrature() {
        // Independent check of the substitutions: integrate in r directly,
        // splitting off a small analytic piece near the singular endpoint.
        let n = dim(3);
        let a: f64 = 3.0;
        let b = a + (a * a + 1.0).sqrt();
        let f = |r: f64| ((r * r + 1.0) / (r * r - 1.0)).sqrt() / r;
        let eps: f64 = 1e-8;
        // Near r = 1 the integrand is ≈ (r−1)^{-1/2}.
        let head = 2.0 * eps.sqrt();
        let body = quad::integrate(f, 1.0 + eps, b, 1e-10, 1e-12).unwrap();
        assert!((re_modulus_upper(n, a).unwrap() - head - body).abs() < 1e-6);
    }

    #[test]
    fn lambda_estimates() {
        let v = lambda_estimate(dim(2), 1e6).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-6);
        let d1 = (lambda_estimate(dim(2), 100.0).unwrap() - 4f64.ln()).abs();
        let d2 = (lambda_estimate(dim(2), 1e4).unwrap() - 4f64.ln()).abs();
        assert!(d2 < d1);
        let v3 = lambda_estimate(dim(3), 1e4).unwrap();
        assert!(v3.is_finite() && v3 >= 4f64.ln() - 1e-3);
        assert!(lambda_estimate(dim(2), 5.0).is_err());
    }

    #[test]
    fn generic_brackets_contain_planar_values() {
        let n = dim(2);
        assert!(lambda_bound(n).contains(4.0, 1e-12));
        assert!(a_bound(n).contains(PI, 0.0));
        for &t in &[0.01, 0.5, 1.0, 3.0, 40.0, 1e4] {
            let exact = psi_bracket(n, t).unwrap().lo;
            assert!(psi_bound(n, t).unwrap().contains(exact, 1e-9 * exact), "t = {t}");
        }
        for &s in &[1.001, 1.5, 2.0, 10.0, 1e3] {
            let exact = phi_bracket(n, s).unwrap().lo;
            assert!(phi_bound(n, s).unwrap().contains(exact, 1e-9 * exact), "s = {s}");
        }
    }

    #[test]
    fn duplication_relation() {
        let n = dim(2);
        for i in 1..=50 {
            let t = 0.05 * (i as f64).powi(2);
            let lhs = psi_bracket(n, t).unwrap().lo.ln();
            let rhs = 2.0 * phi_bracket(n, (t + 1.0).sqrt()).unwrap().lo.ln();
            assert!((lhs - rhs).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn exactness_only_in_the_plane() {
        for n in 3..8 {
            let n = dim(n);
            for b in [lambda_bracket(n), a_constant(n), q_constant(n)] {
                assert!(!b.is_exact() && b.lo <= b.hi);
            }
        }
    }
}
