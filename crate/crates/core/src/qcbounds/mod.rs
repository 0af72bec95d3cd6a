//! Quasiconformal distortion: the distortion function `φ_{K,n}`, Hölder
//! certificates for self-maps of the ball and the half-space, and a
//! sampling check of those certificates on maps of known dilatation.

mod maps;

pub use maps::TestMap;

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds_nd::{a_constant, lambda_bracket, q_constant, Dimension, ModulusBracket};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::geometry::vector;
use crate::special2d::{inverse_mu_pair, mu};

/// Maximal dilatation `K ≥ 1` with its Hölder exponent `α = K^{−1/(n−1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QCParams {
    pub k: f64,
    pub n: Dimension,
    pub alpha: f64,
}

impl QCParams {
    pub fn new(k: f64, n: Dimension) -> Result<Self> {
        ensure(k >= 1.0 && k.is_finite(), || format!("dilatation must satisfy K ≥ 1, got {k}"))?;
        let alpha = if k == 1.0 { 1.0 } else { k.powf(-1.0 / (n.as_f64() - 1.0)) };
        Ok(QCParams { k, n, alpha })
    }
}

/// `φ_{K,2}(r)` with its complement `√(1 − φ²)`, which stays accurate when
/// `φ` rounds to 1.
pub fn phi_distortion_pair(k: f64, r: f64) -> Result<(f64, f64)> {
    ensure(k >= 1.0 && k.is_finite(), || format!("dilatation must satisfy K ≥ 1, got {k}"))?;
    ensure(r > 0.0 && r < 1.0, || format!("φ needs 0 < r < 1, got {r}"))?;
    if k == 1.0 {
        return Ok((r, ((1.0 - r) * (1.0 + r)).sqrt()));
    }
    inverse_mu_pair(mu(r)? / k)
}

/// `φ_{K,n}(r) = 1/γ_n⁻¹(K γ_n(1/r))`.
///
/// In the plane `γ_2(s) = 2π/μ(1/s)` makes this `μ⁻¹(μ(r)/K)`, returned
/// exactly. For `n ≥ 3` the bracket `log Φ_n(s) ∈ [log s, log λ_n s]`
/// carried through both uses of `γ_n` gives `φ ∈ [(r/λ_n)^α, λ_n r^α]`,
/// intersected with the trivial range `[r, 1]`.
pub fn phi_distortion(k: f64, n: Dimension, r: f64) -> Result<ModulusBracket> {
    let params = QCParams::new(k, n)?;
    ensure(r > 0.0 && r < 1.0, || format!("φ needs 0 < r < 1, got {r}"))?;
    if k == 1.0 {
        return Ok(ModulusBracket::exact(r));
    }
    if n.is_planar() {
        return Ok(ModulusBracket::exact(phi_distortion_pair(k, r)?.0));
    }
    let lambda = lambda_bracket(n).hi;
    let a = params.alpha;
    let lo = (r / lambda).powf(a).max(r);
    let hi = (lambda * r.powf(a)).min(1.0);
    Ok(ModulusBracket::bound(lo, hi.max(lo)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolderDomain {
    Ball,
    /// Boundary points `|ξ| ≤ radius`, interior points within 1 of them.
    Halfspace { radius: f64 },
}

/// Quantities of the half-space chain, for one choice of `A_n` and `r'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceChain {
    pub a_n: f64,
    /// `R' = (1+R) exp((A_n + log 2)/α)`.
    pub r_prime_outer: f64,
    /// `r = (R' − 1)/(R' + 1)`.
    pub r: f64,
    /// `r' = φ_{K,n}(r)`.
    pub r_prime: f64,
    /// `ρ = 1 + 4/(1 − r')`.
    #[serde(with = "crate::serde_ext::inf_as_null")]
    pub rho: f64,
    /// `δ = exp(−(A_n + log 2)/α)`.
    pub delta: f64,
    /// `M = 4 e^{A_n}`.
    pub m: f64,
    /// `C = (ρ + 1) M`.
    #[serde(with = "crate::serde_ext::inf_as_null")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateOutcome {
    Bounded,
    /// The chain lost all information (`r'` reached 1); the constant is `∞`.
    Unbounded,
}

/// `|f(x) − f(ξ)| ≤ C |x − ξ|^exponent` for `K`-quasiconformal self-maps
/// with the stated normalisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderCertificate {
    pub k: f64,
    pub n: Dimension,
    pub exponent: f64,
    pub constant: ModulusBracket,
    pub domain: HolderDomain,
    pub outcome: CertificateOutcome,
    /// Ball only: below this distance the estimate is `Q_n |x − ξ|^{α/2}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,
    /// Half-space only: the chain at the upper (sound) and lower ends of
    /// the constant brackets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intermediate: Option<HalfspaceChain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intermediate_lower: Option<HalfspaceChain>,
}

/// Certificate for maps of `Bⁿ` fixing the origin: exponent `α/2`,
/// constant `2 Q_n`.
pub fn holder_ball(k: f64, n: Dimension) -> Result<HolderCertificate> {
    let p = QCParams::new(k, n)?;
    let q = q_constant(n);
    Ok(HolderCertificate {
        k,
        n,
        exponent: p.alpha / 2.0,
        constant: q.map_increasing(|v| 2.0 * v),
        domain: HolderDomain::Ball,
        outcome: CertificateOutcome::Bounded,
        epsilon0: Some((-(2.0 / p.alpha) * q.hi.ln()).exp()),
        intermediate: None,
        intermediate_lower: None,
    })
}

fn halfspace_chain(p: &QCParams, big_r: f64, a_n: f64, upper: bool) -> Result<HalfspaceChain> {
    let gain = (a_n + LN_2) / p.alpha;
    let r_prime_outer = (1.0 + big_r) * gain.exp();
    let r = (r_prime_outer - 1.0) / (r_prime_outer + 1.0);
    let phi = phi_distortion(p.k, p.n, r)?;
    let r_prime = if upper { phi.hi } else { phi.lo };
    let rho = if r_prime < 1.0 { 1.0 + 4.0 / (1.0 - r_prime) } else { f64::INFINITY };
    let m = 4.0 * a_n.exp();
    Ok(HalfspaceChain {
        a_n,
        r_prime_outer,
        r,
        r_prime,
        rho,
        delta: (-gain).exp(),
        m,
        c: (rho + 1.0) * m,
    })
}

/// Certificate for maps of `Hⁿ` fixing `e_n` and `∞`: exponent `α`.
///
/// The constant bracket runs the chain at the lower and the upper ends of
/// the `A_n` and `φ_{K,n}` brackets; each step is increasing in both, so
/// the upper chain bounds the constant for every admissible true value.
pub fn holder_halfspace(k: f64, n: Dimension, big_r: f64) -> Result<HolderCertificate> {
    let p = QCParams::new(k, n)?;
    ensure(big_r > 0.0 && big_r.is_finite(), || format!("R must be positive, got {big_r}"))?;
    let a = a_constant(n);
    let upper = halfspace_chain(&p, big_r, a.hi, true)?;
    let lower = halfspace_chain(&p, big_r, a.lo, false)?;
    let exact = a.is_exact() && upper == lower;
    let constant = if exact { ModulusBracket::exact(upper.c) } else { ModulusBracket::bound(lower.c, upper.c) };
    Ok(HolderCertificate {
        k,
        n,
        exponent: p.alpha,
        constant,
        domain: HolderDomain::Halfspace { radius: big_r },
        outcome: if upper.c.is_finite() { CertificateOutcome::Bounded } else { CertificateOutcome::Unbounded },
        epsilon0: None,
        intermediate: Some(upper),
        intermediate_lower: (!exact).then_some(lower),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub samples: usize,
    /// Largest `|f(x) − f(ξ)| / (C |x − ξ|^exponent)` with `C` the upper
    /// end of the constant bracket.
    pub max_ratio: f64,
    /// The pair attaining it.
    pub worst_x: Vec<f64>,
    pub worst_xi: Vec<f64>,
    pub pass: bool,
    /// True when the certificate is unbounded and checks nothing.
    pub vacuous: bool,
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q = vector::norm_sq(&v);
        if q > 1e-4 && q <= 1.0 {
            return vector::scale(&v, 1.0 / q.sqrt());
        }
    }
}

/// Samples `(x, ξ)` pairs, interior point and boundary point, with
/// `|x − ξ|` log-uniform down to `1e−8`.
fn sample_pairs(domain: HolderDomain, n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        match domain {
            HolderDomain::Ball => {
                let xi = unit_vector(&mut rng, n);
                let s = 10f64.powf(rng.gen_range(-8.0..2f64.log10()));
                let mut v = unit_vector(&mut rng, n);
                if vector::dot(&v, &xi) > 0.0 {
                    v = vector::scale(&v, -1.0);
                }
                let x = vector::axpy(&xi, s, &v);
                if vector::norm_sq(&x) < 1.0 {
                    out.push((x, xi));
                }
            }
            HolderDomain::Halfspace { radius } => {
                let mut xi = vec![0.0; n];
                let dir = unit_vector(&mut rng, n - 1);
                let rad = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / (n - 1) as f64);
                for k in 0..n - 1 {
                    xi[k] = rad * dir[k];
                }
                let s = 10f64.powf(rng.gen_range(-8.0..0.0));
                let mut v = unit_vector(&mut rng, n);
                v[n - 1] = v[n - 1].abs();
                let x = vector::axpy(&xi, s, &v);
                if x[n - 1] > 0.0 {
                    out.push((x, xi));
                }
            }
        }
    }
    out
}

/// Checks a certificate against a test map on `samples` seeded pairs.
pub fn verify_holder_empirical(
    map: &TestMap,
    cert: &HolderCertificate,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<HolderReport> {
    map.validate()?;
    let n = cert.n.get();
    ensure(map.dim() == n, || format!("map is {}-dimensional, certificate {n}", map.dim()))?;
    ensure(samples > 0, || "need at least one sample".into())?;
    ensure(map.dilatation() <= cert.k * (1.0 + 1e-12), || {
        format!("map dilatation {} exceeds the certificate's K = {}", map.dilatation(), cert.k)
    })?;
    match cert.domain {
        HolderDomain::Ball => {
            ensure(map.maps_ball_to_itself(), || format!("{map:?} is not a self-map of the ball"))?;
            let o = map.apply(&vec![0.0; n]);
            ensure(vector::norm(&o) < 1e-12, || "the ball certificate needs f(0) = 0".into())?;
        }
        HolderDomain::Halfspace { .. } => {
            ensure(map.maps_halfspace_to_itself(), || {
                format!("{map:?} is not a self-map of the half-space")
            })?;
            let e = vector::last_axis(n);
            ensure(vector::dist(&map.apply(&e), &e) < 1e-12, || {
                "the half-space certificate needs f(e_n) = e_n".into()
            })?;
        }
    }
    let c = cert.constant.hi;
    if !c.is_finite() {
        return Ok(HolderReport {
            samples: 0,
            max_ratio: 0.0,
            worst_x: vec![],
            worst_xi: vec![],
            pass: true,
            vacuous: true,
        });
    }
    let pairs = sample_pairs(cert.domain, n, samples, seed);
    let ratios = exec.map(pairs.len(), |i| {
        let (x, xi) = &pairs[i];
        let d = vector::dist(x, xi);
        vector::dist(&map.apply(x), &map.apply(xi)) / (c * d.powf(cert.exponent))
    });
    let (worst, &max_ratio) = ratios
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .ok_or_else(|| Error::domain("no samples"))?;
    Ok(HolderReport {
        samples: pairs.len(),
        max_ratio,
        worst_x: pairs[worst].0.clone(),
        worst_xi: pairs[worst].1.clone(),
        pass: max_ratio <= 1.0,
        vacuous: false,
    })
}
