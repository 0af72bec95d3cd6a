use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::{vector, ExtPoint};
use crate::bounds_nd::Dimension;
use crate::error::{ensure, Result};
use crate::special2d;

/// Sample count cap per primitive.
const MAX_SAMPLES: usize = 200_000;

/// The annular ring `A(a; r0, r1) = {x : r0 < |x − a| < r1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Vec<f64>,
    pub r0: f64,
    pub r1: f64,
}

impl Annulus {
    pub fn new(center: Vec<f64>, r0: f64, r1: f64) -> Result<Self> {
        ensure(center.iter().all(|c| c.is_finite()) && !center.is_empty(), || {
            "annulus center must be a finite point".into()
        })?;
        ensure(r0 > 0.0 && r0 < r1 && r1.is_finite(), || {
            format!("annulus radii must satisfy 0 < r0 < r1 < ∞, got ({r0}, {r1})")
        })?;
        Ok(Annulus { center, r0, r1 })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn modulus(&self) -> f64 {
        (self.r1 / self.r0).ln()
    }

    /// Open-annulus membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        let d = vector::dist(x, &self.center);
        d > self.r0 && d < self.r1
    }
}

/// Building blocks of a continuum. All are closed sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Primitive {
    /// Closed ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : |x − c| ≥ radius} ∪ {∞}`.
    BallExterior { center: Vec<f64>, radius: f64 },
    Segment { a: Vec<f64>, b: Vec<f64> },
    Polyline { points: Vec<Vec<f64>> },
    /// `{origin + t·direction : t ≥ 0} ∪ {∞}`.
    Ray { origin: Vec<f64>, direction: Vec<f64> },
}

fn nearest_on_segment(p: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let ab = vector::sub(b, a);
    let len2 = vector::norm_sq(&ab);
    if len2 == 0.0 {
        return a.to_vec();
    }
    let t = (vector::dot(&vector::sub(p, a), &ab) / len2).clamp(0.0, 1.0);
    vector::axpy(a, t, &ab)
}

fn closest_on_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    vector::dist(p, &nearest_on_segment(p, a, b))
}

/// Smallest `|I(x) − I(a + t v)|` over `t ∈ [0, t_max]`, where `I` is the
/// inversion `z ↦ p + (z − p)/|z − p|²` and `x = I(y)`.
///
/// `|I(x) − I(c)| = |x − c| / (|x − p| |c − p|)`, and the ratio of the two
/// quadratics `|x − c(t)|²` and `|c(t) − p|²` is stationary where a
/// quadratic in `t` vanishes.
fn inverted_segment_distance(x: &[f64], p: &[f64], a: &[f64], v: &[f64], t_max: f64) -> f64 {
    let xa = vector::sub(x, a);
    let ap = vector::sub(a, p);
    let (a0, b, c) = (vector::norm_sq(&xa), vector::dot(&xa, v), vector::norm_sq(v));
    let (e, f) = (vector::norm_sq(&ap), vector::dot(&ap, v));
    let ratio = |t: f64| {
        let num = a0 - 2.0 * b * t + c * t * t;
        let den = e + 2.0 * f * t + c * t * t;
        (num.max(0.0) / den).sqrt()
    };
    let mut best = ratio(0.0);
    if t_max.is_finite() {
        best = best.min(ratio(t_max));
    } else {
        best = best.min(1.0);
    }
    // c (b + f) t² + c (e − a0) t − (b e + a0 f) = 0.
    let (qa, qb, qc) = (c * (b + f), c * (e - a0), -(b * e + a0 * f));
    let mut roots = Vec::with_capacity(2);
    if qa.abs() > 1e-300 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * sq);
            roots.push(q / qa);
            if q != 0.0 {
                roots.push(qc / q);
            }
        }
    } else if qb != 0.0 {
        roots.push(-qc / qb);
    }
    for t in roots {
        if t > 0.0 && t < t_max {
            best = best.min(ratio(t));
        }
    }
    best / vector::dist(x, p)
}

/// The point of the sphere `|x − c| = r` on the ray from `c` through `p`.
fn radial_projection(p: &[f64], c: &[f64], r: f64) -> Vec<f64> {
    let v = vector::sub(p, c);
    let len = vector::norm(&v);
    if len == 0.0 {
        let mut q = c.to_vec();
        q[0] += r;
        q
    } else {
        vector::axpy(c, r / len, &v)
    }
}

/// Deterministic quasi-uniform points on the sphere `|x − c| = r`.
fn sphere_samples(center: &[f64], r: f64, eps: f64) -> Vec<Vec<f64>> {
    let n = center.len();
    match n {
        2 => {
            let m = ((2.0 * PI * r / eps).ceil() as usize).clamp(8, MAX_SAMPLES);
            (0..m)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / m as f64;
                    vec![center[0] + r * th.cos(), center[1] + r * th.sin()]
                })
                .collect()
        }
        3 => {
            let m = ((4.0 * PI * r * r / (eps * eps)).ceil() as usize).clamp(32, MAX_SAMPLES);
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let th = golden * k as f64;
                    vec![
                        center[0] + r * rho * th.cos(),
                        center[1] + r * rho * th.sin(),
                        center[2] + r * z,
                    ]
                })
                .collect()
        }
        _ => {
            // Great circles in every coordinate plane.
            let per = ((2.0 * PI * r / eps).ceil() as usize).clamp(8, MAX_SAMPLES / (n * n));
            let mut out = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..per {
                        let th = 2.0 * PI * k as f64 / per as f64;
                        let mut p = center.to_vec();
                        p[i] += r * th.cos();
                        p[j] += r * th.sin();
                        out.push(p);
                    }
                }
            }
            out
        }
    }
}

/// About `count` deterministic points on the sphere `|x − c| = r`.
pub fn sphere_points(center: &[f64], r: f64, count: usize) -> Vec<Vec<f64>> {
    let n = center.len();
    let count = count.max(8) as f64;
    let eps = match n {
        2 => 2.0 * PI * r / count,
        3 => r * (4.0 * PI / count).sqrt(),
        _ => 2.0 * PI * r * (n * (n - 1)) as f64 / (2.0 * count),
    };
    sphere_samples(center, r, eps)
}

fn segment_samples(a: &[f64], b: &[f64], eps: f64) -> Vec<Vec<f64>> {
    let len = vector::dist(a, b);
    let m = ((len / eps).ceil() as usize).clamp(1, MAX_SAMPLES);
    let ab = vector::sub(b, a);
    (0..=m).map(|k| vector::axpy(a, k as f64 / m as f64, &ab)).collect()
}

impl Primitive {
    pub fn dim(&self) -> usize {
        match self {
            Primitive::Ball { center, .. } | Primitive::BallExterior { center, .. } => center.len(),
            Primitive::Segment { a, .. } => a.len(),
            Primitive::Polyline { points } => points.first().map_or(0, Vec::len),
            Primitive::Ray { origin, .. } => origin.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        let pts: Vec<&Vec<f64>> = match self {
            Primitive::Ball { center, radius } | Primitive::BallExterior { center, radius } => {
                ensure(*radius > 0.0 && radius.is_finite(), || {
                    format!("ball radius must be positive, got {radius}")
                })?;
                vec![center]
            }
            Primitive::Segment { a, b } => vec![a, b],
            Primitive::Polyline { points } => {
                ensure(!points.is_empty(), || "polyline needs at least one point".into())?;
                points.iter().collect()
            }
            Primitive::Ray { origin, direction } => {
                ensure(vector::norm(direction) > 0.0, || "ray direction must be non-zero".into())?;
                vec![origin, direction]
            }
        };
        ensure(n >= 1, || "primitive has no coordinates".into())?;
        ensure(pts.iter().all(|p| p.len() == n && p.iter().all(|c| c.is_finite())), || {
            "primitive coordinates must be finite and of equal dimension".into()
        })
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Primitive::BallExterior { .. } | Primitive::Ray { .. })
    }

    /// Euclidean distance from `p` to the primitive (zero inside).
    pub fn distance(&self, p: &[f64]) -> f64 {
        match self {
            Primitive::Ball { center, radius } => (vector::dist(p, center) - radius).max(0.0),
            Primitive::BallExterior { center, radius } => (radius - vector::dist(p, center)).max(0.0),
            Primitive::Segment { a, b } => closest_on_segment(p, a, b),
            Primitive::Polyline { points } => {
                if points.len() == 1 {
                    return vector::dist(p, &points[0]);
                }
                points
                    .windows(2)
                    .map(|w| closest_on_segment(p, &w[0], &w[1]))
                    .fold(f64::INFINITY, f64::min)
            }
            Primitive::Ray { origin, direction } => {
                let d = vector::scale(direction, 1.0 / vector::norm(direction));
                let t = vector::dot(&vector::sub(p, origin), &d).max(0.0);
                vector::dist(p, &vector::axpy(origin, t, &d))
            }
        }
    }

    /// Distance from `y` to the image of the primitive under the inversion
    /// `z ↦ p + (z − p)/|z − p|²`; `p` must lie off the primitive.
    pub fn inverted_distance(&self, y: &[f64], p: &[f64]) -> f64 {
        let w = vector::sub(y, p);
        let q = vector::norm_sq(&w);
        if q == 0.0 {
            // y is the image of ∞.
            return if self.is_unbounded() { 0.0 } else { f64::INFINITY };
        }
        let x = vector::axpy(p, 1.0 / q, &w);
        match self {
            Primitive::Ball { center, radius } | Primitive::BallExterior { center, radius } => {
                // Both map onto the closed ball bounded by the image sphere.
                let cp = vector::sub(center, p);
                let k = vector::norm_sq(&cp) - radius * radius;
                let c_img = vector::axpy(p, 1.0 / k, &cp);
                (vector::dist(y, &c_img) - radius / k.abs()).max(0.0)
            }
            Primitive::Segment { a, b } => {
                inverted_segment_distance(&x, p, a, &vector::sub(b, a), 1.0)
            }
            Primitive::Polyline { points } => {
                if points.len() == 1 {
                    return inverted_segment_distance(&x, p, &points[0], &vec![0.0; x.len()], 0.0);
                }
                points
                    .windows(2)
                    .map(|s| inverted_segment_distance(&x, p, &s[0], &vector::sub(&s[1], &s[0]), 1.0))
                    .fold(f64::INFINITY, f64::min)
            }
            Primitive::Ray { origin, direction } => {
                inverted_segment_distance(&x, p, origin, direction, f64::INFINITY)
            }
        }
    }

    /// A point of the primitive nearest to `p`.
    pub fn closest_point(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Primitive::Ball { center, radius } => {
                if vector::dist(p, center) <= *radius {
                    p.to_vec()
                } else {
                    radial_projection(p, center, *radius)
                }
            }
            Primitive::BallExterior { center, radius } => {
                if vector::dist(p, center) >= *radius {
                    p.to_vec()
                } else {
                    radial_projection(p, center, *radius)
                }
            }
            Primitive::Segment { a, b } => nearest_on_segment(p, a, b),
            Primitive::Polyline { points } => {
                if points.len() == 1 {
                    return points[0].clone();
                }
                points
                    .windows(2)
                    .map(|w| nearest_on_segment(p, &w[0], &w[1]))
                    .min_by(|a, b| vector::dist_sq(p, a).total_cmp(&vector::dist_sq(p, b)))
                    .expect("at least one segment")
            }
            Primitive::Ray { origin, direction } => {
                let d = vector::scale(direction, 1.0 / vector::norm(direction));
                let t = vector::dot(&vector::sub(p, origin), &d).max(0.0);
                vector::axpy(origin, t, &d)
            }
        }
    }

    /// Extreme points of the finite part; rays contribute only their origin.
    fn finite_points(&self) -> Vec<Vec<f64>> {
        match self {
            Primitive::Ball { center, radius } | Primitive::BallExterior { center, radius } => {
                let mut out = Vec::new();
                for k in 0..center.len() {
                    for s in [-1.0, 1.0] {
                        let mut p = center.clone();
                        p[k] += s * radius;
                        out.push(p);
                    }
                }
                out
            }
            Primitive::Segment { a, b } => vec![a.clone(), b.clone()],
            Primitive::Polyline { points } => points.clone(),
            Primitive::Ray { origin, .. } => vec![origin.clone()],
        }
    }

    /// Points of the primitive spaced about `eps` apart. Balls contribute their
    /// boundary sphere and centre; unbounded primitives are truncated
    /// geometrically far from the origin.
    pub fn samples(&self, eps: f64) -> Vec<Vec<f64>> {
        match self {
            Primitive::Ball { center, radius } => {
                let mut s = sphere_samples(center, *radius, eps);
                s.push(center.clone());
                s
            }
            Primitive::BallExterior { center, radius } => {
                let mut s = sphere_samples(center, *radius, eps);
                let far = sphere_samples(center, radius * 1e3, radius * 1e3 * 0.5);
                s.extend(far);
                s
            }
            Primitive::Segment { a, b } => segment_samples(a, b, eps),
            Primitive::Polyline { points } => {
                if points.len() == 1 {
                    return points.clone();
                }
                let mut out = Vec::new();
                for w in points.windows(2) {
                    let mut s = segment_samples(&w[0], &w[1], eps);
                    if !out.is_empty() {
                        s.remove(0);
                    }
                    out.extend(s);
                }
                out
            }
            Primitive::Ray { origin, direction } => {
                let d = vector::scale(direction, 1.0 / vector::norm(direction));
                let near = 8.0 * vector::norm(origin).max(1.0);
                let mut out = segment_samples(origin, &vector::axpy(origin, near, &d), eps);
                let mut t = near;
                while t < 1e8 * near && out.len() < MAX_SAMPLES {
                    t *= 1.05;
                    out.push(vector::axpy(origin, t, &d));
                }
                out
            }
        }
    }
}

/// A closed connected set given as a union of primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Continuum {
    #[serde(rename = "continuum")]
    pub primitives: Vec<Primitive>,
    #[serde(default)]
    pub contains_infinity: bool,
}

impl Continuum {
    pub fn new(primitives: Vec<Primitive>, contains_infinity: bool) -> Result<Self> {
        let c = Continuum { primitives, contains_infinity };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(!self.primitives.is_empty(), || "a continuum needs at least one primitive".into())?;
        for p in &self.primitives {
            p.validate()?;
        }
        let n = self.primitives[0].dim();
        ensure(self.primitives.iter().all(|p| p.dim() == n), || {
            "all primitives of a continuum must share a dimension".into()
        })?;
        ensure(self.contains_infinity || !self.primitives.iter().any(Primitive::is_unbounded), || {
            "continuum with a ray or ball exterior must contain ∞".into()
        })
    }

    pub fn dim(&self) -> usize {
        self.primitives[0].dim()
    }

    pub fn has_infinity(&self) -> bool {
        self.contains_infinity || self.primitives.iter().any(Primitive::is_unbounded)
    }

    pub fn distance(&self, p: &[f64]) -> f64 {
        self.primitives.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn samples(&self, eps: f64) -> Vec<Vec<f64>> {
        self.primitives.iter().flat_map(|p| p.samples(eps)).collect()
    }

    /// Distance from `y` to the image of the continuum under the inversion
    /// `z ↦ p + (z − p)/|z − p|²`, which sends `∞` to `p`.
    pub fn inverted_distance(&self, y: &[f64], p: &[f64]) -> f64 {
        let d = self.primitives.iter().map(|q| q.inverted_distance(y, p)).fold(f64::INFINITY, f64::min);
        if self.contains_infinity {
            d.min(vector::dist(y, p))
        } else {
            d
        }
    }

    /// A point of the finite part nearest to `p`.
    pub fn closest_point(&self, p: &[f64]) -> Vec<f64> {
        self.primitives
            .iter()
            .map(|q| q.closest_point(p))
            .min_by(|a, b| vector::dist_sq(p, a).total_cmp(&vector::dist_sq(p, b)))
            .expect("continua have at least one primitive")
    }

    fn finite_points(&self) -> Vec<Vec<f64>> {
        self.primitives.iter().flat_map(Primitive::finite_points).collect()
    }

    /// ε-chain connectivity of the primitives: two primitives are linked
    /// when a sample of one lies within `eps` of the other.
    pub fn is_connected(&self, eps: f64) -> bool {
        let m = self.primitives.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        for i in 0..m {
            let samples = self.primitives[i].samples(eps);
            for j in 0..m {
                if i == j || find(&mut parent, i) == find(&mut parent, j) {
                    continue;
                }
                if samples.iter().any(|s| self.primitives[j].distance(s) <= eps) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let root = find(&mut parent, 0);
        (0..m).all(|i| find(&mut parent, i) == root)
    }
}

/// The two canonical extremal rings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CanonicalRing {
    /// `R_{G,n}(s) = R(B̄ⁿ, [s e₁, ∞])`, `s > 1`.
    Grotzsch { s: f64 },
    /// `R_{T,n}(t) = R([−e₁, 0], [t e₁, ∞])`, `t > 0`.
    Teichmuller { t: f64 },
}

impl CanonicalRing {
    /// Closed-form modulus where one is known (the plane).
    pub fn exact_modulus(&self, n: Dimension) -> Option<f64> {
        if !n.is_planar() {
            return None;
        }
        match *self {
            CanonicalRing::Grotzsch { s } => special2d::mu_g(s).ok().map(|v| v.get()),
            CanonicalRing::Teichmuller { t } => special2d::mu_t(t).ok().map(|v| v.get()),
        }
    }
}

/// A ring `R = S̄ⁿ \ (C0 ∪ C1)` with `∞ ∈ C1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingGeometry {
    pub c0: Continuum,
    pub c1: Continuum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalRing>,
}

impl RingGeometry {
    /// Validates both continua, the `∞ ∈ C1` convention, sampled
    /// disjointness and ε-chain connectivity at the default resolution.
    pub fn new(c0: Continuum, c1: Continuum) -> Result<Self> {
        let ring = RingGeometry { c0, c1, canonical: None };
        ring.validate()?;
        Ok(ring)
    }

    pub fn validate(&self) -> Result<()> {
        self.c0.validate()?;
        self.c1.validate()?;
        ensure(self.c0.dim() == self.c1.dim(), || "continua live in different dimensions".into())?;
        ensure(!self.c0.has_infinity(), || "by convention ∞ belongs to C1, not C0".into())?;
        let eps = self.default_eps();
        let gap = self.separation(eps);
        ensure(gap > 1e-12 * self.scale(), || {
            format!("continua intersect at sampling resolution (gap {gap:e})")
        })?;
        ensure(self.c0.is_connected(eps) && self.c1.is_connected(eps), || {
            format!("a continuum is not ε-chain connected at ε = {eps:e}")
        })
    }

    pub fn dim(&self) -> usize {
        self.c0.dim()
    }

    /// Size of the finite part of the configuration.
    pub fn scale(&self) -> f64 {
        let pts: Vec<Vec<f64>> = self.c0.finite_points().into_iter().chain(self.c1.finite_points()).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max(vector::dist(a, b));
            }
        }
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }

    /// `10⁻³ · diam` of the finite part.
    pub fn default_eps(&self) -> f64 {
        1e-3 * self.scale()
    }

    /// Smallest sampled distance between the two continua.
    pub fn separation(&self, eps: f64) -> f64 {
        let a = self.c0.samples(eps).iter().map(|p| self.c1.distance(p)).fold(f64::INFINITY, f64::min);
        let b = self.c1.samples(eps).iter().map(|p| self.c0.distance(p)).fold(f64::INFINITY, f64::min);
        a.min(b)
    }

    /// Exact modulus when the ring is canonical and planar.
    pub fn exact_modulus(&self) -> Option<f64> {
        let n = Dimension::new(self.dim()).ok()?;
        self.canonical.and_then(|c| c.exact_modulus(n))
    }

    /// True when `p` lies on neither continuum.
    pub fn in_ring(&self, p: &ExtPoint) -> bool {
        match p.coords() {
            None => false,
            Some(x) => self.c0.distance(x) > 0.0 && self.c1.distance(x) > 0.0,
        }
    }
}

/// Builds `R_{G,n}(s)` or `R_{T,n}(t)` with exact primitives and `∞ ∈ C1`.
pub fn canonical_ring(kind: CanonicalRing, n: Dimension) -> Result<RingGeometry> {
    let n_ = n.get();
    let e1 = vector::basis(n_, 0);
    let origin = vec![0.0; n_];
    let (c0, c1) = match kind {
        CanonicalRing::Grotzsch { s } => {
            ensure(s > 1.0 && s.is_finite(), || format!("Grötzsch ring needs s > 1, got {s}"))?;
            (
                Primitive::Ball { center: origin, radius: 1.0 },
                Primitive::Ray { origin: vector::scale(&e1, s), direction: e1 },
            )
        }
        CanonicalRing::Teichmuller { t } => {
            ensure(t > 0.0 && t.is_finite(), || format!("Teichmüller ring needs t > 0, got {t}"))?;
            (
                Primitive::Segment { a: vector::scale(&e1, -1.0), b: origin },
                Primitive::Ray { origin: vector::scale(&e1, t), direction: e1 },
            )
        }
    };
    let ring = RingGeometry {
        c0: Continuum::new(vec![c0], false)?,
        c1: Continuum::new(vec![c1], true)?,
        canonical: Some(kind),
    };
    Ok(ring)
}
