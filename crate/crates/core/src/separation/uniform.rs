//! Uniform perfectness of a finite sample of a closed set.
//!
//! For a centre `a` and radius `r` the annulus `{c r < |x − a| < r}` meets
//! the sample exactly when `c < c*(a, r)`, where `c*(a, r)` is the largest
//! ratio `d/r` over sample distances `d = |x − a| < r`. As a function of
//! `r` this ratio jumps up just after every sample distance and decays in
//! between, so its infimum over an interval of radii is attained at the
//! sample distances themselves. Those critical radii are tested together
//! with a log-spaced grid.

use serde::{Deserialize, Serialize};

use crate::bounds_nd::{a_constant, Dimension};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::geometry::vector;

/// A finite sample of a closed set in `R^n`, possibly together with `∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpSet {
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub contains_infinity: bool,
}

impl UpSet {
    pub fn new(points: Vec<Vec<f64>>, contains_infinity: bool) -> Result<Self> {
        let set = UpSet { points, contains_infinity };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let count = self.points.len() + usize::from(self.contains_infinity);
        ensure(count >= 2, || format!("need at least two points, got {count}"))?;
        if let Some(first) = self.points.first() {
            let n = first.len();
            ensure(n >= 1, || "points must have at least one coordinate".into())?;
            ensure(
                self.points.iter().all(|p| p.len() == n && p.iter().all(|c| c.is_finite())),
                || "points must be finite and share one dimension".into(),
            )?;
        }
        Ok(())
    }

    /// True when `{c r < |x − a| < r}` contains a finite sample point.
    pub fn annulus_hit(&self, a: &[f64], r: f64, c: f64) -> bool {
        self.points.iter().any(|x| {
            let d = vector::dist(x, a);
            d > c * r && d < r
        })
    }
}

/// Resolution of the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpGrid {
    /// Log-spaced radii tested in addition to the critical ones.
    pub radii: usize,
    /// Width of the final bisection bracket on `c`.
    pub c_tolerance: f64,
}

impl Default for UpGrid {
    fn default() -> Self {
        UpGrid { radii: 256, c_tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UpVerdict {
    UniformlyPerfectAtResolution,
    /// The annulus `{c r < |x − a| < r}` misses the sample for every `c > 0`.
    Fails { a: Vec<f64>, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpReport {
    /// Largest `c` on the dyadic bisection grid that passes every test.
    pub c_best: f64,
    pub grid: UpGrid,
    /// Radius window `(r_min, r_max]` searched.
    pub r_min: f64,
    pub r_max: f64,
    /// Number of `(a, r)` pairs tested.
    pub cells: usize,
    /// Upper bound on the modulus of separating rings; `∞` on failure.
    #[serde(rename = "M_bound", with = "crate::serde_ext::inf_as_null")]
    pub m_bound: f64,
    /// Infimum of `c*(a, r)` over the tested pairs, and where it occurs.
    pub c_star: f64,
    pub worst_a: Vec<f64>,
    pub worst_r: f64,
    pub verdict: UpVerdict,
}

/// Largest `d` in the ascending list with `d < r`, or 0.
fn largest_below(sorted: &[f64], r: f64) -> f64 {
    let k = sorted.partition_point(|&d| d < r);
    if k == 0 {
        0.0
    } else {
        sorted[k - 1]
    }
}

fn m_from_c(c: f64, n: Dimension, with_infinity: bool) -> f64 {
    if c <= 0.0 {
        return f64::INFINITY;
    }
    let a = a_constant(n).hi;
    if with_infinity {
        a - c.ln()
    } else {
        a + (3.0 / c).ln()
    }
}

/// Searches all centres `a` in the finite sample and radii in
/// `(min pairwise distance, diameter]` for annuli missing the sample.
pub fn uniform_perfectness_analyze(
    set: &UpSet,
    n: Dimension,
    grid: UpGrid,
    exec: Exec,
) -> Result<UpReport> {
    set.validate()?;
    ensure(grid.radii >= 2 && grid.c_tolerance > 0.0 && grid.c_tolerance < 1.0, || {
        "grid needs ≥ 2 radii and a tolerance in (0, 1)".into()
    })?;
    if let Some(p) = set.points.first() {
        ensure(p.len() == n.get(), || format!("points are not {}-dimensional", n.get()))?;
    }
    let pts = &set.points;

    if pts.len() < 3 {
        // One or two finite points: around the first one nothing lies
        // strictly inside half the gap.
        let a = pts.first().cloned().ok_or_else(|| Error::domain("no finite points"))?;
        let r = if pts.len() == 2 { 0.5 * vector::dist(&pts[0], &pts[1]) } else { 1.0 };
        return Ok(UpReport {
            c_best: 0.0,
            grid,
            r_min: r,
            r_max: r,
            cells: 1,
            m_bound: f64::INFINITY,
            c_star: 0.0,
            worst_a: a.clone(),
            worst_r: r,
            verdict: UpVerdict::Fails { a, r },
        });
    }

    // Sorted positive distances from every centre.
    let dists: Vec<Vec<f64>> = exec.map(pts.len(), |i| {
        let mut d: Vec<f64> = pts
            .iter()
            .map(|x| vector::dist(x, &pts[i]))
            .filter(|&d| d > 0.0)
            .collect();
        d.sort_by(f64::total_cmp);
        d
    });
    let r_min = dists.iter().filter_map(|d| d.first().copied()).fold(f64::INFINITY, f64::min);
    let r_max = dists.iter().filter_map(|d| d.last().copied()).fold(0.0, f64::max);
    ensure(r_min.is_finite() && r_max > r_min, || {
        "sample has fewer than two distinct distances".into()
    })?;
    let log_radii: Vec<f64> = (1..=grid.radii)
        .map(|k| r_min * (r_max / r_min).powf(k as f64 / grid.radii as f64))
        .collect();

    // Per centre: (inf of c*, radius where it occurs, number of cells).
    let per_centre: Vec<(f64, f64, usize)> = exec.map(pts.len(), |i| {
        let d = &dists[i];
        let mut best = (f64::INFINITY, f64::NAN, 0usize);
        let mut test = |r: f64| {
            if r <= r_min || r > r_max {
                return;
            }
            let c = largest_below(d, r) / r;
            best.2 += 1;
            if c < best.0 {
                best.0 = c;
                best.1 = r;
            }
        };
        for k in 0..d.len() {
            if k == 0 || d[k] != d[k - 1] {
                test(d[k]);
            }
        }
        for &r in &log_radii {
            test(r);
        }
        best
    });
    let cells = per_centre.iter().map(|c| c.2).sum();
    // Deterministic argmin: smallest value, then lowest index.
    let (worst, &(c_star, worst_r, _)) = per_centre
        .iter()
        .enumerate()
        .filter(|(_, c)| c.2 > 0)
        .min_by(|(i, x), (j, y)| x.0.total_cmp(&y.0).then(i.cmp(j)))
        .ok_or_else(|| Error::domain("no radius fell inside the search window"))?;

    // Dyadic bisection of the predicate "every tested annulus is hit",
    // which holds exactly for c < c_star.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > grid.c_tolerance {
        let mid = 0.5 * (lo + hi);
        if mid < c_star {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c_best = lo;
    let verdict = if c_best > 0.0 {
        UpVerdict::UniformlyPerfectAtResolution
    } else {
        UpVerdict::Fails { a: pts[worst].clone(), r: worst_r }
    };
    Ok(UpReport {
        c_best,
        grid,
        r_min,
        r_max,
        cells,
        m_bound: m_from_c(c_best, n, set.contains_infinity),
        c_star,
        worst_a: pts[worst].clone(),
        worst_r,
        verdict,
    })
}

/// The annulus constant implied by a modulus bound `M`: `min(e^{−M}, 1/2)`.
pub fn converse_c_from_m(m: f64) -> Result<f64> {
    ensure(m > 0.0, || format!("M must be positive, got {m}"))?;
    Ok((-m).exp().min(0.5))
}
