//! Grid estimates of curve-family moduli.
//!
//! The modulus of the family joining the plates of a condenser equals the
//! least n-Dirichlet energy of a potential that is 0 on one plate and 1 on
//! the other. The potential is approximated by piecewise linear functions
//! on a Kuhn-triangulated cubic lattice and the energy is minimised by
//! coloured nonlinear SOR, with coarser lattices supplying the start.
//!
//! Nodes within `h/2` of a plate are pinned. Rings whose complement is
//! unbounded are first moved by an inversion about a point of the ring,
//! which puts `∞` at a regular interior point; the lattice box is padded
//! around the plate images and its faces carry a no-flux condition.

mod lattice;
mod relax;

pub use lattice::{GridField, NodeKind};

use serde::{Deserialize, Serialize};

use crate::bounds_nd::{omega, Dimension};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::geometry::{vector, Continuum, Primitive, RingGeometry, Semiring};
use crate::qcbounds::TestMap;

use lattice::Lattice;
use relax::{sor_factor, Problem};

/// Fewest pinned nodes accepted on each plate.
const MIN_PLATE_NODES: usize = 10;
/// Coarsening stops once the longest side has fewer nodes than this.
const MIN_COARSE_NODES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop when no node moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    pub exec: Exec,
    /// Half-width of the lattice box over the half-extent of the plate
    /// images, for rings solved in an inversion chart.
    pub far_field: f64,
    /// Start from solutions on coarser lattices.
    pub warm_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-8, max_sweeps: 100_000, exec: Exec::default(), far_field: 3.0, warm_start: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub n: usize,
    /// Estimate of `M(Γ)`, the discrete n-energy of the minimiser.
    pub m_gamma: f64,
    /// `(ω_{n−1} / (normalization · m_gamma))^{1/(n−1)}`.
    pub mod_ring: f64,
    /// 1 for rings, 2 for semirings.
    pub normalization: f64,
    pub grid_h: f64,
    /// Sweeps on the finest lattice.
    pub iterations: usize,
    /// Largest nodal change in the last sweep.
    pub residual: f64,
    pub free_nodes: usize,
    /// Energy after each accepted sweep on the finest lattice.
    pub energy_history: Vec<f64>,
}

impl ModulusEstimate {
    /// Modulus from a curve-family modulus.
    pub fn modulus_from_m(n: Dimension, m_gamma: f64, normalization: f64) -> f64 {
        (omega(n) / (normalization * m_gamma)).powf(1.0 / (n.as_f64() - 1.0))
    }
}

/// First-order Richardson extrapolation from spacings `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}

/// Distances to the two plates, measured in lattice coordinates.
enum Probe {
    Outside,
    Dist(f64, f64),
}

/// Plate distances at a lattice point.
type ProbeFn<'a> = Box<dyn Fn(&[f64]) -> Probe + Sync + 'a>;

struct Setup<'a> {
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
    probe: ProbeFn<'a>,
    normalization: f64,
}

impl Setup<'_> {
    /// Spacing giving `nodes` lattice points along the longest box side.
    fn spacing(&self, nodes: usize) -> f64 {
        let side = self.box_lo.iter().zip(&self.box_hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        side / (nodes.max(2) - 1) as f64
    }

    /// Builds the field at spacing `h`; also returns the number of nodes
    /// within `h/2` of both plates.
    fn field(&self, h: f64, exec: Exec) -> (GridField, usize) {
        let lattice = Lattice::covering(&self.box_lo, &self.box_hi, h);
        // A thin plate midway between two node rows is at exactly h/2 from both.
        let band = 0.5 * h * (1.0 + 1e-9);
        let nodes = exec.map(lattice.len(), |i| {
            let j = lattice.multi_index(i);
            if lattice.on_pad(&j) {
                return (NodeKind::Excluded, 0.0, false);
            }
            match (self.probe)(&lattice.coords(i)) {
                Probe::Outside => (NodeKind::Excluded, 0.0, false),
                Probe::Dist(d0, d1) => {
                    let (z, o) = (d0 <= band, d1 <= band);
                    if z {
                        (NodeKind::Zero, 0.0, o)
                    } else if o {
                        (NodeKind::One, 1.0, false)
                    } else {
                        (NodeKind::Free, d0 / (d0 + d1), false)
                    }
                }
            }
        });
        let conflicts = nodes.iter().filter(|t| t.2).count();
        let kind = nodes.iter().map(|t| t.0).collect();
        let u = nodes.iter().map(|t| t.1).collect();
        (GridField { lattice, u, kind }, conflicts)
    }

    fn solve(&self, h: f64, cfg: &SolverConfig, n: Dimension) -> Result<(ModulusEstimate, GridField)> {
        ensure(h > 0.0 && h.is_finite(), || format!("grid spacing must be positive, got {h}"))?;
        let (fine, conflicts) = self.field(h, cfg.exec);
        let longest = |f: &GridField| f.dims().iter().max().copied().unwrap_or(0).saturating_sub(2);
        let cells = fine.lattice.len() as f64;
        if cells > 5e8 {
            return Err(Error::Resolution(format!("{cells:e} lattice nodes exceed the memory budget")));
        }
        if conflicts > 0 {
            return Err(Error::Resolution(format!(
                "{conflicts} nodes lie within h/2 = {:e} of both plates",
                0.5 * h
            )));
        }
        let (zeros, ones) = (fine.count(NodeKind::Zero), fine.count(NodeKind::One));
        if zeros < MIN_PLATE_NODES || ones < MIN_PLATE_NODES {
            return Err(Error::Resolution(format!(
                "plates cover {zeros} and {ones} nodes; at least {MIN_PLATE_NODES} each are needed"
            )));
        }

        // Coarse lattices that still resolve both plates.
        let mut levels = vec![fine];
        if cfg.warm_start {
            let mut hc = h;
            loop {
                hc *= 2.0;
                let (f, c) = self.field(hc, cfg.exec);
                let usable = c == 0
                    && longest(&f) >= MIN_COARSE_NODES
                    && f.count(NodeKind::Zero) > 0
                    && f.count(NodeKind::One) > 0;
                if !usable {
                    break;
                }
                levels.push(f);
            }
        }

        let mut previous: Option<GridField> = None;
        let mut result = None;
        while let Some(mut field) = levels.pop() {
            if let Some(coarse) = &previous {
                for i in 0..field.u.len() {
                    if field.kind[i] == NodeKind::Free {
                        let x = field.lattice.coords(i);
                        field.u[i] = coarse.lattice.interpolate(&coarse.u, &x).clamp(0.0, 1.0);
                    }
                }
            }
            let omega = sor_factor(longest(&field));
            let mut problem = Problem::new(field);
            let stats = problem.solve(omega, cfg.tol, cfg.max_sweeps, cfg.exec)?;
            let energy = *stats.history.last().expect("non-empty history");
            if levels.is_empty() {
                result = Some((stats, energy));
            }
            previous = Some(problem.field);
        }
        let field = previous.expect("at least one level");
        let (stats, m_gamma) = result.expect("finest level solved");
        let estimate = ModulusEstimate {
            n: n.get(),
            m_gamma,
            mod_ring: ModulusEstimate::modulus_from_m(n, m_gamma, self.normalization),
            normalization: self.normalization,
            grid_h: h,
            iterations: stats.sweeps,
            residual: stats.residual,
            free_nodes: field.count(NodeKind::Free),
            energy_history: stats.history,
        };
        Ok((estimate, field))
    }
}

fn check_solver_dim(n: Dimension, dim: usize) -> Result<()> {
    ensure(n.get() == dim, || format!("geometry is {dim}-dimensional, not {}", n.get()))?;
    ensure(matches!(n.get(), 2 | 3), || format!("the grid solver supports n = 2, 3, not {}", n.get()))
}

/// The smallest ball whose exterior belongs to `C1`, if any.
fn enclosing_exterior(c1: &Continuum) -> Option<(&[f64], f64)> {
    c1.primitives
        .iter()
        .filter_map(|p| match p {
            Primitive::BallExterior { center, radius } => Some((center.as_slice(), *radius)),
            _ => None,
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Midpoint of the closest pair of sampled plate points.
fn gap_midpoint(ring: &RingGeometry) -> Vec<f64> {
    let eps = ring.default_eps();
    let s0 = ring.c0.samples(eps);
    let x0 = s0
        .iter()
        .min_by(|a, b| ring.c1.distance(a).total_cmp(&ring.c1.distance(b)))
        .expect("continua have samples");
    let s1 = ring.c1.samples(eps);
    let x1 = s1
        .iter()
        .min_by(|a, b| vector::dist_sq(a, x0).total_cmp(&vector::dist_sq(b, x0)))
        .expect("continua have samples");
    vector::scale(&vector::add(x0, x1), 0.5)
}

fn ring_setup<'a>(ring: &'a RingGeometry, cfg: &SolverConfig) -> Setup<'a> {
    let n = ring.dim();
    if let Some((center, radius)) = enclosing_exterior(&ring.c1) {
        return Setup {
            box_lo: center.iter().map(|c| c - radius).collect(),
            box_hi: center.iter().map(|c| c + radius).collect(),
            probe: Box::new(move |x| Probe::Dist(ring.c0.distance(x), ring.c1.distance(x))),
            normalization: 1.0,
        };
    }

    // Inversion chart x = p + (y − p)/|y − p|², an involution.
    let p = gap_midpoint(ring);
    let chart = |w: &[f64]| -> Vec<f64> {
        let q = vector::norm_sq(w);
        vector::axpy(&p, 1.0 / q, w)
    };
    let eps = ring.default_eps();
    let mut lo = p.clone();
    let mut hi = p.clone();
    for s in ring.c0.samples(eps).into_iter().chain(ring.c1.samples(eps)) {
        let w = vector::sub(&s, &p);
        let y = chart(&w);
        for k in 0..n {
            lo[k] = lo[k].min(y[k]);
            hi[k] = hi[k].max(y[k]);
        }
    }
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).fold(0.0, f64::max);
    let reach = cfg.far_field * half;
    Setup {
        box_lo: mid.iter().map(|c| c - reach).collect(),
        box_hi: mid.iter().map(|c| c + reach).collect(),
        probe: Box::new(move |y| {
            Probe::Dist(ring.c0.inverted_distance(y, &p), ring.c1.inverted_distance(y, &p))
        }),
        normalization: 1.0,
    }
}

/// Spacing that puts `nodes` lattice points along the longest side of the
/// box used for `ring`.
pub fn ring_grid_spacing(ring: &RingGeometry, nodes: usize, cfg: &SolverConfig) -> f64 {
    ring_setup(ring, cfg).spacing(nodes)
}

/// Estimates `mod R` for a ring in `R²` or `R³` on a lattice of spacing `h`.
pub fn estimate_ring_modulus(
    ring: &RingGeometry,
    n: Dimension,
    h: f64,
    cfg: &SolverConfig,
) -> Result<ModulusEstimate> {
    solve_ring(ring, n, h, cfg).map(|r| r.0)
}

/// As [`estimate_ring_modulus`], also returning the potential.
pub fn solve_ring(
    ring: &RingGeometry,
    n: Dimension,
    h: f64,
    cfg: &SolverConfig,
) -> Result<(ModulusEstimate, GridField)> {
    check_solver_dim(n, ring.dim())?;
    ring_setup(ring, cfg).solve(h, cfg, n)
}

/// Distance from `x` to `{y : |y − ξ| ≤ r |y + ξ|}`.
fn apollonian_set_distance(x: &[f64], xi: &[f64], r: f64) -> f64 {
    if r == 1.0 {
        return (-vector::dot(x, xi)).max(0.0);
    }
    if r < 1.0 {
        let q = 1.0 - r * r;
        let c = vector::scale(xi, (1.0 + r * r) / q);
        (vector::dist(x, &c) - 2.0 * r / q).max(0.0)
    } else {
        let s = 1.0 / r;
        let q = 1.0 - s * s;
        let c = vector::scale(xi, -(1.0 + s * s) / q);
        (2.0 * s / q - vector::dist(x, &c)).max(0.0)
    }
}

/// The closed Apollonian set `{|y − ξ| ≤ r |y + ξ|}` as a primitive, with a
/// flag for containing `∞`.
fn apollonian_primitive(xi: &[f64], r: f64) -> Result<(Primitive, bool)> {
    if r == 1.0 {
        return Err(Error::Unsupported("a half-space side cannot be doubled into a ring".into()));
    }
    if r < 1.0 {
        let q = 1.0 - r * r;
        Ok((Primitive::Ball { center: vector::scale(xi, (1.0 + r * r) / q), radius: 2.0 * r / q }, false))
    } else {
        let s = 1.0 / r;
        let q = 1.0 - s * s;
        Ok((
            Primitive::BallExterior { center: vector::scale(xi, -(1.0 + s * s) / q), radius: 2.0 * s / q },
            true,
        ))
    }
}

fn semiring_setup<'a>(s: &'a Semiring) -> Result<Setup<'a>> {
    let n = s.dim();
    let unit_box = (vec![-1.0; n], vec![1.0; n]);
    Ok(match s {
        Semiring::Halfspace { radius, .. } => {
            let r = *radius;
            let mut lo = vec![-r; n];
            lo[n - 1] = 0.0;
            Setup {
                box_lo: lo,
                box_hi: vec![r; n],
                probe: Box::new(move |x| {
                    if x[n - 1] < 0.0 {
                        return Probe::Outside;
                    }
                    let d = vector::norm(x);
                    Probe::Dist((d - 1.0).max(0.0), (r - d).max(0.0))
                }),
                normalization: 2.0,
            }
        }
        Semiring::Canonical { xi, r0, r1 } => {
            let minus: Vec<f64> = xi.iter().map(|c| -c).collect();
            let (r0, r1) = (*r0, *r1);
            Setup {
                box_lo: unit_box.0,
                box_hi: unit_box.1,
                probe: Box::new(move |x| {
                    if vector::norm_sq(x) > 1.0 {
                        return Probe::Outside;
                    }
                    Probe::Dist(
                        apollonian_set_distance(x, xi, r0),
                        apollonian_set_distance(x, &minus, 1.0 / r1),
                    )
                }),
                normalization: 2.0,
            }
        }
        Semiring::ImageSamples { boundary0, boundary1 } => {
            ensure(n == 2, || "sampled semirings are supported in the plane only".into())?;
            let curve = |pts: &Vec<Vec<f64>>| Primitive::Polyline { points: pts.clone() };
            let (b0, b1) = (curve(boundary0), curve(boundary1));
            Setup {
                box_lo: unit_box.0,
                box_hi: unit_box.1,
                probe: Box::new(move |x| {
                    if vector::norm_sq(x) > 1.0 {
                        return Probe::Outside;
                    }
                    Probe::Dist(b0.distance(x), b1.distance(x))
                }),
                normalization: 2.0,
            }
        }
    })
}

/// Spacing that puts `nodes` lattice points along the longest side of the
/// box used for `s`.
pub fn semiring_grid_spacing(s: &Semiring, nodes: usize) -> Result<f64> {
    Ok(semiring_setup(s)?.spacing(nodes))
}

/// Estimates `mod S` for a semiring in the unit ball or the upper
/// half-space. The free part of the boundary carries a no-flux condition
/// and the factor 2 of the semiring normalisation is applied.
pub fn estimate_semiring_modulus(
    s: &Semiring,
    n: Dimension,
    h: f64,
    cfg: &SolverConfig,
) -> Result<ModulusEstimate> {
    solve_semiring(s, n, h, cfg).map(|r| r.0)
}

pub fn solve_semiring(
    s: &Semiring,
    n: Dimension,
    h: f64,
    cfg: &SolverConfig,
) -> Result<(ModulusEstimate, GridField)> {
    s.validate()?;
    check_solver_dim(n, s.dim())?;
    semiring_setup(s)?.solve(h, cfg, n)
}

/// The ring obtained by reflecting a canonical semiring across the
/// boundary of its ambient ball or half-space.
pub fn doubled_ring(s: &Semiring) -> Result<RingGeometry> {
    s.validate()?;
    let (side0, side1) = match s {
        Semiring::Halfspace { dim, radius } => (
            (Primitive::Ball { center: vec![0.0; *dim], radius: 1.0 }, false),
            (Primitive::BallExterior { center: vec![0.0; *dim], radius: *radius }, true),
        ),
        Semiring::Canonical { xi, r0, r1 } => {
            let minus: Vec<f64> = xi.iter().map(|c| -c).collect();
            (apollonian_primitive(xi, *r0)?, apollonian_primitive(&minus, 1.0 / r1)?)
        }
        Semiring::ImageSamples { .. } => {
            return Err(Error::Unsupported("sampled semirings carry no reflection data".into()))
        }
    };
    // The plate holding ∞ plays the part of C1.
    let (a, b) = if side0.1 { (side1, side0) } else { (side0, side1) };
    RingGeometry::new(Continuum::new(vec![a.0], a.1)?, Continuum::new(vec![b.0], b.1)?)
}

/// One row of [`qc_image_modulus_diagnostic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageModulusRow {
    pub r: f64,
    /// `log(R/r)`.
    pub source_modulus: f64,
    pub image_modulus: f64,
    pub ratio: f64,
    pub grid_h: f64,
}

/// Grid moduli of the images `f(T(ξ; r, R))` of canonical semirings in the
/// unit disk under a test map, compared with `log(R/r)`.
pub fn qc_image_modulus_diagnostic(
    map: &TestMap,
    xi: &[f64],
    r_sequence: &[f64],
    big_r: f64,
    nodes: usize,
    cfg: &SolverConfig,
) -> Result<Vec<ImageModulusRow>> {
    ensure(xi.len() == 2, || "the image diagnostic runs in the plane".into())?;
    ensure(map.maps_ball_to_itself(), || format!("{map:?} does not preserve the unit disk"))?;
    ensure(r_sequence.windows(2).all(|w| w[1] < w[0]), || "r_sequence must decrease".into())?;
    let n = Dimension::TWO;
    let mut rows = Vec::with_capacity(r_sequence.len());
    for &r in r_sequence {
        let base = Semiring::canonical(xi.to_vec(), r, big_r)?;
        let minus: Vec<f64> = xi.iter().map(|c| -c).collect();
        let h = 2.0 / (nodes.max(2) - 1) as f64;
        let setup = Setup {
            box_lo: vec![-1.0; 2],
            box_hi: vec![1.0; 2],
            probe: Box::new(|y| {
                if vector::norm_sq(y) > 1.0 {
                    return Probe::Outside;
                }
                let x = map.apply_inverse(y);
                // Secant stretch of f⁻¹ over the pinning radius, so that a
                // singular point of the map cannot pin a node to both plates.
                let step = 0.5 * h;
                let stretch = (0..2)
                    .map(|k| {
                        let mut z = y.to_vec();
                        z[k] += if y[k] > 0.0 { -step } else { step };
                        vector::dist(&map.apply_inverse(&z), &x) / step
                    })
                    .fold(f64::MIN_POSITIVE, f64::max);
                let d0 = apollonian_set_distance(&x, xi, r);
                let d1 = apollonian_set_distance(&x, &minus, 1.0 / big_r);
                Probe::Dist(d0 / stretch, d1 / stretch)
            }),
            normalization: 2.0,
        };
        let (est, _) = setup.solve(h, cfg, n)?;
        let source = base.canonical_modulus()?;
        rows.push(ImageModulusRow {
            r,
            source_modulus: source,
            image_modulus: est.mod_ring,
            ratio: est.mod_ring / source,
            grid_h: h,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus_ring(n: usize, r1: f64) -> RingGeometry {
        let c = vec![0.0; n];
        RingGeometry::new(
            Continuum::new(vec![Primitive::Ball { center: c.clone(), radius: 1.0 }], false).unwrap(),
            Continuum::new(vec![Primitive::BallExterior { center: c, radius: r1 }], true).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coarse_annulus_2d() {
        let ring = annulus_ring(2, std::f64::consts::E);
        let cfg = SolverConfig::default();
        let h = ring_grid_spacing(&ring, 101, &cfg);
        let est = estimate_ring_modulus(&ring, Dimension::TWO, h, &cfg).unwrap();
        assert!((est.mod_ring - 1.0).abs() < 0.05, "{}", est.mod_ring);
        assert!(est.residual <= 1e-8);
        assert!(est.energy_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(est.mod_ring, ModulusEstimate::modulus_from_m(Dimension::TWO, est.m_gamma, 1.0));
    }

    #[test]
    fn unresolved_plates() {
        let ring = annulus_ring(2, 1.05);
        let cfg = SolverConfig::default();
        assert!(matches!(
            estimate_ring_modulus(&ring, Dimension::TWO, 0.2, &cfg),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn doubling_layouts() {
        let d = doubled_ring(&Semiring::halfspace(2, 3.0).unwrap()).unwrap();
        assert!(d.c1.has_infinity());
        let c = doubled_ring(&Semiring::canonical(vec![1.0, 0.0], 0.2, 0.5).unwrap()).unwrap();
        assert!(c.c1.has_infinity());
        // Both sides are disks once r1 > 1, and ∞ lies in the ring.
        let b = doubled_ring(&Semiring::canonical(vec![1.0, 0.0], 0.2, 3.0).unwrap()).unwrap();
        assert!(!b.c1.has_infinity());
        assert!(doubled_ring(&Semiring::canonical(vec![1.0, 0.0], 0.2, 1.0).unwrap()).is_err());
    }

    #[test]
    fn apollonian_distances() {
        let xi = [1.0, 0.0];
        // {|y − ξ| ≤ ½|y + ξ|} is the disk centred at 5/3 with radius 4/3.
        assert!((apollonian_set_distance(&[0.0, 0.0], &xi, 0.5) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(apollonian_set_distance(&[1.0, 0.0], &xi, 0.5), 0.0);
        assert_eq!(apollonian_set_distance(&[-0.5, 0.0], &xi, 1.0), 0.5);
        // r = 2 is the complement of the open disk around −ξ with radius 4/3.
        assert!((apollonian_set_distance(&[-5.0 / 3.0, 0.0], &xi, 2.0) - 4.0 / 3.0).abs() < 1e-15);
    }
}
