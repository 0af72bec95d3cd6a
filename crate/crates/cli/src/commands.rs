//! Subcommand definitions and their implementations.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ringmod::bounds_nd::{self, RingFamily};
use ringmod::geometry::{canonical_ring, CanonicalRing};
use ringmod::modsolve::{self, GridField, ModulusEstimate, SolverConfig};
use ringmod::qcbounds::{self, HolderCertificate, TestMap};
use ringmod::separation::{self, InversionCase, UpGrid, UpSet};
use ringmod::{special2d, Annulus, Dimension, Exec, ExtPoint, ModulusBracket, RingGeometry, Semiring};

use crate::output::Output;
use crate::Failure;

pub struct Context {
    pub exec: Exec,
    pub seed: u64,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate a planar special function.
    Eval(EvalArgs),
    /// Bracket a dimension-dependent constant or modulus.
    Bounds(BoundsArgs),
    /// Extract a round annulus from a ring with a known modulus lower bound.
    Separate(SeparateArgs),
    /// Invert a round annulus through the unit sphere and separate the image.
    InvertAnnulus(InvertArgs),
    /// Grid search for uniform perfectness of a point set.
    Uperf(UperfArgs),
    /// Estimate a ring or semiring modulus with the grid solver.
    Modulus(ModulusArgs),
    /// Hölder certificate for quasiconformal self-maps.
    QcBounds(QcBoundsArgs),
    /// Check a Hölder certificate against a built-in test map.
    QcVerify(QcVerifyArgs),
    /// Tabulate a special function on a grid.
    Table(TableArgs),
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> Result<Output, Failure> {
    match cmd {
        Command::Eval(a) => eval(a),
        Command::Bounds(a) => bounds(a),
        Command::Separate(a) => separate(a),
        Command::InvertAnnulus(a) => invert_annulus(a, ctx),
        Command::Uperf(a) => uperf(a, ctx),
        Command::Modulus(a) => modulus(a, ctx),
        Command::QcBounds(a) => qc_bounds(a),
        Command::QcVerify(a) => qc_verify(a, ctx),
        Command::Table(a) => table(a),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

fn dim(n: usize) -> Result<Dimension, Failure> {
    Ok(Dimension::new(n)?)
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Input(format!("invalid {what}: {e}")))
}

/// A ring file holds either `{"c0": …, "c1": …}` or a canonical ring
/// such as `{"kind": "teichmuller", "t": 1, "n": 3}`.
fn load_ring(path: &Path, n: Option<usize>) -> Result<RingGeometry, Failure> {
    let v = read_json(path)?;
    if v.get("c0").is_some() {
        let ring: RingGeometry = parse(v, "ring geometry")?;
        ring.validate()?;
        return Ok(ring);
    }
    let file_n = v.get("n").and_then(Value::as_u64).map(|x| x as usize);
    let kind: CanonicalRing = parse(v, "ring geometry")?;
    Ok(canonical_ring(kind, dim(n.or(file_n).unwrap_or(2))?)?)
}

fn parse_point(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| Failure::Input(format!("bad coordinate {c:?}: {e}"))))
        .collect()
}

// ---------------------------------------------------------------- eval

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SpecialFn {
    /// `μ(r)`, modulus of the planar Grötzsch ring in the unit disk.
    Mu,
    MuPrime,
    /// `μ_T(t)`, modulus of the planar Teichmüller ring.
    MuT,
    /// `μ_G(s)`, modulus of the planar Grötzsch ring.
    MuG,
    /// `μ_T(t) − log t`.
    G,
    InverseMu,
    /// Complete elliptic integral `K(w)`.
    EllipticK,
}

impl SpecialFn {
    fn eval(self, x: f64) -> ringmod::Result<f64> {
        Ok(match self {
            SpecialFn::Mu => special2d::mu(x)?,
            SpecialFn::MuPrime => special2d::mu_prime(x)?,
            SpecialFn::MuT => special2d::mu_t(x)?.get(),
            SpecialFn::MuG => special2d::mu_g(x)?.get(),
            SpecialFn::G => special2d::teichmuller_excess(x)?,
            SpecialFn::InverseMu => special2d::inverse_mu(x)?,
            SpecialFn::EllipticK => special2d::elliptic_k_checked(x)?,
        })
    }

    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    func: SpecialFn,
    #[arg(long, allow_negative_numbers = true)]
    arg: f64,
}

fn eval(a: &EvalArgs) -> Result<Output, Failure> {
    let value = a.func.eval(a.arg)?;
    Ok(Output::record("ringmod.eval/1", json!({"fn": a.func.name(), "arg": a.arg, "value": value})))
}

// -------------------------------------------------------------- bounds

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    /// Grötzsch constant `λ_n`.
    Lambda,
    /// `Φ_n(s)`; needs `--arg s`.
    Phi,
    /// `Ψ_n(t)`; needs `--arg t`.
    Psi,
    /// `γ_n(s)`; needs `--arg s`.
    Gamma,
    /// `τ_n(t)`; needs `--arg t`.
    Tau,
    /// Annulus-separation constant `A_n`.
    A,
    /// `Q_n = 4 e^{A_n/2}`.
    Q,
    /// Upper bound for `mod R_E(n, a)`; needs `--arg a`.
    ReModulus,
    /// Estimate of `log λ_n` from `R_E(n, a_max)`; needs `--arg a_max`.
    LambdaEstimate,
    /// Surface area `ω_{n−1}` of the unit sphere.
    Omega,
}

#[derive(Args)]
pub struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[arg(long)]
    arg: Option<f64>,
}

fn bounds(a: &BoundsArgs) -> Result<Output, Failure> {
    let n = dim(a.n)?;
    let arg = || a.arg.ok_or_else(|| Failure::Input(format!("{:?} needs --arg", a.quantity)));
    let bracket: ModulusBracket = match a.quantity {
        Quantity::Lambda => bounds_nd::lambda_bracket(n),
        Quantity::Phi => bounds_nd::phi_bracket(n, arg()?)?,
        Quantity::Psi => bounds_nd::psi_bracket(n, arg()?)?,
        Quantity::Gamma => bounds_nd::gamma_tau_bracket(n, arg()?, RingFamily::Gamma)?,
        Quantity::Tau => bounds_nd::gamma_tau_bracket(n, arg()?, RingFamily::Tau)?,
        Quantity::A => bounds_nd::a_constant(n),
        Quantity::Q => bounds_nd::q_constant(n),
        Quantity::ReModulus => {
            let v = bounds_nd::re_modulus_upper(n, arg()?)?;
            ModulusBracket::numeric(v, v)
        }
        Quantity::LambdaEstimate => {
            let v = bounds_nd::lambda_estimate(n, arg()?)?;
            ModulusBracket::numeric(v, v)
        }
        Quantity::Omega => ModulusBracket::exact(bounds_nd::omega(n)),
    };
    let name = a.quantity.to_possible_value().expect("no skipped variants").get_name().to_string();
    let mut body = to_value(&bracket);
    body.as_object_mut().expect("bracket is an object").extend([
        ("quantity".to_string(), json!(name)),
        ("n".to_string(), json!(a.n)),
        ("arg".to_string(), json!(a.arg)),
    ]);
    Ok(Output::record("ringmod.bounds/1", body))
}

// ------------------------------------------------------------ separate

#[derive(Args)]
pub struct SeparateArgs {
    /// Ring geometry JSON.
    #[arg(long)]
    geometry: PathBuf,
    /// Centre on C0, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// Lower bound for the ring modulus; canonical planar rings default to
    /// their exact modulus.
    #[arg(long)]
    mod_lower: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
}

fn separate(a: &SeparateArgs) -> Result<Output, Failure> {
    let ring = load_ring(&a.geometry, a.n)?;
    let n = dim(a.n.unwrap_or(ring.dim()))?;
    let mod_lower = match a.mod_lower {
        Some(m) => m,
        None => ring
            .exact_modulus()
            .ok_or_else(|| Failure::Input("--mod-lower is required for this ring".into()))?,
    };
    let x0 = ExtPoint::finite(parse_point(&a.x0)?)?;
    let cert = separation::teichmuller_annulus(&ring, &x0, mod_lower, n)?;
    Ok(Output::record("ringmod.separation/1", to_value(&cert)))
}

// ------------------------------------------------------ invert-annulus

#[derive(Args)]
pub struct InvertArgs {
    /// Annulus centre, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long)]
    r0: f64,
    #[arg(long)]
    r1: f64,
    /// Boundary samples per sphere for the containment check.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

fn invert_annulus(a: &InvertArgs, ctx: &Context) -> Result<Output, Failure> {
    let annulus = Annulus::new(parse_point(&a.a)?, a.r0, a.r1)?;
    let norm = annulus.center.iter().map(|c| c * c).sum::<f64>().sqrt();
    let case = if norm >= a.r1 {
        InversionCase::OriginInC1
    } else if norm <= a.r0 {
        InversionCase::OriginInC0
    } else {
        return Err(ringmod::Error::Domain(format!(
            "the origin lies in the annulus (|a| = {norm}); inversion is not defined there"
        ))
        .into());
    };
    let image = separation::inversion_separation(&annulus, case)?;
    let violations = separation::inversion_containment_violations(&annulus, case, &image, a.samples, ctx.exec);
    Ok(Output::record(
        "ringmod.inversion/1",
        json!({
            "case": to_value(&case),
            "input": to_value(&annulus),
            "input_modulus": annulus.modulus(),
            "annulus": to_value(&image),
            "modulus": image.modulus(),
            "loss": annulus.modulus() - image.modulus(),
            "samples": a.samples,
            "violations": violations,
        }),
    ))
}

// --------------------------------------------------------------- uperf

#[derive(Args)]
pub struct UperfArgs {
    /// JSON `{"points": [[…], …], "contains_infinity": bool}`.
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    /// Log-spaced radii added to the critical ones.
    #[arg(long, default_value_t = UpGrid::default().radii)]
    radii: usize,
    #[arg(long, default_value_t = UpGrid::default().c_tolerance)]
    c_tolerance: f64,
}

fn uperf(a: &UperfArgs, ctx: &Context) -> Result<Output, Failure> {
    let set: UpSet = parse(read_json(&a.points)?, "point set")?;
    let n = a.n.or_else(|| set.points.first().map(Vec::len)).unwrap_or(2);
    let grid = UpGrid { radii: a.radii, c_tolerance: a.c_tolerance };
    let report = separation::uniform_perfectness_analyze(&set, dim(n)?, grid, ctx.exec)?;
    Ok(Output::record("ringmod.uperf/1", to_value(&report)))
}

// ------------------------------------------------------------- modulus

#[derive(Args)]
pub struct ModulusArgs {
    /// Ring geometry JSON, or a semiring JSON with `--semiring`.
    #[arg(long)]
    geometry: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    /// Grid spacing; overrides `--nodes`.
    #[arg(long)]
    h: Option<f64>,
    /// Lattice points along the longest box side (400 in the plane, 96 in space).
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    semiring: bool,
    #[arg(long, default_value_t = SolverConfig::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_sweeps)]
    max_sweeps: usize,
    #[arg(long, default_value_t = SolverConfig::default().far_field)]
    far_field: f64,
    /// Write the converged potential as CSV (coordinates, u, node kind).
    #[arg(long)]
    dump_u: Option<PathBuf>,
}

fn modulus(a: &ModulusArgs, ctx: &Context) -> Result<Output, Failure> {
    let cfg = SolverConfig {
        tol: a.tol,
        max_sweeps: a.max_sweeps,
        exec: ctx.exec,
        far_field: a.far_field,
        warm_start: true,
    };
    let default_nodes = |n: usize| if n == 2 { 400 } else { 96 };
    let (est, field): (ModulusEstimate, GridField) = if a.semiring {
        let s: Semiring = parse(read_json(&a.geometry)?, "semiring")?;
        s.validate()?;
        let n = a.n.unwrap_or(s.dim());
        let h = match a.h {
            Some(h) => h,
            None => modsolve::semiring_grid_spacing(&s, a.nodes.unwrap_or(default_nodes(n)))?,
        };
        modsolve::solve_semiring(&s, dim(n)?, h, &cfg)?
    } else {
        let ring = load_ring(&a.geometry, a.n)?;
        let n = a.n.unwrap_or(ring.dim());
        let h = a
            .h
            .unwrap_or_else(|| modsolve::ring_grid_spacing(&ring, a.nodes.unwrap_or(default_nodes(n)), &cfg));
        modsolve::solve_ring(&ring, dim(n)?, h, &cfg)?
    };
    if let Some(path) = &a.dump_u {
        let mut file = std::fs::File::create(path)
            .map_err(|e| Failure::Input(format!("cannot create {}: {e}", path.display())))?;
        field
            .write_csv(&mut file)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Output::record("ringmod.modulus/1", to_value(&est)))
}

// ----------------------------------------------------------- qc-bounds

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DomainArg {
    Ball,
    Halfspace,
}

#[derive(Args)]
pub struct QcBoundsArgs {
    #[arg(long = "K")]
    k: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "ball")]
    domain: DomainArg,
    /// Half-space radius `R`.
    #[arg(long = "R", default_value_t = 1.0)]
    r: f64,
}

fn certificate(k: f64, n: usize, domain: DomainArg, r: f64) -> Result<HolderCertificate, Failure> {
    let n = dim(n)?;
    Ok(match domain {
        DomainArg::Ball => qcbounds::holder_ball(k, n)?,
        DomainArg::Halfspace => qcbounds::holder_halfspace(k, n, r)?,
    })
}

fn qc_bounds(a: &QcBoundsArgs) -> Result<Output, Failure> {
    let cert = certificate(a.k, a.n, a.domain, a.r)?;
    Ok(Output::record("ringmod.holder/1", to_value(&cert)))
}

// ----------------------------------------------------------- qc-verify

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MapName {
    Identity,
    Rotation,
    /// Möbius automorphism of the ball; fixes 0 only with `--a 0,…`.
    BallAutomorphism,
    /// `x ↦ x|x|^{K−1}` on the ball.
    RadialStretch,
    /// `(x', x_n) ↦ (K x', x_n)` on the half-space.
    HorizontalStretch,
}

#[derive(Args)]
pub struct QcVerifyArgs {
    #[arg(long, value_enum)]
    map: MapName,
    /// Certificate dilatation; also the stretch factor of stretch maps.
    #[arg(long = "K", default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value = "ball")]
    domain: DomainArg,
    #[arg(long = "R", default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Rotation angle in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    angle: f64,
    /// Point sent to the origin by the ball automorphism.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
}

fn qc_verify(a: &QcVerifyArgs, ctx: &Context) -> Result<Output, Failure> {
    let n = a.n;
    let map = match a.map {
        MapName::Identity => TestMap::Identity { n },
        MapName::Rotation => TestMap::Rotation { n, angle: a.angle },
        MapName::BallAutomorphism => TestMap::BallAutomorphism {
            a: match &a.a {
                Some(s) => parse_point(s)?,
                None => vec![0.0; n],
            },
        },
        MapName::RadialStretch => TestMap::RadialStretch { n, k: a.k },
        MapName::HorizontalStretch => TestMap::HorizontalStretch { n, k: a.k },
    };
    let cert = certificate(a.k, n, a.domain, a.r)?;
    let report = qcbounds::verify_holder_empirical(&map, &cert, a.samples, ctx.seed, ctx.exec)?;
    Ok(Output::record(
        "ringmod.holder_check/1",
        json!({"map": to_value(&map), "seed": ctx.seed, "certificate": to_value(&cert), "report": to_value(&report)}),
    ))
}

// --------------------------------------------------------------- table

#[derive(Args)]
pub struct TableArgs {
    #[arg(long = "fn", value_enum)]
    func: SpecialFn,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Space the arguments logarithmically.
    #[arg(long)]
    log: bool,
}

fn table(a: &TableArgs) -> Result<Output, Failure> {
    if a.points < 2 || a.from >= a.to || !(a.from.is_finite() && a.to.is_finite()) {
        return Err(ringmod::Error::Domain(format!(
            "need from < to and at least 2 points, got [{}, {}] with {}",
            a.from, a.to, a.points
        ))
        .into());
    }
    if a.log && a.from <= 0.0 {
        return Err(ringmod::Error::Domain("log spacing needs from > 0".into()).into());
    }
    let last = (a.points - 1) as f64;
    let rows = (0..a.points)
        .map(|i| {
            let s = i as f64 / last;
            let x = if a.log {
                (a.from.ln() + s * (a.to.ln() - a.from.ln())).exp()
            } else {
                a.from + s * (a.to - a.from)
            };
            // Pin the endpoints to the requested values.
            let x = if i == 0 { a.from } else if i + 1 == a.points { a.to } else { x };
            Ok(json!({"x": x, "value": a.func.eval(x)?}))
        })
        .collect::<ringmod::Result<Vec<_>>>()?;
    Ok(Output::Table { schema: format!("ringmod.table.{}/1", a.func.name()), rows })
}
