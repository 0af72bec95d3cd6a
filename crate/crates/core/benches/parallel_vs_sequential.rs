use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringmod::bounds_nd::Dimension;
use ringmod::geometry::{Continuum, Primitive};
use ringmod::modsolve::{self, SolverConfig};
use ringmod::qcbounds::{holder_ball, verify_holder_empirical, TestMap};
use ringmod::separation::{
    inversion_containment_violations, inversion_separation, uniform_perfectness_analyze, InversionCase, UpGrid,
    UpSet,
};
use ringmod::{Annulus, Exec, RingGeometry};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn uniform_perfectness(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts = (0..600).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let set = UpSet::new(pts, false).unwrap();
    let mut g = c.benchmark_group("uperf_600_points");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| uniform_perfectness_analyze(black_box(&set), Dimension::TWO, UpGrid::default(), exec).unwrap())
        });
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let o = vec![0.0, 0.0];
    let ring = RingGeometry::new(
        Continuum::new(vec![Primitive::Ball { center: o.clone(), radius: 1.0 }], false).unwrap(),
        Continuum::new(vec![Primitive::BallExterior { center: o, radius: std::f64::consts::E }], true).unwrap(),
    )
    .unwrap();
    let mut g = c.benchmark_group("annulus_solver_121");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = SolverConfig { exec, ..SolverConfig::default() };
        let h = modsolve::ring_grid_spacing(&ring, 121, &cfg);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| modsolve::estimate_ring_modulus(black_box(&ring), Dimension::TWO, h, &cfg).unwrap())
        });
    }
    g.finish();
}

fn holder_verifier(c: &mut Criterion) {
    let map = TestMap::RadialStretch { n: 2, k: 2.0 };
    let cert = holder_ball(2.0, Dimension::TWO).unwrap();
    let mut g = c.benchmark_group("holder_verifier_1e5");
    g.sample_size(20);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| verify_holder_empirical(black_box(&map), &cert, 100_000, 0, exec).unwrap())
        });
    }
    g.finish();
}

fn inversion_check(c: &mut Criterion) {
    let a = Annulus::new(vec![3.0, 1.0, 0.5], 0.2, 2.0).unwrap();
    let a0 = inversion_separation(&a, InversionCase::OriginInC1).unwrap();
    let mut g = c.benchmark_group("inversion_containment_1e5");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| inversion_containment_violations(black_box(&a), InversionCase::OriginInC1, &a0, 100_000, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, uniform_perfectness, solver, holder_verifier, inversion_check);
criterion_main!(benches);
