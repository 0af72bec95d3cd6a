use proptest::prelude::*;

use ringmod::bounds_nd::{self, Dimension};
use ringmod::geometry::{canonical_ring, moebius_to_halfspace, sphere_points, vector, CanonicalRing, Continuum, Primitive};
use ringmod::modsolve::{self, NodeKind, SolverConfig};
use ringmod::qcbounds::{phi_distortion, phi_distortion_pair};
use ringmod::separation::{
    converse_c_from_m, inversion_containment_violations, inversion_separation, teichmuller_annulus,
    uniform_perfectness_analyze, InversionCase, UpGrid, UpSet,
};
use ringmod::special2d::{inverse_mu, mu};
use ringmod::{Annulus, Exec, ExtPoint, MoebiusMap, RingGeometry};

fn dims() -> impl Strategy<Value = Dimension> {
    (2usize..=4).prop_map(|n| Dimension::new(n).unwrap())
}

fn unit_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
        .prop_filter("not too short", |v| vector::norm(v) > 0.1)
        .prop_map(|v| vector::scale(&v, 1.0 / vector::norm(&v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn phi_is_identity_at_k_one(n in dims(), r in 1e-6f64..0.999_999) {
        let b = phi_distortion(1.0, n, r).unwrap();
        prop_assert_eq!(b.lo, r);
        prop_assert_eq!(b.hi, r);
    }

    #[test]
    fn phi_is_monotone(n in dims(), k in 1.0f64..6.0, dk in 0.01f64..3.0, r in 0.01f64..0.9, dr in 0.001f64..0.09) {
        let base = phi_distortion(k, n, r).unwrap();
        let bigger_r = phi_distortion(k, n, r + dr).unwrap();
        let bigger_k = phi_distortion(k + dk, n, r).unwrap();
        prop_assert!(bigger_r.lo >= base.lo && bigger_r.hi >= base.hi);
        prop_assert!(bigger_k.lo >= base.lo && bigger_k.hi >= base.hi);
        prop_assert!(base.lo >= r && base.hi <= 1.0);
    }

    #[test]
    fn planar_phi_divides_mu_by_k(k in 1.0f64..4.0, r in 0.01f64..0.8) {
        let (p, _) = phi_distortion_pair(k, r).unwrap();
        let target = mu(r).unwrap() / k;
        prop_assert!((mu(p).unwrap() - target).abs() <= 1e-9 * target.max(1.0));
    }

    #[test]
    fn mu_round_trip(log_r in -9.2f64..-1e-4) {
        let r = log_r.exp();
        prop_assert!((inverse_mu(mu(r).unwrap()).unwrap() - r).abs() <= 1e-9);
    }

    #[test]
    fn inversion_is_an_involution(x in prop::collection::vec(-50.0f64..50.0, 2..5)) {
        prop_assume!(vector::norm(&x) > 1e-3);
        let inv = MoebiusMap::inversion(x.len());
        let y = inv.apply_finite(&inv.apply_finite(&x).unwrap()).unwrap();
        prop_assert!(vector::dist(&x, &y) <= 1e-12 * vector::norm(&x).max(1.0));
    }

    #[test]
    fn halfspace_map_norm_identity((xi, x) in (2usize..5).prop_flat_map(|n| (unit_vector(n), prop::collection::vec(-0.7f64..0.7, n)))) {
        prop_assume!(vector::norm(&x) < 0.99);
        let m = moebius_to_halfspace(&ExtPoint::finite(xi.clone()).unwrap()).unwrap();
        let y = m.apply_finite(&x).unwrap();
        let expected = vector::norm(&vector::add(&x, &xi)) / vector::norm(&vector::sub(&x, &xi));
        prop_assert!((vector::norm(&y) - expected).abs() < 1e-10 * expected.max(1.0));
        prop_assert!(*y.last().unwrap() > 0.0);
    }

    #[test]
    fn generic_brackets_contain_planar_values(s in 1.001f64..1e4, t in 1e-3f64..1e4) {
        let two = Dimension::TWO;
        prop_assert!(bounds_nd::lambda_bound(two).contains(bounds_nd::lambda_bracket(two).lo, 0.0));
        prop_assert!(bounds_nd::a_bound(two).contains(std::f64::consts::PI, 0.0));
        let phi = bounds_nd::phi_bracket(two, s).unwrap().lo;
        prop_assert!(bounds_nd::phi_bound(two, s).unwrap().contains(phi, 1e-12 * phi));
        let psi = bounds_nd::psi_bracket(two, t).unwrap().lo;
        prop_assert!(bounds_nd::psi_bound(two, t).unwrap().contains(psi, 1e-12 * psi));
    }

    #[test]
    fn brackets_are_ordered(n in dims(), s in 1.001f64..1e3) {
        for b in [
            bounds_nd::lambda_bracket(n),
            bounds_nd::a_constant(n),
            bounds_nd::q_constant(n),
            bounds_nd::phi_bracket(n, s).unwrap(),
            bounds_nd::psi_bracket(n, s).unwrap(),
        ] {
            prop_assert!(b.lo <= b.hi);
            prop_assert_eq!(b.is_exact(), n.is_planar());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inversion_separation_contains_images(
        n in 2usize..4,
        dir in prop::collection::vec(-1.0f64..1.0, 3),
        r0 in 0.05f64..2.0,
        ratio in 3.2f64..50.0,
        outside in any::<bool>(),
        frac in 0.0f64..1.0,
    ) {
        prop_assume!(vector::norm(&dir[..n]) > 0.1);
        let r1 = r0 * ratio;
        let unit = vector::scale(&dir[..n], 1.0 / vector::norm(&dir[..n]));
        let (center, case) = if outside {
            (vector::scale(&unit, r1 * (1.0 + 3.0 * frac) + 1e-6), InversionCase::OriginInC1)
        } else {
            (vector::scale(&unit, r0 * frac * 0.999), InversionCase::OriginInC0)
        };
        let a = Annulus::new(center, r0, r1).unwrap();
        let a0 = inversion_separation(&a, case).unwrap();
        prop_assert!(a0.modulus() >= a.modulus() - 3f64.ln() - 1e-12 * a.modulus());
        prop_assert_eq!(inversion_containment_violations(&a, case, &a0, 400, Exec::Sequential), 0);
    }

    #[test]
    fn teichmuller_certificates_are_sound(t in 1.05f64..200.0) {
        let ring = canonical_ring(CanonicalRing::Teichmuller { t }, Dimension::TWO).unwrap();
        let m = ring.exact_modulus().unwrap();
        let x0 = ExtPoint::finite(vec![0.0, 0.0]).unwrap();
        let cert = teichmuller_annulus(&ring, &x0, m, Dimension::TWO).unwrap();
        prop_assert_eq!(cert.c1_violations, 0);
        let ann = &cert.annulus;
        prop_assert!(ann.modulus() >= cert.guaranteed_modulus - 1e-12);
        for k in 1..8 {
            let rad = ann.r0 * (ann.r1 / ann.r0).powf(k as f64 / 8.0);
            for p in sphere_points(&ann.center, rad, 64) {
                prop_assert!(ring.c0.distance(&p) > 0.0);
                prop_assert!(ring.c1.distance(&p) > 0.0);
            }
        }
    }

    #[test]
    fn uniform_perfectness_round_trip(
        pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 3..25),
        inf in any::<bool>(),
    ) {
        let set = UpSet::new(pts.clone(), inf).unwrap();
        let grid = UpGrid { radii: 48, ..UpGrid::default() };
        let report = uniform_perfectness_analyze(&set, Dimension::TWO, grid, Exec::Sequential).unwrap();
        prop_assert!(report.c_best < 1.0);
        if !report.m_bound.is_finite() {
            return Ok(());
        }
        let c = converse_c_from_m(report.m_bound).unwrap();
        prop_assert!(c <= report.c_best);
        let steps = grid.radii;
        for a in &pts {
            for k in 0..=steps {
                let r = report.r_min * (report.r_max / report.r_min).powf(k as f64 / steps as f64);
                prop_assert!(set.annulus_hit(a, r, c), "annulus around {:?} at r = {} missed", a, r);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solver_obeys_maximum_principle_and_energy_descent(r1 in 2.0f64..6.0, cx in -0.3f64..0.3) {
        let c = vec![cx, 0.0];
        let ring = RingGeometry::new(
            Continuum::new(vec![Primitive::Ball { center: c.clone(), radius: 1.0 }], false).unwrap(),
            Continuum::new(vec![Primitive::BallExterior { center: c, radius: r1 }], true).unwrap(),
        ).unwrap();
        let cfg = SolverConfig { exec: Exec::Sequential, ..SolverConfig::default() };
        let h = modsolve::ring_grid_spacing(&ring, 61, &cfg);
        let (est, field) = modsolve::solve_ring(&ring, Dimension::TWO, h, &cfg).unwrap();
        prop_assert!(field.values().iter().all(|u| (0.0..=1.0).contains(u)));
        for (u, k) in field.values().iter().zip(field.kinds()) {
            match k {
                NodeKind::Zero => prop_assert_eq!(*u, 0.0),
                NodeKind::One => prop_assert_eq!(*u, 1.0),
                _ => {}
            }
        }
        prop_assert!(est.energy_history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!((est.mod_ring / r1.ln() - 1.0).abs() < 0.1);
    }
}
