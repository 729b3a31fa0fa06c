//! Randomized invariants of the geometry, lattice and certificate layers.

mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tetrapack::cluster::{build_cluster, IsometryGroup, Side, SwivelParams};
use tetrapack::geom::{body_volume, convex_hull, rotate_about_line, signed_separation, Vector3};
use tetrapack::optimizer::objective::{cell_volume, volume_gradient};
use tetrapack::optimizer::{Family, OptimizerConfig, Variant};
use tetrapack::packing::{enumerate_neighbors, LatticeBasis};
use tetrapack::verify::{certify, recheck, sym_basis, RecheckIssue, CERT_TOL};
use tetrapack::Vec3;

fn param() -> impl Strategy<Value = f64> {
    -1.0f64 / 9.0..1.0 / 9.0
}

fn point(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::from_f64(x, y, z))
}

fn unit() -> impl Strategy<Value = Vec3> {
    point(1.0).prop_filter_map("near zero", |p| p.normalized().filter(|_| p.norm() > 0.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_preserves_distances(p in point(5.0), q in point(5.0), c in point(5.0), axis in unit(), angle in -7.0f64..7.0) {
        let rp = rotate_about_line(p, c, axis, angle).unwrap();
        let rq = rotate_about_line(q, c, axis, angle).unwrap();
        prop_assert!((rp.distance(rq) - p.distance(q)).abs() < 1e-12 * (1.0 + p.distance(q)));
        prop_assert!((rp.distance(c) - p.distance(c)).abs() < 1e-12 * (1.0 + p.distance(c)));
    }

    #[test]
    fn hull_volume_is_rigid_invariant(u in param(), v in param(), axis in unit(), angle in -3.2f64..3.2, w in point(10.0)) {
        let cluster = build_cluster(SwivelParams::new(u, v).unwrap(), 1).unwrap();
        let half = cluster.half(Side::Lower);
        let moved: Vec<Vec3> = half
            .points()
            .iter()
            .map(|&p| rotate_about_line(p, Vec3::zeros(), axis, angle).unwrap() + w)
            .collect();
        let hull = convex_hull(&moved).unwrap();
        prop_assert!((body_volume(&hull) - body_volume(&half.hull)).abs() < 1e-10);
        prop_assert_eq!(hull.vertices.len(), half.hull.vertices.len());
    }

    #[test]
    fn separation_agrees_with_sampling(seed in any::<u64>(), u in param(), v in param(), w in point(6.0), flip in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cluster = build_cluster(SwivelParams::new(u, v).unwrap(), 1).unwrap();
        let other = if flip { cluster.negated() } else { cluster.clone() };
        let a = cluster.half(Side::Upper).hull.clone();
        let b = other.half(Side::Lower).hull.translated(w);
        let sep = signed_separation(&a, &b);
        prop_assert!(check_separation(&a, &b, &sep, &mut rng).is_ok(), "{:?}", check_separation(&a, &b, &sep, &mut rng));
    }

    #[test]
    fn volume_gradient_matches_differences(x in prop::array::uniform12(-5.0f64..5.0)) {
        let g = volume_gradient(&x);
        let h = 1e-5;
        for i in 0..12 {
            let (mut up, mut dn) = (x, x);
            up[i] += h;
            dn[i] -= h;
            let fd = (cell_volume(&up) - cell_volume(&dn)) / (2.0 * h);
            prop_assert!((g[i] - fd).abs() <= 1e-6 * g.norm().max(1.0));
        }
        prop_assert!((cell_volume(&x) - det_volume(&x)).abs() < 1e-9 * (1.0 + det_volume(&x).abs()));
    }

    #[test]
    fn unimodular_change_keeps_the_packing(m in -2i32..=2, n in -2i32..=2) {
        // a -> a + m b and (c, d) -> (c + 2n b, d + 2n b) generate the same
        // lattice and the same negative coset
        let basis = sym_basis();
        let (fm, fn_) = (f64::from(m), f64::from(2 * n));
        let other = LatticeBasis::new(basis.a + basis.b * fm, basis.b, basis.c + basis.b * fn_, basis.d + basis.b * fn_);
        prop_assert!((other.volume().unwrap() - basis.volume().unwrap()).abs() < 1e-9);
        let key = |b: &LatticeBasis<f64>| {
            let mut v: Vec<(char, [i64; 3])> = enumerate_neighbors(b, 7.0)
                .iter()
                .map(|nb| (nb.coset.sign(), nb.offset.to_array().map(|x| (x * 1e6).round() as i64)))
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&basis), key(&other));
    }

    #[test]
    fn isometries_map_clusters_onto_the_orbit(u in param(), v in param()) {
        let p = SwivelParams::new(u, v).unwrap();
        let base = build_cluster(p, 1).unwrap();
        let group = IsometryGroup::<f64>::new();
        for (m, action) in group.elements.iter().zip(group.actions) {
            let (u2, v2) = action.apply(u, v);
            let image = build_cluster(SwivelParams::new(u2, v2).unwrap(), 1).unwrap();
            let pts = image.points();
            for x in base.points() {
                prop_assert!(pts.iter().any(|y| y.approx_eq(m.mul_vec(x), 1e-9)));
            }
        }
    }

    #[test]
    fn f32_cluster_tracks_f64(u in param(), v in param()) {
        let p64 = build_cluster(SwivelParams::new(u, v).unwrap(), 1).unwrap();
        let p32 = build_cluster(SwivelParams::new(u as f32, v as f32).unwrap(), 1).unwrap();
        for (a, b) in p64.points().iter().zip(p32.points()) {
            let b: Vector3<f64> = b.cast();
            prop_assert!(a.approx_eq(b, 2e-5));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn expanded_packings_certify_and_recheck(scale in 1.0f64..1.2) {
        let cluster = build_cluster(SwivelParams::new(0.0, 0.0).unwrap(), 1).unwrap();
        let report = certify(&cluster, &sym_basis().scaled(scale), 9.0, CERT_TOL).unwrap();
        prop_assert!(report.is_certified());
        prop_assert!(recheck(&report).unwrap().is_empty());
    }

    #[test]
    fn shrunk_packings_fail_recheck(scale in 0.9f64..0.99) {
        let cluster = build_cluster(SwivelParams::new(0.0, 0.0).unwrap(), 1).unwrap();
        let report = certify(&cluster, &sym_basis().scaled(scale), 9.0, CERT_TOL).unwrap();
        prop_assert!(!report.is_certified());
        let issues = recheck(&report).unwrap();
        let violated = issues.iter().any(|i| matches!(i, RecheckIssue::Violated { .. }));
        prop_assert!(violated);
    }

    #[test]
    fn tampered_margins_are_reported(k in 0usize..50, delta in 1e-6f64..1e-2) {
        let cluster = build_cluster(SwivelParams::new(0.0, 0.0).unwrap(), 1).unwrap();
        let mut report = certify(&cluster, &sym_basis(), 9.0, CERT_TOL).unwrap();
        let k = k % report.certificates.len();
        report.certificates[k].margin_a += delta;
        let issues = recheck(&report).unwrap();
        let mismatch = matches!(issues[..], [RecheckIssue::MarginMismatch { .. }]);
        prop_assert!(mismatch, "{:?}", issues);
    }

    #[test]
    fn solves_are_deterministic(u in param(), v in param()) {
        let family = Family::discover(&OptimizerConfig::default()).unwrap();
        let a = family.solve(u, v, Variant::Free, None).unwrap();
        let b = family.solve(u, v, Variant::Free, None).unwrap();
        prop_assert_eq!(a.x.as_slice(), b.x.as_slice());
        prop_assert_eq!(a.result, b.result);
    }
}
