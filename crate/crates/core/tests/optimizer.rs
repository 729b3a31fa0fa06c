//! The optimizer against reference values and against its own symmetry.

mod common;

use common::*;
use tetrapack::cluster::{build_cluster, ClusterError, IsometryGroup, SwivelParams};
use tetrapack::contacts::ContactLabel;
use tetrapack::optimizer::{
    grid_axis, optimize_lattice, sweep, virtual_density, Family, InitialBasis, OptimizeError, OptimizerConfig,
    Variant,
};
use tetrapack::packing::default_cutoff;
use tetrapack::verify::{certify, sym_basis, transform_basis, CERT_TOL};

fn family() -> Family {
    Family::discover(&OptimizerConfig::default()).unwrap()
}

fn cluster(u: f64, v: f64) -> tetrapack::cluster::Cluster<f64> {
    build_cluster(SwivelParams::new(u, v).unwrap(), 1).unwrap()
}

#[test]
fn discovery_finds_the_ten_base_contacts() {
    let f = family();
    let mut labels: Vec<ContactLabel> = f.g.iter().map(|c| c.label.clone()).collect();
    labels.sort();
    let mut want = ContactLabel::G_SET.to_vec();
    want.sort();
    assert_eq!(labels, want);
    assert_eq!(f.h.each_ref().map(|c| c.label.clone()), [ContactLabel::Ha, ContactLabel::Hb]);
    let reference = tetrapack::optimizer::objective::cell_volume(f.reference.as_slice());
    // a local descent from the symmetric packing can only shrink the cell
    assert!(reference <= SYM_VOLUME + 1e-9, "{reference}");
}

#[test]
fn reference_optimum_is_reproduced() {
    let s = family().solve(OPT_UV.0, OPT_UV.1, Variant::Free, None).unwrap();
    assert!(s.result.converged);
    assert!((s.result.volume - OPT_VOLUME).abs() < 1e-9, "{}", s.result.volume);
    assert!((s.result.density - OPT_DENSITY).abs() < 1e-11);
    for (x, y) in s.result.basis.to_array().iter().zip(opt_basis().to_array()) {
        assert!((x - y).abs() < 1e-9);
    }
    let report = certify(&cluster(OPT_UV.0, OPT_UV.1), &s.result.basis, 9.0, CERT_TOL).unwrap();
    assert!(report.is_certified());
}

#[test]
fn reference_optimum_is_a_local_maximum() {
    let f = family();
    let center = f.solve(OPT_UV.0, OPT_UV.1, Variant::Free, None).unwrap();
    for (du, dv) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
        let (u, v) = (OPT_UV.0 + 2e-3 * du, OPT_UV.1 + 2e-3 * dv);
        let s = f.solve(u, v, Variant::Free, Some((OPT_UV.0, OPT_UV.1, &center.x))).unwrap();
        assert!(s.result.density < center.result.density, "({u}, {v}) {}", s.result.density);
    }
}

#[test]
fn variants_at_the_optimum() {
    let f = family();
    let p = SwivelParams::new(OPT_UV.0, OPT_UV.1).unwrap();
    let free = virtual_density(&f, &p, Variant::Free);
    let gab = virtual_density(&f, &p, Variant::Gab);
    assert!((free.density - gab.density).abs() < 1e-10);
    assert!(gab.converged);
    for v in [Variant::G, Variant::Ga, Variant::Gb] {
        let s = virtual_density(&f, &p, v);
        // fewer forced contacts, so at least as dense but overlapping here
        assert!(s.density >= gab.density - 1e-12, "{v}");
        assert!(!s.converged, "{v} should overlap");
    }
}

#[test]
fn variants_meet_at_the_tangency_point() {
    let f = family();
    let p = SwivelParams::new(TANGENCY_UV.0, TANGENCY_UV.1).unwrap();
    for v in Variant::VIRTUAL {
        let s = virtual_density(&f, &p, v);
        assert!((s.density - TANGENCY_DENSITY).abs() < 1e-4, "{v} {}", s.density);
    }
}

#[test]
fn explicit_start_from_the_reference_basis_stays() {
    let c = cluster(OPT_UV.0, OPT_UV.1);
    let r = optimize_lattice(&c, InitialBasis::Explicit(opt_basis()), &OptimizerConfig::default()).unwrap();
    assert!((r.volume - OPT_VOLUME).abs() < 1e-6, "{}", r.volume);
}

#[test]
fn explicit_start_from_a_loose_packing_tightens() {
    let c = cluster(0.0, 0.0);
    let loose = sym_basis().scaled(1.05);
    let r = optimize_lattice(&c, InitialBasis::Explicit(loose), &OptimizerConfig::default()).unwrap();
    assert!(r.volume < loose.volume().unwrap());
    assert!(r.max_penetration <= CERT_TOL);
    assert!(certify(&c, &r.basis, default_cutoff(&c), 1e-6).unwrap().is_certified());
}

#[test]
fn symmetric_images_of_an_optimum_are_optima() {
    let f = family();
    let group = IsometryGroup::<f64>::new();
    for (u, v) in [(0.03, -0.05), (-0.07, 0.02), (OPT_UV.0, OPT_UV.1)] {
        let s = f.solve(u, v, Variant::Free, None).unwrap();
        for (m, action) in group.elements.iter().zip(group.actions) {
            let (u2, v2) = action.apply(u, v);
            let image = cluster(u2, v2);
            let basis = transform_basis(&s.result.basis, m);
            assert!((basis.volume().unwrap() - s.result.volume).abs() < 1e-9);
            let report = certify(&image, &basis, default_cutoff(&image), 1e-6).unwrap();
            assert!(report.is_certified(), "({u2}, {v2}): {:?}", report.failures);
            let again = optimize_lattice(&image, InitialBasis::Explicit(basis), &OptimizerConfig::default()).unwrap();
            assert!((again.volume - s.result.volume).abs() < 5e-6, "({u2}, {v2}) {} vs {}", again.volume, s.result.volume);
        }
    }
}

#[test]
fn sweep_covers_the_square() {
    let axis = grid_axis(3);
    assert_eq!(axis.len(), 3);
    assert!((axis[0] + 1.0 / 9.0).abs() < 1e-15 && (axis[2] - 1.0 / 9.0).abs() < 1e-15);
    let samples = sweep(&family(), 2, Variant::Free).unwrap();
    assert_eq!(samples.len(), 4);
    assert!(samples.iter().all(|s| s.u.abs() > 0.11 && s.v.abs() > 0.11));
}

#[test]
fn errors() {
    assert!(matches!(
        SwivelParams::new(0.2, 0.0),
        Err(ClusterError::OutOfRange { .. })
    ));
    assert!(matches!(sweep(&family(), 1, Variant::Free), Err(OptimizeError::GridTooSmall(1))));
    assert!(matches!("Gc".parse::<Variant>(), Err(OptimizeError::UnknownVariant(_))));
    let crushed = sym_basis().scaled(0.5);
    assert!(matches!(
        optimize_lattice(&cluster(0.0, 0.0), InitialBasis::Explicit(crushed), &OptimizerConfig::default()),
        Err(OptimizeError::InfeasibleStart(_))
    ));
    assert!(family().solve(0.5, 0.0, Variant::Free, None).is_err());
}
