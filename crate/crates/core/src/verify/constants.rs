//! Densities of earlier tetrahedron packings and related benchmarks.

use std::f64::consts::PI;

use super::sym::build_sym_packing;
use crate::geom::{ring_solid_angle, RingKind};

/// Best density found by the outer search, to 12 digits.
pub const OPTIMUM_DENSITY: f64 = 0.778615700855;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConstant {
    pub name: &'static str,
    pub value: f64,
    pub description: &'static str,
}

/// Named reference values, in a fixed order.
pub fn reference_constants() -> Vec<ReferenceConstant> {
    let e5 = ring_solid_angle(RingKind::Edge, 5);
    let v20 = ring_solid_angle(RingKind::Vertex, 20);
    let (sym, _) = build_sym_packing();
    let c = |name, value, description| ReferenceConstant {
        name,
        value,
        description,
    };
    vec![
        c("groemer", 18.0 / 49.0, "lattice packing of a single tetrahedron"),
        // 177147 = 3^11; the transposed 177417 does not give the known decimal.
        c("tetrahelix", (50000.0f64 / 177147.0).sqrt(), "packing of tetrahelices"),
        c("hull_v20_lattice", 0.716796401602, "lattice packing of the hull of 20 tetrahedra around a vertex"),
        c("conway_torquato", 0.7165598, "20 tetrahedra inscribed in an icosahedron"),
        c("conway_torquato_wiggled", 0.717455, "the same with perturbed tetrahedra"),
        c("sphere_hcp", PI / 18.0f64.sqrt(), "densest sphere packing"),
        c("e5_solid_angle", e5.total, "solid angle of 5 tetrahedra around an edge"),
        c("e5_local", e5.local_density, "local density of 5 tetrahedra around an edge"),
        c("v20_solid_angle", v20.total, "solid angle of 20 tetrahedra around a vertex"),
        c("v20_local", v20.local_density, "local density of 20 tetrahedra around a vertex"),
        c("sym_i", sym.i, "symmetric packing coordinate i"),
        c("sym_j", sym.j, "symmetric packing coordinate j"),
        c("sym_k", sym.k, "symmetric packing coordinate k"),
        c("sym_volume", sym.volume_exact, "cell volume of the symmetric packing"),
        c("sym_density", sym.density_exact, "density of the symmetric packing"),
        c("optimum", OPTIMUM_DENSITY, "optimized two-parameter cluster packing"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(name: &str) -> f64 {
        reference_constants()
            .into_iter()
            .find(|c| c.name == name)
            .unwrap()
            .value
    }

    #[test]
    fn printed_values() {
        for (name, want) in [
            ("groemer", 0.367346938775),
            ("tetrahelix", 0.531273435694),
            ("sphere_hcp", 0.740480489693),
            ("e5_local", 0.979566380077),
            ("v20_local", 0.877398280459),
        ] {
            assert!((get(name) - want).abs() < 1e-11, "{name}");
        }
    }

    #[test]
    fn optimum_beats_every_benchmark() {
        for name in [
            "groemer",
            "tetrahelix",
            "hull_v20_lattice",
            "conway_torquato",
            "conway_torquato_wiggled",
            "sphere_hcp",
            "sym_density",
        ] {
            assert!(OPTIMUM_DENSITY > get(name), "{name}");
        }
    }
}
