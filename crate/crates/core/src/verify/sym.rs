//! The closed-form packing of the symmetric cluster.

use twofloat::TwoFloat;

use crate::cluster::{build_cluster, SwivelParams};
use crate::contacts::{classify_with_table, FacetTable, ACTIVE_TOL};
use crate::optimizer::{min_gap, PackingResult, Variant};
use crate::packing::{box_pairs, default_cutoff, LatticeBasis};
use crate::Vec3;

/// The symmetric packing: a square layer lattice with the lower cluster
/// layer turned a quarter turn against the upper one.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPacking {
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub basis: LatticeBasis<f64>,
    /// Closed-form cell volume and density, evaluated in double-double.
    pub volume_exact: f64,
    pub density_exact: f64,
}

fn sqrt6() -> TwoFloat {
    TwoFloat::from(6.0).sqrt()
}

/// `(p + q√6) / r` in double-double.
fn surd(p: f64, q: f64, r: f64) -> f64 {
    f64::from((TwoFloat::from(p) + TwoFloat::from(q) * sqrt6()) / TwoFloat::from(r))
}

/// Closed-form coordinates `(i, j, k)`.
pub fn sym_coords() -> (f64, f64, f64) {
    (
        surd(-168.0, 106.0, 71.0),
        surd(-88.0, 42.0, 71.0),
        surd(-262.0, 238.0, 71.0),
    )
}

/// Basis of the symmetric packing in half-generator form: the layer
/// lattice is spanned by `2a = (2i, 2j, 0)` and `2b = (-2j, 2i, 0)`.
pub fn sym_basis() -> LatticeBasis<f64> {
    let (i, j, k) = sym_coords();
    LatticeBasis::new(
        Vec3::from_f64(i, j, 0.0),
        Vec3::from_f64(-j, i, 0.0),
        Vec3::from_f64(i, j, k),
        Vec3::from_f64(-j, i, -k),
    )
}

/// Builds the symmetric packing and evaluates it like an optimizer result.
pub fn build_sym_packing() -> (SymPacking, PackingResult) {
    let (i, j, k) = sym_coords();
    let basis = sym_basis();
    let sym = SymPacking {
        i,
        j,
        k,
        basis,
        volume_exact: surd(-730_200_320.0, 307_139_840.0, 357_911.0),
        density_exact: surd(1_711_407.0, 719_859.0, 4_477_040.0),
    };
    let params = SwivelParams::new(0.0, 0.0).expect("origin is in range");
    let cluster = build_cluster(params, 1).expect("symmetric cluster");
    let table = FacetTable::new(&cluster);
    let volume = basis.volume().expect("non-degenerate");
    let x = nalgebra::DVector::from_column_slice(&basis.to_array());
    let penetration = (-min_gap(&table, &box_pairs(2, 1), &x)).max(0.0);
    let result = PackingResult {
        params,
        variant: Variant::Free,
        basis,
        volume,
        density: 48.0 / volume,
        active_contacts: classify_with_table(&table, &basis, default_cutoff(&cluster), ACTIVE_TOL),
        converged: true,
        iterations: 0,
        max_penetration: penetration,
    };
    (sym, result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_match_decimals() {
        let (i, j, k) = sym_coords();
        assert!((i - 1.290787503310).abs() < 1e-12);
        assert!((j - 0.209557312632).abs() < 1e-12);
        assert!((k - 4.520824771583).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_agree_with_basis() {
        let (sym, res) = build_sym_packing();
        assert!((sym.volume_exact - 61.846569901642).abs() < 1e-10);
        assert!((sym.density_exact - 0.776114181859).abs() < 1e-10);
        assert!((res.volume - sym.volume_exact).abs() < 1e-10);
        assert!((res.density - sym.density_exact).abs() < 1e-10);
        assert!(res.max_penetration < 1e-9);
    }
}
