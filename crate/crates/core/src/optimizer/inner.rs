//! Volume minimization for a fixed cluster.
//!
//! Two translated polytopes are disjoint iff some facet of their Minkowski
//! difference separates them, i.e. `max_k (n_k · w - h_k) >= 0`. For a fixed
//! choice of facet per pair the constraint is linear in the basis, so the
//! problem becomes a sequence of linearly constrained cubic programs. After
//! each solve the facet attaining the maximum is re-selected for every pair
//! and the solve repeats until the selection no longer changes.

use nalgebra::{DMatrix, DVector};

use super::active_set::{
    lstsq, minimize_volume, null_space, restore_feasibility, ActiveSetSettings, ActiveSetStatus,
    LinearConstraints,
};
use super::objective::{basis_of, pair_row, volume_gradient, volume_hessian, DIM};
use crate::contacts::{ContactLabel, FacetTable};
use crate::packing::PairId;
use crate::Vec3;

/// A contact held at zero gap, identified by its pair and the facet normal
/// it had when it was first found. At other parameters the facet of the
/// same pair with the closest normal is used.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenContact {
    pub pair: PairId,
    pub normal: Vec3,
    pub label: ContactLabel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSettings {
    pub active: ActiveSetSettings,
    pub max_rounds: usize,
    /// Pairs whose gap exceeds this are left out of a round.
    pub far_gap: f64,
    pub restore_rounds: usize,
}

impl Default for InnerSettings {
    fn default() -> Self {
        Self {
            active: ActiveSetSettings::default(),
            max_rounds: 20,
            far_gap: 4.0,
            restore_rounds: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub x: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub rounds: usize,
}

type Key = (usize, usize);

fn build_rows(table: &FacetTable, pairs: &[PairId], x: &DVector<f64>, far_gap: f64) -> (Vec<[f64; DIM]>, Vec<f64>, Vec<Key>) {
    let basis = basis_of(x.as_slice());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut keys = Vec::new();
    for (pi, pair) in pairs.iter().enumerate() {
        let (g, k) = table.max_gap(pair, pair.translation(&basis));
        if g > far_gap {
            continue;
        }
        let f = &table.facets(pair)[k];
        rows.push(pair_row(pair, f.normal));
        rhs.push(f.h);
        keys.push((pi, k));
    }
    (rows, rhs, keys)
}

/// Equality rows for the frozen contacts under the current facet table.
pub fn forced_rows(table: &FacetTable, forced: &[FrozenContact]) -> (Vec<[f64; DIM]>, Vec<f64>) {
    forced
        .iter()
        .map(|fc| {
            let f = &table.facets(&fc.pair)[table.closest_facet(&fc.pair, fc.normal)];
            (pair_row(&fc.pair, f.normal), f.h)
        })
        .unzip()
}

/// Smallest facet gap over `pairs` at basis `x`; negative means overlap.
pub fn min_gap(table: &FacetTable, pairs: &[PairId], x: &DVector<f64>) -> f64 {
    let basis = basis_of(x.as_slice());
    pairs
        .iter()
        .map(|p| table.max_gap(p, p.translation(&basis)).0)
        .fold(f64::INFINITY, f64::min)
}

/// Minimizes the cell volume subject to non-overlap of all `pairs`, with
/// the `forced` contacts held at zero gap.
pub fn solve_inner(
    table: &FacetTable,
    pairs: &[PairId],
    x0: &DVector<f64>,
    forced: &[FrozenContact],
    settings: &InnerSettings,
) -> InnerOutcome {
    let (eq, eq_rhs) = forced_rows(table, forced);
    let mut x = x0.clone();
    let mut prev_active: Vec<Key> = Vec::new();
    let mut iterations = 0;
    for round in 0..settings.max_rounds {
        let (rows, rhs, keys) = build_rows(table, pairs, &x, settings.far_gap);
        let cons = LinearConstraints::new(eq.clone(), eq_rhs.clone(), rows, rhs);
        let working: Vec<usize> = keys
            .iter()
            .enumerate()
            .filter(|(_, k)| prev_active.contains(k))
            .map(|(i, _)| i)
            .collect();
        let (xr, working) = restore_feasibility(x, &cons, working, settings.restore_rounds);
        let out = minimize_volume(xr, &cons, working, &settings.active);
        iterations += out.iterations;
        x = out.x;
        prev_active = out.working.iter().map(|&i| keys[i]).collect();
        let (_, _, next) = build_rows(table, pairs, &x, settings.far_gap);
        if next == keys {
            return InnerOutcome {
                x,
                converged: out.status == ActiveSetStatus::Converged,
                iterations,
                rounds: round + 1,
            };
        }
    }
    InnerOutcome {
        x,
        converged: false,
        iterations,
        rounds: settings.max_rounds,
    }
}

/// Newton iteration for a stationary point of the volume on the affine set
/// `E x = e`. Returns `None` when the reduced Hessian is singular.
pub fn newton_equalities(
    x0: &DVector<f64>,
    eq: &[[f64; DIM]],
    eq_rhs: &[f64],
    max_iterations: usize,
    step_tol: f64,
) -> Option<(DVector<f64>, bool)> {
    let e = super::active_set::rows_to_matrix(eq);
    let rhs = DVector::from_column_slice(eq_rhs);
    let z = null_space(&e);
    let mut x = x0.clone();
    for _ in 0..max_iterations {
        let r = &rhs - &e * &x;
        x += lstsq(&e, &r);
        if z.ncols() == 0 {
            return Some((x, true));
        }
        let rg = z.transpose() * volume_gradient(x.as_slice());
        let rh: DMatrix<f64> = z.transpose() * volume_hessian(x.as_slice()) * &z;
        let step = rh.lu().solve(&rg)?;
        let p = -(&z * step);
        x += &p;
        if p.norm() < step_tol {
            return Some((x, true));
        }
    }
    Some((x, false))
}
