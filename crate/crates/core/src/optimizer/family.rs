//! The contact structure of the optimal packings and solves that follow it
//! across the parameter square.
//!
//! A reference packing of the symmetric cluster is found by local descent
//! from the closed-form symmetric packing, nudged so that the layers settle
//! into the staggered arrangement of the optimum. Its ten active contacts
//! are frozen as the base equations; the two closest upper-lower in-layer
//! pairs along `a` and `b` become the optional extra equations. Solves at
//! other parameters continue from the reference in small steps.

use nalgebra::DVector;

use super::inner::{forced_rows, min_gap, newton_equalities, solve_inner, FrozenContact};
use super::objective::{basis_of, cell_volume};
use super::{DensitySample, InitialBasis, OptimizeError, OptimizerConfig, PackingResult, Variant};
use crate::cluster::{build_cluster, Cluster, Side, SwivelParams};
use crate::contacts::{classify_with_table, ContactLabel, FacetTable, ACTIVE_TOL};
use crate::packing::{box_pairs, default_cutoff, density, Coset, PairId};
use crate::verify::sym_basis;

/// Shift of the layer offsets along `b` that selects the staggered layer
/// arrangement when descending from the symmetric packing.
const LAYER_NUDGE: f64 = 0.08;
/// Gap below which a contact of the reference packing counts as active.
const REFERENCE_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct Family {
    /// Optimal basis of the symmetric cluster.
    pub reference: DVector<f64>,
    pub g: Vec<FrozenContact>,
    pub h: [FrozenContact; 2],
    pairs: Vec<PairId>,
    config: OptimizerConfig,
}

/// A finished solve with its raw coordinates, for warm starts.
#[derive(Debug, Clone)]
pub struct Solved {
    pub u: f64,
    pub v: f64,
    pub x: DVector<f64>,
    pub result: PackingResult,
}

pub(crate) fn setup(u: f64, v: f64) -> Result<(Cluster<f64>, FacetTable), OptimizeError> {
    let cluster = build_cluster(SwivelParams::new(u, v)?, 1)?;
    let table = FacetTable::new(&cluster);
    Ok((cluster, table))
}

impl Family {
    pub fn discover(config: &OptimizerConfig) -> Result<Self, OptimizeError> {
        let pairs = box_pairs(2, 1);
        let settings = config.inner_settings();
        let (_, table) = setup(0.0, 0.0)?;
        let sym = sym_basis();
        let mut x0 = sym.to_array();
        for k in 0..3 {
            x0[6 + k] += LAYER_NUDGE * sym.b[k];
            x0[9 + k] -= LAYER_NUDGE * sym.b[k];
        }
        let free = solve_inner(&table, &pairs, &DVector::from_column_slice(&x0), &[], &settings);
        let basis = basis_of(free.x.as_slice());
        let mut g = Vec::new();
        for pair in &pairs {
            let (gap, k) = table.max_gap(pair, pair.translation(&basis));
            if gap.abs() < REFERENCE_TOL {
                g.push(FrozenContact {
                    pair: *pair,
                    normal: table.facets(pair)[k].normal,
                    label: ContactLabel::of(pair),
                });
            }
        }
        let mut labels: Vec<_> = g.iter().map(|c| c.label.clone()).collect();
        labels.sort();
        labels.dedup();
        if g.len() != 10 || labels.len() != 10 || !g.iter().all(|c| c.label.is_g()) {
            let names: Vec<_> = g.iter().map(|c| c.label.to_string()).collect();
            return Err(OptimizeError::ReferenceMismatch(names.join(",")));
        }
        let forced = solve_inner(&table, &pairs, &free.x, &g, &settings);
        let basis = basis_of(forced.x.as_slice());
        let nearest = |want_a: bool| -> Option<FrozenContact> {
            pairs
                .iter()
                .filter(|p| {
                    p.coset == Coset::Positive
                        && p.side_a == Side::Upper
                        && p.side_b == Side::Lower
                        && p.coords.k == 0
                        && p.coords.i.abs() <= 1
                        && p.coords.j.abs() <= 1
                        && (p.coords.i != 0) == want_a
                        && (p.coords.j != 0) != want_a
                })
                .map(|p| (table.max_gap(p, p.translation(&basis)), p))
                .min_by(|x, y| x.0 .0.total_cmp(&y.0 .0))
                .map(|((_, k), p)| FrozenContact {
                    pair: *p,
                    normal: table.facets(p)[k].normal,
                    label: ContactLabel::of(p),
                })
        };
        let missing = || OptimizeError::ReferenceMismatch("no in-layer upper-lower pair".into());
        let h = [nearest(true).ok_or_else(missing)?, nearest(false).ok_or_else(missing)?];
        Ok(Self {
            reference: forced.x,
            g,
            h,
            pairs,
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn pairs(&self) -> &[PairId] {
        &self.pairs
    }

    /// Contacts held at zero gap for `variant`.
    pub fn forced(&self, variant: Variant) -> Vec<FrozenContact> {
        let mut out = self.g.clone();
        out.extend(variant.extra_h().iter().map(|&i| self.h[i].clone()));
        out
    }

    fn path(&self, from: (f64, f64), to: (f64, f64)) -> Vec<(f64, f64)> {
        let dist = (to.0 - from.0).hypot(to.1 - from.1);
        let n = ((dist / self.config.continuation_step).ceil() as usize).max(1);
        (1..=n)
            .map(|s| {
                let t = s as f64 / n as f64;
                if s == n {
                    to
                } else {
                    (from.0 + t * (to.0 - from.0), from.1 + t * (to.1 - from.1))
                }
            })
            .collect()
    }

    /// Solves `variant` at `(u, v)`, continuing from `warm` or from the
    /// reference packing.
    pub fn solve(
        &self,
        u: f64,
        v: f64,
        variant: Variant,
        warm: Option<(f64, f64, &DVector<f64>)>,
    ) -> Result<Solved, OptimizeError> {
        SwivelParams::new(u, v)?;
        let (u0, v0, x0) = warm.unwrap_or((0.0, 0.0, &self.reference));
        let forced = self.forced(variant);
        let settings = self.config.inner_settings();
        let mut x = x0.clone();
        let mut ok = true;
        let mut iterations = 0;
        let mut last = None;
        for (pu, pv) in self.path((u0, v0), (u, v)) {
            let (cluster, table) = setup(pu, pv)?;
            match variant {
                Variant::Free => {
                    let out = solve_inner(&table, &self.pairs, &x, &forced, &settings);
                    ok = out.converged;
                    iterations += out.iterations;
                    x = out.x;
                }
                _ => {
                    let (eq, rhs) = forced_rows(&table, &forced);
                    let (xn, conv) = newton_equalities(&x, &eq, &rhs, 100, self.config.step_tol)
                        .ok_or(OptimizeError::Singular { u: pu, v: pv })?;
                    ok = conv;
                    iterations += 1;
                    x = xn;
                }
            }
            last = Some((cluster, table));
        }
        let (cluster, table) = last.expect("path is never empty");
        let result = self.finish(&cluster, &table, &x, variant, ok, iterations)?;
        Ok(Solved { u, v, x, result })
    }

    fn finish(
        &self,
        cluster: &Cluster<f64>,
        table: &FacetTable,
        x: &DVector<f64>,
        variant: Variant,
        solver_ok: bool,
        iterations: usize,
    ) -> Result<PackingResult, OptimizeError> {
        finish(cluster, table, &self.pairs, x, variant, solver_ok, iterations, &self.config)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cluster: &Cluster<f64>,
    table: &FacetTable,
    pairs: &[PairId],
    x: &DVector<f64>,
    variant: Variant,
    solver_ok: bool,
    iterations: usize,
    config: &OptimizerConfig,
) -> Result<PackingResult, OptimizeError> {
    let basis = basis_of(x.as_slice());
    let volume = basis.volume()?;
    debug_assert!((volume - cell_volume(x.as_slice())).abs() < 1e-9);
    let cutoff = config.cutoff.unwrap_or_else(|| default_cutoff(cluster));
    let penetration = (-min_gap(table, pairs, x)).max(0.0);
    Ok(PackingResult {
        params: cluster.params,
        variant,
        basis,
        volume,
        density: density(volume)?,
        active_contacts: classify_with_table(table, &basis, cutoff, ACTIVE_TOL),
        converged: solver_ok && penetration <= config.constraint_tol,
        iterations,
        max_penetration: penetration,
    })
}

/// Minimizes the cell volume for `cluster`.
///
/// With the symmetric-packing start, or for any forced variant, the solve
/// follows the optimal contact structure from the symmetric cluster. An
/// explicit start runs a plain local descent constrained by non-overlap.
pub fn optimize_lattice(
    cluster: &Cluster<f64>,
    init: InitialBasis,
    config: &OptimizerConfig,
) -> Result<PackingResult, OptimizeError> {
    let (u, v) = (cluster.params.u, cluster.params.v);
    let result = match (config.variant, init) {
        (Variant::Free, InitialBasis::Explicit(b)) => {
            let (cluster, table) = setup(u, v)?;
            let pairs = box_pairs(2, 1);
            let x0 = DVector::from_column_slice(&b.to_array());
            let start_gap = min_gap(&table, &pairs, &x0);
            if start_gap < -0.5 {
                return Err(OptimizeError::InfeasibleStart(-start_gap));
            }
            let out = solve_inner(&table, &pairs, &x0, &[], &config.inner_settings());
            finish(&cluster, &table, &pairs, &out.x, Variant::Free, out.converged, out.iterations, config)?
        }
        _ => Family::discover(config)?.solve(u, v, config.variant, None)?.result,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(OptimizeError::NotConverged(Box::new(result)))
    }
}

/// Density of `variant` at `params`; failures come back as a non-converged
/// sample rather than an error.
pub fn virtual_density(family: &Family, params: &SwivelParams<f64>, variant: Variant) -> DensitySample {
    match family.solve(params.u, params.v, variant, None) {
        Ok(s) => DensitySample::from_result(&s.result),
        Err(_) => DensitySample::failed(params.u, params.v, variant),
    }
}
