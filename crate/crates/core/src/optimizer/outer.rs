//! Outer maximization of the density over the swivel parameters.
//!
//! The density is continuous but only piecewise smooth in `(u, v)`, so the
//! search is derivative-free. Every inner solve warm-starts from the nearest
//! parameter pair solved so far, which keeps the solve on the same contact
//! structure and makes an evaluation cost a few continuation steps.

use std::sync::Mutex;

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;

use super::family::{Family, Solved};
use super::{OptimizeError, OptimizerConfig, PackingResult, Variant};
use crate::cluster::max_param;

/// Cost returned outside the parameter square or when a solve fails.
const PENALTY: f64 = 1e9;

#[derive(Debug, Clone)]
pub struct Optimum {
    pub u: f64,
    pub v: f64,
    pub result: PackingResult,
    /// Number of inner solves performed.
    pub evaluations: usize,
}

struct DensityCost<'a> {
    family: &'a Family,
    variant: Variant,
    cache: Mutex<Vec<Solved>>,
    bound: f64,
}

impl DensityCost<'_> {
    fn solve(&self, u: f64, v: f64) -> Result<Solved, OptimizeError> {
        let warm = {
            let cache = self.cache.lock().expect("cache lock");
            cache
                .iter()
                .min_by(|a, b| {
                    let da = (a.u - u).hypot(a.v - v);
                    let db = (b.u - u).hypot(b.v - v);
                    da.total_cmp(&db)
                })
                .map(|s| (s.u, s.v, s.x.clone()))
        };
        let solved = self
            .family
            .solve(u, v, self.variant, warm.as_ref().map(|(a, b, x)| (*a, *b, x)))?;
        self.cache.lock().expect("cache lock").push(solved.clone());
        Ok(solved)
    }
}

impl CostFunction for DensityCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        let (u, v) = (p[0], p[1]);
        if u.abs() > self.bound || v.abs() > self.bound {
            return Ok(PENALTY);
        }
        Ok(match self.solve(u, v) {
            Ok(s) if s.result.converged => -s.result.density,
            _ => PENALTY,
        })
    }
}

/// Maximizes the density of `config.variant` over the parameter square with
/// a Nelder-Mead search.
pub fn maximize_density(family: &Family, config: &OptimizerConfig) -> Result<Optimum, OptimizeError> {
    let (u0, v0) = config.outer_start;
    let h = config.outer_step;
    let problem = DensityCost {
        family,
        variant: config.variant,
        cache: Mutex::new(Vec::new()),
        bound: max_param::<f64>(),
    };
    let simplex = vec![vec![u0, v0], vec![u0 + h, v0], vec![u0, v0 + h]];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(config.outer_tol)
        .map_err(|e| OptimizeError::Outer(e.to_string()))?;
    let res = Executor::new(problem, solver)
        .configure(|s| s.max_iters(config.outer_max_iterations))
        .run()
        .map_err(|e| OptimizeError::Outer(e.to_string()))?;
    let best = res
        .state()
        .get_best_param()
        .cloned()
        .ok_or_else(|| OptimizeError::Outer("no point evaluated".into()))?;
    let problem = res.problem.problem.expect("problem is returned");
    let solved = problem.solve(best[0], best[1])?;
    let evaluations = problem.cache.lock().expect("cache lock").len();
    Ok(Optimum {
        u: best[0],
        v: best[1],
        result: solved.result,
        evaluations,
    })
}
