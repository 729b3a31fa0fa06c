//! Primal active-set method for minimizing the cell volume over linear
//! constraints `E x = e`, `R x >= h`.
//!
//! The objective is a cubic polynomial in `x`, so every line search is
//! solved exactly. Inside the current working set we take a Newton step when
//! the reduced Hessian is positive definite and a steepest-descent or
//! negative-curvature step otherwise.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use super::objective::{volume_cubic, volume_gradient, volume_hessian, DIM};

#[derive(Debug, Clone)]
pub struct LinearConstraints {
    pub eq: DMatrix<f64>,
    pub eq_rhs: DVector<f64>,
    pub ineq: DMatrix<f64>,
    pub ineq_rhs: DVector<f64>,
}

impl LinearConstraints {
    pub fn new(eq: Vec<[f64; DIM]>, eq_rhs: Vec<f64>, ineq: Vec<[f64; DIM]>, ineq_rhs: Vec<f64>) -> Self {
        Self {
            eq: rows_to_matrix(&eq),
            eq_rhs: DVector::from_vec(eq_rhs),
            ineq: rows_to_matrix(&ineq),
            ineq_rhs: DVector::from_vec(ineq_rhs),
        }
    }

    pub fn slack(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.ineq * x - &self.ineq_rhs
    }

    fn stacked(&self, working: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
        let m = self.eq.nrows() + working.len();
        let mut a = DMatrix::zeros(m, DIM);
        let mut b = DVector::zeros(m);
        for r in 0..self.eq.nrows() {
            a.set_row(r, &self.eq.row(r));
            b[r] = self.eq_rhs[r];
        }
        for (k, &i) in working.iter().enumerate() {
            let r = self.eq.nrows() + k;
            a.set_row(r, &self.ineq.row(i));
            b[r] = self.ineq_rhs[i];
        }
        (a, b)
    }
}

pub(crate) fn rows_to_matrix(rows: &[[f64; DIM]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), DIM, |r, c| rows[r][c])
}

/// Orthonormal basis of the null space of `a`, as columns.
pub(crate) fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.nrows() == 0 {
        return DMatrix::identity(DIM, DIM);
    }
    let rows = a.nrows().max(DIM);
    let mut padded = DMatrix::zeros(rows, DIM);
    padded.view_mut((0, 0), (a.nrows(), DIM)).copy_from(a);
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.max();
    let null: Vec<usize> = (0..DIM)
        .filter(|&k| svd.singular_values[k] <= 1e-10 * smax.max(f64::MIN_POSITIVE))
        .collect();
    let mut z = DMatrix::zeros(DIM, null.len());
    for (c, &k) in null.iter().enumerate() {
        z.set_column(c, &vt.row(k).transpose());
    }
    z
}

/// Minimum-norm least-squares solution of `a y = b`.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.nrows() == 0 {
        return DVector::zeros(a.ncols());
    }
    let svd = SVD::new(a.clone(), true, true);
    let eps = 1e-12 * svd.singular_values.max();
    svd.solve(b, eps).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveSetSettings {
    pub max_iterations: usize,
    /// Longest step when no constraint blocks a descent direction.
    pub max_step: f64,
    pub stationarity_tol: f64,
    pub multiplier_tol: f64,
}

impl Default for ActiveSetSettings {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            max_step: 1.0,
            stationarity_tol: 1e-11,
            multiplier_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveSetStatus {
    Converged,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct ActiveSetOutcome {
    pub x: DVector<f64>,
    /// Indices of the inequality rows held as equalities at exit.
    pub working: Vec<usize>,
    pub iterations: usize,
    pub status: ActiveSetStatus,
}

fn min_eigen(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let k = eig.eigenvalues.argmin().0;
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

/// Exact minimizer of the cubic volume along `p` over `[0, alpha_max]`.
fn cubic_step(x: &DVector<f64>, p: &DVector<f64>, alpha_max: f64) -> f64 {
    let [c0, c1, c2, c3] = volume_cubic(x.as_slice(), p.as_slice());
    let f = |t: f64| c0 + t * (c1 + t * (c2 + t * c3));
    // roots of c1 + 2 c2 t + 3 c3 t^2
    let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
    let mut roots = Vec::new();
    if qa.abs() > 1e-300 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * sq);
            roots.push(q / qa);
            if q != 0.0 {
                roots.push(qc / q);
            }
        }
    } else if qb.abs() > 1e-300 {
        roots.push(-qc / qb);
    }
    roots.retain(|t| t.is_finite() && *t > 0.0 && *t < alpha_max);
    // strictly descending on the whole interval: go to the end, even when
    // the interval is too short for the descent to show in f
    if c1 < 0.0 && roots.is_empty() {
        return alpha_max;
    }
    roots
        .into_iter()
        .chain([0.0, alpha_max])
        .min_by(|s, t| f(*s).total_cmp(&f(*t)))
        .unwrap_or(0.0)
}

/// Runs the active-set iteration from a point feasible for the equalities
/// and inequalities (the caller restores feasibility first).
pub fn minimize_volume(
    x0: DVector<f64>,
    cons: &LinearConstraints,
    working: Vec<usize>,
    settings: &ActiveSetSettings,
) -> ActiveSetOutcome {
    let mut x = x0;
    let mut working = working;
    working.sort_unstable();
    working.dedup();
    let n_eq = cons.eq.nrows();
    // after a zero-length step the vertex is degenerate; Bland's rule
    // (lowest index leaves) then prevents cycling
    let mut degenerate = false;
    for it in 0..settings.max_iterations {
        let (a, _) = cons.stacked(&working);
        let z = null_space(&a);
        let g = volume_gradient(x.as_slice());
        let h = volume_hessian(x.as_slice());
        let gnorm = g.norm().max(1.0);
        let (rg, rh) = if z.ncols() > 0 {
            (z.transpose() * &g, z.transpose() * &h * &z)
        } else {
            (DVector::zeros(0), DMatrix::zeros(0, 0))
        };
        let p = if rg.norm() < settings.stationarity_tol * gnorm {
            let lambda = lstsq(&a.transpose(), &g);
            let ineq = lambda.rows(n_eq, working.len());
            if !working.is_empty() {
                let leave = if degenerate {
                    ineq.iter().position(|&l| l < -settings.multiplier_tol)
                } else {
                    let (k, lmin) = ineq.argmin();
                    (lmin < -settings.multiplier_tol).then_some(k)
                };
                if let Some(k) = leave {
                    working.remove(k);
                    continue;
                }
            }
            if z.ncols() == 0 {
                return ActiveSetOutcome { x, working, iterations: it, status: ActiveSetStatus::Converged };
            }
            let (ev, v) = min_eigen(&rh);
            if ev >= -1e-9 {
                return ActiveSetOutcome { x, working, iterations: it, status: ActiveSetStatus::Converged };
            }
            // negative curvature: pick the direction whose cubic term descends
            let d = &z * v;
            let c3 = volume_cubic(x.as_slice(), d.as_slice())[3];
            if c3 > 0.0 { -d } else { d }
        } else {
            let (ev, _) = min_eigen(&rh);
            let step = if ev > 1e-10 {
                rh.clone().cholesky().map(|c| c.solve(&rg)).unwrap_or_else(|| rg.clone())
            } else {
                rg.clone()
            };
            -(&z * step)
        };
        let pn = p.norm();
        if pn == 0.0 {
            return ActiveSetOutcome { x, working, iterations: it, status: ActiveSetStatus::Converged };
        }
        // ratio test
        let rp = &cons.ineq * &p;
        let slack = cons.slack(&x);
        let mut alpha_max = settings.max_step / pn;
        let mut block = None;
        for i in 0..rp.len() {
            if working.binary_search(&i).is_ok() || rp[i] >= -1e-14 * pn {
                continue;
            }
            let ai = slack[i].max(0.0) / -rp[i];
            if ai < alpha_max {
                alpha_max = ai;
                block = Some(i);
            }
        }
        let alpha = cubic_step(&x, &p, alpha_max);
        if alpha == 0.0 && block.is_none() {
            return ActiveSetOutcome { x, working, iterations: it, status: ActiveSetStatus::Converged };
        }
        x += &p * alpha;
        degenerate = alpha == 0.0;
        if let Some(b) = block {
            if alpha >= alpha_max * (1.0 - 1e-12) {
                let pos = working.binary_search(&b).unwrap_err();
                working.insert(pos, b);
            }
        }
    }
    ActiveSetOutcome {
        x,
        working,
        iterations: settings.max_iterations,
        status: ActiveSetStatus::IterationLimit,
    }
}

/// Least-squares projection onto the equalities and the working set,
/// growing the working set with the most violated inequality until none is
/// violated. Returns the projected point and the enlarged working set.
pub fn restore_feasibility(
    x0: DVector<f64>,
    cons: &LinearConstraints,
    working: Vec<usize>,
    max_rounds: usize,
) -> (DVector<f64>, Vec<usize>) {
    let mut x = x0;
    let mut working = working;
    working.sort_unstable();
    working.dedup();
    for _ in 0..max_rounds {
        let (a, b) = cons.stacked(&working);
        if a.nrows() > 0 {
            let r = &b - &a * &x;
            x += lstsq(&a, &r);
        }
        let slack = cons.slack(&x);
        let worst = (0..slack.len())
            .filter(|i| working.binary_search(i).is_err() && slack[*i] < -1e-12)
            .min_by(|i, j| slack[*i].total_cmp(&slack[*j]));
        match worst {
            Some(i) => {
                let pos = working.binary_search(&i).unwrap_err();
                working.insert(pos, i);
            }
            None => break,
        }
    }
    (x, working)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_is_orthogonal_complement() {
        let mut rows = vec![[0.0; DIM]; 3];
        rows[0][0] = 1.0;
        rows[1][1] = 1.0;
        rows[1][2] = 1.0;
        rows[2][0] = 2.0;
        let a = rows_to_matrix(&rows);
        let z = null_space(&a);
        assert_eq!(z.ncols(), 10);
        assert!((&a * &z).norm() < 1e-12);
        assert!((z.transpose() * &z - DMatrix::identity(10, 10)).norm() < 1e-12);
    }

    #[test]
    fn lstsq_min_norm() {
        let mut rows = vec![[0.0; DIM]; 1];
        rows[0][0] = 1.0;
        rows[0][1] = 1.0;
        let y = lstsq(&rows_to_matrix(&rows), &DVector::from_vec(vec![2.0]));
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn box_constrained_cell_shrinks_to_bounds() {
        // a, b, c-d axis aligned; bound each diagonal entry below by 1
        let x0 = DVector::from_vec(vec![3.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, -2.0]);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (idx, sign) in [(0, 1.0), (4, 1.0), (8, 1.0), (11, -1.0)] {
            let mut r = [0.0; DIM];
            r[idx] = sign;
            rows.push(r);
            rhs.push(1.0);
        }
        // fix every off-diagonal coordinate
        let mut eq = Vec::new();
        for k in [1, 2, 3, 5, 6, 7, 9, 10] {
            let mut r = [0.0; DIM];
            r[k] = 1.0;
            eq.push(r);
        }
        let cons = LinearConstraints::new(eq, vec![0.0; 8], rows, rhs);
        let out = minimize_volume(x0, &cons, vec![], &ActiveSetSettings::default());
        assert_eq!(out.status, ActiveSetStatus::Converged);
        let v = super::super::objective::cell_volume(out.x.as_slice());
        assert!((v - 8.0).abs() < 1e-9, "volume {v}");
    }

    #[test]
    fn restart_at_a_degenerate_vertex() {
        // same box, but every bound is already tight and doubled by a
        // redundant copy; a restart must not stall on the zero-slack rows
        let x0 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, -0.5]);
        let mut rows = Vec::new();
        for (idx, sign) in [(0, 1.0), (4, 1.0), (8, 1.0), (11, -1.0)] {
            let mut r = [0.0; DIM];
            r[idx] = sign;
            rows.push(r);
            rows.push(r);
        }
        let mut eq = Vec::new();
        for k in [1, 2, 3, 5, 6, 7, 9, 10] {
            let mut r = [0.0; DIM];
            r[k] = 1.0;
            eq.push(r);
        }
        let rhs = vec![1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5];
        let cons = LinearConstraints::new(eq, vec![0.0; 8], rows, rhs);
        let out = minimize_volume(x0.clone(), &cons, vec![], &ActiveSetSettings::default());
        assert_eq!(out.status, ActiveSetStatus::Converged);
        assert!(out.iterations < 20);
        assert!((&out.x - x0).norm() < 1e-12);
    }

    #[test]
    fn short_descending_interval_is_taken_whole() {
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0]);
        let mut p = DVector::zeros(DIM);
        p[0] = -1.0;
        assert_eq!(cubic_step(&x, &p, 1e-17), 1e-17);
        assert_eq!(cubic_step(&x, &-p.clone(), 1e-17), 0.0);
    }
}
