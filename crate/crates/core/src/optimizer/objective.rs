//! Cell volume `det[2a, 2b, c - d] = 4 a · (b × e)` with `e = c - d`, as a
//! function of the twelve basis coordinates `x = (a, b, c, d)`.

use nalgebra::{DMatrix, DVector};

use crate::geom::Vector3;
use crate::packing::{Coset, LatticeBasis, PairId};
use crate::Vec3;

pub const DIM: usize = 12;

fn split(x: &[f64]) -> (Vec3, Vec3, Vec3) {
    let v = |i: usize| Vector3::new(x[i], x[i + 1], x[i + 2]);
    (v(0), v(3), v(6) - v(9))
}

pub fn cell_volume(x: &[f64]) -> f64 {
    let (a, b, e) = split(x);
    4.0 * a.dot(b.cross(e))
}

/// Analytic gradient `4 (b×e, e×a, a×b, -a×b)`.
pub fn volume_gradient(x: &[f64]) -> DVector<f64> {
    let (a, b, e) = split(x);
    let ga = b.cross(e) * 4.0;
    let gb = e.cross(a) * 4.0;
    let ge = a.cross(b) * 4.0;
    let mut g = DVector::zeros(DIM);
    for (blk, v) in [ga, gb, ge, -ge].iter().enumerate() {
        for k in 0..3 {
            g[3 * blk + k] = v[k];
        }
    }
    g
}

/// Hessian of the cell volume. The gradient is quadratic, so central
/// differences with unit step are exact.
pub fn volume_hessian(x: &[f64]) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(DIM, DIM);
    let mut y = x.to_vec();
    for k in 0..DIM {
        y[k] = x[k] + 1.0;
        let gp = volume_gradient(&y);
        y[k] = x[k] - 1.0;
        let gm = volume_gradient(&y);
        y[k] = x[k];
        h.set_column(k, &((gp - gm) / 2.0));
    }
    // symmetrize away rounding
    (&h + h.transpose()) / 2.0
}

/// Coefficients `[c0, c1, c2, c3]` of the cubic `α ↦ V(x + α p)`.
pub fn volume_cubic(x: &[f64], p: &[f64]) -> [f64; 4] {
    let c1 = volume_gradient(x).iter().zip(p).map(|(g, q)| g * q).sum();
    let c2 = volume_gradient(p).iter().zip(x).map(|(g, q)| g * q).sum();
    [cell_volume(x), c1, c2, cell_volume(p)]
}

/// Jacobian of the translation `w(x)` of `pair`, contracted with `normal`:
/// the row `r` with `normal · w(x) = r · x`.
pub fn pair_row(pair: &PairId, normal: Vec3) -> [f64; DIM] {
    let n = pair.coords;
    let neg = f64::from(u8::from(pair.coset == Coset::Negative));
    let coef = [2.0 * f64::from(n.i), 2.0 * f64::from(n.j), f64::from(n.k) + neg, -f64::from(n.k)];
    let mut row = [0.0; DIM];
    for (blk, c) in coef.iter().enumerate() {
        for k in 0..3 {
            row[3 * blk + k] = c * normal[k];
        }
    }
    row
}

pub fn basis_of(x: &[f64]) -> LatticeBasis<f64> {
    let mut a = [0.0; DIM];
    a.copy_from_slice(&x[..DIM]);
    LatticeBasis::from_array(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::LatticeCoords;

    const X: [f64; 12] = [1.3, 0.2, 0.1, -0.2, 1.3, 0.06, 1.0, 0.6, 4.6, -0.3, 1.3, -4.4];

    #[test]
    fn volume_matches_basis_determinant() {
        let b = basis_of(&X);
        assert!((cell_volume(&X) - b.volume().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cubic_is_exact() {
        let p: Vec<f64> = (0..12).map(|k| ((k * 7 % 5) as f64 - 2.0) * 0.1).collect();
        let c = volume_cubic(&X, &p);
        for alpha in [0.3, -1.2, 2.5] {
            let y: Vec<f64> = X.iter().zip(&p).map(|(x, q)| x + alpha * q).collect();
            let poly = c[0] + alpha * (c[1] + alpha * (c[2] + alpha * c[3]));
            assert!((poly - cell_volume(&y)).abs() < 1e-10);
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let h = volume_hessian(&X);
        let eps = 1e-6;
        for k in 0..12 {
            let mut y = X;
            y[k] += eps;
            let fd = (volume_gradient(&y) - volume_gradient(&X)) / eps;
            for i in 0..12 {
                assert!((fd[i] - h[(i, k)]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn pair_row_reproduces_translation() {
        let b = basis_of(&X);
        let n = Vec3::new(0.3, -0.5, 0.8);
        for coset in [Coset::Positive, Coset::Negative] {
            let pair = PairId::new(coset, LatticeCoords::new(1, -2, -1), crate::cluster::Side::Upper, crate::cluster::Side::Lower);
            let r = pair_row(&pair, n);
            let lhs: f64 = r.iter().zip(&X).map(|(a, b)| a * b).sum();
            assert!((lhs - n.dot(pair.translation(&b))).abs() < 1e-12);
        }
    }
}
