//! Density over a regular grid of the parameter square.

use rayon::prelude::*;

use super::family::Family;
use super::{DensitySample, OptimizeError, Variant};
use crate::cluster::max_param;

/// `n` evenly spaced values spanning `[-1/9, 1/9]`.
pub fn grid_axis(n: usize) -> Vec<f64> {
    let m = max_param::<f64>();
    (0..n)
        .map(|i| -m + 2.0 * m * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

/// Samples `variant` on an `n x n` grid, row-major in `u` then `v`.
///
/// Rows run in parallel. Each row continues from the reference packing to
/// its first point and then walks along the row, so every solve starts
/// from a neighbor one grid step away.
pub fn sweep(family: &Family, grid_n: usize, variant: Variant) -> Result<Vec<DensitySample>, OptimizeError> {
    if grid_n < 2 {
        return Err(OptimizeError::GridTooSmall(grid_n));
    }
    let axis = grid_axis(grid_n);
    let rows: Vec<Vec<DensitySample>> = axis
        .par_iter()
        .map(|&u| {
            let mut warm = None;
            axis.iter()
                .map(|&v| {
                    let start = warm.as_ref().map(|(a, b, x)| (*a, *b, x));
                    match family.solve(u, v, variant, start) {
                        Ok(s) => {
                            let sample = DensitySample::from_result(&s.result);
                            warm = Some((u, v, s.x));
                            sample
                        }
                        Err(_) => {
                            warm = None;
                            DensitySample::failed(u, v, variant)
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
