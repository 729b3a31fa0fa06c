//! Reference values and independent oracles shared by the
//! integration tests.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tetrapack::geom::Separation;
use tetrapack::packing::LatticeBasis;
use tetrapack::{ConvexBody, Vec3};

/// Swivel parameters of the densest packing.
pub const OPT_UV: (f64, f64) = (-0.034789016702, 0.089604971413);
pub const OPT_VOLUME: f64 = 61.647870634123;
pub const OPT_DENSITY: f64 = 0.778615700855;

/// Point where all four virtual density surfaces meet, and its density.
pub const TANGENCY_UV: (f64, f64) = (-0.037320921073, 0.033926596665);
pub const TANGENCY_DENSITY: f64 = 0.778365087767;

pub const SYM_VOLUME: f64 = 61.846569901642;
pub const SYM_DENSITY: f64 = 0.776114181859;

/// Rim points o, p, q, r, s of the upper half at the optimum.
pub const OPT_UPPER_RIM: [[f64; 3]; 5] = [
    [-1.061384364770, 1.061384364770, -0.935697925928],
    [-1.644260072209, 1.644260072209, 1.769946511051],
    [-0.034789016702, 0.034789016702, 3.448995599962],
    [1.621067394407, -1.621067394407, 1.862717222257],
    [1.115500612974, -1.115500612974, -0.873850785124],
];

/// Rim points o, p, q, r, s of the lower half at the optimum.
pub const OPT_LOWER_RIM: [[f64; 3]; 5] = [
    [-1.156897066820, -1.156897066820, 0.822958681256],
    [-1.600938143111, -1.600938143111, -1.934876528675],
    [0.089604971413, 0.089604971413, -3.446209700372],
    [1.660674790719, 1.660674790719, -1.695929938240],
    [1.017511555733, 1.017511555733, 0.982256408212],
];

/// Lattice vectors of the densest packing.
pub fn opt_basis() -> LatticeBasis<f64> {
    LatticeBasis::new(
        Vec3::from_f64(1.286101228632, 0.200477756509, 0.117304750804),
        Vec3::from_f64(-0.216654244567, 1.293299854677, 0.064005626691),
        Vec3::from_f64(1.049828831839, 0.572626599359, 4.643104387948),
        Vec3::from_f64(-0.331247602500, 1.312711170924, -4.452573714586),
    )
}

/// Printed reference densities and solid angles.
pub const PRINTED: [(&str, f64); 6] = [
    ("groemer", 0.367346938775),
    ("tetrahelix", 0.531273435694),
    ("sphere_hcp", 0.740480489693),
    ("e5_solid_angle", 12.309594173408),
    ("e5_local", 0.979566380077),
    ("v20_solid_angle", 11.025711968651),
];

pub const V20_LOCAL: f64 = 0.877398280459;

/// `(i, j, k)` of the symmetric packing in plain double precision.
pub fn sym_coords_f64() -> (f64, f64, f64) {
    let r6 = 6.0f64.sqrt();
    ((106.0 * r6 - 168.0) / 71.0, (42.0 * r6 - 88.0) / 71.0, (238.0 * r6 - 262.0) / 71.0)
}

/// `det[2a, 2b, c - d]` for a square-layer basis, expanded by hand.
pub fn sym_volume_f64() -> f64 {
    let (i, j, k) = sym_coords_f64();
    8.0 * k * (i * i + j * j)
}

/// Cell volume `det[2a, 2b, c - d]` by cofactor expansion.
pub fn det_volume(x: &[f64; 12]) -> f64 {
    let g0 = [2.0 * x[0], 2.0 * x[1], 2.0 * x[2]];
    let g1 = [2.0 * x[3], 2.0 * x[4], 2.0 * x[5]];
    let g2 = [x[6] - x[9], x[7] - x[10], x[8] - x[11]];
    g0[0] * (g1[1] * g2[2] - g1[2] * g2[1]) - g0[1] * (g1[0] * g2[2] - g1[2] * g2[0])
        + g0[2] * (g1[0] * g2[1] - g1[1] * g2[0])
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let p = Vec3::from_f64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = p.norm();
        if n > 0.1 && n <= 1.0 {
            return p * (1.0 / n);
        }
    }
}

/// Random points of a convex body: its vertices, points on its edges and
/// random convex combinations.
pub fn sample_points(body: &ConvexBody, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    let mut out = body.vertices.clone();
    for &(i, j) in &body.edges {
        let t: f64 = rng.gen();
        out.push(body.vertices[i] * (1.0 - t) + body.vertices[j] * t);
    }
    while out.len() < n {
        let w: Vec<f64> = body.vertices.iter().map(|_| -rng.gen::<f64>().ln()).collect();
        let total: f64 = w.iter().sum();
        let p = body
            .vertices
            .iter()
            .zip(&w)
            .fold(Vec3::zeros(), |acc, (&v, &wi)| acc + v * (wi / total));
        out.push(p);
    }
    out
}

/// `min_B n·b - max_A n·a`: how far the bodies are apart along `n`.
pub fn support_gap(a: &ConvexBody, b: &ConvexBody, n: Vec3) -> f64 {
    let hi_a = a.vertices.iter().map(|p| n.dot(*p)).fold(f64::NEG_INFINITY, f64::max);
    let lo_b = b.vertices.iter().map(|p| n.dot(*p)).fold(f64::INFINITY, f64::min);
    lo_b - hi_a
}

/// Checks a separation result against random sampling of both bodies.
///
/// The reported gap is the largest support gap over the scanned axes, so it
/// must equal the support gap along the witness normal, no sampled
/// direction may beat it when the bodies overlap, and when it is positive
/// it bounds every sampled point-to-point distance from below and no
/// sampled point of one body may lie inside the other.
pub fn check_separation(a: &ConvexBody, b: &ConvexBody, sep: &Separation<f64>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let tol = 1e-9;
    let n = sep.witness.normal;
    let along = support_gap(a, b, n);
    if (along - sep.gap).abs() > tol {
        return Err(format!("gap {} but support gap along witness {}", sep.gap, along));
    }
    if sep.gap < 0.0 {
        for _ in 0..2000 {
            let d = random_unit(rng);
            let g = support_gap(a, b, d);
            if g > sep.gap + tol {
                return Err(format!("direction {d:?} separates better: {g} > {}", sep.gap));
            }
        }
    }
    let pa = sample_points(a, 400, rng);
    let pb = sample_points(b, 400, rng);
    if sep.gap > tol {
        if let Some(p) = pa.iter().find(|p| b.contains_strictly(**p, tol)) {
            return Err(format!("gap {} but {p:?} lies inside B", sep.gap));
        }
        for p in &pa {
            for q in &pb {
                if p.distance(*q) < sep.gap - tol {
                    return Err(format!("points {p:?} and {q:?} closer than gap {}", sep.gap));
                }
            }
        }
    }
    let common = pa.iter().chain(&pb).any(|p| a.contains_strictly(*p, 1e-6) && b.contains_strictly(*p, 1e-6));
    if common && sep.gap >= 0.0 {
        return Err(format!("gap {} but the interiors share a sampled point", sep.gap));
    }
    Ok(())
}
