//! Separating-plane certificates for whole packings, the closed-form
//! symmetric packing and reference densities.
//!
//! A certificate is a plane with every vertex of one half-cluster on its
//! negative side and every vertex of the other on its positive side.
//! Checking one needs nothing but dot products, so [`recheck`] rebuilds the
//! bodies from the cluster parameters and re-evaluates each plane without
//! touching the optimizer or the separation search that produced it.

mod constants;
mod file;
mod sym;

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

pub use constants::{reference_constants, ReferenceConstant, OPTIMUM_DENSITY};
pub use file::{fmt_sig, parse_certificates, write_certificates, CERT_HEADER};
pub use sym::{build_sym_packing, sym_basis, sym_coords, SymPacking};

use crate::cluster::{build_cluster, Cluster, ClusterError, SwivelParams};
use crate::geom::signed_separation;
use crate::packing::{canonical_pairs, enumerate_neighbors, instantiate, LatticeBasis, PackingError, PairId};
use crate::{ConvexBody, Mat3, Plane, Vec3};

/// Penetration beyond which a pair counts as overlapping.
pub const CERT_TOL: f64 = 1e-7;
/// Allowed disagreement between stored and recomputed margins.
pub const RECHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error("certificate line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// A separating plane for one half-cluster pair.
///
/// `margin_a` is the smallest distance of body A's vertices behind the
/// plane and `margin_b` minus the smallest distance of body B's vertices in
/// front of it, so a valid certificate has `margin_a >= 0 >= margin_b` and
/// the clearance between the bodies is `margin_a - margin_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub pair: PairId,
    pub plane: Plane,
    pub margin_a: f64,
    pub margin_b: f64,
}

impl Certificate {
    pub fn clearance(&self) -> f64 {
        self.margin_a - self.margin_b
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.margin_a >= -tol && self.margin_b <= tol
    }
}

fn margins(plane: &Plane, a: &ConvexBody, b: &ConvexBody) -> (f64, f64) {
    let margin_a = a
        .vertices
        .iter()
        .map(|&p| -plane.signed_distance(p))
        .fold(f64::INFINITY, f64::min);
    let margin_b = b
        .vertices
        .iter()
        .map(|&p| -plane.signed_distance(p))
        .fold(f64::NEG_INFINITY, f64::max);
    (margin_a, margin_b)
}

/// Certificates for a whole packing plus everything needed to re-check
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub params: SwivelParams<f64>,
    pub basis: LatticeBasis<f64>,
    pub cutoff: f64,
    pub tolerance: f64,
    pub volume: f64,
    pub density: f64,
    /// One per canonical pair within the cutoff, failures included.
    pub certificates: Vec<Certificate>,
    /// Pairs penetrating by more than `tolerance`.
    pub failures: Vec<PairId>,
    /// Largest translation length among certified pairs.
    pub certified_shell: f64,
}

impl CertificationReport {
    pub fn is_certified(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn max_penetration(&self) -> f64 {
        self.certificates
            .iter()
            .map(|c| -c.clearance())
            .fold(0.0, f64::max)
    }
}

/// Origin half-cluster bodies and, per canonical pair within `cutoff`, the
/// placed partner body.
fn pair_bodies(cluster: &Cluster<f64>, basis: &LatticeBasis<f64>, cutoff: f64) -> Vec<(PairId, ConvexBody, ConvexBody)> {
    let placed = instantiate(cluster, basis, cutoff);
    let pairs: BTreeSet<PairId> = canonical_pairs(&enumerate_neighbors(basis, cutoff)).into_iter().collect();
    let origin = &placed[..2];
    let mut out = Vec::new();
    for b in &placed[2..] {
        for a in origin {
            let id = PairId::new(b.coset, b.coords, a.source, b.source);
            if pairs.contains(&id) {
                out.push((id, a.hull.clone(), b.hull.clone()));
            }
        }
    }
    out.sort_by_key(|(id, _, _)| *id);
    out
}

/// Separating-plane certificates for every canonical half-cluster pair
/// within `cutoff`. Pairs penetrating by more than `tol` are listed as
/// failures; their certificates carry the negative margins.
pub fn certify(
    cluster: &Cluster<f64>,
    basis: &LatticeBasis<f64>,
    cutoff: f64,
    tol: f64,
) -> Result<CertificationReport, VerifyError> {
    let bodies = pair_bodies(cluster, basis, cutoff);
    let certificates: Vec<Certificate> = bodies
        .par_iter()
        .map(|(pair, a, b)| {
            let sep = signed_separation(a, b);
            let (margin_a, margin_b) = margins(&sep.witness, a, b);
            Certificate {
                pair: *pair,
                plane: sep.witness,
                margin_a,
                margin_b,
            }
        })
        .collect();
    let failures = certificates
        .iter()
        .filter(|c| c.clearance() < -tol)
        .map(|c| c.pair)
        .collect();
    let certified_shell = certificates
        .iter()
        .filter(|c| c.clearance() >= -tol)
        .map(|c| c.pair.translation(basis).norm())
        .fold(0.0, f64::max);
    let volume = basis.volume()?;
    Ok(CertificationReport {
        params: cluster.params,
        basis: *basis,
        cutoff,
        tolerance: tol,
        volume,
        density: 48.0 / volume,
        certificates,
        failures,
        certified_shell,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecheckIssue {
    /// A pair within the cutoff has no certificate.
    Missing(PairId),
    /// A certificate names a pair outside the cutoff or twice.
    Unexpected(PairId),
    MarginMismatch { pair: PairId, stored: (f64, f64), recomputed: (f64, f64) },
    /// The plane does not separate the pair within the tolerance.
    Violated { pair: PairId, margin_a: f64, margin_b: f64 },
}

/// Re-evaluates every certificate of `report` from scratch: the cluster is
/// rebuilt from its parameters and each plane is tested against the placed
/// vertices. Returns every problem found; empty means the packing is
/// certified.
pub fn recheck(report: &CertificationReport) -> Result<Vec<RecheckIssue>, VerifyError> {
    let cluster = build_cluster(report.params, 1)?;
    let bodies = pair_bodies(&cluster, &report.basis, report.cutoff);
    let mut issues = Vec::new();
    let mut seen = BTreeSet::new();
    for cert in &report.certificates {
        if !seen.insert(cert.pair) {
            issues.push(RecheckIssue::Unexpected(cert.pair));
            continue;
        }
        let Some((_, a, b)) = bodies.iter().find(|(id, _, _)| *id == cert.pair) else {
            issues.push(RecheckIssue::Unexpected(cert.pair));
            continue;
        };
        let (ma, mb) = margins(&cert.plane, a, b);
        if (ma - cert.margin_a).abs() > RECHECK_TOL || (mb - cert.margin_b).abs() > RECHECK_TOL {
            issues.push(RecheckIssue::MarginMismatch {
                pair: cert.pair,
                stored: (cert.margin_a, cert.margin_b),
                recomputed: (ma, mb),
            });
        }
        if !(ma >= -report.tolerance && mb <= report.tolerance) {
            issues.push(RecheckIssue::Violated {
                pair: cert.pair,
                margin_a: ma,
                margin_b: mb,
            });
        }
    }
    for (id, _, _) in &bodies {
        if !seen.contains(id) {
            issues.push(RecheckIssue::Missing(*id));
        }
    }
    Ok(issues)
}

/// Image of a packing basis under an isometry `m` of the symmetric cluster.
///
/// Positive clusters map to positive clusters, so the image lattice is
/// `m L`. For isometries that flip `z` the roles of `c` and `d` swap so the
/// upper offset still points up; `a` and `b` swap when needed to keep the
/// cell volume positive.
pub fn transform_basis(basis: &LatticeBasis<f64>, m: &Mat3) -> LatticeBasis<f64> {
    let flips_z = m.mul_vec(Vec3::from_f64(0.0, 0.0, 1.0)).z < 0.0;
    let (a, b) = (m.mul_vec(basis.a), m.mul_vec(basis.b));
    let (c, d) = if flips_z {
        (m.mul_vec(basis.d), m.mul_vec(basis.c))
    } else {
        (m.mul_vec(basis.c), m.mul_vec(basis.d))
    };
    let out = LatticeBasis::new(a, b, c, d);
    if out.generator_matrix().det() < 0.0 {
        LatticeBasis::new(b, a, c, d)
    } else {
        out
    }
}
