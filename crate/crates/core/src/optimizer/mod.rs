//! Lattice optimization: the inner volume minimization for a fixed cluster,
//! the forced-contact variants, the outer search over swivel parameters and
//! density sweeps.

mod active_set;
mod family;
mod inner;
pub mod objective;
mod outer;
mod sweep;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use active_set::{
    minimize_volume, restore_feasibility, ActiveSetOutcome, ActiveSetSettings, ActiveSetStatus,
    LinearConstraints,
};
pub use family::{optimize_lattice, virtual_density, Family, Solved};
pub use inner::{forced_rows, min_gap, newton_equalities, solve_inner, FrozenContact, InnerOutcome, InnerSettings};
pub use outer::{maximize_density, Optimum};
pub use sweep::{grid_axis, sweep};

use crate::cluster::{ClusterError, SwivelParams};
use crate::contacts::ContactSet;
use crate::packing::{LatticeBasis, PackingError};

/// Which contacts are held at zero gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// The ten always-active contacts as equalities plus non-overlap of
    /// every pair as inequalities: the actual density function.
    Free,
    /// Equalities only, no overlap check during the solve.
    G,
    Ga,
    Gb,
    Gab,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Free, Variant::G, Variant::Ga, Variant::Gb, Variant::Gab];
    pub const VIRTUAL: [Variant; 4] = [Variant::G, Variant::Ga, Variant::Gb, Variant::Gab];

    /// Indices into `[H_a, H_b]` forced on top of the ten base contacts.
    pub fn extra_h(self) -> &'static [usize] {
        match self {
            Variant::Free | Variant::G => &[],
            Variant::Ga => &[0],
            Variant::Gb => &[1],
            Variant::Gab => &[0, 1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Free => "free",
            Variant::G => "G",
            Variant::Ga => "Ga",
            Variant::Gb => "Gb",
            Variant::Gab => "Gab",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = OptimizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| OptimizeError::UnknownVariant(s.to_string()))
    }
}

/// Starting basis of the inner solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialBasis {
    /// Continue from the symmetric packing of the symmetric cluster.
    SymParadigm,
    /// Local descent from the given basis, constrained by non-overlap only.
    Explicit(LatticeBasis<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Active-set iterations per facet-selection round.
    pub max_iterations: usize,
    /// Facet re-selection rounds per inner solve.
    pub max_rounds: usize,
    /// Largest penetration accepted as feasible.
    pub constraint_tol: f64,
    /// Newton step length below which equality solves stop.
    pub step_tol: f64,
    /// Largest move in `(u, v)` between warm-started solves.
    pub continuation_step: f64,
    pub variant: Variant,
    pub init: InitialBasis,
    /// Neighbor cutoff for contact classification; `None` uses the default.
    pub cutoff: Option<f64>,
    /// Outer search: start point, initial simplex size, tolerance on the
    /// spread of simplex volumes, iteration cap.
    pub outer_start: (f64, f64),
    pub outer_step: f64,
    pub outer_tol: f64,
    pub outer_max_iterations: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            max_rounds: 20,
            constraint_tol: 1e-7,
            step_tol: 1e-13,
            continuation_step: 0.01,
            variant: Variant::Free,
            init: InitialBasis::SymParadigm,
            cutoff: None,
            outer_start: (0.0, 0.0),
            outer_step: 0.02,
            outer_tol: 1e-13,
            outer_max_iterations: 400,
        }
    }
}

impl OptimizerConfig {
    pub fn inner_settings(&self) -> InnerSettings {
        InnerSettings {
            active: ActiveSetSettings {
                max_iterations: self.max_iterations,
                ..ActiveSetSettings::default()
            },
            max_rounds: self.max_rounds,
            ..InnerSettings::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingResult {
    pub params: SwivelParams<f64>,
    pub variant: Variant,
    pub basis: LatticeBasis<f64>,
    pub volume: f64,
    pub density: f64,
    pub active_contacts: ContactSet,
    pub converged: bool,
    pub iterations: usize,
    /// Largest penetration over all near pairs, `0` when overlap-free.
    pub max_penetration: f64,
}

/// One point of a density surface.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySample {
    pub u: f64,
    pub v: f64,
    pub variant: Variant,
    pub density: f64,
    pub volume: f64,
    /// The solve converged and the packing is overlap-free.
    pub converged: bool,
    pub active_labels: Vec<String>,
}

impl DensitySample {
    pub fn from_result(r: &PackingResult) -> Self {
        Self {
            u: r.params.u,
            v: r.params.v,
            variant: r.variant,
            density: r.density,
            volume: r.volume,
            converged: r.converged,
            active_labels: r.active_contacts.labels().iter().map(|l| l.to_string()).collect(),
        }
    }

    pub fn failed(u: f64, v: f64, variant: Variant) -> Self {
        Self {
            u,
            v,
            variant,
            density: f64::NAN,
            volume: f64::NAN,
            converged: false,
            active_labels: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error("unknown variant `{0}` (expected free, G, Ga, Gb or Gab)")]
    UnknownVariant(String),
    #[error("reference packing has an unexpected contact structure: {0}")]
    ReferenceMismatch(String),
    #[error("initial basis overlaps too much (penetration {0:.3e})")]
    InfeasibleStart(f64),
    #[error("forced contact equations are singular at u = {u}, v = {v}")]
    Singular { u: f64, v: f64 },
    #[error("solve did not converge (best density {})", .0.density)]
    NotConverged(Box<PackingResult>),
    #[error("sweep grid needs at least 2 points per axis, got {0}")]
    GridTooSmall(usize),
    #[error("outer search failed: {0}")]
    Outer(String),
}
