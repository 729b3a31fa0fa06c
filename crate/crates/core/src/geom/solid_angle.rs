use std::fmt;
use std::str::FromStr;

use super::GeomError;

/// Local arrangement of regular tetrahedra around a shared edge or vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingKind {
    Edge,
    Vertex,
}

impl FromStr for RingKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(Self::Edge),
            "vertex" => Ok(Self::Vertex),
            _ => Err(GeomError::Degenerate("ring kind must be `edge` or `vertex`")),
        }
    }
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Edge => "edge",
            Self::Vertex => "vertex",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSolidAngle {
    /// Steradians subtended by the tetrahedra.
    pub total: f64,
    /// `total / 4π`.
    pub local_density: f64,
}

/// Solid angle of `count` regular tetrahedra sharing an edge (each
/// contributes its dihedral lune `2 acos(1/3)`) or a vertex (each contributes
/// `3 acos(1/3) - π`).
pub fn ring_solid_angle(kind: RingKind, count: u32) -> RingSolidAngle {
    let dihedral = (1.0f64 / 3.0).acos();
    let per = match kind {
        RingKind::Edge => 2.0 * dihedral,
        RingKind::Vertex => 3.0 * dihedral - std::f64::consts::PI,
    };
    let total = f64::from(count) * per;
    RingSolidAngle {
        total,
        local_density: total / (4.0 * std::f64::consts::PI),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_around_an_edge() {
        let r = ring_solid_angle(RingKind::Edge, 5);
        assert!((r.total - 12.309594173408).abs() < 1e-11);
        assert!((r.local_density - 0.979566380077).abs() < 1e-11);
    }

    #[test]
    fn twenty_around_a_vertex() {
        let r = ring_solid_angle(RingKind::Vertex, 20);
        assert!((r.total - 11.025711968651).abs() < 1e-11);
        assert!((r.local_density - 0.877398280459).abs() < 1e-11);
    }

    #[test]
    fn empty_ring() {
        let r = ring_solid_angle(RingKind::Edge, 0);
        assert_eq!((r.total, r.local_density), (0.0, 0.0));
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!("face".parse::<RingKind>().is_err());
        assert_eq!("vertex".parse::<RingKind>().unwrap(), RingKind::Vertex);
    }
}
