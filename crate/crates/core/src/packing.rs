//! Layered two-coset packings.
//!
//! Positive clusters sit on the lattice `L = Z·2a + Z·2b + Z·(c - d)` and
//! point-reflected clusters on the coset `c + L` (which equals `d + L`).
//! One lattice cell holds two clusters, 18 tetrahedra of volume 8/3 each,
//! so the density is `48 / det[2a, 2b, c - d]`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cluster::{Cluster, Side};
use crate::geom::{ConvexBody, Mat3, Scalar, Vector3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PackingError {
    #[error("degenerate lattice basis (volume {volume})")]
    Degenerate { volume: f64 },
    #[error("cell volume must be positive, got {0}")]
    NonPositiveVolume(f64),
    #[error("malformed pair id `{0}`")]
    BadPairId(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBasis<T> {
    pub a: Vector3<T>,
    pub b: Vector3<T>,
    pub c: Vector3<T>,
    pub d: Vector3<T>,
}

impl<T: Scalar> LatticeBasis<T> {
    pub fn new(a: Vector3<T>, b: Vector3<T>, c: Vector3<T>, d: Vector3<T>) -> Self {
        Self { a, b, c, d }
    }

    /// Reads `a, b, c, d` from 12 consecutive coordinates.
    pub fn from_array(x: [T; 12]) -> Self {
        let v = |i: usize| Vector3::new(x[i], x[i + 1], x[i + 2]);
        Self::new(v(0), v(3), v(6), v(9))
    }

    pub fn to_array(&self) -> [T; 12] {
        let mut out = [T::zero(); 12];
        for (n, v) in [self.a, self.b, self.c, self.d].iter().enumerate() {
            out[3 * n..3 * n + 3].copy_from_slice(&v.to_array());
        }
        out
    }

    /// The lattice generators `2a, 2b, c - d`.
    pub fn generators(&self) -> [Vector3<T>; 3] {
        let two = T::lit(2.0);
        [self.a * two, self.b * two, self.c - self.d]
    }

    pub fn generator_matrix(&self) -> Mat3<T> {
        let [g0, g1, g2] = self.generators();
        Mat3::from_columns(g0, g1, g2)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn cast<U: Scalar>(&self) -> LatticeBasis<U> {
        LatticeBasis::new(self.a.cast(), self.b.cast(), self.c.cast(), self.d.cast())
    }

    /// Translation of the cluster with the given coset and lattice coordinates.
    pub fn translation(&self, coset: Coset, n: LatticeCoords) -> Vector3<T> {
        let [g0, g1, g2] = self.generators();
        let f = |k: i32| T::from_i32(k).unwrap();
        let w = g0 * f(n.i) + g1 * f(n.j) + g2 * f(n.k);
        match coset {
            Coset::Positive => w,
            Coset::Negative => w + self.c,
        }
    }

    pub fn volume(&self) -> Result<T, PackingError> {
        lattice_volume(self)
    }

    pub fn density(&self) -> Result<T, PackingError> {
        density(lattice_volume(self)?)
    }
}

/// `det[2a, 2b, c - d]`; bases with non-positive or negligible volume are
/// rejected.
pub fn lattice_volume<T: Scalar>(basis: &LatticeBasis<T>) -> Result<T, PackingError> {
    let v = basis.generator_matrix().det();
    let scale = basis
        .generators()
        .iter()
        .map(|g| g.norm())
        .fold(T::one(), |acc, n| acc * n.max(T::one()));
    if !(v > T::geom_tol() * scale) {
        return Err(PackingError::Degenerate {
            volume: v.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(v)
}

/// Packing density `48 / V` of a cell holding 18 tetrahedra.
pub fn density<T: Scalar>(volume: T) -> Result<T, PackingError> {
    if !(volume > T::zero()) {
        return Err(PackingError::NonPositiveVolume(volume.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(T::lit(48.0) / volume)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coset {
    Positive,
    Negative,
}

impl Coset {
    pub fn orientation(self) -> i8 {
        match self {
            Coset::Positive => 1,
            Coset::Negative => -1,
        }
    }

    pub fn sign(self) -> char {
        match self {
            Coset::Positive => '+',
            Coset::Negative => '-',
        }
    }
}

/// Integer coordinates on the generators `2a, 2b, c - d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeCoords {
    pub i: i32,
    pub j: i32,
    pub k: i32,
}

impl LatticeCoords {
    pub const ORIGIN: Self = Self { i: 0, j: 0, k: 0 };

    pub const fn new(i: i32, j: i32, k: i32) -> Self {
        Self { i, j, k }
    }

    pub fn is_origin(&self) -> bool {
        *self == Self::ORIGIN
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.i, -self.j, -self.k)
    }

    /// First non-zero coordinate positive.
    pub fn is_lex_positive(&self) -> bool {
        [self.i, self.j, self.k]
            .iter()
            .find(|&&x| x != 0)
            .is_some_and(|&x| x > 0)
    }
}

impl fmt::Display for LatticeCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.i, self.j, self.k)
    }
}

/// A cluster translate relative to the positive cluster at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<T> {
    pub coset: Coset,
    pub coords: LatticeCoords,
    pub offset: Vector3<T>,
}

fn coord_range<T: Scalar>(center: T, half_width: T) -> std::ops::RangeInclusive<i32> {
    let lo = (center - half_width).ceil().to_i32().unwrap_or(0);
    let hi = (center + half_width).floor().to_i32().unwrap_or(-1);
    lo..=hi
}

/// All cluster translates with offset length at most `cutoff`, excluding the
/// origin cluster itself. Sorted by coset, then `k, j, i`.
pub fn enumerate_neighbors<T: Scalar>(basis: &LatticeBasis<T>, cutoff: T) -> Vec<Neighbor<T>> {
    let [g0, g1, g2] = basis.generators();
    let det = g0.dot(g1.cross(g2));
    // rows of the inverse generator matrix
    let dual = [g1.cross(g2) / det, g2.cross(g0) / det, g0.cross(g1) / det];
    let mut out = Vec::new();
    if !(cutoff >= T::zero()) {
        return out;
    }
    let slack = T::geom_tol();
    for coset in [Coset::Positive, Coset::Negative] {
        let shift = match coset {
            Coset::Positive => Vector3::zeros(),
            Coset::Negative => -basis.c,
        };
        let center = dual.map(|r| r.dot(shift));
        let width = dual.map(|r| r.norm() * cutoff + slack);
        let mut found = Vec::new();
        for k in coord_range(center[2], width[2]) {
            for j in coord_range(center[1], width[1]) {
                for i in coord_range(center[0], width[0]) {
                    let coords = LatticeCoords::new(i, j, k);
                    if coset == Coset::Positive && coords.is_origin() {
                        continue;
                    }
                    let offset = basis.translation(coset, coords);
                    if offset.norm() <= cutoff + slack {
                        found.push(Neighbor { coset, coords, offset });
                    }
                }
            }
        }
        out.extend(found);
    }
    out
}

/// A half-cluster hull placed in the packing.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedHalfCluster<T> {
    pub source: Side,
    pub orientation: i8,
    pub coset: Coset,
    pub coords: LatticeCoords,
    pub translation: Vector3<T>,
    pub hull: ConvexBody<T>,
}

/// The origin cluster's two halves followed by both halves of every
/// neighbor within `cutoff`.
pub fn instantiate<T: Scalar>(
    cluster: &Cluster<T>,
    basis: &LatticeBasis<T>,
    cutoff: T,
) -> Vec<PlacedHalfCluster<T>> {
    let origin = Neighbor {
        coset: Coset::Positive,
        coords: LatticeCoords::ORIGIN,
        offset: Vector3::zeros(),
    };
    std::iter::once(origin)
        .chain(enumerate_neighbors(basis, cutoff))
        .flat_map(|n| {
            Side::BOTH.map(|side| {
                let base = &cluster.half(side).hull;
                let body = match n.coset {
                    Coset::Positive => base.clone(),
                    Coset::Negative => base.negated(),
                };
                PlacedHalfCluster {
                    source: side,
                    orientation: cluster.orientation * n.coset.orientation(),
                    coset: n.coset,
                    coords: n.coords,
                    translation: n.offset,
                    hull: body.translated(n.offset),
                }
            })
        })
        .collect()
}

/// Default neighbor cutoff: 2.5 times the cluster's circumradius.
pub fn default_cutoff<T: Scalar>(cluster: &Cluster<T>) -> T {
    T::lit(2.5) * cluster.circumradius()
}

/// An unordered pair of half-clusters: side `side_a` of the origin cluster
/// against side `side_b` of the translate `(coset, coords)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairId {
    pub coset: Coset,
    pub coords: LatticeCoords,
    pub side_a: Side,
    pub side_b: Side,
}

impl PairId {
    pub fn new(coset: Coset, coords: LatticeCoords, side_a: Side, side_b: Side) -> Self {
        Self {
            coset,
            coords,
            side_a,
            side_b,
        }
    }

    pub fn translation<T: Scalar>(&self, basis: &LatticeBasis<T>) -> Vector3<T> {
        basis.translation(self.coset, self.coords)
    }

    /// Whether this is the representative of its class under translation
    /// and, for the negative coset, point reflection.
    ///
    /// A positive pair `(s1, s2, w)` is congruent to `(s2, s1, -w)`; a
    /// negative pair `(s1, s2, w)` is congruent to `(s2, s1, w)`.
    pub fn is_canonical(&self) -> bool {
        match self.coset {
            Coset::Positive => {
                !self.coords.is_origin()
                    && match (self.side_a, self.side_b) {
                        (Side::Upper, Side::Lower) => true,
                        (Side::Lower, Side::Upper) => false,
                        _ => self.coords.is_lex_positive(),
                    }
            }
            Coset::Negative => self.side_a <= self.side_b,
        }
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}[{}]",
            self.side_a.letter(),
            self.side_b.letter(),
            self.coset.sign(),
            self.coords
        )
    }
}

impl FromStr for PairId {
    type Err = PackingError;

    /// Parses the `UL+[1,0,0]` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PackingError::BadPairId(s.to_string());
        let side = |c: char| match c {
            'U' => Some(Side::Upper),
            'L' => Some(Side::Lower),
            _ => None,
        };
        let mut chars = s.chars();
        let side_a = chars.next().and_then(side).ok_or_else(bad)?;
        let side_b = chars.next().and_then(side).ok_or_else(bad)?;
        let coset = match chars.next() {
            Some('+') => Coset::Positive,
            Some('-') => Coset::Negative,
            _ => return Err(bad()),
        };
        let inner = chars
            .as_str()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let n: Vec<i32> = inner
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match n[..] {
            [i, j, k] => Ok(Self::new(coset, LatticeCoords::new(i, j, k), side_a, side_b)),
            _ => Err(bad()),
        }
    }
}

/// Canonical half-cluster pairs for a list of translates.
pub fn canonical_pairs<T>(neighbors: &[Neighbor<T>]) -> Vec<PairId> {
    let mut out = Vec::new();
    for n in neighbors {
        for sa in Side::BOTH {
            for sb in Side::BOTH {
                let p = PairId::new(n.coset, n.coords, sa, sb);
                if p.is_canonical() {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Canonical pairs for all translates with `|i|, |j| <= ij_radius` and
/// `|k| <= k_radius`, independent of the metric.
pub fn box_pairs(ij_radius: i32, k_radius: i32) -> Vec<PairId> {
    let mut neighbors: Vec<Neighbor<f64>> = Vec::new();
    for coset in [Coset::Positive, Coset::Negative] {
        for k in -k_radius..=k_radius {
            for j in -ij_radius..=ij_radius {
                for i in -ij_radius..=ij_radius {
                    neighbors.push(Neighbor {
                        coset,
                        coords: LatticeCoords::new(i, j, k),
                        offset: Vector3::zeros(),
                    });
                }
            }
        }
    }
    canonical_pairs(&neighbors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{build_cluster, SwivelParams};

    type V = Vector3<f64>;

    fn optimum_basis() -> LatticeBasis<f64> {
        LatticeBasis::from_array([
            1.286101228632,
            0.200477756509,
            0.117304750804,
            -0.216654244567,
            1.293299854677,
            0.064005626691,
            1.049828831839,
            0.572626599359,
            4.643104387948,
            -0.331247602500,
            1.312711170924,
            -4.452573714586,
        ])
    }

    #[test]
    fn unit_volume() {
        let b = LatticeBasis::new(V::new(1.0, 0.0, 0.0), V::new(0.0, 1.0, 0.0), V::new(0.0, 0.0, 1.0), V::zeros());
        assert_eq!(lattice_volume(&b).unwrap(), 4.0);
    }

    #[test]
    fn optimum_volume_and_density() {
        let v = lattice_volume(&optimum_basis()).unwrap();
        assert!((v - 61.647870634123).abs() < 1e-9);
        assert!((density(61.647870634123f64).unwrap() - 0.778615700855).abs() < 1e-12);
        assert_eq!(density(48.0f64).unwrap(), 1.0);
        assert!(density(0.0f64).is_err());
    }

    #[test]
    fn degenerate_basis_rejected() {
        let b = LatticeBasis::new(V::new(1.0, 0.0, 0.0), V::new(2.0, 0.0, 0.0), V::new(0.0, 0.0, 1.0), V::zeros());
        assert!(matches!(lattice_volume(&b), Err(PackingError::Degenerate { .. })));
    }

    #[test]
    fn array_round_trip() {
        let b = optimum_basis();
        assert_eq!(LatticeBasis::from_array(b.to_array()), b);
    }

    #[test]
    fn zero_cutoff_is_empty() {
        assert!(enumerate_neighbors(&optimum_basis(), 0.0).is_empty());
    }

    #[test]
    fn in_layer_ring() {
        // a square layer with a tall third generator
        let b = LatticeBasis::new(V::new(1.0, 0.0, 0.0), V::new(0.0, 1.0, 0.0), V::new(0.5, 0.5, 10.0), V::new(0.0, 0.0, -10.0));
        let ns = enumerate_neighbors(&b, 2.0 * 2f64.sqrt() + 1e-9);
        let coords: Vec<_> = ns.iter().map(|n| (n.coords.i, n.coords.j)).collect();
        assert_eq!(ns.len(), 8);
        for ij in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)] {
            assert!(coords.contains(&ij));
        }
    }

    #[test]
    fn brute_force_agrees() {
        let b = optimum_basis();
        let cutoff = 9.0;
        let ns = enumerate_neighbors(&b, cutoff);
        let mut brute = 0;
        for coset in [Coset::Positive, Coset::Negative] {
            for i in -8..=8 {
                for j in -8..=8 {
                    for k in -4..=4 {
                        let n = LatticeCoords::new(i, j, k);
                        if coset == Coset::Positive && n.is_origin() {
                            continue;
                        }
                        if b.translation(coset, n).norm() <= cutoff {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(ns.len(), brute);
    }

    #[test]
    fn positive_coset_symmetric() {
        let b = optimum_basis();
        let ns = enumerate_neighbors(&b, 8.0);
        let pos: Vec<_> = ns.iter().filter(|n| n.coset == Coset::Positive).collect();
        for n in &pos {
            assert!(pos.iter().any(|m| m.coords == n.coords.neg()));
        }
    }

    #[test]
    fn cosets_through_c_and_d_coincide() {
        let b = optimum_basis();
        for n in enumerate_neighbors(&b, 8.0).iter().filter(|n| n.coset == Coset::Negative) {
            let [g0, g1, g2] = b.generators();
            let via_d = b.d + g0 * n.coords.i as f64 + g1 * n.coords.j as f64 + g2 * (n.coords.k + 1) as f64;
            assert!(via_d.approx_eq(n.offset, 1e-12));
        }
    }

    #[test]
    fn count_grows_like_ball_volume() {
        let b = optimum_basis();
        let r = 40.0;
        let expected = 2.0 * 4.0 / 3.0 * std::f64::consts::PI * r * r * r / b.volume().unwrap();
        let got = enumerate_neighbors(&b, r).len() as f64;
        assert!((got / expected - 1.0).abs() < 0.05, "{got} vs {expected}");
    }

    #[test]
    fn instances_are_translates() {
        let c = build_cluster(SwivelParams::new(-0.03, 0.08).unwrap(), 1).unwrap();
        let b = optimum_basis();
        let placed = instantiate(&c, &b, 7.0);
        assert_eq!(instantiate(&c, &b, 0.0).len(), 2);
        assert_eq!(placed.len(), 2 * (1 + enumerate_neighbors(&b, 7.0).len()));
        for p in &placed {
            let base = &c.half(p.source).hull;
            let s = f64::from(p.orientation);
            for (got, v) in p.hull.vertices.iter().zip(&base.vertices) {
                assert!(got.approx_eq(*v * s + p.translation, 1e-12));
            }
        }
    }

    #[test]
    fn canonical_pair_rule() {
        let o = LatticeCoords::new(1, -1, 0);
        assert!(PairId::new(Coset::Positive, o, Side::Upper, Side::Upper).is_canonical());
        assert!(!PairId::new(Coset::Positive, o.neg(), Side::Upper, Side::Upper).is_canonical());
        assert!(PairId::new(Coset::Positive, o.neg(), Side::Upper, Side::Lower).is_canonical());
        assert!(!PairId::new(Coset::Positive, o, Side::Lower, Side::Upper).is_canonical());
        assert!(PairId::new(Coset::Negative, LatticeCoords::ORIGIN, Side::Upper, Side::Upper).is_canonical());
        assert!(!PairId::new(Coset::Negative, o, Side::Lower, Side::Upper).is_canonical());
        // 5x5x3 box, positive: 74 non-origin translates; UL all, UU/LL half
        let pairs = box_pairs(2, 1);
        let pos = pairs.iter().filter(|p| p.coset == Coset::Positive).count();
        let neg = pairs.len() - pos;
        assert_eq!(pos, 74 + 37 + 37);
        assert_eq!(neg, 75 * 3);
    }

    #[test]
    fn pair_id_text_round_trip() {
        for p in box_pairs(1, 1) {
            assert_eq!(p.to_string().parse::<PairId>().unwrap(), p);
        }
        for bad in ["", "UX+[0,0,0]", "UL*[0,0,0]", "UL+[0,0]", "UL+0,0,0", "UL+[a,0,0]"] {
            assert!(bad.parse::<PairId>().is_err(), "{bad}");
        }
    }
}
