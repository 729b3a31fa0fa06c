//! Contact equations between neighboring half-clusters.
//!
//! Two touching convex polytopes meet along a facet of their Minkowski
//! difference. Its supporting features name the contact: a pair of edges
//! crossing transversally, or two parallel faces lying flat on each other.
//! Contacts are labeled by the lattice offset of the neighbor, following
//! the `G` (always active) and `H` (extra in-layer) naming scheme.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::cluster::{Cluster, Side};
use crate::geom::{minkowski_facets, ConvexBody, MinkowskiFacet, Vector3};
use crate::packing::{canonical_pairs, enumerate_neighbors, Coset, LatticeBasis, PairId};
use crate::Vec3;

/// Tolerance below which a gap counts as an active contact.
pub const ACTIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContactError {
    #[error("edges are parallel; their common normal is undefined")]
    ParallelEdges,
    #[error("faces are not parallel (normal misalignment {0:.3e})")]
    NonParallelFaces(f64),
    #[error("face needs at least 3 vertices, got {0}")]
    ShortFace(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContactKind {
    EdgeEdge,
    FaceFace,
    /// Any other feature combination, e.g. a vertex on a face.
    Mixed,
}

impl fmt::Display for ContactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContactKind::EdgeEdge => "edge_edge",
            ContactKind::FaceFace => "face_face",
            ContactKind::Mixed => "mixed",
        })
    }
}

/// Supporting feature of a half-cluster hull, by vertex index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Feature {
    Vertex(usize),
    Edge(usize, usize),
    /// Outward counter-clockwise cycle.
    Face(Vec<usize>),
}

impl Feature {
    fn from_support(body: &ConvexBody<f64>, support: &[usize]) -> Self {
        match support {
            [v] => Feature::Vertex(*v),
            [i, j] => Feature::Edge(*i, *j),
            _ => {
                let mut want = support.to_vec();
                want.sort_unstable();
                let cycle = body.faces.iter().find(|f| {
                    let mut s = (*f).clone();
                    s.sort_unstable();
                    s == want
                });
                Feature::Face(cycle.cloned().unwrap_or(want))
            }
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match self {
            Feature::Vertex(v) => vec![*v],
            Feature::Edge(i, j) => vec![*i, *j],
            Feature::Face(c) => c.clone(),
        }
    }
}

/// Lattice offset of a contact partner: `i·2a + j·2b + k·(c - d)` plus `c`
/// or `d` for the negative layers above or below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeOffset {
    pub two_a: i32,
    pub two_b: i32,
    pub c_minus_d: i32,
    pub base: OffsetBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OffsetBase {
    None,
    C,
    D,
}

impl LatticeOffset {
    pub fn of(pair: &PairId) -> Self {
        let n = pair.coords;
        let (base, cd) = match pair.coset {
            Coset::Positive => (OffsetBase::None, n.k),
            Coset::Negative if n.k < 0 => (OffsetBase::D, n.k + 1),
            Coset::Negative => (OffsetBase::C, n.k),
        };
        Self {
            two_a: n.i,
            two_b: n.j,
            c_minus_d: cd,
            base,
        }
    }

    pub fn translation(&self, basis: &LatticeBasis<f64>) -> Vec3 {
        let base = match self.base {
            OffsetBase::None => Vec3::zeros(),
            OffsetBase::C => basis.c,
            OffsetBase::D => basis.d,
        };
        let [g0, g1, g2] = basis.generators();
        base + g0 * f64::from(self.two_a) + g1 * f64::from(self.two_b) + g2 * f64::from(self.c_minus_d)
    }
}

impl fmt::Display for LatticeOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        match self.base {
            OffsetBase::None => {}
            OffsetBase::C => out.push('c'),
            OffsetBase::D => out.push('d'),
        }
        for (k, name) in [(self.two_a, "2a"), (self.two_b, "2b"), (self.c_minus_d, "(c-d)")] {
            if k == 0 {
                continue;
            }
            let sign = if k < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = if k.abs() == 1 { String::new() } else { k.abs().to_string() };
            out.push_str(&format!("{sign}{mag}{name}"));
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Name of a contact relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContactLabel {
    /// Negative layer above, at `c`, `c - 2a`, `c - 2b`.
    G0Above,
    GaAbove,
    GbAbove,
    /// Negative layer below, at `d`, `d + 2a`, `d - 2b`.
    G0Below,
    GaBelow,
    GbBelow,
    /// Same layer, same side.
    GaIn,
    GbIn,
    GaPlusBIn,
    GaMinusBIn,
    /// Same layer, upper against lower.
    Ha,
    Hb,
    Other(String),
}

impl ContactLabel {
    pub const G_SET: [ContactLabel; 10] = [
        ContactLabel::G0Above,
        ContactLabel::GaAbove,
        ContactLabel::GbAbove,
        ContactLabel::G0Below,
        ContactLabel::GaBelow,
        ContactLabel::GbBelow,
        ContactLabel::GaIn,
        ContactLabel::GbIn,
        ContactLabel::GaPlusBIn,
        ContactLabel::GaMinusBIn,
    ];

    /// Label from the pair's layer relation and lattice direction.
    pub fn of(pair: &PairId) -> Self {
        use ContactLabel::*;
        let n = pair.coords;
        let dir = match (n.i != 0, n.j != 0) {
            (false, false) => '0',
            (true, false) => 'a',
            (false, true) => 'b',
            (true, true) => {
                if n.i == n.j {
                    '+'
                } else if n.i == -n.j {
                    '-'
                } else {
                    '?'
                }
            }
        };
        let same = pair.side_a == pair.side_b;
        let unit = n.i.abs() <= 1 && n.j.abs() <= 1;
        let label = match (pair.coset, n.k, same, dir) {
            _ if !unit => None,
            (Coset::Negative, 0, true, '0') => Some(G0Above),
            (Coset::Negative, 0, true, 'a') => Some(GaAbove),
            (Coset::Negative, 0, true, 'b') => Some(GbAbove),
            (Coset::Negative, -1, true, '0') => Some(G0Below),
            (Coset::Negative, -1, true, 'a') => Some(GaBelow),
            (Coset::Negative, -1, true, 'b') => Some(GbBelow),
            (Coset::Positive, 0, true, 'a') => Some(GaIn),
            (Coset::Positive, 0, true, 'b') => Some(GbIn),
            (Coset::Positive, 0, true, '+') => Some(GaPlusBIn),
            (Coset::Positive, 0, true, '-') => Some(GaMinusBIn),
            (Coset::Positive, 0, false, 'a') => Some(Ha),
            (Coset::Positive, 0, false, 'b') => Some(Hb),
            _ => None,
        };
        label.unwrap_or_else(|| Other(pair.to_string()))
    }

    pub fn is_g(&self) -> bool {
        Self::G_SET.contains(self)
    }

    pub fn is_h(&self) -> bool {
        matches!(self, ContactLabel::Ha | ContactLabel::Hb)
    }
}

impl fmt::Display for ContactLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ContactLabel::*;
        let s = match self {
            G0Above => "G_0^+",
            GaAbove => "G_a^+",
            GbAbove => "G_b^+",
            G0Below => "G_0^-",
            GaBelow => "G_a^-",
            GbBelow => "G_b^-",
            GaIn => "G_a^0",
            GbIn => "G_b^0",
            GaPlusBIn => "G_{a+b}^0",
            GaMinusBIn => "G_{a-b}^0",
            Ha => "H_a",
            Hb => "H_b",
            Other(p) => return write!(f, "X_{p}"),
        };
        f.write_str(s)
    }
}

/// Parameters and gap of one contact equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactSolution {
    pub s: f64,
    pub t: f64,
    pub point: Vec3,
    pub gap: f64,
}

impl ContactSolution {
    /// Both parameters in `[-tol, 1 + tol]`.
    pub fn params_in_range(&self, tol: f64) -> bool {
        [self.s, self.t].iter().all(|x| *x >= -tol && *x <= 1.0 + tol)
    }
}

/// Closest approach of the lines `s·a + (1-s)·b` and `t·c + (1-t)·d + w`,
/// with `ea = [a, b]` and `eb = [c, d]`.
///
/// The gap is measured along `(b - a) × (d - c)`, from the first edge to the
/// second, and the point is the midpoint of closest approach. Swapping the
/// edges and negating `w` leaves the gap unchanged.
pub fn edge_edge_gap(ea: [Vec3; 2], eb: [Vec3; 2], w: Vec3) -> Result<ContactSolution, ContactError> {
    let [a, b] = ea;
    let [c, d] = eb.map(|p| p + w);
    let u = a - b;
    let v = c - d;
    let n = (b - a).cross(eb[1] - eb[0]);
    if n.norm() <= 1e-12 * u.norm() * v.norm() {
        return Err(ContactError::ParallelEdges);
    }
    let n = n.normalized().unwrap();
    // minimize |b + s u - d - t v|^2
    let r = b - d;
    let (uu, uv, vv) = (u.dot(u), u.dot(v), v.dot(v));
    let (ur, vr) = (u.dot(r), v.dot(r));
    let det = uu * vv - uv * uv;
    let s = (uv * vr - vv * ur) / det;
    let t = (uu * vr - uv * ur) / det;
    let pa = b + u * s;
    let pb = d + v * t;
    Ok(ContactSolution {
        s,
        t,
        point: (pa + pb) / 2.0,
        gap: n.dot(pb - pa),
    })
}

fn newell_normal(face: &[Vec3]) -> Option<Vec3> {
    let mut n = Vec3::zeros();
    for (k, p) in face.iter().enumerate() {
        n += p.cross(face[(k + 1) % face.len()]);
    }
    n.normalized()
}

/// Sutherland-Hodgman clip of `subject` against the convex counter-clockwise
/// polygon `clip`, all in 2d.
fn clip_polygon(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let cross = |o: [f64; 2], a: [f64; 2], p: [f64; 2]| (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]);
    let mut out = subject.to_vec();
    for k in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (c0, c1) = (clip[k], clip[(k + 1) % clip.len()]);
        let input = std::mem::take(&mut out);
        for m in 0..input.len() {
            let p = input[m];
            let q = input[(m + 1) % input.len()];
            let (dp, dq) = (cross(c0, c1, p), cross(c0, c1, q));
            let tol = -1e-12;
            if dp >= tol {
                out.push(p);
            }
            if (dp >= tol) != (dq >= tol) {
                let t = dp / (dp - dq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

/// Contact of a face of one body with a parallel feature of another.
///
/// `fa` is a face with outward counter-clockwise order; `fb` is the partner
/// feature (a face, an edge or a single vertex) before translation by `w`.
/// The gap is the distance of `fb + w` beyond the plane of `fa` along its
/// outward normal. The designated point is the centroid of the overlap of
/// the two features projected onto that plane (or `fb[0] + w` when they do
/// not overlap); `s, t` are its coordinates in the frame
/// `(1 - s - t)·fa[0] + s·fa[1] + t·fa[2]`.
pub fn face_face_gap(fa: &[Vec3], fb: &[Vec3], w: Vec3) -> Result<ContactSolution, ContactError> {
    if fa.len() < 3 {
        return Err(ContactError::ShortFace(fa.len()));
    }
    let na = newell_normal(fa).ok_or(ContactError::ShortFace(fa.len()))?;
    if fb.len() >= 3 {
        let nb = newell_normal(fb).ok_or(ContactError::ShortFace(fb.len()))?;
        let mis = na.cross(nb).norm();
        if mis > 1e-6 {
            return Err(ContactError::NonParallelFaces(mis));
        }
    }
    let fb: Vec<Vec3> = fb.iter().map(|p| *p + w).collect();
    let e1 = na.any_orthogonal();
    let e2 = na.cross(e1);
    let origin = fa[0];
    let to2 = |p: Vec3| [e1.dot(p - origin), e2.dot(p - origin)];
    let clip: Vec<_> = fa.iter().map(|p| to2(*p)).collect();
    let subject: Vec<_> = fb.iter().map(|p| to2(*p)).collect();
    let overlap = clip_polygon(&subject, &clip);
    let point = if overlap.is_empty() {
        fb[0]
    } else {
        let n = overlap.len() as f64;
        let (x, y) = overlap.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        let mean_h = fb.iter().map(|p| na.dot(*p - origin)).sum::<f64>() / fb.len() as f64;
        origin + e1 * (x / n) + e2 * (y / n) + na * mean_h
    };
    let gap = fb.iter().map(|p| na.dot(*p - origin)).fold(f64::INFINITY, f64::min);
    // affine coordinates of the in-plane projection
    let q = point - na * na.dot(point - origin);
    let (d1, d2, r) = (fa[1] - origin, fa[2] - origin, q - origin);
    let (a11, a12, a22) = (d1.dot(d1), d1.dot(d2), d2.dot(d2));
    let (b1, b2) = (d1.dot(r), d2.dot(r));
    let det = a11 * a22 - a12 * a12;
    Ok(ContactSolution {
        s: (a22 * b1 - a12 * b2) / det,
        t: (a11 * b2 - a12 * b1) / det,
        point,
        gap,
    })
}

/// Minkowski-difference facets for every combination of half-cluster sides
/// and cosets of one cluster.
#[derive(Debug, Clone)]
pub struct FacetTable {
    bodies: [ConvexBody<f64>; 2],
    facets: Vec<Vec<MinkowskiFacet<f64>>>,
}

impl FacetTable {
    /// Built from the positively oriented cluster.
    pub fn new(cluster: &Cluster<f64>) -> Self {
        let pos = if cluster.orientation == 1 {
            cluster.clone()
        } else {
            cluster.negated()
        };
        let bodies = [pos.upper.hull.clone(), pos.lower.hull.clone()];
        let mut facets = Vec::with_capacity(8);
        for coset in [Coset::Positive, Coset::Negative] {
            for sa in Side::BOTH {
                for sb in Side::BOTH {
                    let b = Self::side_body(&bodies, sb);
                    let other = match coset {
                        Coset::Positive => b.clone(),
                        Coset::Negative => b.negated(),
                    };
                    facets.push(minkowski_facets(Self::side_body(&bodies, sa), &other));
                }
            }
        }
        Self { bodies, facets }
    }

    fn side_body(bodies: &[ConvexBody<f64>; 2], side: Side) -> &ConvexBody<f64> {
        match side {
            Side::Upper => &bodies[0],
            Side::Lower => &bodies[1],
        }
    }

    fn slot(coset: Coset, sa: Side, sb: Side) -> usize {
        let s = |x: Side| match x {
            Side::Upper => 0,
            Side::Lower => 1,
        };
        let c = match coset {
            Coset::Positive => 0,
            Coset::Negative => 1,
        };
        4 * c + 2 * s(sa) + s(sb)
    }

    pub fn facets(&self, pair: &PairId) -> &[MinkowskiFacet<f64>] {
        &self.facets[Self::slot(pair.coset, pair.side_a, pair.side_b)]
    }

    /// Hull of the origin half on `side`.
    pub fn body(&self, side: Side) -> &ConvexBody<f64> {
        Self::side_body(&self.bodies, side)
    }

    /// Hull of the partner half of `pair`, before translation.
    pub fn partner(&self, pair: &PairId) -> ConvexBody<f64> {
        let b = self.body(pair.side_b);
        match pair.coset {
            Coset::Positive => b.clone(),
            Coset::Negative => b.negated(),
        }
    }

    /// Largest facet gap at translation `w`, with the facet index.
    pub fn max_gap(&self, pair: &PairId, w: Vec3) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (k, f) in self.facets(pair).iter().enumerate() {
            let g = f.gap(w);
            if g > best.0 {
                best = (g, k);
            }
        }
        best
    }

    /// Facet of `pair` whose normal is closest to `normal`.
    pub fn closest_facet(&self, pair: &PairId, normal: Vec3) -> usize {
        let fs = self.facets(pair);
        (0..fs.len())
            .max_by(|&i, &j| fs[i].normal.dot(normal).total_cmp(&fs[j].normal.dot(normal)))
            .expect("non-empty facet list")
    }
}

/// One contact equation between the origin cluster and a neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactConstraint {
    pub kind: ContactKind,
    pub pair: PairId,
    pub feature_a: Feature,
    pub feature_b: Feature,
    pub offset: LatticeOffset,
    pub label: ContactLabel,
    /// Unit normal of the Minkowski facet, pointing from the origin half
    /// towards the neighbor.
    pub normal: Vec3,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContactSet {
    pub constraints: Vec<ContactConstraint>,
    pub solutions: Vec<ContactSolution>,
}

/// Contact counts seen from one origin half-cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HalfCensus {
    /// Edge contacts with same-side halves of the same layer.
    pub in_layer_edge_edge: usize,
    /// Face contacts with same-side halves of the adjacent negative layer.
    pub adjacent_face_face: usize,
}

impl ContactSet {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn labels(&self) -> Vec<ContactLabel> {
        self.constraints.iter().map(|c| c.label.clone()).collect()
    }

    pub fn count_g(&self) -> usize {
        self.constraints.iter().filter(|c| c.label.is_g()).count()
    }

    pub fn count_h(&self) -> usize {
        self.constraints.iter().filter(|c| c.label.is_h()).count()
    }

    pub fn census(&self, side: Side) -> HalfCensus {
        let mut out = HalfCensus::default();
        for c in &self.constraints {
            let p = &c.pair;
            if p.side_a != side || p.side_b != side {
                continue;
            }
            match (p.coset, c.kind) {
                // each in-layer pair stands for the two translates +-w
                (Coset::Positive, ContactKind::EdgeEdge) if p.coords.k == 0 => out.in_layer_edge_edge += 2,
                (Coset::Negative, ContactKind::FaceFace) => out.adjacent_face_face += 1,
                _ => {}
            }
        }
        out
    }
}

/// A cluster, a lattice basis and the neighbor cutoff.
#[derive(Debug, Clone)]
pub struct PackingInstance {
    pub cluster: Cluster<f64>,
    pub basis: LatticeBasis<f64>,
    pub cutoff: f64,
}

fn solve_contact(
    table: &FacetTable,
    pair: &PairId,
    facet: &MinkowskiFacet<f64>,
    w: Vec3,
) -> (ContactKind, Feature, Feature, ContactSolution) {
    let a = table.body(pair.side_a);
    let b = table.partner(pair);
    let fa = Feature::from_support(a, &facet.support_a);
    let fb = Feature::from_support(&b, &facet.support_b);
    let pts = |body: &ConvexBody<f64>, f: &Feature| -> Vec<Vec3> { f.indices().iter().map(|&i| body.vertices[i]).collect() };
    let fallback = || {
        let g = facet.gap(w);
        let p = pts(a, &fa);
        ContactSolution {
            s: 0.0,
            t: 0.0,
            point: Vector3::centroid(&p) + facet.normal * (g / 2.0),
            gap: g,
        }
    };
    let (kind, sol) = match (&fa, &fb) {
        (Feature::Edge(i, j), Feature::Edge(k, l)) => {
            let ea = [a.vertices[*i], a.vertices[*j]];
            let eb = [b.vertices[*k], b.vertices[*l]];
            let sol = edge_edge_gap(ea, eb, w).map(|mut s| {
                let n = (ea[1] - ea[0]).cross(eb[1] - eb[0]);
                if n.dot(facet.normal) < 0.0 {
                    s.gap = -s.gap;
                }
                s
            });
            (ContactKind::EdgeEdge, sol.unwrap_or_else(|_| fallback()))
        }
        (Feature::Face(_), _) => {
            let kind = if matches!(fb, Feature::Face(_)) {
                ContactKind::FaceFace
            } else {
                ContactKind::Mixed
            };
            let sol = face_face_gap(&pts(a, &fa), &pts(&b, &fb), w);
            (kind, sol.unwrap_or_else(|_| fallback()))
        }
        (_, Feature::Face(_)) => {
            let fbp: Vec<Vec3> = pts(&b, &fb).iter().map(|p| *p + w).collect();
            let sol = face_face_gap(&fbp, &pts(a, &fa), Vec3::zeros());
            (ContactKind::Mixed, sol.unwrap_or_else(|_| fallback()))
        }
        _ => (ContactKind::Mixed, fallback()),
    };
    (kind, fa, fb, sol)
}

/// Every canonical half-cluster pair within the cutoff whose gap is at most
/// `tol` in absolute value, labeled and solved.
pub fn classify_active(instance: &PackingInstance, tol: f64) -> ContactSet {
    let table = FacetTable::new(&instance.cluster);
    classify_with_table(&table, &instance.basis, instance.cutoff, tol)
}

pub fn classify_with_table(table: &FacetTable, basis: &LatticeBasis<f64>, cutoff: f64, tol: f64) -> ContactSet {
    let pairs = canonical_pairs(&enumerate_neighbors(basis, cutoff));
    let found: Vec<_> = pairs
        .par_iter()
        .filter_map(|pair| {
            let w = pair.translation(basis);
            let (g, k) = table.max_gap(pair, w);
            if g.abs() > tol {
                return None;
            }
            let facet = &table.facets(pair)[k];
            let (kind, fa, fb, sol) = solve_contact(table, pair, facet, w);
            let c = ContactConstraint {
                kind,
                pair: *pair,
                feature_a: fa,
                feature_b: fb,
                offset: LatticeOffset::of(pair),
                label: ContactLabel::of(pair),
                normal: facet.normal,
            };
            Some((c, sol))
        })
        .collect();
    let (constraints, solutions) = found.into_iter().unzip();
    ContactSet {
        constraints,
        solutions,
    }
}
