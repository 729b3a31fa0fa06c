//! The nine-tetrahedron cluster family.
//!
//! A central regular tetrahedron has an upper edge `AB` at height `z = 1`
//! and a lower edge `CD` at `z = -1`. Four more tetrahedra wrap around each
//! of these edges face to face. Five dihedral angles `acos(1/3)` fall short
//! of a full turn by about 7.36 degrees, so each chain of four can swivel
//! rigidly about its edge; the swivel is parametrized by the x-coordinate
//! of the chain's apex vertex.

use thiserror::Error;

use crate::geom::{
    body_volume, convex_hull, rotate_about_line, ConvexBody, GeomError, Mat3, Scalar, Vector3,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("swivel parameter {value} outside [-1/9, 1/9]")]
    OutOfRange { value: f64 },
    #[error("orientation must be +1 or -1, got {0}")]
    BadOrientation(i8),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Upper, Side::Lower];

    pub fn letter(self) -> char {
        match self {
            Side::Upper => 'U',
            Side::Lower => 'L',
        }
    }
}

/// Regular tetrahedron given by its four vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetra<T> {
    pub vertices: [Vector3<T>; 4],
}

impl<T: Scalar> Tetra<T> {
    pub fn new(vertices: [Vector3<T>; 4]) -> Self {
        Self { vertices }
    }

    pub fn volume(&self) -> T {
        let [p0, p1, p2, p3] = self.vertices;
        Mat3::from_columns(p1 - p0, p2 - p0, p3 - p0).det().abs() / T::lit(6.0)
    }

    pub fn edge_lengths(&self) -> [T; 6] {
        let v = &self.vertices;
        [
            v[0].distance(v[1]),
            v[0].distance(v[2]),
            v[0].distance(v[3]),
            v[1].distance(v[2]),
            v[1].distance(v[3]),
            v[2].distance(v[3]),
        ]
    }

    /// All edges `√8` and volume `8/3` within `tol`.
    pub fn is_regular(&self, tol: T) -> bool {
        let e = T::lit(8.0).sqrt();
        self.edge_lengths().iter().all(|l| (*l - e).abs() <= tol)
            && (self.volume() - T::lit(8.0 / 3.0)).abs() <= tol
    }

    pub fn centroid(&self) -> Vector3<T> {
        Vector3::centroid(&self.vertices)
    }

    pub fn map(&self, f: impl Fn(Vector3<T>) -> Vector3<T>) -> Self {
        Self::new(self.vertices.map(f))
    }

    pub fn body(&self) -> ConvexBody<T> {
        convex_hull(&self.vertices).expect("regular tetrahedron is full-dimensional")
    }
}

/// Vertices of the central tetrahedron in the order `A, B, C, D`.
pub fn base_vertices<T: Scalar>() -> [Vector3<T>; 4] {
    [
        Vector3::from_f64(1.0, 1.0, 1.0),
        Vector3::from_f64(-1.0, -1.0, 1.0),
        Vector3::from_f64(1.0, -1.0, -1.0),
        Vector3::from_f64(-1.0, 1.0, -1.0),
    ]
}

pub fn base_tetra<T: Scalar>() -> Tetra<T> {
    Tetra::new(base_vertices())
}

/// Dihedral angle of the regular tetrahedron.
pub fn dihedral<T: Scalar>() -> T {
    (T::one() / T::lit(3.0)).acos()
}

/// Angular slack left when five tetrahedra share an edge.
pub fn swivel_gap<T: Scalar>() -> T {
    T::lit(2.0) * T::PI() - T::lit(5.0) * dihedral::<T>()
}

/// Largest admissible swivel parameter, `√3 sin(gap/2)`, which is exactly 1/9.
pub fn max_param<T: Scalar>() -> T {
    T::one() / T::lit(9.0)
}

fn check_param<T: Scalar>(p: T) -> Result<(), ClusterError> {
    if !p.is_finite() || p.abs() > max_param::<T>() + T::exact_tol() {
        return Err(ClusterError::OutOfRange {
            value: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Swivel angle `θ` with `√3 sin θ = p`.
pub fn swivel_angle<T: Scalar>(p: T) -> T {
    (p / T::lit(3.0).sqrt()).asin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwivelParams<T> {
    pub u: T,
    pub v: T,
    pub theta_u: T,
    pub theta_v: T,
}

impl<T: Scalar> SwivelParams<T> {
    pub fn new(u: T, v: T) -> Result<Self, ClusterError> {
        check_param(u)?;
        check_param(v)?;
        Ok(Self {
            u,
            v,
            theta_u: swivel_angle(u),
            theta_v: swivel_angle(v),
        })
    }

    pub fn param(&self, side: Side) -> T {
        match side {
            Side::Upper => self.u,
            Side::Lower => self.v,
        }
    }
}

/// The five named rim vertices of a chain, in chain order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rim<T> {
    pub o: Vector3<T>,
    pub p: Vector3<T>,
    pub q: Vector3<T>,
    pub r: Vector3<T>,
    pub s: Vector3<T>,
}

impl<T: Scalar> Rim<T> {
    pub const NAMES: [char; 5] = ['o', 'p', 'q', 'r', 's'];

    pub fn from_array(a: [Vector3<T>; 5]) -> Self {
        Self {
            o: a[0],
            p: a[1],
            q: a[2],
            r: a[3],
            s: a[4],
        }
    }

    pub fn to_array(&self) -> [Vector3<T>; 5] {
        [self.o, self.p, self.q, self.r, self.s]
    }

    pub fn map(&self, f: impl Fn(Vector3<T>) -> Vector3<T>) -> Self {
        Self::from_array(self.to_array().map(f))
    }
}

/// Central tetrahedron plus one swiveled chain of four.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfCluster<T> {
    pub side: Side,
    pub param: T,
    pub tetrahedra: [Tetra<T>; 5],
    pub rim: Rim<T>,
    /// Hull of [`HalfCluster::points`]; its vertex indices follow that order
    /// whenever the nine points are distinct, i.e. for `|param| < 1/9`.
    pub hull: ConvexBody<T>,
    pub apex: Vector3<T>,
}

impl<T: Scalar> HalfCluster<T> {
    /// The nine distinct vertices: `A, B, C, D` then the rim `o..s`.
    pub fn points(&self) -> [Vector3<T>; 9] {
        let [a, b, c, d] = self.tetrahedra[0].vertices;
        let [o, p, q, r, s] = self.rim.to_array();
        [a, b, c, d, o, p, q, r, s]
    }

    /// The two endpoints of the edge the chain wraps around.
    pub fn spine(&self) -> (Vector3<T>, Vector3<T>) {
        let [a, b, c, d] = self.tetrahedra[0].vertices;
        // the lower chain is the quarter-turn image of the upper one
        match self.side {
            Side::Upper => (a, b),
            Side::Lower => (d, c),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            side: self.side,
            param: self.param,
            tetrahedra: self.tetrahedra.map(|t| t.map(|p| -p)),
            rim: self.rim.map(|p| -p),
            hull: self.hull.negated(),
            apex: -self.apex,
        }
    }
}

fn upper_rim<T: Scalar>(u: T) -> Result<[Vector3<T>; 5], GeomError> {
    let [a, b, _, d] = base_vertices::<T>();
    let mid = (a + b) / T::lit(2.0);
    let dir = (a - b).normalized().expect("distinct edge endpoints");
    let half_gap = swivel_gap::<T>() / T::lit(2.0);
    // at u = -1/9 the first rim vertex coincides with D
    let o = rotate_about_line(d, mid, dir, swivel_angle(u) + half_gap)?;
    let alpha = dihedral::<T>();
    let mut rim = [o; 5];
    for (k, slot) in rim.iter_mut().enumerate().skip(1) {
        *slot = rotate_about_line(o, mid, dir, alpha * T::from_usize(k).unwrap())?;
    }
    Ok(rim)
}

/// The quarter turn about `z` composed with the flip `z -> -z`; it swaps the
/// upper and lower edges of the central tetrahedron.
pub fn quarter_turn<T: Scalar>() -> Mat3<T> {
    Mat3::from_i8([[0, -1, 0], [1, 0, 0], [0, 0, -1]])
}

/// Builds the half-cluster on `side` with swivel parameter `param`.
pub fn build_chain<T: Scalar>(side: Side, param: T) -> Result<HalfCluster<T>, ClusterError> {
    check_param(param)?;
    let mut rim = upper_rim(param)?;
    if side == Side::Lower {
        let p = quarter_turn::<T>();
        rim = rim.map(|x| p.mul_vec(x));
    }
    let base = base_tetra::<T>();
    let (s0, s1) = match side {
        Side::Upper => (base.vertices[0], base.vertices[1]),
        Side::Lower => (base.vertices[3], base.vertices[2]),
    };
    let chain = |k: usize| Tetra::new([s0, s1, rim[k], rim[k + 1]]);
    let tetrahedra = [base, chain(0), chain(1), chain(2), chain(3)];
    let rim = Rim::from_array(rim);
    let mut points = base.vertices.to_vec();
    points.extend(rim.to_array());
    // at |param| = 1/9 an end of the rim meets C or D and the hull has 8 vertices
    let hull = convex_hull(&points)?;
    Ok(HalfCluster {
        side,
        param,
        tetrahedra,
        apex: rim.q,
        rim,
        hull,
    })
}

/// Height of the chain apex above (upper) or below (lower) the origin.
pub fn apex_height<T: Scalar>(side: Side, param: T) -> Result<T, ClusterError> {
    check_param(param)?;
    let h = T::one() + (T::lit(6.0) - T::lit(2.0) * param * param).sqrt();
    Ok(match side {
        Side::Upper => h,
        Side::Lower => -h,
    })
}

/// Nine tetrahedra: the central one with both chains.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    pub params: SwivelParams<T>,
    pub upper: HalfCluster<T>,
    pub lower: HalfCluster<T>,
    pub orientation: i8,
}

impl<T: Scalar> Cluster<T> {
    pub fn half(&self, side: Side) -> &HalfCluster<T> {
        match side {
            Side::Upper => &self.upper,
            Side::Lower => &self.lower,
        }
    }

    /// Point reflection through the origin.
    pub fn negated(&self) -> Self {
        Self {
            params: self.params,
            upper: self.upper.negated(),
            lower: self.lower.negated(),
            orientation: -self.orientation,
        }
    }

    /// The nine tetrahedra: central, upper chain, lower chain.
    pub fn tetrahedra(&self) -> Vec<Tetra<T>> {
        let mut out = vec![self.upper.tetrahedra[0]];
        out.extend_from_slice(&self.upper.tetrahedra[1..]);
        out.extend_from_slice(&self.lower.tetrahedra[1..]);
        out
    }

    /// The 14 distinct vertices: central four, upper rim, lower rim.
    pub fn points(&self) -> Vec<Vector3<T>> {
        let mut out = self.upper.tetrahedra[0].vertices.to_vec();
        out.extend(self.upper.rim.to_array());
        out.extend(self.lower.rim.to_array());
        out
    }

    /// Largest distance of a vertex from the origin.
    pub fn circumradius(&self) -> T {
        self.points().iter().map(|p| p.norm()).fold(T::zero(), T::max)
    }

    pub fn total_volume(&self) -> T {
        self.tetrahedra().iter().map(|t| t.volume()).fold(T::zero(), |a, b| a + b)
    }
}

pub fn build_cluster<T: Scalar>(params: SwivelParams<T>, orientation: i8) -> Result<Cluster<T>, ClusterError> {
    if orientation != 1 && orientation != -1 {
        return Err(ClusterError::BadOrientation(orientation));
    }
    let c = Cluster {
        params,
        upper: build_chain(Side::Upper, params.u)?,
        lower: build_chain(Side::Lower, params.v)?,
        orientation: 1,
    };
    Ok(if orientation == 1 { c } else { c.negated() })
}

/// How a symmetry of the central tetrahedron acts on `(u, v)`: optionally
/// swap the two parameters, then apply signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamAction {
    pub swap: bool,
    pub sign_u: i8,
    pub sign_v: i8,
}

impl ParamAction {
    const fn new(swap: bool, sign_u: i8, sign_v: i8) -> Self {
        Self { swap, sign_u, sign_v }
    }

    pub fn apply<T: Scalar>(&self, u: T, v: T) -> (T, T) {
        let (x, y) = if self.swap { (v, u) } else { (u, v) };
        let s = |k: i8, t: T| if k < 0 { -t } else { t };
        (s(self.sign_u, x), s(self.sign_v, y))
    }
}

/// The order-8 symmetry group of the symmetric cluster, generated by the
/// quarter turn `P` and `Q = diag(1, -1, -1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryGroup<T> {
    pub elements: [Mat3<T>; 8],
    pub actions: [ParamAction; 8],
}

impl<T: Scalar> IsometryGroup<T> {
    pub const NAMES: [&'static str; 8] = ["I", "P", "P2", "P3", "Q", "QP", "QP2", "QP3"];

    pub fn new() -> Self {
        let p = quarter_turn::<T>();
        let q = Mat3::from_i8([[1, 0, 0], [0, -1, 0], [0, 0, -1]]);
        let i = Mat3::identity();
        let p2 = p.mul_mat(&p);
        let p3 = p2.mul_mat(&p);
        Self {
            elements: [i, p, p2, p3, q, q.mul_mat(&p), q.mul_mat(&p2), q.mul_mat(&p3)],
            actions: [
                ParamAction::new(false, 1, 1),
                ParamAction::new(true, -1, 1),
                ParamAction::new(false, -1, -1),
                ParamAction::new(true, 1, -1),
                ParamAction::new(true, 1, 1),
                ParamAction::new(false, 1, -1),
                ParamAction::new(true, -1, -1),
                ParamAction::new(false, -1, 1),
            ],
        }
    }

    /// Index of `m` in the group, if present.
    pub fn index_of(&self, m: &Mat3<T>) -> Option<usize> {
        self.elements.iter().position(|e| e.approx_eq(m, T::exact_tol()))
    }
}

impl<T: Scalar> Default for IsometryGroup<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Parameters of the eight congruent images of `B(u, v)`, in group order.
pub fn param_orbit<T: Scalar>(params: &SwivelParams<T>) -> [(T, T); 8] {
    IsometryGroup::<T>::new()
        .actions
        .map(|a| a.apply(params.u, params.v))
}

/// Relative density of a half-cluster inside its own convex hull.
pub fn hull_density<T: Scalar>(half: &HalfCluster<T>) -> T {
    T::lit(5.0 * 8.0 / 3.0) / body_volume(&half.hull)
}
