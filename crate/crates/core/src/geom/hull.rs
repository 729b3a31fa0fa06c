use std::collections::BTreeSet;

use super::{GeomError, Mat3, Plane, Scalar, Vector3};

/// Convex polytope given by its vertices, outward-oriented face cycles and
/// edges. Faces with more than three coplanar vertices stay merged.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody<T> {
    pub vertices: Vec<Vector3<T>>,
    /// Vertex-index cycles, counter-clockwise when seen from outside.
    pub faces: Vec<Vec<usize>>,
    /// Vertex-index pairs with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl<T: Scalar> ConvexBody<T> {
    /// Outward plane of face `f`, using Newell's normal so that merged
    /// polygons get a well-conditioned plane.
    pub fn face_plane(&self, f: usize) -> Plane<T> {
        let cyc = &self.faces[f];
        let mut n = Vector3::zeros();
        for (k, &i) in cyc.iter().enumerate() {
            let p = self.vertices[i];
            let q = self.vertices[cyc[(k + 1) % cyc.len()]];
            n += p.cross(q);
        }
        let pts: Vec<_> = cyc.iter().map(|&i| self.vertices[i]).collect();
        Plane::through(Vector3::centroid(&pts), n).expect("face with non-zero area")
    }

    pub fn face_planes(&self) -> Vec<Plane<T>> {
        (0..self.faces.len()).map(|f| self.face_plane(f)).collect()
    }

    pub fn centroid(&self) -> Vector3<T> {
        Vector3::centroid(&self.vertices)
    }

    /// Largest distance from `center` to a vertex.
    pub fn radius_about(&self, center: Vector3<T>) -> T {
        self.vertices
            .iter()
            .map(|v| v.distance(center))
            .fold(T::zero(), T::max)
    }

    /// Maximum of `dir · v` over the vertices, with the index attaining it.
    pub fn support(&self, dir: Vector3<T>) -> (T, usize) {
        let mut best = (T::neg_infinity(), 0);
        for (i, v) in self.vertices.iter().enumerate() {
            let d = dir.dot(*v);
            if d > best.0 {
                best = (d, i);
            }
        }
        best
    }

    /// Point membership with tolerance (`tol > 0` is permissive).
    pub fn contains(&self, p: Vector3<T>, tol: T) -> bool {
        (0..self.faces.len()).all(|f| self.face_plane(f).signed_distance(p) <= tol)
    }

    /// Strict interior membership: at least `margin` inside every face.
    pub fn contains_strictly(&self, p: Vector3<T>, margin: T) -> bool {
        (0..self.faces.len()).all(|f| self.face_plane(f).signed_distance(p) < -margin)
    }

    pub fn translated(&self, w: Vector3<T>) -> Self {
        self.map_points(|p| p + w, false)
    }

    /// Point reflection through the origin.
    pub fn negated(&self) -> Self {
        self.map_points(|p| -p, true)
    }

    /// Image under an orthogonal matrix; improper matrices flip face order.
    pub fn transformed(&self, m: &Mat3<T>) -> Self {
        self.map_points(|p| m.mul_vec(p), m.det() < T::zero())
    }

    fn map_points(&self, f: impl Fn(Vector3<T>) -> Vector3<T>, reverses: bool) -> Self {
        let faces = if reverses {
            self.faces
                .iter()
                .map(|c| c.iter().rev().copied().collect())
                .collect()
        } else {
            self.faces.clone()
        };
        Self {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            faces,
            edges: self.edges.clone(),
        }
    }

    /// `V - E + F`; equals 2 for a valid hull.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Largest distance of a face vertex from its face plane.
    pub fn max_face_nonplanarity(&self) -> T {
        let mut worst = T::zero();
        for f in 0..self.faces.len() {
            let pl = self.face_plane(f);
            for &i in &self.faces[f] {
                worst = worst.max(pl.signed_distance(self.vertices[i]).abs());
            }
        }
        worst
    }

    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.distance(*b));
            }
        }
        d
    }
}

/// Convex hull of a small point set.
///
/// Plane enumeration over point triples: quartic in the number of points, so
/// meant for the dozens of vertices of cluster hulls, not for point clouds.
/// Returned vertices keep the relative order of the input points.
pub fn convex_hull<T: Scalar>(points: &[Vector3<T>]) -> Result<ConvexBody<T>, GeomError> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    if points.len() < 4 {
        return Err(GeomError::TooFewPoints(points.len()));
    }
    let extent = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(T::one(), T::max);
    let tol = T::geom_tol() * extent;

    // drop duplicates, remembering the first occurrence
    let mut uniq: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !uniq.iter().any(|&j| points[j].approx_eq(*p, tol)) {
            uniq.push(i);
        }
    }
    let pts: Vec<Vector3<T>> = uniq.iter().map(|&i| points[i]).collect();
    check_full_dimensional(&pts, tol)?;

    let n = pts.len();
    let mut planes: Vec<(Plane<T>, Vec<usize>)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if planes.iter().any(|(_, on)| on.contains(&i) && on.contains(&j) && on.contains(&k)) {
                    continue;
                }
                let raw = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
                if raw.norm() <= tol * extent {
                    continue;
                }
                let Some(pl) = Plane::through(pts[i], raw) else {
                    continue;
                };
                let (mut above, mut below) = (false, false);
                for p in &pts {
                    let d = pl.signed_distance(*p);
                    above |= d > tol;
                    below |= d < -tol;
                    if above && below {
                        break;
                    }
                }
                let pl = match (above, below) {
                    (false, _) => pl,
                    (true, false) => pl.flipped(),
                    (true, true) => continue,
                };
                let on: Vec<usize> = (0..n)
                    .filter(|&m| pl.signed_distance(pts[m]).abs() <= tol)
                    .collect();
                planes.push((pl, on));
            }
        }
    }

    let mut faces_local: Vec<Vec<usize>> = Vec::with_capacity(planes.len());
    for (pl, on) in &planes {
        faces_local.push(order_face(&pts, on, pl.normal));
    }

    let used: BTreeSet<usize> = faces_local.iter().flatten().copied().collect();
    let remap: Vec<Option<usize>> = {
        let mut r = vec![None; n];
        for (new, &old) in used.iter().enumerate() {
            r[old] = Some(new);
        }
        r
    };
    let vertices: Vec<Vector3<T>> = used.iter().map(|&i| pts[i]).collect();
    let faces: Vec<Vec<usize>> = faces_local
        .iter()
        .map(|c| c.iter().map(|&i| remap[i].unwrap()).collect())
        .collect();
    let mut edges = BTreeSet::new();
    for c in &faces {
        for (k, &a) in c.iter().enumerate() {
            let b = c[(k + 1) % c.len()];
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Ok(ConvexBody {
        vertices,
        faces,
        edges: edges.into_iter().collect(),
    })
}

fn check_full_dimensional<T: Scalar>(pts: &[Vector3<T>], tol: T) -> Result<(), GeomError> {
    if pts.len() < 4 {
        return Err(GeomError::Degenerate("fewer than 4 distinct points"));
    }
    let p0 = pts[0];
    let p1 = *pts
        .iter()
        .max_by(|a, b| a.distance(p0).partial_cmp(&b.distance(p0)).unwrap())
        .unwrap();
    if p1.distance(p0) <= tol {
        return Err(GeomError::Degenerate("all points coincide"));
    }
    let dir = (p1 - p0).normalized().unwrap();
    let off_line = |p: &Vector3<T>| {
        let v = *p - p0;
        (v - dir * dir.dot(v)).norm()
    };
    let p2 = *pts
        .iter()
        .max_by(|a, b| off_line(a).partial_cmp(&off_line(b)).unwrap())
        .unwrap();
    if off_line(&p2) <= tol {
        return Err(GeomError::Degenerate("points are collinear"));
    }
    let pl = Plane::from_points(p0, p1, p2).unwrap();
    if pts.iter().all(|p| pl.signed_distance(*p).abs() <= tol) {
        return Err(GeomError::Degenerate("points are coplanar"));
    }
    Ok(())
}

/// Counter-clockwise (seen from `normal`) cycle of the extreme points of a
/// planar point set; collinear boundary points are dropped.
fn order_face<T: Scalar>(pts: &[Vector3<T>], on: &[usize], normal: Vector3<T>) -> Vec<usize> {
    let e1 = normal.any_orthogonal();
    let e2 = normal.cross(e1);
    let mut p2: Vec<(T, T, usize)> = on.iter().map(|&i| (pts[i].dot(e1), pts[i].dot(e2), i)).collect();
    p2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cross = |o: (T, T, usize), a: (T, T, usize), b: (T, T, usize)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let scale = p2
        .iter()
        .map(|p| p.0.abs().max(p.1.abs()))
        .fold(T::one(), T::max);
    let eps = T::geom_tol() * scale * scale;
    // Andrew's monotone chain
    let mut lower: Vec<(T, T, usize)> = Vec::new();
    for &p in &p2 {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(T, T, usize)> = Vec::new();
    for &p in p2.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.into_iter().chain(upper).map(|p| p.2).collect()
}

/// Volume by signed tetrahedral decomposition about the vertex centroid.
pub fn body_volume<T: Scalar>(body: &ConvexBody<T>) -> T {
    let c = body.centroid();
    let six = T::lit(6.0);
    let mut vol = T::zero();
    for cyc in &body.faces {
        let p0 = body.vertices[cyc[0]] - c;
        for w in cyc[1..].windows(2) {
            let p1 = body.vertices[w[0]] - c;
            let p2 = body.vertices[w[1]] - c;
            vol = vol + p0.dot(p1.cross(p2)) / six;
        }
    }
    vol.abs()
}
