//! Signed separation of convex polytopes by exhaustive separating-axis test.
//!
//! For polytopes the facet normals of the Minkowski difference `A - B` are
//! face normals of `A`, face normals of `B`, and cross products of edge
//! pairs. Maximizing the gap over those directions gives the exact
//! penetration depth when the bodies overlap and a separating plane when they
//! do not. Bodies here have a few dozen vertices at most, so the exhaustive
//! scan is cheap and needs no iteration.

use super::{ConvexBody, Plane, Scalar, Vector3};

/// Result of [`signed_separation`].
#[derive(Debug, Clone, PartialEq)]
pub struct Separation<T> {
    /// `>= 0` disjoint or touching, `< 0` penetration depth.
    pub gap: T,
    /// Mid-plane between the bodies; `a` lies on its negative side.
    pub witness: Plane<T>,
    pub point_a: Vector3<T>,
    pub point_b: Vector3<T>,
}

/// One facet of the Minkowski difference `A - B`.
///
/// For `B` translated by `w`, the gap along this facet is `normal · w - h`;
/// the bodies' interiors are disjoint iff the maximum over all facets is
/// non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiFacet<T> {
    pub normal: Vector3<T>,
    pub h: T,
    /// Vertices of `A` attaining `max normal · a`.
    pub support_a: Vec<usize>,
    /// Vertices of `B` attaining `min normal · b`.
    pub support_b: Vec<usize>,
}

impl<T: Scalar> MinkowskiFacet<T> {
    #[inline]
    pub fn gap(&self, w: Vector3<T>) -> T {
        self.normal.dot(w) - self.h
    }
}

/// Indices of `points` whose projection on `dir` is within `tol` of the
/// maximum.
pub fn support_set<T: Scalar>(points: &[Vector3<T>], dir: Vector3<T>, tol: T) -> Vec<usize> {
    let m = points.iter().map(|p| dir.dot(*p)).fold(T::neg_infinity(), T::max);
    (0..points.len())
        .filter(|&i| dir.dot(points[i]) >= m - tol)
        .collect()
}

fn max_dot<T: Scalar>(points: &[Vector3<T>], dir: Vector3<T>) -> T {
    points.iter().map(|p| dir.dot(*p)).fold(T::neg_infinity(), T::max)
}

fn min_dot<T: Scalar>(points: &[Vector3<T>], dir: Vector3<T>) -> T {
    points.iter().map(|p| dir.dot(*p)).fold(T::infinity(), T::min)
}

fn feature_tol<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> T {
    let scale = a
        .vertices
        .iter()
        .chain(&b.vertices)
        .map(|p| p.norm())
        .fold(T::one(), T::max);
    T::geom_tol() * scale
}

/// Candidate axes: face normals of `a`, reversed face normals of `b`, and
/// both orientations of every non-degenerate edge-pair cross product.
/// Edge-pair axes are kept only when both edges support the pair, which is
/// exactly when the axis is a facet normal of `a - b`.
fn facet_axes<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>, tol: T) -> Vec<Vector3<T>> {
    let mut axes: Vec<Vector3<T>> = Vec::new();
    let push = |n: Vector3<T>, axes: &mut Vec<Vector3<T>>| {
        if !axes.iter().any(|m| m.approx_eq(n, T::geom_tol() * T::lit(10.0))) {
            axes.push(n);
        }
    };
    for pl in a.face_planes() {
        push(pl.normal, &mut axes);
    }
    for pl in b.face_planes() {
        push(-pl.normal, &mut axes);
    }
    for &(a0, a1) in &a.edges {
        let ea = a.vertices[a1] - a.vertices[a0];
        for &(b0, b1) in &b.edges {
            let eb = b.vertices[b1] - b.vertices[b0];
            let c = ea.cross(eb);
            if c.norm() <= T::lit(1e-7) * ea.norm() * eb.norm() {
                continue;
            }
            let n = c.normalized().unwrap();
            for n in [n, -n] {
                let ha = max_dot(&a.vertices, n);
                let lb = min_dot(&b.vertices, n);
                let a_edge = n.dot(a.vertices[a0]) >= ha - tol && n.dot(a.vertices[a1]) >= ha - tol;
                let b_edge = n.dot(b.vertices[b0]) <= lb + tol && n.dot(b.vertices[b1]) <= lb + tol;
                if a_edge && b_edge {
                    push(n, &mut axes);
                }
            }
        }
    }
    axes
}

/// Facets of the Minkowski difference `a - b`, with the supporting vertex
/// sets of both bodies.
pub fn minkowski_facets<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> Vec<MinkowskiFacet<T>> {
    let tol = feature_tol(a, b);
    facet_axes(a, b, tol)
        .into_iter()
        .map(|n| {
            let h = max_dot(&a.vertices, n) - min_dot(&b.vertices, n);
            MinkowskiFacet {
                normal: n,
                h,
                support_a: support_set(&a.vertices, n, tol),
                support_b: support_set(&b.vertices, -n, tol),
            }
        })
        .collect()
}

/// Signed separation of `a` and `b` along the best separating axis.
///
/// The gap is positive when a plane separates the bodies with that
/// clearance, zero when they touch and minus the penetration depth when
/// they overlap.
pub fn signed_separation<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> Separation<T> {
    let tol = feature_tol(a, b);
    let mut best: Option<(T, Vector3<T>)> = None;
    for n in facet_axes(a, b, tol) {
        let gap = min_dot(&b.vertices, n) - max_dot(&a.vertices, n);
        if best.is_none_or(|(g, _)| gap > g) {
            best = Some((gap, n));
        }
    }
    let (gap, n) = best.expect("non-empty bodies have face normals");
    let ha = max_dot(&a.vertices, n);
    let witness = Plane {
        normal: n,
        offset: ha + gap / T::lit(2.0),
    };
    let sa = support_set(&a.vertices, n, tol);
    let sb = support_set(&b.vertices, -n, tol);
    let (point_a, point_b) = witness_points(a, b, &sa, &sb, n, gap);
    Separation {
        gap,
        witness,
        point_a,
        point_b,
    }
}

fn witness_points<T: Scalar>(
    a: &ConvexBody<T>,
    b: &ConvexBody<T>,
    sa: &[usize],
    sb: &[usize],
    n: Vector3<T>,
    gap: T,
) -> (Vector3<T>, Vector3<T>) {
    if sa.len() == 2 && sb.len() == 2 {
        let (pa, pb) = closest_on_segments(
            a.vertices[sa[0]],
            a.vertices[sa[1]],
            b.vertices[sb[0]],
            b.vertices[sb[1]],
        );
        return (pa, pb);
    }
    if sa.len() == 1 {
        let pa = a.vertices[sa[0]];
        return (pa, pa + n * gap);
    }
    let pts: Vec<_> = sb.iter().map(|&i| b.vertices[i]).collect();
    let pb = Vector3::centroid(&pts);
    (pb - n * gap, pb)
}

/// Closest points between segments `[p0, p1]` and `[q0, q1]`.
pub(crate) fn closest_on_segments<T: Scalar>(
    p0: Vector3<T>,
    p1: Vector3<T>,
    q0: Vector3<T>,
    q1: Vector3<T>,
) -> (Vector3<T>, Vector3<T>) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let c = d1.dot(r);
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    let clamp = |x: T| x.max(T::zero()).min(T::one());
    let mut s = if denom > T::epsilon() * a * e {
        clamp((b * f - c * e) / denom)
    } else {
        T::zero()
    };
    let mut t = (b * s + f) / e;
    if t < T::zero() {
        t = T::zero();
        s = clamp(-c / a);
    } else if t > T::one() {
        t = T::one();
        s = clamp((b - c) / a);
    }
    (p0 + d1 * s, q0 + d2 * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::convex_hull;

    type V = Vector3<f64>;

    fn cube_at(c: V) -> ConvexBody<f64> {
        let mut v = Vec::new();
        for &x in &[-0.5, 0.5] {
            for &y in &[-0.5, 0.5] {
                for &z in &[-0.5, 0.5] {
                    v.push(c + V::new(x, y, z));
                }
            }
        }
        convex_hull(&v).unwrap()
    }

    #[test]
    fn separated_cubes() {
        let s = signed_separation(&cube_at(V::zeros()), &cube_at(V::new(3.0, 0.0, 0.0)));
        assert!((s.gap - 2.0).abs() < 1e-12);
        assert!(s.witness.normal.approx_eq(V::new(1.0, 0.0, 0.0), 1e-12));
        assert!((s.witness.offset - 1.5).abs() < 1e-12);
    }

    #[test]
    fn coincident_cubes_fully_penetrate() {
        let s = signed_separation(&cube_at(V::zeros()), &cube_at(V::zeros()));
        assert!((s.gap + 1.0).abs() < 1e-12, "gap {}", s.gap);
        let big: Vec<V> = cube_at(V::zeros()).vertices.iter().map(|p| *p * 2.0).collect();
        let big = convex_hull(&big).unwrap();
        assert!((signed_separation(&big, &big).gap + 2.0).abs() < 1e-12);
    }

    #[test]
    fn touching_edges() {
        // two cubes rotated 45 degrees meeting edge-to-edge
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let diamond = |c: V, axis_x: bool| {
            let mut v = Vec::new();
            for s in [-0.5, 0.5] {
                for (dx, dz) in [(r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r)] {
                    v.push(if axis_x { c + V::new(s, dx, dz) } else { c + V::new(dx, s, dz) });
                }
            }
            convex_hull(&v).unwrap()
        };
        let a = diamond(V::zeros(), true);
        let b = diamond(V::new(0.0, 0.0, 2.0 * r), false);
        let s = signed_separation(&a, &b);
        assert!(s.gap.abs() < 1e-12);
        assert!(s.point_a.approx_eq(V::new(0.0, 0.0, r), 1e-12));
    }

    #[test]
    fn minkowski_facets_reproduce_gap() {
        let a = cube_at(V::zeros());
        let b = cube_at(V::zeros());
        let facets = minkowski_facets(&a, &b);
        assert_eq!(facets.len(), 6);
        let w = V::new(1.7, 0.2, -0.1);
        let g = facets.iter().map(|f| f.gap(w)).fold(f64::NEG_INFINITY, f64::max);
        let s = signed_separation(&a, &b.translated(w));
        assert!((g - s.gap).abs() < 1e-12);
        assert!((g - 0.7).abs() < 1e-12);
    }
}
