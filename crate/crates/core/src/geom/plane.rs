use super::{Scalar, Vector3};

/// Oriented plane `{p : normal · p = offset}` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane<T> {
    pub normal: Vector3<T>,
    pub offset: T,
}

impl<T: Scalar> Plane<T> {
    /// Plane through `point` with the given (not necessarily unit) normal.
    pub fn through(point: Vector3<T>, normal: Vector3<T>) -> Option<Self> {
        let n = normal.normalized()?;
        Some(Self {
            normal: n,
            offset: n.dot(point),
        })
    }

    /// Plane through three points, oriented by the right-hand rule.
    pub fn from_points(a: Vector3<T>, b: Vector3<T>, c: Vector3<T>) -> Option<Self> {
        Self::through(a, (b - a).cross(c - a))
    }

    /// Positive on the side the normal points to.
    #[inline]
    pub fn signed_distance(&self, p: Vector3<T>) -> T {
        self.normal.dot(p) - self.offset
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    pub fn translated(&self, w: Vector3<T>) -> Self {
        Self {
            normal: self.normal,
            offset: self.offset + self.normal.dot(w),
        }
    }

    pub fn project(&self, p: Vector3<T>) -> Vector3<T> {
        p - self.normal * self.signed_distance(p)
    }

    pub fn is_normalized(&self) -> bool {
        (self.normal.norm() - T::one()).abs() <= T::exact_tol()
    }
}
