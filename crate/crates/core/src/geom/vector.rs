use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use super::{GeomError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vector3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::lit(x), T::lit(y), T::lit(z))
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(self) -> Vector3<U> {
        let f = |v: T| U::lit(v.to_f64().expect("finite"));
        Vector3::new(f(self.x), f(self.y), f(self.z))
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        let d = self - o;
        d.x.abs().max(d.y.abs()).max(d.z.abs())
    }

    pub fn approx_eq(self, o: Self, tol: T) -> bool {
        self.max_abs_diff(o) <= tol
    }

    /// Any unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(self) -> Self {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Self::new(T::one(), T::zero(), T::zero())
        } else if self.y.abs() <= self.z.abs() {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        self.cross(a).normalized().unwrap_or(a)
    }

    pub fn centroid(points: &[Self]) -> Self {
        let mut s = Self::zeros();
        for p in points {
            s += *p;
        }
        s / T::from_usize(points.len().max(1)).unwrap()
    }
}

impl<T: Scalar> Add for Vector3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vector3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vector3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> SubAssign for Vector3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Neg for Vector3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul<T> for Vector3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Div<T> for Vector3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<T> Index<usize> for Vector3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vector3 index {i} out of range"),
        }
    }
}

/// Row-major 3x3 matrix, used for the point isometries of the cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub rows: [[T; 3]; 3],
}

impl<T: Scalar> Mat3<T> {
    pub fn from_rows(rows: [[T; 3]; 3]) -> Self {
        Self { rows }
    }

    pub fn from_i8(rows: [[i8; 3]; 3]) -> Self {
        let f = |v: i8| T::from_i8(v).unwrap();
        Self::from_rows(rows.map(|r| r.map(f)))
    }

    pub fn identity() -> Self {
        Self::from_i8([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(a: Vector3<T>, b: Vector3<T>, c: Vector3<T>) -> Self {
        Self::from_rows([[a.x, b.x, c.x], [a.y, b.y, c.y], [a.z, b.z, c.z]])
    }

    pub fn mul_vec(&self, v: Vector3<T>) -> Vector3<T> {
        let r = &self.rows;
        Vector3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).fold(T::zero(), |acc, k| acc + self.rows[i][k] * o.rows[k][j]);
            }
        }
        Self::from_rows(out)
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        Self::from_rows([
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ])
    }

    pub fn det(&self) -> T {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    pub fn approx_eq(&self, o: &Self, tol: T) -> bool {
        (0..3).all(|i| (0..3).all(|j| (self.rows[i][j] - o.rows[i][j]).abs() <= tol))
    }

    pub fn is_orthogonal(&self, tol: T) -> bool {
        self.mul_mat(&self.transpose()).approx_eq(&Self::identity(), tol)
    }
}

/// Right-handed rotation of `p` by `angle` radians about the line through
/// `axis_point` with unit direction `axis_dir`.
pub fn rotate_about_line<T: Scalar>(
    p: Vector3<T>,
    axis_point: Vector3<T>,
    axis_dir: Vector3<T>,
    angle: T,
) -> Result<Vector3<T>, GeomError> {
    let n = axis_dir.norm();
    if (n - T::one()).abs() > T::exact_tol() * T::lit(10.0) {
        return Err(GeomError::NonUnitAxis {
            norm: n.to_f64().unwrap_or(f64::NAN),
        });
    }
    let v = p - axis_point;
    let (s, c) = angle.sin_cos();
    let along = axis_dir * axis_dir.dot(v);
    let rotated = v * c + axis_dir.cross(v) * s + along * (T::one() - c);
    Ok(axis_point + rotated)
}
