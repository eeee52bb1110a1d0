//! Small fixed-size linear algebra: 3-vectors and rigid transforms.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rotation_tolerance, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(&self, other: &Self) -> Self {
        Self::new(self.y * other.z - self.z * other.y, self.z * other.x - self.x * other.z, self.x * other.y - self.y * other.x)
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a zero-length input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(*self * (T::one() / n))
        } else {
            None
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Angle to `other` in radians, robust near 0 and pi.
    pub fn angle_to(&self, other: &Self) -> T {
        self.cross(other).norm().atan2(self.dot(other))
    }

    pub fn cast<U: Scalar>(&self) -> Vec3<U> {
        Vec3::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.z.as_f64()))
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Scalar> From<[T; 3]> for Vec3<T> {
    fn from(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Proper rigid motion `p -> R p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform<T> {
    rotation: [[T; 3]; 3],
    translation: Vec3<T>,
}

impl<T: Scalar> RigidTransform<T> {
    /// Builds a transform, rejecting rotations that are not orthonormal with
    /// determinant +1. The tolerance is 1e-9, widened to the precision of `T`.
    pub fn new(rotation: [[T; 3]; 3], translation: Vec3<T>) -> Result<Self> {
        let tol = rotation_tolerance::<T>();
        for i in 0..3 {
            for j in 0..3 {
                let dot = rotation.iter().fold(T::zero(), |acc, row| acc + row[i] * row[j]);
                let expected = if i == j { T::one() } else { T::zero() };
                if !((dot - expected).abs() <= tol) {
                    return Err(Error::InvalidTransform(format!("rotation is not orthonormal: (R^T R)[{i}][{j}] = {dot}")));
                }
            }
        }
        let det = det3(&rotation);
        if !((det - T::one()).abs() <= tol) {
            return Err(Error::InvalidTransform(format!("rotation determinant is {det}, expected +1")));
        }
        if !translation.is_finite() {
            return Err(Error::InvalidTransform("translation is not finite".into()));
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self { rotation: identity3(), translation: Vec3::zero() }
    }

    pub fn from_translation(translation: Vec3<T>) -> Self {
        Self { rotation: identity3(), translation }
    }

    /// Rotation about +z by `angle` radians.
    pub fn yaw(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, l) = (T::zero(), T::one());
        Self { rotation: [[c, -s, o], [s, c, o], [o, o, l]], translation: Vec3::zero() }
    }

    /// Rotation about +x by `angle` radians.
    pub fn roll(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, l) = (T::zero(), T::one());
        Self { rotation: [[l, o, o], [o, c, -s], [o, s, c]], translation: Vec3::zero() }
    }

    pub fn rotation(&self) -> &[[T; 3]; 3] {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3<T> {
        self.translation
    }

    #[inline]
    pub fn rotate(&self, v: Vec3<T>) -> Vec3<T> {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    #[inline]
    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotate(p) + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.rotation;
        let b = &other.rotation;
        let mut rotation = [[T::zero(); 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Self { rotation, translation: self.apply(other.translation) }
    }

    pub fn inverse(&self) -> Self {
        let r = &self.rotation;
        let mut rotation = [[T::zero(); 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = r[j][i];
            }
        }
        let inv = Self { rotation, translation: Vec3::zero() };
        let t = inv.rotate(self.translation);
        Self { translation: -t, ..inv }
    }

    pub fn cast<U: Scalar>(&self) -> RigidTransform<U> {
        let mut rotation = [[U::zero(); 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = U::lit(self.rotation[i][j].as_f64());
            }
        }
        RigidTransform { rotation, translation: self.translation.cast() }
    }
}

fn identity3<T: Scalar>() -> [[T; 3]; 3] {
    let (o, l) = (T::zero(), T::one());
    [[l, o, o], [o, l, o], [o, o, l]]
}

fn det3<T: Scalar>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_is_right_handed() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let y = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(&y), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn rejects_reflections_and_shears() {
        let reflect = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(RigidTransform::new(reflect, Vec3::zero()).is_err());
        let shear = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(RigidTransform::new(shear, Vec3::zero()).is_err());
        let nan = [[f64::NAN, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(RigidTransform::new(nan, Vec3::zero()).is_err());
    }

    #[test]
    fn inverse_undoes_transform() {
        let t = RigidTransform::yaw(0.7f64).compose(&RigidTransform::from_translation(Vec3::new(1.0, -2.0, 3.0)));
        let p = Vec3::new(0.3, 0.4, -5.0);
        let back = t.inverse().apply(t.apply(p));
        assert!((back - p).norm() < 1e-12);
        assert!(RigidTransform::new(*t.rotation(), t.translation()).is_ok());
    }

    #[test]
    fn yaw_quarter_turn() {
        let t = RigidTransform::yaw(std::f64::consts::FRAC_PI_2);
        let p = t.apply(Vec3::new(1.0, 0.0, 0.0));
        assert!((p - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn f32_rotations_validate_at_their_precision() {
        let r = RigidTransform::<f64>::yaw(0.3).cast::<f32>();
        assert!(RigidTransform::new(*r.rotation(), r.translation()).is_ok());
    }
}
