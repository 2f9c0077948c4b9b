//! Real quaternions and the sphere of imaginary units.
//!
//! `Quaternion` is a plain `Copy` value `w + xi + yj + zk`. `UnitImaginary`
//! is a point of the two-sphere `S = { q : q² = -1 }`, stored as a unit
//! 3-vector and renormalized on construction.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::EPS0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Pure imaginary quaternion from a 3-vector.
    #[inline]
    pub const fn imaginary(v: [f64; 3]) -> Self {
        Quaternion::new(0.0, v[0], v[1], v[2])
    }

    #[inline]
    pub fn vector(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse `conj(q) / |q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2.sqrt() <= EPS0 {
            return Err(Error::ZeroDivision);
        }
        Ok(self.conj() / n2)
    }

    /// Real part of the quaternion.
    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Euclidean inner product on R⁴; equals `Re(conj(self) * other)`.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Returns `x + y I` with `y >= 0`. `I` is `None` when `q` is real.
    pub fn slice_decompose(self) -> (f64, f64, Option<UnitImaginary>) {
        let v = self.vector();
        let y = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if y < EPS0 {
            (self.w, 0.0, None)
        } else {
            (self.w, y, Some(UnitImaginary::from_normalized([v[0] / y, v[1] / y, v[2] / y])))
        }
    }

    /// Integer power, `q⁰ = 1`; negative exponents use the inverse.
    pub fn powi(self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Quaternion::ONE;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Draws four independent standard normal components.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
    }

    /// Uniformly distributed unit quaternion.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Quaternion::random(rng);
            let n = q.norm();
            if n > 1e-6 {
                return q / n;
            }
        }
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Quaternion {
    #[inline]
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        <[f64; 4]>::deserialize(d).map(Quaternion::from_array)
    }
}

/// A point of the sphere of imaginary units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitImaginary {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitImaginary {
    pub const I: UnitImaginary = UnitImaginary { x: 1.0, y: 0.0, z: 0.0 };
    pub const J: UnitImaginary = UnitImaginary { x: 0.0, y: 1.0, z: 0.0 };
    pub const K: UnitImaginary = UnitImaginary { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes `v`. Fails with `DegenerateUnits` on a (near) zero vector.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > EPS0) || !n.is_finite() {
            return Err(Error::DegenerateUnits);
        }
        Ok(UnitImaginary::from_normalized([v[0] / n, v[1] / n, v[2] / n]))
    }

    fn from_normalized(v: [f64; 3]) -> Self {
        // one more pass keeps |v| = 1 at the last ulp
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        UnitImaginary { x: v[0] / n, y: v[1] / n, z: v[2] / n }
    }

    /// Imaginary part of `q`, normalized.
    pub fn from_quaternion(q: Quaternion) -> Result<Self> {
        UnitImaginary::new(q.vector())
    }

    #[inline]
    pub fn vector(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn dot(&self, other: &UnitImaginary) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Angle between the two units, in radians.
    pub fn angle_to(&self, other: &UnitImaginary) -> f64 {
        let c = self.cross(other);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }

    pub fn cross(&self, o: &UnitImaginary) -> [f64; 3] {
        [self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x]
    }

    /// Uniform on S: a normalized vector of three independent Gaussians.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
            if let Ok(u) = UnitImaginary::new(v) {
                return u;
            }
        }
    }
}

impl Neg for UnitImaginary {
    type Output = UnitImaginary;
    fn neg(self) -> UnitImaginary {
        UnitImaginary { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl From<UnitImaginary> for Quaternion {
    fn from(u: UnitImaginary) -> Quaternion {
        u.to_quaternion()
    }
}

impl Serialize for UnitImaginary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vector().serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitImaginary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 3]>::deserialize(d)?;
        UnitImaginary::new(v).map_err(serde::de::Error::custom)
    }
}

/// Splits `K J` into scalar and vector parts: returns `(d, c)` with
/// `K J = -d + c`, where `d = <K, J>` and `c = K × J` is pure imaginary.
pub fn dot_cross_decompose(k: &UnitImaginary, j: &UnitImaginary) -> (f64, Quaternion) {
    (k.dot(j), Quaternion::imaginary(k.cross(j)))
}

/// `e^{tI} = cos t + I sin t`.
pub fn exp_unit(t: f64, unit: &UnitImaginary) -> Quaternion {
    let (s, c) = t.sin_cos();
    let v = unit.vector();
    Quaternion::new(c, v[0] * s, v[1] * s, v[2] * s)
}
