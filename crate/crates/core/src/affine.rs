//! Integer lattice vectors, rational points and integral affine maps of the
//! plane.
//!
//! An integral affine map has a linear part in `GL(2, Z)`; translations are
//! rational. These are the symmetries of base diagrams, so every predicate in
//! the crate is invariant under them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatVec {
    pub x: i64,
    pub y: i64,
}

impl LatVec {
    pub const fn new(x: i64, y: i64) -> LatVec {
        LatVec { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn is_primitive(self) -> bool {
        !self.is_zero() && self.x.gcd(&self.y) == 1
    }

    /// `det(self, other)`, positive when `other` lies counterclockwise.
    pub fn cross(self, other: LatVec) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: LatVec) -> i64 {
        self.x * other.x + self.y * other.y
    }

    /// Rotation by a quarter turn counterclockwise. For an edge direction of
    /// a counterclockwise boundary walk this is the inward normal.
    pub fn rot90(self) -> LatVec {
        LatVec::new(-self.y, self.x)
    }

    pub fn to_point(self) -> Point {
        Point::new(Rat::int(self.x), Rat::int(self.y))
    }
}

impl fmt::Debug for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for LatVec {
    type Output = LatVec;
    fn add(self, rhs: LatVec) -> LatVec {
        LatVec::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for LatVec {
    type Output = LatVec;
    fn sub(self, rhs: LatVec) -> LatVec {
        LatVec::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for LatVec {
    type Output = LatVec;
    fn neg(self) -> LatVec {
        LatVec::new(-self.x, -self.y)
    }
}

impl Mul<LatVec> for i64 {
    type Output = LatVec;
    fn mul(self, rhs: LatVec) -> LatVec {
        LatVec::new(self * rhs.x, self * rhs.y)
    }
}

/// Divide out the content of `v`, keeping its direction.
pub fn primitive(v: LatVec) -> Result<LatVec> {
    if v.is_zero() {
        return Err(Error::DegenerateDirection);
    }
    let g = v.x.gcd(&v.y);
    Ok(LatVec::new(v.x / g, v.y / g))
}

/// Whether two primitive vectors form a basis of `Z^2`.
pub fn is_unimodular_pair(u: LatVec, v: LatVec) -> Result<bool> {
    for w in [u, v] {
        if !w.is_primitive() {
            return Err(Error::NotPrimitive(w.x, w.y));
        }
    }
    Ok(u.cross(v).abs() == 1)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Point {
        Point { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Point {
        Point::new(Rat::int(x), Rat::int(y))
    }

    pub fn origin() -> Point {
        Point::ints(0, 0)
    }

    pub fn cross(&self, other: &Point) -> Rat {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn scale(&self, k: &Rat) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    /// `self + k * v`.
    pub fn offset(&self, v: LatVec, k: &Rat) -> Point {
        Point::new(&self.x + k * v.x, &self.y + k * v.y)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = Rat::new(1, 2);
        Point::new((&self.x + &other.x) * &half, (&self.y + &other.y) * &half)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Split a rational vector as `lambda * p` with `p` primitive integral
    /// and `lambda > 0`. `lambda` is the lattice length of the vector.
    pub fn primitive_direction(&self) -> Result<(LatVec, Rat)> {
        if self.is_zero() {
            return Err(Error::DegenerateDirection);
        }
        let l = self.x.denom().lcm(self.y.denom());
        let xi: BigInt = self.x.numer() * (&l / self.x.denom());
        let yi: BigInt = self.y.numer() * (&l / self.y.denom());
        let g = xi.gcd(&yi);
        let px = (&xi / &g).to_i64().ok_or(Error::Overflow)?;
        let py = (&yi / &g).to_i64().ok_or(Error::Overflow)?;
        Ok((LatVec::new(px, py), Rat::from_big(g, l)))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

impl Add<&Point> for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub<&Point> for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

/// A 2x2 integer matrix, row major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IMat2(pub [[i64; 2]; 2]);

impl IMat2 {
    pub const IDENTITY: IMat2 = IMat2([[1, 0], [0, 1]]);
    /// The standard focus-focus monodromy.
    pub const SHEAR: IMat2 = IMat2([[1, 1], [0, 1]]);

    pub const fn new(m11: i64, m12: i64, m21: i64, m22: i64) -> IMat2 {
        IMat2([[m11, m12], [m21, m22]])
    }

    /// The matrix with columns `a` and `b`.
    pub fn from_columns(a: LatVec, b: LatVec) -> IMat2 {
        IMat2::new(a.x, b.x, a.y, b.y)
    }

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, v: LatVec) -> LatVec {
        let [[a, b], [c, d]] = self.0;
        LatVec::new(a * v.x + b * v.y, c * v.x + d * v.y)
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        let [[a, b], [c, d]] = self.0;
        Point::new(&p.x * a + &p.y * b, &p.x * c + &p.y * d)
    }

    pub fn mul(&self, rhs: &IMat2) -> IMat2 {
        let a = self.0;
        let b = rhs.0;
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        IMat2(out)
    }

    /// Inverse of a matrix with determinant `+1` or `-1`.
    pub fn inverse(&self) -> Result<IMat2> {
        let det = self.det();
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        let [[a, b], [c, d]] = self.0;
        Ok(IMat2::new(d * det, -b * det, -c * det, a * det))
    }

    /// Conjugate `self` by `p`: `p * self * p^-1`.
    pub fn conjugate_by(&self, p: &IMat2) -> Result<IMat2> {
        Ok(p.mul(self).mul(&p.inverse()?))
    }

    /// Whether the matrix is `GL(2, Z)`-conjugate to `[[1,1],[0,1]]`.
    ///
    /// Such a matrix is `I + N` with `N` nilpotent of rank one; `N` factors as
    /// `k * v * w^T` with `v`, `w` primitive, and the class is the standard
    /// shear exactly when the content `|k|` of `N` is one.
    pub fn is_standard_shear_conjugate(&self) -> bool {
        if self.det() != 1 || self.trace() != 2 || *self == IMat2::IDENTITY {
            return false;
        }
        let [[a, b], [c, d]] = self.0;
        let content = [a - 1, b, c, d - 1].iter().fold(0i64, |g, x| g.gcd(x));
        content == 1
    }
}

impl fmt::Debug for IMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// The shear fixing the primitive vector `v`: `w -> w + k * det(v, w) * v`.
pub fn shear_fixing(v: LatVec, k: i64) -> IMat2 {
    IMat2::new(
        1 - k * v.x * v.y,
        k * v.x * v.x,
        -k * v.y * v.y,
        1 + k * v.x * v.y,
    )
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: IMat2,
    translation: Point,
}

impl AffineMap {
    pub fn new(linear: IMat2, translation: Point) -> Result<AffineMap> {
        let det = linear.det();
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    pub fn identity() -> AffineMap {
        AffineMap {
            linear: IMat2::IDENTITY,
            translation: Point::origin(),
        }
    }

    pub fn translation_by(t: Point) -> AffineMap {
        AffineMap {
            linear: IMat2::IDENTITY,
            translation: t,
        }
    }

    pub fn linear(&self) -> &IMat2 {
        &self.linear
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn orientation(&self) -> i64 {
        self.linear.det()
    }

    pub fn apply(&self, p: &Point) -> Point {
        &self.linear.apply_point(p) + &self.translation
    }

    pub fn apply_vec(&self, v: LatVec) -> LatVec {
        self.linear.apply(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: self.linear.mul(&other.linear),
            translation: &self.linear.apply_point(&other.translation) + &self.translation,
        }
    }

    pub fn invert(&self) -> AffineMap {
        let inv = self
            .linear
            .inverse()
            .expect("affine maps are unimodular by construction");
        let t = inv.apply_point(&self.translation);
        AffineMap {
            linear: inv,
            translation: Point::new(-t.x, -t.y),
        }
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMap({:?} + {:?})", self.linear, self.translation)
    }
}

/// Solve `m * a = b` for an exact rational 2x2 system; `None` if singular.
pub(crate) fn solve2(m: [[Rat; 2]; 2], b: [Rat; 2]) -> Option<(Rat, Rat)> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return None;
    }
    let x = (&b[0] * &m[1][1] - &m[0][1] * &b[1]) / &det;
    let y = (&m[0][0] * &b[1] - &b[0] * &m[1][0]) / &det;
    Some((x, y))
}
