//! Hyperbolic geometry of unit-determinant 2×2 real matrices acting on the
//! upper half-plane by Möbius transformations.
//!
//! Matrices are taken up to sign, so every trace comparison goes through
//! `|tr|`. Boundary points carry an explicit point at infinity.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Trace band around 2 separating hyperbolic, parabolic and elliptic elements.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Boundary points closer than this (chordal distance) are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Sl2Error {
    #[error("matrix is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),
    #[error("determinant {0} is not positive")]
    BadDeterminant(f64),
    #[error("axes meet at infinity or are tangent (endpoint separation {0:e})")]
    Degenerate(f64),
    #[error("axes do not cross")]
    NoCrossing,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn diagonal(t: T) -> Self {
        Self::new(t, T::zero(), T::zero(), t.recip())
    }

    /// Rotation by `angle` about `i`.
    pub fn rotation(angle: T) -> Self {
        let (s, c) = (angle / T::lit(2.0)).sin_cos();
        Self::new(c, s, -s, c)
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    /// Inverse of a unit-determinant matrix.
    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// Rescale to determinant one.
    pub fn normalized(&self) -> Result<Self, Sl2Error> {
        let det = self.det();
        if det <= T::zero() || !det.is_finite() {
            return Err(Sl2Error::BadDeterminant(det.to_f64().unwrap_or(f64::NAN)));
        }
        let s = det.sqrt().recip();
        Ok(Self::new(self.a * s, self.b * s, self.c * s, self.d * s))
    }

    /// Projective representative whose larger-magnitude diagonal entry is nonnegative.
    pub fn projective_canonical(&self) -> Self {
        let lead = if self.a.abs() >= self.d.abs() { self.a } else { self.d };
        if lead < T::zero() {
            Self::new(-self.a, -self.b, -self.c, -self.d)
        } else {
            *self
        }
    }

    /// Entrywise distance to the nearer of ±identity.
    pub fn distance_from_identity(&self) -> T {
        let plus = (self.a - T::one())
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max((self.d - T::one()).abs());
        let minus = (self.a + T::one())
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max((self.d + T::one()).abs());
        plus.min(minus)
    }

    pub fn max_entry_diff(&self, other: &Self) -> T {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn act(&self, z: HPoint<T>) -> HPoint<T> {
        // (a z + b) / (c z + d) with z = x + iy
        let nr = self.a * z.x + self.b;
        let ni = self.a * z.y;
        let dr = self.c * z.x + self.d;
        let di = self.c * z.y;
        let den = dr * dr + di * di;
        HPoint {
            x: (nr * dr + ni * di) / den,
            y: (ni * dr - nr * di) / den,
        }
    }

    pub fn act_boundary(&self, p: Boundary<T>) -> Boundary<T> {
        match p {
            Boundary::Infinity => {
                if self.c == T::zero() {
                    Boundary::Infinity
                } else {
                    Boundary::Finite(self.a / self.c)
                }
            }
            Boundary::Finite(x) => {
                let den = self.c * x + self.d;
                if den == T::zero() {
                    Boundary::Infinity
                } else {
                    Boundary::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn classify(&self) -> Kind {
        let t = self.trace().abs();
        let two = T::lit(2.0);
        let tol = T::lit(CLASSIFY_TOL);
        if t > two + tol {
            Kind::Hyperbolic
        } else if (t - two).abs() <= tol {
            Kind::Parabolic
        } else {
            Kind::Elliptic
        }
    }

    fn require_hyperbolic(&self) -> Result<(), Sl2Error> {
        match self.classify() {
            Kind::Hyperbolic => Ok(()),
            _ => Err(Sl2Error::NotHyperbolic(
                self.trace().abs().to_f64().unwrap_or(f64::NAN),
            )),
        }
    }

    /// Translation length `2·arccosh(|tr|/2)`.
    pub fn translation_length(&self) -> Result<T, Sl2Error> {
        self.require_hyperbolic()?;
        Ok(T::lit(2.0) * (self.trace().abs() / T::lit(2.0)).acosh())
    }

    /// Attracting fixed point of a hyperbolic matrix.
    ///
    /// A fixed point `z` has eigenvector `(z, 1)` with eigenvalue `c z + d`;
    /// the attracting one belongs to the eigenvalue `λ` with `|λ| > 1`. Of the
    /// two equivalent formulas `z = b / (λ − a) = (λ − d) / c` the one with the
    /// larger denominator is used; at least one of them is `≥ √(tr² − 4) / 2`.
    fn attracting_fixed_point(&self) -> Boundary<T> {
        let m = self.positive_trace();
        let tr = m.trace();
        let disc = (tr * tr - T::lit(4.0)).max(T::zero()).sqrt();
        let lambda = (tr + disc) / T::lit(2.0);
        let (da, dd) = (lambda - m.a, lambda - m.d);
        if da.abs() >= dd.abs() {
            Boundary::Finite(m.b / da)
        } else if m.c == T::zero() {
            Boundary::Infinity
        } else {
            Boundary::Finite(dd / m.c)
        }
    }

    /// Representative with non-negative trace.
    pub fn positive_trace(&self) -> Self {
        if self.trace() < T::zero() {
            Self::new(-self.a, -self.b, -self.c, -self.d)
        } else {
            *self
        }
    }

    pub fn axis(&self) -> Result<Axis<T>, Sl2Error> {
        let tau = self.translation_length()?;
        Ok(Axis {
            repelling: self.inverse().attracting_fixed_point(),
            attracting: self.attracting_fixed_point(),
            translation_length: tau,
        })
    }

    pub fn cast<U: Scalar>(&self) -> Mat2<U> {
        let f = |x: T| U::from_f64(x.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan);
        Mat2::new(f(self.a), f(self.b), f(self.c), f(self.d))
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<T: Scalar> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Möbius map sending `(z1, z2, z3)` to `(0, 1, ∞)`.
pub fn map_to_zero_one_infinity<T: Scalar>(
    z1: Boundary<T>,
    z2: Boundary<T>,
    z3: Boundary<T>,
) -> Mat2<T> {
    use Boundary::*;
    let one = T::one();
    let zero = T::zero();
    match (z1, z2, z3) {
        (Infinity, Finite(b), Finite(c)) => Mat2::new(zero, b - c, one, -c),
        (Finite(a), Infinity, Finite(c)) => Mat2::new(one, -a, one, -c),
        (Finite(a), Finite(b), Infinity) => Mat2::new(one, -a, zero, b - a),
        (Finite(a), Finite(b), Finite(c)) => {
            Mat2::new(b - c, -a * (b - c), b - a, -c * (b - a))
        }
        _ => Mat2::new(T::nan(), T::nan(), T::nan(), T::nan()),
    }
}

/// Möbius map sending the boundary triple `from` to `to`, normalised to
/// determinant one. Errors when the map would reverse orientation.
pub fn three_point_map<T: Scalar>(
    from: [Boundary<T>; 3],
    to: [Boundary<T>; 3],
) -> Result<Mat2<T>, Sl2Error> {
    let s = map_to_zero_one_infinity(from[0], from[1], from[2]);
    let t = map_to_zero_one_infinity(to[0], to[1], to[2]);
    let t_inv = Mat2::new(t.d, -t.b, -t.c, t.a);
    let m = t_inv * s;
    let det_sign = s.det() * t.det();
    if det_sign <= T::zero() {
        return Err(Sl2Error::BadDeterminant(
            det_sign.to_f64().unwrap_or(f64::NAN),
        ));
    }
    m.normalized()
}

/// Point of the real projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary<T> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> Boundary<T> {
    /// Chordal distance on the circle at infinity (diameter-2 circle).
    pub fn chordal_distance(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        match (*self, *other) {
            (Boundary::Infinity, Boundary::Infinity) => T::zero(),
            (Boundary::Finite(x), Boundary::Infinity) | (Boundary::Infinity, Boundary::Finite(x)) => {
                two / (T::one() + x * x).sqrt()
            }
            (Boundary::Finite(x), Boundary::Finite(y)) => {
                two * (x - y).abs() / ((T::one() + x * x) * (T::one() + y * y)).sqrt()
            }
        }
    }

    /// Angle on the circle in `[0, 2π)`, with 0 at the origin and π at infinity.
    pub fn angle(&self) -> T {
        match *self {
            Boundary::Infinity => T::PI(),
            Boundary::Finite(x) => {
                let th = T::lit(2.0) * x.atan();
                if th < T::zero() {
                    th + T::TAU()
                } else {
                    th
                }
            }
        }
    }

    pub fn from_angle(theta: T) -> Self {
        let tau = T::TAU();
        let th = theta - (theta / tau).floor() * tau;
        if (th - T::PI()).abs() <= T::epsilon() * T::lit(8.0) {
            Boundary::Infinity
        } else {
            Boundary::Finite((th / T::lit(2.0)).tan())
        }
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Boundary::Finite(x) => Some(x),
            Boundary::Infinity => None,
        }
    }
}

impl<T: Scalar> fmt::Display for Boundary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Finite(x) => write!(f, "{x}"),
            Boundary::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Boundary<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Boundary::Finite(x) => s.serialize_f64(*x),
            Boundary::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Boundary<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Boundary::Finite(x)),
            Raw::Str(s) if s == "inf" => Ok(Boundary::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad boundary point {s:?}"))),
        }
    }
}

/// Point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> HPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one())
    }

    pub fn distance(&self, o: &Self) -> T {
        let dx = self.x - o.x;
        let dy = self.y - o.y;
        let arg = T::one() + (dx * dx + dy * dy) / (T::lit(2.0) * self.y * o.y);
        arg.max(T::one()).acosh()
    }
}

/// Oriented geodesic of a hyperbolic isometry, from `repelling` to `attracting`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub repelling: Boundary<T>,
    pub attracting: Boundary<T>,
    pub translation_length: T,
}

/// Relative position of two oriented geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRelation {
    Crossing,
    Disjoint,
    /// Same geodesic, either orientation.
    Coincident,
}

/// Transverse crossing of two oriented geodesics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<T> {
    pub point: HPoint<T>,
    /// Orientation of the frame (tangent of the first, tangent of the second).
    pub sign: i32,
    /// Angle from the first positive direction to the second, in `(0, π)`.
    pub angle: T,
}

impl<T: Scalar> Axis<T> {
    pub fn from_endpoints(repelling: Boundary<T>, attracting: Boundary<T>) -> Self {
        Self {
            repelling,
            attracting,
            translation_length: T::zero(),
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            repelling: self.attracting,
            attracting: self.repelling,
            translation_length: self.translation_length,
        }
    }

    /// Image under a Möbius map.
    pub fn image(&self, m: &Mat2<T>) -> Self {
        Self {
            repelling: m.act_boundary(self.repelling),
            attracting: m.act_boundary(self.attracting),
            translation_length: self.translation_length,
        }
    }

    /// Orientation-preserving map sending this axis to the imaginary axis,
    /// repelling end to 0 and attracting end to ∞.
    pub fn normalizing_map(&self) -> Mat2<T> {
        let one = T::one();
        let zero = T::zero();
        match (self.repelling, self.attracting) {
            (Boundary::Finite(u), Boundary::Infinity) => Mat2::new(one, -u, zero, one),
            (Boundary::Infinity, Boundary::Finite(v)) => Mat2::new(zero, -one, one, -v),
            (Boundary::Finite(u), Boundary::Finite(v)) => {
                let s = if u > v { one } else { -one };
                let m = Mat2::new(s, -s * u, one, -v);
                let k = (s * (u - v)).sqrt().recip();
                Mat2::new(m.a * k, m.b * k, m.c * k, m.d * k)
            }
            (Boundary::Infinity, Boundary::Infinity) => Mat2::identity(),
        }
    }

    /// Signed position of a point of the axis along it (log-height in the
    /// normalised frame).
    pub fn coordinate(&self, p: HPoint<T>) -> T {
        self.normalizing_map().act(p).y.ln()
    }

    /// Point of the axis at a given coordinate.
    pub fn point_at(&self, coordinate: T) -> HPoint<T> {
        let n = self.normalizing_map();
        n.inverse().act(HPoint::new(T::zero(), coordinate.exp()))
    }

    fn min_endpoint_separation(&self, other: &Self) -> [T; 4] {
        [
            self.repelling.chordal_distance(&other.repelling),
            self.repelling.chordal_distance(&other.attracting),
            self.attracting.chordal_distance(&other.repelling),
            self.attracting.chordal_distance(&other.attracting),
        ]
    }

    /// Relative position with an explicit degeneracy threshold.
    pub fn relation_with_tol(&self, other: &Self, tol: T) -> Result<AxisRelation, Sl2Error> {
        let [rr, ra, ar, aa] = self.min_endpoint_separation(other);
        if (rr <= tol && aa <= tol) || (ra <= tol && ar <= tol) {
            return Ok(AxisRelation::Coincident);
        }
        let min = rr.min(ra).min(ar).min(aa);
        if min <= tol {
            return Err(Sl2Error::Degenerate(min.to_f64().unwrap_or(f64::NAN)));
        }
        let n = self.normalizing_map();
        let (p, q) = match (
            n.act_boundary(other.repelling),
            n.act_boundary(other.attracting),
        ) {
            (Boundary::Finite(p), Boundary::Finite(q)) => (p, q),
            _ => return Err(Sl2Error::Degenerate(0.0)),
        };
        if (p < T::zero()) != (q < T::zero()) {
            Ok(AxisRelation::Crossing)
        } else {
            Ok(AxisRelation::Disjoint)
        }
    }

    pub fn relation(&self, other: &Self) -> Result<AxisRelation, Sl2Error> {
        self.relation_with_tol(other, T::lit(DEGENERACY_TOL))
    }

    /// Crossing point, orientation sign and angle, given the axes cross.
    pub fn crossing_with_tol(&self, other: &Self, tol: T) -> Result<Crossing<T>, Sl2Error> {
        if self.relation_with_tol(other, tol)? != AxisRelation::Crossing {
            return Err(Sl2Error::NoCrossing);
        }
        let n = self.normalizing_map();
        let p = n.act_boundary(other.repelling).finite().unwrap_or_else(T::nan);
        let q = n.act_boundary(other.attracting).finite().unwrap_or_else(T::nan);
        // In the normalised frame the first axis is the upward imaginary axis and
        // the second is the half-circle from p to q, meeting it at height √(−pq).
        let y = (-p * q).sqrt();
        let center = (p + q) / T::lit(2.0);
        let radius = (q - p).abs() / T::lit(2.0);
        let dir = if q > p { T::one() } else { -T::one() };
        // unit tangent of the second geodesic at (0, y) is (y, center)·dir/radius
        let ty = dir * center / radius;
        let tx = y / radius;
        let sign = if q > p { -1 } else { 1 };
        let angle = tx.atan2(ty);
        Ok(Crossing {
            point: n.inverse().act(HPoint::new(T::zero(), y)),
            sign,
            angle,
        })
    }

    pub fn crossing(&self, other: &Self) -> Result<Crossing<T>, Sl2Error> {
        self.crossing_with_tol(other, T::lit(DEGENERACY_TOL))
    }
}

/// True iff the two geodesics cross transversally. Errors on shared or nearly
/// shared endpoints.
pub fn axes_cross<T: Scalar>(a1: &Axis<T>, a2: &Axis<T>) -> Result<bool, Sl2Error> {
    match a1.relation(a2)? {
        AxisRelation::Crossing => Ok(true),
        AxisRelation::Disjoint => Ok(false),
        AxisRelation::Coincident => Err(Sl2Error::Degenerate(0.0)),
    }
}

pub fn crossing_point_and_sign<T: Scalar>(
    a1: &Axis<T>,
    a2: &Axis<T>,
) -> Result<(HPoint<T>, i32), Sl2Error> {
    let c = a1.crossing(a2)?;
    Ok((c.point, c.sign))
}

/// Angle `μ = π − θ` of the triangle used in the length comparison, where `θ`
/// is the angle between the positive directions of two crossing axes.
pub fn interior_angle<T: Scalar>(a1: &Axis<T>, a2: &Axis<T>) -> Result<T, Sl2Error> {
    Ok(T::PI() - a1.crossing(a2)?.angle)
}

/// Third side `c` of a hyperbolic triangle with sides `a`, `b` enclosing `gamma`:
/// `cosh c = cosh a cosh b − sinh a sinh b cos γ`.
pub fn hyperbolic_cosine_rule<T: Scalar>(side_a: T, side_b: T, angle_gamma: T) -> Result<T, Sl2Error> {
    if !(side_a > T::zero() && side_b > T::zero()) {
        return Err(Sl2Error::OutOfRange(format!(
            "sides must be positive, got {side_a} and {side_b}"
        )));
    }
    if !(angle_gamma > T::zero() && angle_gamma < T::PI()) {
        return Err(Sl2Error::OutOfRange(format!(
            "angle {angle_gamma} not in (0, π)"
        )));
    }
    // cosh(a − b) + 2 sinh a sinh b sin²(γ/2) avoids cancellation for small γ
    let half = (angle_gamma / T::lit(2.0)).sin();
    let ch = (side_a - side_b).cosh() + T::lit(2.0) * side_a.sinh() * side_b.sinh() * half * half;
    Ok(ch.max(T::one()).acosh())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(x: f64) -> Boundary<f64> {
        Boundary::Finite(x)
    }

    fn unit_circle_translation(s: f64) -> Mat2<f64> {
        Mat2::new(s.cosh(), s.sinh(), s.sinh(), s.cosh())
    }

    #[test]
    fn classification() {
        assert_eq!(Mat2::diagonal(2.0f64).classify(), Kind::Hyperbolic);
        assert_eq!(Mat2::new(1.0f64, 1.0, 0.0, 1.0).classify(), Kind::Parabolic);
        assert_eq!(
            Mat2::rotation(std::f64::consts::FRAC_PI_3).classify(),
            Kind::Elliptic
        );
        assert_eq!(Mat2::diagonal(2.0f32).classify(), Kind::Hyperbolic);
    }

    #[test]
    fn diagonal_translation_length() {
        let m = Mat2::diagonal(2.0f64);
        assert!((m.translation_length().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        let m32 = Mat2::diagonal(2.0f32);
        assert!((m32.translation_length().unwrap() - 2.0 * 2f32.ln()).abs() < 1e-5);
        assert!(Mat2::new(1.0f64, 1.0, 0.0, 1.0).translation_length().is_err());
    }

    #[test]
    fn axis_of_diagonal_and_unit_circle() {
        let ax = Mat2::diagonal(2.0f64).axis().unwrap();
        assert_eq!(ax.attracting, Boundary::Infinity);
        assert_eq!(ax.repelling, fin(0.0));
        let ax = unit_circle_translation(0.7).axis().unwrap();
        assert!((ax.attracting.finite().unwrap() - 1.0).abs() < 1e-12);
        assert!((ax.repelling.finite().unwrap() + 1.0).abs() < 1e-12);
        // negated matrix is the same isometry
        let m = unit_circle_translation(0.7);
        let neg = Mat2::new(-m.a, -m.b, -m.c, -m.d);
        assert_eq!(neg.axis().unwrap().attracting, m.axis().unwrap().attracting);
    }

    #[test]
    fn crossing_examples() {
        let imag = Axis::from_endpoints(fin(0.0), Boundary::Infinity);
        let circ = Axis::from_endpoints(fin(-1.0), fin(1.0));
        assert!(axes_cross(&imag, &circ).unwrap());
        let (p, s) = crossing_point_and_sign(&imag, &circ).unwrap();
        assert!((p.x).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
        assert_eq!(s, -1);
        let (p2, s2) = crossing_point_and_sign(&circ, &imag).unwrap();
        assert!((p2.x).abs() < 1e-12 && (p2.y - 1.0).abs() < 1e-12);
        assert_eq!(s2, 1);
        let (_, s3) = crossing_point_and_sign(&imag.reversed(), &circ).unwrap();
        assert_eq!(s3, 1);
        let c = imag.crossing(&circ).unwrap();
        assert!((c.angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let a = Axis::from_endpoints(fin(0.0), fin(1.0));
        let b = Axis::from_endpoints(fin(2.0), fin(3.0));
        assert!(!axes_cross(&a, &b).unwrap());
        assert_eq!(imag.crossing(&Axis::from_endpoints(fin(1.0), fin(2.0))), Err(Sl2Error::NoCrossing));
    }

    #[test]
    fn degenerate_axes() {
        let a = Axis::from_endpoints(fin(0.0), fin(1.0));
        let b = Axis::from_endpoints(fin(1.0 + 1e-12), fin(3.0));
        assert!(matches!(axes_cross(&a, &b), Err(Sl2Error::Degenerate(_))));
        assert!(axes_cross(&a, &a.reversed()).is_err());
        assert_eq!(a.relation(&a.reversed()), Ok(AxisRelation::Coincident));
    }

    #[test]
    fn cosine_rule() {
        let (a, b) = (0.8f64, 1.3f64);
        let c = hyperbolic_cosine_rule(a, b, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((c.cosh() - a.cosh() * b.cosh()).abs() < 1e-12);
        let c = hyperbolic_cosine_rule(a, a, std::f64::consts::PI - 1e-7).unwrap();
        assert!((c - 2.0 * a).abs() < 1e-6);
        assert!(hyperbolic_cosine_rule(a, b, 0.0).is_err());
        assert!(hyperbolic_cosine_rule(a, b, 4.0).is_err());
        assert!(hyperbolic_cosine_rule(-1.0, b, 1.0).is_err());
    }

    #[test]
    fn three_point_maps() {
        let m = three_point_map(
            [fin(0.0), fin(1.0), Boundary::Infinity],
            [fin(0.0), fin(4.0), Boundary::Infinity],
        )
        .unwrap();
        assert!(m.max_entry_diff(&Mat2::diagonal(2.0)) < 1e-12);
        assert!(three_point_map(
            [fin(0.0), fin(1.0), Boundary::Infinity],
            [fin(1.0), fin(0.0), Boundary::Infinity],
        )
        .is_err());
    }

    #[test]
    fn coordinates_along_axis() {
        let ax = unit_circle_translation(0.4).axis().unwrap();
        let p = ax.point_at(0.3);
        assert!((ax.coordinate(p) - 0.3).abs() < 1e-12);
        let m = unit_circle_translation(0.4);
        let q = m.act(p);
        assert!((ax.coordinate(q) - 0.3 - m.translation_length().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn angles_round_trip() {
        for x in [-3.0, -0.2, 0.0, 0.5, 7.0] {
            let b = fin(x);
            match Boundary::from_angle(b.angle()) {
                Boundary::Finite(y) => assert!((x - y).abs() < 1e-12),
                Boundary::Infinity => panic!(),
            }
        }
        assert_eq!(Boundary::<f64>::Infinity.angle(), std::f64::consts::PI);
        assert_eq!(Boundary::from_angle(std::f64::consts::PI), Boundary::<f64>::Infinity);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sl2() -> impl Strategy<Value = Mat2<f64>> {
            (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
                .prop_filter("invertible corner", |(a, _, _)| a.abs() > 0.1)
                .prop_map(|(a, b, c)| Mat2::new(a, b, c, (1.0 + b * c) / a))
        }

        fn point() -> impl Strategy<Value = HPoint<f64>> {
            (-5.0f64..5.0, 0.05f64..5.0).prop_map(|(x, y)| HPoint::new(x, y))
        }

        proptest! {
            #[test]
            fn action_is_a_homomorphism(m in sl2(), n in sl2(), z in point()) {
                let lhs = (m * n).act(z);
                let rhs = m.act(n.act(z));
                prop_assert!(lhs.distance(&rhs) < 1e-6 * (1.0 + lhs.y.abs().recip()));
            }

            #[test]
            fn isometry(m in sl2(), z in point(), w in point()) {
                let d = z.distance(&w);
                prop_assert!((m.act(z).distance(&m.act(w)) - d).abs() <= 1e-7 * (1.0 + d));
            }

            #[test]
            fn translation_length_is_conjugation_invariant(s in 0.2f64..4.0, g in sl2()) {
                let m = Mat2::new(s.cosh(), s.sinh(), s.sinh(), s.cosh());
                let c = g * m * g.inverse();
                prop_assert!((c.translation_length().unwrap() - 2.0 * s).abs() < 1e-6);
            }

            #[test]
            fn inverse_and_det(m in sl2()) {
                prop_assert!((m.det() - 1.0).abs() < 1e-9);
                prop_assert!((m * m.inverse()).max_entry_diff(&Mat2::identity()) < 1e-8 * (1.0 + m.to_array().iter().map(|x| x * x).sum::<f64>()));
            }
        }
    }
}
