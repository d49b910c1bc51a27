//! Floating-point arithmetic on PSL₂(ℂ): classification by trace, complex
//! length, trace-formula weights, powers and a canonical representative
//! modulo sign.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Mul, Neg};

/// Default tolerance for algebraic predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Reduce an angle to the branch (−π, π].
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance between two angles on the circle ℝ/2πℤ, in [0, π].
pub fn circle_distance(a: f64, b: f64) -> f64 {
    reduce_angle(a - b).abs()
}

/// A 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    /// Real-entry constructor.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// diag(λ, 1/λ).
    pub fn diagonal(lambda: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(lambda, zero, zero, lambda.inv())
    }

    /// The diagonal element with complex length `length + i·holonomy`.
    pub fn from_complex_length(length: f64, holonomy: f64) -> Self {
        Self::diagonal(Complex64::new(length / 2.0, holonomy / 2.0).exp())
    }

    /// Entries as (Re a, Im a, Re b, Im b, Re c, Im c, Re d, Im d).
    pub fn to_reals(&self) -> [f64; 8] {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
    }

    pub fn from_reals(r: [f64; 8]) -> Self {
        Self::new(
            Complex64::new(r[0], r[1]),
            Complex64::new(r[2], r[3]),
            Complex64::new(r[4], r[5]),
            Complex64::new(r[6], r[7]),
        )
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Adjugate, which is the inverse for unit determinant.
    pub fn adjugate(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// Inverse for a general invertible matrix.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        let adj = self.adjugate();
        Self::new(adj.a / det, adj.b / det, adj.c / det, adj.d / det)
    }

    /// Integer power by repeated squaring; negative exponents use the inverse.
    pub fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inverse() } else { *self };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Maximum modulus of the entries.
    pub fn max_abs(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    /// Entrywise max-modulus distance.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm())
    }

    /// Distance in PSL₂(ℂ): the smaller of the distances to `other` and `−other`.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        self.distance(other).min(self.distance(&-*other))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// A unit-determinant matrix in a fixed sign normalization, optionally
/// carrying the generator word that produced it.
///
/// Words encode generator `i` as `i + 1` and its inverse as `-(i + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalElement {
    matrix: Mat2,
    word: Option<Vec<i32>>,
}

/// Grid-rounded encoding of a canonical matrix.
pub type CanonicalKey = [i64; 8];

impl CanonicalElement {
    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn word(&self) -> Option<&[i32]> {
        self.word.as_deref()
    }

    pub fn with_word(mut self, word: Vec<i32>) -> Self {
        self.word = Some(word);
        self
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Inverse, canonicalized; the word (if any) is inverted too.
    pub fn inverse(&self) -> Self {
        let word = self
            .word
            .as_ref()
            .map(|w| w.iter().rev().map(|g| -g).collect());
        Self {
            matrix: sign_normalize(self.matrix.adjugate(), DEFAULT_TOL),
            word,
        }
    }

    /// Key on the `tol` grid; shared by `m` and `−m`.
    pub fn key(&self, tol: f64) -> CanonicalKey {
        grid_key(&self.matrix, tol)
    }

    /// Key shared by `m`, `−m`, `m⁻¹` and `−m⁻¹`.
    pub fn inverse_closed_key(&self, tol: f64) -> CanonicalKey {
        let own = self.key(tol);
        let inv = grid_key(&sign_normalize(self.matrix.adjugate(), tol), tol);
        own.min(inv)
    }
}

fn grid_key(m: &Mat2, tol: f64) -> CanonicalKey {
    let r = m.to_reals();
    let mut key = [0i64; 8];
    for (k, x) in key.iter_mut().zip(r) {
        *k = (x / tol).round() as i64;
    }
    key
}

/// Choose between `m` and `−m` so that the first coordinate (in the order
/// Re a, Im a, Re b, …) exceeding `tol` in modulus is positive.
fn sign_normalize(m: Mat2, tol: f64) -> Mat2 {
    for x in m.to_reals() {
        if x.abs() > tol {
            return if x > 0.0 { m } else { -m };
        }
    }
    m
}

/// Renormalize to unit determinant and fix the PSL sign.
///
/// Fails with `SingularMatrix` when `|det| ≤ tol`.
pub fn canonicalize(raw: Mat2, tol: f64) -> Result<CanonicalElement> {
    let det = raw.det();
    if !(det.norm() > tol) {
        return Err(Error::SingularMatrix(det.norm()));
    }
    let m = raw.scale(det.sqrt().inv());
    let det1 = m.det();
    if (det1 - 1.0).norm() > DEFAULT_TOL.max(tol) {
        return Err(Error::NonUnitDeterminant {
            det: det1.norm(),
            tol,
        });
    }
    Ok(CanonicalElement {
        matrix: sign_normalize(m, tol),
        word: None,
    })
}

/// Accept a matrix whose determinant must already be 1 within `tol`.
pub fn canonicalize_unit(raw: Mat2, tol: f64) -> Result<CanonicalElement> {
    let det = raw.det();
    if (det - 1.0).norm() > tol {
        return Err(Error::NonUnitDeterminant {
            det: det.norm(),
            tol,
        });
    }
    canonicalize(raw, tol)
}

/// Conjugacy-invariant type of an element of PSL₂(ℂ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementClass {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
    Loxodromic,
}

impl ElementClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ElementClass::Identity => "identity",
            ElementClass::Parabolic => "parabolic",
            ElementClass::Elliptic => "elliptic",
            ElementClass::Hyperbolic => "hyperbolic",
            ElementClass::Loxodromic => "loxodromic",
        }
    }

    /// Hyperbolic or loxodromic: the elements that contribute closed geodesics.
    pub fn has_axis(&self) -> bool {
        matches!(self, ElementClass::Hyperbolic | ElementClass::Loxodromic)
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classify by the square of the trace. Tolerances on tr² are relative to
/// max(1, |tr²|); the determinant check is relative to max(1, ‖m‖∞²), since
/// long products lose absolute precision in det.
pub fn classify(m: &Mat2, tol: f64) -> Result<ElementClass> {
    let det = m.det();
    let scale = m.max_abs().max(1.0);
    if (det - 1.0).norm() > tol * scale * scale {
        return Err(Error::NonUnitDeterminant {
            det: det.norm(),
            tol,
        });
    }
    let id = Mat2::identity();
    if m.projective_distance(&id) <= tol * m.max_abs().max(1.0) {
        return Ok(ElementClass::Identity);
    }
    Ok(classify_trace(m.trace(), tol))
}

/// Classification of a non-identity element from its trace alone.
pub fn classify_trace(trace: Complex64, tol: f64) -> ElementClass {
    let t2 = trace * trace;
    let scale = t2.norm().max(1.0);
    if (t2 - 4.0).norm() <= tol * scale {
        return ElementClass::Parabolic;
    }
    if t2.im.abs() <= tol * scale {
        if t2.re > 4.0 {
            return ElementClass::Hyperbolic;
        }
        if t2.re >= -tol * scale {
            return ElementClass::Elliptic;
        }
    }
    ElementClass::Loxodromic
}

/// Translation length and rotation angle of a closed geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexLength {
    pub length: f64,
    pub holonomy: f64,
}

impl ComplexLength {
    /// Builds a complex length, reducing the holonomy to (−π, π].
    pub fn new(length: f64, holonomy: f64) -> Self {
        Self {
            length,
            holonomy: reduce_angle(holonomy),
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.length, self.holonomy)
    }
}

/// Complex length from the trace: λ + 1/λ = tr with |λ| ≥ 1,
/// length = 2 ln|λ|, holonomy = 2 arg λ reduced to (−π, π].
///
/// Invariant under tr ↦ −tr (the PSL sign).
pub fn complex_length_from_trace(trace: Complex64) -> ComplexLength {
    let disc = (trace * trace - 4.0).sqrt();
    let plus = trace + disc;
    let minus = trace - disc;
    let lambda = if plus.norm() >= minus.norm() { plus } else { minus } * 0.5;
    let length = (2.0 * lambda.norm().ln()).max(0.0);
    ComplexLength::new(length, 2.0 * lambda.arg())
}

/// Complex length of a hyperbolic or loxodromic element. Elliptic elements
/// are returned with length 0; identity and parabolic elements are rejected.
pub fn complex_length(m: &Mat2, tol: f64) -> Result<ComplexLength> {
    match classify(m, tol)? {
        c @ (ElementClass::Identity | ElementClass::Parabolic) => Err(Error::NotLoxodromic(c.as_str())),
        ElementClass::Elliptic => {
            let cl = complex_length_from_trace(m.trace());
            Ok(ComplexLength::new(0.0, cl.holonomy))
        }
        _ => Ok(complex_length_from_trace(m.trace())),
    }
}

/// |1 − e^{−ℓ−iθ}|², evaluated without cancellation for small ℓ and θ.
pub(crate) fn one_minus_q_sq(length: f64, holonomy: f64) -> f64 {
    let em1 = (-length).exp_m1();
    let half = (holonomy / 2.0).sin();
    let re = em1 * holonomy.cos() - 2.0 * half * half;
    let im = (-length).exp() * holonomy.sin();
    re * re + im * im
}

/// Trace-formula weight w = (|1 − e^{ℓ+iθ}|·|1 − e^{−ℓ−iθ}|)⁻¹,
/// computed as e^{−ℓ}/|1 − e^{−ℓ−iθ}|².
pub fn weight(cl: ComplexLength) -> Result<f64> {
    if !(cl.length > 0.0) {
        return Err(Error::DegenerateLength(cl.length));
    }
    Ok((-cl.length).exp() / one_minus_q_sq(cl.length, cl.holonomy))
}

/// Complex length of the k-th power, together with the unchanged root length.
pub fn power_class(cl: ComplexLength, root_length: f64, k: u32) -> Result<(ComplexLength, f64)> {
    if k == 0 {
        return Err(Error::DomainError("power index must be at least 1".into()));
    }
    if !(cl.length > 0.0) {
        return Err(Error::DegenerateLength(cl.length));
    }
    let kf = f64::from(k);
    Ok((ComplexLength::new(kf * cl.length, kf * cl.holonomy), root_length))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduce_angle_branch() {
        assert_eq!(reduce_angle(PI), PI);
        assert_eq!(reduce_angle(-PI), PI);
        assert!((reduce_angle(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
        assert!(reduce_angle(TAU).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let unipotent = Mat2::real(1.0, 1.0, 0.0, 1.0);
        assert_eq!(classify(&unipotent, 1e-9).unwrap(), ElementClass::Parabolic);
        let tr3 = Mat2::real(2.0, 1.0, 1.0, 1.0);
        assert_eq!(classify(&tr3, 1e-9).unwrap(), ElementClass::Hyperbolic);
        let tr2i = Mat2::new(c(0.0, 2.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(classify(&tr2i, 1e-9).unwrap(), ElementClass::Loxodromic);
        assert_eq!(classify(&Mat2::identity(), 1e-9).unwrap(), ElementClass::Identity);
        assert_eq!(classify(&-Mat2::identity(), 1e-9).unwrap(), ElementClass::Identity);
        let rot = Mat2::from_complex_length(0.0, 1.0);
        assert_eq!(classify(&rot, 1e-9).unwrap(), ElementClass::Elliptic);
        let bad = Mat2::real(2.0, 0.0, 0.0, 1.0);
        assert!(matches!(classify(&bad, 1e-9), Err(Error::NonUnitDeterminant { .. })));
    }

    #[test]
    fn classify_stable_under_sign_and_inverse() {
        let m = Mat2::new(c(0.0, 2.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let k = classify(&m, 1e-9).unwrap();
        assert_eq!(classify(&-m, 1e-9).unwrap(), k);
        assert_eq!(classify(&m.adjugate(), 1e-9).unwrap(), k);
    }

    #[test]
    fn complex_length_examples() {
        let d = Mat2::from_complex_length(1.0, PI / 2.0);
        let cl = complex_length(&d, 1e-9).unwrap();
        assert!((cl.length - 1.0).abs() < 1e-14);
        assert!((cl.holonomy - PI / 2.0).abs() < 1e-14);

        let cl = complex_length(&Mat2::real(2.0, 1.0, 1.0, 1.0), 1e-9).unwrap();
        assert!((cl.length - 1.924_847_300_238_413_8).abs() < 1e-12);
        assert!(cl.holonomy.abs() < 1e-15);

        let m = Mat2::new(c(0.0, 2.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let cl = complex_length(&m, 1e-9).unwrap();
        assert!((cl.length - 1.762_747_174_039_086).abs() < 1e-12);
        assert!((cl.holonomy - PI).abs() < 1e-12);

        assert!(matches!(
            complex_length(&Mat2::real(1.0, 1.0, 0.0, 1.0), 1e-9),
            Err(Error::NotLoxodromic("parabolic"))
        ));
    }

    #[test]
    fn inverse_and_sign_share_complex_length() {
        let m = Mat2::new(c(1.3, 0.4), c(0.2, -0.7), c(-0.5, 0.1), c(0.0, 0.0));
        let m = canonicalize(m, 1e-12).unwrap();
        let a = complex_length(m.matrix(), 1e-9).unwrap();
        let b = complex_length(&-*m.matrix(), 1e-9).unwrap();
        let i = complex_length(&m.matrix().adjugate(), 1e-9).unwrap();
        assert!((a.length - b.length).abs() < 1e-13 && circle_distance(a.holonomy, b.holonomy) < 1e-13);
        assert!((a.length - i.length).abs() < 1e-13 && circle_distance(a.holonomy, i.holonomy) < 1e-13);
    }

    #[test]
    fn weight_examples() {
        // Frozen from a 40-digit evaluation of e^{-l}/|1-e^{-l-i theta}|^2.
        let w = weight(ComplexLength::new(2.0, 0.0)).unwrap();
        assert!((w - 0.181_015_415_241_578).abs() < 1e-14);
        let w = weight(ComplexLength::new(1.0, PI / 2.0)).unwrap();
        assert!((w - 0.324_027_136_831_943).abs() < 1e-14);
        let w = weight(ComplexLength::new(2.0, PI)).unwrap();
        assert!((w - 0.104_993_585_403_507).abs() < 1e-14);
        for theta in [0.0, 1.0, -2.5, PI] {
            let w = weight(ComplexLength::new(10.0, theta)).unwrap();
            assert!((w * 10f64.exp() - 1.0).abs() < 2e-4);
        }
        assert!(matches!(weight(ComplexLength::new(0.0, 1.0)), Err(Error::DegenerateLength(_))));
    }

    #[test]
    fn weight_matches_direct_definition() {
        for &(l, t) in &[(0.3, 0.1), (1.0, -2.0), (5.0, 3.0), (0.05, 0.0)] {
            let z = Complex64::new(l, t);
            let direct = 1.0 / ((Complex64::new(1.0, 0.0) - z.exp()).norm() * (Complex64::new(1.0, 0.0) - (-z).exp()).norm());
            let w = weight(ComplexLength::new(l, t)).unwrap();
            assert!((w / direct - 1.0).abs() < 1e-12, "{l} {t}");
        }
    }

    #[test]
    fn power_class_examples() {
        let (p, r) = power_class(ComplexLength::new(1.0, PI / 2.0), 1.0, 2).unwrap();
        assert_eq!((p.length, r), (2.0, 1.0));
        assert!((p.holonomy - PI).abs() < 1e-15);
        let (p, _) = power_class(ComplexLength::new(1.762_747_2, PI), 1.762_747_2, 2).unwrap();
        assert!((p.length - 3.525_494_4).abs() < 1e-12);
        assert!(p.holonomy.abs() < 1e-15);
        let (p, _) = power_class(ComplexLength::new(1.0, PI / 2.0), 1.0, 1).unwrap();
        assert_eq!(p, ComplexLength::new(1.0, PI / 2.0));
        assert!(power_class(ComplexLength::new(1.0, 0.0), 1.0, 0).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let id = canonicalize(-Mat2::identity(), 1e-9).unwrap();
        assert_eq!(*id.matrix(), Mat2::identity());

        let m = Mat2::new(c(-1.3, 0.4), c(0.2, -0.7), c(-0.5, 0.1), c(0.3, 0.2));
        let m = m.scale(m.det().sqrt().inv());
        let a = canonicalize(m, 1e-9).unwrap();
        let b = canonicalize(-m, 1e-9).unwrap();
        assert_eq!(a.key(1e-9), b.key(1e-9));
        assert_eq!(a.inverse_closed_key(1e-9), a.inverse().inverse_closed_key(1e-9));

        let p = Mat2::real(2.0, 1.0, 1.0, 1.0);
        let q = Mat2::new(p.a + 1e-12, p.b - 1e-12, p.c, p.d + 1e-12);
        assert_eq!(
            canonicalize(p, 1e-9).unwrap().key(1e-9),
            canonicalize(q, 1e-9).unwrap().key(1e-9)
        );

        assert!(matches!(canonicalize(Mat2::real(1.0, 2.0, 2.0, 4.0), 1e-9), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn canonicalize_renormalizes_determinant() {
        let m = Mat2::real(4.0, 2.0, 2.0, 2.0);
        let e = canonicalize(m, 1e-9).unwrap();
        assert!((e.matrix().det() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn powers_by_squaring() {
        let m = Mat2::real(2.0, 1.0, 1.0, 1.0);
        let m3 = m * m * m;
        assert!(m.pow(3).distance(&m3) < 1e-12);
        assert!((m.pow(-2) * m.pow(2)).distance(&Mat2::identity()) < 1e-12);
    }
}
