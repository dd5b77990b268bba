//! Exact arithmetic on `[0,1]`, interval probabilities, and the Bayes kernel
//! `f_b(x, y, z) = xy / (xy + z(1 - x))` with its sharp interval extension.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as a rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"n/d"`, `"n"`, or a plain decimal such as `"0.85"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let negative = mantissa.starts_with('-');
    let body = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::new(
        digits.parse::<BigInt>().ok()?,
        BigInt::from(10u32).pow(frac_part.len() as u32),
    );
    let ten = rat_int(10);
    if exp >= 0 {
        value *= num_traits::pow(ten, exp as usize);
    } else {
        value /= num_traits::pow(ten, (-exp) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Exact conversion of a finite binary64 through its shortest decimal form,
/// so that `0.85` becomes `17/20` rather than the nearest dyadic.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse_rational(&format!("{x}"))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with `digits` fractional digits, rounding half away
/// from zero.
pub fn format_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + rat(1, 2)).floor().to_integer();
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A real number that is either an exact rational or a binary64 value with a
/// tracked absolute error bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    Approx { value: f64, err: f64 },
}

/// Three-way comparison that admits an undecidable outcome when the operands
/// are within their combined error bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Indeterminate,
}

impl Comparison {
    pub fn is_lt(self) -> Option<bool> {
        match self {
            Comparison::Less => Some(true),
            Comparison::Indeterminate => None,
            _ => Some(false),
        }
    }
}

fn rounding_slack(v: f64) -> f64 {
    v.abs() * f64::EPSILON * 2.0 + f64::MIN_POSITIVE
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Real::Exact(Rational::one())
    }

    pub fn approx(value: f64, err: f64) -> Self {
        Real::Approx {
            value,
            err: err.abs(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Approx { .. } => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => rational_to_f64(r),
            Real::Approx { value, .. } => *value,
        }
    }

    /// Absolute error bound; zero for exact values.
    pub fn err(&self) -> f64 {
        match self {
            Real::Exact(_) => 0.0,
            Real::Approx { err, .. } => *err,
        }
    }

    fn parts(&self) -> (f64, f64) {
        match self {
            Real::Exact(r) => {
                let v = rational_to_f64(r);
                (v, v.abs() * f64::EPSILON)
            }
            Real::Approx { value, err } => (*value, *err),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Real::Exact(r) if r.is_zero())
    }

    pub fn compare(&self, other: &Real) -> Comparison {
        if let (Real::Exact(a), Real::Exact(b)) = (self, other) {
            return match a.cmp(b) {
                Ordering::Less => Comparison::Less,
                Ordering::Equal => Comparison::Equal,
                Ordering::Greater => Comparison::Greater,
            };
        }
        let diff = self - other;
        let (v, e) = diff.parts();
        if v > e {
            Comparison::Greater
        } else if v < -e {
            Comparison::Less
        } else {
            Comparison::Indeterminate
        }
    }

    /// `Some(self < other)` when decidable.
    pub fn lt(&self, other: &Real) -> Option<bool> {
        self.compare(other).is_lt()
    }

    /// Division; `None` when the divisor is zero or its error band contains zero.
    pub fn checked_div(&self, other: &Real) -> Option<Real> {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => {
                if b.is_zero() {
                    None
                } else {
                    Some(Real::Exact(a / b))
                }
            }
            _ => {
                let (a, ea) = self.parts();
                let (b, eb) = other.parts();
                if b.abs() <= eb {
                    return None;
                }
                let v = a / b;
                let e = (a.abs() * eb + b.abs() * ea) / (b.abs() * (b.abs() - eb));
                Some(Real::approx(v, e + rounding_slack(v)))
            }
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        match self.compare(other) {
            Comparison::Greater => other.clone(),
            Comparison::Indeterminate if self.err() < other.err() => self.clone(),
            Comparison::Indeterminate => other.clone(),
            _ => self.clone(),
        }
    }

    pub fn max(&self, other: &Real) -> Real {
        match self.compare(other) {
            Comparison::Less => other.clone(),
            Comparison::Indeterminate if self.err() < other.err() => self.clone(),
            Comparison::Indeterminate => other.clone(),
            _ => self.clone(),
        }
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Self {
        Real::Exact(r)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{}", format_rational(r)),
            Real::Approx { value, err } => write!(f, "{value}±{err:.1e}"),
        }
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $exact:expr, $approx:expr) => {
        // Error bounds add whatever the operation.
        #[allow(clippy::suspicious_arithmetic_impl)]
        impl<'a> $trait<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                match (self, rhs) {
                    (Real::Exact(a), Real::Exact(b)) => Real::Exact($exact(a, b)),
                    _ => {
                        let (a, ea) = self.parts();
                        let (b, eb) = rhs.parts();
                        let (v, e): (f64, f64) = $approx(a, ea, b, eb);
                        Real::approx(v, e + rounding_slack(v))
                    }
                }
            }
        }
        impl $trait for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
    };
}

real_binop!(
    Add,
    add,
    |a: &Rational, b: &Rational| a + b,
    |a: f64, ea: f64, b: f64, eb: f64| (a + b, ea + eb)
);
real_binop!(
    Sub,
    sub,
    |a: &Rational, b: &Rational| a - b,
    |a: f64, ea: f64, b: f64, eb: f64| (a - b, ea + eb)
);
real_binop!(
    Mul,
    mul,
    |a: &Rational, b: &Rational| a * b,
    |a: f64, ea: f64, b: f64, eb: f64| (a * b, a.abs() * eb + b.abs() * ea + ea * eb)
);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(-r),
            Real::Approx { value, err } => Real::approx(-value, *err),
        }
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |acc, x| acc + x)
    }
}

/// A value in `[0,1]`: exact, or approximate with an absolute error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitValue(Real);

impl UnitValue {
    /// Validates range. Approximate values whose error band reaches into
    /// `[0,1]` are accepted and their point value clamped.
    pub fn new(value: Real) -> Result<Self> {
        match value {
            Real::Exact(ref r) => {
                if r.is_negative() || *r > Rational::one() {
                    Err(Error::RangeViolation(format_rational(r)))
                } else {
                    Ok(UnitValue(value))
                }
            }
            Real::Approx { value: v, err } => {
                if v.is_nan() || v < -err || v > 1.0 + err {
                    Err(Error::RangeViolation(format!("{v}±{err}")))
                } else {
                    Ok(UnitValue(Real::approx(v.clamp(0.0, 1.0), err)))
                }
            }
        }
    }

    pub fn exact(r: Rational) -> Result<Self> {
        Self::new(Real::Exact(r))
    }

    pub fn ratio(n: i64, d: i64) -> Result<Self> {
        Self::exact(rat(n, d))
    }

    pub fn zero() -> Self {
        UnitValue(Real::zero())
    }

    pub fn one() -> Self {
        UnitValue(Real::one())
    }

    pub fn real(&self) -> &Real {
        &self.0
    }

    pub fn into_real(self) -> Real {
        self.0
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.0.as_exact()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn err(&self) -> f64 {
        self.0.err()
    }

    /// `1 - self`.
    pub fn complement(&self) -> UnitValue {
        UnitValue(&Real::one() - &self.0)
    }

    pub fn compare(&self, other: &UnitValue) -> Comparison {
        self.0.compare(&other.0)
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A closed subinterval `[lo, hi]` of `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbInterval {
    lo: UnitValue,
    hi: UnitValue,
}

impl ProbInterval {
    pub fn new(lo: UnitValue, hi: UnitValue) -> Result<Self> {
        make_prob_interval(lo, hi)
    }

    pub fn from_reals(lo: Real, hi: Real) -> Result<Self> {
        make_prob_interval(UnitValue::new(lo)?, UnitValue::new(hi)?)
    }

    pub fn exact(lo: Rational, hi: Rational) -> Result<Self> {
        Self::from_reals(Real::Exact(lo), Real::Exact(hi))
    }

    pub fn point(v: UnitValue) -> Self {
        ProbInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    /// `[0,1]`, the bottom of the information order.
    pub fn unit() -> Self {
        ProbInterval {
            lo: UnitValue::zero(),
            hi: UnitValue::one(),
        }
    }

    pub fn lo(&self) -> &UnitValue {
        &self.lo
    }

    pub fn hi(&self) -> &UnitValue {
        &self.hi
    }

    pub fn width(&self) -> Real {
        self.hi.real() - self.lo.real()
    }

    pub fn is_exact(&self) -> bool {
        self.lo.real().is_exact() && self.hi.real().is_exact()
    }

    /// Whether `x` lies in the interval; `None` when undecidable.
    pub fn contains(&self, x: &Real) -> Option<bool> {
        let above = self.lo.real().compare(x);
        let below = x.compare(self.hi.real());
        match (above, below) {
            (Comparison::Greater, _) | (_, Comparison::Greater) => Some(false),
            (Comparison::Indeterminate, _) | (_, Comparison::Indeterminate) => None,
            _ => Some(true),
        }
    }

    /// Whether `other ⊆ self` as sets.
    pub fn contains_interval(&self, other: &ProbInterval) -> bool {
        interval_refines(self, other)
    }
}

impl fmt::Display for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub fn make_prob_interval(lo: UnitValue, hi: UnitValue) -> Result<ProbInterval> {
    if lo.compare(&hi) == Comparison::Greater {
        return Err(Error::OrderViolation {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    Ok(ProbInterval { lo, hi })
}

/// True iff `b` refines `a`, i.e. `b ⊆ a`. For approximate endpoints the
/// containment is reported unless it is definitely violated; use
/// [`interval_refines_checked`] to surface undecidable cases.
pub fn interval_refines(a: &ProbInterval, b: &ProbInterval) -> bool {
    a.lo.compare(&b.lo) != Comparison::Greater && b.hi.compare(&a.hi) != Comparison::Greater
}

pub fn interval_refines_checked(a: &ProbInterval, b: &ProbInterval) -> Result<bool> {
    let lo = a.lo.compare(&b.lo);
    let hi = b.hi.compare(&a.hi);
    if lo == Comparison::Greater || hi == Comparison::Greater {
        return Ok(false);
    }
    if lo == Comparison::Indeterminate || hi == Comparison::Indeterminate {
        return Err(Error::Indeterminate(format!("{b} ⊆ {a}")));
    }
    Ok(true)
}

/// `f_b(x, y, z) = xy / (xy + z(1 - x))`, the posterior of a hypothesis with
/// prior `x`, likelihood `y` and alternative likelihood `z`.
pub fn bayes_kernel(x: &UnitValue, y: &UnitValue, z: &UnitValue) -> Result<UnitValue> {
    let num = x.real() * y.real();
    let den = &num + &(z.real() * x.complement().real());
    match num.checked_div(&den) {
        Some(v) => UnitValue::new(v),
        None => Err(Error::DegenerateDenominator(format!(
            " at ({x}, {y}, {z})"
        ))),
    }
}

/// Image of the box `X × Y × Z` under `f_b`. Since `f_b` increases in `x`
/// and `y` and decreases in `z`, the image is
/// `[f_b(X.lo, Y.lo, Z.hi), f_b(X.hi, Y.hi, Z.lo)]`.
pub fn bayes_kernel_interval(
    x: &ProbInterval,
    y: &ProbInterval,
    z: &ProbInterval,
) -> Result<ProbInterval> {
    let lo = bayes_kernel(&x.lo, &y.lo, &z.hi)?;
    let hi = bayes_kernel(&x.hi, &y.hi, &z.lo)?;
    make_prob_interval(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(n: i64, d: i64) -> UnitValue {
        UnitValue::ratio(n, d).unwrap()
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> ProbInterval {
        ProbInterval::new(uv(a.0, a.1), uv(b.0, b.1)).unwrap()
    }

    #[test]
    fn make_interval_examples() {
        let i = make_prob_interval(uv(1, 10), uv(7, 10)).unwrap();
        assert_eq!(i.lo().as_exact(), Some(&rat(1, 10)));
        assert_eq!(i.hi().as_exact(), Some(&rat(7, 10)));
        let p = make_prob_interval(uv(1, 2), uv(1, 2)).unwrap();
        assert_eq!(p.width(), Real::zero());
        assert!(matches!(
            make_prob_interval(uv(7, 10), uv(3, 10)),
            Err(Error::OrderViolation { .. })
        ));
        assert!(matches!(
            UnitValue::ratio(3, 2),
            Err(Error::RangeViolation(_))
        ));
        assert!(UnitValue::ratio(-1, 2).is_err());
    }

    #[test]
    fn refinement_examples() {
        assert!(interval_refines(&ProbInterval::unit(), &iv((3, 10), (4, 10))));
        assert!(interval_refines(&iv((3, 10), (4, 10)), &iv((3, 10), (4, 10))));
        assert!(!interval_refines(&iv((3, 10), (4, 10)), &iv((2, 10), (5, 10))));
    }

    #[test]
    fn kernel_medical_point() {
        let v = bayes_kernel(&uv(3, 100), &uv(90, 100), &uv(55, 1000)).unwrap();
        assert_eq!(v.as_exact(), Some(&rat(540, 1607)));
        assert!((v.to_f64() - 0.336).abs() < 5e-4);
    }

    #[test]
    fn kernel_extremes_and_symmetry() {
        let one = UnitValue::one();
        let zero = UnitValue::zero();
        assert_eq!(bayes_kernel(&one, &one, &zero).unwrap(), UnitValue::one());
        for t in [1, 3, 7, 10] {
            let t = uv(t, 10);
            assert_eq!(bayes_kernel(&uv(1, 2), &t, &t).unwrap(), uv(1, 2));
        }
        assert!(matches!(
            bayes_kernel(&zero, &one, &zero),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn kernel_interval_medical() {
        let r = bayes_kernel_interval(
            &iv((1, 100), (5, 100)),
            &iv((85, 100), (95, 100)),
            &iv((1, 100), (10, 100)),
        )
        .unwrap();
        assert_eq!(r.lo().as_exact(), Some(&rat(17, 215)));
        assert_eq!(r.hi().as_exact(), Some(&rat(95, 114)));
    }

    #[test]
    fn kernel_interval_degenerate_box() {
        let x = iv((2, 10), (2, 10));
        let y = iv((7, 10), (7, 10));
        let z = iv((1, 10), (1, 10));
        let r = bayes_kernel_interval(&x, &y, &z).unwrap();
        let p = bayes_kernel(x.lo(), y.lo(), z.lo()).unwrap();
        assert_eq!(r, ProbInterval::point(p));
    }

    #[test]
    fn kernel_interval_against_dense_grid() {
        // independent oracle: brute-force min/max over a 51^3 grid of the box
        let (x0, x1, y0, y1, z0, z1) = (0.2, 0.4, 0.6, 0.8, 0.1, 0.3);
        let n = 50;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let x = x0 + (x1 - x0) * i as f64 / n as f64;
                    let y = y0 + (y1 - y0) * j as f64 / n as f64;
                    let z = z0 + (z1 - z0) * k as f64 / n as f64;
                    let f = x * y / (x * y + z * (1.0 - x));
                    lo = lo.min(f);
                    hi = hi.max(f);
                }
            }
        }
        let r = bayes_kernel_interval(
            &iv((2, 10), (4, 10)),
            &iv((6, 10), (8, 10)),
            &iv((1, 10), (3, 10)),
        )
        .unwrap();
        assert!((r.lo().to_f64() - lo).abs() < 1e-12);
        assert!((r.hi().to_f64() - hi).abs() < 1e-12);
    }

    #[test]
    fn approx_comparisons_report_ties() {
        let a = Real::approx(0.5, 1e-12);
        let b = Real::Exact(rat(1, 2));
        assert_eq!(a.compare(&b), Comparison::Indeterminate);
        assert_eq!(Real::approx(0.6, 1e-12).compare(&b), Comparison::Greater);
        assert_eq!(b.compare(&Real::approx(0.6, 1e-12)), Comparison::Less);
        let c = ProbInterval::from_reals(Real::approx(0.3, 1e-9), Real::approx(0.5, 1e-9)).unwrap();
        assert!(matches!(
            interval_refines_checked(&c, &ProbInterval::exact(rat(3, 10), rat(4, 10)).unwrap()),
            Err(Error::Indeterminate(_))
        ));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("17/215"), Some(rat(17, 215)));
        assert_eq!(parse_rational("0.85"), Some(rat(17, 20)));
        assert_eq!(parse_rational("-2"), Some(rat_int(-2)));
        assert_eq!(parse_rational("1e-2"), Some(rat(1, 100)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(rational_from_f64(0.01), Some(rat(1, 100)));
        assert_eq!(format_decimal(&rat(17, 215), 4), "0.0791");
        assert_eq!(format_decimal(&rat(95, 114), 4), "0.8333");
        assert_eq!(format_decimal(&rat(19, 50), 2), "0.38");
        assert_eq!(format_decimal(&rat(1, 10), 1), "0.1");
    }
}
