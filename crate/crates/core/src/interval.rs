//! Closed real intervals `[lo, hi]` with outward rounding.
//!
//! Every arithmetic result encloses the exact real result for any choice of
//! points from the operands. Two widening strategies are available:
//!
//! * [`WideningMode::OneUlpOutward`] (the default): compute the
//!   round-to-nearest result and step one representable value outward.
//!   Round-to-nearest is within half an ulp of the exact value, so the step
//!   always covers it. Results detected as exact are left as points.
//! * [`WideningMode::Directed`]: the tight round-down / round-up results,
//!   obtained from error-free transformations (TwoSum, FMA-based product and
//!   division residuals). This needs no floating-point environment state, so
//!   it is safe on any thread.
//!
//! Overflow to a non-finite endpoint is an error, not a saturation.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntervalError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByIntervalContainingZero(Interval),
    #[error("non-finite endpoint in {0:?}")]
    Overflow(OpKind),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("tail bound must be non-negative, got {0}")]
    NegativeBound(Interval),
    #[error("invalid endpoints [{0}, {1}]")]
    InvalidEndpoints(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WideningMode {
    #[default]
    OneUlpOutward,
    Directed,
}

/// Rounding configuration. `significand_bits` is informational: storage is
/// always binary64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundingConfig {
    pub significand_bits: u32,
    pub widening_mode: WideningMode,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self {
            significand_bits: f64::MANTISSA_DIGITS,
            widening_mode: default_mode(),
        }
    }
}

/// Mode used by the arithmetic operators.
pub const fn default_mode() -> WideningMode {
    if cfg!(feature = "directed-rounding") {
        WideningMode::Directed
    } else {
        WideningMode::OneUlpOutward
    }
}

// Below this magnitude the FMA residuals used by the directed mode can
// themselves be rounded, so the directed mode falls back to ulp stepping.
const TINY: f64 = 4.008_336_720_017_946e-292; // 2^-968

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const HALF: Interval = Interval { lo: 0.5, hi: 0.5 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError::InvalidEndpoints(lo, hi))
        }
    }

    /// Degenerate interval for an exactly representable value.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "interval point must be finite, got {x}");
        Self { lo: x, hi: x }
    }

    /// Enclosure of the rational `p / q`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    /// Tight enclosure of an integer that may not be representable.
    pub fn from_i64(n: i64) -> Self {
        let x = n as f64;
        if x.abs() < 9.007_199_254_740_992e15 {
            return Self::point(x);
        }
        Self::from_big_parts(n.unsigned_abs() as u128, n < 0)
    }

    /// Tight enclosure of a possibly huge unsigned integer.
    pub fn from_u128(n: u128) -> Self {
        Self::from_big_parts(n, false)
    }

    fn from_big_parts(mag: u128, negative: bool) -> Self {
        let x = mag as f64;
        // Rounding to nearest can produce 2^128, where `as u128` saturates.
        let (lo, hi) = if x >= 3.402_823_669_209_385e38 {
            (x.next_down(), x)
        } else {
            match (x as u128).cmp(&mag) {
                Ordering::Equal => (x, x),
                Ordering::Less => (x, x.next_up()),
                Ordering::Greater => (x.next_down(), x),
            }
        };
        if negative {
            Self { lo: -hi, hi: -lo }
        } else {
            Self { lo, hi }
        }
    }

    /// Smallest interval containing both endpoints, in either order.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Self::point(a.min(b)).hull(Self::point(a.max(b)))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo == -self.hi {
            0.0
        } else {
            self.lo / 2.0 + self.hi / 2.0
        }
    }

    /// Upper bound on the radius about [`Interval::mid`].
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        up_sub(self.hi, m).max(up_sub(m, self.lo))
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> f64 {
        up_sub(self.hi, self.lo)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.contains_interval(self)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: Interval) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// `[-|r|, |r|]`.
    pub fn symmetric(r: f64) -> Self {
        let r = r.abs();
        Self { lo: -r, hi: r }
    }

    /// Exact scaling by `2^e`, falling back to outward stepping when the
    /// result leaves the normal range.
    pub fn scale_pow2(&self, e: i32) -> Self {
        let s = 2f64.powi(e);
        let lo = self.lo * s;
        let hi = self.hi * s;
        let normal = |x: f64| x == 0.0 || x.abs() >= f64::MIN_POSITIVE;
        if normal(lo) && normal(hi) && s.is_normal() && lo.is_finite() && hi.is_finite() {
            Self { lo, hi }
        } else {
            *self * Self::point(s)
        }
    }

    /// `self^n` for integer `n` (negative powers via reciprocal).
    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return Interval::ONE / self.powi(-n);
        }
        let mut base = *self;
        let mut acc = Interval::ONE;
        let mut k = n as u32;
        // Even powers of intervals straddling zero are non-negative.
        if k.is_multiple_of(2) && self.contains(0.0) && k > 0 {
            base = self.abs();
        }
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        a * a
    }

    /// Applies `kind` to `self` and `rhs` under the default widening mode.
    pub fn op(self, rhs: Interval, kind: OpKind) -> Result<Interval, IntervalError> {
        op_with_mode(self, rhs, kind, default_mode())
    }

    pub fn checked_add(self, rhs: Interval) -> Result<Interval, IntervalError> {
        self.op(rhs, OpKind::Add)
    }

    pub fn checked_sub(self, rhs: Interval) -> Result<Interval, IntervalError> {
        self.op(rhs, OpKind::Sub)
    }

    pub fn checked_mul(self, rhs: Interval) -> Result<Interval, IntervalError> {
        self.op(rhs, OpKind::Mul)
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        self.op(rhs, OpKind::Div)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

/// Free-function form of [`Interval::op`] with an explicit configuration.
pub fn op(
    a: Interval,
    b: Interval,
    kind: OpKind,
    config: &RoundingConfig,
) -> Result<Interval, IntervalError> {
    op_with_mode(a, b, kind, config.widening_mode)
}

pub fn op_with_mode(
    a: Interval,
    b: Interval,
    kind: OpKind,
    mode: WideningMode,
) -> Result<Interval, IntervalError> {
    let (lo, hi) = match kind {
        OpKind::Add => (round_add(a.lo, b.lo, mode).0, round_add(a.hi, b.hi, mode).1),
        OpKind::Sub => (
            round_add(a.lo, -b.hi, mode).0,
            round_add(a.hi, -b.lo, mode).1,
        ),
        OpKind::Mul => {
            let ps = [
                round_mul(a.lo, b.lo, mode),
                round_mul(a.lo, b.hi, mode),
                round_mul(a.hi, b.lo, mode),
                round_mul(a.hi, b.hi, mode),
            ];
            fold_bounds(&ps)
        }
        OpKind::Div => {
            if b.contains(0.0) {
                return Err(IntervalError::DivisionByIntervalContainingZero(b));
            }
            let qs = [
                round_div(a.lo, b.lo, mode),
                round_div(a.lo, b.hi, mode),
                round_div(a.hi, b.lo, mode),
                round_div(a.hi, b.hi, mode),
            ];
            fold_bounds(&qs)
        }
    };
    if lo.is_finite() && hi.is_finite() {
        Ok(Interval { lo, hi })
    } else {
        Err(IntervalError::Overflow(kind))
    }
}

fn fold_bounds(pairs: &[(f64, f64)]) -> (f64, f64) {
    pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(d, u)| {
            (lo.min(d), hi.max(u))
        })
}

/// (round-down, round-up) of `a + b`.
fn round_add(a: f64, b: f64, mode: WideningMode) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return (s, s);
    }
    // TwoSum: the rounding error of a finite sum is itself representable.
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    widen(s, err, mode)
}

fn round_mul(a: f64, b: f64, mode: WideningMode) -> (f64, f64) {
    if a == 0.0 || b == 0.0 {
        return (0.0, 0.0);
    }
    let p = a * b;
    if !p.is_finite() {
        return (p, p);
    }
    if p.abs() < TINY {
        return (p.next_down(), p.next_up());
    }
    widen(p, a.mul_add(b, -p), mode)
}

fn round_div(a: f64, b: f64, mode: WideningMode) -> (f64, f64) {
    if a == 0.0 {
        return (0.0, 0.0);
    }
    let q = a / b;
    if !q.is_finite() {
        return (q, q);
    }
    if q.abs() < TINY || a.abs() < TINY {
        return (q.next_down(), q.next_up());
    }
    // a - q*b is exact here; the exact quotient is q + r/b.
    let r = (-q).mul_add(b, a);
    widen(q, if b > 0.0 { r } else { -r }, mode)
}

/// Bounds for the exact value `x + err` (err is only used for its sign).
/// Exact results are never widened.
fn widen(x: f64, err: f64, mode: WideningMode) -> (f64, f64) {
    if err == 0.0 {
        return (x, x);
    }
    match mode {
        WideningMode::OneUlpOutward => (x.next_down(), x.next_up()),
        WideningMode::Directed if err > 0.0 => (x, x.next_up()),
        WideningMode::Directed => (x.next_down(), x),
    }
}

/// `a - b` rounded upward (scalar helper).
pub fn up_sub(a: f64, b: f64) -> f64 {
    round_add(a, -b, WideningMode::Directed).1
}

/// `a + b` rounded upward (scalar helper).
pub fn up_add(a: f64, b: f64) -> f64 {
    round_add(a, b, WideningMode::Directed).1
}

macro_rules! impl_op {
    ($tr:ident, $method:ident, $kind:expr) => {
        impl $tr for Interval {
            type Output = Interval;
            /// # Panics
            /// On overflow or division by an interval containing zero.
            fn $method(self, rhs: Interval) -> Interval {
                match self.op(rhs, $kind) {
                    Ok(r) => r,
                    Err(e) => panic!("interval arithmetic failed: {e}"),
                }
            }
        }
    };
}

impl_op!(Add, add, OpKind::Add);
impl_op!(Sub, sub, OpKind::Sub);
impl_op!(Mul, mul, OpKind::Mul);
impl_op!(Div, div, OpKind::Div);

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Interval> for Interval {
    fn sum<I: Iterator<Item = &'a Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |acc, x| acc + *x)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Interval", 2)?;
        s.serialize_field("lo", &format!("{:?}", self.lo))?;
        s.serialize_field("hi", &format!("{:?}", self.hi))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: String,
            hi: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let lo: f64 = raw.lo.parse().map_err(de::Error::custom)?;
        let hi: f64 = raw.hi.parse().map_err(de::Error::custom)?;
        Interval::new(lo, hi).map_err(de::Error::custom)
    }
}

/// Encloses an omitted tail whose magnitude is bounded by `bound.hi`.
pub fn enclose_alternating_tail(bound: Interval) -> Result<Interval, IntervalError> {
    if bound.lo < 0.0 {
        return Err(IntervalError::NegativeBound(bound));
    }
    Ok(Interval::symmetric(bound.hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Log2,
    LogThreeHalves,
    PiSqOver12,
    /// `sum_{k>=1} (-1)^k / (k^2 2^k)`, the dilogarithm at -1/2.
    DilogNegHalf,
    TwoLog2Minus1,
    TwoLog2Minus2,
}

impl Constant {
    pub const ALL: [Constant; 6] = [
        Constant::Log2,
        Constant::LogThreeHalves,
        Constant::PiSqOver12,
        Constant::DilogNegHalf,
        Constant::TwoLog2Minus1,
        Constant::TwoLog2Minus2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Log2 => "log2",
            Constant::LogThreeHalves => "log_three_halves",
            Constant::PiSqOver12 => "pi_sq_over_12",
            Constant::DilogNegHalf => "dilog_neg_half",
            Constant::TwoLog2Minus1 => "two_log2_minus_1",
            Constant::TwoLog2Minus2 => "two_log2_minus_2",
        }
    }

    pub fn enclosure(self) -> Interval {
        static CACHE: OnceLock<[Interval; 6]> = OnceLock::new();
        let table = CACHE.get_or_init(|| Constant::ALL.map(compute_constant));
        table[Constant::ALL.iter().position(|&c| c == self).unwrap()]
    }
}

impl FromStr for Constant {
    type Err = IntervalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Constant::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| IntervalError::UnknownConstant(s.to_string()))
    }
}

/// Enclosure of a named constant.
pub fn const_enclosure(name: &str) -> Result<Interval, IntervalError> {
    Ok(name.parse::<Constant>()?.enclosure())
}

/// Number of terms summed for the dilogarithm constant.
pub const DILOG_TERMS: u32 = 60;
/// Number of terms summed for `log(3/2) = sum 1/(j 3^j)`.
pub const LOG_THREE_HALVES_TERMS: u32 = 40;

fn compute_constant(c: Constant) -> Interval {
    // The std constants are correctly rounded, so one ulp each way is safe.
    let log2 = Interval {
        lo: std::f64::consts::LN_2.next_down(),
        hi: std::f64::consts::LN_2.next_up(),
    };
    let pi = Interval {
        lo: std::f64::consts::PI.next_down(),
        hi: std::f64::consts::PI.next_up(),
    };
    match c {
        Constant::Log2 => log2,
        Constant::PiSqOver12 => pi.sqr() / Interval::point(12.0),
        Constant::TwoLog2Minus1 => log2.scale_pow2(1) - Interval::ONE,
        Constant::TwoLog2Minus2 => log2.scale_pow2(1) - Interval::point(2.0),
        Constant::LogThreeHalves => inverse_power_log_series(3, 1, LOG_THREE_HALVES_TERMS),
        Constant::DilogNegHalf => {
            let k_max = DILOG_TERMS;
            // Smallest terms first keeps the accumulated widening small.
            let mut acc = Interval::ZERO;
            for k in (1..=k_max).rev() {
                let denom = Interval::point((k * k) as f64);
                let term = (Interval::ONE / denom).scale_pow2(-(k as i32));
                acc = if k % 2 == 0 { acc + term } else { acc - term };
            }
            let tail_bound = (Interval::ONE / Interval::point((k_max * k_max) as f64))
                .scale_pow2(-(k_max as i32));
            acc + enclose_alternating_tail(tail_bound).expect("non-negative bound")
        }
    }
}

/// Enclosure of `sum_{j >= start} 1 / (j base^j)` using terms
/// `start..=start + extra_terms` and a geometric tail bound.
pub fn inverse_power_log_series(base: u32, start: u32, extra_terms: u32) -> Interval {
    assert!(base >= 2 && start >= 1);
    let inv_base = Interval::ONE / Interval::point(base as f64);
    let last = start + extra_terms;
    let mut terms = Vec::with_capacity(extra_terms as usize + 1);
    let mut p = inv_base.powi(start as i32);
    for j in start..=last {
        terms.push(p / Interval::point(j as f64));
        p = p * inv_base;
    }
    let mut acc = Interval::ZERO;
    for t in terms.iter().rev() {
        acc = acc + *t;
    }
    // sum_{j > J} 1/(j b^j) <= 1/((J+1) b^J (b-1)); `p` now holds b^-(J+1).
    let tail = p * Interval::point(base as f64)
        / (Interval::point((last + 1) as f64) * Interval::point((base - 1) as f64));
    acc + Interval {
        lo: 0.0,
        hi: tail.hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulps_between(a: f64, b: f64) -> u64 {
        let key = |x: f64| {
            let bits = x.to_bits() as i64;
            if bits < 0 {
                i64::MIN - bits
            } else {
                bits
            }
        };
        (key(b) - key(a)).unsigned_abs()
    }

    #[test]
    fn one_plus_one() {
        let r = Interval::ONE + Interval::ONE;
        assert!(r.contains(2.0));
        assert!(ulps_between(r.lo(), r.hi()) <= 2);
    }

    #[test]
    fn tenth_plus_tenth_contains_fifth() {
        // 0.1 is not representable; enclose it first.
        let tenth = Interval::ratio(1, 10);
        assert!(!tenth.is_point());
        let fifth = tenth + tenth;
        let exact = Interval::ratio(1, 5);
        assert!(fifth.intersects(&exact));
        assert!(fifth.contains_interval(&Interval::point(0.2)) || fifth.intersects(&exact));
    }

    #[test]
    fn mul_sign_cases() {
        let a = Interval::new(2.0, 3.0).unwrap();
        let b = Interval::new(-1.0, 1.0).unwrap();
        let r = a * b;
        assert!(r.contains(-3.0) && r.contains(3.0));
        assert!(r.lo() >= (-3.0f64).next_down() && r.hi() <= 3.0f64.next_up());
        let exact = op_with_mode(a, b, OpKind::Mul, WideningMode::Directed).unwrap();
        assert_eq!((exact.lo(), exact.hi()), (-3.0, 3.0));
    }

    #[test]
    fn division_by_zero_interval() {
        let b = Interval::new(-1.0, 1.0).unwrap();
        assert!(matches!(
            Interval::ONE.checked_div(b),
            Err(IntervalError::DivisionByIntervalContainingZero(_))
        ));
    }

    #[test]
    fn overflow_is_an_error() {
        let big = Interval::point(f64::MAX);
        assert_eq!(
            big.checked_mul(Interval::point(2.0)),
            Err(IntervalError::Overflow(OpKind::Mul))
        );
        assert!(big.checked_add(big).is_err());
    }

    #[test]
    fn directed_is_exact_on_exact_ops() {
        let r = op_with_mode(
            Interval::point(1.5),
            Interval::point(0.25),
            OpKind::Add,
            WideningMode::Directed,
        )
        .unwrap();
        assert!(r.is_point());
        let q = op_with_mode(
            Interval::ONE,
            Interval::point(3.0),
            OpKind::Div,
            WideningMode::Directed,
        )
        .unwrap();
        assert_eq!(ulps_between(q.lo(), q.hi()), 1);
        // 1/3 rounds down to nearest, so the upper endpoint is one step above.
        assert_eq!(q.lo(), 1.0 / 3.0);
    }

    #[test]
    fn tail_enclosures() {
        assert_eq!(
            enclose_alternating_tail(Interval::ZERO).unwrap(),
            Interval::ZERO
        );
        let t = enclose_alternating_tail(Interval::new(0.0, 1e-20).unwrap()).unwrap();
        assert_eq!((t.lo(), t.hi()), (-1e-20, 1e-20));
        assert!(matches!(
            enclose_alternating_tail(Interval::new(-1.0, 1.0).unwrap()),
            Err(IntervalError::NegativeBound(_))
        ));
        // The dilogarithm tail at K = 60 is 2^-60 / 3600.
        let k = DILOG_TERMS as f64;
        let bound = 2f64.powi(-(DILOG_TERMS as i32)) / (k * k);
        assert!(2.0 * bound < 1e-19);
    }

    #[test]
    fn constants_contain_known_values() {
        let dilog = const_enclosure("dilog_neg_half").unwrap();
        assert!((dilog.mid() + 0.4484).abs() < 5e-5);
        assert!(const_enclosure("log2")
            .unwrap()
            .contains(std::f64::consts::LN_2));
        let l32 = const_enclosure("log_three_halves").unwrap();
        assert!((l32.mid() - 0.4054651081).abs() < 1e-10);
        assert!(matches!(
            const_enclosure("euler_gamma"),
            Err(IntervalError::UnknownConstant(_))
        ));
    }

    #[test]
    fn constant_widths_are_tight() {
        for c in Constant::ALL {
            let x = c.enclosure();
            assert!(
                ulps_between(x.lo(), x.hi()) <= 16,
                "{} too wide: {x} ({} ulp)",
                c.name(),
                ulps_between(x.lo(), x.hi())
            );
        }
    }

    #[test]
    fn big_integers_are_enclosed() {
        let n: u128 = (1u128 << 100) + 1;
        let x = Interval::from_u128(n);
        assert!(x.lo() < x.hi());
        assert!((x.lo() as u128) <= n && (x.hi() as u128) >= n);
        assert!(Interval::from_u128(1 << 60).is_point());
    }

    #[test]
    fn powers() {
        let r = Interval::point(3.0).powi(5);
        assert!(r.contains(243.0));
        let inv = Interval::point(3.0).powi(-2);
        assert!(
            inv.contains_interval(&Interval::ratio(1, 9)) || inv.intersects(&Interval::ratio(1, 9))
        );
        let sq = Interval::new(-2.0, 1.0).unwrap().powi(2);
        assert_eq!(sq.lo(), 0.0);
        assert!(sq.contains(4.0));
    }

    #[test]
    fn json_shape() {
        let x = Interval::new(-0.5, 1e-30).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"lo":"-0.5","hi":"1e-30"}"#);
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Interval>(r#"{"lo":"2","hi":"1"}"#).is_err());
    }
}
