//! The two scalar modes: exact arbitrary-precision rationals and IEEE f64.
//!
//! Every numeric container in this crate is generic over [`Scalar`], so a
//! value's mode is part of its type and mixed-mode arithmetic is rejected at
//! compile time.  Serialized data carries a `"mode"` tag (`"rational"` /
//! `"float64"`) that selects the type to parse into.

use std::cmp::Ordering;
use std::fmt::Debug;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact scalar: arbitrary-precision rational.
pub type Rat = BigRational;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ScalarMode {
    Rational,
    Float64,
}

impl ScalarMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalarMode::Rational => "rational",
            ScalarMode::Float64 => "float64",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "rational" => Ok(ScalarMode::Rational),
            "float64" => Ok(ScalarMode::Float64),
            other => Err(Error::Parse(format!("unknown scalar mode {other:?}"))),
        }
    }
}

/// Field operations plus the small amount of mode-specific behaviour the
/// algorithms need (total order, square roots, text round-tripping).
///
/// Finite values only: float-mode code never produces NaN or infinities, and
/// `cmp_total` panics on NaN rather than silently misordering.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    const MODE: ScalarMode;

    fn from_int(v: i64) -> Self;

    /// `num / den`; panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn cmp_total(&self, other: &Self) -> Ordering;

    /// The square root when it is exactly representable in this type
    /// (always, up to rounding, for f64; perfect squares for rationals).
    /// `None` for negative values.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Best-effort nonnegative square root: correctly rounded for f64,
    /// 128 fractional bits of precision for rationals.  Panics on negatives.
    fn sqrt_near(&self) -> Self;

    fn render(&self) -> String;

    fn parse(s: &str) -> Result<Self, Error>;

    fn max_with(&self, other: &Self) -> Self {
        if self.cmp_total(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float64;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("NaN in scalar comparison")
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }

    fn sqrt_near(&self) -> Self {
        assert!(*self >= 0.0, "sqrt_near of negative value");
        self.sqrt()
    }

    fn render(&self) -> String {
        // Rust's shortest round-tripping representation; deterministic.
        format!("{self}")
    }

    fn parse(s: &str) -> Result<Self, Error> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad float {s:?}: {e}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite float {s:?}")));
        }
        Ok(v)
    }
}

impl Scalar for Rat {
    const MODE: ScalarMode = ScalarMode::Rational;

    fn from_int(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        Ord::cmp(self, other)
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Rat::zero());
        }
        // A reduced p/q is a rational square iff p and q both are.
        let (p, q) = (self.numer(), self.denom());
        let sp = p.sqrt();
        if &(&sp * &sp) != p {
            return None;
        }
        let sq = q.sqrt();
        if &(&sq * &sq) != q {
            return None;
        }
        Some(Rat::new(sp, sq))
    }

    fn sqrt_near(&self) -> Self {
        assert!(!self.is_negative(), "sqrt_near of negative value");
        if let Some(exact) = self.sqrt_exact() {
            return exact;
        }
        // sqrt(p/q) = sqrt(p*q)/q; approximate with 128 fractional bits:
        // floor(sqrt(p*q * 2^256)) / (q * 2^128).
        let (p, q) = (self.numer(), self.denom());
        let scaled: BigInt = (p * q) << 256u32;
        Rat::new(scaled.sqrt(), q << 128u32)
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad rational numerator {s:?}: {e}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad rational denominator {s:?}: {e}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rat::new(num, den))
    }
}

/// Exact conversion: every finite f64 is a dyadic rational.
pub fn rat_from_f64_exact(v: f64) -> Result<Rat, Error> {
    Rat::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite float {v}")))
}

/// Rational from a big integer.
pub fn rat_int(v: impl Into<BigInt>) -> Rat {
    Rat::from_integer(v.into())
}

/// `one`, typed.
pub fn one<S: Scalar>() -> S {
    S::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    #[test]
    fn rational_round_trip_and_reduction() {
        let x = Rat::parse("6/4").unwrap();
        assert_eq!(x.render(), "3/2");
        assert_eq!(Rat::parse("-10/5").unwrap().render(), "-2/1");
        assert_eq!(Rat::parse("7").unwrap().render(), "7/1");
        assert!(Rat::parse("1/0").is_err());
    }

    #[test]
    fn float_round_trip_is_shortest() {
        let x: f64 = 0.1;
        assert_eq!(x.render(), "0.1");
        assert_eq!(f64::parse("0.1").unwrap(), 0.1);
        assert!(f64::parse("inf").is_err());
    }

    #[test]
    fn exact_sqrt_detects_perfect_squares() {
        assert_eq!(
            Rat::ratio(9, 4).sqrt_exact().unwrap(),
            Rat::ratio(3, 2)
        );
        assert_eq!(Rat::ratio(2, 1).sqrt_exact(), None);
        assert_eq!(Rat::ratio(4, 3).sqrt_exact(), None);
        assert_eq!(Rat::zero().sqrt_exact().unwrap(), Rat::zero());
        assert_eq!(Rat::ratio(-4, 1).sqrt_exact(), None);
    }

    #[test]
    fn near_sqrt_is_tight() {
        // |sqrt_near(x)^2 - x| <= x * 2^-126 or so; check a loose bound.
        for (p, q) in [(2i64, 1i64), (7, 3), (589824, 1), (1, 7)] {
            let x = Rat::ratio(p, q);
            let s = x.sqrt_near();
            let err = (&s * &s - &x).abs() / &x;
            assert!(err < Rat::new(BigInt::one(), BigInt::one() << 120u32));
        }
    }

    #[test]
    fn dyadic_f64_conversion_is_exact() {
        let r = rat_from_f64_exact(0.375).unwrap();
        assert_eq!(r, Rat::ratio(3, 8));
    }
}
