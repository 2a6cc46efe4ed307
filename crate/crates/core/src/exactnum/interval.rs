use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::serde_fmt::{self, format_rational};
use super::{ceil, floor, Rational};
use crate::{Error, Result};

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Every operation returns an interval containing all pointwise results, so
/// an interval is a proof that its value lies between the endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    #[serde(with = "serde_fmt::rational")]
    lo: Rational,
    #[serde(with = "serde_fmt::rational")]
    hi: Rational,
}

#[derive(Deserialize)]
struct RawInterval {
    #[serde(with = "serde_fmt::rational")]
    lo: Rational,
    #[serde(with = "serde_fmt::rational")]
    hi: Rational,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!(
                "interval lower end {} exceeds upper end {}",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// Callers guarantee `lo <= hi`.
    pub(crate) fn from_ordered(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊆ (lo, hi)` with strict inequalities on both sides.
    pub fn strictly_inside(&self, lo: &Rational, hi: &Rational) -> bool {
        lo < &self.lo && &self.hi < hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn scale(&self, k: &BigInt) -> Interval {
        let k = Rational::from_integer(k.clone());
        self.mul_rational(&k)
    }

    pub fn mul_rational(&self, k: &Rational) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn add_rational(&self, k: &Rational) -> Interval {
        Interval {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            Interval {
                lo: Rational::zero(),
                hi: self.mag(),
            }
        }
    }

    /// `1 / self`, or `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// `self / other`, or `None` when `other` contains zero.
    pub fn checked_div(&self, other: &Interval) -> Option<Interval> {
        other.recip().map(|r| self * &r)
    }

    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 || !self.lo.is_negative() {
            // monotone on the whole interval
            if a <= b {
                Interval { lo: a, hi: b }
            } else {
                Interval { lo: b, hi: a }
            }
        } else if !self.hi.is_positive() {
            Interval { lo: b, hi: a }
        } else {
            let hi = if a > b { a } else { b };
            Interval {
                lo: Rational::zero(),
                hi,
            }
        }
    }

    /// Widens both endpoints outward onto the dyadic grid `2^-bits`.
    ///
    /// The result contains `self` and is at most `2^(1-bits)` wider.
    pub fn round_outward(&self, bits: u64) -> Interval {
        let scale = Rational::from_integer(BigInt::one() << bits);
        let den = BigInt::one() << bits;
        let lo = floor(&(&self.lo * &scale));
        let hi = ceil(&(&self.hi * &scale));
        Interval {
            lo: Rational::new(lo, den.clone()),
            hi: Rational::new(hi, den),
        }
    }

    /// Lossy midpoint for display and floating-point pre-screening only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let mid = (&self.lo + &self.hi) / Rational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for &Interval {
    type Output = Interval;

    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;

    fn sub(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;

    fn mul(self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Interval { lo, hi }
    }
}

impl Neg for &Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        -&self
    }
}
