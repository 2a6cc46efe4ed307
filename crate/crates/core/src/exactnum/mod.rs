//! Exact rationals, rational intervals and refinable real enclosures.

mod interval;
pub(crate) mod real;
mod roots;
pub mod serde_fmt;

pub use interval::Interval;
pub use real::{approximate, certified_floor, decide, QuotientSpec, RealSpec};
pub use roots::{integer_nth_root, perfect_power_base};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `⌊x⌋` for an exact rational.
pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// `⌈x⌉` for an exact rational.
pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// `2^-bits` as a rational.
pub fn two_pow_neg(bits: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

/// Number of bits in `|n|`; zero for zero.
pub fn bit_len(n: &BigInt) -> u64 {
    n.magnitude().bits()
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub(crate) fn is_zero(x: &Rational) -> bool {
    x.numer().is_zero()
}
