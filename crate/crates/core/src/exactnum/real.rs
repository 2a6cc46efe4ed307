use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::serde_fmt::{self, format_rational};
use super::{bit_len, floor, integer_nth_root, is_zero, two_pow_neg, Interval, Rational};
use crate::{Error, Limits, Result};

/// Symbolic description of a computable real.
///
/// Every variant can be enclosed in a rational interval of any positive
/// width via [`approximate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSpec", into = "RawSpec")]
pub enum RealSpec {
    Rational(Rational),
    /// `base^(1/degree)`, `base >= 2`, `degree >= 2`.
    NthRoot { base: BigUint, degree: u32 },
    /// Euler's number.
    E,
    /// Natural logarithm of a positive rational.
    Ln(Rational),
    /// `inner + offset`.
    Shifted { inner: Box<RealSpec>, offset: Rational },
    Quotient(QuotientSpec),
}

/// `num / den` with `den` certified nonzero at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSpec {
    num: Box<RealSpec>,
    den: Box<RealSpec>,
}

impl QuotientSpec {
    pub fn num(&self) -> &RealSpec {
        &self.num
    }

    pub fn den(&self) -> &RealSpec {
        &self.den
    }
}

impl RealSpec {
    pub fn rational(x: Rational) -> Self {
        RealSpec::Rational(x)
    }

    pub fn nth_root(base: impl Into<BigUint>, degree: u32) -> Result<Self> {
        let base = base.into();
        if base < BigUint::from(2u32) || degree < 2 {
            return Err(Error::invalid(format!(
                "nth root needs base >= 2 and degree >= 2, got base {base}, degree {degree}"
            )));
        }
        Ok(RealSpec::NthRoot { base, degree })
    }

    pub fn e() -> Self {
        RealSpec::E
    }

    pub fn ln(arg: Rational) -> Result<Self> {
        if !arg.is_positive() {
            return Err(Error::invalid(format!(
                "logarithm of non-positive {}",
                format_rational(&arg)
            )));
        }
        Ok(RealSpec::Ln(arg))
    }

    pub fn shifted(inner: RealSpec, offset: Rational) -> Self {
        if is_zero(&offset) {
            return inner;
        }
        match inner {
            RealSpec::Shifted { inner, offset: o } => RealSpec::Shifted {
                inner,
                offset: o + offset,
            }
            .simplify_shift(),
            other => RealSpec::Shifted {
                inner: Box::new(other),
                offset,
            },
        }
    }

    fn simplify_shift(self) -> Self {
        match self {
            RealSpec::Shifted { inner, offset } if is_zero(&offset) => *inner,
            other => other,
        }
    }

    /// Builds `num / den`, refining `den` up to `budget_bits` until its
    /// enclosure excludes zero.
    pub fn quotient(num: RealSpec, den: RealSpec, budget_bits: u64) -> Result<Self> {
        decide(&den, 8, budget_bits, "quotient denominator sign", |i| {
            (!i.contains_zero()).then_some(())
        })?;
        Ok(RealSpec::Quotient(QuotientSpec {
            num: Box::new(num),
            den: Box::new(den),
        }))
    }

    /// The exact value when the spec is structurally rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            RealSpec::Rational(x) => Some(x.clone()),
            RealSpec::NthRoot { base, degree } => {
                let (root, exact) = integer_nth_root(base, *degree);
                exact.then(|| Rational::from_integer(root.into()))
            }
            RealSpec::E => None,
            RealSpec::Ln(x) => x.is_one().then(Rational::zero),
            RealSpec::Shifted { inner, offset } => inner.as_rational().map(|v| v + offset),
            RealSpec::Quotient(q) => {
                let n = q.num.as_rational()?;
                let d = q.den.as_rational()?;
                (!is_zero(&d)).then(|| n / d)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            RealSpec::Rational(_) | RealSpec::E => Ok(()),
            RealSpec::NthRoot { base, degree } => RealSpec::nth_root(base.clone(), *degree).map(drop),
            RealSpec::Ln(x) => RealSpec::ln(x.clone()).map(drop),
            RealSpec::Shifted { inner, .. } => inner.validate(),
            RealSpec::Quotient(q) => {
                q.num.validate()?;
                q.den.validate()
            }
        }
    }
}

/// Encloses `spec` in an interval of width at most `2^-bits` containing its
/// exact value. Exact rationals come back as zero-width intervals; all other
/// endpoints are dyadic.
pub fn approximate(spec: &RealSpec, bits: u64) -> Interval {
    let bits = bits.max(1);
    let raw = enclose(spec, bits + 2);
    if raw.is_point() {
        raw
    } else {
        // width(raw) <= 2^-(k+2); rounding adds at most 2·2^-(k+2).
        raw.round_outward(bits + 2)
    }
}

/// Refines `spec` from `start_bits` up to `budget_bits` (doubling) until
/// `test` returns a decision.
pub fn decide<T>(
    spec: &RealSpec,
    start_bits: u64,
    budget_bits: u64,
    context: &str,
    mut test: impl FnMut(&Interval) -> Option<T>,
) -> Result<T> {
    let budget_bits = budget_bits.max(1);
    let mut bits = start_bits.clamp(1, budget_bits);
    loop {
        let enc = approximate(spec, bits);
        if let Some(t) = test(&enc) {
            return Ok(t);
        }
        if enc.is_point() || bits >= budget_bits {
            return Err(Error::NeedsRefinement {
                bits,
                context: context.to_string(),
            });
        }
        bits = bits.saturating_mul(2).min(budget_bits);
    }
}

/// `⌊spec⌋`, certified by an enclosure that lies within one unit cell.
///
/// Structurally rational specs are floored exactly.
pub fn certified_floor(spec: &RealSpec, hint_bits: u64, limits: &Limits) -> Result<BigInt> {
    if let Some(x) = spec.as_rational() {
        return Ok(floor(&x));
    }
    decide(spec, hint_bits.max(16), limits.precision_budget_bits, "certified floor", |i| {
        let lo = floor(i.lo());
        (lo == floor(i.hi())).then_some(lo)
    })
}

/// Enclosure of width at most `2^-w`, without the final dyadic rounding.
fn enclose(spec: &RealSpec, w: u64) -> Interval {
    match spec {
        RealSpec::Rational(x) => Interval::point(x.clone()),
        RealSpec::NthRoot { base, degree } => enclose_root(base, *degree, w),
        RealSpec::E => enclose_e(w),
        RealSpec::Ln(x) => enclose_ln(x, w),
        RealSpec::Shifted { inner, offset } => enclose(inner, w).add_rational(offset),
        RealSpec::Quotient(q) => enclose_quotient(&q.num, &q.den, w),
    }
}

fn enclose_root(base: &BigUint, degree: u32, w: u64) -> Interval {
    // ⌊(base·2^(degree·w))^(1/degree)⌋ = ⌊base^(1/degree)·2^w⌋
    let scaled = base << (w * degree as u64);
    let (r, exact) = integer_nth_root(&scaled, degree);
    let den = BigInt::one() << w;
    let r = BigInt::from(r);
    if exact {
        Interval::point(Rational::new(r, den))
    } else {
        Interval::from_ordered(Rational::new(r.clone(), den.clone()), Rational::new(r + 1, den))
    }
}

/// `Σ_{i=0}^{n} 1/i!` exactly.
pub(crate) fn euler_partial_sum(n: u64) -> Rational {
    // A_0 = 1, A_i = i·A_{i-1} + 1 gives A_n = Σ_{i=0}^{n} n!/i!.
    let mut acc = BigInt::one();
    let mut fact = BigInt::one();
    for i in 1..=n {
        acc = acc * i + 1;
        fact *= i;
    }
    Rational::new(acc, fact)
}

pub(crate) fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn enclose_e(w: u64) -> Interval {
    // e − S_n = Σ_{i>n} 1/i! < (1/(n+1)!)·Σ_{j>=0} (n+1)^-j = 1/(n·n!),
    // so e ∈ (S_n, S_n + 1/(n·n!)).
    let target = BigInt::one() << w;
    let mut n = 2u64;
    let mut fact = BigInt::from(2);
    while &fact * n < target {
        n += 1;
        fact *= n;
    }
    let s = euler_partial_sum(n);
    let tail = Rational::new(BigInt::one(), fact * n);
    let hi = &s + tail;
    Interval::from_ordered(s, hi)
}

/// Enclosure of `atanh(u) = Σ_{i>=0} u^(2i+1)/(2i+1)` for `0 <= u <= 1/3`,
/// width at most `2^-w`.
fn enclose_atanh(u: &Rational, w: u64) -> Interval {
    debug_assert!(!u.is_negative() && *u <= Rational::new(1.into(), 3.into()));
    if is_zero(u) {
        return Interval::point(Rational::zero());
    }
    let u2 = u * u;
    // 1/(1 − u²) <= 9/8 for u <= 1/3.
    let geom = Rational::new(9.into(), 8.into());
    let tail_target = two_pow_neg(w + 1);
    // Each term shrinks by u² <= 1/9 (> 3 bits), which bounds the term count
    // and so the number of roundings.
    let est_terms = w / 3 + 2;
    let mut guard = 64 - est_terms.leading_zeros() as u64 + 4;
    loop {
        let g = w + guard;
        let mut pow = Interval::point(u.clone()).round_outward(g);
        let mut sum = Interval::point(Rational::zero());
        let mut i = 0u64;
        loop {
            let odd = Rational::from_integer((2 * i + 1).into());
            // Σ_{j>=i} u^(2j+1)/(2j+1) <= u^(2i+1)/(2i+1) · Σ_{m>=0} u^(2m)
            //                          = u^(2i+1)/((2i+1)(1 − u²)).
            let tail = pow.hi() / &odd * &geom;
            if tail <= tail_target {
                let hi = sum.hi() + tail;
                sum = Interval::from_ordered(sum.lo().clone(), hi);
                break;
            }
            let term = pow.mul_rational(&odd.recip()).round_outward(g);
            sum = &sum + &term;
            pow = pow.mul_rational(&u2).round_outward(g);
            i += 1;
        }
        if sum.width() <= two_pow_neg(w) {
            return sum;
        }
        guard += 16;
    }
}

fn enclose_ln2(w: u64) -> Interval {
    // ln 2 = 2·atanh(1/3)
    enclose_atanh(&Rational::new(1.into(), 3.into()), w + 1).scale(&BigInt::from(2))
}

fn enclose_ln(x: &Rational, w: u64) -> Interval {
    assert!(x.is_positive(), "logarithm of non-positive rational");
    if x.is_one() {
        return Interval::point(Rational::zero());
    }
    // x = 2^j·y with 1 <= y < 2; ln x = j·ln 2 + 2·atanh((y−1)/(y+1)),
    // and (y−1)/(y+1) ∈ [0, 1/3).
    let mut j = bit_len(x.numer()) as i64 - bit_len(x.denom()) as i64;
    let pow2 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(BigInt::one() << k as u64)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-k) as u64)
        }
    };
    let mut y = x / pow2(j);
    let two = Rational::from_integer(2.into());
    while y < Rational::one() {
        y *= &two;
        j -= 1;
    }
    while y >= two {
        y /= &two;
        j += 1;
    }
    let u = (&y - Rational::one()) / (&y + Rational::one());
    let main = enclose_atanh(&u, w + 2).scale(&BigInt::from(2));
    if j == 0 {
        return main;
    }
    let jb = BigInt::from(j);
    let ln2 = enclose_ln2(w + 1 + bit_len(&jb));
    &main + &ln2.scale(&jb)
}

fn enclose_quotient(num: &RealSpec, den: &RealSpec, w: u64) -> Interval {
    let target = two_pow_neg(w);
    let mut extra = 8u64;
    loop {
        let n = enclose(num, w + extra);
        let d = enclose(den, w + extra);
        if let Some(q) = n.checked_div(&d) {
            // Bound the rational sizes before testing the width.
            let q = q.round_outward(w + extra);
            if q.width() <= target {
                return q;
            }
        }
        extra = extra.saturating_mul(2);
        assert!(extra < (1 << 24), "quotient denominator never separated from zero");
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSpec {
    Rational {
        #[serde(with = "serde_fmt::rational")]
        value: Rational,
    },
    NthRoot {
        #[serde(with = "biguint_num")]
        base: BigUint,
        degree: u32,
    },
    E,
    Ln {
        #[serde(with = "serde_fmt::rational")]
        arg: Rational,
    },
    Shifted {
        inner: Box<RealSpec>,
        #[serde(with = "serde_fmt::rational")]
        offset: Rational,
    },
    Quotient {
        num: Box<RealSpec>,
        den: Box<RealSpec>,
    },
}

impl TryFrom<RawSpec> for RealSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = match raw {
            RawSpec::Rational { value } => RealSpec::Rational(value),
            RawSpec::NthRoot { base, degree } => RealSpec::NthRoot { base, degree },
            RawSpec::E => RealSpec::E,
            RawSpec::Ln { arg } => RealSpec::Ln(arg),
            RawSpec::Shifted { inner, offset } => RealSpec::Shifted { inner, offset },
            RawSpec::Quotient { num, den } => {
                return RealSpec::quotient(*num, *den, Limits::default().precision_budget_bits)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<RealSpec> for RawSpec {
    fn from(spec: RealSpec) -> Self {
        match spec {
            RealSpec::Rational(value) => RawSpec::Rational { value },
            RealSpec::NthRoot { base, degree } => RawSpec::NthRoot { base, degree },
            RealSpec::E => RawSpec::E,
            RealSpec::Ln(arg) => RawSpec::Ln { arg },
            RealSpec::Shifted { inner, offset } => RawSpec::Shifted { inner, offset },
            RealSpec::Quotient(q) => RawSpec::Quotient { num: q.num, den: q.den },
        }
    }
}

/// Unsigned integers as JSON numbers when they fit in `u64`, strings otherwise.
mod biguint_num {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Num(v) => Ok(v.into()),
            NumOrStr::Str(s) => s.trim().parse().map_err(de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn sqrt2() -> RealSpec {
        RealSpec::nth_root(2u32, 2).unwrap()
    }

    fn e_minus_2() -> RealSpec {
        RealSpec::shifted(RealSpec::e(), int(-2))
    }

    #[test]
    fn literal_is_exact() {
        let i = approximate(&RealSpec::rational(rat(1, 3)), 10);
        assert_eq!(i, Interval::point(rat(1, 3)));
    }

    #[test]
    fn e_contains_partial_sum_bracket() {
        let i = approximate(&RealSpec::e(), 20);
        assert!(i.width() <= two_pow_neg(20));
        // S_12 < e < S_12 + 1/(12·12!)
        let s12 = euler_partial_sum(12);
        let tail = Rational::new(1.into(), factorial(12) * 12);
        let bracket = Interval::new(s12, &euler_partial_sum(12) + tail).unwrap();
        assert!(i.intersect(&bracket).is_some());
        assert!(i.lo() < &rat(2719, 1000) && i.hi() > &rat(2718, 1000));
    }

    #[test]
    fn sqrt2_defining_property() {
        let i = approximate(&sqrt2(), 16);
        assert!(i.lo() * i.lo() <= int(2));
        assert!(i.hi() * i.hi() >= int(2));
        assert!(i.width() <= two_pow_neg(16));
    }

    #[test]
    fn ln_enclosures_bracket_known_values() {
        // ln 2 = 0.693147180559945309417232121458...
        let i = approximate(&RealSpec::ln(int(2)).unwrap(), 100);
        assert!(i.lo() > &rat(693147180559945309, 1_000_000_000_000_000_000));
        assert!(i.hi() < &rat(693147180559945310, 1_000_000_000_000_000_000));
        // ln(1/10) = −2.302585092994045684017991...
        let i = approximate(&RealSpec::ln(rat(1, 10)).unwrap(), 80);
        assert!(i.lo() > &rat(-2302585092994045685, 1_000_000_000_000_000_000));
        assert!(i.hi() < &rat(-2302585092994045684, 1_000_000_000_000_000_000));
        assert_eq!(approximate(&RealSpec::ln(int(1)).unwrap(), 8), Interval::point(int(0)));
    }

    #[test]
    fn ln_of_huge_and_tiny_arguments() {
        // ln(2^300) = 300·ln 2
        let big = Rational::from_integer(BigInt::one() << 300u32);
        let i = approximate(&RealSpec::ln(big).unwrap(), 64);
        let l2 = approximate(&RealSpec::ln(int(2)).unwrap(), 80).scale(&BigInt::from(300));
        assert!(i.intersect(&l2).is_some());
        assert!(i.width() <= two_pow_neg(64));
        let tiny = Rational::new(BigInt::one(), BigInt::from(3).pow(200u32));
        let i = approximate(&RealSpec::ln(tiny).unwrap(), 64);
        let l3 = approximate(&RealSpec::ln(int(3)).unwrap(), 80).scale(&BigInt::from(-200));
        assert!(i.intersect(&l3).is_some());
    }

    #[test]
    fn quotient_requires_nonzero_denominator() {
        let zero = RealSpec::shifted(RealSpec::ln(int(1)).unwrap(), int(0));
        assert!(RealSpec::quotient(RealSpec::e(), zero, 64).is_err());
        let theta = RealSpec::quotient(
            RealSpec::ln(int(2)).unwrap(),
            RealSpec::ln(int(3)).unwrap(),
            64,
        )
        .unwrap();
        let i = approximate(&theta, 100);
        // ln2/ln3 = 0.63092975357145743709...
        assert!(i.lo() > &rat(630929753571457437, 1_000_000_000_000_000_000));
        assert!(i.hi() < &rat(630929753571457438, 1_000_000_000_000_000_000));
    }

    #[test]
    fn width_halves_per_bit() {
        let specs = [
            sqrt2(),
            RealSpec::e(),
            e_minus_2(),
            RealSpec::ln(rat(7, 3)).unwrap(),
            RealSpec::quotient(RealSpec::ln(int(2)).unwrap(), RealSpec::ln(int(3)).unwrap(), 64)
                .unwrap(),
        ];
        for spec in &specs {
            let fine = approximate(spec, 300);
            for k in [1u64, 2, 5, 17, 64, 129, 256] {
                let i = approximate(spec, k);
                assert!(i.width() <= two_pow_neg(k), "{spec:?} at {k}");
                assert!(i.intersect(&fine).is_some(), "{spec:?} at {k}");
            }
        }
    }

    #[test]
    fn floors() {
        let lim = Limits::default();
        assert_eq!(certified_floor(&RealSpec::rational(rat(7, 2)), 8, &lim).unwrap(), 3.into());
        assert_eq!(certified_floor(&RealSpec::rational(rat(-7, 2)), 8, &lim).unwrap(), (-4).into());
        assert_eq!(certified_floor(&sqrt2(), 8, &lim).unwrap(), 1.into());
        assert_eq!(certified_floor(&e_minus_2(), 8, &lim).unwrap(), 0.into());
        assert_eq!(
            certified_floor(&RealSpec::nth_root(9u32, 2).unwrap(), 8, &lim).unwrap(),
            3.into()
        );
    }

    #[test]
    fn floor_of_disguised_integer_needs_refinement() {
        // ln 4 / ln 2 = 2, not structurally rational
        let two = RealSpec::quotient(
            RealSpec::ln(int(4)).unwrap(),
            RealSpec::ln(int(2)).unwrap(),
            64,
        )
        .unwrap();
        let lim = Limits {
            precision_budget_bits: 256,
            ..Limits::default()
        };
        match certified_floor(&two, 8, &lim) {
            Err(Error::NeedsRefinement { bits, .. }) => assert_eq!(bits, 256),
            other => panic!("expected NeedsRefinement, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let json = r#"{"kind":"shifted","inner":{"kind":"e"},"offset":"-2"}"#;
        let spec: RealSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, e_minus_2());
        let root: RealSpec = serde_json::from_str(r#"{"kind":"nthroot","base":2,"degree":3}"#).unwrap();
        assert_eq!(root, RealSpec::nth_root(2u32, 3).unwrap());
        assert_eq!(serde_json::to_string(&root).unwrap(), r#"{"kind":"nthroot","base":2,"degree":3}"#);
        assert!(serde_json::from_str::<RealSpec>(r#"{"kind":"nthroot","base":1,"degree":3}"#).is_err());
        assert!(serde_json::from_str::<RealSpec>(r#"{"kind":"ln","arg":"-1/2"}"#).is_err());
        assert!(serde_json::from_str::<RealSpec>(
            r#"{"kind":"quotient","num":{"kind":"e"},"den":{"kind":"rational","value":"0"}}"#
        )
        .is_err());
        let theta: RealSpec = serde_json::from_str(
            r#"{"kind":"quotient","num":{"kind":"ln","arg":"2"},"den":{"kind":"ln","arg":"3"}}"#,
        )
        .unwrap();
        let again: RealSpec = serde_json::from_str(&serde_json::to_string(&theta).unwrap()).unwrap();
        assert_eq!(theta, again);
    }
}
