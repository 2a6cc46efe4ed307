//! Engel expansions `x = Σ 1/(p_1⋯p_i)` with non-decreasing digits `p_i >= 2`.
//!
//! The remainder after `n` digits is `α_n = p_n·α_{n−1} − 1`, and it is always
//! an integer affine image of the source: `α_n = r_n·x − t_n` with
//! `r_n = p_1⋯p_n` and `t_n = Σ_{i<=n} p_{i+1}⋯p_n`. Real inputs are handled
//! through that identity, so every remainder enclosure comes from a single
//! enclosure of `x` scaled by an exact integer.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::serde_fmt::{self, format_rational};
use crate::exactnum::{approximate, bit_len, ceil, floor, is_integer, Interval, Rational, RealSpec};
use crate::{Error, Exhausted, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngelExpansion {
    #[serde(with = "serde_fmt::bigint_vec")]
    pub digits: Vec<BigInt>,
    /// The digits reconstruct `source` exactly.
    pub terminated: bool,
    pub source: RealSpec,
}

/// Current remainder `α_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Remainder {
    Exact(Rational),
    /// `scale·source + offset`
    Affine {
        source: RealSpec,
        scale: BigInt,
        offset: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngelState {
    pub alpha: Remainder,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Digit { digit: BigInt, next: EngelState },
    Terminated,
}

impl EngelState {
    /// State before the first digit of `x`. Structurally rational inputs take
    /// the exact path.
    pub fn start(x: &RealSpec) -> Self {
        let alpha = match x.as_rational() {
            Some(v) => Remainder::Exact(v),
            None => Remainder::Affine {
                source: x.clone(),
                scale: BigInt::one(),
                offset: BigInt::zero(),
            },
        };
        EngelState { alpha, index: 0 }
    }
}

/// The digit `p` with `(p−1)·α < 1 < p·α`, or `1/α` when that is an integer.
fn exact_digit(alpha: &Rational) -> BigInt {
    ceil(&alpha.recip())
}

/// Digit decided by an enclosure of an irrational remainder, if the
/// enclosure is tight enough: `⌊1/α⌋ + 1` once `1/α` is pinned strictly
/// inside one unit cell.
fn digit_from_enclosure(alpha: &Interval) -> Option<BigInt> {
    if !alpha.is_positive() {
        return None;
    }
    let inv_lo = alpha.hi().recip();
    let inv_hi = alpha.lo().recip();
    let f = floor(&inv_lo);
    if is_integer(&inv_lo) || f != floor(&inv_hi) {
        return None;
    }
    Some(f + 1)
}

fn affine_enclosure(enc: &Interval, scale: &BigInt, offset: &BigInt) -> Interval {
    enc.scale(scale).add_rational(&Rational::from_integer(offset.clone()))
}

/// One step of the digit recurrence.
pub fn engel_step(state: &EngelState, limits: &Limits) -> Result<Step> {
    match &state.alpha {
        Remainder::Exact(alpha) => {
            if alpha.is_zero() {
                return Ok(Step::Terminated);
            }
            let digit = exact_digit(alpha);
            let next = Rational::from_integer(digit.clone()) * alpha - Rational::one();
            Ok(Step::Digit {
                digit,
                next: EngelState {
                    alpha: Remainder::Exact(next),
                    index: state.index + 1,
                },
            })
        }
        Remainder::Affine {
            source,
            scale,
            offset,
        } => {
            let budget = limits.precision_budget_bits;
            let mut bits = (bit_len(scale) + 64).min(budget);
            let digit = loop {
                let enc = affine_enclosure(&approximate(source, bits), scale, offset);
                if let Some(d) = digit_from_enclosure(&enc) {
                    break d;
                }
                if bits >= budget {
                    return Err(Error::NeedsRefinement {
                        bits,
                        context: format!("Engel digit {}", state.index + 1),
                    });
                }
                bits = (bits * 2).min(budget);
            };
            Ok(Step::Digit {
                next: EngelState {
                    alpha: Remainder::Affine {
                        source: source.clone(),
                        scale: scale * &digit,
                        offset: offset * &digit - 1,
                    },
                    index: state.index + 1,
                },
                digit,
            })
        }
    }
}

/// Streaming digit extractor that keeps one cached enclosure of the source
/// and refines it only when a digit cannot be decided.
#[derive(Debug, Clone)]
pub(crate) struct Cursor {
    source: RealSpec,
    exact: Option<Rational>,
    enc: Interval,
    enc_bits: u64,
    scale: BigInt,
    offset: BigInt,
    digits: Vec<BigInt>,
    terminated: bool,
    budget: u64,
}

impl Cursor {
    /// Checks `0 < x < 1` (certified) before any digit is produced.
    pub(crate) fn new(source: &RealSpec, limits: &Limits) -> Result<Self> {
        let budget = limits.precision_budget_bits;
        let exact = source.as_rational();
        let in_unit = match &exact {
            Some(v) => v.is_positive() && *v < Rational::one(),
            None => crate::exactnum::decide(source, 32, budget, "0 < x < 1", |i| {
                if i.is_positive() && i.hi() < &Rational::one() {
                    Some(true)
                } else if !i.hi().is_positive() || i.lo() >= &Rational::one() {
                    Some(false)
                } else {
                    None
                }
            })?,
        };
        if !in_unit {
            return Err(Error::invalid(format!(
                "Engel expansion needs 0 < x < 1, got {source:?}"
            )));
        }
        let enc_bits = 64.min(budget);
        let enc = match &exact {
            Some(v) => Interval::point(v.clone()),
            None => approximate(source, enc_bits),
        };
        Ok(Cursor {
            source: source.clone(),
            exact,
            enc,
            enc_bits,
            scale: BigInt::one(),
            offset: BigInt::zero(),
            digits: Vec::new(),
            terminated: false,
            budget,
        })
    }

    pub(crate) fn digits(&self) -> &[BigInt] {
        &self.digits
    }

    pub(crate) fn terminated(&self) -> bool {
        self.terminated
    }

    /// `r_n = p_1⋯p_n`.
    pub(crate) fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// `−t_n`, so that `α_n = scale·x + offset`.
    pub(crate) fn offset(&self) -> &BigInt {
        &self.offset
    }

    pub(crate) fn enclose_affine(&self, scale: &BigInt, offset: &BigInt) -> Interval {
        affine_enclosure(&self.enc, scale, offset)
    }

    /// Doubles the source precision, at least enough to resolve `scale` to
    /// 64 fractional bits.
    pub(crate) fn refine(&mut self, context: &str) -> Result<()> {
        if self.exact.is_some() {
            return Err(Error::NeedsRefinement {
                bits: self.enc_bits,
                context: format!("{context} (exact input)"),
            });
        }
        let wanted = (self.enc_bits * 2).max(bit_len(&self.scale) + 64);
        let bits = wanted.min(self.budget);
        if bits <= self.enc_bits {
            return Err(Error::NeedsRefinement {
                bits: self.enc_bits,
                context: context.to_string(),
            });
        }
        self.enc_bits = bits;
        self.enc = approximate(&self.source, bits);
        Ok(())
    }

    /// Refines until `accept` holds for the enclosure of `scale·x + offset`.
    pub(crate) fn certify_affine(
        &mut self,
        scale: &BigInt,
        offset: &BigInt,
        context: &str,
        mut accept: impl FnMut(&Interval) -> bool,
    ) -> Result<Interval> {
        loop {
            let enc = self.enclose_affine(scale, offset);
            if accept(&enc) {
                return Ok(enc);
            }
            self.refine(context)?;
        }
    }

    /// Emits the next digit, or `None` once the expansion has terminated.
    pub(crate) fn next_digit(&mut self) -> Result<Option<BigInt>> {
        if self.terminated {
            return Ok(None);
        }
        let digit = match &self.exact {
            Some(alpha) if alpha.is_zero() => {
                self.terminated = true;
                return Ok(None);
            }
            Some(alpha) => exact_digit(alpha),
            None => {
                let index = self.digits.len() + 1;
                loop {
                    let enc = self.enclose_affine(&self.scale, &self.offset);
                    if let Some(d) = digit_from_enclosure(&enc) {
                        debug_assert!(
                            Rational::from_integer(&d - 1) * enc.hi() <= Rational::one()
                                && Rational::from_integer(d.clone()) * enc.lo() > Rational::one()
                        );
                        break d;
                    }
                    self.refine(&format!("Engel digit {index}"))?;
                }
            }
        };
        assert!(digit >= BigInt::from(2), "Engel digit below 2");
        if let Some(last) = self.digits.last() {
            assert!(&digit >= last, "Engel digits decreased: {last} then {digit}");
        }
        if let Some(alpha) = &self.exact {
            self.exact = Some(Rational::from_integer(digit.clone()) * alpha - Rational::one());
        }
        self.scale = &self.scale * &digit;
        self.offset = &self.offset * &digit - 1;
        self.digits.push(digit.clone());
        Ok(Some(digit))
    }

    pub(crate) fn expansion(&self) -> EngelExpansion {
        EngelExpansion {
            digits: self.digits.clone(),
            terminated: self.terminated,
            source: self.source.clone(),
        }
    }
}

/// First `count` Engel digits of `x ∈ (0, 1)`, fewer when the expansion
/// terminates. On budget exhaustion the digits reached so far come back in
/// the error.
pub fn engel_digits(
    x: &RealSpec,
    count: usize,
    limits: &Limits,
) -> std::result::Result<EngelExpansion, Exhausted<EngelExpansion>> {
    if count == 0 {
        return Err(Error::invalid("digit count must be at least 1").into());
    }
    let mut cursor = Cursor::new(x, limits)?;
    while cursor.digits().len() < count {
        match cursor.next_digit() {
            Ok(Some(_)) => {}
            Ok(None) => break,
            Err(e) => return Err(Exhausted::new(Some(cursor.expansion()), e)),
        }
    }
    // A rational input whose remainder just hit zero is complete even when
    // the last requested digit was the final one.
    if !cursor.terminated() && matches!(&cursor.exact, Some(a) if a.is_zero()) {
        cursor.terminated = true;
    }
    Ok(cursor.expansion())
}

/// `S_n = Σ_{i=1}^{n} 1/(p_1⋯p_i)` exactly.
pub fn partial_sum(e: &EngelExpansion, n: usize) -> Result<Rational> {
    let (num, den) = partial_sum_parts(&e.digits, n)?;
    Ok(Rational::new(num, den))
}

/// `(t_n, r_n)` with `S_n = t_n / r_n` and `r_n = p_1⋯p_n`.
pub(crate) fn partial_sum_parts(digits: &[BigInt], n: usize) -> Result<(BigInt, BigInt)> {
    if n > digits.len() {
        return Err(Error::invalid(format!(
            "prefix {n} longer than the {} available digits",
            digits.len()
        )));
    }
    let mut t = BigInt::zero();
    let mut r = BigInt::one();
    for p in &digits[..n] {
        // t_n = p_n·t_{n−1} + 1
        t = t * p + 1;
        r *= p;
    }
    Ok((t, r))
}

/// `1/(p_1⋯p_n)`, an upper bound on `|x − S_n|` for the expansion's source.
pub fn truncation_bound(e: &EngelExpansion, n: usize) -> Result<Rational> {
    let (_, r) = partial_sum_parts(&e.digits, n)?;
    Ok(Rational::new(BigInt::one(), r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternReport {
    /// Number of indices with `p_i < p_{i+1}`.
    pub strict_increases: usize,
    /// 1-based start of a trailing run of at least two equal digits.
    pub tail_constant_from: Option<usize>,
}

/// Heuristic look at a finite prefix: a long constant tail is what a rational
/// expansion of the form `…, c, c, c, …` looks like. Never a proof.
pub fn rational_pattern_scan(digits: &[BigInt]) -> PatternReport {
    let strict_increases = digits.windows(2).filter(|w| w[0] < w[1]).count();
    let tail_constant_from = digits.last().and_then(|last| {
        let run = digits.iter().rev().take_while(|d| *d == last).count();
        (run >= 2).then(|| digits.len() - run + 1)
    });
    PatternReport {
        strict_increases,
        tail_constant_from,
    }
}

impl EngelExpansion {
    pub fn summary(&self) -> String {
        let digits: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        let s = partial_sum(self, self.digits.len()).map(|s| format_rational(&s));
        format!(
            "[{}]{} S = {}",
            digits.join(", "),
            if self.terminated { " (terminated)" } else { "" },
            s.unwrap_or_default()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn digits(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&d| BigInt::from(d)).collect()
    }

    fn e_minus_2() -> RealSpec {
        RealSpec::shifted(RealSpec::e(), int(-2))
    }

    fn sqrt2_minus_1() -> RealSpec {
        RealSpec::shifted(RealSpec::nth_root(2u32, 2).unwrap(), int(-1))
    }

    #[test]
    fn step_exact_half() {
        let lim = Limits::default();
        let s0 = EngelState::start(&RealSpec::rational(rat(1, 2)));
        let Step::Digit { digit, next } = engel_step(&s0, &lim).unwrap() else {
            panic!("expected a digit")
        };
        assert_eq!(digit, 2.into());
        assert_eq!(next.alpha, Remainder::Exact(int(0)));
        assert_eq!(engel_step(&next, &lim).unwrap(), Step::Terminated);
    }

    #[test]
    fn step_exact_three_eighths() {
        let lim = Limits::default();
        let s0 = EngelState::start(&RealSpec::rational(rat(3, 8)));
        let Step::Digit { digit, next } = engel_step(&s0, &lim).unwrap() else { panic!() };
        assert_eq!(digit, 3.into());
        assert_eq!(next.alpha, Remainder::Exact(rat(1, 8)));
        let Step::Digit { digit, next } = engel_step(&next, &lim).unwrap() else { panic!() };
        assert_eq!(digit, 8.into());
        assert_eq!(next.alpha, Remainder::Exact(int(0)));
        assert_eq!(rat(1, 3) + rat(1, 24), rat(3, 8));
    }

    #[test]
    fn step_real_sqrt2_minus_1() {
        let lim = Limits::default();
        let s0 = EngelState::start(&sqrt2_minus_1());
        let Step::Digit { digit, next } = engel_step(&s0, &lim).unwrap() else { panic!() };
        assert_eq!(digit, 3.into());
        // next α = 3(√2 − 1) − 1 = 3√2 − 4
        match &next.alpha {
            Remainder::Affine { scale, offset, .. } => {
                assert_eq!(*scale, 3.into());
                assert_eq!(*offset, (-1).into());
            }
            other => panic!("unexpected {other:?}"),
        }
        // 2(√2−1) < 1 < 3(√2−1) < 2 at enclosure level
        let a = approximate(&sqrt2_minus_1(), 40);
        assert!(a.scale(&2.into()).hi() < &int(1));
        assert!(a.scale(&3.into()).lo() > &int(1));
        assert!(a.scale(&3.into()).hi() < &int(2));
    }

    #[test]
    fn digits_of_rationals() {
        let lim = Limits::default();
        let e = engel_digits(&RealSpec::rational(rat(3, 8)), 10, &lim).unwrap();
        assert_eq!(e.digits, digits(&[3, 8]));
        assert!(e.terminated);
        let e = engel_digits(&RealSpec::rational(rat(1, 2)), 3, &lim).unwrap();
        assert_eq!(e.digits, digits(&[2]));
        assert!(e.terminated);
        // exactly as many digits as the expansion has
        let e = engel_digits(&RealSpec::rational(rat(3, 8)), 2, &lim).unwrap();
        assert!(e.terminated);
    }

    #[test]
    fn digits_of_e_minus_2() {
        let e = engel_digits(&e_minus_2(), 5, &Limits::default()).unwrap();
        assert_eq!(e.digits, digits(&[2, 3, 4, 5, 6]));
        assert!(!e.terminated);
    }

    #[test]
    fn rejects_out_of_range_sources() {
        let lim = Limits::default();
        assert!(engel_digits(&RealSpec::e(), 3, &lim).is_err());
        assert!(engel_digits(&RealSpec::rational(int(0)), 3, &lim).is_err());
        assert!(engel_digits(&RealSpec::rational(int(1)), 3, &lim).is_err());
        assert!(engel_digits(&RealSpec::rational(rat(1, 2)), 0, &lim).is_err());
    }

    #[test]
    fn budget_exhaustion_returns_partial_digits() {
        let lim = Limits {
            precision_budget_bits: 96,
            ..Limits::default()
        };
        let err = engel_digits(&e_minus_2(), 200, &lim).unwrap_err();
        let partial = err.best.expect("partial expansion");
        assert!(err.cause.is_budget());
        assert!(!partial.digits.is_empty() && partial.digits.len() < 200);
        let expect: Vec<BigInt> = (2..2 + partial.digits.len() as i64).map(BigInt::from).collect();
        assert_eq!(partial.digits, expect);
        assert!(!partial.terminated);
    }

    #[test]
    fn partial_sums() {
        let e = EngelExpansion {
            digits: digits(&[2, 3, 4]),
            terminated: false,
            source: e_minus_2(),
        };
        assert_eq!(partial_sum(&e, 3).unwrap(), rat(17, 24));
        assert_eq!(partial_sum(&e, 0).unwrap(), int(0));
        assert!(partial_sum(&e, 4).is_err());
        let e = EngelExpansion {
            digits: digits(&[3, 8]),
            terminated: true,
            source: RealSpec::rational(rat(3, 8)),
        };
        assert_eq!(partial_sum(&e, 2).unwrap(), rat(3, 8));
    }

    #[test]
    fn truncation_bounds() {
        let e = EngelExpansion {
            digits: digits(&[2, 3, 4, 5]),
            terminated: false,
            source: e_minus_2(),
        };
        assert_eq!(truncation_bound(&e, 3).unwrap(), rat(1, 24));
        assert_eq!(truncation_bound(&e, 1).unwrap(), rat(1, 2));
    }

    #[test]
    fn truncation_bound_holds_for_e_minus_2() {
        let lim = Limits::default();
        let e = engel_digits(&e_minus_2(), 30, &lim).unwrap();
        let x = approximate(&e_minus_2(), 256);
        for n in 0..=30 {
            let err = x.add_rational(&-partial_sum(&e, n).unwrap()).abs();
            assert!(err.hi() < &truncation_bound(&e, n).unwrap(), "n = {n}");
        }
        assert_eq!(truncation_bound(&e, 5).unwrap(), rat(1, 720));
    }

    #[test]
    fn pattern_scan() {
        let r = rational_pattern_scan(&digits(&[2, 3, 4, 5]));
        assert_eq!((r.strict_increases, r.tail_constant_from), (3, None));
        let r = rational_pattern_scan(&digits(&[3, 8]));
        assert_eq!((r.strict_increases, r.tail_constant_from), (1, None));
        let r = rational_pattern_scan(&digits(&[2, 5, 5, 5, 5]));
        assert_eq!((r.strict_increases, r.tail_constant_from), (1, Some(2)));
        let r = rational_pattern_scan(&[]);
        assert_eq!((r.strict_increases, r.tail_constant_from), (0, None));
    }

    #[test]
    fn stateless_and_streaming_paths_agree() {
        let lim = Limits::default();
        let x = RealSpec::quotient(
            RealSpec::ln(int(2)).unwrap(),
            RealSpec::ln(int(3)).unwrap(),
            64,
        )
        .unwrap();
        let streamed = engel_digits(&x, 8, &lim).unwrap();
        let mut state = EngelState::start(&x);
        let mut stepped = Vec::new();
        for _ in 0..8 {
            match engel_step(&state, &lim).unwrap() {
                Step::Digit { digit, next } => {
                    stepped.push(digit);
                    state = next;
                }
                Step::Terminated => break,
            }
        }
        assert_eq!(streamed.digits, stepped);
        assert_eq!(stepped[..4], digits(&[2, 4, 22, 23])[..]);
    }
}
