//! Density witnesses for `𝔸 = {m + nq : m, n ∈ ℤ}` and the additive solver.
//!
//! After `n` Engel digits of `q ∈ (0, 1)` the remainder `α_n = r·q + s` with
//! `r = p_1⋯p_n` and `s = −r·S_n` is an element of `𝔸` lying in
//! `(0, 2/p_{n+1})`. Since the digits of an irrational number are unbounded,
//! these elements shrink to zero, and integer multiples of a small one land
//! within any target window.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::engel::Cursor;
use crate::exactnum::serde_fmt;
use crate::exactnum::{approximate, bit_len, certified_floor, decide, floor, Interval, Rational, RealSpec};
use crate::{Error, Exhausted, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityWitness {
    /// `p_1⋯p_n`, the coefficient of `q`.
    #[serde(with = "serde_fmt::bigint")]
    pub r: BigInt,
    /// `−Σ_{i=1}^{n} p_{i+1}⋯p_n`, the integer part.
    #[serde(with = "serde_fmt::bigint")]
    pub s: BigInt,
    /// Certified enclosure of `z = q·r + s`, contained in `(0, bound)`.
    pub z_enclosure: Interval,
    /// `2/p_{n+1}`.
    #[serde(with = "serde_fmt::rational")]
    pub bound: Rational,
    pub depth: usize,
}

/// Refines the cursor until `r·q + s` is certified inside `(0, upper)`.
fn certify_small(cursor: &mut Cursor, r: &BigInt, s: &BigInt, upper: &Rational) -> Result<Interval> {
    let zero = Rational::zero();
    cursor.certify_affine(r, s, "witness enclosure", |z| z.strictly_inside(&zero, upper))
}

fn bound_for(next_digit: &BigInt) -> Rational {
    Rational::new(BigInt::from(2), next_digit.clone())
}

/// Emits one digit, mapping termination to `DegenerateTermination`.
fn advance(cursor: &mut Cursor, depth: usize) -> Result<BigInt> {
    cursor.next_digit()?.ok_or(Error::DegenerateTermination {
        length: cursor.digits().len(),
        depth,
    })
}

/// Witness from the first `depth` Engel digits of `q ∈ (0, 1)`.
pub fn make_witness(q: &RealSpec, depth: usize, limits: &Limits) -> Result<DensityWitness> {
    if depth == 0 {
        return Err(Error::invalid("witness depth must be at least 1"));
    }
    let mut cursor = Cursor::new(q, limits)?;
    for _ in 0..depth {
        advance(&mut cursor, depth)?;
    }
    let r = cursor.scale().clone();
    let s = cursor.offset().clone();
    let next = advance(&mut cursor, depth)?;
    let bound = bound_for(&next);
    let z_enclosure = certify_small(&mut cursor, &r, &s, &bound)?;
    Ok(DensityWitness {
        r,
        s,
        z_enclosure,
        bound,
        depth,
    })
}

/// First witness (by depth) certified below `eps`.
///
/// Stops as soon as either `2/p_{n+1} < eps`, or `α_n < 1/(p_{n+1} − 1) < eps`
/// guarantees refinement will succeed, or the enclosure already in hand is
/// below `eps`.
pub fn witness_below(
    q: &RealSpec,
    eps: &Rational,
    limits: &Limits,
) -> std::result::Result<DensityWitness, Exhausted<DensityWitness>> {
    if !eps.is_positive() {
        return Err(Error::invalid("eps must be positive").into());
    }
    let mut cursor = Cursor::new(q, limits)?;
    let mut best: Option<DensityWitness> = None;
    let fail = |best: Option<DensityWitness>, e: Error| Exhausted::new(best, e);
    if let Err(e) = advance(&mut cursor, 1) {
        return Err(fail(best, e));
    }
    loop {
        let depth = cursor.digits().len();
        if depth > limits.engel_depth_cap {
            return Err(fail(
                best,
                Error::Budget(format!("Engel depth cap {} reached", limits.engel_depth_cap)),
            ));
        }
        let r = cursor.scale().clone();
        let s = cursor.offset().clone();
        let next = match advance(&mut cursor, depth + 1) {
            Ok(p) => p,
            Err(e) => return Err(fail(best, e)),
        };
        let bound = bound_for(&next);
        let upper = if &bound < eps { bound.clone() } else { eps.clone() };
        let guaranteed = Rational::from_integer(&next - 1) * eps > Rational::one();
        if &bound < eps || guaranteed {
            return match certify_small(&mut cursor, &r, &s, &upper) {
                Ok(z_enclosure) => Ok(DensityWitness {
                    r,
                    s,
                    z_enclosure,
                    bound,
                    depth,
                }),
                Err(e) => Err(fail(best, e)),
            };
        }
        let z = cursor.enclose_affine(&r, &s);
        if z.strictly_inside(&Rational::zero(), &bound) {
            let found = z.hi() < eps;
            let w = DensityWitness {
                r,
                s,
                z_enclosure: z,
                bound,
                depth,
            };
            if found {
                return Ok(w);
            }
            best = Some(w);
        }
    }
}

impl DensityWitness {
    /// Checks `s + S_depth·r = 0` against the given Engel digits.
    pub fn matches_digits(&self, digits: &[BigInt]) -> bool {
        match crate::engel::partial_sum_parts(digits, self.depth) {
            Ok((t, r)) => r == self.r && -t == self.s,
            Err(_) => false,
        }
    }
}

/// A witness for an arbitrary irrational `q`, stated as `m + n·q ∈ (0, bound)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldedWitness {
    /// `⌊q⌋`; the Engel digits are those of `q − ⌊q⌋`.
    #[serde(with = "serde_fmt::bigint")]
    pub floor: BigInt,
    /// `s − r·⌊q⌋`
    #[serde(with = "serde_fmt::bigint")]
    pub m: BigInt,
    /// `r`
    #[serde(with = "serde_fmt::bigint")]
    pub n: BigInt,
    pub witness: DensityWitness,
}

/// [`witness_below`] after folding `q` into `(0, 1)`.
pub fn folded_witness_below(
    q: &RealSpec,
    eps: &Rational,
    limits: &Limits,
) -> std::result::Result<FoldedWitness, Exhausted<FoldedWitness>> {
    let whole = certified_floor(q, 32, limits)?;
    let frac = RealSpec::shifted(q.clone(), Rational::from_integer(-&whole));
    let fold = |w: DensityWitness| FoldedWitness {
        m: &w.s - &w.r * &whole,
        n: w.r.clone(),
        floor: whole.clone(),
        witness: w,
    };
    match witness_below(&frac, eps, limits) {
        Ok(w) => Ok(fold(w)),
        Err(e) => Err(Exhausted::new(e.best.map(fold), e.cause)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveSolution {
    #[serde(with = "serde_fmt::bigint")]
    pub m: BigInt,
    #[serde(with = "serde_fmt::bigint")]
    pub n: BigInt,
    /// Certified enclosure of `m + n·q − t`, inside `(−eps, eps)`.
    pub err: Interval,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TargetSign {
    Small,
    Positive,
    Negative,
}

/// Integers `m, n` with certified `|m + n·q − t| < eps`.
///
/// `q` may be any irrational; it is folded into `(0, 1)` first, which keeps
/// the set `𝔸` unchanged. The target is reached as `k·z` for a witness
/// `z < eps` and `k = ⌊|t|/z⌋`.
pub fn approx_additive(
    q: &RealSpec,
    t: &RealSpec,
    eps: &Rational,
    limits: &Limits,
) -> Result<AdditiveSolution> {
    if !eps.is_positive() {
        return Err(Error::invalid("eps must be positive"));
    }
    let budget = limits.precision_budget_bits;
    let neg_eps = -eps;

    let (sign, t_enc) = decide(t, 32, budget, "target sign", |i| {
        let sign = if i.strictly_inside(&neg_eps, eps) {
            TargetSign::Small
        } else if i.is_positive() {
            TargetSign::Positive
        } else if i.is_negative() {
            TargetSign::Negative
        } else {
            return None;
        };
        Some((sign, i.clone()))
    })?;
    if sign == TargetSign::Small {
        return Ok(AdditiveSolution {
            m: BigInt::zero(),
            n: BigInt::zero(),
            err: -t_enc,
        });
    }
    let flip = sign == TargetSign::Negative;

    let whole = certified_floor(q, 32, limits)?;
    let frac = RealSpec::shifted(q.clone(), Rational::from_integer(-&whole));
    let w = witness_below(&frac, eps, limits)?;

    // k = ⌊|t| / z⌋ with z = r·frac + s
    let ratio_bits = bit_len(&(floor(&(t_enc.mag() / eps)) + 1));
    let mut bits = (bit_len(&w.r) + ratio_bits + 64).min(budget);
    let k = loop {
        let z = approximate(&frac, bits)
            .scale(&w.r)
            .add_rational(&Rational::from_integer(w.s.clone()));
        let tb = approximate(t, bits);
        let tb = if flip { -tb } else { tb };
        if z.is_positive() {
            if let Some(ratio) = tb.checked_div(&z) {
                let lo = floor(ratio.lo());
                if lo == floor(ratio.hi()) {
                    break lo;
                }
                if bits >= budget {
                    // Either neighbour leaves an error below z < eps.
                    break lo;
                }
            }
        } else if bits >= budget {
            return Err(Error::NeedsRefinement {
                bits,
                context: "witness positivity".into(),
            });
        }
        bits = (bits * 2).min(budget);
    };
    let k = if k.is_negative() { BigInt::zero() } else { k };

    // k·z = (k·r)·frac + k·s = (k·r)·q + (k·s − k·r·⌊q⌋)
    let mut n = &k * &w.r;
    let mut m = &k * &w.s - &n * &whole;
    if flip {
        n = -n;
        m = -m;
    }
    let err = certify_residual(q, t, &m, &n, eps, limits)?;
    Ok(AdditiveSolution { m, n, err })
}

/// Enclosure of `m + n·q − t` refined until it lies in `(−eps, eps)`.
pub fn certify_residual(
    q: &RealSpec,
    t: &RealSpec,
    m: &BigInt,
    n: &BigInt,
    eps: &Rational,
    limits: &Limits,
) -> Result<Interval> {
    let budget = limits.precision_budget_bits;
    let neg_eps = -eps;
    let eps_bits = bit_len(eps.denom()).saturating_sub(bit_len(eps.numer()));
    let mut bits = (bit_len(n) + eps_bits + 64).min(budget);
    let m = Rational::from_integer(m.clone());
    loop {
        let e = &approximate(q, bits).scale(n).add_rational(&m) - &approximate(t, bits);
        if e.strictly_inside(&neg_eps, eps) {
            return Ok(e);
        }
        if bits >= budget {
            return Err(Error::NeedsRefinement {
                bits,
                context: "additive residual".into(),
            });
        }
        bits = (bits * 2).min(budget);
    }
}

/// Smallest positive element of `{m + n·a/b}`, namely `1/b`.
pub fn rational_min_gap(q: &Rational) -> Rational {
    Rational::new(BigInt::one(), q.denom().clone())
}

/// `(m, n)` with `m + n·q = 1/b` exactly, from the extended gcd of `b` and `a`.
pub fn min_gap_witness(q: &Rational) -> (BigInt, BigInt) {
    let eg = q.denom().extended_gcd(q.numer());
    let (mut m, mut n) = (eg.x, eg.y);
    if eg.gcd.is_negative() {
        m = -m;
        n = -n;
    }
    debug_assert!(eg.gcd.abs().is_one());
    (m, n)
}
