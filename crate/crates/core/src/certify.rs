//! Denominator-bound irrationality certificates.
//!
//! Each certificate is a finite statement "x ≠ a/b for every b <= B" backed
//! by an integer combination `z` of known quantities with `z ≠ 0` and `|z|`
//! too small to survive clearing denominators up to `B`. Verifiers recompute
//! every derived field from scratch and compare exactly.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::engel::{engel_digits, partial_sum_parts, EngelExpansion};
use crate::exactnum::real::{euler_partial_sum, factorial};
use crate::exactnum::serde_fmt;
use crate::exactnum::{approximate, bit_len, decide, integer_nth_root, Interval, Rational, RealSpec};
use crate::{Error, Limits, Result};

/// Largest precision a verifier accepts from a certificate.
const MAX_CERT_PRECISION: u64 = 1 << 20;
/// Largest exponent `k` searched by [`certify_nth_root`].
const MAX_ROOT_EXPONENT: u64 = 1 << 20;

/// Deterministic Miller–Rabin; the fixed witness set is exact for all
/// 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Element of `ℤ[y]/(y^n − q)` as coefficients `c_0 … c_{n−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootPoly {
    coeffs: Vec<BigInt>,
    q: BigInt,
}

impl RootPoly {
    pub fn constant(c: BigInt, n: usize, q: &BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs[0] = c;
        RootPoly { coeffs, q: q.clone() }
    }

    /// `y − m`
    pub fn linear(m: &BigInt, n: usize, q: &BigInt) -> Self {
        let mut p = RootPoly::constant(-m, n, q);
        if n == 1 {
            // y ≡ q when n = 1
            p.coeffs[0] += q;
        } else {
            p.coeffs[1] = BigInt::one();
        }
        p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, other: &RootPoly) -> RootPoly {
        let n = self.coeffs.len();
        let mut full = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                full[i + j] += a * b;
            }
        }
        // y^d = q·y^(d−n) for d >= n
        for d in (n..full.len()).rev() {
            let c = std::mem::take(&mut full[d]);
            full[d - n] += c * &self.q;
        }
        full.truncate(n);
        RootPoly {
            coeffs: full,
            q: self.q.clone(),
        }
    }

    pub fn pow(&self, mut k: u64) -> RootPoly {
        let n = self.coeffs.len();
        let mut result = RootPoly::constant(BigInt::one(), n, &self.q);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// Enclosure of `Σ c_i·q^(i/n)` with each root enclosed to `bits` bits.
pub fn eval_root_poly(coeffs: &[BigInt], q: &BigInt, n: u32, bits: u64) -> Interval {
    let qu: BigUint = q.magnitude().clone();
    let mut acc = Interval::point(Rational::zero());
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = if i == 0 {
            Interval::point(Rational::from_integer(c.clone()))
        } else {
            let spec = RealSpec::NthRoot {
                base: num_traits::pow(qu.clone(), i),
                degree: n,
            };
            approximate(&spec, bits).scale(c)
        };
        acc = &acc + &term;
    }
    acc
}

fn root_threshold(b: &BigInt, n: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(b.clone(), n as usize))
}

/// Smallest precision (doubling from `start`) at which `eval` lands strictly
/// inside `(0, upper)`.
fn canonical_enclosure(
    start: u64,
    budget: u64,
    upper: &Rational,
    context: &str,
    mut eval: impl FnMut(u64) -> Interval,
) -> Result<(u64, Interval)> {
    let zero = Rational::zero();
    let mut bits = start;
    loop {
        let enc = eval(bits);
        if enc.strictly_inside(&zero, upper) {
            return Ok((bits, enc));
        }
        if bits >= budget {
            return Err(Error::NeedsRefinement {
                bits,
                context: context.into(),
            });
        }
        bits = (bits * 2).min(budget.max(start));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCertificate {
    #[serde(with = "serde_fmt::bigint")]
    pub q: BigInt,
    pub n: u32,
    /// `⌊q^(1/n)⌋`
    #[serde(with = "serde_fmt::bigint")]
    pub m: BigInt,
    /// Denominator bound `B`.
    #[serde(rename = "B", with = "serde_fmt::bigint")]
    pub b: BigInt,
    pub k: u64,
    /// `(y − m)^k mod (y^n − q)`
    #[serde(with = "serde_fmt::bigint_vec")]
    pub coeffs: Vec<BigInt>,
    /// `1/B^n`
    #[serde(with = "serde_fmt::rational")]
    pub threshold: Rational,
    /// Precision of each root enclosure behind `z_enclosure`.
    pub precision: u64,
    /// Enclosure of `Σ c_i q^(i/n) = (q^(1/n) − m)^k`.
    pub z_enclosure: Interval,
    /// The claim in words, regenerated by the verifier.
    pub statement: String,
}

fn statement(subject: &str, b: &BigInt) -> String {
    format!("{subject} != a/b for all integers a and 1 <= b <= {b}")
}

fn root_subject(q: &BigInt, n: u32) -> String {
    format!("{q}^(1/{n})")
}

/// Certificate that `q^(1/n)` has no rational form with denominator `<= B`.
///
/// If `q^(1/n) = a/s` with `s <= B`, then `s^n·Σ c_i q^(i/n)` is an integer,
/// yet it lies in `(0, s^n/B^n) ⊆ (0, 1)`.
pub fn certify_nth_root(q: u64, n: u32, b: u64, limits: &Limits) -> Result<RootCertificate> {
    if !is_prime(q) {
        return Err(Error::PrimalityFailure(q.to_string()));
    }
    if n < 2 || b < 1 {
        return Err(Error::invalid("need n >= 2 and B >= 1"));
    }
    let (m, exact) = integer_nth_root(&BigUint::from(q), n);
    if exact {
        return Err(Error::ExactRoot {
            base: q.to_string(),
            degree: n,
        });
    }
    let qb = BigInt::from(q);
    let bb = BigInt::from(b);
    let m = BigInt::from(m);
    let threshold = root_threshold(&bb, n);
    let budget = limits.precision_budget_bits;

    // z_k = (q^(1/n) − m)^k decreases in k since 0 < q^(1/n) − m < 1.
    let base = RealSpec::shifted(RealSpec::nth_root(q, n)?, Rational::from_integer(-&m));
    let fits = |k: u64| -> Result<bool> {
        let start = 64 + bit_len(&BigInt::from(k)) + n as u64 * bit_len(&bb);
        decide(&base, start, budget, "root exponent search", |i| {
            let z = i.pow(k as u32);
            if z.hi() < &threshold && z.is_positive() {
                Some(true)
            } else if z.lo() >= &threshold {
                Some(false)
            } else {
                None
            }
        })
    };
    let mut hi = 1u64;
    while !fits(hi)? {
        hi *= 2;
        if hi > MAX_ROOT_EXPONENT {
            return Err(Error::Budget(format!("exponent k beyond {MAX_ROOT_EXPONENT}")));
        }
    }
    let mut lo = hi / 2; // fits(lo) is false (or lo = 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = hi;

    let coeffs = RootPoly::linear(&m, n as usize, &qb).pow(k).coeffs;
    let start = root_start_precision(&coeffs, &bb, n);
    let (precision, z_enclosure) = canonical_enclosure(
        start,
        budget.max(start),
        &threshold,
        "root certificate enclosure",
        |bits| eval_root_poly(&coeffs, &qb, n, bits),
    )?;
    Ok(RootCertificate {
        statement: statement(&root_subject(&qb, n), &bb),
        q: qb,
        n,
        m,
        b: bb,
        k,
        coeffs,
        threshold,
        precision,
        z_enclosure,
    })
}

fn root_start_precision(coeffs: &[BigInt], b: &BigInt, n: u32) -> u64 {
    let total: BigInt = coeffs.iter().map(|c| c.abs()).sum();
    bit_len(&total) + n as u64 * bit_len(b) + 64
}

/// Why a verifier refused a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reject {
    StatementMismatch,
    NotPrime,
    BadParameters,
    WrongFloor,
    ExactRoot,
    CoefficientMismatch,
    ThresholdMismatch,
    PrecisionOutOfRange,
    EnclosureMismatch,
    NotSmall,
    WrongIndex,
    PartialSumMismatch,
    BracketMismatch,
    BracketFails,
    DigitMismatch,
    DigitTooSmall,
    SourceUnavailable,
}

impl fmt::Display for Reject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        let s = s.as_ref().and_then(|v| v.as_str()).unwrap_or("unknown");
        f.write_str(s)
    }
}

pub type Verdict = std::result::Result<(), Reject>;

fn ensure(cond: bool, reason: Reject) -> Verdict {
    if cond {
        Ok(())
    } else {
        Err(reason)
    }
}

/// Re-derives every field of a root certificate and checks the enclosure.
pub fn verify_root_certificate(cert: &RootCertificate) -> Verdict {
    ensure(cert.n >= 2 && cert.b >= BigInt::one() && cert.k >= 1, Reject::BadParameters)?;
    let q = cert.q.to_u64().ok_or(Reject::NotPrime)?;
    ensure(is_prime(q), Reject::NotPrime)?;
    ensure(
        cert.statement == statement(&root_subject(&cert.q, cert.n), &cert.b),
        Reject::StatementMismatch,
    )?;
    ensure(cert.threshold == root_threshold(&cert.b, cert.n), Reject::ThresholdMismatch)?;
    let (m, exact) = integer_nth_root(&BigUint::from(q), cert.n);
    ensure(!exact, Reject::ExactRoot)?;
    ensure(cert.m == BigInt::from(m), Reject::WrongFloor)?;
    ensure(cert.k <= MAX_ROOT_EXPONENT, Reject::BadParameters)?;
    let coeffs = RootPoly::linear(&cert.m, cert.n as usize, &cert.q).pow(cert.k).coeffs;
    ensure(cert.coeffs == coeffs, Reject::CoefficientMismatch)?;
    ensure(
        cert.precision >= 1 && cert.precision <= MAX_CERT_PRECISION,
        Reject::PrecisionOutOfRange,
    )?;
    let fresh = eval_root_poly(&coeffs, &cert.q, cert.n, cert.precision);
    ensure(fresh == cert.z_enclosure, Reject::EnclosureMismatch)?;
    ensure(
        fresh.strictly_inside(&Rational::zero(), &cert.threshold),
        Reject::NotSmall,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerCertificate {
    #[serde(rename = "B", with = "serde_fmt::bigint")]
    pub b: BigInt,
    pub n: u64,
    /// `Σ_{i=0}^{n} 1/i!`
    #[serde(rename = "S", with = "serde_fmt::rational")]
    pub s: Rational,
    /// `n!·(1/(n+1)!) = 1/(n+1)`, a lower bound on `n!·(e − S)`.
    #[serde(with = "serde_fmt::rational")]
    pub lower: Rational,
    /// `n!·(1/(n·n!)) = 1/n`, an upper bound on `n!·(e − S)`.
    #[serde(with = "serde_fmt::rational")]
    pub upper: Rational,
    pub statement: String,
}

/// Certificate that `e ≠ a/b` for every `b <= B`.
///
/// With `n >= B`, `n!·a/b − n!·S` would be an integer, yet
/// `0 < 1/(n+1) < n!·(e − S) < 1/n < 1`.
pub fn certify_e(b: u64) -> Result<EulerCertificate> {
    if b < 1 {
        return Err(Error::invalid("B must be at least 1"));
    }
    let n = b.max(2);
    Ok(EulerCertificate {
        statement: statement("e", &b.into()),
        b: b.into(),
        n,
        s: euler_partial_sum(n),
        lower: Rational::new(BigInt::one(), BigInt::from(n + 1)),
        upper: Rational::new(BigInt::one(), BigInt::from(n)),
    })
}

/// Exact checks on the bracket plus an independent interval check that
/// `S + lower/n! < e < S + upper/n!`.
pub fn verify_euler_certificate(cert: &EulerCertificate, limits: &Limits) -> Verdict {
    let b = cert.b.to_u64().ok_or(Reject::BadParameters)?;
    ensure((1..=1 << 20).contains(&b), Reject::BadParameters)?;
    ensure(cert.statement == statement("e", &cert.b), Reject::StatementMismatch)?;
    ensure(cert.n == b.max(2), Reject::WrongIndex)?;
    ensure(cert.s == euler_partial_sum(cert.n), Reject::PartialSumMismatch)?;
    let n = BigInt::from(cert.n);
    ensure(
        cert.lower == Rational::new(BigInt::one(), &n + 1) && cert.upper == Rational::new(BigInt::one(), n),
        Reject::BracketMismatch,
    )?;
    ensure(
        cert.lower.is_positive()
            && cert.upper < Rational::one()
            && cert.upper <= Rational::new(BigInt::one(), cert.b.clone()),
        Reject::BracketMismatch,
    )?;
    let fact = Rational::from_integer(factorial(cert.n));
    let lo = &cert.s + &cert.lower / &fact;
    let hi = &cert.s + &cert.upper / &fact;
    let start = 2 * bit_len(fact.numer()) + 64;
    let ok = decide(&RealSpec::e(), start, limits.precision_budget_bits.max(start), "e bracket", |e| {
        if e.strictly_inside(&lo, &hi) {
            Some(true)
        } else if e.hi() <= &lo || e.lo() >= &hi {
            Some(false)
        } else {
            None
        }
    });
    ensure(ok == Ok(true), Reject::BracketFails)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngelCertificate {
    pub source: RealSpec,
    #[serde(rename = "B", with = "serde_fmt::bigint")]
    pub b: BigInt,
    /// Number of digits folded into `r` and `s`.
    pub n: usize,
    /// `p_1 … p_{n+1}`
    #[serde(with = "serde_fmt::bigint_vec")]
    pub digits: Vec<BigInt>,
    /// `p_1⋯p_n`
    #[serde(with = "serde_fmt::bigint")]
    pub r: BigInt,
    /// `−r·S_n`
    #[serde(with = "serde_fmt::bigint")]
    pub s: BigInt,
    /// `2/p_{n+1}`
    #[serde(with = "serde_fmt::rational")]
    pub bound: Rational,
    pub precision: u64,
    /// Enclosure of `r·x + s` from a `precision`-bit enclosure of the source.
    pub z_enclosure: Interval,
    pub statement: String,
}

fn engel_z(source: &RealSpec, r: &BigInt, s: &BigInt, bits: u64) -> Interval {
    approximate(source, bits)
        .scale(r)
        .add_rational(&Rational::from_integer(s.clone()))
}

/// Certificate that the source of `e` has no rational form with denominator
/// `<= B`, from the first digit exceeding `2B`.
///
/// If `x = a/b` with `b <= B` then `b·(r·x + s)` is a positive integer below
/// `2b/p_{n+1} < 1`.
pub fn certify_engel_number(e: &EngelExpansion, b: u64, limits: &Limits) -> Result<EngelCertificate> {
    if b < 1 {
        return Err(Error::invalid("B must be at least 1"));
    }
    if e.terminated {
        return Err(Error::invalid("a terminated expansion is rational"));
    }
    let needed = BigInt::from(2) * b;
    let idx = e.digits.iter().position(|p| p > &needed).ok_or(Error::PrefixTooShort {
        needed: needed.to_string(),
        length: e.digits.len(),
    })?;
    let n = idx;
    let (t, r) = partial_sum_parts(&e.digits, n)?;
    let s = -t;
    let bound = Rational::new(BigInt::from(2), e.digits[n].clone());
    let start = bit_len(&r) + bit_len(&e.digits[n]) + 64;
    let (precision, z_enclosure) = canonical_enclosure(
        start,
        limits.precision_budget_bits.max(start),
        &bound,
        "Engel certificate enclosure",
        |bits| engel_z(&e.source, &r, &s, bits),
    )?;
    Ok(EngelCertificate {
        statement: statement("source", &b.into()),
        source: e.source.clone(),
        b: b.into(),
        n,
        digits: e.digits[..=n].to_vec(),
        r,
        s,
        bound,
        precision,
        z_enclosure,
    })
}

/// [`certify_engel_number`] on a prefix grown by doubling until a digit
/// exceeds `2B`, up to `limits.engel_depth_cap` digits.
pub fn certify_engel_source(x: &RealSpec, b: u64, limits: &Limits) -> Result<EngelCertificate> {
    let needed = BigInt::from(2) * b;
    let mut count = 8usize.min(limits.engel_depth_cap);
    loop {
        let e = engel_digits(x, count, limits).map_err(|e| e.cause)?;
        let done = e.terminated || e.digits.len() < count || count >= limits.engel_depth_cap;
        if done || e.digits.iter().any(|p| p > &needed) {
            return certify_engel_number(&e, b, limits);
        }
        count = (count * 2).min(limits.engel_depth_cap);
    }
}

/// Recomputes the digits from the source and checks every derived field.
pub fn verify_engel_certificate(cert: &EngelCertificate, limits: &Limits) -> Verdict {
    ensure(cert.b >= BigInt::one(), Reject::BadParameters)?;
    ensure(cert.statement == statement("source", &cert.b), Reject::StatementMismatch)?;
    ensure(cert.digits.len() == cert.n + 1, Reject::DigitMismatch)?;
    let fresh = engel_digits(&cert.source, cert.n + 1, limits).map_err(|_| Reject::SourceUnavailable)?;
    ensure(fresh.digits == cert.digits && !fresh.terminated, Reject::DigitMismatch)?;
    let last = &cert.digits[cert.n];
    ensure(last > &(BigInt::from(2) * &cert.b), Reject::DigitTooSmall)?;
    let (t, r) = partial_sum_parts(&cert.digits, cert.n).map_err(|_| Reject::DigitMismatch)?;
    ensure(r == cert.r && -t == cert.s, Reject::PartialSumMismatch)?;
    ensure(
        cert.bound == Rational::new(BigInt::from(2), last.clone()),
        Reject::ThresholdMismatch,
    )?;
    ensure(
        cert.precision >= 1 && cert.precision <= MAX_CERT_PRECISION,
        Reject::PrecisionOutOfRange,
    )?;
    let z = engel_z(&cert.source, &cert.r, &cert.s, cert.precision);
    ensure(z == cert.z_enclosure, Reject::EnclosureMismatch)?;
    ensure(z.strictly_inside(&Rational::zero(), &cert.bound), Reject::NotSmall)
}

/// Any certificate, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Root(RootCertificate),
    Euler(EulerCertificate),
    Engel(EngelCertificate),
}

pub fn verify(cert: &Certificate, limits: &Limits) -> Verdict {
    match cert {
        Certificate::Root(c) => verify_root_certificate(c),
        Certificate::Euler(c) => verify_euler_certificate(c, limits),
        Certificate::Engel(c) => verify_engel_certificate(c, limits),
    }
}
