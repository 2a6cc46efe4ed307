//! Approximation over `𝔹 = {±p^m q^n}`.
//!
//! Logarithms turn `𝔹 ∩ (0, ∞)` into the additive group `{m·ln p + n·ln q}`,
//! which after dividing by `ln q` is the set `{n + m·θ}` with
//! `θ = ln p / ln q`. Every returned solution is checked by evaluating
//! `p^m q^n` exactly as a rational.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::density::approx_additive;
use crate::exactnum::serde_fmt::{self, format_rational};
use crate::exactnum::{approximate, decide, perfect_power_base, Rational, RealSpec};
use crate::{Error, Exhausted, Limits, Result};

/// How a solution was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// `y` is itself `p^m q^n`.
    ExactHit,
    /// Engel density witness for `θ`, scaled onto the target.
    Witness,
    /// Bounded scan over the `q` exponent.
    Scan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulProblem {
    #[serde(with = "serde_fmt::bigint")]
    pub p: BigInt,
    #[serde(with = "serde_fmt::bigint")]
    pub q: BigInt,
    #[serde(with = "serde_fmt::rational")]
    pub y: Rational,
    #[serde(with = "serde_fmt::rational")]
    pub eps: Rational,
}

impl MulProblem {
    pub fn new(p: u64, q: u64, y: Rational, eps: Rational) -> Result<Self> {
        let prob = MulProblem {
            p: p.into(),
            q: q.into(),
            y,
            eps,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < BigInt::from(2) || self.q < BigInt::from(2) {
            return Err(Error::invalid("p and q must be at least 2"));
        }
        if !self.y.is_positive() || !self.eps.is_positive() {
            return Err(Error::invalid("target y and eps must be positive"));
        }
        if !mul_independence(&to_biguint(&self.p), &to_biguint(&self.q)) {
            return Err(Error::DependentDilations {
                p: self.p.to_string(),
                q: self.q.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulSolution {
    /// Exponent of `p`.
    #[serde(with = "serde_fmt::bigint")]
    pub m: BigInt,
    /// Exponent of `q`.
    #[serde(with = "serde_fmt::bigint")]
    pub n: BigInt,
    /// `±p^m q^n` exactly.
    #[serde(with = "serde_fmt::rational")]
    pub value: Rational,
    /// `|value − y|` exactly.
    #[serde(with = "serde_fmt::rational")]
    pub err: Rational,
    pub route: Route,
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.magnitude().clone()
}

/// Whether `p^b = q^a` has a solution in positive integers, for `p, q >= 2`.
///
/// Writing `p = u^g`, `q = v^h` with `u, v` not perfect powers, a solution
/// exists iff `u = v`.
pub fn mul_independence(p: &BigUint, q: &BigUint) -> bool {
    assert!(*p >= BigUint::from(2u32) && *q >= BigUint::from(2u32), "p, q must be >= 2");
    perfect_power_base(p).0 != perfect_power_base(q).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ratio {
    /// Satisfied for every `(a, b)`.
    Any,
    /// Satisfied only when `a/b` equals this reduced pair.
    Fixed(u64, u64),
    Never,
}

/// Constraint on `(a, b)` from `x^b = y^a` for positive integers `x, y`.
fn power_constraint(x: &BigUint, y: &BigUint) -> Ratio {
    let one = BigUint::one();
    match (x == &one, y == &one) {
        (true, true) => Ratio::Any,
        (true, false) | (false, true) => Ratio::Never,
        (false, false) => {
            let (u, g) = perfect_power_base(x);
            let (v, h) = perfect_power_base(y);
            if u != v {
                return Ratio::Never;
            }
            // g·b = h·a  ⇒  a/b = g/h
            let d = num_integer::gcd(g, h) as u64;
            Ratio::Fixed(g as u64 / d, h as u64 / d)
        }
    }
}

/// Whether positive rationals `p, q ≠ 1` are multiplicatively independent,
/// i.e. `ln p / ln q` is irrational.
pub fn rational_independence(p: &Rational, q: &Rational) -> Result<bool> {
    if !p.is_positive() || !q.is_positive() || p.is_one() || q.is_one() {
        return Err(Error::invalid("dilations must be positive and different from 1"));
    }
    // p^b = q^a with a, b > 0 forces p, q on the same side of 1.
    if (p > &Rational::one()) != (q > &Rational::one()) {
        return Ok(true);
    }
    // Lowest terms are unique, so p^b = q^a splits into numerators and
    // denominators separately.
    let num = power_constraint(&to_biguint(p.numer()), &to_biguint(q.numer()));
    let den = power_constraint(&to_biguint(p.denom()), &to_biguint(q.denom()));
    let dependent = match (num, den) {
        (Ratio::Never, _) | (_, Ratio::Never) => false,
        (Ratio::Fixed(a, b), Ratio::Fixed(c, d)) => (a, b) == (c, d),
        (Ratio::Fixed(..), Ratio::Any) | (Ratio::Any, Ratio::Fixed(..)) => true,
        (Ratio::Any, Ratio::Any) => unreachable!("p = q = 1 excluded above"),
    };
    Ok(!dependent)
}

/// `θ = ln p / ln q` for an independent pair.
pub fn log_ratio_spec(p: u64, q: u64, limits: &Limits) -> Result<RealSpec> {
    if p < 2 || q < 2 {
        return Err(Error::invalid("p and q must be at least 2"));
    }
    if !mul_independence(&p.into(), &q.into()) {
        return Err(Error::DependentDilations {
            p: p.to_string(),
            q: q.to_string(),
        });
    }
    RealSpec::quotient(
        RealSpec::ln(Rational::from_integer(p.into()))?,
        RealSpec::ln(Rational::from_integer(q.into()))?,
        limits.precision_budget_bits,
    )
}

/// A rational `δ` with `0 < δ <= ln(1 + eps/y)`.
///
/// For `|Δ| < δ`: `|e^(ln y + Δ) − y| = y·|e^Δ − 1| <= y·(e^|Δ| − 1) < eps`.
pub fn log_tolerance(y: &Rational, eps: &Rational, limits: &Limits) -> Result<Rational> {
    let ratio = Rational::one() + eps / y;
    let spec = RealSpec::ln(ratio)?;
    decide(&spec, 32, limits.precision_budget_bits, "log tolerance", |i| {
        i.is_positive().then(|| i.lo().clone())
    })
}

fn pow_signed(base: &BigInt, e: &BigInt) -> Rational {
    let k = e.magnitude().to_u64().expect("exponent checked against the cap");
    let v = Rational::from_integer(num_traits::pow(base.clone(), k as usize));
    if e.is_negative() {
        v.recip()
    } else {
        v
    }
}

/// `p^m q^n` exactly; the caller has bounded the exponents.
pub fn exact_power(p: &BigInt, q: &BigInt, m: &BigInt, n: &BigInt) -> Rational {
    pow_signed(p, m) * pow_signed(q, n)
}

fn within_cap(m: &BigInt, n: &BigInt, cap: u64) -> bool {
    let cap = BigInt::from(cap);
    m.abs() <= cap && n.abs() <= cap
}

fn solution(prob: &MulProblem, m: BigInt, n: BigInt, route: Route) -> MulSolution {
    let value = exact_power(&prob.p, &prob.q, &m, &n);
    let err = (&value - &prob.y).abs();
    MulSolution {
        m,
        n,
        value,
        err,
        route,
    }
}

/// `k` with `x = base^k`, if any.
fn log_exact(x: &BigInt, base: &BigInt) -> Option<u64> {
    let mut x = x.clone();
    let mut k = 0;
    while x > BigInt::one() {
        if !(&x % base).is_zero() {
            return None;
        }
        x /= base;
        k += 1;
    }
    x.is_one().then_some(k)
}

fn exact_hit(prob: &MulProblem) -> Option<MulSolution> {
    const SPAN: i64 = 64;
    for step in 0..=2 * SPAN {
        // 0, 1, −1, 2, −2, …
        let a = if step % 2 == 1 { (step + 1) / 2 } else { -(step / 2) };
        let m = BigInt::from(a);
        let rest = &prob.y / pow_signed(&prob.p, &m);
        let n = if rest.denom().is_one() {
            log_exact(rest.numer(), &prob.q).map(BigInt::from)
        } else if rest.numer().is_one() {
            log_exact(rest.denom(), &prob.q).map(|k| -BigInt::from(k))
        } else {
            None
        };
        if let Some(n) = n {
            return Some(solution(prob, m, n, Route::ExactHit));
        }
    }
    None
}

fn witness_route(prob: &MulProblem, delta: &Rational, limits: &Limits) -> Result<Option<MulSolution>> {
    let p = prob.p.to_u64().ok_or_else(|| Error::invalid("p too large"))?;
    let q = prob.q.to_u64().ok_or_else(|| Error::invalid("q too large"))?;
    let theta = log_ratio_spec(p, q, limits)?;
    let ln_q = RealSpec::ln(Rational::from_integer(prob.q.clone()))?;
    let ln_y = RealSpec::ln(prob.y.clone())?;
    let target = RealSpec::quotient(ln_y, ln_q.clone(), limits.precision_budget_bits)?;
    // |n + m·θ − ln y/ln q| < δ/ln q  ⇒  |m·ln p + n·ln q − ln y| < δ
    let scaled = delta / approximate(&ln_q, 64).hi();
    let sol = approx_additive(&theta, &target, &scaled, limits)?;
    let (m, n) = (sol.n, sol.m);
    if !within_cap(&m, &n, limits.exponent_cap) {
        return Ok(None);
    }
    Ok(Some(solution(prob, m, n, Route::Witness)))
}

fn ln_f64(x: &Rational) -> f64 {
    if x.is_one() {
        return 0.0;
    }
    RealSpec::ln(x.clone()).map(|s| approximate(&s, 64).to_f64()).unwrap_or(f64::NAN)
}

/// Scans `n = 0, ±1, ±2, …` and rounds the matching `m`; floating point only
/// screens candidates, the exact evaluation decides.
fn scan_route(
    prob: &MulProblem,
    delta: &Rational,
    limits: &Limits,
) -> std::result::Result<MulSolution, Exhausted<MulSolution>> {
    let ln_p = ln_f64(&Rational::from_integer(prob.p.clone()));
    let ln_q = ln_f64(&Rational::from_integer(prob.q.clone()));
    let ln_y = ln_f64(&prob.y);
    let delta = delta.to_f64().unwrap_or(0.0);
    let cap = limits.exponent_cap as i64;
    let mut best: Option<(f64, i64, i64)> = None;
    for step in 0..=2 * cap {
        let n = if step % 2 == 1 { (step + 1) / 2 } else { -(step / 2) };
        let m = ((ln_y - n as f64 * ln_q) / ln_p).round();
        if !m.is_finite() || m.abs() > cap as f64 {
            continue;
        }
        let m = m as i64;
        let dev = (m as f64 * ln_p + n as f64 * ln_q - ln_y).abs();
        if best.is_none_or(|(d, ..)| dev < d) {
            best = Some((dev, m, n));
        }
        if dev < 1.5 * delta {
            let sol = solution(prob, m.into(), n.into(), Route::Scan);
            if sol.err < prob.eps {
                return Ok(sol);
            }
        }
    }
    let best = best.map(|(_, m, n)| solution(prob, m.into(), n.into(), Route::Scan));
    Err(Exhausted::new(
        best,
        Error::Budget(format!("no exponent pair within |m|, |n| <= {cap}")),
    ))
}

/// Exponents `(m, n)` with exact `|p^m q^n − y| < eps`.
///
/// Tries an exact representation first, then the density-witness route, and
/// falls back to a bounded exponent scan when the witness exponents exceed
/// `limits.exponent_cap`.
pub fn approx_multiplicative(
    prob: &MulProblem,
    limits: &Limits,
) -> std::result::Result<MulSolution, Exhausted<MulSolution>> {
    prob.validate()?;
    if let Some(hit) = exact_hit(prob) {
        return Ok(hit);
    }
    let delta = log_tolerance(&prob.y, &prob.eps, limits)?;
    match witness_route(prob, &delta, limits) {
        Ok(Some(sol)) if sol.err < prob.eps => return Ok(sol),
        Ok(_) => {}
        Err(e) if e.is_budget() => {}
        Err(e) => return Err(e.into()),
    }
    scan_route(prob, &delta, limits)
}

/// Moves a solution for `|y|` onto the negative axis when `negative` is set.
pub fn sign_extend(sol: &MulSolution, negative: bool) -> MulSolution {
    let mut out = sol.clone();
    if negative {
        out.value = -&sol.value;
    }
    out
}

impl MulSolution {
    pub fn summary(&self) -> String {
        format!(
            "m = {}, n = {}, value = {}, err = {}",
            self.m,
            self.n,
            format_rational(&self.value),
            format_rational(&self.err)
        )
    }
}
