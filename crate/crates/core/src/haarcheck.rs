//! Numerical audit of dilation invariance on `ℝ − {0}`.
//!
//! For a dilation `p > 1` the integral `I_p(x) = ∫_x^{px} f(t) dt` is
//! evaluated over a grid of base points. If it is constant in `x` for two
//! multiplicatively independent dilations, `f` must be `c/t` almost
//! everywhere on each half-axis, with the constants of opposite sign
//! under the reflection `t ↦ −t`. The audit samples instances of that
//! statement. It proves nothing about the measure-theoretic conclusion.

use std::io::Read;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exactnum::serde_fmt;
use crate::exactnum::Rational;
use crate::muldensity::rational_independence;
use crate::{Error, Result};

/// Bounded function `g` of `ln|t|`, entering `f` as `g(ln|t|)/t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Perturbation {
    /// `a·sin(ω·u)`
    LogSin { amplitude: f64, omega: f64 },
    /// `a·cos(ω·u)`
    LogCos { amplitude: f64, omega: f64 },
    /// `a·exp(−((u − center)/width)²)`
    Bump { amplitude: f64, center: f64, width: f64 },
}

impl Perturbation {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Perturbation::LogSin { amplitude, omega } => amplitude * (omega * u).sin(),
            Perturbation::LogCos { amplitude, omega } => amplitude * (omega * u).cos(),
            Perturbation::Bump { amplitude, center, width } => {
                let z = (u - center) / width;
                amplitude * (-z * z).exp()
            }
        }
    }

    fn negated(&self) -> Perturbation {
        match *self {
            Perturbation::LogSin { amplitude, omega } => Perturbation::LogSin {
                amplitude: -amplitude,
                omega,
            },
            Perturbation::LogCos { amplitude, omega } => Perturbation::LogCos {
                amplitude: -amplitude,
                omega,
            },
            Perturbation::Bump { amplitude, center, width } => Perturbation::Bump {
                amplitude: -amplitude,
                center,
                width,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Perturbation::LogSin { amplitude, omega } | Perturbation::LogCos { amplitude, omega } => {
                amplitude.is_finite() && omega.is_finite()
            }
            Perturbation::Bump { amplitude, center, width } => {
                amplitude.is_finite() && center.is_finite() && width.is_finite() && width > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("perturbation parameters must be finite with width > 0"))
        }
    }
}

/// Piecewise-linear interpolant through strictly increasing abscissae of a
/// single sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct SampleTable {
    points: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawTable {
    points: Vec<(f64, f64)>,
}

impl TryFrom<RawTable> for SampleTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        SampleTable::new(raw.points)
    }
}

impl SampleTable {
    /// Accepts abscissae in either monotone order.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a sample table needs at least two rows"));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid("sample table entries must be finite"));
        }
        if points[0].0 > points[1].0 {
            points.reverse();
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid("sample abscissae must be strictly monotone"));
        }
        let (lo, hi) = (points[0].0, points[points.len() - 1].0);
        if lo <= 0.0 && hi >= 0.0 {
            return Err(Error::invalid("sample abscissae must not reach or cross zero"));
        }
        Ok(SampleTable { points })
    }

    /// Two numeric columns; a non-numeric first row is taken as a header.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::invalid(format!("csv: {e}")))?;
            if rec.len() != 2 {
                return Err(Error::invalid(format!("csv row {} has {} columns, expected 2", i + 1, rec.len())));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(y)) => points.push((x, y)),
                _ if i == 0 => continue,
                _ => return Err(Error::invalid(format!("csv row {} is not numeric", i + 1))),
            }
        }
        SampleTable::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn range(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    fn covers(&self, a: f64, b: f64) -> bool {
        let (lo, hi) = self.range();
        lo <= a.min(b) && a.max(b) <= hi
    }

    fn segment(&self, t: f64) -> usize {
        let i = self.points.partition_point(|&(x, _)| x <= t);
        i.clamp(1, self.points.len() - 1) - 1
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let ((x0, y0), (x1, y1)) = (self.points[i], self.points[i + 1]);
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    /// Exact integral of the interpolant over `[a, b]` with `a <= b`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let mut left = a;
        let mut i = self.segment(a);
        while left < b {
            let right = self.points[i + 1].0.min(b);
            if right > left {
                total += 0.5 * (self.eval_on(i, left) + self.eval_on(i, right)) * (right - left);
            }
            left = right;
            i += 1;
            if i + 1 >= self.points.len() {
                break;
            }
        }
        total
    }

    fn eval_on(&self, i: usize, t: f64) -> f64 {
        let ((x0, y0), (x1, y1)) = (self.points[i], self.points[i + 1]);
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    fn reflected(&self) -> SampleTable {
        let points = self.points.iter().rev().map(|&(x, y)| (-x, y)).collect();
        SampleTable { points }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionUnderTest {
    /// `c/t`
    Hyperbola {
        #[serde(with = "serde_fmt::rational")]
        c: Rational,
    },
    /// `(c + g(ln|t|))/t`
    HyperbolaPlus {
        #[serde(with = "serde_fmt::rational")]
        c: Rational,
        perturbation: Perturbation,
    },
    Table(SampleTable),
}

impl FunctionUnderTest {
    pub fn hyperbola(c: Rational) -> Self {
        FunctionUnderTest::Hyperbola { c }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionUnderTest::HyperbolaPlus { perturbation, .. } => perturbation.validate(),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionUnderTest::Hyperbola { c } => to_f64(c) / t,
            FunctionUnderTest::HyperbolaPlus { c, perturbation } => {
                (to_f64(c) + perturbation.eval(t.abs().ln())) / t
            }
            FunctionUnderTest::Table(table) => table.eval(t),
        }
    }

    /// `t ↦ f(−t)`
    pub fn reflect(&self) -> FunctionUnderTest {
        match self {
            FunctionUnderTest::Hyperbola { c } => FunctionUnderTest::Hyperbola { c: -c },
            FunctionUnderTest::HyperbolaPlus { c, perturbation } => FunctionUnderTest::HyperbolaPlus {
                c: -c,
                perturbation: perturbation.negated(),
            },
            FunctionUnderTest::Table(table) => FunctionUnderTest::Table(table.reflected()),
        }
    }

    /// Whether `f` is available on the positive half-axis.
    fn has_positive_axis(&self) -> bool {
        match self {
            FunctionUnderTest::Table(t) => t.range().1 > 0.0,
            _ => true,
        }
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HaarSettings {
    /// Integration must stay in `|t| >= exclusion`.
    pub exclusion: f64,
    /// Absolute error requested from adaptive quadrature.
    pub quad_tol: f64,
    /// Maximum bisection depth of a quadrature panel.
    pub max_depth: u32,
    /// Largest `|f(t) − c/t|` accepted on the check grid.
    pub residual_tol: f64,
}

impl Default for HaarSettings {
    fn default() -> Self {
        HaarSettings {
            exclusion: 1e-6,
            quad_tol: 1e-13,
            max_depth: 40,
            residual_tol: 1e-6,
        }
    }
}

/// Value with an error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel: (Kronrod value, |K − G|, Σ|w·f|).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = (WGK[7] * fc).abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), abs * half.abs())
}

/// Adaptive Gauss–Kronrod quadrature over `[a, b]`.
///
/// The bound sums `|K15 − G7|` over accepted panels plus a rounding term.
/// Panels that still miss their share of `tol` at `max_depth` are accepted
/// with their full estimate, so the bound stays honest when the integrand
/// is rough.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    let len = (b - a).abs();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut abs_sum = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (k, e, s) = gk15(&f, lo, hi);
        let share = tol * (hi - lo).abs() / len;
        if e <= share || depth >= max_depth {
            value += k;
            error += e;
            abs_sum += s;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    error += 50.0 * f64::EPSILON * abs_sum;
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Quadrature { value, error }
}

fn check_dilation(p: &Rational) -> Result<f64> {
    if p <= &Rational::from_integer(1.into()) {
        return Err(Error::invalid("dilation factor must exceed 1"));
    }
    Ok(to_f64(p))
}

/// `I_p(x) = ∫_x^{px} f(t) dt` with an error bound.
pub fn dilation_integral(f: &FunctionUnderTest, x: f64, p: &Rational, settings: &HaarSettings) -> Result<Quadrature> {
    let pf = check_dilation(p)?;
    let px = pf * x;
    if !x.is_finite() || x.abs() < settings.exclusion || px.abs() < settings.exclusion {
        return Err(Error::DomainViolation(format!(
            "[{x}, {px}] enters the excluded neighborhood |t| < {}",
            settings.exclusion
        )));
    }
    let rounding = |v: f64| 8.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE);
    match f {
        FunctionUnderTest::Hyperbola { c } => {
            let v = to_f64(c) * pf.ln();
            Ok(Quadrature { value: v, error: rounding(v) })
        }
        FunctionUnderTest::HyperbolaPlus { c, perturbation } => {
            // ∫ g(ln|t|)/t dt = ∫ g(u) du over [ln|x|, ln|x| + ln p], for either sign of x
            let base = to_f64(c) * pf.ln();
            let u0 = x.abs().ln();
            let q = integrate(|u| perturbation.eval(u), u0, u0 + pf.ln(), settings.quad_tol, settings.max_depth);
            let v = base + q.value;
            Ok(Quadrature {
                value: v,
                error: q.error + rounding(base) + rounding(v),
            })
        }
        FunctionUnderTest::Table(table) => {
            if !table.covers(x, px) {
                let (lo, hi) = table.range();
                return Err(Error::DomainViolation(format!(
                    "[{x}, {px}] leaves the sampled range [{lo}, {hi}]"
                )));
            }
            let v = if x < px {
                table.integral(x, px)
            } else {
                -table.integral(px, x)
            };
            let scale: f64 = table.points.iter().map(|&(_, y)| y.abs()).fold(0.0, f64::max);
            let err = 8.0 * f64::EPSILON * scale * (px - x).abs() * table.points.len() as f64;
            Ok(Quadrature { value: v, error: err.max(rounding(v)) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvarianceVerdict {
    Constant,
    NonConstant,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    #[serde(with = "serde_fmt::rational")]
    pub p: Rational,
    pub grid: Vec<f64>,
    pub integrals: Vec<f64>,
    pub integral_errors: Vec<f64>,
    /// `max − min` of `integrals`.
    pub spread: f64,
    /// Bound on the error of `spread`: twice the largest per-point error.
    pub quad_error_bound: f64,
    pub recovered_c: f64,
    pub c_half_width: f64,
    /// `max |f(t) − recovered_c/t|` over the check grid.
    pub residual_max: f64,
    pub tol: f64,
    pub verdict: InvarianceVerdict,
}

/// `c = I_p(x₀)/ln p`, with `x₀ = 1` when `f` is available there.
pub fn recover_c(f: &FunctionUnderTest, p: &Rational, settings: &HaarSettings) -> Result<Quadrature> {
    let pf = check_dilation(p)?;
    let x0 = match f {
        FunctionUnderTest::Table(t) if !t.covers(1.0, pf) => t.range().0,
        _ => 1.0,
    };
    let i = dilation_integral(f, x0, p, settings)?;
    let lp = pf.ln();
    Ok(Quadrature {
        value: i.value / lp,
        error: i.error / lp + 4.0 * f64::EPSILON * (i.value / lp).abs(),
    })
}

/// Geometric grid `x_j = lo·g^j` with `count` points ending at `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || count == 0 {
        return Err(Error::invalid("geometric grid needs 0 < lo <= hi and count >= 1"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|j| lo * (ratio * j as f64).exp()).collect();
    grid[count - 1] = hi;
    Ok(grid)
}

/// Denser geometric grid over the same span, for residuals.
fn check_grid(grid: &[f64]) -> Vec<f64> {
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(0.0, f64::max);
    geometric_grid(lo, hi, 4 * grid.len().max(2) + 1).unwrap_or_else(|_| grid.to_vec())
}

fn residual_max(f: &FunctionUnderTest, c: f64, grid: &[f64]) -> f64 {
    check_grid(grid)
        .into_iter()
        .map(|t| (f.eval(t) - c / t).abs())
        .fold(0.0, f64::max)
}

pub fn invariance_check(
    f: &FunctionUnderTest,
    p: &Rational,
    grid: &[f64],
    tol: f64,
    settings: &HaarSettings,
) -> Result<InvarianceReport> {
    if grid.is_empty() {
        return Err(Error::invalid("grid must not be empty"));
    }
    if grid.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::invalid("grid points must be positive"));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid("tolerance must be non-negative"));
    }
    f.validate()?;
    let quads = grid
        .iter()
        .map(|&x| dilation_integral(f, x, p, settings))
        .collect::<Result<Vec<_>>>()?;
    let integrals: Vec<f64> = quads.iter().map(|q| q.value).collect();
    let integral_errors: Vec<f64> = quads.iter().map(|q| q.error).collect();
    let max = integrals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = integrals.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let quad_error_bound = 2.0 * integral_errors.iter().cloned().fold(0.0, f64::max);
    let verdict = if spread > tol + quad_error_bound {
        InvarianceVerdict::NonConstant
    } else if quad_error_bound > tol {
        InvarianceVerdict::Inconclusive
    } else {
        InvarianceVerdict::Constant
    };
    let c = recover_c(f, p, settings)?;
    Ok(InvarianceReport {
        p: p.clone(),
        grid: grid.to_vec(),
        integrals,
        integral_errors,
        spread,
        quad_error_bound,
        recovered_c: c.value,
        c_half_width: c.error,
        residual_max: residual_max(f, c.value, grid),
        tol,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisReport {
    pub p_report: InvarianceReport,
    pub q_report: InvarianceReport,
    /// `c` from the p-dilation, cross-checked against the q-dilation.
    pub c: f64,
    pub c_half_width: f64,
    pub c_agreement: bool,
    pub residual_max: f64,
}

/// `c_1 + c_2 = 0` between `f(t) = c_1/t` for `t > 0` and `f(−t) = c_2/t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignLinkage {
    pub c1: f64,
    pub c2: f64,
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditVerdict {
    ConsistentWithTheorem,
    ViolatesHypotheses,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(with = "serde_fmt::rational")]
    pub p: Rational,
    #[serde(with = "serde_fmt::rational")]
    pub q: Rational,
    /// Audit of `f` on `t > 0`.
    pub positive: Option<AxisReport>,
    /// Audit of `t ↦ f(−t)` on `t > 0`.
    pub negative: Option<AxisReport>,
    pub sign_linkage: Option<SignLinkage>,
    pub verdict: AuditVerdict,
}

fn audit_axis(
    f: &FunctionUnderTest,
    p: &Rational,
    q: &Rational,
    grid: &[f64],
    tol: f64,
    settings: &HaarSettings,
) -> Result<AxisReport> {
    let p_report = invariance_check(f, p, grid, tol, settings)?;
    let q_report = invariance_check(f, q, grid, tol, settings)?;
    let gap = (p_report.recovered_c - q_report.recovered_c).abs();
    let c_agreement = gap <= p_report.c_half_width + q_report.c_half_width + tol;
    Ok(AxisReport {
        c: p_report.recovered_c,
        c_half_width: p_report.c_half_width,
        residual_max: p_report.residual_max,
        c_agreement,
        p_report,
        q_report,
    })
}

/// Invariance under `p` and `q` on every available half-axis, agreement of
/// the recovered constants, residuals against `c/t`, and `c_1 = −c_2`.
pub fn two_dilation_audit(
    f: &FunctionUnderTest,
    p: &Rational,
    q: &Rational,
    grid: &[f64],
    tol: f64,
    settings: &HaarSettings,
) -> Result<AuditReport> {
    check_dilation(p)?;
    check_dilation(q)?;
    if !rational_independence(p, q)? {
        let show = |r: &Rational| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                serde_fmt::format_rational(r)
            }
        };
        return Err(Error::DependentDilations { p: show(p), q: show(q) });
    }
    let reflected = f.reflect();
    let positive = if f.has_positive_axis() {
        Some(audit_axis(f, p, q, grid, tol, settings)?)
    } else {
        None
    };
    let negative = if reflected.has_positive_axis() {
        Some(audit_axis(&reflected, p, q, grid, tol, settings)?)
    } else {
        None
    };
    let sign_linkage = match (&positive, &negative) {
        (Some(pos), Some(neg)) => {
            let gap = (pos.c + neg.c).abs();
            let bound = pos.c_half_width + neg.c_half_width + tol;
            Some(SignLinkage {
                c1: pos.c,
                c2: neg.c,
                gap,
                bound,
                holds: gap <= bound,
            })
        }
        _ => None,
    };

    let axes: Vec<&AxisReport> = positive.iter().chain(negative.iter()).collect();
    let verdicts = axes.iter().flat_map(|a| [a.p_report.verdict, a.q_report.verdict]);
    let mut any_nonconstant = false;
    let mut any_inconclusive = false;
    for v in verdicts {
        any_nonconstant |= v == InvarianceVerdict::NonConstant;
        any_inconclusive |= v == InvarianceVerdict::Inconclusive;
    }
    let broken_link = sign_linkage.as_ref().is_some_and(|s| !s.holds);
    let disagree = axes.iter().any(|a| !a.c_agreement);
    let residual_high = axes.iter().any(|a| a.residual_max.is_nan() || a.residual_max > settings.residual_tol);
    let verdict = if any_nonconstant || disagree || broken_link {
        AuditVerdict::ViolatesHypotheses
    } else if any_inconclusive || residual_high {
        AuditVerdict::Inconclusive
    } else {
        AuditVerdict::ConsistentWithTheorem
    };
    Ok(AuditReport {
        p: p.clone(),
        q: q.clone(),
        positive,
        negative,
        sign_linkage,
        verdict,
    })
}

/// Parses `geom:lo:hi:count` or a comma-separated list; numbers may be
/// decimals or `a/b`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        let s = s.trim();
        s.parse::<f64>()
            .ok()
            .or_else(|| serde_fmt::parse_rational(s).ok().and_then(|r| r.to_f64()))
            .ok_or_else(|| Error::invalid(format!("bad grid number {s:?}")))
    };
    if let Some(rest) = spec.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid("geometric grid syntax is geom:lo:hi:count"));
        }
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid("grid count must be a positive integer"))?;
        return geometric_grid(num(parts[0])?, num(parts[1])?, count);
    }
    let grid = spec.split(',').map(num).collect::<Result<Vec<_>>>()?;
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::invalid("grid points must be positive"));
    }
    Ok(grid)
}
