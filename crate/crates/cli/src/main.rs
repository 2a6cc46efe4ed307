//! `densecert` command-line front end.
//!
//! Every subcommand prints one JSON document on stdout. Exit codes: 0 on
//! success, 1 when a verifier rejects or a hypothesis fails, 2 when a budget
//! runs out, 64 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use densecert::certify::{self, Certificate};
use densecert::density::{approx_additive, folded_witness_below};
use densecert::engel::{engel_digits, partial_sum, rational_pattern_scan, truncation_bound, EngelExpansion};
use densecert::exactnum::serde_fmt::{format_rational, parse_rational, to_canonical_json};
use densecert::haarcheck::{
    invariance_check, parse_grid, two_dilation_audit, AuditVerdict, FunctionUnderTest, HaarSettings,
    InvarianceVerdict, SampleTable,
};
use densecert::muldensity::{approx_multiplicative, sign_extend, MulProblem};
use densecert::{Error, Limits, Rational, RealSpec};

const EXIT_REJECTED: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "densecert", version, about = "Exact density witnesses, approximation solvers and irrationality certificates")]
struct Cli {
    /// JSON file with any of precision_budget_bits, engel_depth_cap, exponent_cap, output.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    precision_bits: Option<u64>,
    #[arg(long, global = true)]
    depth_cap: Option<usize>,
    #[arg(long, global = true)]
    exponent_cap: Option<u64>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum Output {
    #[default]
    Json,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default)]
struct GlobalConfig {
    #[serde(flatten)]
    limits: Limits,
    output: Output,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Engel digits of a real in (0, 1).
    Engel {
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        count: usize,
    },
    /// Density witness m + n·q in (0, eps).
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        eps: String,
    },
    /// Integers m, n with |m + n·q − t| < eps.
    Approx {
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        eps: String,
    },
    /// Exponents m, n with |±p^m q^n − y| < eps.
    Mulapprox {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'q')]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        eps: String,
    },
    /// Certificate that q^(1/n) has no rational form with denominator <= B.
    CertifyRoot {
        #[arg(short = 'q')]
        q: u64,
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'B')]
        b: u64,
        #[command(flatten)]
        out: OutFile,
    },
    /// Certificate that e has no rational form with denominator <= B.
    CertifyE {
        #[arg(short = 'B')]
        b: u64,
        #[command(flatten)]
        out: OutFile,
    },
    /// Certificate from the Engel digits of a real in (0, 1).
    CertifyEngel {
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        #[arg(short = 'B')]
        b: u64,
        #[command(flatten)]
        out: OutFile,
    },
    /// Re-check a certificate file ("-" reads stdin).
    Verify { file: PathBuf },
    /// Dilation-invariance audit of a function on ℝ − {0}.
    HaarCheck {
        /// Function as JSON, a JSON file, or a two-column CSV file.
        #[arg(long = "f")]
        f: String,
        #[arg(short = 'p')]
        p: String,
        /// Second dilation; without it only the p-invariance report is produced.
        #[arg(short = 'q')]
        q: Option<String>,
        /// `geom:lo:hi:count` or a comma-separated list.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        tol: f64,
        /// Excluded neighborhood |t| < exclusion around 0.
        #[arg(long)]
        exclusion: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct OutFile {
    /// Also write the bare certificate to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A finished command: JSON payload and exit code.
struct Outcome {
    body: Map<String, Value>,
    code: u8,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome::with_code(body, 0)
    }

    fn with_code(body: Value, code: u8) -> Self {
        let body = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        Outcome { body, code }
    }
}

/// Failure before any mathematics ran.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn reason(e: &Error) -> &'static str {
    match e {
        Error::NeedsRefinement { .. } => "needs refinement",
        Error::DegenerateTermination { .. } => "degenerate termination",
        Error::Budget(_) => "budget",
        Error::DomainViolation(_) => "domain violation",
        Error::DependentDilations { .. } => "dependent dilations",
        Error::PrimalityFailure(_) => "not prime",
        Error::ExactRoot { .. } => "exact root",
        Error::PrefixTooShort { .. } => "prefix too short",
        Error::InvalidInput(_) => "invalid input",
    }
}

fn failure(e: &Error, partial: Option<Value>) -> std::result::Result<Outcome, Usage> {
    if matches!(e, Error::InvalidInput(_)) {
        return Err(Usage(e.to_string()));
    }
    let mut body = json!({
        "certified": false,
        "reason": reason(e),
        "message": e.to_string(),
    });
    if let Some(p) = partial {
        body["partial"] = p;
    }
    let code = if e.is_budget() { EXIT_BUDGET } else { EXIT_REJECTED };
    Ok(Outcome::with_code(body, code))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn rational_arg(name: &str, s: &str) -> std::result::Result<Rational, Usage> {
    parse_rational(s.trim()).map_err(|e| Usage(format!("--{name}: {e}")))
}

/// A real given as `a/b` or as a RealSpec JSON object.
fn real_arg(name: &str, s: &str) -> std::result::Result<RealSpec, Usage> {
    if let Ok(r) = parse_rational(s.trim()) {
        return Ok(RealSpec::rational(r));
    }
    serde_json::from_str(s).map_err(|e| Usage(format!("--{name}: {e}")))
}

fn load_config(cli: &Cli) -> std::result::Result<GlobalConfig, Usage> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("--config {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Usage(format!("--config {}: {e}", path.display())))?
        }
        None => GlobalConfig::default(),
    };
    if let Some(b) = cli.precision_bits {
        cfg.limits.precision_budget_bits = b;
    }
    if let Some(d) = cli.depth_cap {
        cfg.limits.engel_depth_cap = d;
    }
    if let Some(x) = cli.exponent_cap {
        cfg.limits.exponent_cap = x;
    }
    if let Some(o) = cli.output {
        cfg.output = o;
    }
    cfg.limits.validate()?;
    Ok(cfg)
}

fn engel_body(e: &EngelExpansion) -> Value {
    let n = e.digits.len();
    let sum = partial_sum(e, n).expect("prefix within digits");
    let bound = if e.terminated {
        Rational::from_integer(0.into())
    } else {
        truncation_bound(e, n).expect("prefix within digits")
    };
    json!({
        "digits": e.digits.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "terminated": e.terminated,
        "partial_sum": format_rational(&sum),
        "bound": format_rational(&bound),
        "pattern": to_value(&rational_pattern_scan(&e.digits)),
    })
}

fn emit_certificate(cert: Certificate, out: &OutFile) -> std::result::Result<Outcome, Usage> {
    if let Some(path) = &out.out {
        let text = to_canonical_json(&cert).expect("serializable");
        fs::write(path, text + "\n").map_err(|e| Usage(format!("--out {}: {e}", path.display())))?;
    }
    Ok(Outcome::ok(json!({ "certified": true, "certificate": to_value(&cert) })))
}

fn read_certificate(file: &Path) -> std::result::Result<std::result::Result<Certificate, String>, Usage> {
    let text = if file == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| Usage(e.to_string()))?;
        s
    } else {
        fs::read_to_string(file).map_err(|e| Usage(format!("{}: {e}", file.display())))?
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return Ok(Err(e.to_string())),
    };
    // Accept both a bare certificate and the envelope printed by certify-*.
    let value = match value.get("certificate") {
        Some(inner) if value.get("kind").is_none() => inner.clone(),
        _ => value,
    };
    Ok(serde_json::from_value(value).map_err(|e| e.to_string()))
}

fn load_function(arg: &str) -> std::result::Result<FunctionUnderTest, Usage> {
    let trimmed = arg.trim_start();
    let parsed = if trimmed.starts_with('{') {
        serde_json::from_str(arg).map_err(|e| e.to_string())
    } else {
        let path = Path::new(arg);
        let is_csv = path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv"));
        if is_csv {
            let file = fs::File::open(path).map_err(|e| Usage(format!("--f {arg}: {e}")))?;
            SampleTable::from_csv(file).map(FunctionUnderTest::Table).map_err(|e| e.to_string())
        } else {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("--f {arg}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| e.to_string())
        }
    };
    let f: FunctionUnderTest = parsed.map_err(|e| Usage(format!("--f: {e}")))?;
    f.validate()?;
    Ok(f)
}

fn run(command: &Command, limits: &Limits) -> std::result::Result<Outcome, Usage> {
    match command {
        Command::Engel { spec, count } => {
            let x = real_arg("spec", spec)?;
            match engel_digits(&x, *count, limits) {
                Ok(e) => {
                    let mut body = engel_body(&e);
                    body["certified"] = json!(true);
                    Ok(Outcome::ok(body))
                }
                Err(ex) => failure(&ex.cause, ex.best.as_ref().map(engel_body)),
            }
        }
        Command::Witness { spec, eps } => {
            let q = real_arg("spec", spec)?;
            let eps = rational_arg("eps", eps)?;
            match folded_witness_below(&q, &eps, limits) {
                Ok(w) => {
                    let mut body = to_value(&w);
                    body["certified"] = json!(true);
                    body["err"] = to_value(&w.witness.z_enclosure);
                    Ok(Outcome::ok(body))
                }
                Err(ex) => failure(&ex.cause, ex.best.as_ref().map(to_value)),
            }
        }
        Command::Approx { spec, target, eps } => {
            let q = real_arg("spec", spec)?;
            let t = real_arg("target", target)?;
            let eps = rational_arg("eps", eps)?;
            match approx_additive(&q, &t, &eps, limits) {
                Ok(sol) => {
                    let mut body = to_value(&sol);
                    body["certified"] = json!(true);
                    Ok(Outcome::ok(body))
                }
                Err(e) => failure(&e, None),
            }
        }
        Command::Mulapprox { p, q, target, eps } => {
            let y = rational_arg("target", target)?;
            let eps = rational_arg("eps", eps)?;
            if y == Rational::from_integer(0.into()) {
                return Err(Usage("--target must be nonzero".into()));
            }
            let negative = y < Rational::from_integer(0.into());
            let prob = match MulProblem::new(*p, *q, if negative { -y } else { y }, eps) {
                Ok(prob) => prob,
                Err(e) => return failure(&e, None),
            };
            match approx_multiplicative(&prob, limits) {
                Ok(sol) => {
                    let mut body = to_value(&sign_extend(&sol, negative));
                    body["certified"] = json!(true);
                    Ok(Outcome::ok(body))
                }
                Err(ex) => failure(
                    &ex.cause,
                    ex.best.as_ref().map(|s| to_value(&sign_extend(s, negative))),
                ),
            }
        }
        Command::CertifyRoot { q, n, b, out } => match certify::certify_nth_root(*q, *n, *b, limits) {
            Ok(c) => emit_certificate(Certificate::Root(c), out),
            Err(e) => failure(&e, None),
        },
        Command::CertifyE { b, out } => match certify::certify_e(*b) {
            Ok(c) => emit_certificate(Certificate::Euler(c), out),
            Err(e) => failure(&e, None),
        },
        Command::CertifyEngel { spec, b, out } => {
            let x = real_arg("spec", spec)?;
            match certify::certify_engel_source(&x, *b, limits) {
                Ok(c) => emit_certificate(Certificate::Engel(c), out),
                Err(e) => failure(&e, None),
            }
        }
        Command::Verify { file } => match read_certificate(file)? {
            Ok(cert) => match certify::verify(&cert, limits) {
                Ok(()) => Ok(Outcome::ok(json!({ "verified": true }))),
                Err(r) => Ok(Outcome::with_code(
                    json!({ "verified": false, "reason": r.to_string() }),
                    EXIT_REJECTED,
                )),
            },
            Err(msg) => Ok(Outcome::with_code(
                json!({ "verified": false, "reason": "malformed", "message": msg }),
                EXIT_REJECTED,
            )),
        },
        Command::HaarCheck {
            f,
            p,
            q,
            grid,
            tol,
            exclusion,
        } => {
            let f = load_function(f)?;
            let p = rational_arg("p", p)?;
            let grid = parse_grid(grid)?;
            if tol.is_nan() || *tol < 0.0 {
                return Err(Usage("--tol must be non-negative".into()));
            }
            let mut settings = HaarSettings::default();
            if let Some(x) = exclusion {
                settings.exclusion = *x;
            }
            match q {
                None => match invariance_check(&f, &p, &grid, *tol, &settings) {
                    Ok(r) => {
                        let code = match r.verdict {
                            InvarianceVerdict::Constant => 0,
                            InvarianceVerdict::NonConstant => EXIT_REJECTED,
                            InvarianceVerdict::Inconclusive => EXIT_BUDGET,
                        };
                        Ok(Outcome::with_code(to_value(&r), code))
                    }
                    Err(e) => failure(&e, None),
                },
                Some(q) => {
                    let q = rational_arg("q", q)?;
                    match two_dilation_audit(&f, &p, &q, &grid, *tol, &settings) {
                        Ok(r) => {
                            let code = match r.verdict {
                                AuditVerdict::ConsistentWithTheorem => 0,
                                AuditVerdict::ViolatesHypotheses => EXIT_REJECTED,
                                AuditVerdict::Inconclusive => EXIT_BUDGET,
                            };
                            Ok(Outcome::with_code(to_value(&r), code))
                        }
                        Err(e) => failure(&e, None),
                    }
                }
            }
        }
    }
}

fn plain(body: &Map<String, Value>) -> String {
    let mut out = String::new();
    for (k, v) in body {
        let v = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        out.push_str(&format!("{k}: {v}\n"));
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = load_config(&cli).and_then(|cfg| run(&cli.command, &cfg.limits).map(|o| (cfg, o)));
    match outcome {
        Ok((cfg, mut outcome)) => {
            outcome.body.insert("config".into(), to_value(&cfg));
            let text = match cfg.output {
                Output::Json => to_canonical_json(&outcome.body).expect("serializable") + "\n",
                Output::Plain => plain(&outcome.body),
            };
            print!("{text}");
            ExitCode::from(outcome.code)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
