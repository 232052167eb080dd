use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use cnrange::decompose::{decompose, nonnegativity_test, sos_certificate, verify_certificate, SosCertificate};
use cnrange::invariants::{run_suite, Suite, SuiteConfig};
use cnrange::io::{boundary_csv, boundary_svg, parse_matrix, to_json_string};
use cnrange::metrics::{c_seminorm, kappa_upper_search, KappaConfig, SeminormConfig};
use cnrange::range::{contains, range_boundary, wc_radius, RangeBoundary, SolverConfig, SupportResult};
use cnrange::ucrange::{compare_wc_wuc, CompareConfig, DEFAULT_K_LIST};
use cnrange::{Error, Matrix};

#[derive(Parser)]
#[command(name = "cnr", version, about = "Correlation numerical ranges with certified bounds")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of uniformly spaced directions.
    #[arg(long, global = true, default_value_t = 256)]
    directions: usize,
    /// Target primal-dual gap per direction.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Solver starts per direction.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    #[arg(long, global = true, env = "CNR_SEED", default_value_t = 0)]
    seed: u64,
    /// Exit with status 3 when any result is uncertified.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Args)]
struct Input {
    /// Matrix JSON file: {"n": .., "rows": [[{"re": .., "im": ..}, ..], ..]}.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary of W_c(A) as inner and outer polygons.
    Range {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Correlation numerical radius w_c(A).
    Radius {
        #[command(flatten)]
        input: Input,
    },
    /// Membership of a complex number in W_c(A).
    Contains {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        im: f64,
    },
    /// A = P + D with P ⪰ 0 and D a trace-zero diagonal, plus its SOS certificate.
    Decompose {
        #[command(flatten)]
        input: Input,
    },
    /// Whether W_c(A) ⊆ [0, ∞), with the dual diagonal certificate.
    Certify {
        #[command(flatten)]
        input: Input,
    },
    /// Checks an SOS certificate against A.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Sampled inner approximation of W_uc(A) compared with W_c(A).
    Wuc {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_K_LIST.to_vec())]
        k_list: Vec<usize>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Search for small w_c(T)/‖T‖_c.
    Kappa {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 60)]
        budget: usize,
    },
    /// Quotient seminorm ‖A‖_c modulo trace-zero diagonals.
    Cnorm {
        #[command(flatten)]
        input: Input,
    },
    /// Runs a randomized invariant suite.
    Check {
        #[arg(long, default_value = "basic")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Outcome {
    name: &'static str,
    result: Value,
    flags: Vec<String>,
    certified: bool,
    check_failed: bool,
}

impl Outcome {
    fn new(name: &'static str, result: Value) -> Self {
        Self { name, result, flags: Vec::new(), certified: true, check_failed: false }
    }
}

fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn sample_json(s: &SupportResult) -> Value {
    json!({
        "theta": s.theta,
        "support": s.value,
        "upper": s.upper_bound(),
        "gap": s.gap,
        "certified": s.certified,
        "witness": complex(s.witness_point),
        "dual_y": s.dual_y,
    })
}

fn boundary_json(b: &RangeBoundary) -> Value {
    let inner_excess = b.inner.excess_over(&b.outer);
    json!({
        "matrix_hash": b.matrix_hash,
        "radius": b.radius,
        "max_gap": b.max_gap(),
        "inner": b.inner.vertices.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "outer": b.outer.vertices.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "inner_within_outer": inner_excess <= 1e-9,
        "inner_excess": inner_excess,
        "samples": b.samples.iter().map(sample_json).collect::<Vec<_>>(),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> Result<Matrix, Failure> {
    Ok(parse_matrix(&input.input)?)
}

/// Accepts either a bare certificate or a `decompose` result file.
fn load_certificate(path: &Path) -> Result<SosCertificate, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    match value.pointer("/result/certificate") {
        Some(cert) => Ok(SosCertificate::from_json_str(&cert.to_string())?),
        None => Ok(SosCertificate::from_json_str(&text)?),
    }
}

fn run(command: Command, common: &Common, solver: &SolverConfig) -> Result<Outcome, Failure> {
    let m = common.directions;
    Ok(match command {
        Command::Range { input, svg, csv } => {
            let a = load(&input)?;
            let b = range_boundary(&a, m, solver)?;
            if let Some(path) = svg {
                write_file(&path, &boundary_svg(&b))?;
            }
            if let Some(path) = csv {
                write_file(&path, &boundary_csv(&b))?;
            }
            let mut out = Outcome::new("range", boundary_json(&b));
            out.certified = b.all_certified();
            if !out.certified {
                out.flags.push(format!("{} directions uncertified", b.uncertified.len()));
            }
            out
        }
        Command::Radius { input } => {
            let a = load(&input)?;
            let r = wc_radius(&a, m, solver)?;
            let mut out = Outcome::new(
                "radius",
                json!({"radius": r.radius, "upper": r.upper, "theta": r.theta, "witness": complex(r.support.witness_point)}),
            );
            out.certified = r.certified;
            out
        }
        Command::Contains { input, re, im } => {
            let a = load(&input)?;
            match contains(&a, Complex64::new(re, im), m, solver) {
                Ok(mem) => Outcome::new(
                    "contains",
                    json!({"inside": mem.inside, "margin": mem.margin, "theta": mem.theta, "slack": mem.slack}),
                ),
                Err(Error::Inconclusive { margin, slack }) => {
                    let mut out =
                        Outcome::new("contains", json!({"inside": Value::Null, "margin": margin, "slack": slack}));
                    out.certified = false;
                    out.flags.push("membership undecided within the certificate slack".into());
                    out
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Decompose { input } => {
            let a = load(&input)?;
            match decompose(&a, solver) {
                Ok(dec) => {
                    let cert = sos_certificate(&dec);
                    Outcome::new(
                        "decompose",
                        json!({
                            "decomposable": true,
                            "margin": dec.margin,
                            "d": dec.d.diagonal().into_iter().map(complex).collect::<Vec<_>>(),
                            "polynomial": cert.polynomial(),
                            "certificate": cert.to_json_value(),
                        }),
                    )
                }
                Err(Error::NotDecomposable { dual_value, primal_value }) => Outcome::new(
                    "decompose",
                    json!({"decomposable": false, "dual_value": dual_value, "primal_value": primal_value}),
                ),
                Err(Error::GapNotClosed { gap, .. }) => {
                    let mut out = Outcome::new("decompose", json!({"decomposable": Value::Null, "gap": gap}));
                    out.certified = false;
                    out.flags.push(format!("gap {gap:.3e} did not close"));
                    out
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Certify { input } => {
            let a = load(&input)?;
            let r = nonnegativity_test(&a, solver)?;
            let mut out = Outcome::new(
                "certify",
                json!({
                    "nonnegative": r.nonnegative,
                    "minimum": r.margin,
                    "lower_bound": r.lower_bound,
                    "dual_y": r.dual_y,
                }),
            );
            out.certified = r.certified;
            out
        }
        Command::Verify { input, cert } => {
            let a = load(&input)?;
            let cert = load_certificate(&cert)?;
            let check = verify_certificate(&a, &cert);
            let mut out = Outcome::new(
                "verify",
                json!({"valid": check.valid, "residual": check.residual, "trace_d": check.trace_d, "rank": check.rank}),
            );
            out.check_failed = !check.valid;
            out
        }
        Command::Wuc { input, samples, k_list, svg } => {
            let a = load(&input)?;
            let cfg = CompareConfig { directions: m, k_list, samples, solver: *solver };
            let cmp = compare_wc_wuc(&a, &cfg)?;
            if let Some(path) = svg {
                let b = range_boundary(&a, m, solver)?;
                write_file(&path, &boundary_svg(&b))?;
            }
            let mut out = Outcome::new(
                "wuc",
                json!({
                    "n": cmp.n,
                    "inclusion_margin": cmp.inclusion_margin,
                    "deficit_lower": cmp.deficit_lower,
                    "deficit_upper": cmp.deficit_upper,
                    "equality_known": cmp.equality_known,
                    "hull": cmp.approximation.hull.vertices.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
                    "sample_meta": serde_json::to_value(&cmp.approximation.sample_meta).expect("plain data"),
                }),
            );
            if cmp.inclusion_margin < -1e-8 {
                out.flags.push("a sampled point violates a certified half-plane".into());
                out.check_failed = true;
            }
            out
        }
        Command::Kappa { n, budget } => {
            let cfg = KappaConfig { directions: 64, solver: *solver, seminorm: SeminormConfig::default() };
            let est = kappa_upper_search(n, budget, common.seed, &cfg)?;
            let mut out = Outcome::new(
                "kappa",
                json!({
                    "n": est.n,
                    "best_ratio": est.best_ratio,
                    "lower_bound": est.lower_bound,
                    "claimed_upper": est.claimed_upper,
                    "witness_ratio": est.witness_ratio,
                    "evaluations": est.evaluations,
                    "witness": serde_json::from_str::<Value>(&cnrange::io::matrix_to_json(&est.witness)).expect("valid JSON"),
                }),
            );
            out.flags = est.flags;
            out
        }
        Command::Cnorm { input } => {
            let a = load(&input)?;
            let r = c_seminorm(&a, &SeminormConfig::default());
            let mut out = Outcome::new(
                "cnorm",
                json!({
                    "value": r.value,
                    "lower_bound": r.lower_bound,
                    "iterations": r.iterations,
                    "d": r.d.diagonal().into_iter().map(complex).collect::<Vec<_>>(),
                }),
            );
            out.certified = r.converged;
            out
        }
        Command::Check { suite, n, cases } => {
            let suite: Suite = suite.parse()?;
            let cfg = SuiteConfig { n, cases, directions: m.min(32), seed: common.seed, solver: *solver };
            let report = run_suite(suite, &cfg)?;
            for c in &report.checks {
                eprintln!(
                    "{} {:<40} worst {:.3e} (tol {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tolerance
                );
            }
            let mut out = Outcome::new("check", serde_json::to_value(&report).expect("plain data"));
            out.flags = report.flags.clone();
            out.check_failed = !report.passed;
            out
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common;
    if common.directions < 3 || common.tol.is_nan() || common.tol <= 0.0 || common.restarts == 0 {
        eprintln!("error: need --directions ≥ 3, --tol > 0 and --restarts ≥ 1");
        return ExitCode::from(2);
    }
    let solver =
        SolverConfig { tol: common.tol, restarts: common.restarts, seed: common.seed, ..SolverConfig::default() };
    let outcome = match run(cli.command, &common, &solver) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut flags = outcome.flags.clone();
    if !outcome.certified {
        flags.push("uncertified".into());
    }
    let doc = json!({
        "command": outcome.name,
        "config": {
            "directions": common.directions,
            "tol": common.tol,
            "restarts": common.restarts,
            "seed": common.seed,
            "strict": common.strict,
        },
        "result": outcome.result,
        "flags": flags,
    });
    let text = to_json_string(&doc);
    match &common.out {
        Some(path) => {
            if let Err(Failure::Usage(msg)) = write_file(path, &text) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.check_failed {
        ExitCode::from(1)
    } else if common.strict && !outcome.certified {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
