//! Command-line front end. JSON goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 when every check passes, 1 on a mathematical failure,
//! 2 on usage or budget errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use dworklab::arith::{gamma_p, GammaArg, PadicModulus, PadicScalar, Rational};
use dworklab::cartier::{cartier_via_formula, Form};
use dworklab::cy::{
    canonical_coordinate, excellent_lift_check, frobenius_lambda0, preset_family, preset_operator,
    rational_string, standard_solutions, yukawa_and_instantons, QSeries,
};
use dworklab::harness::{run_suite, JobSpec, PolySource, Suite};
use dworklab::hasse_witt::{
    higher_hw_condition, hw_det_valuation, hw_matrix, lambda_unit_root, newton_polytope, Precision,
};
use dworklab::laurent::json::poly_to_json;
use dworklab::laurent::{ExponentVector, FrobeniusLift, LaurentPoly};
use dworklab::par::Execution;
use dworklab::polytope::OpenSubset;
use dworklab::zeta::{
    count_elliptic_points, count_torus_points, eigenvalue_crosscheck, frobenius_trace_elliptic,
};
use dworklab::Error;
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "dworklab",
    version,
    about = "p-adic Frobenius data for toric hypersurfaces"
)]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Include wall-clock timing in suite reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Args, Clone)]
struct PolyArgs {
    /// Polynomial JSON, inline or as a file path.
    #[arg(long, conflicts_with = "preset")]
    poly: Option<String>,
    /// Family preset 1 − t·g (simplicial, hyperoctahedral, hypercubic, a_n).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

impl PolyArgs {
    fn source(&self) -> Result<PolySource, Error> {
        match (&self.poly, &self.preset) {
            (Some(text), _) => poly_source(text),
            (None, Some(name)) => Ok(PolySource::Preset {
                name: name.clone(),
                n: self.dim,
            }),
            (None, None) => Err(Error::InvalidInput("give --poly or --preset".into())),
        }
    }

    fn load(&self) -> Result<LaurentPoly<BigInt>, Error> {
        self.source()?.load()
    }
}

fn poly_source(text: &str) -> Result<PolySource, Error> {
    if text.trim_start().starts_with('{') {
        Ok(PolySource::Inline {
            poly: serde_json::from_str(text)?,
        })
    } else {
        Ok(PolySource::File {
            path: PathBuf::from(text),
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mu {
    Interior,
    Full,
}

fn open_subset(f: &LaurentPoly<BigInt>, mu: Mu) -> Result<OpenSubset, Error> {
    let poly = newton_polytope(f)?;
    Ok(match mu {
        Mu::Interior => OpenSubset::interior(&poly),
        Mu::Full => OpenSubset::full(&poly),
    })
}

#[derive(Subcommand)]
enum Command {
    /// Hasse–Witt matrix β_p(μ) and its condition.
    Hw {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "interior")]
        mu: Mu,
        #[arg(long, default_value_t = 1)]
        precision: u32,
        /// t-truncation for families (default p).
        #[arg(long)]
        t_order: Option<usize>,
    },
    /// Unit-root matrix Λ(μ) mod p^s.
    Lambda {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "interior")]
        mu: Mu,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long, default_value_t = 8)]
        t_order: usize,
    },
    /// Higher Hasse–Witt conditions up to a level.
    HigherHw {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "full")]
        mu: Mu,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Cartier image of h/f^m by the explicit formula.
    Cartier {
        #[command(flatten)]
        poly: PolyArgs,
        /// Numerator h (defaults to 1).
        #[arg(long)]
        numerator: Option<String>,
        #[arg(long, default_value_t = 1)]
        pole: u32,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        precision: u32,
    },
    /// Brute-force point counts on the torus, or on an elliptic curve.
    ZetaCount {
        #[command(flatten)]
        poly: PolyArgs,
        /// Elliptic curve y² = x³ + Ax + B given as A,B.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        curve: Option<Vec<i64>>,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        degree: u32,
    },
    /// Tr(Λ^s) against point counts.
    Crosscheck {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 2)]
        steps: u32,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Calabi–Yau pipeline.
    Cy {
        #[command(subcommand)]
        command: CyCommand,
    },
    /// Morita's Γ_p at a rational argument.
    GammaP {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        precision: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    /// JobSpec JSON file; flags below override its fields.
    #[arg(long)]
    job: Option<PathBuf>,
    /// Polynomial JSON (inline or file); repeatable.
    #[arg(long)]
    poly: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    #[arg(long)]
    bound: Option<i64>,
    #[arg(long)]
    steps: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum CyCommand {
    /// Yukawa coupling and instanton numbers.
    Instanton {
        #[arg(long, default_value = "quintic")]
        family: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Normalization κ for the reported κ·N_d (5 for the quintic, else 1).
        #[arg(long)]
        kappa: Option<i64>,
    },
    /// Λ_0 and the α_j of the Frobenius structure.
    Frobenius {
        #[arg(long, default_value = "simplicial")]
        family: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long, default_value_t = 10)]
        t_order: usize,
    },
    /// The excellent lift and the level-2 eigenvector property.
    Excellent {
        #[arg(long, default_value = "simplicial")]
        family: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long, default_value_t = 8)]
        t_order: usize,
    },
    /// Canonical coordinate q(t) and the mirror map t(q).
    Mirror {
        #[arg(long, default_value = "quintic")]
        family: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        t_order: usize,
    },
}

/// Output plus whether every check in it passed.
struct Outcome {
    value: Value,
    pass: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, pass: true }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::HasseWitt { .. } | Error::Residual(_) | Error::ResidualLog(_) | Error::NotMum => 1,
        _ => 2,
    }
}

fn series_json(s: &QSeries) -> Value {
    json!(s.coeffs().iter().map(rational_string).collect::<Vec<_>>())
}

fn lift_for(
    f: &LaurentPoly<BigInt>,
    md: PadicModulus,
    p: u64,
    t: usize,
) -> FrobeniusLift<PadicScalar> {
    if f.params() == 0 {
        FrobeniusLift::Identity
    } else {
        FrobeniusLift::t_power(&md.one(), p, t)
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match &cli.command {
        Command::Hw {
            poly,
            prime,
            mu,
            precision,
            t_order,
        } => {
            let f = poly.load()?;
            let set = open_subset(&f, *mu)?;
            let prec = Precision::new(*prime, *precision)
                .with_t_order(t_order.unwrap_or(*prime as usize))
                .with_exec(exec);
            let hw = hw_matrix(&f, &set, prec)?;
            let unit = hw_det_valuation(&hw)? == 0;
            Ok(Outcome {
                value: json!({"hw": hw.to_json(), "hw_condition": unit}),
                pass: unit,
            })
        }
        Command::Lambda {
            poly,
            prime,
            mu,
            steps,
            t_order,
        } => {
            let f = poly.load()?;
            let set = open_subset(&f, *mu)?;
            let prec = Precision::new(*prime, *steps)
                .with_t_order(*t_order)
                .with_exec(exec);
            let sigma = lift_for(&f, prec.modulus()?, *prime, *t_order);
            let lam = lambda_unit_root(&f, &set, *prime, &sigma, *steps, prec)?;
            Ok(Outcome::ok(json!({"lambda": lam.to_json()})))
        }
        Command::HigherHw {
            poly,
            prime,
            mu,
            level,
        } => {
            let f = poly.load()?;
            let set = open_subset(&f, *mu)?;
            let report = higher_hw_condition(&f, &set, *level, *prime, exec)?;
            Ok(Outcome {
                value: report.to_json(),
                pass: report.holds(),
            })
        }
        Command::Cartier {
            poly,
            numerator,
            pole,
            prime,
            precision,
        } => {
            let f = poly.load()?;
            let h = match numerator {
                Some(text) => poly_source(text)?.load()?,
                None => {
                    LaurentPoly::monomial(f.n(), 0, ExponentVector::zeros(f.n()), BigInt::from(1))
                }
            };
            let form: Form =
                cartier_via_formula(&h, &f, *pole, *prime, &FrobeniusLift::Identity, *precision)?;
            let terms: Vec<Value> = form
                .terms
                .iter()
                .map(|(h, m)| json!({"numerator": poly_to_json(h), "pole": m}))
                .collect();
            Ok(Outcome::ok(
                json!({"p": prime, "precision": precision, "terms": terms}),
            ))
        }
        Command::ZetaCount {
            poly,
            curve,
            prime,
            degree,
        } => match curve {
            Some(ab) => {
                let &[a, b] = ab.as_slice() else {
                    return Err(Error::InvalidInput("--curve takes A,B".into()));
                };
                let data = frobenius_trace_elliptic(a, b, *prime)?;
                let count = count_elliptic_points(a, b, *prime, *degree)?;
                Ok(Outcome::ok(
                    json!({"A": a, "B": b, "p": prime, "s": degree, "a_p": data.trace, "points": count}),
                ))
            }
            None => {
                let f = poly.load()?;
                let count = count_torus_points(&f, *prime, *degree, exec)?;
                Ok(Outcome::ok(
                    json!({"p": prime, "s": degree, "torus_points": count}),
                ))
            }
        },
        Command::Crosscheck { poly, prime, steps } => {
            let f = poly.load()?;
            let report = eigenvalue_crosscheck(&f, *prime, *steps, exec)?;
            Ok(Outcome {
                value: report.to_json(),
                pass: report.holds(),
            })
        }
        Command::Verify(args) => {
            let suite = Suite::from_str(&args.suite)?;
            let mut job = match &args.job {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                    // Fields the file leaves out keep the suite's reference grid.
                    let mut base = serde_json::to_value(JobSpec::for_suite(suite))?;
                    let Value::Object(fields) = serde_json::from_str::<Value>(&text)? else {
                        return Err(Error::InvalidInput("job file must be a JSON object".into()));
                    };
                    for (k, v) in fields {
                        base[k] = v;
                    }
                    serde_json::from_value::<JobSpec>(base)?
                }
                None => JobSpec::for_suite(suite),
            };
            if !args.poly.is_empty() {
                job.polys = args
                    .poly
                    .iter()
                    .map(|p| poly_source(p))
                    .collect::<Result<_, _>>()?;
            }
            if let Some(p) = &args.primes {
                job.primes = p.clone();
            }
            if let Some(b) = args.bound {
                job.bound = b;
            }
            if let Some(s) = args.steps {
                job.max_steps = s;
            }
            if let Some(s) = args.seed {
                job.seed = s;
            }
            if let Some(n) = args.samples {
                job.samples = n;
            }
            let report = run_suite(suite, &job, exec)?;
            eprintln!("{}", report.summary());
            Ok(Outcome {
                value: report.to_json(cli.timing),
                pass: report.passed(),
            })
        }
        Command::Cy { command } => run_cy(command, exec),
        Command::GammaP {
            x,
            prime,
            precision,
        } => {
            let q = Rational::from_str(x)
                .map_err(|_| Error::InvalidInput(format!("bad rational {x:?}")))?;
            let v = gamma_p(GammaArg::Rational(&q), *prime, *precision)?;
            Ok(Outcome::ok(
                json!({"x": x, "p": prime, "precision": precision, "value": v.value().to_string()}),
            ))
        }
    }
}

fn run_cy(command: &CyCommand, exec: Execution) -> Result<Outcome, Error> {
    match command {
        CyCommand::Instanton {
            family,
            dim,
            degree,
            kappa,
        } => {
            let op = preset_operator(family, *dim)?;
            let t = degree + 2;
            let sols = standard_solutions(&op, t)?;
            let mirror = canonical_coordinate(&sols, t)?;
            let inst = yukawa_and_instantons(&sols, &mirror, *degree)?;
            let kappa = kappa.unwrap_or(if family == "quintic" { 5 } else { 1 });
            let mut value = inst.to_json();
            for (row, n) in value["instantons"]
                .as_array_mut()
                .expect("table")
                .iter_mut()
                .zip(&inst.numbers)
            {
                row["kappa_Nd"] =
                    json!(rational_string(&(n * Rational::from_integer(kappa.into()))));
            }
            value["kappa"] = json!(kappa);
            Ok(Outcome::ok(value))
        }
        CyCommand::Frobenius {
            family,
            dim,
            prime,
            steps,
            t_order,
        } => {
            let preset = preset_family(family, *dim)?;
            let op = preset_operator(family, *dim)?;
            let report = frobenius_lambda0(&preset, &op, *prime, *steps, *t_order, exec)?;
            Ok(Outcome {
                value: report.to_json(),
                pass: report.holds(),
            })
        }
        CyCommand::Excellent {
            family,
            dim,
            prime,
            steps,
            t_order,
        } => {
            let preset = preset_family(family, *dim)?;
            let op = preset_operator(family, *dim)?;
            let report = excellent_lift_check(&preset, &op, *prime, *t_order, *steps, exec)?;
            Ok(Outcome {
                value: report.to_json(),
                pass: report.holds(),
            })
        }
        CyCommand::Mirror {
            family,
            dim,
            t_order,
        } => {
            let op = preset_operator(family, *dim)?;
            let sols = standard_solutions(&op, *t_order)?;
            let mirror = canonical_coordinate(&sols, *t_order)?;
            Ok(Outcome::ok(
                json!({"q": series_json(&mirror.q), "t_of_q": series_json(&mirror.t_of_q)}),
            ))
        }
    }
}

fn apply_budget() -> Result<(), Error> {
    if let Ok(v) = std::env::var("DWORKLAB_BUDGET_MB") {
        let mb: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("DWORKLAB_BUDGET_MB={v:?}")))?;
        dworklab::laurent::dense::set_budget_mb(mb);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = apply_budget().and_then(|_| run(&cli));
    match result {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string(&out.value),
                Format::Pretty => serde_json::to_string_pretty(&out.value),
            }
            .expect("values serialize");
            // A closed pipe downstream is not our failure.
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("dworklab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
