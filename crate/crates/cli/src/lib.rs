//! Command-line front end for `kronsum`: reads matrices from JSON files,
//! runs one library operation and writes a single JSON report to stdout.
//! A one-line summary goes to stderr.
//!
//! Exit codes: 0 when the computation ran (the verdict is in the report),
//! 2 for usage errors including unreadable or malformed files, 3 when a
//! numerical procedure failed.

mod commands;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kronsum::matfunc::ScalarFunction;
use kronsum::{Complex, Tolerance};
use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kronsum", version, about = "Commutants and Kronecker-sum analysis of square matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative rank tolerance (e.g. 1e-10).
    #[arg(long, global = true, value_name = "REL")]
    pub tol: Option<f64>,

    /// Include basis matrices in the report.
    #[arg(long, global = true)]
    pub emit_basis: bool,

    /// Operator form used by `basis` and `operator`.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Transpose)]
    pub mode: Mode,

    /// Seed for the random kernel component added to a witness.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Transpose,
    Adjoint,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Transpose => "transpose",
            Mode::Adjoint => "adjoint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Known {
    Re,
    Im,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Commutant basis of A.
    Basis { a: PathBuf },
    /// Whether B commutes with A.
    Check { a: PathBuf, b: PathBuf },
    /// Pairwise commutation and rank chain of a set.
    SetCheck {
        #[arg(required = true)]
        set: Vec<PathBuf>,
    },
    /// Mutual commutant of a set.
    Mutual {
        #[arg(required = true)]
        set: Vec<PathBuf>,
    },
    /// Solve [A, X] = M.
    Witness { a: PathBuf, m: PathBuf },
    /// Whether A commutes with f(B), and optionally f(A) with g(B).
    Funccheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "f", value_parser = parse_function)]
        f: FunctionChoice,
        #[arg(long = "g", value_parser = parse_function)]
        g: Option<FunctionChoice>,
    },
    /// Jordan data of A and the spectrum of its commutator operator.
    Spectrum { a: PathBuf },
    /// Real split system of a matrix or a set.
    Split {
        #[arg(required = true)]
        set: Vec<PathBuf>,
    },
    /// The commutator operator of A, its rank and block partition.
    Operator { a: PathBuf },
    /// A ⊕ B and its spectrum against pairwise eigenvalue sums.
    KronSum { a: PathBuf, b: PathBuf },
    /// f(A) by Hermite interpolation and the kernel inclusion for f.
    Func {
        a: PathBuf,
        #[arg(long = "f", value_parser = parse_function)]
        f: FunctionChoice,
    },
    /// Complete B from its real or imaginary part so that [A, B] = 0.
    Complete {
        a: PathBuf,
        part: PathBuf,
        #[arg(long, value_enum)]
        known: Known,
    },
    /// T⁻¹[A, B]T against the commutator of the transformed pair.
    Similarity { a: PathBuf, b: PathBuf, t: PathBuf },
    /// Mutual commutant of Jordan-structure files, through the Jordan forms.
    JordanRoute {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
    },
}

/// Scalar functions accepted by `--f` and `--g`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionChoice {
    Exp,
    Identity,
    Power(u32),
    /// `λ ↦ 1/(λ − c)`.
    ShiftedInverse(Complex),
}

impl FunctionChoice {
    pub fn to_scalar(&self) -> ScalarFunction {
        match *self {
            FunctionChoice::Exp => ScalarFunction::exp(),
            FunctionChoice::Identity => ScalarFunction::identity(),
            FunctionChoice::Power(k) => ScalarFunction::power(k),
            FunctionChoice::ShiftedInverse(c) => ScalarFunction::shifted_inverse(c),
        }
    }
}

impl fmt::Display for FunctionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionChoice::Exp => write!(f, "exp"),
            FunctionChoice::Identity => write!(f, "id"),
            FunctionChoice::Power(k) => write!(f, "pow:{k}"),
            FunctionChoice::ShiftedInverse(c) => write!(f, "inv:{},{}", c.re, c.im),
        }
    }
}

/// `exp`, `id`, `square`, `cube`, `pow:K`, `inv:RE` or `inv:RE,IM`.
pub fn parse_function(s: &str) -> Result<FunctionChoice, String> {
    match s {
        "exp" => return Ok(FunctionChoice::Exp),
        "id" => return Ok(FunctionChoice::Identity),
        "square" => return Ok(FunctionChoice::Power(2)),
        "cube" => return Ok(FunctionChoice::Power(3)),
        _ => {}
    }
    if let Some(k) = s.strip_prefix("pow:") {
        return k.parse().map(FunctionChoice::Power).map_err(|_| format!("bad exponent in `{s}`"));
    }
    if let Some(c) = s.strip_prefix("inv:") {
        let parts: Vec<&str> = c.split(',').collect();
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad shift in `{s}`"));
        return match parts.as_slice() {
            [re] => Ok(FunctionChoice::ShiftedInverse(Complex::new(parse(re)?, 0.0))),
            [re, im] => Ok(FunctionChoice::ShiftedInverse(Complex::new(parse(re)?, parse(im)?))),
            _ => Err(format!("bad shift in `{s}`")),
        };
    }
    Err(format!("unknown function `{s}` (expected exp, id, square, cube, pow:K or inv:RE[,IM])"))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<kronsum::Error> for CliError {
    fn from(e: kronsum::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Everything one invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Execution { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok((result, summary)) => {
            let mut doc = Map::new();
            doc.insert("schema".into(), SCHEMA.into());
            doc.insert("command".into(), echo(&cli));
            doc.insert("tolerance".into(), tolerance_json(&tolerance(&cli).expect("validated in execute")));
            doc.insert("result".into(), result);
            let mut stdout = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
            stdout.push('\n');
            Execution { code: EXIT_OK, stdout, stderr: format!("{summary}\n") }
        }
        Err(CliError::Usage(msg)) => {
            Execution { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
        Err(CliError::Numerical(msg)) => {
            Execution { code: EXIT_NUMERICAL, stdout: String::new(), stderr: format!("numerical failure: {msg}\n") }
        }
    }
}

fn tolerance(cli: &Cli) -> Result<Tolerance, CliError> {
    match cli.tol {
        None => Ok(Tolerance::default()),
        Some(rel) => Tolerance::with_rel(rel).map_err(|e| CliError::Usage(format!("--tol: {e}"))),
    }
}

fn tolerance_json(tol: &Tolerance) -> Value {
    json!({ "rel": report::num(tol.rel), "abs": report::num(tol.abs), "residual": report::num(tol.residual) })
}

fn execute(cli: &Cli) -> Result<(Value, String), CliError> {
    let tol = tolerance(cli)?;
    commands::dispatch(cli, &tol)
}

fn echo(cli: &Cli) -> Value {
    let (name, inputs, extra) = commands::describe(&cli.command);
    let mut flags = Map::new();
    flags.insert("tol".into(), report::opt_num(cli.tol));
    flags.insert("emit_basis".into(), cli.emit_basis.into());
    flags.insert("mode".into(), cli.mode.as_str().into());
    flags.insert("seed".into(), cli.seed.map_or(Value::Null, Value::from));
    for (k, v) in extra {
        flags.insert(k.into(), v);
    }
    let inputs: Vec<Value> = inputs.iter().map(|p| Value::from(p.display().to_string())).collect();
    json!({ "name": name, "inputs": inputs, "flags": flags })
}
