mod commands;
mod text;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kwall_core::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "kwall", version, about = "Exact wall-crossing computations for Fermat polynomials")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model utilities.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Hypergeometric part of the I-function in a chamber.
    Ifun {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "inf")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        dmax: u32,
    },
    /// Explicit data of J at infinity, with correlator placeholders.
    Jinf {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        dmax: u32,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Contribution of one unstable locus and its Čech counts.
    Unstable {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        eps: String,
        /// Marking state `r`.
        #[arg(long)]
        r: usize,
        /// Light-point states, comma separated.
        #[arg(long, value_delimiter = ',')]
        l0: Vec<usize>,
    },
    /// Split a loop-space element into its plus and minus parts.
    Decompose {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Symplectic form of two loop-space elements.
    Omega {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Check the roots-of-unity identities for 1 <= d <= max-d.
    CheckIdentity {
        #[arg(long, default_value_t = 24)]
        max_d: u32,
    },
    /// Solve for the tail of a cone point.
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "inf")]
        eps: String,
        #[arg(long, default_value_t = 2)]
        dmax: u32,
        /// Highest pole order index; defaults to dmax + 2.
        #[arg(long)]
        jmax: Option<u32>,
        /// Dictionary bound; defaults to KWALL_NMAX or 2d.
        #[arg(long)]
        nmax: Option<u32>,
        #[command(flatten)]
        window: WindowArg,
        /// `F(t, 0, q)` beyond the explicit part, as series terms.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// `f(u, q)`, as series terms.
        #[arg(long)]
        f: Option<PathBuf>,
        /// Where to write the tail; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the assembled series.
        #[arg(long)]
        series_out: Option<PathBuf>,
    },
    /// Check that a series is a point of the cone within the truncation.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Dictionary bound; defaults to KWALL_NMAX or 2d.
        #[arg(long)]
        nmax: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum ModelAction {
    /// Charges, narrow sector and dual table.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Args, Debug)]
struct WindowArg {
    /// Descendant window `lo,hi` for the `t` variables.
    #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
    window: String,
}

impl WindowArg {
    fn parse(&self) -> Result<(i32, i32), CliError> {
        let bad = || CliError::Usage(format!("window must be lo,hi with lo <= 0 <= hi, got {:?}", self.window));
        let (lo, hi) = self.window.split_once(',').ok_or_else(bad)?;
        let lo: i32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > 0 || hi < 0 {
            return Err(bad());
        }
        Ok((lo, hi))
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: PathBuf, message: String },
    Usage(String),
    /// A check ran and failed; the report has already been printed.
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Insolvable { .. }) => 3,
            CliError::Core(Error::TruncationOverflow { .. } | Error::DictionaryOverflow { .. }) => 4,
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Core(e) => {
                let mut v = json!({ "error": core_kind(e), "message": e.to_string() });
                match e {
                    Error::Insolvable { monomial, reason } => {
                        v["monomial"] = json!(monomial);
                        v["reason"] = json!(reason);
                    }
                    Error::TruncationOverflow { monomial, block, order } => {
                        v["monomial"] = json!(monomial);
                        v["block"] = json!(block);
                        v["order"] = json!(order);
                    }
                    _ => {}
                }
                v
            }
            CliError::Io { path, message } => {
                json!({ "error": "io", "path": path.display().to_string(), "message": message })
            }
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Failed(m) => json!({ "error": "check_failed", "message": m }),
        }
    }
}

fn core_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZero => "division_by_zero",
        Error::InvalidModel(_) => "invalid_model",
        Error::NotFermat { .. } => "not_fermat",
        Error::NotNarrow { .. } => "not_narrow",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::InvalidChamber(_) => "invalid_chamber",
        Error::ExponentNotInLattice(_) => "exponent_not_in_lattice",
        Error::IncompatibleSeries => "incompatible_series",
        Error::NonDictionaryFactor(_) => "non_dictionary_factor",
        Error::DictionaryOverflow { .. } => "dictionary_overflow",
        Error::UnstableLocusAbsent(_) => "unstable_locus_absent",
        Error::Hypothesis(_) => "hypothesis",
        Error::Insolvable { .. } => "insolvable",
        Error::TruncationOverflow { .. } => "truncation_overflow",
        Error::Parse(_) => "parse",
    }
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let raw = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&raw).map_err(|e| CliError::Core(Error::Parse(format!("{}: {e}", path.display()))))
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    std::fs::write(path, render_json(v)).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `--nmax`, then `KWALL_NMAX`, then `2d`.
pub fn resolve_nmax(flag: Option<u32>, d: u32) -> Result<u32, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("KWALL_NMAX") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("KWALL_NMAX must be a positive integer, got {v:?}"))),
        Err(_) => Ok(2 * d),
    }
}

/// What a command produced: a JSON value, its text rendering, and whether a
/// check it ran failed.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub failure: Option<String>,
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Model { action: ModelAction::Validate { model } } => commands::model_validate(&model),
        Command::Ifun { model, eps, dmax } => commands::ifun(&model, &eps, dmax),
        Command::Jinf { model, dmax, window } => commands::jinf(&model, dmax, window.parse()?),
        Command::Unstable { model, eps, r, l0 } => commands::unstable(&model, &eps, r, &l0),
        Command::Decompose { model, input } => commands::decompose(&model, &input),
        Command::Omega { model, f, g } => commands::omega(&model, &f, &g),
        Command::CheckIdentity { max_d } => commands::check_identity(max_d),
        Command::Solve {
            model,
            eps,
            dmax,
            jmax,
            nmax,
            window,
            baseline,
            f,
            out,
            series_out,
        } => commands::solve(commands::SolveArgs {
            model,
            eps,
            dmax,
            jmax,
            nmax,
            window: window.parse()?,
            baseline,
            f,
            out,
            series_out,
        }),
        Command::Verify { model, input, nmax } => commands::verify(&model, &input, nmax),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Json => print!("{}", render_json(&out.json)),
                Format::Text => print!("{}", out.text),
            }
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(why) => {
                    let e = CliError::Failed(why);
                    eprintln!("{}", serde_json::to_string(&e.to_json()).unwrap());
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).unwrap());
            ExitCode::from(e.exit_code())
        }
    }
}
