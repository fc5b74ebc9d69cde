//! Command-line front end for `framekz`.
//!
//! Every subcommand produces a [`RunReport`](report::RunReport) that is printed
//! as text or, with `--json`, as a JSON document. Exit codes: 0 ok, 1 warning,
//! 2 usage or parse error, 3 mathematical validation failure.
//!
//! Tolerances come from flags, then the `FRAMEKZ_EPS_RANK` / `FRAMEKZ_EPS_ID`
//! environment variables, then the library defaults.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use framekz::hilbert::{HVector, ToleranceConfig};
use framekz::synthesis::SynthesisMethod;
use thiserror::Error;

pub mod commands;
pub mod io;
pub mod report;

use commands::AnalyzeKind;
use report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARNING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Math(#[from] framekz::Error),
    #[error("{}", .0.join("; "))]
    Validation(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Math(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Math(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn messages(&self) -> Vec<String> {
        match self {
            CliError::Validation(v) => v.clone(),
            other => vec![other.to_string()],
        }
    }

    /// Prefixes validation messages with the file they came from.
    pub fn context(self, label: &str) -> Self {
        match self {
            CliError::Validation(v) => CliError::Validation(v.into_iter().map(|m| format!("{label}: {m}")).collect()),
            other => other,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "framekz", version, about = "Kaczmarz auxiliary sequences, Bessel synthesis and semidefinite Cholesky")]
pub struct Cli {
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// Slack on unit norms.
    #[arg(long, global = true, value_name = "EPS")]
    pub eps_unit: Option<f64>,
    /// Slack on Hermitian symmetry.
    #[arg(long, global = true, value_name = "EPS")]
    pub eps_herm: Option<f64>,
    /// Relative threshold for rank decisions and pivots.
    #[arg(long, global = true, value_name = "EPS", env = "FRAMEKZ_EPS_RANK")]
    pub eps_rank: Option<f64>,
    /// Slack on eigenvalue bounds.
    #[arg(long, global = true, value_name = "EPS")]
    pub eps_eig: Option<f64>,
    /// Slack on matrix and vector identities.
    #[arg(long, global = true, value_name = "EPS", env = "FRAMEKZ_EPS_ID")]
    pub eps_id: Option<f64>,
}

impl ToleranceArgs {
    pub fn resolve(&self) -> ToleranceConfig {
        let d = ToleranceConfig::default();
        ToleranceConfig {
            eps_unit: self.eps_unit.unwrap_or(d.eps_unit),
            eps_herm: self.eps_herm.unwrap_or(d.eps_herm),
            eps_rank: self.eps_rank.unwrap_or(d.eps_rank),
            eps_eig: self.eps_eig.unwrap_or(d.eps_eig),
            eps_id: self.eps_id.unwrap_or(d.eps_id),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Triangular,
    Admissible,
}

impl From<Method> for SynthesisMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Triangular => SynthesisMethod::Triangular,
            Method::Admissible => SynthesisMethod::Admissible,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Auxiliary sequence g of a unit-vector sequence e.
    Forward {
        input: PathBuf,
        /// Where to write g.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the Gram matrix of g.
        #[arg(long)]
        gram_out: Option<PathBuf>,
    },
    /// Unit vectors whose auxiliary sequence is a given normalized Bessel sequence.
    Synthesize {
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gram spectrum, frame verdicts, stability and overlaps.
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: AnalyzeKind,
    },
    /// Runs the iteration against a target x.
    Kaczmarz {
        input: PathBuf,
        /// Target as "a,b,..." (real) or a JSON array of numbers or [re, im] pairs.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "x_file", conflicts_with = "x_file")]
        x: Option<String>,
        /// File holding the target in the same syntax as --x.
        #[arg(long)]
        x_file: Option<PathBuf>,
        /// CSV trace: n,residual,coef_abs,energy_residual.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Semidefinite Cholesky factorization B = VV*.
    Chol {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether two unit-vector sequences have unitarily equivalent auxiliary sequences.
    Equiv { a: PathBuf, b: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Forward { .. } => "forward",
            Command::Synthesize { .. } => "synthesize",
            Command::Analyze { .. } => "analyze",
            Command::Kaczmarz { .. } => "kaczmarz",
            Command::Chol { .. } => "chol",
            Command::Equiv { .. } => "equiv",
        }
    }
}

fn target(x: &Option<String>, x_file: &Option<PathBuf>) -> Result<HVector, CliError> {
    match (x, x_file) {
        (Some(text), _) => io::parse_vector(text).map_err(|m| CliError::Usage(format!("--x: {m}"))),
        (None, Some(path)) => Ok(io::read_vector(path)?),
        (None, None) => Err(CliError::Usage("one of --x or --x-file is required".into())),
    }
}

fn dispatch(cli: &Cli, report: &mut RunReport, tol: &ToleranceConfig) -> Result<(), CliError> {
    tol.validate()?;
    match &cli.command {
        Command::Forward { input, out, gram_out } => commands::forward(report, input, out.as_ref(), gram_out.as_ref(), tol),
        Command::Synthesize { input, method, out } => commands::synthesize(report, input, (*method).into(), out.as_ref(), tol),
        Command::Analyze { input, kind } => commands::analyze(report, input, *kind, tol),
        Command::Kaczmarz { input, x, x_file, trace_out } => {
            let x = target(x, x_file)?;
            commands::kaczmarz(report, input, &x, trace_out.as_ref(), tol)
        }
        Command::Chol { input, out } => commands::chol(report, input, out.as_ref(), tol),
        Command::Equiv { a, b } => commands::equiv(report, a, b, tol),
    }
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> RunReport {
    let tol = cli.tolerances.resolve();
    let mut report = RunReport::new(cli.command.name());
    report.input("tolerances", tolerance_map(&tol));
    if let Err(e) = dispatch(cli, &mut report, &tol) {
        report.fail(e.exit_code(), e.messages());
    }
    report
}

fn tolerance_map(tol: &ToleranceConfig) -> std::collections::BTreeMap<&'static str, f64> {
    [
        ("eps_unit", tol.eps_unit),
        ("eps_herm", tol.eps_herm),
        ("eps_rank", tol.eps_rank),
        ("eps_eig", tol.eps_eig),
        ("eps_id", tol.eps_id),
    ]
    .into_iter()
    .collect()
}

/// Parses `args` (including the program name), runs the command, prints the
/// report and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let report = execute(&cli);
    let text = if cli.json { report.to_json() + "\n" } else { report.to_text() };
    let _ = stdout.write_all(text.as_bytes());
    if report.exit_code >= EXIT_USAGE && !cli.json {
        for m in &report.messages {
            let _ = writeln!(stderr, "error: {m}");
        }
    }
    report.exit_code
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
