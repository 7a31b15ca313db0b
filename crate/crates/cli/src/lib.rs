//! Command-line front end: `score`, `bayes-act` and `verify`.

pub mod cases;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use properization::verify::{resolve_suite, run_suite, suite_names, SuiteReport, VerdictStatus};
use properization::{bayes_act, BayesActResult, Distribution, FamilyDescriptor, ScoringRule};

pub use cases::{ForecastCase, InputFormat};
pub use report::{score_cases, ScoreReport};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const CASE_ERROR: i32 = 2;
    pub const NO_BAYES_ACT: i32 = 3;
    pub const UNEXPECTED_VERDICT: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "properize", version, about = "Score forecasts with raw and properized scoring rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a dataset of forecast cases.
    Score {
        /// Rule as JSON or a bare name such as `crps_alpha:1.5`.
        #[arg(long)]
        rule: String,
        /// Family for the Bayes acts; defaults to `bernoulli` for binary
        /// rules and `p2` otherwise.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Overrides detection by file extension.
        #[arg(long, value_enum)]
        input_format: Option<InputFormat>,
    },
    /// Print the Bayes act of a forecast.
    BayesAct {
        #[arg(long)]
        rule: String,
        /// Distribution literal as JSON.
        #[arg(long)]
        forecast: String,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Run a propriety suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pairs per entry; each entry has its own default.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: exit::USAGE,
        message: message.into(),
    }
}

fn parse_rule(s: &str) -> Result<ScoringRule, Failure> {
    ScoringRule::parse(s).map_err(|e| usage(format!("bad --rule: {e}")))
}

fn parse_family(s: Option<&str>, rule: &ScoringRule) -> Result<FamilyDescriptor, Failure> {
    match s {
        Some(s) => s.parse().map_err(|e| usage(format!("bad --family: {e}"))),
        None if rule.is_binary() => Ok(FamilyDescriptor::Bernoulli),
        None => Ok(FamilyDescriptor::P2),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(text: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| usage(format!("cannot write output: {e}"))),
    }
}

fn cmd_score(
    rule: &str,
    family: Option<&str>,
    input: &PathBuf,
    output: Option<&PathBuf>,
    format: OutputFormat,
    input_format: Option<InputFormat>,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let rule = parse_rule(rule)?;
    let family = parse_family(family, &rule)?;
    let text = std::fs::read_to_string(input).map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
    let parsed = cases::parse(&text, input_format.unwrap_or_else(|| InputFormat::detect(input)));
    let report = score_cases(&rule, family, &parsed);
    let body = match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Table => report::render_table(&report),
    };
    emit(&body, output, stdout)?;
    Ok(if report.n_errors > 0 { exit::CASE_ERROR } else { exit::OK })
}

fn cmd_bayes_act(
    rule: &str,
    forecast: &str,
    family: Option<&str>,
    format: OutputFormat,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let rule = parse_rule(rule)?;
    let family = parse_family(family, &rule)?;
    let forecast: Distribution =
        serde_json::from_str(forecast).map_err(|e| usage(format!("bad --forecast: {e}")))?;
    let result = bayes_act(&rule, &forecast, family).map_err(|e| Failure {
        code: exit::CASE_ERROR,
        message: e.to_string(),
    })?;
    match result {
        BayesActResult::Act(a) => {
            for w in &a.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            if !a.unique {
                let _ = writeln!(stderr, "note: the Bayes act is not unique");
            }
            let body = match format {
                OutputFormat::Json => to_json(&a.act),
                OutputFormat::Table => format!("{}\n", a.act),
            };
            emit(&body, None, stdout)?;
            Ok(exit::OK)
        }
        BayesActResult::NoBayesAct(cert) => {
            let body = match format {
                OutputFormat::Json => to_json(&BayesActResult::NoBayesAct(cert)),
                OutputFormat::Table => {
                    let mut s = format!("no Bayes act: {}\n", cert.direction);
                    for (f, v) in cert.forecasts.iter().zip(&cert.scores) {
                        s.push_str(&format!("{v:>24}  {f}\n"));
                    }
                    s
                }
            };
            emit(&body, None, stdout)?;
            Ok(exit::NO_BAYES_ACT)
        }
    }
}

fn verify_table(report: &SuiteReport) -> String {
    let mut s = format!("suite: {}  seed: {}\n", report.suite, report.seed);
    for o in &report.outcomes {
        let v = &o.verdict;
        let status = match &v.status {
            VerdictStatus::Pass { note } => format!("pass ({note})"),
            VerdictStatus::Violated { gap, index, .. } => format!("violated at pair {index}, gap {gap:e}"),
            VerdictStatus::Inconclusive { reason } => format!("inconclusive: {reason}"),
        };
        let mark = if o.as_expected { "ok" } else { "UNEXPECTED" };
        s.push_str(&format!("{mark:<10} {:<60} {status}  [{} pairs]\n", v.rule, v.pairs_tested));
    }
    s
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    pairs: Option<usize>,
    tol: Option<f64>,
    output: Option<&PathBuf>,
    format: OutputFormat,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    if resolve_suite(suite).is_none() {
        return Err(usage(format!("unknown suite {suite:?}; available: {}", suite_names().join(", "))));
    }
    let report = run_suite(suite, seed, pairs, tol).map_err(|e| usage(e.to_string()))?;
    let body = match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Table => verify_table(&report),
    };
    emit(&body, output, stdout)?;
    Ok(if report.all_as_expected { exit::OK } else { exit::UNEXPECTED_VERDICT })
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                exit::USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                exit::OK
            };
        }
    };
    let outcome = match &cli.command {
        Command::Score {
            rule,
            family,
            input,
            output,
            format,
            input_format,
        } => cmd_score(rule, family.as_deref(), input, output.as_ref(), *format, *input_format, stdout),
        Command::BayesAct {
            rule,
            forecast,
            family,
            format,
        } => cmd_bayes_act(rule, forecast, family.as_deref(), *format, stdout, stderr),
        Command::Verify {
            suite,
            seed,
            pairs,
            tol,
            output,
            format,
        } => cmd_verify(suite, *seed, *pairs, *tol, output.as_ref(), *format, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
