use std::path::Path;

use properization::Distribution;
use serde::{Deserialize, Serialize};

/// One forecast and the value that was observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastCase {
    pub id: String,
    pub forecast: Distribution,
    #[serde(alias = "obs")]
    pub observation: f64,
}

/// A line that could not be turned into a case. Kept so the report can
/// account for it.
#[derive(Debug, Clone, PartialEq)]
pub struct BadLine {
    pub id: String,
    pub error: String,
}

pub type ParsedCase = Result<ForecastCase, BadLine>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// CSV for `.csv` files, JSON lines otherwise.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Self::Csv,
            _ => Self::Jsonl,
        }
    }
}

fn check(case: ForecastCase) -> ParsedCase {
    if !case.observation.is_finite() {
        return Err(BadLine {
            id: case.id,
            error: format!("observation must be finite, got {}", case.observation),
        });
    }
    Ok(case)
}

/// Blank lines are skipped; malformed lines become [`BadLine`]s named
/// after their line number.
pub fn parse_jsonl(text: &str) -> Vec<ParsedCase> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| match serde_json::from_str::<ForecastCase>(line) {
            Ok(case) => check(case),
            Err(e) => Err(BadLine {
                id: format!("line {}", i + 1),
                error: e.to_string(),
            }),
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct GaussianRow {
    id: String,
    mu: f64,
    sigma2: f64,
    obs: f64,
}

/// Flat Gaussian rows with header `id,mu,sigma2,obs`.
pub fn parse_csv(text: &str) -> Vec<ParsedCase> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    reader
        .deserialize::<GaussianRow>()
        .enumerate()
        .map(|(i, row)| {
            // Header is line 1.
            let line_id = format!("line {}", i + 2);
            let row = row.map_err(|e| BadLine {
                id: line_id.clone(),
                error: e.to_string(),
            })?;
            let forecast = Distribution::gaussian(row.mu, row.sigma2).map_err(|e| BadLine {
                id: row.id.clone(),
                error: e.to_string(),
            })?;
            check(ForecastCase {
                id: row.id,
                forecast,
                observation: row.obs,
            })
        })
        .collect()
}

pub fn parse(text: &str, format: InputFormat) -> Vec<ParsedCase> {
    match format {
        InputFormat::Jsonl => parse_jsonl(text),
        InputFormat::Csv => parse_csv(text),
    }
}
