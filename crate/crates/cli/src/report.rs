use properization::properize::properized_score;
use properization::{score, FamilyDescriptor, Score, ScoringRule};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::ParsedCase;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseScore {
    pub id: String,
    pub raw: Option<Score>,
    pub properized: Option<Score>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl CaseScore {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub rule: ScoringRule,
    pub family: FamilyDescriptor,
    pub per_case: Vec<CaseScore>,
    /// Means over cases where both scores were computed; `None` if there
    /// are no such cases.
    pub mean_raw: Option<f64>,
    pub mean_properized: Option<f64>,
    pub n_cases: usize,
    pub n_errors: usize,
}

fn score_case(rule: &ScoringRule, family: FamilyDescriptor, case: &ParsedCase) -> CaseScore {
    let case = match case {
        Ok(c) => c,
        Err(bad) => {
            return CaseScore {
                id: bad.id.clone(),
                raw: None,
                properized: None,
                error: Some(bad.error.clone()),
            }
        }
    };
    let raw = score(rule, &case.forecast, case.observation);
    let prop = properized_score(rule, &case.forecast, case.observation, family);
    let error = match (&raw, &prop) {
        (Err(e), _) => Some(format!("raw: {e}")),
        (_, Err(e)) => Some(format!("properized: {e}")),
        _ => None,
    };
    CaseScore {
        id: case.id.clone(),
        raw: raw.ok(),
        properized: prop.ok(),
        error,
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Scores every case in parallel; the output keeps input order.
pub fn score_cases(rule: &ScoringRule, family: FamilyDescriptor, cases: &[ParsedCase]) -> ScoreReport {
    let per_case: Vec<CaseScore> = cases.par_iter().map(|c| score_case(rule, family, c)).collect();
    let good = || per_case.iter().filter(|c| c.ok());
    ScoreReport {
        rule: rule.clone(),
        family,
        mean_raw: mean(good().map(|c| c.raw.as_ref().map_or(f64::NAN, |s| s.value))),
        mean_properized: mean(good().map(|c| c.properized.as_ref().map_or(f64::NAN, |s| s.value))),
        n_cases: per_case.len(),
        n_errors: per_case.iter().filter(|c| !c.ok()).count(),
        per_case,
    }
}

fn cell(s: &Option<Score>) -> String {
    s.as_ref().map_or_else(|| "-".into(), |s| s.value.to_string())
}

/// Aligned plain-text rendering of a report.
pub fn render_table(report: &ScoreReport) -> String {
    let rows: Vec<[String; 4]> = report
        .per_case
        .iter()
        .map(|c| [c.id.clone(), cell(&c.raw), cell(&c.properized), c.error.clone().unwrap_or_default()])
        .collect();
    let header = ["id", "raw", "properized", "error"].map(String::from);
    let mut widths = header.clone().map(|h| h.len());
    for r in &rows {
        for (w, v) in widths.iter_mut().zip(r) {
            *w = (*w).max(v.len());
        }
    }
    let line = |r: &[String; 4]| {
        format!(
            "{:<w0$}  {:>w1$}  {:>w2$}  {}",
            r[0],
            r[1],
            r[2],
            r[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        )
        .trim_end()
        .to_string()
    };
    let mut out = format!("rule: {}  family: {}\n", report.rule, report.family);
    out.push_str(&line(&header));
    out.push('\n');
    for r in &rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    let fmt = |m: Option<f64>| m.map_or_else(|| "-".into(), |v| v.to_string());
    out.push_str(&format!(
        "cases: {}  errors: {}  mean raw: {}  mean properized: {}\n",
        report.n_cases,
        report.n_errors,
        fmt(report.mean_raw),
        fmt(report.mean_properized)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::parse_jsonl;

    #[test]
    fn binary_means() {
        let text = [(0.7, 1), (0.2, 0), (0.4, 1)]
            .iter()
            .enumerate()
            .map(|(i, (p, y))| format!(r#"{{"id":"{i}","forecast":{{"type":"bernoulli","p":{p}}},"observation":{y}}}"#))
            .collect::<Vec<_>>()
            .join("\n");
        let r = score_cases(&ScoringRule::MaeBinary, FamilyDescriptor::Bernoulli, &parse_jsonl(&text));
        assert_eq!(r.n_errors, 0);
        assert!((r.mean_raw.unwrap() - 1.1 / 3.0).abs() < 1e-15);
        assert!((r.mean_properized.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(render_table(&r).contains("mean properized"));
    }

    #[test]
    fn degenerate_case_is_recorded() {
        let text = r#"{"id":"ok","forecast":{"type":"gaussian","mu":0,"sigma2":1},"observation":1}
{"id":"point","forecast":{"type":"dirac","x":0},"observation":1}"#;
        let rule = ScoringRule::NormalizedSquaredError;
        let r = score_cases(&rule, FamilyDescriptor::VarianceCapped { m: 2.0 }, &parse_jsonl(text));
        assert_eq!(r.n_errors, 1);
        assert!(r.per_case[1].error.as_ref().unwrap().contains("degenerate"));
        assert_eq!(r.mean_raw, Some(1.0));
        assert_eq!(r.mean_properized, Some(0.5));
    }

    #[test]
    fn empty_input() {
        let r = score_cases(&ScoringRule::Brier, FamilyDescriptor::Bernoulli, &[]);
        assert_eq!((r.n_cases, r.n_errors, r.mean_raw), (0, 0, None));
    }
}
