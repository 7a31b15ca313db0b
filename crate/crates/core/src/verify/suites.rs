use serde::{Deserialize, Serialize};

use super::{propriety_test, ProprietyVerdict, TestedRule};
use crate::distributions::{Distribution, FamilyDescriptor};
use crate::error::{Error, Result};
use crate::scores::{ScoringRule, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Pass,
    Violation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub tested: TestedRule,
    pub family: FamilyDescriptor,
    pub expect: Expectation,
    /// Default number of pairs; expensive rules get fewer.
    pub pairs: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub verdict: ProprietyVerdict,
    pub expected: Expectation,
    pub as_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub outcomes: Vec<SuiteOutcome>,
    pub all_as_expected: bool,
}

const SUITES: [(&str, &str); 4] = [
    ("properized", "properized"),
    ("improper", "improper"),
    ("paper-proper", "properized"),
    ("paper-improper", "improper"),
];

/// Accepted suite names, canonical names first.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Canonical suite name for `name`, if known.
pub fn resolve_suite(name: &str) -> Option<&'static str> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

fn noise() -> Distribution {
    Distribution::gaussian(0.0, 0.25).expect("valid noise")
}

fn weighted_log() -> ScoringRule {
    ScoringRule::Weighted {
        base: Box::new(ScoringRule::LogScore),
        weight: WeightSpec::IndicatorAbove { r: 0.0 },
    }
}

fn entry(tested: TestedRule, family: FamilyDescriptor, expect: Expectation, pairs: usize, tol: f64) -> SuiteEntry {
    SuiteEntry {
        tested,
        family,
        expect,
        pairs,
        tol,
    }
}

fn properized_entries() -> Vec<SuiteEntry> {
    use FamilyDescriptor as F;
    use ScoringRule as R;
    let grid = F::LebesgueGrid {
        lo: -5.0,
        hi: 5.0,
        cells: 20,
    };
    let prop = |rule: ScoringRule, family: F, pairs: usize, tol: f64| {
        entry(TestedRule::properized(rule, family), family, Expectation::Pass, pairs, tol)
    };
    let raw = |rule: ScoringRule, family: F, pairs: usize, tol: f64| {
        entry(TestedRule::raw(rule), family, Expectation::Pass, pairs, tol)
    };
    vec![
        prop(R::Mpr, F::Bernoulli, 1000, 1e-9),
        prop(R::MaeBinary, F::Bernoulli, 1000, 1e-9),
        raw(R::ZeroOne, F::Bernoulli, 1000, 1e-9),
        raw(R::Brier, F::Bernoulli, 1000, 1e-9),
        prop(R::TrialScore, F::P4Plus, 1000, 1e-6),
        raw(R::SpreadError, F::P4Plus, 1000, 1e-6),
        prop(R::Pmcc, F::P2, 1000, 1e-6),
        prop(R::NormalizedSquaredError, F::VarianceCapped { m: 4.0 }, 1000, 1e-6),
        prop(weighted_log(), F::P2, 1000, 1e-6),
        raw(R::LogScore, F::P2, 1000, 1e-6),
        raw(R::crps(), F::P1, 1000, 1e-6),
        prop(R::CrpsAlpha { alpha: 0.5 }, F::P1, 1000, 1e-6),
        prop(R::CrpsAlpha { alpha: 1.5 }, F::P1, 1000, 1e-6),
        prop(R::CrpsAlpha { alpha: 3.0 }, F::Compact { bound: 5.0 }, 1000, 1e-6),
        prop(R::LinearScore, grid, 1000, 1e-6),
        prop(R::ProbabilityScore { c: 0.5 }, grid, 1000, 1e-6),
        prop(
            R::ConvolutionScore {
                base: Box::new(R::crps()),
                noise: noise(),
            },
            F::P1,
            1000,
            1e-6,
        ),
        prop(R::NoisyCrps { noise: noise() }, F::P1, 100, 1e-6),
    ]
}

fn improper_entries() -> Vec<SuiteEntry> {
    use FamilyDescriptor as F;
    use ScoringRule as R;
    let raw = |rule: ScoringRule, family: F, tol: f64| {
        entry(TestedRule::raw(rule), family, Expectation::Violation, 1000, tol)
    };
    vec![
        raw(R::Mpr, F::Bernoulli, 1e-9),
        raw(R::MaeBinary, F::Bernoulli, 1e-9),
        raw(R::TrialScore, F::P4Plus, 1e-6),
        raw(R::Pmcc, F::P2, 1e-6),
        raw(R::NormalizedSquaredError, F::P2, 1e-6),
        raw(R::LinearScore, F::P1, 1e-6),
        raw(R::ProbabilityScore { c: 0.5 }, F::P1, 1e-6),
        raw(R::NoisyCrps { noise: noise() }, F::P1, 1e-6),
        raw(weighted_log(), F::P2, 1e-6),
        raw(R::CrpsAlpha { alpha: 0.5 }, F::P1, 1e-6),
        raw(R::CrpsAlpha { alpha: 1.5 }, F::P1, 1e-6),
    ]
}

/// Entries of a suite, by canonical name or alias.
pub fn suite_entries(name: &str) -> Result<Vec<SuiteEntry>> {
    match resolve_suite(name) {
        Some("properized") => Ok(properized_entries()),
        Some("improper") => Ok(improper_entries()),
        _ => Err(Error::InvalidParameter(format!(
            "unknown suite {name:?}; expected one of {}",
            suite_names().join(", ")
        ))),
    }
}

/// Runs every entry of a suite in order. `pairs` and `tol` override the
/// per-entry defaults when given.
pub fn run_suite(name: &str, seed: u64, pairs: Option<usize>, tol: Option<f64>) -> Result<SuiteReport> {
    let entries = suite_entries(name)?;
    let mut outcomes = Vec::with_capacity(entries.len());
    for e in entries {
        let verdict = propriety_test(&e.tested, e.family, pairs.unwrap_or(e.pairs), tol.unwrap_or(e.tol), seed)?;
        let as_expected = match e.expect {
            Expectation::Pass => verdict.is_pass(),
            Expectation::Violation => verdict.is_violated(),
        };
        outcomes.push(SuiteOutcome {
            verdict,
            expected: e.expect,
            as_expected,
        });
    }
    Ok(SuiteReport {
        suite: resolve_suite(name).unwrap_or(name).to_string(),
        seed,
        all_as_expected: outcomes.iter().all(|o| o.as_expected),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve() {
        assert_eq!(resolve_suite("paper-proper"), Some("properized"));
        assert_eq!(resolve_suite("improper"), Some("improper"));
        assert!(suite_entries("nope").is_err());
    }

    #[test]
    fn improper_suite_finds_every_violation() {
        let r = run_suite("improper", 2024, None, None).unwrap();
        for o in &r.outcomes {
            assert!(o.as_expected, "{}: {:?}", o.verdict.rule, o.verdict.status);
        }
    }
}
