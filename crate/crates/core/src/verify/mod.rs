//! Empirical checks: counterexample search for propriety, fixed points of
//! the properization map, score identities and the linear-score descent.

mod identity;
mod sampler;
mod suites;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{linspace, Distribution, FamilyDescriptor};
use crate::error::{Error, Result};
use crate::properize::{bayes_act, mass_shift_sequence, properized_expected_score, BayesActResult};
use crate::scores::{expected_score, Score, ScoringRule};

pub use identity::{convolution_identity, noisy_crps_identity, probability_score_identity, IdentityCase, IdentityCheck};
pub use sampler::PairSampler;
pub use suites::{resolve_suite, run_suite, suite_entries, suite_names, Expectation, SuiteEntry, SuiteOutcome, SuiteReport};

/// Label attached to every passing verdict.
pub const PASS_NOTE: &str = "no counterexample found";

/// Seed used by [`fixed_point_test`].
pub const FIXED_POINT_SEED: u64 = 0x5eed;

/// A scoring rule as used in a check: either as given, or properized
/// through Bayes acts in `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestedRule {
    Raw { rule: ScoringRule },
    Properized { rule: ScoringRule, family: FamilyDescriptor },
}

impl TestedRule {
    pub fn raw(rule: ScoringRule) -> Self {
        Self::Raw { rule }
    }

    pub fn properized(rule: ScoringRule, family: FamilyDescriptor) -> Self {
        Self::Properized { rule, family }
    }

    pub fn rule(&self) -> &ScoringRule {
        match self {
            Self::Raw { rule } | Self::Properized { rule, .. } => rule,
        }
    }

    /// Expected score of forecast `p` when the outcome follows `q`.
    pub fn expected(&self, p: &Distribution, q: &Distribution) -> Result<Score> {
        match self {
            Self::Raw { rule } => expected_score(rule, p, q),
            Self::Properized { rule, family } => properized_expected_score(rule, p, q, *family),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Raw { rule } => rule.name(),
            Self::Properized { rule, family } => format!("properized {} [{family}]", rule.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Propriety,
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass {
        note: String,
    },
    /// For propriety checks `gap = S(Q, Q) - S(P, Q)`. For fixed-point
    /// checks `Q` is the input, `P` its Bayes act and `gap` their sup-CDF
    /// distance.
    Violated {
        #[serde(rename = "P")]
        p: Distribution,
        #[serde(rename = "Q")]
        q: Distribution,
        gap: f64,
        index: usize,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProprietyVerdict {
    pub rule: String,
    pub check: CheckKind,
    #[serde(flatten)]
    pub status: VerdictStatus,
    pub pairs_tested: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub tested: TestedRule,
    pub family: FamilyDescriptor,
}

impl ProprietyVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self.status, VerdictStatus::Pass { .. })
    }

    pub fn is_violated(&self) -> bool {
        matches!(self.status, VerdictStatus::Violated { .. })
    }

    pub fn gap(&self) -> Option<f64> {
        match self.status {
            VerdictStatus::Violated { gap, .. } => Some(gap),
            _ => None,
        }
    }

    /// Recomputes the gap of a violation from the stored pair.
    pub fn recheck(&self) -> Result<Option<f64>> {
        let VerdictStatus::Violated { p, q, .. } = &self.status else {
            return Ok(None);
        };
        let gap = match self.check {
            CheckKind::Propriety => propriety_gap(&self.tested, p, q)?,
            CheckKind::FixedPoint => cdf_distance(p, q),
        };
        Ok(Some(gap))
    }
}

fn propriety_gap(tested: &TestedRule, p: &Distribution, q: &Distribution) -> Result<f64> {
    let truth = tested.expected(q, q)?.value;
    let other = tested.expected(p, q)?.value;
    let gap = truth - other;
    // Both sides infinite: nothing to compare.
    Ok(if gap.is_nan() { 0.0 } else { gap })
}

fn chunk_size() -> usize {
    (4 * rayon::current_num_threads()).max(8)
}

enum PairOutcome {
    Fine,
    Violation(Distribution, Distribution, f64),
    Failed(Error),
}

/// First violation `(index, P, Q, gap)` if any, pairs evaluated, failures.
type SearchResult = (Option<(usize, Distribution, Distribution, f64)>, usize, Vec<Error>);

/// Chunked parallel evaluation that stops at the first violating index.
fn search<F>(
    n: usize,
    mut draw: impl FnMut(usize) -> Result<(Distribution, Distribution)>,
    eval: F,
) -> Result<SearchResult>
where
    F: Fn(&Distribution, &Distribution) -> PairOutcome + Sync,
{
    let mut failures = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + chunk_size()).min(n);
        let pairs = (start..end).map(&mut draw).collect::<Result<Vec<_>>>()?;
        let outcomes: Vec<PairOutcome> = pairs.par_iter().map(|(p, q)| eval(p, q)).collect();
        for (offset, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                PairOutcome::Fine => {}
                PairOutcome::Failed(e) => failures.push(e),
                PairOutcome::Violation(p, q, gap) => {
                    let index = start + offset;
                    return Ok((Some((index, p, q, gap)), index + 1, failures));
                }
            }
        }
        start = end;
    }
    Ok((None, n, failures))
}

fn settle(
    check: CheckKind,
    tested: TestedRule,
    family: FamilyDescriptor,
    tol: f64,
    seed: u64,
    found: SearchResult,
) -> ProprietyVerdict {
    let (violation, pairs_tested, failures) = found;
    let status = match violation {
        Some((index, p, q, gap)) => VerdictStatus::Violated { p, q, gap, index },
        None if failures.len() * 10 > pairs_tested => {
            let quad = failures.iter().filter(|e| matches!(e, Error::QuadratureFailure { .. })).count();
            VerdictStatus::Inconclusive {
                reason: format!(
                    "{} of {pairs_tested} evaluations failed ({quad} quadrature failures); first: {}",
                    failures.len(),
                    failures[0]
                ),
            }
        }
        None => VerdictStatus::Pass { note: PASS_NOTE.into() },
    };
    ProprietyVerdict {
        rule: tested.label(),
        check,
        status,
        pairs_tested,
        tolerance: tol,
        seed,
        tested,
        family,
    }
}

fn check_inputs(n: usize, tol: f64, family: FamilyDescriptor) -> Result<()> {
    family.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("at least one pair is needed".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Searches `n` seeded pairs `(P, Q)` drawn by [`PairSampler`] for a
/// forecast that beats the truth: `S(Q, Q) > S(P, Q) + tol`. The reported
/// violation is the one with the smallest pair index.
pub fn propriety_test(
    rule: &TestedRule,
    family: FamilyDescriptor,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<ProprietyVerdict> {
    check_inputs(n, tol, family)?;
    rule.rule().validate()?;
    let sampler = PairSampler::new(family);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let found = search(
        n,
        |i| sampler.pair(i, &mut rng),
        |p, q| match propriety_gap(rule, p, q) {
            Ok(gap) if gap > tol => PairOutcome::Violation(p.clone(), q.clone(), gap),
            Ok(_) => PairOutcome::Fine,
            Err(e) => PairOutcome::Failed(e),
        },
    )?;
    Ok(settle(CheckKind::Propriety, rule.clone(), family, tol, seed, found))
}

/// Sup-distance between two CDFs, taken over 1001 evenly spaced points
/// spanning both supports plus every atom (both one-sided limits) and
/// every breakpoint.
pub fn cdf_distance(a: &Distribution, b: &Distribution) -> f64 {
    let (la, ha) = a.support_bounds(1e-12);
    let (lb, hb) = b.support_bounds(1e-12);
    let mut xs = linspace(la.min(lb), ha.max(hb), 1001);
    xs.extend(a.breakpoints());
    xs.extend(b.breakpoints());
    let mut d: f64 = xs.iter().map(|&x| (a.cdf(x) - b.cdf(x)).abs()).fold(0.0, f64::max);
    for (x, _) in a.atoms().into_iter().chain(b.atoms()) {
        d = d.max((a.cdf(x) - b.cdf(x)).abs());
        d = d.max((a.cdf_left(x) - b.cdf_left(x)).abs());
    }
    d
}

/// Checks that `n` seeded members of `family` are returned unchanged by
/// `bayes_act`, up to sup-CDF distance `tol`. A missing Bayes act counts
/// as a failure with infinite distance.
pub fn fixed_point_test(rule: &ScoringRule, family: FamilyDescriptor, n: usize, tol: f64) -> Result<ProprietyVerdict> {
    check_inputs(n, tol, family)?;
    rule.validate()?;
    let sampler = PairSampler::new(family);
    let mut rng = ChaCha8Rng::seed_from_u64(FIXED_POINT_SEED);
    let found = search(
        n,
        |_| {
            let p = sampler.draw(&mut rng)?;
            Ok((p.clone(), p))
        },
        |p, _| match bayes_act(rule, p, family) {
            Ok(BayesActResult::Act(a)) => {
                let d = cdf_distance(&a.act, p);
                if d > tol {
                    PairOutcome::Violation(a.act, p.clone(), d)
                } else {
                    PairOutcome::Fine
                }
            }
            Ok(BayesActResult::NoBayesAct(cert)) => {
                PairOutcome::Violation(cert.forecasts.last().cloned().unwrap_or_else(|| p.clone()), p.clone(), f64::INFINITY)
            }
            Err(e) => PairOutcome::Failed(e),
        },
    )?;
    Ok(settle(
        CheckKind::FixedPoint,
        TestedRule::properized(rule.clone(), family),
        family,
        tol,
        FIXED_POINT_SEED,
        found,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentStep {
    pub forecast: Distribution,
    pub expected_score: f64,
}

/// Forecasts with strictly decreasing expected linear score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentDemo {
    pub sequence: Vec<DescentStep>,
    pub epsilon: f64,
}

impl DescentDemo {
    pub fn scores(&self) -> Vec<f64> {
        self.sequence.iter().map(|s| s.expected_score).collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.sequence.len() >= 2 && self.sequence.windows(2).all(|w| w[1].expected_score < w[0].expected_score)
    }
}

/// Starting from `q`, moves the mass on `(mu + (2k-1) eps, mu + (2k+1) eps]`
/// onto the central interval for `k = 1, -1, 2, -2, ...`, one interval per
/// step. Returns `steps + 1` forecasts. Fails with
/// [`Error::InvalidShape`] unless `q` is Gaussian.
pub fn linear_score_descent(q: &Distribution, epsilon: f64, steps: usize) -> Result<DescentDemo> {
    let (forecasts, scores) = mass_shift_sequence(q, epsilon, steps)?;
    let demo = DescentDemo {
        sequence: forecasts
            .into_iter()
            .zip(scores)
            .map(|(forecast, expected_score)| DescentStep { forecast, expected_score })
            .collect(),
        epsilon,
    };
    if !demo.is_strictly_decreasing() {
        return Err(Error::IncompatibleRule(format!(
            "mass shifting did not decrease the linear score: {:?}",
            demo.scores()
        )));
    }
    Ok(demo)
}
