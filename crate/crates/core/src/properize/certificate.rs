//! Descent sequences: forecasts whose expected scores strictly decrease,
//! evidencing that no minimiser exists inside the searched family.

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::scores::{expected_score, ScoringRule};

/// Number of forecasts in every certificate built by this crate.
pub const CERTIFICATE_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentCertificate {
    pub forecasts: Vec<Distribution>,
    /// Expected score of each forecast under the belief.
    pub scores: Vec<f64>,
    pub direction: String,
}

impl DescentCertificate {
    /// True when every consecutive pair drops by a positive margin.
    pub fn is_strictly_decreasing(&self) -> bool {
        strictly_decreasing(&self.scores)
    }

    /// Recomputes the scores from the stored forecasts.
    pub fn recheck(&self, rule: &ScoringRule, belief: &Distribution) -> Result<bool> {
        let scores = score_all(rule, &self.forecasts, belief)?;
        Ok(strictly_decreasing(&scores))
    }
}

pub(crate) fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.len() >= 2 && xs.windows(2).all(|w| w[1] < w[0])
}

fn score_all(rule: &ScoringRule, forecasts: &[Distribution], belief: &Distribution) -> Result<Vec<f64>> {
    forecasts
        .iter()
        .map(|f| {
            let s = expected_score(rule, f, belief)?;
            Ok(s.value)
        })
        .collect()
}

/// Gaussians `N(mean, v0 * factor^k)` for `k = 0..8`, returned only if
/// their expected scores strictly decrease.
pub(crate) fn variance_sequence(
    rule: &ScoringRule,
    belief: &Distribution,
    mean: f64,
    v0: f64,
    factor: f64,
    direction: &str,
) -> Result<Option<DescentCertificate>> {
    let forecasts = (0..CERTIFICATE_LEN)
        .map(|k| Distribution::gaussian(mean, v0 * factor.powi(k as i32)))
        .collect::<Result<Vec<_>>>()?;
    let scores = score_all(rule, &forecasts, belief)?;
    let cert = DescentCertificate {
        forecasts,
        scores,
        direction: direction.to_string(),
    };
    Ok(cert.is_strictly_decreasing().then_some(cert))
}

/// Increasingly concentrated Gaussians around `centre`. The starting
/// variance is reduced until the sequence decreases strictly.
pub(crate) fn concentration_certificate(
    rule: &ScoringRule,
    belief: &Distribution,
    centre: f64,
    v0: f64,
) -> Result<DescentCertificate> {
    let mut v = v0;
    for _ in 0..16 {
        let direction = format!("concentrating mass at {centre:.6} (variance halving from {v:.3e})");
        if let Some(c) = variance_sequence(rule, belief, centre, v, 0.5, &direction)? {
            return Ok(c);
        }
        v /= 4.0;
    }
    Err(Error::IncompatibleRule(format!(
        "could not certify descent for {rule} around {centre}"
    )))
}

/// Mass-shift sequence for the linear score under a Gaussian belief `q`.
///
/// With `I_k = (mu + (2k-1) eps, mu + (2k+1) eps]`, step `j` moves the mass
/// of `q` on `I_k` (for `k = 1, -1, 2, -2, ...`) onto the modal interval
/// `I_0` by translation. The first forecast is `q` itself, so `steps`
/// shifts give `steps + 1` forecasts.
pub fn mass_shift_sequence(q: &Distribution, eps: f64, steps: usize) -> Result<(Vec<Distribution>, Vec<f64>)> {
    let Distribution::Gaussian { mu, sigma2 } = *q else {
        return Err(Error::InvalidShape(format!(
            "mass shifting needs a symmetric density strictly increasing below its centre, got {q}"
        )));
    };
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("interval half-width must be positive, got {eps}")));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("at least one shift is needed".into()));
    }
    let order: Vec<i64> = (0..steps)
        .map(|j| {
            let k = (j / 2 + 1) as i64;
            if j % 2 == 0 {
                k
            } else {
                -k
            }
        })
        .collect();
    let reach = order.iter().map(|k| k.abs()).max().unwrap_or(0);
    let edge = |k: i64| mu + (2 * k - 1) as f64 * eps;
    let piece = |lo: Option<f64>, hi: Option<f64>| Distribution::truncated_gaussian(mu, sigma2, lo, hi);

    let mut forecasts = Vec::with_capacity(steps + 1);
    forecasts.push(q.clone());
    for done in 1..=steps {
        let shifted = &order[..done];
        let mut parts = Vec::new();
        let mut weights = Vec::new();
        let lower_tail = edge(-reach);
        let upper_tail = edge(reach + 1);
        parts.push(piece(None, Some(lower_tail))?);
        weights.push(q.cdf(lower_tail));
        parts.push(piece(Some(upper_tail), None)?);
        weights.push(1.0 - q.cdf(upper_tail));
        for k in -reach..=reach {
            let (lo, hi) = (edge(k), edge(k + 1));
            let mass = q.cdf(hi) - q.cdf(lo);
            let p = piece(Some(lo), Some(hi))?;
            if shifted.contains(&k) {
                parts.push(p.shift(-2.0 * k as f64 * eps));
            } else {
                parts.push(p);
            }
            weights.push(mass);
        }
        forecasts.push(Distribution::mixture_normalized(parts, weights)?);
    }
    let scores = score_all(&ScoringRule::LinearScore, &forecasts, q)?;
    Ok((forecasts, scores))
}
