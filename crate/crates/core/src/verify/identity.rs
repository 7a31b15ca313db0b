use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::scores::{crps_phi_phi, expected_score, score, ScoringRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    /// Observation for pointwise cases, `None` for expectations.
    pub at: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCase {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: Vec<IdentityCase>,
    /// Largest absolute residual over all cases.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, cases: Vec<IdentityCase>, tolerance: f64) -> Self {
        let residual = cases.iter().map(IdentityCase::residual).fold(0.0, f64::max);
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            cases,
            residual,
            tolerance,
        }
    }
}

fn needs_density(noise: &Distribution) -> Result<()> {
    if noise.has_density() {
        Ok(())
    } else {
        Err(Error::NoDensity)
    }
}

/// Expected noisy CRPS against the CRPS of the noise-convolved truth:
/// `S_noise(P, Q)` versus `CRPS(P, Q * noise) - CRPS(noise, noise)`.
pub fn noisy_crps_identity(p: &Distribution, q: &Distribution, noise: &Distribution, tol: f64) -> Result<IdentityCheck> {
    needs_density(noise)?;
    let rule = ScoringRule::NoisyCrps { noise: noise.clone() };
    let lhs = expected_score(&rule, p, q)?.value;
    let blurred = q.convolve(noise)?;
    let rhs = expected_score(&ScoringRule::crps(), p, &blurred)?.value - crps_phi_phi(noise)?.value;
    Ok(IdentityCheck::new("noisy crps", vec![IdentityCase { at: None, lhs, rhs }], tol))
}

/// The CRPS of the smoothed forecast against the noisy CRPS shifted by
/// `CRPS(noise, noise)`, pointwise at the 10%, 50% and 90% quantiles of
/// `q` and in expectation under `q`.
pub fn convolution_identity(p: &Distribution, q: &Distribution, noise: &Distribution, tol: f64) -> Result<IdentityCheck> {
    needs_density(noise)?;
    let smoothed = ScoringRule::ConvolutionScore {
        base: Box::new(ScoringRule::crps()),
        noise: noise.clone(),
    };
    let noisy = ScoringRule::NoisyCrps { noise: noise.clone() };
    let c = crps_phi_phi(noise)?.value;
    let mut cases = Vec::new();
    for level in [0.1, 0.5, 0.9] {
        let y = q.quantile(level);
        cases.push(IdentityCase {
            at: Some(y),
            lhs: score(&smoothed, p, y)?.value,
            rhs: score(&noisy, p, y)?.value + c,
        });
    }
    cases.push(IdentityCase {
        at: None,
        lhs: expected_score(&smoothed, p, q)?.value,
        rhs: expected_score(&noisy, p, q)?.value + c,
    });
    Ok(IdentityCheck::new("convolution crps", cases, tol))
}

/// `PS_c(P, y)` against `2c` times the linear score smoothed by the
/// uniform density on `[-c, c]`, at each of `ys`.
pub fn probability_score_identity(p: &Distribution, c: f64, ys: &[f64], tol: f64) -> Result<IdentityCheck> {
    let ps = ScoringRule::ProbabilityScore { c };
    ps.validate()?;
    let smoothed = ScoringRule::ConvolutionScore {
        base: Box::new(ScoringRule::LinearScore),
        noise: Distribution::uniform(-c, c)?,
    };
    let cases = ys
        .iter()
        .map(|&y| {
            Ok(IdentityCase {
                at: Some(y),
                lhs: score(&ps, p, y)?.value,
                rhs: 2.0 * c * score(&smoothed, p, y)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityCheck::new("probability score", cases, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mu: f64, s2: f64) -> Distribution {
        Distribution::gaussian(mu, s2).unwrap()
    }

    #[test]
    fn standard_triple() {
        let n = g(0.0, 1.0);
        let r = noisy_crps_identity(&n, &n, &n, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let r = convolution_identity(&n, &n, &n, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn narrow_noise_recovers_crps() {
        let (p, q) = (g(0.5, 2.0), g(-0.3, 1.0));
        let noise = g(0.0, 1e-6);
        let r = noisy_crps_identity(&p, &q, &noise, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let plain = expected_score(&ScoringRule::crps(), &p, &q).unwrap().value;
        assert!((r.cases[0].lhs - plain).abs() < 1e-3);
    }

    #[test]
    fn uniform_noise_probability_score() {
        let p = g(0.2, 1.5);
        let r = probability_score_identity(&p, 0.5, &[-1.0, 0.0, 0.7, 3.0], 1e-8).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn atomic_noise_is_rejected() {
        let n = g(0.0, 1.0);
        let d = Distribution::dirac(0.0).unwrap();
        assert!(matches!(noisy_crps_identity(&n, &n, &d, 1e-6), Err(Error::NoDensity)));
    }
}
