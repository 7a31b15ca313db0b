use super::expected::{crps_alpha_between, integrate_score};
use super::{Divergence, Score, ScoringRule};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::quad::Quadrature;

/// `S(P, y)` with the default quadrature settings.
pub fn score(rule: &ScoringRule, p: &Distribution, y: f64) -> Result<Score> {
    score_with(rule, p, y, &Quadrature::default())
}

fn incompatible<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::IncompatibleRule(msg.into()))
}

/// Forecast probability of the outcome 1 and the outcome as 0.0 / 1.0.
pub(crate) fn binary_inputs(rule: &ScoringRule, p: &Distribution, y: f64) -> Result<(f64, f64)> {
    let Some(prob) = p.as_bernoulli() else {
        return incompatible(format!("{rule} needs a forecast on {{0, 1}}, got {p}"));
    };
    if y != 0.0 && y != 1.0 {
        return incompatible(format!("{rule} needs an outcome of 0 or 1, got {y}"));
    }
    Ok((prob, y))
}

/// Mean, variance and third central moment, rejecting zero variance when
/// the rule divides by it or is only defined on positive variance.
pub(crate) fn forecast_moments(rule: &ScoringRule, p: &Distribution) -> Result<(f64, f64, f64)> {
    let m = p.moments();
    let needs_spread = matches!(
        rule,
        ScoringRule::TrialScore | ScoringRule::SpreadError | ScoringRule::NormalizedSquaredError
    );
    if needs_spread && !(m.variance > 0.0) {
        return Err(Error::DegenerateForecast(format!(
            "{rule} needs positive forecast variance, {p} has none"
        )));
    }
    Ok((m.mean, m.variance, m.third_central))
}

pub(crate) fn density_at(rule: &ScoringRule, p: &Distribution, y: f64) -> Result<f64> {
    match p.pdf(y) {
        Ok(d) => Ok(d),
        Err(Error::NoDensity) => incompatible(format!("{rule} needs a forecast density, {p} has none")),
        Err(e) => Err(e),
    }
}

/// `S(P, y)`; nested integrals use `quad` for their outer level.
pub fn score_with(rule: &ScoringRule, p: &Distribution, y: f64, quad: &Quadrature) -> Result<Score> {
    if !y.is_finite() {
        return Err(Error::InvalidParameter(format!("observation must be finite, got {y}")));
    }
    use ScoringRule as R;
    match rule {
        R::Mpr => {
            let (p, w) = binary_inputs(rule, p, y)?;
            Score::finite(1.0 - p * w - (1.0 - p) * (1.0 - w))
        }
        R::MaeBinary => {
            let (p, w) = binary_inputs(rule, p, y)?;
            Score::finite((p - w).abs())
        }
        R::ZeroOne => {
            let (p, w) = binary_inputs(rule, p, y)?;
            let call = if p >= 0.5 { 1.0 } else { 0.0 };
            Score::finite(if call == w { 0.0 } else { 1.0 })
        }
        R::Brier => {
            let (p, w) = binary_inputs(rule, p, y)?;
            Score::finite((p - w) * (p - w))
        }
        R::LogScore => log_score(p, y),
        R::CrpsAlpha { alpha } => {
            Score::finite(crps_alpha_between(*alpha, p, &Distribution::Dirac { x: y }, quad)?)
        }
        R::Weighted { base, weight } => {
            if !(weight.mass(p) > 0.0) {
                return Err(Error::WeightMassZero);
            }
            if weight.at(y) == 0.0 {
                return Score::finite(0.0);
            }
            score_with(base, p, y, quad)
        }
        R::TrialScore => {
            let (mu, s2, _) = forecast_moments(rule, p)?;
            let d = y - mu;
            Score::finite((s2 - d * d).powi(2))
        }
        R::SpreadError => {
            let (mu, s2, g) = forecast_moments(rule, p)?;
            let d = y - mu;
            Score::finite((s2 - d * d + d * g / s2).powi(2))
        }
        R::Pmcc => {
            let (mu, s2, _) = forecast_moments(rule, p)?;
            Score::finite((y - mu).powi(2) + s2)
        }
        R::SquaredError => {
            let (mu, _, _) = forecast_moments(rule, p)?;
            Score::finite((y - mu).powi(2))
        }
        R::NormalizedSquaredError => {
            let (mu, s2, _) = forecast_moments(rule, p)?;
            Score::finite((y - mu).powi(2) / s2)
        }
        R::LinearScore => Score::finite(-density_at(rule, p, y)?),
        R::ProbabilityScore { c } => {
            if !p.has_density() {
                return incompatible(format!("{rule} needs a forecast density, {p} has none"));
            }
            Score::finite(-(p.cdf(y + c) - p.cdf(y - c)))
        }
        R::NoisyCrps { noise } => Score::finite(noisy_crps(p, noise, y, quad)?),
        R::ConvolutionScore { base, noise } => {
            let (lo, hi) = noise.support_bounds(1e-13);
            let mut breaks: Vec<f64> = noise.breakpoints().iter().map(|b| y + b).collect();
            breaks.extend(p.breakpoints());
            let inner = quad.scaled(1e-2);
            integrate_score(
                quad,
                y + lo,
                y + hi,
                &breaks,
                |x| noise.pdf(x - y).unwrap_or(0.0),
                |x| score_with(base, p, x, &inner),
            )
        }
    }
}

fn log_score(p: &Distribution, y: f64) -> Result<Score> {
    if p.is_atomic() {
        let mass: f64 = p.atoms().iter().filter(|(x, _)| *x == y).map(|(_, m)| m).sum();
        return if mass > 0.0 {
            Score::finite(-mass.ln())
        } else {
            Ok(Score::infinite(Divergence::ZeroProbability))
        };
    }
    if !p.has_density() {
        return incompatible(format!(
            "log score needs a purely atomic or purely continuous forecast, got {p}"
        ));
    }
    let l = p.ln_pdf(y)?;
    if l == f64::NEG_INFINITY {
        Ok(Score::infinite(Divergence::ZeroDensity))
    } else {
        Score::finite(-l)
    }
}

fn noisy_crps(p: &Distribution, noise: &Distribution, y: f64, quad: &Quadrature) -> Result<f64> {
    let (pl, ph) = p.support_bounds(1e-14);
    let (nl, nh) = noise.support_bounds(1e-14);
    let lo = pl.min(y + nl);
    let hi = ph.max(y + nh);
    let mut breaks = p.breakpoints();
    breaks.extend(noise.breakpoints().iter().map(|b| y + b));
    let v = quad.integrate_with_breaks(
        |x| {
            let d = p.cdf(x) - noise.cdf(x - y);
            d * d
        },
        lo,
        hi,
        &breaks,
    )?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scores::WeightSpec;

    fn g(mu: f64, s2: f64) -> Distribution {
        Distribution::gaussian(mu, s2).unwrap()
    }

    fn val(rule: &ScoringRule, p: &Distribution, y: f64) -> f64 {
        score(rule, p, y).unwrap().value
    }

    #[test]
    fn documented_values() {
        let b = Distribution::bernoulli(0.7).unwrap();
        assert!((val(&ScoringRule::Mpr, &b, 0.0) - 0.7).abs() < 1e-15);
        assert_eq!(val(&ScoringRule::Pmcc, &g(1.0, 4.0), 2.0), 5.0);
        assert_eq!(val(&ScoringRule::SpreadError, &g(0.0, 1.0), 2.0), 9.0);
        assert_eq!(val(&ScoringRule::crps(), &Distribution::dirac(0.0).unwrap(), 0.0), 0.0);
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(val(&ScoringRule::ProbabilityScore { c: 1.0 }, &u, 0.5), -1.0);
    }

    #[test]
    fn binary_rules_reject_bad_inputs() {
        let b = Distribution::bernoulli(0.7).unwrap();
        assert!(matches!(score(&ScoringRule::Mpr, &b, 0.5), Err(Error::IncompatibleRule(_))));
        assert!(matches!(
            score(&ScoringRule::Brier, &g(0.0, 1.0), 1.0),
            Err(Error::IncompatibleRule(_))
        ));
    }

    #[test]
    fn zero_one_uses_mode() {
        for (p, y, s) in [(0.5, 1.0, 0.0), (0.5, 0.0, 1.0), (0.49, 0.0, 0.0), (0.9, 0.0, 1.0)] {
            let b = Distribution::bernoulli(p).unwrap();
            assert_eq!(val(&ScoringRule::ZeroOne, &b, y), s);
        }
    }

    #[test]
    fn log_score_divergence() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let s = score(&ScoringRule::LogScore, &u, 2.0).unwrap();
        assert_eq!(s, Score::infinite(Divergence::ZeroDensity));
        let b = Distribution::bernoulli(1.0).unwrap();
        let s = score(&ScoringRule::LogScore, &b, 0.0).unwrap();
        assert_eq!(s.reason, Some(Divergence::ZeroProbability));
        let s = score(&ScoringRule::LogScore, &g(0.0, 1.0), 0.0).unwrap();
        // 0.5 ln(2 pi)
        assert!((s.value - 0.918_938_533_204_672_7).abs() < 1e-14);
    }

    #[test]
    fn crps_matches_gaussian_closed_form() {
        // sigma [z (2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi)]
        let closed = |mu: f64, s2: f64, y: f64| {
            let s = s2.sqrt();
            let z = (y - mu) / s;
            let cdf = 0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2);
            let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            s * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / std::f64::consts::PI.sqrt())
        };
        for &(mu, s2, y) in &[(0.0, 1.0, 0.0), (1.0, 4.0, -2.0), (-3.0, 0.2, 1.0)] {
            let v = val(&ScoringRule::crps(), &g(mu, s2), y);
            assert!((v - closed(mu, s2, y)).abs() < 1e-7, "{mu} {s2} {y}");
        }
    }

    #[test]
    fn crps_alpha_atomic_is_exact() {
        // Categorical {0, 1} with mass 1/2 and y = 0: |1/2 - 1|^a on [0, 1).
        let c = Distribution::categorical(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        for &a in &[0.5, 1.0, 3.0] {
            let v = val(&ScoringRule::CrpsAlpha { alpha: a }, &c, 0.0);
            assert!((v - 0.5f64.powf(a)).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_scores() {
        let w = ScoringRule::Weighted {
            base: Box::new(ScoringRule::LogScore),
            weight: WeightSpec::IndicatorAbove { r: 0.0 },
        };
        let p = g(0.0, 1.0);
        assert_eq!(val(&w, &p, -1.0), 0.0);
        assert_eq!(val(&w, &p, 1.0), val(&ScoringRule::LogScore, &p, 1.0));
        let far = Distribution::uniform(-3.0, -1.0).unwrap();
        assert_eq!(score(&w, &far, 1.0), Err(Error::WeightMassZero));
    }

    #[test]
    fn degenerate_forecasts() {
        let d = Distribution::dirac(0.0).unwrap();
        for r in [ScoringRule::TrialScore, ScoringRule::SpreadError, ScoringRule::NormalizedSquaredError] {
            assert!(matches!(score(&r, &d, 1.0), Err(Error::DegenerateForecast(_))));
        }
        assert_eq!(val(&ScoringRule::Pmcc, &d, 1.0), 1.0);
        assert!(matches!(score(&ScoringRule::LinearScore, &d, 0.0), Err(Error::IncompatibleRule(_))));
    }

    #[test]
    fn probability_score_is_scaled_uniform_convolution() {
        let c = 0.5;
        let rule = ScoringRule::ConvolutionScore {
            base: Box::new(ScoringRule::LinearScore),
            noise: Distribution::uniform(-c, c).unwrap(),
        };
        let p = g(0.3, 2.0);
        for &y in &[-1.0, 0.0, 2.5] {
            let ps = val(&ScoringRule::ProbabilityScore { c }, &p, y);
            let conv = val(&rule, &p, y);
            assert!((ps - 2.0 * c * conv).abs() < 1e-9, "{ps} vs {conv}");
        }
    }
}
