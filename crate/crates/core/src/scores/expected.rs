use std::cell::{Cell, RefCell};

use super::eval::{binary_inputs, forecast_moments, score_with};
use super::{Divergence, Score, ScoringRule};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::quad::Quadrature;

/// `S(P, Q)` with the default quadrature settings.
pub fn expected_score(rule: &ScoringRule, p: &Distribution, q: &Distribution) -> Result<Score> {
    expected_score_with(rule, p, q, &Quadrature::default())
}

/// `integral w(x) S(x) dx`, where `S` may be infinite or fail. An infinite
/// `S` at a point of positive weight makes the whole integral infinite.
pub(crate) fn integrate_score<W, S>(
    quad: &Quadrature,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    weight: W,
    s: S,
) -> Result<Score>
where
    W: Fn(f64) -> f64,
    S: Fn(f64) -> Result<Score>,
{
    let diverged: Cell<Option<Divergence>> = Cell::new(None);
    let failed: RefCell<Option<Error>> = RefCell::new(None);
    let v = quad.integrate_with_breaks(
        |x| {
            let w = weight(x);
            if w == 0.0 || diverged.get().is_some() || failed.borrow().is_some() {
                return 0.0;
            }
            match s(x) {
                Ok(sc) if sc.is_finite() => w * sc.value,
                Ok(sc) => {
                    diverged.set(Some(sc.reason.unwrap_or(Divergence::ZeroDensity)));
                    0.0
                }
                Err(e) => {
                    *failed.borrow_mut() = Some(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        breaks,
    );
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    if let Some(reason) = diverged.get() {
        return Ok(Score::infinite(reason));
    }
    Score::finite(v?)
}

/// `integral [(1 - G) F^a + G (1 - F)^a] dx` for forecast CDF `F` and
/// outcome CDF `G`, the expected CRPS-alpha.
pub(crate) fn crps_alpha_between(alpha: f64, p: &Distribution, q: &Distribution, quad: &Quadrature) -> Result<f64> {
    let tail = 1e-14f64.powf(1.0 / alpha.min(1.0));
    let (pl, ph) = p.support_bounds(tail);
    let (ql, qh) = q.support_bounds(1e-14);
    let lo = pl.min(ql);
    let hi = ph.max(qh);
    let mut breaks = p.breakpoints();
    breaks.extend(q.breakpoints());
    let v = quad.integrate_with_breaks(
        |x| {
            let f = p.cdf(x);
            let g = q.cdf(x);
            (1.0 - g) * f.powf(alpha) + g * (1.0 - f).powf(alpha)
        },
        lo,
        hi,
        &breaks,
    )?;
    Ok(v)
}

/// `integral Phi (1 - Phi) dx`, the CRPS of a distribution against itself.
pub fn crps_phi_phi(noise: &Distribution) -> Result<Score> {
    let (lo, hi) = noise.support_bounds(1e-14);
    let v = Quadrature::default().integrate_with_breaks(
        |x| {
            let f = noise.cdf(x);
            f * (1.0 - f)
        },
        lo,
        hi,
        &noise.breakpoints(),
    )?;
    Score::finite(v)
}

/// `S(P, Q)`. Closed forms for binary and moment-based rules, a single
/// integral for CRPS-alpha, and `sum over atoms + integral S(P, y) q(y) dy`
/// otherwise.
pub fn expected_score_with(
    rule: &ScoringRule,
    p: &Distribution,
    q: &Distribution,
    quad: &Quadrature,
) -> Result<Score> {
    use ScoringRule as R;
    match rule {
        R::Mpr | R::MaeBinary | R::ZeroOne | R::Brier => {
            let Some(prob) = q.as_bernoulli() else {
                return Err(Error::IncompatibleRule(format!(
                    "{rule} needs outcomes in {{0, 1}}, got {q}"
                )));
            };
            binary_inputs(rule, p, 0.0)?;
            let s1 = score_with(rule, p, 1.0, quad)?.value;
            let s0 = score_with(rule, p, 0.0, quad)?.value;
            Score::finite(prob * s1 + (1.0 - prob) * s0)
        }
        R::TrialScore | R::SpreadError | R::Pmcc | R::SquaredError | R::NormalizedSquaredError => {
            let (mu, s2, g) = forecast_moments(rule, p)?;
            let m = |k| q.moment_about(mu, k);
            let v = match rule {
                R::SquaredError => m(2),
                R::Pmcc => m(2) + s2,
                R::NormalizedSquaredError => m(2) / s2,
                R::TrialScore => s2 * s2 - 2.0 * s2 * m(2) + m(4),
                _ => {
                    let k = g / s2;
                    s2 * s2 + m(4) + k * k * m(2) - 2.0 * s2 * m(2) + 2.0 * s2 * k * m(1)
                        - 2.0 * k * m(3)
                }
            };
            Score::finite(v)
        }
        R::CrpsAlpha { alpha } => Score::finite(crps_alpha_between(*alpha, p, q, quad)?),
        R::Weighted { base, weight } => {
            if !(weight.mass(p) > 0.0) {
                return Err(Error::WeightMassZero);
            }
            let inside = weight.mass(q);
            if inside == 0.0 {
                return Score::finite(0.0);
            }
            let (lo, hi) = weight.region();
            let conditional = q.condition_on(lo, hi)?;
            let s = expected_score_with(base, p, &conditional, quad)?;
            if s.is_finite() {
                Score::finite(inside * s.value)
            } else {
                Ok(s)
            }
        }
        R::ConvolutionScore { base, noise } => {
            expected_score_with(base, p, &q.convolve(noise)?, quad)
        }
        R::LogScore | R::LinearScore | R::ProbabilityScore { .. } | R::NoisyCrps { .. } => {
            generic_expectation(rule, p, q, quad)
        }
    }
}

fn generic_expectation(rule: &ScoringRule, p: &Distribution, q: &Distribution, quad: &Quadrature) -> Result<Score> {
    let inner = quad.scaled(1e-2);
    let mut total = 0.0;
    let mut continuous_mass = 1.0;
    for (a, m) in q.atoms() {
        continuous_mass -= m;
        let s = score_with(rule, p, a, &inner)?;
        if !s.is_finite() {
            return Ok(s);
        }
        total += m * s.value;
    }
    if q.is_atomic() || continuous_mass <= 0.0 {
        return Score::finite(total);
    }

    let (lo, hi) = q.support_bounds(1e-13);
    let mut breaks = q.breakpoints();
    let p_breaks = p.breakpoints();
    breaks.extend(&p_breaks);
    match rule {
        ScoringRule::ProbabilityScore { c } => {
            breaks.extend(p_breaks.iter().flat_map(|b| [b - c, b + c]));
        }
        ScoringRule::NoisyCrps { noise } => {
            for nb in noise.breakpoints() {
                breaks.extend(p_breaks.iter().map(|b| b - nb));
            }
        }
        _ => {}
    }
    let part = integrate_score(
        quad,
        lo,
        hi,
        &breaks,
        |y| q.continuous_density(y),
        |y| score_with(rule, p, y, &inner),
    )?;
    if !part.is_finite() {
        return Ok(part);
    }
    Score::finite(total + part.value)
}
