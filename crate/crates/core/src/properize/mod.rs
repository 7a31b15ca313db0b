//! Bayes acts and properized scores.
//!
//! For a rule `S` and a belief `P`, a Bayes act is any `P*` minimising
//! `Q -> S(Q, P)` over the family. The properized rule scores `P` by
//! `S(P*, y)`, which is proper whenever acts exist.

mod certificate;
mod search;

use serde::{Deserialize, Serialize};

use crate::distributions::{linspace, Distribution, FamilyDescriptor};
use crate::error::{Error, Result};
use crate::scores::{expected_score, score, Score, ScoringRule};

pub use certificate::{mass_shift_sequence, DescentCertificate, CERTIFICATE_LEN};
pub use search::{finite_bayes_act, parametric_bayes_act, SimplexSearchConfig};

/// Knots of the grid CDF returned for CRPS-alpha acts of continuous beliefs.
pub const ACT_GRID_KNOTS: usize = 4001;

/// Relative tolerance between closed-form and composed properized scores.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesAct {
    pub act: Distribution,
    /// False when other members of the family are equally good.
    pub unique: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Other minimisers found by a search, when there are several.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ties: Vec<Distribution>,
}

impl BayesAct {
    fn new(act: Distribution, unique: bool) -> Self {
        Self {
            act,
            unique,
            warnings: Vec::new(),
            ties: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BayesActResult {
    Act(BayesAct),
    NoBayesAct(DescentCertificate),
}

impl BayesActResult {
    pub fn act(&self) -> Option<&BayesAct> {
        match self {
            Self::Act(a) => Some(a),
            Self::NoBayesAct(_) => None,
        }
    }

    /// The act, or [`Error::NoBayesAct`] carrying the certificate.
    pub fn into_act(self) -> Result<BayesAct> {
        match self {
            Self::Act(a) => Ok(a),
            Self::NoBayesAct(c) => Err(Error::NoBayesAct(Box::new(c))),
        }
    }
}

fn act(d: Distribution, unique: bool) -> Result<BayesActResult> {
    Ok(BayesActResult::Act(BayesAct::new(d, unique)))
}

fn incompatible<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::IncompatibleRule(msg.into()))
}

/// `1 / (1 + ((1 - F) / F)^(1 / (alpha - 1)))`, with 0 at `F = 0`: the
/// minimiser over `q` of `(1 - F) q^alpha + F (1 - q)^alpha` for `alpha > 1`.
pub fn crps_alpha_act_value(alpha: f64, f: f64) -> f64 {
    if f <= 0.0 {
        0.0
    } else if f >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + ((1.0 - f) / f).powf(1.0 / (alpha - 1.0)))
    }
}

// Grid CDF from knot values that should end at 1; rounding is absorbed.
fn closed_grid(grid: Vec<f64>, mut cdf: Vec<f64>) -> Result<Distribution> {
    let mut running: f64 = 0.0;
    for c in cdf.iter_mut() {
        running = running.max(c.clamp(0.0, 1.0));
        *c = running;
    }
    *cdf.last_mut().expect("nonempty grid") = 1.0;
    Distribution::grid_cdf(grid, cdf)
}

fn crps_alpha_act(alpha: f64, p: &Distribution, family: FamilyDescriptor) -> Result<BayesAct> {
    let h = |f: f64| crps_alpha_act_value(alpha, f);
    let mut warnings = Vec::new();
    if alpha > 2.0 && !matches!(family, FamilyDescriptor::Compact { .. }) {
        warnings.push(format!(
            "alpha = {alpha} > 2: the act has heavier tails than the forecast; strict propriety holds on compactly supported families (got {family})"
        ));
    }
    if p.is_atomic() {
        let atoms = p.atoms();
        if atoms.len() == 1 {
            return Ok(BayesAct {
                warnings,
                ..BayesAct::new(Distribution::dirac(atoms[0].0)?, true)
            });
        }
        let mut cum = 0.0;
        let mut prev = 0.0;
        let mut points = Vec::with_capacity(atoms.len());
        let mut probs = Vec::with_capacity(atoms.len());
        for (i, (x, m)) in atoms.iter().enumerate() {
            cum += m;
            let v = if i + 1 == atoms.len() { 1.0 } else { h(cum.min(1.0)) };
            points.push(*x);
            probs.push(v - prev);
            prev = v;
        }
        return Ok(BayesAct {
            warnings,
            ..BayesAct::new(Distribution::categorical(points, probs)?, true)
        });
    }

    let grid = match p {
        Distribution::GridCdf { grid, .. } => {
            let refine = (8000 / (grid.len() - 1)).max(1);
            let mut knots = Vec::with_capacity((grid.len() - 1) * refine + 1);
            for w in grid.windows(2) {
                let seg = linspace(w[0], w[1], refine + 1);
                knots.extend_from_slice(&seg[..refine]);
            }
            knots.push(*grid.last().expect("nonempty"));
            knots
        }
        _ => {
            let tail = if alpha > 2.0 {
                1e-10f64.powf(alpha - 1.0).max(1e-300)
            } else {
                1e-10
            };
            let (lo, hi) = p.support_bounds(tail);
            let mut knots = linspace(lo, hi, ACT_GRID_KNOTS);
            for b in p.breakpoints() {
                if b > lo && b < hi {
                    knots.push(b);
                }
            }
            for (a, _) in p.atoms() {
                let delta = 1e-9 * (1.0 + a.abs());
                if a - delta > lo && a < hi {
                    knots.push(a - delta);
                    knots.push(a);
                }
            }
            knots.sort_by(f64::total_cmp);
            knots.dedup();
            knots
        }
    };
    let values: Vec<f64> = grid.iter().map(|x| h(p.cdf(*x))).collect();
    let outside = values[0] + (1.0 - values[values.len() - 1]);
    if outside > 1e-8 {
        warnings.push(format!("act mass {outside:.2e} lies outside the evaluation grid"));
    }
    Ok(BayesAct {
        warnings,
        ..BayesAct::new(closed_grid(grid, values)?, true)
    })
}

fn check_family(rule: &ScoringRule, p: &Distribution, family: FamilyDescriptor) -> Result<()> {
    family.validate()?;
    if rule.is_binary() {
        if !family.is_binary() {
            return incompatible(format!("{rule} is a binary rule; use the bernoulli family, not {family}"));
        }
        if p.as_bernoulli().is_none() {
            return incompatible(format!("{rule} needs a forecast on {{0, 1}}, got {p}"));
        }
        return Ok(());
    }
    let grid_family = matches!(family, FamilyDescriptor::LebesgueGrid { .. });
    if grid_family {
        if !p.has_density() {
            return incompatible(format!("{family} needs a belief with a density, got {p}"));
        }
    } else if !family.contains(p) {
        return incompatible(format!("forecast {p} is not in family {family}"));
    }
    Ok(())
}

/// A Bayes act of `rule` for the belief `p` within `family`, by closed form
/// where one is known, or a descent certificate when none exists.
pub fn bayes_act(rule: &ScoringRule, p: &Distribution, family: FamilyDescriptor) -> Result<BayesActResult> {
    rule.validate()?;
    check_family(rule, p, family)?;
    use ScoringRule as R;
    match rule {
        R::Mpr | R::MaeBinary => {
            let prob = p.as_bernoulli().expect("checked above");
            let call = if prob >= 0.5 { 1.0 } else { 0.0 };
            let mut a = BayesAct::new(Distribution::dirac(call)?, prob != 0.5);
            if prob == 0.5 {
                a.ties.push(Distribution::dirac(0.0)?);
            }
            Ok(BayesActResult::Act(a))
        }
        R::ZeroOne => act(p.clone(), false),
        R::Brier | R::LogScore => act(p.clone(), true),
        R::SpreadError | R::SquaredError => act(p.clone(), false),
        R::CrpsAlpha { alpha } => {
            if *alpha == 2.0 {
                act(p.clone(), true)
            } else if *alpha > 1.0 {
                Ok(BayesActResult::Act(crps_alpha_act(*alpha, p, family)?))
            } else {
                let m = p.median();
                act(Distribution::dirac(m)?, !p.has_median_interval())
            }
        }
        R::Weighted { base, weight } => {
            if !(weight.mass(p) > 0.0) {
                return Err(Error::WeightMassZero);
            }
            let (lo, hi) = weight.region();
            let conditional = p.condition_on(lo, hi)?;
            let family = if family.contains(&conditional) {
                family
            } else {
                FamilyDescriptor::P1
            };
            bayes_act(base, &conditional, family)
        }
        R::TrialScore => {
            let m = p.moments();
            if !(m.variance > 0.0) {
                return Err(Error::DegenerateForecast(format!("{rule} needs positive variance, {p} has none")));
            }
            let s2 = m.variance;
            let mean = m.mean + m.third_central / (2.0 * s2);
            let var = s2 * (1.0 + m.third_central.powi(2) / (4.0 * s2.powi(3)));
            act(Distribution::gaussian(mean, var)?, false)
        }
        R::Pmcc => {
            let mu = p.mean();
            if matches!(family, FamilyDescriptor::P4Plus | FamilyDescriptor::LebesgueGrid { .. }) {
                let v0 = p.variance().max(1e-2);
                return Ok(match certificate::variance_sequence(
                    rule,
                    p,
                    mu,
                    v0,
                    0.5,
                    "variance halving towards a point mass outside the family",
                )? {
                    Some(c) => BayesActResult::NoBayesAct(c),
                    None => return incompatible(format!("no descent found for {rule} on {family}")),
                });
            }
            act(Distribution::dirac(mu)?, true)
        }
        R::NormalizedSquaredError => {
            let m = p.moments();
            match family {
                FamilyDescriptor::VarianceCapped { m: cap } => {
                    act(Distribution::gaussian(m.mean, cap)?, false)
                }
                FamilyDescriptor::P1 | FamilyDescriptor::P2 | FamilyDescriptor::P4Plus => {
                    if m.variance == 0.0 {
                        // Any spread forecast centred on the point mass scores 0.
                        return act(Distribution::gaussian(m.mean, 1.0)?, false);
                    }
                    match certificate::variance_sequence(rule, p, m.mean, m.variance, 2.0, "variance doubling")? {
                        Some(c) => Ok(BayesActResult::NoBayesAct(c)),
                        None => incompatible(format!("no descent found for {rule}")),
                    }
                }
                _ => incompatible(format!("{rule} acts are only available on p1, p2, p4plus or p2m families")),
            }
        }
        R::LinearScore | R::ProbabilityScore { .. } => window_rule_act(rule, p, family),
        R::NoisyCrps { noise } => act(p.convolve(noise)?, true),
        R::ConvolutionScore { base, noise } => {
            let blurred = p.convolve(noise)?;
            let family = if family.contains(&blurred) {
                family
            } else {
                FamilyDescriptor::P1
            };
            bayes_act(base, &blurred, family)
        }
    }
}

/// `x -> Q([x - c, x + c])` for the probability score, or the density for
/// the linear score: the quantity an act should concentrate its mass on.
fn attraction(rule: &ScoringRule, p: &Distribution, x: f64) -> f64 {
    match rule {
        ScoringRule::ProbabilityScore { c } => p.cdf(x + c) - p.cdf(x - c),
        _ => p.continuous_density(x),
    }
}

fn window_rule_act(rule: &ScoringRule, p: &Distribution, family: FamilyDescriptor) -> Result<BayesActResult> {
    if !p.has_density() {
        return incompatible(format!("{rule} needs a belief with a density, got {p}"));
    }
    let (lo, hi) = p.support_bounds(1e-12);
    let c = match rule {
        ScoringRule::ProbabilityScore { c } => *c,
        _ => 0.0,
    };

    if let Some(edges) = family.cell_edges() {
        // Densities constant on cells: put everything on the best cell.
        let quad = crate::quad::Quadrature::default();
        let mut gains = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let g = quad.integrate_with_breaks(|x| attraction(rule, p, x), w[0], w[1], &p.breakpoints())?;
            gains.push(g / (w[1] - w[0]));
        }
        let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..gains.len()).filter(|i| gains[*i] >= best - 1e-12).collect();
        let cell = |i: usize| Distribution::uniform(edges[i], edges[i + 1]);
        let mut a = BayesAct::new(cell(winners[0])?, winners.len() == 1);
        for &i in &winners[1..] {
            a.ties.push(cell(i)?);
        }
        return Ok(BayesActResult::Act(a));
    }

    // A flat top of positive width can hold a whole density.
    if let Some((a, b)) = plateau(rule, p, c) {
        return act(Distribution::uniform(a, b)?, false);
    }

    if let (ScoringRule::LinearScore, Distribution::Gaussian { sigma2, .. }) = (rule, p) {
        let eps = 0.5 * sigma2.sqrt();
        let (forecasts, scores) = mass_shift_sequence(p, eps, CERTIFICATE_LEN - 1)?;
        let cert = DescentCertificate {
            forecasts,
            scores,
            direction: format!("shifting mass onto the modal interval of half-width {eps}"),
        };
        if cert.is_strictly_decreasing() {
            return Ok(BayesActResult::NoBayesAct(cert));
        }
    }

    let centre = argmax(|x| attraction(rule, p, x), lo - c, hi + c);
    let v0 = p.variance().min(c.max(1e-3).powi(2)).max(1e-6);
    Ok(BayesActResult::NoBayesAct(certificate::concentration_certificate(rule, p, centre, v0)?))
}

// Maximal interval on which the attraction is constant at its maximum,
// for piecewise-uniform beliefs.
fn plateau(rule: &ScoringRule, p: &Distribution, c: f64) -> Option<(f64, f64)> {
    let piecewise_flat = |d: &Distribution| matches!(d, Distribution::Uniform { .. } | Distribution::GridCdf { .. });
    let flat = match p {
        Distribution::Mixture { components, .. } => components.iter().all(piecewise_flat),
        other => piecewise_flat(other),
    };
    if !flat {
        return None;
    }
    let breaks = p.breakpoints();
    let mut cand: Vec<f64> = breaks.iter().flat_map(|b| [b - c, *b, b + c]).collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let mut best: Option<(f64, f64, f64)> = None;
    for w in cand.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let v = attraction(rule, p, mid);
        let level = attraction(rule, p, a + 0.25 * (b - a)).min(attraction(rule, p, b - 0.25 * (b - a)));
        if (v - level).abs() > 1e-12 * v.abs().max(1.0) {
            continue;
        }
        if best.is_none_or(|(_, _, bv)| v > bv + 1e-12) {
            best = Some((a, b, v));
        }
    }
    let (a, b, v) = best?;
    // The flat piece must beat every point, not just every flat piece.
    let (lo, hi) = p.support_bounds(0.0);
    let peak = argmax(|x| attraction(rule, p, x), lo - c, hi + c);
    if attraction(rule, p, peak) > v + 1e-12 {
        return None;
    }
    Some((a, b))
}

fn argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = 2001;
    let xs = linspace(lo, hi, n);
    let mut best = 0;
    for i in 1..n {
        if f(xs[i]) > f(xs[best]) {
            best = i;
        }
    }
    // Golden-section refinement on the bracketing cells.
    let (mut a, mut b) = (xs[best.saturating_sub(1)], xs[(best + 1).min(n - 1)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) >= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    0.5 * (a + b)
}

/// `S*(P, y) = S(P*, y)`. Where a closed form for the properized rule is
/// known it is evaluated as well, and a disagreement beyond `1e-8`
/// (relative) is reported as [`Error::Inconsistent`].
pub fn properized_score(rule: &ScoringRule, p: &Distribution, y: f64, family: FamilyDescriptor) -> Result<Score> {
    let a = bayes_act(rule, p, family)?.into_act()?;
    let composed = score(rule, &a.act, y)?;
    let closed = match rule {
        ScoringRule::Mpr | ScoringRule::MaeBinary => Some(score(&ScoringRule::ZeroOne, p, y)?),
        ScoringRule::TrialScore => Some(score(&ScoringRule::SpreadError, p, y)?),
        ScoringRule::Pmcc => Some(score(&ScoringRule::SquaredError, p, y)?),
        _ => None,
    };
    match closed {
        Some(c) => {
            if (c.value - composed.value).abs() > CONSISTENCY_TOL * c.value.abs().max(1.0) {
                return Err(Error::Inconsistent {
                    closed: c.value,
                    composed: composed.value,
                });
            }
            Ok(c)
        }
        None => Ok(composed),
    }
}

/// `S*(P, Q) = S(P*, Q)`.
pub fn properized_expected_score(
    rule: &ScoringRule,
    p: &Distribution,
    q: &Distribution,
    family: FamilyDescriptor,
) -> Result<Score> {
    let a = bayes_act(rule, p, family)?.into_act()?;
    expected_score(rule, &a.act, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mu: f64, s2: f64) -> Distribution {
        Distribution::gaussian(mu, s2).unwrap()
    }

    fn act_of(rule: &ScoringRule, p: &Distribution, family: FamilyDescriptor) -> BayesAct {
        bayes_act(rule, p, family).unwrap().into_act().unwrap()
    }

    #[test]
    fn binary_act() {
        let a = act_of(&ScoringRule::MaeBinary, &Distribution::bernoulli(0.7).unwrap(), FamilyDescriptor::Bernoulli);
        assert_eq!(a.act, Distribution::dirac(1.0).unwrap());
        assert!(a.unique);
        let a = act_of(&ScoringRule::Mpr, &Distribution::bernoulli(0.5).unwrap(), FamilyDescriptor::Bernoulli);
        assert_eq!(a.act, Distribution::dirac(1.0).unwrap());
        assert!(!a.unique);
    }

    #[test]
    fn crps_alpha_three_at_point_eight() {
        assert!((crps_alpha_act_value(3.0, 0.8) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(crps_alpha_act_value(3.0, 0.0), 0.0);
        assert_eq!(crps_alpha_act_value(3.0, 1.0), 1.0);
        assert_eq!(crps_alpha_act_value(2.0, 0.3), 0.3);
    }

    #[test]
    fn crps_alpha_act_on_grid_matches_map_at_knots() {
        let p = Distribution::grid_cdf(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.2, 0.8, 1.0]).unwrap();
        let a = act_of(&ScoringRule::CrpsAlpha { alpha: 3.0 }, &p, FamilyDescriptor::Compact { bound: 3.0 });
        assert!((a.act.cdf(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!(a.warnings.is_empty());
        let a = act_of(&ScoringRule::CrpsAlpha { alpha: 3.0 }, &p, FamilyDescriptor::P1);
        assert_eq!(a.warnings.len(), 1);
    }

    #[test]
    fn median_act() {
        let p = Distribution::categorical(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let a = act_of(&ScoringRule::CrpsAlpha { alpha: 0.5 }, &p, FamilyDescriptor::P1);
        assert_eq!(a.act, Distribution::dirac(0.0).unwrap());
        assert!(!a.unique);
        let a = act_of(&ScoringRule::CrpsAlpha { alpha: 1.0 }, &g(2.0, 1.0), FamilyDescriptor::P1);
        assert_eq!(a.act, Distribution::dirac(2.0).unwrap());
        assert!(a.unique);
    }

    #[test]
    fn moment_acts() {
        let a = act_of(&ScoringRule::Pmcc, &g(1.0, 4.0), FamilyDescriptor::P2);
        assert_eq!(a.act, Distribution::dirac(1.0).unwrap());
        let skewed = Distribution::mixture(vec![g(0.0, 1.0), g(3.0, 0.5)], vec![0.8, 0.2]).unwrap();
        let m = skewed.moments();
        let a = act_of(&ScoringRule::TrialScore, &skewed, FamilyDescriptor::P4Plus);
        let am = a.act.moments();
        assert!((am.mean - (m.mean + m.third_central / (2.0 * m.variance))).abs() < 1e-12);
        assert!(!a.unique);
        let a = act_of(&ScoringRule::NormalizedSquaredError, &g(0.0, 1.0), FamilyDescriptor::VarianceCapped { m: 4.0 });
        assert_eq!(a.act, g(0.0, 4.0));
    }

    #[test]
    fn nse_on_p2_has_no_act() {
        let r = bayes_act(&ScoringRule::NormalizedSquaredError, &g(0.0, 1.0), FamilyDescriptor::P2).unwrap();
        let BayesActResult::NoBayesAct(c) = r else { panic!("expected certificate") };
        let vars: Vec<f64> = c.forecasts.iter().map(|f| f.variance()).collect();
        assert_eq!(vars, vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0]);
        assert!(c.is_strictly_decreasing());
    }

    #[test]
    fn linear_score_has_no_act_for_gaussians() {
        let r = bayes_act(&ScoringRule::LinearScore, &g(0.0, 1.0), FamilyDescriptor::P1).unwrap();
        let BayesActResult::NoBayesAct(c) = r else { panic!("expected certificate") };
        assert_eq!(c.forecasts.len(), CERTIFICATE_LEN);
        assert!(c.recheck(&ScoringRule::LinearScore, &g(0.0, 1.0)).unwrap());

        let r = bayes_act(&ScoringRule::ProbabilityScore { c: 0.5 }, &g(1.0, 2.0), FamilyDescriptor::P1).unwrap();
        assert!(matches!(r, BayesActResult::NoBayesAct(_)));
    }

    #[test]
    fn flat_beliefs_have_acts() {
        let u = Distribution::uniform(0.0, 4.0).unwrap();
        let a = act_of(&ScoringRule::LinearScore, &u, FamilyDescriptor::P1);
        assert!(!a.unique);
        let a = act_of(&ScoringRule::ProbabilityScore { c: 0.5 }, &u, FamilyDescriptor::P1);
        assert_eq!(a.act, Distribution::uniform(0.5, 3.5).unwrap());
        let grid = FamilyDescriptor::LebesgueGrid { lo: -5.0, hi: 5.0, cells: 10 };
        let a = act_of(&ScoringRule::LinearScore, &g(0.2, 1.0), grid);
        assert_eq!(a.act, Distribution::uniform(0.0, 1.0).unwrap());
    }

    #[test]
    fn properized_closed_forms() {
        let b = Distribution::bernoulli(0.7).unwrap();
        let s = properized_score(&ScoringRule::MaeBinary, &b, 1.0, FamilyDescriptor::Bernoulli).unwrap();
        assert_eq!(s.value, 0.0);
        let s = properized_score(&ScoringRule::Pmcc, &g(1.0, 4.0), 2.0, FamilyDescriptor::P2).unwrap();
        assert_eq!(s.value, 1.0);
        let s = properized_score(&ScoringRule::TrialScore, &g(0.0, 1.0), 2.0, FamilyDescriptor::P4Plus).unwrap();
        assert_eq!(s.value, 9.0);
    }

    #[test]
    fn properized_score_propagates_missing_act() {
        let e = properized_score(&ScoringRule::LinearScore, &g(0.0, 1.0), 0.0, FamilyDescriptor::P1).unwrap_err();
        assert!(matches!(e, Error::NoBayesAct(_)));
    }

    #[test]
    fn incompatible_families() {
        let b = Distribution::bernoulli(0.3).unwrap();
        assert!(matches!(
            bayes_act(&ScoringRule::Mpr, &b, FamilyDescriptor::P2),
            Err(Error::IncompatibleRule(_))
        ));
        assert!(matches!(
            bayes_act(&ScoringRule::TrialScore, &Distribution::dirac(0.0).unwrap(), FamilyDescriptor::P4Plus),
            Err(Error::IncompatibleRule(_))
        ));
    }
}
