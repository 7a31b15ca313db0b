//! Numerical Bayes acts: exhaustive or local search over a probability
//! simplex for finite outcome spaces, and a nested grid search over
//! (mean, variance) for moment-parameterised families.

use serde::{Deserialize, Serialize};

use super::certificate::variance_sequence;
use super::{BayesAct, BayesActResult};
use crate::distributions::{linspace, Distribution, FamilyDescriptor};
use crate::error::{Error, Result};
use crate::scores::{expected_score, ScoringRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSearchConfig {
    /// Support points of candidate acts (ignored for binary rules).
    pub grid: Vec<f64>,
    /// Probability step of the simplex lattice; also sets the parametric
    /// grid density.
    pub resolution: f64,
    /// Budget of objective evaluations.
    pub max_iters: usize,
    /// Score tolerance for ties and parameter tolerance for stopping.
    pub tolerance: f64,
}

impl Default for SimplexSearchConfig {
    fn default() -> Self {
        Self {
            grid: vec![0.0, 1.0],
            resolution: 0.01,
            max_iters: 1_000_000,
            tolerance: 1e-9,
        }
    }
}

impl SimplexSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "resolution must lie in (0, 1], got {}",
                self.resolution
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    fn steps(&self) -> Result<usize> {
        let n = (1.0 / self.resolution).round();
        if (n * self.resolution - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "resolution {} does not divide 1",
                self.resolution
            )));
        }
        Ok(n as usize)
    }
}

fn objective(rule: &ScoringRule, cand: &Distribution, belief: &Distribution) -> f64 {
    match expected_score(rule, cand, belief) {
        Ok(s) => s.value,
        Err(_) => f64::INFINITY,
    }
}

fn lattice_point(grid: &[f64], counts: &[usize], n: usize) -> Result<Distribution> {
    let (points, probs): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .zip(counts)
        .filter(|(_, k)| **k > 0)
        .map(|(x, k)| (*x, *k as f64 / n as f64))
        .unzip();
    if points.len() == 1 {
        return Distribution::dirac(points[0]);
    }
    let total: f64 = probs.iter().sum();
    Distribution::categorical(points, probs.into_iter().map(|p| p / total).collect())
}

// Number of ways to write n as an ordered sum of k nonnegative parts.
fn compositions(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 1..k {
        c *= (n + i) as f64 / i as f64;
    }
    c
}

fn for_each_composition(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rest: usize, idx: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if idx + 1 == counts.len() {
            counts[idx] = rest;
            f(counts);
            return;
        }
        for c in 0..=rest {
            counts[idx] = c;
            rec(rest - c, idx + 1, counts, f);
        }
    }
    let mut counts = vec![0; k];
    rec(n, 0, &mut counts, f);
}

/// Minimiser of `Q -> S(Q, P)` over distributions on `cfg.grid` whose
/// probabilities are multiples of `cfg.resolution` (Bernoulli forecasts for
/// binary rules). All candidates within `cfg.tolerance` of the best are
/// reported as ties.
pub fn finite_bayes_act(rule: &ScoringRule, p: &Distribution, cfg: &SimplexSearchConfig) -> Result<BayesActResult> {
    cfg.validate()?;
    let n = cfg.steps()?;
    let mut evaluated: Vec<(Distribution, f64)> = Vec::new();

    if rule.is_binary() {
        if n + 1 > cfg.max_iters {
            return Err(Error::BudgetExceeded(cfg.max_iters));
        }
        for k in 0..=n {
            let cand = Distribution::bernoulli(k as f64 / n as f64)?;
            let v = objective(rule, &cand, p);
            evaluated.push((cand, v));
        }
    } else {
        let grid = &cfg.grid;
        if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("search grid must be nonempty and strictly ascending".into()));
        }
        if compositions(n, grid.len()) <= cfg.max_iters as f64 {
            let mut failure = None;
            for_each_composition(n, grid.len(), &mut |counts| {
                if failure.is_some() {
                    return;
                }
                match lattice_point(grid, counts, n) {
                    Ok(cand) => {
                        let v = objective(rule, &cand, p);
                        evaluated.push((cand, v));
                    }
                    Err(e) => failure = Some(e),
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        } else {
            return local_simplex_search(rule, p, cfg, n);
        }
    }

    let best = evaluated.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::IncompatibleRule(format!("{rule} is infinite on every candidate")));
    }
    let mut ties: Vec<(Distribution, f64)> = evaluated.into_iter().filter(|(_, v)| *v <= best + cfg.tolerance).collect();
    let first = ties
        .iter()
        .position(|(_, v)| *v == best)
        .expect("best is attained");
    let (act, _) = ties.remove(first);
    Ok(BayesActResult::Act(BayesAct {
        act,
        unique: ties.is_empty(),
        warnings: Vec::new(),
        ties: ties.into_iter().map(|(d, _)| d).collect(),
    }))
}

fn local_simplex_search(
    rule: &ScoringRule,
    p: &Distribution,
    cfg: &SimplexSearchConfig,
    n: usize,
) -> Result<BayesActResult> {
    let grid = &cfg.grid;
    let k = grid.len();
    let mut counts = vec![n / k; k];
    for c in counts.iter_mut().take(n % k) {
        *c += 1;
    }
    let mut current = objective(rule, &lattice_point(grid, &counts, n)?, p);
    let mut evals = 1usize;
    loop {
        let mut best_move = None;
        let mut best_val = current;
        for from in 0..k {
            if counts[from] == 0 {
                continue;
            }
            for to in 0..k {
                if to == from {
                    continue;
                }
                counts[from] -= 1;
                counts[to] += 1;
                let v = objective(rule, &lattice_point(grid, &counts, n)?, p);
                counts[to] -= 1;
                counts[from] += 1;
                evals += 1;
                if evals > cfg.max_iters {
                    return Err(Error::BudgetExceeded(cfg.max_iters));
                }
                if v < best_val - cfg.tolerance {
                    best_val = v;
                    best_move = Some((from, to));
                }
            }
        }
        match best_move {
            Some((from, to)) => {
                counts[from] -= 1;
                counts[to] += 1;
                current = best_val;
            }
            None => break,
        }
    }
    Ok(BayesActResult::Act(BayesAct {
        act: lattice_point(grid, &counts, n)?,
        unique: false,
        warnings: vec!["local search over the simplex; the minimiser may not be global".into()],
        ties: Vec::new(),
    }))
}

/// Nested grid search for the Bayes act over Gaussians `N(m, v)` (and point
/// masses at `v = 0` where the family allows them). Each round evaluates a
/// `G x G` grid, `G = round(1 / resolution) + 1` clamped to `[5, 201]`, then
/// zooms to two steps around the best point.
///
/// If the optimum runs into the open upper end of the variance range, a
/// coercivity probe doubles the variance; strict descent along the probe is
/// returned as a certificate. Optima at zero variance become point masses,
/// or a variance-halving certificate when the family excludes them.
pub fn parametric_bayes_act(
    rule: &ScoringRule,
    p: &Distribution,
    family: FamilyDescriptor,
    cfg: &SimplexSearchConfig,
) -> Result<BayesActResult> {
    cfg.validate()?;
    family.validate()?;
    let (allow_point, cap) = match family {
        FamilyDescriptor::P1 | FamilyDescriptor::P2 => (true, None),
        FamilyDescriptor::P4Plus => (false, None),
        FamilyDescriptor::VarianceCapped { m } => (true, Some(m)),
        other => {
            return Err(Error::IncompatibleRule(format!(
                "parametric search needs a moment-parameterised family, got {other}"
            )))
        }
    };
    if rule.is_binary() {
        return Err(Error::IncompatibleRule(format!("{rule} is binary")));
    }
    let pm = p.moments();
    let scale = pm.variance.sqrt().max(1.0);
    let g = ((1.0 / cfg.resolution).round() as usize + 1).clamp(5, 201);
    let stop = cfg.tolerance / 10.0;

    let eval = |m: f64, v: f64| -> f64 {
        if v < 0.0 {
            return f64::INFINITY;
        }
        let cand = if v == 0.0 {
            if !allow_point {
                return f64::INFINITY;
            }
            Distribution::dirac(m)
        } else {
            Distribution::gaussian(m, v)
        };
        match cand {
            Ok(c) => objective(rule, &c, p),
            Err(_) => f64::INFINITY,
        }
    };

    let mut global_m = (pm.mean - 4.0 * scale, pm.mean + 4.0 * scale);
    let mut global_v_hi = cap.unwrap_or(4.0 * pm.variance.max(1.0));
    let mut box_m = global_m;
    let mut box_v = (0.0, global_v_hi);
    let mut evals = 0usize;
    let mut expansions = 0usize;

    loop {
        let ms = linspace(box_m.0, box_m.1, g);
        let vs = linspace(box_v.0, box_v.1, g);
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (j, &v) in vs.iter().enumerate() {
            for (i, &m) in ms.iter().enumerate() {
                let f = eval(m, v);
                if f < best.2 {
                    best = (i, j, f);
                }
            }
        }
        evals += g * g;
        if evals > cfg.max_iters {
            return Err(Error::BudgetExceeded(cfg.max_iters));
        }
        let (i, j, fbest) = best;
        if !fbest.is_finite() {
            return Err(Error::IncompatibleRule(format!("{rule} is infinite on every candidate")));
        }
        let (m_star, v_star) = (ms[i], vs[j]);
        let dm = ms[1] - ms[0];
        let dv = vs[1] - vs[0];

        let at_mean_edge = (i == 0 && box_m.0 <= global_m.0) || (i == g - 1 && box_m.1 >= global_m.1);
        let at_var_top = j == g - 1 && box_v.1 >= global_v_hi && cap.is_none();
        if at_mean_edge || at_var_top {
            expansions += 1;
            if at_var_top {
                if let Some(c) = variance_sequence(rule, p, m_star, v_star, 2.0, "variance doubling (coercivity probe)")? {
                    return Ok(BayesActResult::NoBayesAct(c));
                }
                global_v_hi *= 4.0;
            }
            if at_mean_edge {
                let half = 0.5 * (global_m.1 - global_m.0);
                global_m = (m_star - half, m_star + half);
            }
            if expansions > 20 {
                return Err(Error::BudgetExceeded(evals));
            }
            box_m = global_m;
            box_v = (0.0, global_v_hi);
            continue;
        }

        if dm < stop && dv < stop {
            if v_star == 0.0 {
                return Ok(BayesActResult::Act(BayesAct {
                    act: Distribution::dirac(m_star)?,
                    unique: true,
                    warnings: Vec::new(),
                    ties: Vec::new(),
                }));
            }
            if !allow_point && j <= 1 && box_v.0 <= dv {
                let v0 = pm.variance.max(1e-2);
                return match variance_sequence(rule, p, m_star, v0, 0.5, "variance halving towards a point mass outside the family")? {
                    Some(c) => Ok(BayesActResult::NoBayesAct(c)),
                    None => Err(Error::IncompatibleRule(format!("no descent found for {rule}"))),
                };
            }
            return Ok(BayesActResult::Act(BayesAct {
                act: Distribution::gaussian(m_star, v_star)?,
                unique: false,
                warnings: Vec::new(),
                ties: Vec::new(),
            }));
        }
        let v_limit = cap.unwrap_or(global_v_hi);
        box_m = (m_star - 2.0 * dm, m_star + 2.0 * dm);
        box_v = ((v_star - 2.0 * dv).max(0.0), (v_star + 2.0 * dv).min(v_limit));
    }
}
