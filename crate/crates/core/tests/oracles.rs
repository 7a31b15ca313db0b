//! Library results against independent reference computations done here
//! with plain composite Simpson rules and brute-force searches.

use properization::properize::{bayes_act, crps_alpha_act_value, properized_score};
use properization::verify::linear_score_descent;
use properization::{expected_score, score, Distribution, FamilyDescriptor, ScoringRule, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn std_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn std_cdf(z: f64) -> f64 {
    if z < 0.0 {
        simpson(std_pdf, -40.0, z, 4000)
    } else {
        1.0 - simpson(std_pdf, z, 40.0, 4000)
    }
}

fn g(mu: f64, s2: f64) -> Distribution {
    Distribution::gaussian(mu, s2).unwrap()
}

fn mixture(parts: &[(f64, f64, f64)]) -> Distribution {
    let comps = parts.iter().map(|&(_, m, v)| g(m, v)).collect();
    let ws = parts.iter().map(|&(w, _, _)| w).collect();
    Distribution::mixture_normalized(comps, ws).unwrap()
}

/// Mean, variance and third central moment of a density by quadrature.
fn numeric_moments(pdf: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    let n = 20000;
    let mean = simpson(|x| x * pdf(x), lo, hi, n);
    let var = simpson(|x| (x - mean).powi(2) * pdf(x), lo, hi, n);
    let third = simpson(|x| (x - mean).powi(3) * pdf(x), lo, hi, n);
    (mean, var, third)
}

#[test]
fn gaussian_crps_closed_form() {
    for &(mu, s2, y) in &[(0.0, 1.0, 0.0), (1.0, 4.0, -2.5), (-3.0, 0.25, -2.9), (2.0, 9.0, 10.0)] {
        let s = f64::sqrt(s2);
        let z = (y - mu) / s;
        let oracle = s * (z * (2.0 * std_cdf(z) - 1.0) + 2.0 * std_pdf(z) - 1.0 / std::f64::consts::PI.sqrt());
        let got = score(&ScoringRule::crps(), &g(mu, s2), y).unwrap().value;
        assert!((got - oracle).abs() < 1e-7, "{mu} {s2} {y}: {got} vs {oracle}");
    }
}

#[test]
fn crps_alpha_map_matches_pointwise_minimiser() {
    for alpha in [1.5, 2.0, 3.0] {
        for k in 1..=9 {
            let f = k as f64 / 10.0;
            let objective = |q: f64| f * (1.0 - q).powf(alpha) + (1.0 - f) * q.powf(alpha);
            // Coarse scan then golden section.
            let best = (0..=10_000).map(|i| i as f64 / 10_000.0).min_by(|a, b| objective(*a).total_cmp(&objective(*b))).unwrap();
            let (mut a, mut b) = ((best - 1e-4).max(0.0), (best + 1e-4).min(1.0));
            let r = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..100 {
                let (c, d) = (b - r * (b - a), a + r * (b - a));
                if objective(c) < objective(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let brute = 0.5 * (a + b);
            let got = crps_alpha_act_value(alpha, f);
            assert!((got - brute).abs() < 1e-5, "alpha {alpha} F {f}: {got} vs {brute}");
        }
    }
}

#[test]
fn expected_scores_match_direct_integration() {
    let p = mixture(&[(0.6, -0.5, 1.2), (0.4, 1.5, 0.6)]);
    let q = g(0.3, 1.7);
    let rules = [
        ScoringRule::LogScore,
        ScoringRule::crps(),
        ScoringRule::CrpsAlpha { alpha: 1.5 },
        ScoringRule::CrpsAlpha { alpha: 0.7 },
        ScoringRule::LinearScore,
        ScoringRule::ProbabilityScore { c: 0.5 },
        ScoringRule::TrialScore,
        ScoringRule::SpreadError,
        ScoringRule::Pmcc,
        ScoringRule::SquaredError,
        ScoringRule::NormalizedSquaredError,
    ];
    let s = 1.7f64.sqrt();
    for rule in rules {
        let oracle = simpson(
            |y| score(&rule, &p, y).unwrap().value * q.pdf(y).unwrap(),
            0.3 - 12.0 * s,
            0.3 + 12.0 * s,
            4000,
        );
        let got = expected_score(&rule, &p, &q).unwrap().value;
        assert!((got - oracle).abs() < 1e-6 * oracle.abs().max(1.0), "{rule}: {got} vs {oracle}");
    }
}

#[test]
fn binary_finite_sums() {
    let q = Distribution::bernoulli(0.7).unwrap();
    let sure = Distribution::bernoulli(1.0).unwrap();
    let truth = expected_score(&ScoringRule::MaeBinary, &q, &q).unwrap().value;
    let other = expected_score(&ScoringRule::MaeBinary, &sure, &q).unwrap().value;
    assert!((truth - 2.0 * 0.7 * 0.3).abs() < 1e-15);
    assert!((other - 0.3).abs() < 1e-15);
}

#[test]
fn trial_score_act_shifts_mean_and_inflates_variance() {
    let p = mixture(&[(0.7, 0.0, 1.0), (0.3, 2.5, 0.5)]);
    let (mu, s2, gamma) = numeric_moments(|x| p.pdf(x).unwrap(), -15.0, 15.0);
    let act = bayes_act(&ScoringRule::TrialScore, &p, FamilyDescriptor::P4Plus)
        .unwrap()
        .into_act()
        .unwrap()
        .act;
    let Distribution::Gaussian { mu: m, sigma2: v } = act else {
        panic!("expected a Gaussian act, got {act}");
    };
    assert!((m - (mu + gamma / (2.0 * s2))).abs() < 1e-8);
    assert!((v - s2 * (1.0 + gamma * gamma / (4.0 * s2.powi(3)))).abs() < 1e-8);
}

#[test]
fn properized_trial_score_is_spread_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let parts: Vec<(f64, f64, f64)> = (0..2)
            .map(|_| (rng.gen_range(0.2..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.2..3.0)))
            .collect();
        let p = mixture(&parts);
        let y = rng.gen_range(-6.0..6.0);
        let (mu, s2, gamma) = numeric_moments(|x| p.pdf(x).unwrap(), -20.0, 20.0);
        let d = y - mu;
        let oracle = (s2 - d * d + d * gamma / s2).powi(2);
        let got = properized_score(&ScoringRule::TrialScore, &p, y, FamilyDescriptor::P4Plus).unwrap().value;
        assert!((got - oracle).abs() < 1e-8 * oracle.max(1.0), "{got} vs {oracle}");
    }
}

#[test]
fn weighted_act_is_the_conditional_density() {
    let rule = ScoringRule::Weighted {
        base: Box::new(ScoringRule::LogScore),
        weight: WeightSpec::IndicatorAbove { r: 0.4 },
    };
    let (mu, s2) = (0.1, 2.0);
    let p = g(mu, s2);
    let act = bayes_act(&rule, &p, FamilyDescriptor::P2).unwrap().into_act().unwrap().act;
    let mass = 1.0 - std_cdf((0.4 - mu) / s2.sqrt());
    for i in 0..200 {
        let x = -3.0 + 0.05 * i as f64;
        let w = if x > 0.4 { 1.0 } else { 0.0 };
        let oracle = w * p.pdf(x).unwrap() / mass;
        let got = act.pdf(x).unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle.max(1.0), "{x}: {got} vs {oracle}");
    }
}

#[test]
fn noisy_crps_act_is_smoothed_belief() {
    let noise = g(0.0, 0.3);
    let rule = ScoringRule::NoisyCrps { noise };
    let act = bayes_act(&rule, &g(1.0, 2.0), FamilyDescriptor::P1).unwrap().into_act().unwrap().act;
    for x in [-3.0, 0.0, 1.0, 2.5, 5.0] {
        let oracle = std_cdf((x - 1.0) / 2.3f64.sqrt());
        assert!((act.cdf(x) - oracle).abs() < 1e-9);
    }
}

#[test]
fn low_exponent_act_is_the_median() {
    let p = mixture(&[(0.5, -2.0, 1.0), (0.3, 1.0, 0.5), (0.2, 4.0, 2.0)]);
    let (mut lo, mut hi) = (-20.0, 20.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p.cdf(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for alpha in [0.5, 1.0] {
        let a = bayes_act(&ScoringRule::CrpsAlpha { alpha }, &p, FamilyDescriptor::P1)
            .unwrap()
            .into_act()
            .unwrap();
        let Distribution::Dirac { x } = a.act else {
            panic!("expected a point mass, got {}", a.act);
        };
        assert!((x - hi).abs() < 1e-9);
        assert!(a.unique);
    }
}

#[test]
fn first_descent_score_is_minus_squared_density_integral() {
    let s2: f64 = 2.5;
    let d = linear_score_descent(&g(0.7, s2), 0.4, 4).unwrap();
    let oracle = -1.0 / (2.0 * (std::f64::consts::PI * s2).sqrt());
    assert!((d.sequence[0].expected_score - oracle).abs() < 1e-9);
    for step in &d.sequence[1..] {
        // The shifted densities jump at the interval edges, so integrate
        // between consecutive edges, staying just inside each piece.
        let mut knots = vec![-20.0];
        knots.extend(step.forecast.breakpoints().into_iter().filter(|b| b.abs() < 20.0));
        knots.push(20.0);
        let direct: f64 = -knots
            .windows(2)
            .map(|w| simpson(|x| step.forecast.pdf(x).unwrap() * g(0.7, s2).pdf(x).unwrap(), w[0] + 1e-10, w[1] - 1e-10, 2000))
            .sum::<f64>();
        assert!((step.expected_score - direct).abs() < 1e-7, "{} vs {direct}", step.expected_score);
    }
}
