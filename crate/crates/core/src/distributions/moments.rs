use serde::{Deserialize, Serialize};

use super::{normal, Distribution};

/// Mean, variance and third central moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub third_central: f64,
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

// E[(d + U)^k] given the moments `centred[j] = E[U^j]`.
fn shifted(d: f64, centred: impl Fn(u32) -> f64, k: u32) -> f64 {
    (0..=k)
        .map(|j| binom(k, j) * d.powi((k - j) as i32) * centred(j))
        .sum()
}

fn std_normal_moment(j: u32) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    (1..j).step_by(2).map(f64::from).product()
}

fn symmetric_uniform_moment(r: f64, j: u32) -> f64 {
    if j % 2 == 1 {
        0.0
    } else {
        r.powi(j as i32) / f64::from(j + 1)
    }
}

impl Distribution {
    /// `E[(X - c)^k]`.
    pub fn moment_about(&self, c: f64, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match self {
            Self::Bernoulli { p } => (1.0 - p) * (-c).powi(k as i32) + p * (1.0 - c).powi(k as i32),
            Self::Dirac { x } => (x - c).powi(k as i32),
            Self::Categorical { points, probs } => points
                .iter()
                .zip(probs)
                .map(|(x, w)| w * (x - c).powi(k as i32))
                .sum(),
            Self::Gaussian { mu, sigma2 } => {
                let s = sigma2.sqrt();
                shifted(mu - c, |j| s.powi(j as i32) * std_normal_moment(j), k)
            }
            Self::Uniform { a, b } => {
                let r = 0.5 * (b - a);
                shifted(0.5 * (a + b) - c, |j| symmetric_uniform_moment(r, j), k)
            }
            Self::Mixture {
                weights,
                components,
            } => weights
                .iter()
                .zip(components)
                .map(|(w, d)| w * d.moment_about(c, k))
                .sum(),
            Self::GridCdf { grid, cdf } => {
                let mut total = cdf[0] * (grid[0] - c).powi(k as i32);
                for i in 0..grid.len() - 1 {
                    let m = cdf[i + 1] - cdf[i];
                    if m > 0.0 {
                        let r = 0.5 * (grid[i + 1] - grid[i]);
                        let mid = 0.5 * (grid[i] + grid[i + 1]);
                        total += m * shifted(mid - c, |j| symmetric_uniform_moment(r, j), k);
                    }
                }
                total
            }
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                let s = sigma2.sqrt();
                let a = (c - mu) / s;
                let al = lo.map_or(f64::NEG_INFINITY, |l| (l - mu) / s);
                let be = hi.map_or(f64::INFINITY, |h| (h - mu) / s);
                let z = self.truncation_mass();
                let edge = |t: f64, j: i32| {
                    if t.is_infinite() {
                        0.0
                    } else {
                        (t - a).powi(j) * normal::pdf(t)
                    }
                };
                // n_j = E[(Z - a)^j] for the truncated standard normal Z, by
                // integrating (z - a)^(j-1) z phi(z) by parts.
                let mut n = vec![1.0; k as usize + 1];
                for j in 1..=k as usize {
                    let prev2 = if j >= 2 { n[j - 2] } else { 0.0 };
                    let boundary = (edge(al, j as i32 - 1) - edge(be, j as i32 - 1)) / z;
                    n[j] = (j as f64 - 1.0) * prev2 - a * n[j - 1] + boundary;
                }
                s.powi(k as i32) * n[k as usize]
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Dirac { x } => *x,
            Self::Gaussian { mu, .. } => *mu,
            _ => self.moment_about(0.0, 1),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Dirac { .. } => 0.0,
            Self::Gaussian { sigma2, .. } => *sigma2,
            _ => self.moment_about(self.mean(), 2).max(0.0),
        }
    }

    pub fn moments(&self) -> Moments {
        let mean = self.mean();
        match self {
            Self::Dirac { .. } => Moments {
                mean,
                variance: 0.0,
                third_central: 0.0,
            },
            Self::Gaussian { sigma2, .. } => Moments {
                mean,
                variance: *sigma2,
                third_central: 0.0,
            },
            _ => Moments {
                mean,
                variance: self.moment_about(mean, 2).max(0.0),
                third_central: self.moment_about(mean, 3),
            },
        }
    }
}
