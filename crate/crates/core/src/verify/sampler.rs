use rand::Rng;

use crate::distributions::{Distribution, FamilyDescriptor};
use crate::error::Result;

/// Draws forecast/truth pairs from fixed parameter boxes:
///
/// * Bernoulli: `p ~ U[0, 1]`.
/// * Moment families: Gaussians with `mu ~ U[-5, 5]` and
///   `sigma2 ~ U[0.1, 10]` (capped at `m` for variance-capped families),
///   or with probability 0.3 a mixture of two or three such Gaussians.
/// * Compact and grid families: uniforms inside the allowed interval, or
///   two-uniform mixtures with probability 0.3.
///
/// Even-indexed pairs are independent draws. Odd-indexed pairs draw the
/// truth `Q` and set `P` to a perturbation of `Q` of log-uniform size in
/// `[1e-3, 1]`, so near-diagonal violations are probed too.
#[derive(Debug, Clone, Copy)]
pub struct PairSampler {
    family: FamilyDescriptor,
}

const MIXTURE_PROB: f64 = 0.3;

impl PairSampler {
    pub fn new(family: FamilyDescriptor) -> Self {
        Self { family }
    }

    pub fn family(&self) -> FamilyDescriptor {
        self.family
    }

    fn variance_range(&self) -> (f64, f64) {
        match self.family {
            FamilyDescriptor::VarianceCapped { m } => ((0.1f64).min(m / 10.0), m.min(10.0)),
            _ => (0.1, 10.0),
        }
    }

    fn interval(&self) -> (f64, f64) {
        match self.family {
            FamilyDescriptor::Compact { bound } => (-bound, bound),
            FamilyDescriptor::LebesgueGrid { lo, hi, .. } => (lo, hi),
            _ => (-5.0, 5.0),
        }
    }

    fn gaussian<R: Rng>(&self, rng: &mut R) -> Result<Distribution> {
        let (vl, vh) = self.variance_range();
        Distribution::gaussian(rng.gen_range(-5.0..=5.0), rng.gen_range(vl..=vh))
    }

    fn uniform<R: Rng>(&self, rng: &mut R) -> Result<Distribution> {
        let (lo, hi) = self.interval();
        let min_width = 0.05 * (hi - lo);
        let a = rng.gen_range(lo..=hi - min_width);
        let b = rng.gen_range(a + min_width..=hi);
        Distribution::uniform(a, b)
    }

    fn weights<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..=1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / s).collect()
    }

    /// One distribution from the family's parameter box.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<Distribution> {
        match self.family {
            FamilyDescriptor::Bernoulli => Distribution::bernoulli(rng.gen_range(0.0..=1.0)),
            FamilyDescriptor::VarianceCapped { .. } => self.gaussian(rng),
            FamilyDescriptor::P1 | FamilyDescriptor::P2 | FamilyDescriptor::P4Plus => {
                if rng.gen_bool(MIXTURE_PROB) {
                    let k = rng.gen_range(2..=3);
                    let comps = (0..k).map(|_| self.gaussian(rng)).collect::<Result<Vec<_>>>()?;
                    Distribution::mixture_normalized(comps, Self::weights(k, rng))
                } else {
                    self.gaussian(rng)
                }
            }
            FamilyDescriptor::Compact { .. } | FamilyDescriptor::LebesgueGrid { .. } => {
                if rng.gen_bool(MIXTURE_PROB) {
                    let comps = vec![self.uniform(rng)?, self.uniform(rng)?];
                    Distribution::mixture_normalized(comps, Self::weights(2, rng))
                } else {
                    self.uniform(rng)
                }
            }
        }
    }

    /// A nearby member of the family; `delta` sets the relative size.
    pub fn perturb<R: Rng>(&self, d: &Distribution, delta: f64, rng: &mut R) -> Result<Distribution> {
        let mut jitter = || rng.gen_range(-1.0..=1.0) * delta;
        match d {
            Distribution::Bernoulli { p } => Distribution::bernoulli((p + jitter()).clamp(0.0, 1.0)),
            Distribution::Gaussian { mu, sigma2 } => {
                let (_, vh) = self.variance_range();
                let s = sigma2.sqrt();
                let mut v = sigma2 * jitter().exp();
                if matches!(self.family, FamilyDescriptor::VarianceCapped { .. }) {
                    v = v.min(vh);
                }
                Distribution::gaussian(mu + s * jitter(), v)
            }
            Distribution::Uniform { a, b } => {
                let (lo, hi) = self.interval();
                let w = b - a;
                let mut na = (a + 0.5 * w * jitter()).clamp(lo, hi);
                let mut nb = (b + 0.5 * w * jitter()).clamp(lo, hi);
                if nb - na < 1e-3 * w {
                    na = *a;
                    nb = *b;
                }
                Distribution::uniform(na, nb)
            }
            Distribution::Mixture { weights, components } => {
                let comps = components
                    .iter()
                    .map(|c| self.perturb(c, delta, rng))
                    .collect::<Result<Vec<_>>>()?;
                let ws: Vec<f64> = weights.iter().map(|w| w * (rng.gen_range(-1.0..=1.0) * delta).exp()).collect();
                Distribution::mixture_normalized(comps, ws)
            }
            other => Ok(other.clone()),
        }
    }

    /// The `index`-th pair `(P, Q)`; callers draw pairs in index order.
    pub fn pair<R: Rng>(&self, index: usize, rng: &mut R) -> Result<(Distribution, Distribution)> {
        if index.is_multiple_of(2) {
            let p = self.draw(rng)?;
            let q = self.draw(rng)?;
            Ok((p, q))
        } else {
            let q = self.draw(rng)?;
            let delta = 10f64.powf(rng.gen_range(-3.0..=0.0));
            let p = self.perturb(&q, delta, rng)?;
            Ok((p, q))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_stay_in_family() {
        let families = [
            FamilyDescriptor::Bernoulli,
            FamilyDescriptor::P2,
            FamilyDescriptor::P4Plus,
            FamilyDescriptor::VarianceCapped { m: 2.0 },
            FamilyDescriptor::Compact { bound: 3.0 },
            FamilyDescriptor::LebesgueGrid { lo: -2.0, hi: 2.0, cells: 8 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in families {
            let s = PairSampler::new(f);
            for i in 0..200 {
                let (p, q) = s.pair(i, &mut rng).unwrap();
                assert!(f.contains(&p), "{f}: {p:?} {:?}", p.support_bounds(0.0));
                assert!(f.contains(&q), "{f}: {q}");
            }
        }
    }

    #[test]
    fn reproducible() {
        let s = PairSampler::new(FamilyDescriptor::P2);
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            (0..10).map(|i| s.pair(i, &mut rng).unwrap()).collect()
        };
        let b: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            (0..10).map(|i| s.pair(i, &mut rng).unwrap()).collect()
        };
        assert_eq!(a, b);
    }
}
