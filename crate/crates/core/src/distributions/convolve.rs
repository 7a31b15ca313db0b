use rayon::prelude::*;

use super::{Distribution, TAIL_MASS};
use crate::error::{Error, Result};
use crate::quad::Quadrature;

/// Knots used for numeric convolution results.
pub const CONVOLUTION_KNOTS: usize = 2001;

const KNOT_TOL: f64 = 1e-10;

/// Evenly spaced knots from `lo` to `hi` inclusive, computed without
/// accumulating rounding error.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / last)
            }
        })
        .collect()
}

impl Distribution {
    /// Distribution of `X + E` for independent `X ~ self` and `E ~ noise`.
    ///
    /// Exact when either factor is atomic, both are Gaussian, or a mixture
    /// reduces to such cases; otherwise a grid CDF whose knot values are
    /// `integral of cdf(self, x - e) dnoise(e)` to within `1e-10`.
    pub fn convolve(&self, noise: &Distribution) -> Result<Distribution> {
        use Distribution as D;
        match (self, noise) {
            (D::Dirac { x }, other) | (other, D::Dirac { x }) => Ok(other.shift(*x)),
            (D::Gaussian { mu: m1, sigma2: v1 }, D::Gaussian { mu: m2, sigma2: v2 }) => {
                D::gaussian(m1 + m2, v1 + v2)
            }
            (
                D::Mixture {
                    weights,
                    components,
                },
                other,
            )
            | (
                other,
                D::Mixture {
                    weights,
                    components,
                },
            ) => {
                let parts = components
                    .iter()
                    .map(|c| c.convolve(other))
                    .collect::<Result<Vec<_>>>()?;
                D::mixture(parts, weights.clone())
            }
            (a, b) if a.is_atomic() || b.is_atomic() => {
                let (atomic, other) = if a.is_atomic() { (a, b) } else { (b, a) };
                let (locs, masses): (Vec<f64>, Vec<f64>) = atomic.atoms().into_iter().unzip();
                let parts = locs.iter().map(|x| other.shift(*x)).collect();
                D::mixture_normalized(parts, masses)
            }
            (a, b) => {
                let (lo_a, hi_a) = a.support_bounds(KNOT_TOL * 0.05);
                let (lo_b, hi_b) = b.support_bounds(KNOT_TOL * 0.05);
                let grid = linspace(lo_a + lo_b, hi_a + hi_b, CONVOLUTION_KNOTS);
                a.convolve_on_grid(b, &grid)
            }
        }
    }

    /// Numeric convolution evaluated at the given knots.
    pub fn convolve_on_grid(&self, noise: &Distribution, grid: &[f64]) -> Result<Distribution> {
        // Integrate the CDF of one factor against the density of the other.
        let (stepped, smooth) = if noise.has_density() {
            (self, noise)
        } else if self.has_density() {
            (noise, self)
        } else {
            return Err(Error::InvalidDistribution(
                "numeric convolution needs a factor with a density".into(),
            ));
        };
        let quad = Quadrature::with_tol(KNOT_TOL);
        let (lo, hi) = smooth.support_bounds(1e-13);
        let smooth_breaks = smooth.breakpoints();
        let stepped_breaks = stepped.breakpoints();

        let values = grid
            .par_iter()
            .map(|&x| {
                let mut breaks = smooth_breaks.clone();
                breaks.extend(stepped_breaks.iter().map(|b| x - b));
                quad.integrate_with_breaks(
                    |e| stepped.cdf(x - e) * smooth.pdf(e).unwrap_or(0.0),
                    lo,
                    hi,
                    &breaks,
                )
                .map_err(Error::from)
            })
            .collect::<Result<Vec<f64>>>()?;

        let mut cdf = Vec::with_capacity(values.len());
        let mut running: f64 = 0.0;
        for v in values {
            running = running.max(v.clamp(0.0, 1.0));
            cdf.push(running);
        }
        let last = *cdf.last().expect("nonempty grid");
        if cdf[0] > TAIL_MASS || 1.0 - last > TAIL_MASS {
            return Err(Error::UnboundedSupport(format!(
                "grid [{}, {}] leaves {:e} mass outside",
                grid[0],
                grid[grid.len() - 1],
                cdf[0] + (1.0 - last)
            )));
        }
        *cdf.last_mut().expect("nonempty grid") = 1.0;
        Distribution::grid_cdf(grid.to_vec(), cdf)
    }

    /// Grid CDF agreeing with `self` at every knot. The last knot is set to
    /// exactly 1.
    pub fn discretize(&self, grid: &[f64]) -> Result<Distribution> {
        if grid.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least two knots".into()));
        }
        let below = self.cdf_left(grid[0]);
        let above = 1.0 - self.cdf(grid[grid.len() - 1]);
        if below > TAIL_MASS || above > TAIL_MASS {
            return Err(Error::UnboundedSupport(format!(
                "grid [{}, {}] leaves {:e} mass outside",
                grid[0],
                grid[grid.len() - 1],
                below + above
            )));
        }
        let mut cdf: Vec<f64> = grid.iter().map(|x| self.cdf(*x)).collect();
        *cdf.last_mut().expect("nonempty") = 1.0;
        Distribution::grid_cdf(grid.to_vec(), cdf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closure() {
        let a = Distribution::gaussian(0.0, 1.0).unwrap();
        let b = Distribution::gaussian(1.0, 2.0).unwrap();
        assert_eq!(a.convolve(&b).unwrap(), Distribution::gaussian(1.0, 3.0).unwrap());
    }

    #[test]
    fn dirac_shifts() {
        let phi = Distribution::uniform(-1.0, 1.0).unwrap();
        let c = Distribution::dirac(2.5).unwrap();
        assert_eq!(c.convolve(&phi).unwrap(), Distribution::uniform(1.5, 3.5).unwrap());
    }

    #[test]
    fn uniform_triangle() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let t = u.convolve(&u).unwrap();
        assert!((t.cdf(1.0) - 0.5).abs() < 1e-9);
        // Triangle CDF: x^2/2 on [0,1], 1 - (2-x)^2/2 on [1,2].
        for &x in &[0.25, 0.5, 1.5, 1.9] {
            let exact = if x <= 1.0 { x * x / 2.0 } else { 1.0 - (2.0 - x) * (2.0 - x) / 2.0 };
            assert!((t.cdf(x) - exact).abs() < 1e-6, "x={x}");
        }
        assert!((t.mean() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mean_adds_for_numeric_convolution() {
        let p = Distribution::mixture(
            vec![
                Distribution::gaussian(-1.0, 0.5).unwrap(),
                Distribution::uniform(0.0, 3.0).unwrap(),
            ],
            vec![0.4, 0.6],
        )
        .unwrap();
        let phi = Distribution::uniform(-0.5, 1.5).unwrap();
        let c = p.convolve(&phi).unwrap();
        assert!((c.mean() - (p.mean() + phi.mean())).abs() < 1e-8);
    }

    #[test]
    fn discretize_examples() {
        let g = Distribution::gaussian(0.0, 1.0).unwrap();
        let grid = linspace(-8.0, 8.0, 1601);
        let d = g.discretize(&grid).unwrap();
        assert_eq!(d.cdf(0.0), 0.5);

        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let d = u.discretize(&[-1.0, -0.5, 0.0, 0.5, 1.0, 1.5]).unwrap();
        match &d {
            Distribution::GridCdf { cdf, .. } => assert_eq!(cdf, &vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0]),
            _ => unreachable!(),
        }

        let dirac = Distribution::dirac(0.0).unwrap();
        let d = dirac.discretize(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.cdf(0.0), 1.0);

        assert!(matches!(g.discretize(&[-1.0, 1.0]), Err(Error::UnboundedSupport(_))));
    }
}
