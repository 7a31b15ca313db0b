//! Probability distributions on the binary space `{0, 1}` and the real line.
//!
//! A [`Distribution`] is an immutable tagged value. Every variant exposes
//! its CDF; variants with a Lebesgue density also expose `pdf`. Mixtures are
//! flattened at construction so quadrature never recurses through nested
//! mixtures.
//!
//! Values should be built with the checked constructors
//! ([`Distribution::gaussian`], [`Distribution::mixture`], ...) or parsed
//! from JSON, both of which enforce the variant invariants.

mod convolve;
mod family;
mod moments;
pub(crate) mod normal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use convolve::{linspace, CONVOLUTION_KNOTS};
pub use family::FamilyDescriptor;
pub use moments::Moments;

/// Probability mass tolerated outside a numeric grid.
pub const TAIL_MASS: f64 = 1e-10;

/// Weights and categorical probabilities must sum to one within this.
const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    deny_unknown_fields,
    try_from = "Literal"
)]
pub enum Distribution {
    Bernoulli {
        p: f64,
    },
    Dirac {
        x: f64,
    },
    Categorical {
        points: Vec<f64>,
        probs: Vec<f64>,
    },
    Gaussian {
        mu: f64,
        sigma2: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<Distribution>,
    },
    /// Piecewise-linear CDF through `(grid[i], cdf[i])`. A positive
    /// `cdf[0]` is an atom at `grid[0]`.
    GridCdf {
        grid: Vec<f64>,
        cdf: Vec<f64>,
    },
    /// Gaussian conditioned on `(lo, hi]`; `None` is an infinite endpoint.
    TruncatedGaussian {
        mu: f64,
        sigma2: f64,
        lo: Option<f64>,
        hi: Option<f64>,
    },
}

/// Wire shape of [`Distribution`]; converted through the checked constructors.
#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum Literal {
    Bernoulli {
        p: f64,
    },
    Dirac {
        x: f64,
    },
    Categorical {
        points: Vec<f64>,
        probs: Vec<f64>,
    },
    Gaussian {
        mu: f64,
        sigma2: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<Distribution>,
    },
    GridCdf {
        grid: Vec<f64>,
        cdf: Vec<f64>,
    },
    TruncatedGaussian {
        mu: f64,
        sigma2: f64,
        #[serde(default)]
        lo: Option<f64>,
        #[serde(default)]
        hi: Option<f64>,
    },
}

impl TryFrom<Literal> for Distribution {
    type Error = Error;

    fn try_from(lit: Literal) -> Result<Self> {
        match lit {
            Literal::Bernoulli { p } => Distribution::bernoulli(p),
            Literal::Dirac { x } => Distribution::dirac(x),
            Literal::Categorical { points, probs } => Distribution::categorical(points, probs),
            Literal::Gaussian { mu, sigma2 } => Distribution::gaussian(mu, sigma2),
            Literal::Uniform { a, b } => Distribution::uniform(a, b),
            Literal::Mixture {
                weights,
                components,
            } => Distribution::mixture(components, weights),
            Literal::GridCdf { grid, cdf } => Distribution::grid_cdf(grid, cdf),
            Literal::TruncatedGaussian { mu, sigma2, lo, hi } => {
                Distribution::truncated_gaussian(mu, sigma2, lo, hi)
            }
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidDistribution(msg.into()))
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be finite, got {v}"))
    }
}

fn check_weights(name: &str, w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return invalid(format!("{name} must be finite and nonnegative"));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return invalid(format!("{name} sum to {s}, expected 1"));
    }
    Ok(())
}

fn strictly_ascending(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl Distribution {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("Bernoulli p must lie in [0, 1], got {p}"));
        }
        Ok(Self::Bernoulli { p })
    }

    pub fn dirac(x: f64) -> Result<Self> {
        check_finite("Dirac location", x)?;
        Ok(Self::Dirac { x })
    }

    pub fn categorical(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return invalid("categorical needs equally many points and probabilities (at least one)");
        }
        if points.iter().any(|x| !x.is_finite()) || !strictly_ascending(&points) {
            return invalid("categorical points must be finite and strictly ascending");
        }
        check_weights("categorical probabilities", &probs)?;
        Ok(Self::Categorical { points, probs })
    }

    pub fn gaussian(mu: f64, sigma2: f64) -> Result<Self> {
        check_finite("Gaussian mean", mu)?;
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return invalid(format!("Gaussian variance must be positive, got {sigma2}"));
        }
        Ok(Self::Gaussian { mu, sigma2 })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        check_finite("uniform endpoint", a)?;
        check_finite("uniform endpoint", b)?;
        if !(b > a) {
            return invalid(format!("uniform needs a < b, got [{a}, {b}]"));
        }
        Ok(Self::Uniform { a, b })
    }

    /// Builds a mixture, flattening nested mixtures and dropping zero
    /// weights. A single surviving component is returned unwrapped.
    pub fn mixture(components: Vec<Distribution>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() || components.len() != weights.len() {
            return invalid("mixture needs equally many components and weights (at least one)");
        }
        check_weights("mixture weights", &weights)?;
        let mut flat_c = Vec::with_capacity(components.len());
        let mut flat_w = Vec::with_capacity(components.len());
        for (c, w) in components.into_iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            match c {
                Self::Mixture {
                    weights: inner_w,
                    components: inner_c,
                } => {
                    for (ic, iw) in inner_c.into_iter().zip(inner_w) {
                        flat_c.push(ic);
                        flat_w.push(w * iw);
                    }
                }
                other => {
                    flat_c.push(other);
                    flat_w.push(w);
                }
            }
        }
        if flat_c.len() == 1 {
            return Ok(flat_c.pop().expect("one component"));
        }
        Ok(Self::Mixture {
            weights: flat_w,
            components: flat_c,
        })
    }

    /// Mixture whose weights are rescaled to sum to one exactly.
    pub fn mixture_normalized(components: Vec<Distribution>, weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s.is_finite() && s > 0.0) {
            return invalid("mixture weights must have a positive finite sum");
        }
        Self::mixture(components, weights.into_iter().map(|w| w / s).collect())
    }

    pub fn grid_cdf(grid: Vec<f64>, mut cdf: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != cdf.len() {
            return invalid("grid CDF needs at least two knots and one value per knot");
        }
        if grid.iter().any(|x| !x.is_finite()) || !strictly_ascending(&grid) {
            return invalid("grid knots must be finite and strictly ascending");
        }
        if cdf.iter().any(|c| !c.is_finite()) || cdf[0] < 0.0 {
            return invalid("grid CDF values must be finite and start at or above 0");
        }
        if cdf.windows(2).any(|w| w[1] < w[0]) {
            return invalid("grid CDF values must be nondecreasing");
        }
        let last = *cdf.last().expect("nonempty");
        if (last - 1.0).abs() > SUM_TOL {
            return invalid(format!("grid CDF must end at 1, got {last}"));
        }
        *cdf.last_mut().expect("nonempty") = 1.0;
        for c in cdf.iter_mut() {
            *c = c.min(1.0);
        }
        Ok(Self::GridCdf { grid, cdf })
    }

    pub fn truncated_gaussian(mu: f64, sigma2: f64, lo: Option<f64>, hi: Option<f64>) -> Result<Self> {
        check_finite("Gaussian mean", mu)?;
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return invalid(format!("Gaussian variance must be positive, got {sigma2}"));
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            if !(h > l) {
                return invalid(format!("truncation needs lo < hi, got ({l}, {h}]"));
            }
        }
        if lo.is_some_and(|l| !l.is_finite()) || hi.is_some_and(|h| !h.is_finite()) {
            return invalid("truncation endpoints must be finite or absent");
        }
        let d = Self::TruncatedGaussian { mu, sigma2, lo, hi };
        if !(d.truncation_mass() > 0.0) {
            return invalid("truncation interval carries no Gaussian mass");
        }
        Ok(d)
    }

    /// Re-runs the constructor checks; useful for values built by hand.
    pub fn validate(&self) -> Result<()> {
        match self.clone() {
            Self::Bernoulli { p } => Self::bernoulli(p).map(drop),
            Self::Dirac { x } => Self::dirac(x).map(drop),
            Self::Categorical { points, probs } => Self::categorical(points, probs).map(drop),
            Self::Gaussian { mu, sigma2 } => Self::gaussian(mu, sigma2).map(drop),
            Self::Uniform { a, b } => Self::uniform(a, b).map(drop),
            Self::Mixture {
                weights,
                components,
            } => {
                for c in &components {
                    c.validate()?;
                }
                Self::mixture(components, weights).map(drop)
            }
            Self::GridCdf { grid, cdf } => Self::grid_cdf(grid, cdf).map(drop),
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                Self::truncated_gaussian(mu, sigma2, lo, hi).map(drop)
            }
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::Dirac { .. } => "dirac",
            Self::Categorical { .. } => "categorical",
            Self::Gaussian { .. } => "gaussian",
            Self::Uniform { .. } => "uniform",
            Self::Mixture { .. } => "mixture",
            Self::GridCdf { .. } => "grid_cdf",
            Self::TruncatedGaussian { .. } => "truncated_gaussian",
        }
    }

    // Gaussian mass of the truncation interval.
    fn truncation_mass(&self) -> f64 {
        match *self {
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                let s = sigma2.sqrt();
                let al = lo.map_or(f64::NEG_INFINITY, |l| (l - mu) / s);
                let be = hi.map_or(f64::INFINITY, |h| (h - mu) / s);
                if al > 0.0 {
                    normal::sf(al) - normal::sf(be)
                } else {
                    normal::cdf(be) - normal::cdf(al)
                }
            }
            _ => 1.0,
        }
    }

    /// `P((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Self::Dirac { x: at } => {
                if x < *at {
                    0.0
                } else {
                    1.0
                }
            }
            Self::Categorical { points, probs } => {
                let k = points.partition_point(|pt| *pt <= x);
                probs[..k].iter().sum::<f64>().min(1.0)
            }
            Self::Gaussian { mu, sigma2 } => normal::cdf((x - mu) / sigma2.sqrt()),
            Self::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Self::Mixture {
                weights,
                components,
            } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.cdf(x))
                .sum::<f64>()
                .clamp(0.0, 1.0),
            Self::GridCdf { grid, cdf } => {
                if x < grid[0] {
                    return 0.0;
                }
                let n = grid.len();
                if x >= grid[n - 1] {
                    return 1.0;
                }
                let i = grid.partition_point(|g| *g <= x) - 1;
                let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
                cdf[i] + t * (cdf[i + 1] - cdf[i])
            }
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                if lo.is_some_and(|l| x <= l) {
                    return 0.0;
                }
                if hi.is_some_and(|h| x >= h) {
                    return 1.0;
                }
                let s = sigma2.sqrt();
                let al = lo.map_or(f64::NEG_INFINITY, |l| (l - mu) / s);
                let z = (x - mu) / s;
                let mass = self.truncation_mass();
                let v = if al > 0.0 {
                    (normal::sf(al) - normal::sf(z)) / mass
                } else {
                    (normal::cdf(z) - normal::cdf(al)) / mass
                };
                v.clamp(0.0, 1.0)
            }
        }
    }

    /// `P((-inf, x))`, the left limit of the CDF.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atom: f64 = self
            .atoms()
            .into_iter()
            .filter(|(a, _)| *a == x)
            .map(|(_, m)| m)
            .sum();
        (self.cdf(x) - atom).max(0.0)
    }

    pub fn has_density(&self) -> bool {
        match self {
            Self::Gaussian { .. } | Self::Uniform { .. } | Self::TruncatedGaussian { .. } => true,
            Self::GridCdf { cdf, .. } => cdf[0] <= TAIL_MASS,
            Self::Mixture { components, .. } => components.iter().all(Self::has_density),
            Self::Bernoulli { .. } | Self::Dirac { .. } | Self::Categorical { .. } => false,
        }
    }

    /// Lebesgue density. Grid CDFs use the slope of the segment starting at
    /// or before `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !self.has_density() {
            return Err(Error::NoDensity);
        }
        Ok(match self {
            Self::Gaussian { mu, sigma2 } => {
                let s = sigma2.sqrt();
                normal::pdf((x - mu) / s) / s
            }
            Self::Uniform { a, b } => {
                if x >= *a && x <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                if lo.is_some_and(|l| x <= l) || hi.is_some_and(|h| x > h) {
                    0.0
                } else {
                    let s = sigma2.sqrt();
                    normal::pdf((x - mu) / s) / (s * self.truncation_mass())
                }
            }
            Self::GridCdf { grid, cdf } => {
                let n = grid.len();
                if x < grid[0] || x >= grid[n - 1] {
                    0.0
                } else {
                    let i = grid.partition_point(|g| *g <= x) - 1;
                    (cdf[i + 1] - cdf[i]) / (grid[i + 1] - grid[i])
                }
            }
            Self::Mixture {
                weights,
                components,
            } => {
                let mut s = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    s += w * c.pdf(x)?;
                }
                s
            }
            Self::Bernoulli { .. } | Self::Dirac { .. } | Self::Categorical { .. } => {
                unreachable!("no density")
            }
        })
    }

    /// Density of the absolutely continuous part; zero for atomic variants.
    /// Together with [`Distribution::atoms`] this describes every variant.
    pub fn continuous_density(&self, x: f64) -> f64 {
        match self {
            Self::Bernoulli { .. } | Self::Dirac { .. } | Self::Categorical { .. } => 0.0,
            Self::GridCdf { grid, cdf } => {
                let n = grid.len();
                if x < grid[0] || x >= grid[n - 1] {
                    0.0
                } else {
                    let i = grid.partition_point(|g| *g <= x) - 1;
                    (cdf[i + 1] - cdf[i]) / (grid[i + 1] - grid[i])
                }
            }
            Self::Mixture {
                weights,
                components,
            } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.continuous_density(x))
                .sum(),
            _ => self.pdf(x).unwrap_or(0.0),
        }
    }

    /// Natural log of the density; `-inf` where the density vanishes.
    /// Gaussian families are evaluated analytically so far tails do not
    /// underflow.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        match self {
            Self::Gaussian { mu, sigma2 } => {
                let s = sigma2.sqrt();
                Ok(normal::ln_pdf((x - mu) / s) - s.ln())
            }
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                if lo.is_some_and(|l| x <= l) || hi.is_some_and(|h| x > h) {
                    Ok(f64::NEG_INFINITY)
                } else {
                    let s = sigma2.sqrt();
                    Ok(normal::ln_pdf((x - mu) / s) - s.ln() - self.truncation_mass().ln())
                }
            }
            Self::Mixture {
                weights,
                components,
            } => {
                let mut terms = Vec::with_capacity(components.len());
                for (w, c) in weights.iter().zip(components) {
                    terms.push(w.ln() + c.ln_pdf(x)?);
                }
                let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if m == f64::NEG_INFINITY {
                    return Ok(m);
                }
                Ok(m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
            }
            _ => Ok(self.pdf(x)?.ln()),
        }
    }

    /// Point masses as `(location, mass)`, sorted by location, merged.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out = match self {
            Self::Bernoulli { p } => vec![(0.0, 1.0 - p), (1.0, *p)],
            Self::Dirac { x } => vec![(*x, 1.0)],
            Self::Categorical { points, probs } => {
                points.iter().copied().zip(probs.iter().copied()).collect()
            }
            Self::GridCdf { grid, cdf } => vec![(grid[0], cdf[0])],
            Self::Mixture {
                weights,
                components,
            } => components
                .iter()
                .zip(weights)
                .flat_map(|(c, w)| c.atoms().into_iter().map(move |(x, m)| (x, m * w)))
                .collect(),
            Self::Gaussian { .. } | Self::Uniform { .. } | Self::TruncatedGaussian { .. } => {
                Vec::new()
            }
        };
        out.retain(|(_, m)| *m > 0.0);
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(out.len());
        for (x, m) in out {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += m,
                _ => merged.push((x, m)),
            }
        }
        merged
    }

    /// True when all mass sits on finitely many points.
    pub fn is_atomic(&self) -> bool {
        match self {
            Self::Bernoulli { .. } | Self::Dirac { .. } | Self::Categorical { .. } => true,
            Self::Mixture { components, .. } => components.iter().all(Self::is_atomic),
            _ => false,
        }
    }

    /// Locations where the CDF may fail to be smooth (atoms, interval
    /// endpoints, grid knots), plus Gaussian centres.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            Self::Bernoulli { .. } => vec![0.0, 1.0],
            Self::Dirac { x } => vec![*x],
            Self::Categorical { points, .. } => points.clone(),
            Self::Gaussian { mu, .. } => vec![*mu],
            Self::Uniform { a, b } => vec![*a, *b],
            Self::GridCdf { grid, .. } => grid.clone(),
            Self::TruncatedGaussian { mu, lo, hi, .. } => {
                let mut v = vec![*mu];
                v.extend(lo.iter().chain(hi.iter()));
                v
            }
            Self::Mixture { components, .. } => {
                components.iter().flat_map(Self::breakpoints).collect()
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Interval `(lo, hi)` with at most `tail` mass below `lo` and above `hi`.
    /// Exact for compactly supported variants.
    pub fn support_bounds(&self, tail: f64) -> (f64, f64) {
        match self {
            Self::Bernoulli { .. } => (0.0, 1.0),
            Self::Dirac { x } => (*x, *x),
            Self::Categorical { points, .. } => (points[0], *points.last().expect("nonempty")),
            Self::Gaussian { mu, sigma2 } => {
                let z = normal::upper_quantile(tail) * sigma2.sqrt();
                (mu - z, mu + z)
            }
            Self::Uniform { a, b } => (*a, *b),
            Self::GridCdf { grid, .. } => (grid[0], *grid.last().expect("nonempty")),
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                let z = normal::upper_quantile(tail * self.truncation_mass()) * sigma2.sqrt();
                let l = lo.map_or(mu - z, |l| l.max(mu - z));
                let h = hi.map_or(mu + z, |h| h.min(mu + z));
                (l.min(h), h)
            }
            Self::Mixture { components, .. } => components
                .iter()
                .map(|c| c.support_bounds(tail))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| {
                    (l.min(a), h.max(b))
                }),
        }
    }

    /// `inf { x : cdf(x) >= level }` for `level` in `(0, 1]`.
    pub fn quantile(&self, level: f64) -> f64 {
        let level = level.clamp(f64::MIN_POSITIVE, 1.0);
        match self {
            Self::Gaussian { mu, sigma2 } => mu + sigma2.sqrt() * normal::quantile(level),
            Self::Uniform { a, b } => a + level * (b - a),
            Self::GridCdf { grid, cdf } => {
                if cdf[0] >= level {
                    return grid[0];
                }
                let i = cdf.partition_point(|c| *c < level);
                let (c0, c1) = (cdf[i - 1], cdf[i]);
                grid[i - 1] + (level - c0) / (c1 - c0) * (grid[i] - grid[i - 1])
            }
            _ if self.is_atomic() => {
                let atoms = self.atoms();
                let mut cum = 0.0;
                for (x, m) in &atoms {
                    cum += m;
                    if cum >= level {
                        return *x;
                    }
                }
                atoms.last().expect("at least one atom").0
            }
            _ => self.quantile_by_bisection(level),
        }
    }

    fn quantile_by_bisection(&self, level: f64) -> f64 {
        let (mut lo, mut hi) = self.support_bounds(1e-15);
        let mut width = (hi - lo).max(1.0);
        while self.cdf(lo) >= level {
            lo -= width;
            width *= 2.0;
        }
        while self.cdf(hi) < level {
            hi += width;
            width *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Land exactly on an atom when the jump is what crosses the level.
        for (a, _) in self.atoms() {
            if (a - hi).abs() <= 1e-9 * (1.0 + a.abs()) && self.cdf(a) >= level {
                return a;
            }
        }
        hi
    }

    /// Lowest median, `inf { x : cdf(x) >= 1/2 }`.
    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// True when `cdf` equals 1/2 on a nondegenerate interval.
    pub fn has_median_interval(&self) -> bool {
        let m = self.median();
        if self.cdf(m) != 0.5 {
            return false;
        }
        let (lo, hi) = self.support_bounds(1e-12);
        let step = 1e-9 * (hi - lo).max(1.0);
        self.cdf(m + step) <= 0.5
    }

    /// Probability `p = P({1})` when the distribution lives on `{0, 1}`.
    pub fn as_bernoulli(&self) -> Option<f64> {
        match self {
            Self::Bernoulli { p } => Some(*p),
            Self::Dirac { x } if *x == 0.0 || *x == 1.0 => Some(*x),
            _ if self.is_atomic() => {
                let atoms = self.atoms();
                if atoms.iter().all(|(x, _)| *x == 0.0 || *x == 1.0) {
                    Some(atoms.iter().filter(|(x, _)| *x == 1.0).map(|(_, m)| m).sum())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Distribution of `X + s`.
    pub fn shift(&self, s: f64) -> Distribution {
        match self {
            Self::Bernoulli { p } => Self::Categorical {
                points: vec![s, 1.0 + s],
                probs: vec![1.0 - p, *p],
            },
            Self::Dirac { x } => Self::Dirac { x: x + s },
            Self::Categorical { points, probs } => Self::Categorical {
                points: points.iter().map(|x| x + s).collect(),
                probs: probs.clone(),
            },
            Self::Gaussian { mu, sigma2 } => Self::Gaussian {
                mu: mu + s,
                sigma2: *sigma2,
            },
            Self::Uniform { a, b } => Self::Uniform { a: a + s, b: b + s },
            Self::Mixture {
                weights,
                components,
            } => Self::Mixture {
                weights: weights.clone(),
                components: components.iter().map(|c| c.shift(s)).collect(),
            },
            Self::GridCdf { grid, cdf } => Self::GridCdf {
                grid: grid.iter().map(|g| g + s).collect(),
                cdf: cdf.clone(),
            },
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => Self::TruncatedGaussian {
                mu: mu + s,
                sigma2: *sigma2,
                lo: lo.map(|l| l + s),
                hi: hi.map(|h| h + s),
            },
        }
    }

    /// Mass of `(lo, hi]`; `None` is an infinite endpoint.
    pub fn interval_mass(&self, lo: Option<f64>, hi: Option<f64>) -> f64 {
        let upper = hi.map_or(1.0, |h| self.cdf(h));
        let lower = lo.map_or(0.0, |l| self.cdf(l));
        (upper - lower).max(0.0)
    }

    /// The distribution conditioned on `(lo, hi]`.
    pub fn condition_on(&self, lo: Option<f64>, hi: Option<f64>) -> Result<Distribution> {
        let mass = self.interval_mass(lo, hi);
        if !(mass > 0.0) {
            return Err(Error::WeightMassZero);
        }
        let inside = |x: f64| lo.is_none_or(|l| x > l) && hi.is_none_or(|h| x <= h);
        match self {
            Self::Gaussian { mu, sigma2 } => Self::truncated_gaussian(*mu, *sigma2, lo, hi),
            Self::TruncatedGaussian {
                mu,
                sigma2,
                lo: l0,
                hi: h0,
            } => {
                let l = match (lo, *l0) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
                let h = match (hi, *h0) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                Self::truncated_gaussian(*mu, *sigma2, l, h)
            }
            Self::Uniform { a, b } => {
                Self::uniform(lo.map_or(*a, |l| l.max(*a)), hi.map_or(*b, |h| h.min(*b)))
            }
            Self::Mixture {
                weights,
                components,
            } => {
                let mut comps = Vec::new();
                let mut ws = Vec::new();
                for (w, c) in weights.iter().zip(components) {
                    let m = c.interval_mass(lo, hi);
                    if m > 0.0 {
                        comps.push(c.condition_on(lo, hi)?);
                        ws.push(w * m);
                    }
                }
                Self::mixture_normalized(comps, ws)
            }
            Self::GridCdf { grid, .. } => {
                let base = lo.map_or(0.0, |l| self.cdf(l));
                let mut knots: Vec<f64> = Vec::with_capacity(grid.len() + 2);
                if let Some(l) = lo {
                    if l >= grid[0] {
                        knots.push(l);
                    }
                }
                knots.extend(grid.iter().copied().filter(|g| inside(*g)));
                if let Some(h) = hi {
                    if h < *grid.last().expect("nonempty") && knots.last().is_none_or(|k| *k < h) {
                        knots.push(h);
                    }
                }
                knots.dedup();
                if knots.len() < 2 {
                    // All conditional mass sits in the atom at the first knot.
                    return Self::dirac(knots.first().copied().unwrap_or(grid[0]));
                }
                let vals = knots
                    .iter()
                    .map(|k| ((self.cdf(*k) - base) / mass).clamp(0.0, 1.0))
                    .collect::<Vec<_>>();
                let mut vals = vals;
                *vals.last_mut().expect("nonempty") = 1.0;
                Self::grid_cdf(knots, vals)
            }
            atomic => {
                let (pts, ms): (Vec<f64>, Vec<f64>) =
                    atomic.atoms().into_iter().filter(|(x, _)| inside(*x)).unzip();
                if pts.len() == 1 {
                    return Self::dirac(pts[0]);
                }
                let total: f64 = ms.iter().sum();
                Self::categorical(pts, ms.into_iter().map(|m| m / total).collect())
            }
        }
    }
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Bernoulli { p } => write!(f, "Bernoulli({p})"),
            Self::Dirac { x } => write!(f, "Dirac({x})"),
            Self::Categorical { points, .. } => write!(f, "Categorical({} points)", points.len()),
            Self::Gaussian { mu, sigma2 } => write!(f, "Gaussian({mu}, {sigma2})"),
            Self::Uniform { a, b } => write!(f, "Uniform({a}, {b})"),
            Self::Mixture { components, .. } => write!(f, "Mixture({} components)", components.len()),
            Self::GridCdf { grid, .. } => write!(f, "GridCdf({} knots)", grid.len()),
            Self::TruncatedGaussian { mu, sigma2, lo, hi } => {
                write!(f, "TruncatedGaussian({mu}, {sigma2}, ({lo:?}, {hi:?}])")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mu: f64, s2: f64) -> Distribution {
        Distribution::gaussian(mu, s2).unwrap()
    }
    fn dirac(x: f64) -> Distribution {
        Distribution::dirac(x).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(g(0.0, 1.0).cdf(0.0), 0.5);
        assert_eq!(dirac(2.0).cdf(1.9), 0.0);
        assert_eq!(dirac(2.0).cdf(2.0), 1.0);
        let m = Distribution::mixture(vec![dirac(0.0), dirac(1.0)], vec![0.3, 0.7]).unwrap();
        assert!((m.cdf(0.5) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pdf_examples() {
        let u = Distribution::uniform(-1.0, 1.0).unwrap();
        assert_eq!(u.pdf(0.0).unwrap(), 0.5);
        // 1/sqrt(2 pi) = 0.3989422804014327 to 16 digits
        assert!((g(0.0, 1.0).pdf(0.0).unwrap() - 0.3989422804).abs() < 1e-10);
        assert_eq!(dirac(0.0).pdf(0.0), Err(Error::NoDensity));
        assert_eq!(Distribution::bernoulli(0.3).unwrap().pdf(0.0), Err(Error::NoDensity));
    }

    #[test]
    fn median_examples() {
        assert_eq!(g(3.0, 1.0).median(), 3.0);
        let c = Distribution::categorical(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(c.median(), 0.0);
        assert!(c.has_median_interval());
        let m = Distribution::mixture(vec![dirac(0.0), dirac(10.0)], vec![0.4, 0.6]).unwrap();
        assert_eq!(m.median(), 10.0);
        assert!(!g(0.0, 1.0).has_median_interval());
    }

    #[test]
    fn median_of_mixed_distribution_snaps_to_atom() {
        let m = Distribution::mixture(vec![g(-5.0, 0.01), dirac(1.0)], vec![0.3, 0.7]).unwrap();
        assert_eq!(m.median(), 1.0);
        let c = Distribution::mixture(vec![g(-1.0, 1.0), g(1.0, 1.0)], vec![0.5, 0.5]).unwrap();
        assert!(c.median().abs() < 1e-9);
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(Distribution::gaussian(0.0, 0.0).is_err());
        assert!(Distribution::uniform(1.0, 1.0).is_err());
        assert!(Distribution::bernoulli(1.5).is_err());
        assert!(Distribution::categorical(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(Distribution::categorical(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(Distribution::grid_cdf(vec![0.0, 1.0], vec![0.0, 0.9]).is_err());
        assert!(Distribution::grid_cdf(vec![0.0, 1.0, 2.0], vec![0.0, 0.6, 0.5]).is_err());
        assert!(Distribution::mixture(vec![dirac(0.0)], vec![0.9]).is_err());
        assert!(Distribution::truncated_gaussian(0.0, 1.0, Some(1.0), Some(0.5)).is_err());
    }

    #[test]
    fn mixtures_flatten() {
        let inner = Distribution::mixture(vec![dirac(0.0), dirac(1.0)], vec![0.5, 0.5]).unwrap();
        let outer = Distribution::mixture(vec![inner, g(0.0, 1.0)], vec![0.5, 0.5]).unwrap();
        match &outer {
            Distribution::Mixture {
                weights,
                components,
            } => {
                assert_eq!(components.len(), 3);
                assert_eq!(weights, &vec![0.25, 0.25, 0.5]);
            }
            _ => panic!("expected mixture"),
        }
    }

    #[test]
    fn json_literals() {
        let d: Distribution = serde_json::from_str(r#"{"type":"gaussian","mu":0.0,"sigma2":1.0}"#).unwrap();
        assert_eq!(d, g(0.0, 1.0));
        let b: Distribution = serde_json::from_str(r#"{"type":"bernoulli","p":0.7}"#).unwrap();
        assert_eq!(b, Distribution::bernoulli(0.7).unwrap());
        let m: Distribution = serde_json::from_str(
            r#"{"type":"mixture","weights":[0.5,0.5],"components":[{"type":"dirac","x":2.0},{"type":"gaussian","mu":1.0,"sigma2":2.0}]}"#,
        )
        .unwrap();
        assert_eq!(m.atoms(), vec![(2.0, 0.5)]);
        let gc: Distribution =
            serde_json::from_str(r#"{"type":"grid_cdf","grid":[0.0,1.0],"cdf":[0.0,1.0]}"#).unwrap();
        assert_eq!(gc.cdf(0.25), 0.25);

        // unknown fields, wrong case and invalid parameters are rejected
        assert!(serde_json::from_str::<Distribution>(r#"{"type":"gaussian","mu":0.0,"sigma2":1.0,"x":1}"#).is_err());
        assert!(serde_json::from_str::<Distribution>(r#"{"type":"Gaussian","mu":0.0,"sigma2":1.0}"#).is_err());
        assert!(serde_json::from_str::<Distribution>(r#"{"type":"gaussian","mu":0.0,"sigma2":-1.0}"#).is_err());

        let s = serde_json::to_string(&Distribution::dirac(1.0).unwrap()).unwrap();
        assert_eq!(s, r#"{"type":"dirac","x":1.0}"#);
    }

    #[test]
    fn truncated_gaussian_is_conditional_gaussian() {
        let base = g(0.5, 2.0);
        let t = base.condition_on(Some(0.0), None).unwrap();
        let mass = 1.0 - base.cdf(0.0);
        for &x in &[0.1, 0.7, 2.0, 5.0] {
            let expect = (base.cdf(x) - base.cdf(0.0)) / mass;
            assert!((t.cdf(x) - expect).abs() < 1e-14);
            let dens = base.pdf(x).unwrap() / mass;
            assert!((t.pdf(x).unwrap() - dens).abs() < 1e-14);
            assert!((t.ln_pdf(x).unwrap() - dens.ln()).abs() < 1e-12);
        }
        assert_eq!(t.pdf(-0.1).unwrap(), 0.0);
        assert_eq!(t.ln_pdf(-0.1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn upper_tail_truncation_keeps_precision() {
        let t = Distribution::truncated_gaussian(0.0, 1.0, Some(8.0), None).unwrap();
        assert!(t.cdf(8.0) == 0.0);
        let c = t.cdf(8.1);
        assert!(c > 0.5 && c < 1.0, "{c}");
    }

    #[test]
    fn condition_on_variants() {
        let u = Distribution::uniform(0.0, 2.0).unwrap();
        assert_eq!(u.condition_on(Some(1.0), None).unwrap(), Distribution::uniform(1.0, 2.0).unwrap());
        let c = Distribution::categorical(vec![0.0, 1.0, 2.0], vec![0.2, 0.3, 0.5]).unwrap();
        let cc = c.condition_on(Some(0.5), None).unwrap();
        assert!((cc.cdf(1.0) - 0.375).abs() < 1e-15);
        assert_eq!(dirac(0.0).condition_on(Some(1.0), None), Err(Error::WeightMassZero));
        let gc = Distribution::grid_cdf(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 1.0]).unwrap();
        let gcc = gc.condition_on(Some(0.5), Some(1.5)).unwrap();
        assert!((gcc.cdf(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(gcc.cdf(1.5), 1.0);
    }

    #[test]
    fn bernoulli_views() {
        assert_eq!(dirac(1.0).as_bernoulli(), Some(1.0));
        assert_eq!(Distribution::bernoulli(0.3).unwrap().as_bernoulli(), Some(0.3));
        assert_eq!(g(0.0, 1.0).as_bernoulli(), None);
        assert_eq!(dirac(0.5).as_bernoulli(), None);
    }
}
