use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Distribution;
use crate::error::Error;

/// Mass allowed outside an interval family before membership fails.
pub const MASS_SLACK: f64 = 1e-12;

/// Class of distributions that forecasts and acts are drawn from.
///
/// String form: `bernoulli`, `p1`, `p2`, `p4plus`, `pc:<bound>`,
/// `p2m:<cap>`, `lebesgue_grid:<lo>,<hi>,<cells>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FamilyDescriptor {
    Bernoulli,
    /// Finite first moment.
    P1,
    /// Finite second moment.
    P2,
    /// Finite fourth moment and positive variance.
    P4Plus,
    /// Support inside `[-bound, bound]`.
    Compact { bound: f64 },
    /// Finite second moment with variance at most `m`.
    VarianceCapped { m: f64 },
    /// Densities that are constant on each of `cells` equal cells of
    /// `[lo, hi]`.
    LebesgueGrid { lo: f64, hi: f64, cells: usize },
}

impl FamilyDescriptor {
    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            Self::Compact { bound } if !(bound.is_finite() && bound > 0.0) => Err(
                Error::InvalidParameter(format!("support bound must be positive and finite, got {bound}")),
            ),
            Self::VarianceCapped { m } if !(m.is_finite() && m > 0.0) => Err(Error::InvalidParameter(
                format!("variance cap must be positive, got {m}"),
            )),
            Self::LebesgueGrid { lo, hi, cells }
                if !(lo.is_finite() && hi.is_finite() && hi > lo && cells >= 1) =>
            {
                Err(Error::InvalidParameter(format!(
                    "grid family needs lo < hi and at least one cell, got {lo},{hi},{cells}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// True for families of distributions on `{0, 1}`.
    pub fn is_binary(&self) -> bool {
        matches!(self, Self::Bernoulli)
    }

    /// Membership of `d`. Mixture weights are summed in floating point, so
    /// mass outside the allowed interval is compared against [`MASS_SLACK`].
    /// Every representable distribution has finite
    /// moments of all orders, so the moment classes only check shape.
    pub fn contains(&self, d: &Distribution) -> bool {
        match *self {
            Self::Bernoulli => d.as_bernoulli().is_some(),
            Self::P1 | Self::P2 => true,
            Self::P4Plus => d.variance() > 0.0,
            Self::Compact { bound } => {
                let (lo, hi) = d.support_bounds(0.0);
                d.cdf_left(-bound) <= MASS_SLACK && d.cdf(bound) >= 1.0 - MASS_SLACK && lo >= -bound && hi <= bound
            }
            Self::VarianceCapped { m } => d.variance() <= m,
            Self::LebesgueGrid { lo, hi, .. } => {
                d.has_density() && d.cdf_left(lo) <= MASS_SLACK && d.cdf(hi) >= 1.0 - MASS_SLACK
            }
        }
    }

    /// Cell edges of a grid family.
    pub fn cell_edges(&self) -> Option<Vec<f64>> {
        match *self {
            Self::LebesgueGrid { lo, hi, cells } => Some(super::convolve::linspace(lo, hi, cells + 1)),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bernoulli => f.write_str("bernoulli"),
            Self::P1 => f.write_str("p1"),
            Self::P2 => f.write_str("p2"),
            Self::P4Plus => f.write_str("p4plus"),
            Self::Compact { bound } => write!(f, "pc:{bound}"),
            Self::VarianceCapped { m } => write!(f, "p2m:{m}"),
            Self::LebesgueGrid { lo, hi, cells } => write!(f, "lebesgue_grid:{lo},{hi},{cells}"),
        }
    }
}

impl FromStr for FamilyDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidParameter(format!("unknown family '{s}'"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let fam = match (name.to_ascii_lowercase().as_str(), arg) {
            ("bernoulli", None) => Self::Bernoulli,
            ("p1", None) => Self::P1,
            ("p2", None) => Self::P2,
            ("p4plus" | "p4+", None) => Self::P4Plus,
            ("pc", Some(a)) => Self::Compact { bound: num(a)? },
            ("p2m", Some(a)) => Self::VarianceCapped { m: num(a)? },
            ("lebesgue_grid", Some(a)) => {
                let parts: Vec<&str> = a.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad());
                }
                Self::LebesgueGrid {
                    lo: num(parts[0])?,
                    hi: num(parts[1])?,
                    cells: parts[2].trim().parse().map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        fam.validate()?;
        Ok(fam)
    }
}

impl From<FamilyDescriptor> for String {
    fn from(f: FamilyDescriptor) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FamilyDescriptor {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}
