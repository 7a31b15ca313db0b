//! Scoring rules: pointwise penalties `S(P, y)` and expected scores
//! `S(P, Q) = E_Q[S(P, Y)]`. Scores are negatively oriented.

mod eval;
mod expected;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::Distribution;
use crate::error::{Error, Result};

pub use eval::{score, score_with};
pub use expected::{crps_phi_phi, expected_score, expected_score_with};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ScoringRule {
    /// Binary `1 - p w - (1 - p)(1 - w)`.
    Mpr,
    /// Binary `|p - w|`.
    MaeBinary,
    /// Misclassification of the mode forecast `1{p >= 1/2}`.
    ZeroOne,
    /// Binary `(p - w)^2`.
    Brier,
    #[serde(rename = "log")]
    LogScore,
    /// `integral |P(x) - 1{y <= x}|^alpha dx`; alpha = 2 is the CRPS.
    CrpsAlpha { alpha: f64 },
    /// `w(y) S0(P, y)` for an indicator weight.
    Weighted {
        base: Box<ScoringRule>,
        weight: WeightSpec,
    },
    /// `(s2 - (y - mu)^2)^2`.
    TrialScore,
    /// `(s2 - (y - mu)^2 + (y - mu) g / s2)^2` with third central moment `g`.
    SpreadError,
    /// `(y - mu)^2 + s2`.
    Pmcc,
    SquaredError,
    /// `(y - mu)^2 / s2`.
    NormalizedSquaredError,
    /// `-p(y)`.
    LinearScore,
    /// `-P([y - c, y + c])`.
    ProbabilityScore { c: f64 },
    /// `integral (P(x) - Phi(x - y))^2 dx` for an observation blurred by noise `Phi`.
    NoisyCrps { noise: Distribution },
    /// `integral phi(x - y) S(P, x) dx`.
    ConvolutionScore {
        base: Box<ScoringRule>,
        noise: Distribution,
    },
}

// Derived reader for the rule literal. Internally tagged unit variants
// ignore extra keys, so those are rejected by hand before delegating here.
#[derive(Deserialize)]
#[serde(remote = "ScoringRule", tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
enum RuleLiteral {
    Mpr,
    MaeBinary,
    ZeroOne,
    Brier,
    #[serde(rename = "log")]
    LogScore,
    CrpsAlpha {
        alpha: f64,
    },
    Weighted {
        base: Box<ScoringRule>,
        weight: WeightSpec,
    },
    TrialScore,
    SpreadError,
    Pmcc,
    SquaredError,
    NormalizedSquaredError,
    LinearScore,
    ProbabilityScore {
        c: f64,
    },
    NoisyCrps {
        noise: Distribution,
    },
    ConvolutionScore {
        base: Box<ScoringRule>,
        noise: Distribution,
    },
}

const PARAMETERLESS: &[&str] = &[
    "mpr",
    "mae_binary",
    "zero_one",
    "brier",
    "log",
    "trial_score",
    "spread_error",
    "pmcc",
    "squared_error",
    "normalized_squared_error",
    "linear_score",
];

impl<'de> Deserialize<'de> for ScoringRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        if let Some(obj) = v.as_object() {
            let name = obj.get("rule").and_then(|r| r.as_str()).unwrap_or_default();
            if PARAMETERLESS.contains(&name) {
                if let Some(extra) = obj.keys().find(|k| *k != "rule") {
                    return Err(D::Error::custom(format!("unknown field `{extra}` for rule `{name}`")));
                }
            }
        }
        RuleLiteral::deserialize(v).map_err(D::Error::custom)
    }
}

/// Indicator weight functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `1{y > r}`.
    IndicatorAbove { r: f64 },
    /// `1{a < y <= b}`.
    IndicatorInterval { a: f64, b: f64 },
}

impl WeightSpec {
    pub fn at(&self, y: f64) -> f64 {
        let (lo, hi) = self.region();
        let inside = lo.is_none_or(|l| y > l) && hi.is_none_or(|h| y <= h);
        if inside {
            1.0
        } else {
            0.0
        }
    }

    /// The set where the weight is 1, as a half-open interval `(lo, hi]`.
    pub fn region(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            Self::IndicatorAbove { r } => (Some(r), None),
            Self::IndicatorInterval { a, b } => (Some(a), Some(b)),
        }
    }

    /// `integral w dP`.
    pub fn mass(&self, p: &Distribution) -> f64 {
        let (lo, hi) = self.region();
        p.interval_mass(lo, hi)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::IndicatorAbove { r } if !r.is_finite() => {
                Err(Error::InvalidParameter("weight threshold must be finite".into()))
            }
            Self::IndicatorInterval { a, b } if !(a.is_finite() && b.is_finite() && a < b) => Err(
                Error::InvalidParameter(format!("weight interval needs a < b, got ({a}, {b}]")),
            ),
            _ => Ok(()),
        }
    }
}

impl ScoringRule {
    pub fn crps() -> Self {
        Self::CrpsAlpha { alpha: 2.0 }
    }

    /// Parses either a JSON rule literal or a bare name such as `pmcc`,
    /// `crps`, `crps_alpha:1.5` or `probability_score:0.5`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let rule = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("bad rule literal: {e}")))?
        } else {
            let (name, arg) = match s.split_once(':') {
                Some((n, a)) => (n, Some(a)),
                None => (s, None),
            };
            let num = |a: Option<&str>| -> Result<f64> {
                a.and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("rule '{s}' needs a numeric parameter")))
            };
            match name {
                "mpr" => Self::Mpr,
                "mae_binary" => Self::MaeBinary,
                "zero_one" => Self::ZeroOne,
                "brier" => Self::Brier,
                "log" => Self::LogScore,
                "crps" => Self::crps(),
                "crps_alpha" => Self::CrpsAlpha { alpha: num(arg)? },
                "trial_score" => Self::TrialScore,
                "spread_error" => Self::SpreadError,
                "pmcc" => Self::Pmcc,
                "squared_error" => Self::SquaredError,
                "normalized_squared_error" => Self::NormalizedSquaredError,
                "linear_score" => Self::LinearScore,
                "probability_score" => Self::ProbabilityScore { c: num(arg)? },
                _ => return Err(Error::InvalidParameter(format!("unknown rule '{s}'"))),
            }
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::CrpsAlpha { alpha } if !(alpha.is_finite() && *alpha > 0.0) => {
                Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")))
            }
            Self::ProbabilityScore { c } if !(c.is_finite() && *c > 0.0) => {
                Err(Error::InvalidParameter(format!("window half-width must be positive, got {c}")))
            }
            Self::Weighted { base, weight } => {
                if !matches!(**base, Self::LogScore | Self::CrpsAlpha { .. }) {
                    return Err(Error::InvalidParameter(
                        "weighted rules take a log or CRPS-alpha base".into(),
                    ));
                }
                base.validate()?;
                weight.validate()
            }
            Self::NoisyCrps { noise } => {
                noise.validate()?;
                if noise.has_density() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("observation noise needs a density".into()))
                }
            }
            Self::ConvolutionScore { base, noise } => {
                base.validate()?;
                noise.validate()?;
                if base.is_binary() {
                    return Err(Error::InvalidParameter("convolution needs a real-valued base rule".into()));
                }
                if noise.has_density() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("convolution kernel needs a density".into()))
                }
            }
            _ => Ok(()),
        }
    }

    /// Rules defined only for outcomes in `{0, 1}`.
    pub fn is_binary(&self) -> bool {
        matches!(self, Self::Mpr | Self::MaeBinary | Self::ZeroOne | Self::Brier)
    }

    /// Rules that depend on the forecast only through its first three moments.
    pub fn is_moment_based(&self) -> bool {
        matches!(
            self,
            Self::TrialScore
                | Self::SpreadError
                | Self::Pmcc
                | Self::SquaredError
                | Self::NormalizedSquaredError
        )
    }

    pub fn name(&self) -> String {
        match self {
            Self::Mpr => "mpr".into(),
            Self::MaeBinary => "mae_binary".into(),
            Self::ZeroOne => "zero_one".into(),
            Self::Brier => "brier".into(),
            Self::LogScore => "log".into(),
            Self::CrpsAlpha { alpha } => format!("crps_alpha({alpha})"),
            Self::Weighted { base, weight } => match weight {
                WeightSpec::IndicatorAbove { r } => format!("weighted({}, y>{r})", base.name()),
                WeightSpec::IndicatorInterval { a, b } => {
                    format!("weighted({}, {a}<y<={b})", base.name())
                }
            },
            Self::TrialScore => "trial_score".into(),
            Self::SpreadError => "spread_error".into(),
            Self::Pmcc => "pmcc".into(),
            Self::SquaredError => "squared_error".into(),
            Self::NormalizedSquaredError => "normalized_squared_error".into(),
            Self::LinearScore => "linear_score".into(),
            Self::ProbabilityScore { c } => format!("probability_score({c})"),
            Self::NoisyCrps { noise } => format!("noisy_crps({noise})"),
            Self::ConvolutionScore { base, noise } => {
                format!("convolution_score({}, {noise})", base.name())
            }
        }
    }
}

impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Why a score is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    /// The forecast density vanishes at the observation.
    ZeroDensity,
    /// The forecast puts no mass on the observed outcome.
    ZeroProbability,
}

/// An extended-real score. Never NaN; infinite values carry a reason.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub reason: Option<Divergence>,
}

impl Score {
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self { value, reason: None })
        } else {
            Err(Error::InvalidParameter(format!("score evaluated to {value}")))
        }
    }

    pub fn infinite(reason: Divergence) -> Self {
        Self {
            value: f64::INFINITY,
            reason: Some(reason),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScoreWire {
    Number(f64),
    Infinite { value: String, reason: Divergence },
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.reason {
            Some(reason) if !self.value.is_finite() => ScoreWire::Infinite {
                value: if self.value > 0.0 { "inf" } else { "-inf" }.into(),
                reason,
            },
            _ => ScoreWire::Number(self.value),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ScoreWire::deserialize(d)? {
            ScoreWire::Number(value) => Ok(Score { value, reason: None }),
            ScoreWire::Infinite { value, reason } => {
                let value = match value.as_str() {
                    "inf" => f64::INFINITY,
                    "-inf" => f64::NEG_INFINITY,
                    other => return Err(serde::de::Error::custom(format!("bad score '{other}'"))),
                };
                Ok(Score {
                    value,
                    reason: Some(reason),
                })
            }
        }
    }
}
