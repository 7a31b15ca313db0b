// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod properize;
pub mod quad;
pub mod scores;
pub mod verify;

pub use distributions::{Distribution, FamilyDescriptor, Moments};
pub use error::{Error, Result};
pub use properize::{bayes_act, properized_score, BayesAct, BayesActResult, DescentCertificate};
pub use scores::{crps_phi_phi, expected_score, score, Score, ScoringRule, WeightSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/scoring-rules.md")]
    mod scoring_rules {}
    #[doc = include_str!("../../../book/src/bayes-acts.md")]
    mod bayes_acts {}
    #[doc = include_str!("../../../book/src/crps-alpha.md")]
    mod crps_alpha {}
    #[doc = include_str!("../../../book/src/noisy-observations.md")]
    mod noisy_observations {}
    #[doc = include_str!("../../../book/src/non-existence.md")]
    mod non_existence {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
