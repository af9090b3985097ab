use super::{DendiConfig, LoocvResult};

/// One-standard-error rule: accept the candidate only if its mean
/// predictive log-likelihood strictly exceeds the reference mean plus
/// `se_multiplier` reference standard errors.
pub fn one_se_gate(candidate: &LoocvResult, reference: &LoocvResult, config: &DendiConfig) -> bool {
    candidate.mean > reference.mean + config.se_multiplier * reference.se
}
