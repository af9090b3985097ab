use crate::{Error, Result};

/// Which covariates may act as effect modifiers or second split variables
/// in step 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum ModifierSet {
    /// Every covariate, including ones with no step-1 effect.
    #[default]
    All,
    /// Only covariates that survived step 1 (plus the covariate itself).
    Step1Selected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DendiConfig {
    /// Number of quantile split candidates per variable.
    pub grid_size: usize,
    /// Minimum observations on each side of any split.
    pub min_node: usize,
    /// Multiple of the reference model's standard error a candidate must
    /// exceed; 1 is the classic one-standard-error rule.
    pub se_multiplier: f64,
    pub candidate_modifiers: ModifierSet,
}

impl Default for DendiConfig {
    fn default() -> Self {
        DendiConfig {
            grid_size: 9,
            min_node: 10,
            se_multiplier: 1.0,
            candidate_modifiers: ModifierSet::All,
        }
    }
}

impl DendiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 1 {
            return Err(Error::InvalidConfig("grid_size must be >= 1".into()));
        }
        if self.min_node < 2 {
            return Err(Error::InvalidConfig("min_node must be >= 2".into()));
        }
        if !(self.se_multiplier >= 0.0) || !self.se_multiplier.is_finite() {
            return Err(Error::InvalidConfig(
                "se_multiplier must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}
