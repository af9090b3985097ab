//! The two-step selection procedure: leave-one-out predictive
//! log-likelihoods, the one-standard-error gate, per-covariate step 1,
//! mutually adjusted step 2 and the final joint refit.

mod config;
mod gate;
mod loocv;
mod report;
mod steps;

pub use config::{DendiConfig, ModifierSet};
pub use gate::one_se_gate;
pub use loocv::{loocv_score, LoocvResult, Recipe};
pub use report::{run_dendi, DendiReport, EffectCurve, JointFit, CURVE_POINTS};
pub use steps::{step1, step2, StepOutcome};
