//! Functional-form detection for continuous covariates in generalized
//! regression models.
//!
//! For each covariate the engine compares a ladder of nested predictor
//! forms (none, linear, piecewise constant, additive or multiplicative
//! combination of the two, and a two-split tree) by leave-one-out
//! predictive log-likelihood, accepting a richer form only when it clears
//! the one-standard-error rule against its parent.
//!
//! The crate is `no_std` (with `alloc`). The default `std` feature enables
//! rayon-backed parallelism; results are identical with or without it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod linalg;
mod math;
mod par;

pub mod engine;
pub mod forms;
pub mod glm;
pub mod sim;

pub use error::{Error, Result};

pub use engine::{
    loocv_score, one_se_gate, run_dendi, step1, step2, DendiConfig, DendiReport, EffectCurve,
    JointFit, LoocvResult, ModifierSet, Recipe, StepOutcome,
};
pub use forms::{
    build_design, form_columns, make_grid, search_candidates, search_second_split,
    search_single_split, second_split_candidates, FormKind, FormSpec, Node, SearchResult,
    SecondSplit, SplitGrid, SplitTemplate,
};
pub use glm::{
    deviance_of, fit_irls, per_obs_loglik, ColumnSource, Dataset, DesignMatrix, Family, FitResult,
};
