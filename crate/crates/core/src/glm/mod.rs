//! Generalized linear models fitted by iteratively reweighted least squares.

mod dataset;
mod design;
mod family;
mod irls;

pub use dataset::Dataset;
pub use design::{ColumnSource, DesignMatrix};
pub use family::{per_obs_loglik, Family};
pub use irls::{deviance_of, fit_irls, FitResult};

pub(crate) use irls::{gaussian_loo, MIN_DISPERSION};
