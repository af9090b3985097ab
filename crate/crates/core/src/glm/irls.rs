use alloc::format;
use alloc::vec::Vec;

use super::{per_obs_loglik, DesignMatrix, Family};
use crate::linalg::Qr;
use crate::math::sqrt;
use crate::{Error, Result};

pub(crate) const MAX_ITER: usize = 50;
pub(crate) const REL_TOL: f64 = 1e-8;
/// Floor for the Gaussian ML variance so a perfect fit keeps a finite
/// log-likelihood.
pub(crate) const MIN_DISPERSION: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    pub eta: Vec<f64>,
    pub loglik: f64,
    pub per_obs_loglik: Vec<f64>,
    /// Minus two times the log-likelihood.
    pub deviance: f64,
    /// Gaussian ML variance RSS / n; 1 for the other families.
    pub dispersion: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Minus two times the fitted log-likelihood.
pub fn deviance_of(fit: &FitResult) -> f64 {
    -2.0 * fit.loglik
}

fn rank_error(design: &DesignMatrix, col: usize) -> Error {
    let column = design
        .labels()
        .get(col)
        .cloned()
        .unwrap_or_else(|| format!("#{col}"));
    Error::RankDeficient { column }
}

fn finish(
    design: &DesignMatrix,
    y: &[f64],
    family: Family,
    coefficients: Vec<f64>,
    eta: Vec<f64>,
    dispersion: f64,
    converged: bool,
    iterations: usize,
) -> FitResult {
    debug_assert_eq!(design.n_rows(), y.len());
    let per_obs: Vec<f64> = y
        .iter()
        .zip(&eta)
        .map(|(&yi, &ei)| per_obs_loglik(family, yi, ei, dispersion))
        .collect();
    let loglik: f64 = per_obs.iter().sum();
    FitResult {
        coefficients,
        eta,
        loglik,
        per_obs_loglik: per_obs,
        deviance: -2.0 * loglik,
        dispersion,
        converged,
        iterations,
    }
}

fn gaussian_dispersion(y: &[f64], eta: &[f64]) -> f64 {
    let rss: f64 = y.iter().zip(eta).map(|(a, b)| (a - b) * (a - b)).sum();
    (rss / y.len() as f64).max(MIN_DISPERSION)
}

/// Maximum-likelihood fit of `family` on a fixed design. Gaussian fits are
/// a single least-squares solve; the other families iterate until the
/// relative deviance change drops below 1e-8 or 50 iterations pass, in
/// which case the last iterate is returned with `converged = false`.
pub fn fit_irls(design: &DesignMatrix, y: &[f64], family: Family) -> Result<FitResult> {
    let n = design.n_rows();
    let m = design.n_cols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows but outcome has {}",
            y.len()
        )));
    }

    if family == Family::GaussianIdentity {
        let qr = Qr::factor(design.values().to_vec(), n, m).map_err(|c| rank_error(design, c))?;
        let coef = qr.solve(y);
        let eta = design.predict(&coef);
        let disp = gaussian_dispersion(y, &eta);
        return Ok(finish(design, y, family, coef, eta, disp, true, 1));
    }

    let deviance = |eta: &[f64]| -> f64 {
        -2.0 * y
            .iter()
            .zip(eta)
            .map(|(&yi, &ei)| per_obs_loglik(family, yi, ei, 1.0))
            .sum::<f64>()
    };

    let mut eta: Vec<f64> = y
        .iter()
        .map(|&v| family.link(family.initial_mean(v)))
        .collect();
    let mut coef: Option<Vec<f64>> = None;
    let mut dev_old = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    let mut weighted = alloc::vec![0.0; n * m];
    let mut rhs = alloc::vec![0.0; n];
    for iter in 1..=MAX_ITER {
        iterations = iter;
        for i in 0..n {
            let (mu, mu_eta, var) = family.irls_terms(eta[i]);
            let w = mu_eta * mu_eta / var;
            let z = eta[i] + (y[i] - mu) / mu_eta;
            if !(w > 0.0) || !w.is_finite() || !z.is_finite() {
                return Err(Error::NonFiniteWeights);
            }
            let sw = sqrt(w);
            rhs[i] = sw * z;
            for j in 0..m {
                weighted[j * n + i] = sw * design.value(i, j);
            }
        }
        let qr = Qr::factor(weighted.clone(), n, m).map_err(|c| rank_error(design, c))?;
        let mut new_coef = qr.solve(&rhs);
        let mut new_eta = design.predict(&new_coef);
        let mut dev = deviance(&new_eta);

        // step halving back toward the previous iterate on overflow
        let mut halvings = 0;
        while !dev.is_finite() || new_coef.iter().any(|b| !b.is_finite()) {
            let Some(prev) = coef.as_ref() else {
                return Err(Error::NonFiniteWeights);
            };
            halvings += 1;
            if halvings > 30 {
                return Err(Error::NonFiniteWeights);
            }
            for (b, p) in new_coef.iter_mut().zip(prev) {
                *b = 0.5 * (*b + p);
            }
            new_eta = design.predict(&new_coef);
            dev = deviance(&new_eta);
        }

        eta = new_eta;
        coef = Some(new_coef);
        if (dev - dev_old).abs() / (dev.abs() + 0.1) < REL_TOL {
            converged = true;
            break;
        }
        dev_old = dev;
    }

    let coef = coef.ok_or(Error::NonFiniteWeights)?;
    Ok(finish(
        design, y, family, coef, eta, 1.0, converged, iterations,
    ))
}

/// Full-data Gaussian fit plus the raw residuals and leverages needed to
/// obtain every leave-one-out fit in closed form.
pub(crate) struct GaussianLoo {
    pub(crate) resid: Vec<f64>,
    pub(crate) hat: Vec<f64>,
    pub(crate) rss: f64,
}

pub(crate) fn gaussian_loo(design: &DesignMatrix, y: &[f64]) -> Result<GaussianLoo> {
    let n = design.n_rows();
    let m = design.n_cols();
    let qr = Qr::factor(design.values().to_vec(), n, m).map_err(|c| rank_error(design, c))?;
    let coefficients = qr.solve(y);
    let eta = design.predict(&coefficients);
    let resid: Vec<f64> = y.iter().zip(&eta).map(|(a, b)| a - b).collect();
    let rss = resid.iter().map(|r| r * r).sum();
    let hat = qr.hat_diagonal();
    Ok(GaussianLoo { resid, hat, rss })
}
