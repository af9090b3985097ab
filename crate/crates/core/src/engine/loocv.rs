use alloc::vec;
use alloc::vec::Vec;

use crate::forms::{build_design, improves, FormSpec};
use crate::glm::{fit_irls, gaussian_loo, per_obs_loglik, Dataset, DesignMatrix, Family};
use crate::math::{ln, mean, sample_variance, sqrt, LN_2PI};
use crate::{Error, Result};

/// Leverage above which dropping the observation makes the training
/// design rank deficient.
const LEVERAGE_TOL: f64 = 1e-10;

/// Below this `1 - h_ii` the deletion identities lose digits to
/// cancellation (the error grows like `eps / (1 - h_ii)`), so the fold is
/// refitted directly instead.
const REFIT_BELOW: f64 = 0.05;

/// A fit recipe: the ordered candidate forms searched by training
/// deviance (earlier wins ties) under a fixed adjustment set. A single
/// candidate is a plain fixed-form fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub candidates: Vec<FormSpec>,
    pub adjust: Vec<FormSpec>,
}

impl Recipe {
    pub fn fixed(form: FormSpec, adjust: Vec<FormSpec>) -> Self {
        Recipe {
            candidates: vec![form],
            adjust,
        }
    }

    pub fn search(candidates: Vec<FormSpec>, adjust: Vec<FormSpec>) -> Self {
        Recipe { candidates, adjust }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoocvResult {
    /// Predictive log-likelihood of each observation under the model
    /// trained without it.
    pub per_obs: Vec<f64>,
    pub mean: f64,
    /// sqrt(var / n) with the (n - 1) sample variance.
    pub se: f64,
    pub n_failed_folds: usize,
}

impl LoocvResult {
    pub fn from_per_obs(per_obs: Vec<f64>, n_failed_folds: usize) -> Self {
        let n = per_obs.len() as f64;
        let mean = mean(&per_obs);
        let se = sqrt(sample_variance(&per_obs) / n);
        LoocvResult {
            per_obs,
            mean,
            se,
            n_failed_folds,
        }
    }
}

/// Per-fold outcome of one candidate: training deviance (`+inf` when the
/// training fit is degenerate) and the predictive log-likelihood of the
/// held-out observation.
struct FoldTable {
    train_dev: Vec<f64>,
    pred: Vec<f64>,
}

fn gaussian_table(form: &FormSpec, adjust: &[FormSpec], data: &Dataset) -> Option<FoldTable> {
    let design = build_design(form, data, adjust).ok()?;
    let loo = gaussian_loo(&design, data.y()).ok()?;
    let n = data.n();
    let nt = (n - 1) as f64;
    let mut train_dev = vec![f64::INFINITY; n];
    let mut pred = vec![f64::NAN; n];
    for i in 0..n {
        let one_minus_h = 1.0 - loo.hat[i];
        if !(one_minus_h > LEVERAGE_TOL) {
            continue;
        }
        if one_minus_h < REFIT_BELOW {
            if let Some((dev, p)) = refit_fold(&design, data, i) {
                train_dev[i] = dev;
                pred[i] = p;
                continue;
            }
        }
        let e = loo.resid[i];
        let rss = (loo.rss - e * e / one_minus_h).max(0.0);
        let disp = (rss / nt).max(crate::glm::MIN_DISPERSION);
        train_dev[i] = nt * (LN_2PI + ln(disp)) + rss / disp;
        let eta = data.y()[i] - e / one_minus_h;
        pred[i] = per_obs_loglik(Family::GaussianIdentity, data.y()[i], eta, disp);
    }
    Some(FoldTable { train_dev, pred })
}

/// Fits `design` without row `i` and scores row `i`: `(training deviance,
/// predictive log-likelihood)`, or `None` if the fit fails.
fn refit_fold(design: &DesignMatrix, data: &Dataset, i: usize) -> Option<(f64, f64)> {
    let train = design.without_row(i);
    let y_train: Vec<f64> = data
        .y()
        .iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, &v)| v)
        .collect();
    let family = data.family();
    let fit = fit_irls(&train, &y_train, family).ok()?;
    let eta = design.predict_row(i, &fit.coefficients);
    let p = per_obs_loglik(family, data.y()[i], eta, fit.dispersion);
    (fit.deviance.is_finite() && p.is_finite()).then_some((fit.deviance, p))
}

fn refit_table(form: &FormSpec, adjust: &[FormSpec], data: &Dataset) -> Option<FoldTable> {
    let design = build_design(form, data, adjust).ok()?;
    let n = data.n();
    let folds: Vec<(f64, f64)> = crate::par::map_range(n, |i| {
        refit_fold(&design, data, i).unwrap_or((f64::INFINITY, f64::NAN))
    });
    let (train_dev, pred) = folds.into_iter().unzip();
    Some(FoldTable { train_dev, pred })
}

fn fold_table(form: &FormSpec, adjust: &[FormSpec], data: &Dataset) -> Option<FoldTable> {
    match data.family() {
        Family::GaussianIdentity => gaussian_table(form, adjust, data),
        _ => refit_table(form, adjust, data),
    }
}

/// Leave-one-out predictive log-likelihoods of `recipe`.
///
/// For every observation `i` the whole recipe, including its search over
/// candidates, is run on the other `n - 1` observations and the selected
/// training fit is scored at `i`. Gaussian folds use the exact
/// closed-form deletion identities, except high-leverage folds, which are
/// refitted; other families refit each fold.
/// A fold with no usable candidate falls back to the null model with the
/// same adjustment and counts as failed; more than 10% failed folds is an
/// error.
pub fn loocv_score(recipe: &Recipe, data: &Dataset) -> Result<LoocvResult> {
    let n = data.n();
    if n < 3 {
        return Err(Error::InvalidData(
            "LOOCV needs at least 3 observations".into(),
        ));
    }
    if recipe.candidates.is_empty() {
        return Err(Error::AllCandidatesDegenerate);
    }

    let tables: Vec<Option<FoldTable>> = crate::par::map_range(recipe.candidates.len(), |c| {
        fold_table(&recipe.candidates[c], &recipe.adjust, data)
    });

    let mut per_obs = vec![f64::NAN; n];
    let mut failed: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut best: Option<(f64, f64)> = None;
        for t in tables.iter().flatten() {
            let incumbent = best.map_or(f64::INFINITY, |b| b.0);
            if improves(t.train_dev[i], incumbent) && t.pred[i].is_finite() {
                best = Some((t.train_dev[i], t.pred[i]));
            }
        }
        match best {
            Some((_, p)) => per_obs[i] = p,
            None => failed.push(i),
        }
    }

    if failed.len() * 10 > n {
        return Err(Error::TooManyFailedFolds {
            failed: failed.len(),
            n,
        });
    }
    if !failed.is_empty() {
        let fallbacks = [
            fold_table(&FormSpec::Null, &recipe.adjust, data),
            fold_table(&FormSpec::Null, &[], data),
        ];
        for &i in &failed {
            let p = fallbacks
                .iter()
                .flatten()
                .map(|t| t.pred[i])
                .find(|p| p.is_finite())
                .ok_or(Error::TooManyFailedFolds {
                    failed: failed.len(),
                    n,
                })?;
            per_obs[i] = p;
        }
    }
    Ok(LoocvResult::from_per_obs(per_obs, failed.len()))
}
