use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{step1, step2, DendiConfig, StepOutcome};
use crate::forms::{build_design, form_columns, FormSpec};
use crate::glm::{fit_irls, ColumnSource, Dataset, DesignMatrix, Family, FitResult};
use crate::{Error, Result};

/// Evaluation points per effect curve.
pub const CURVE_POINTS: usize = 101;

/// The final joint specification fitted once on the full data.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFit {
    /// Selected form of each covariate, in covariate order.
    pub forms: Vec<FormSpec>,
    pub column_labels: Vec<String>,
    pub column_sources: Vec<ColumnSource>,
    pub fit: FitResult,
    /// Columns removed because they were collinear with earlier ones.
    pub dropped_columns: Vec<String>,
}

impl JointFit {
    /// Linear predictor at one covariate row (`p` values) and confounder
    /// row (`q` values).
    pub fn eta_at(&self, covariates: &[f64], confounders: &[f64]) -> f64 {
        let covs: Vec<[f64; 1]> = covariates.iter().map(|&v| [v]).collect();
        let cols: Vec<&[f64]> = covs.iter().map(|c| c.as_slice()).collect();
        let mut eta = 0.0;
        for (b, src) in self.fit.coefficients.iter().zip(&self.column_sources) {
            let v = match *src {
                ColumnSource::Intercept => 1.0,
                ColumnSource::Confounder(k) => confounders[k],
                ColumnSource::Form { form, column } => {
                    form_columns(&self.forms[form - 1], &cols, &[])[column].1[0]
                }
            };
            eta += b * v;
        }
        eta
    }
}

/// Sampled effect of one covariate, other covariates held at their medians
/// and confounders at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectCurve {
    pub covariate: usize,
    pub x: Vec<f64>,
    pub eta: Vec<f64>,
    /// `g^-1(eta)`
    pub response: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DendiReport {
    pub n: usize,
    pub family: Family,
    pub covariate_names: Vec<String>,
    pub confounder_names: Vec<String>,
    pub step1: Vec<StepOutcome>,
    /// `None` for covariates that stopped at step 1.
    pub step2: Vec<Option<StepOutcome>>,
    pub joint: JointFit,
    /// Unordered covariate pairs linked by a selected two-covariate form,
    /// as `(smaller, larger)`, sorted.
    pub interactions: Vec<(usize, usize)>,
    pub medians: Vec<f64>,
    pub curves: Vec<EffectCurve>,
}

impl DendiReport {
    pub fn final_form(&self, j: usize) -> FormSpec {
        self.joint.forms[j]
    }

    pub fn final_outcome(&self, j: usize) -> &StepOutcome {
        self.step2[j].as_ref().unwrap_or(&self.step1[j])
    }
}

fn median(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn fit_joint(forms: &[FormSpec], data: &Dataset) -> Result<JointFit> {
    let mut design: DesignMatrix = build_design(&FormSpec::Null, data, forms)?;
    let mut dropped = Vec::new();
    loop {
        match fit_irls(&design, data.y(), data.family()) {
            Ok(fit) => {
                return Ok(JointFit {
                    forms: forms.to_vec(),
                    column_labels: design.labels().to_vec(),
                    column_sources: design.sources().to_vec(),
                    fit,
                    dropped_columns: dropped,
                })
            }
            Err(Error::RankDeficient { column }) => {
                let idx = design
                    .labels()
                    .iter()
                    .position(|l| *l == column)
                    .filter(|&i| i > 0)
                    .ok_or(Error::RankDeficient {
                        column: column.clone(),
                    })?;
                design.remove_column(idx);
                dropped.push(column);
            }
            Err(e) => return Err(e),
        }
    }
}

fn effect_curves(joint: &JointFit, data: &Dataset, medians: &[f64]) -> Vec<EffectCurve> {
    let zeros = vec![0.0; data.q()];
    (0..data.p())
        .map(|j| {
            let xs = data.covariate(j);
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let x: Vec<f64> = (0..CURVE_POINTS)
                .map(|t| lo + (hi - lo) * t as f64 / (CURVE_POINTS - 1) as f64)
                .collect();
            let mut row = medians.to_vec();
            let eta: Vec<f64> = x
                .iter()
                .map(|&v| {
                    row[j] = v;
                    joint.eta_at(&row, &zeros)
                })
                .collect();
            let response = eta.iter().map(|&e| data.family().inverse_link(e)).collect();
            EffectCurve {
                covariate: j,
                x,
                eta,
                response,
            }
        })
        .collect()
}

/// Runs step 1 for every covariate, step 2 for each survivor, then refits
/// the union of the selected forms (plus confounders) once on the full data.
pub fn run_dendi(data: &Dataset, config: &DendiConfig) -> Result<DendiReport> {
    config.validate()?;
    if data.p() == 0 {
        return Err(Error::InvalidData("no covariates to examine".into()));
    }
    if data.n() < data.min_rows() {
        return Err(Error::InvalidData(alloc::format!(
            "need at least {} observations for {} confounders, got {}",
            data.min_rows(),
            data.q(),
            data.n()
        )));
    }

    let step1_all: Vec<StepOutcome> = crate::par::map_range(data.p(), |j| step1(j, data, config))
        .into_iter()
        .collect::<Result<_>>()?;
    let step2_all: Vec<Option<StepOutcome>> = crate::par::map_range(data.p(), |j| {
        if step1_all[j].selected == FormSpec::Null {
            Ok(None)
        } else {
            step2(j, &step1_all, data, config).map(Some)
        }
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let forms: Vec<FormSpec> = (0..data.p())
        .map(|j| {
            step2_all[j]
                .as_ref()
                .map_or(step1_all[j].selected, |o| o.selected)
        })
        .collect();
    let joint = fit_joint(&forms, data)?;

    let mut interactions: Vec<(usize, usize)> = forms
        .iter()
        .filter_map(|f| {
            let (a, b) = (f.covariate()?, f.partner()?);
            Some((a.min(b), a.max(b)))
        })
        .collect();
    interactions.sort_unstable();
    interactions.dedup();

    let medians: Vec<f64> = (0..data.p()).map(|j| median(data.covariate(j))).collect();
    let curves = effect_curves(&joint, data, &medians);

    Ok(DendiReport {
        n: data.n(),
        family: data.family(),
        covariate_names: data.covariate_names().to_vec(),
        confounder_names: data.confounder_names().to_vec(),
        step1: step1_all,
        step2: step2_all,
        joint,
        interactions,
        medians,
        curves,
    })
}
