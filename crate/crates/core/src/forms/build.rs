use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{FormSpec, Node};
use crate::glm::{ColumnSource, Dataset, DesignMatrix};
use crate::{Error, Result};

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Design columns contributed by `form`, evaluated on the given covariate
/// columns. No degeneracy checks are made here.
pub fn form_columns(
    form: &FormSpec,
    covariates: &[&[f64]],
    names: &[String],
) -> Vec<(String, Vec<f64>)> {
    let nm = |i: usize| {
        names
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("x{}", i + 1))
    };
    match *form {
        FormSpec::Null => Vec::new(),
        FormSpec::Linear { j } => alloc::vec![(nm(j), covariates[j].to_vec())],
        FormSpec::PiecewiseConstant { j, c } => alloc::vec![(
            format!("I({}>{c})", nm(j)),
            covariates[j].iter().map(|&x| ind(x > c)).collect(),
        )],
        FormSpec::AdditiveCombo { j, c } => alloc::vec![
            (nm(j), covariates[j].to_vec()),
            (
                format!("I({}>{c})", nm(j)),
                covariates[j].iter().map(|&x| ind(x > c)).collect(),
            ),
        ],
        FormSpec::MultiplicativeCombo { j, k, c } if k == j => alloc::vec![
            (nm(j), covariates[j].to_vec()),
            (
                format!("I({0}>{c})*({0}-{c})", nm(j)),
                covariates[j]
                    .iter()
                    .map(|&x| ind(x > c) * (x - c))
                    .collect(),
            ),
        ],
        FormSpec::MultiplicativeCombo { j, k, c } => alloc::vec![
            (nm(j), covariates[j].to_vec()),
            (
                format!("{}:I({}>{c})", nm(j), nm(k)),
                covariates[j]
                    .iter()
                    .zip(covariates[k])
                    .map(|(&xj, &xk)| ind(xk > c) * xj)
                    .collect(),
            ),
        ],
        FormSpec::Tree { j, c, second } => {
            let xj = covariates[j];
            let xk = covariates[second.k];
            let c2 = second.c2;
            let first = (
                format!("I({}>{c})", nm(j)),
                xj.iter().map(|&x| ind(x > c)).collect(),
            );
            let leaf = match second.node {
                Node::Left => (
                    format!("I({}<={c} & {}>{c2})", nm(j), nm(second.k)),
                    xj.iter()
                        .zip(xk)
                        .map(|(&a, &b)| ind(a <= c && b > c2))
                        .collect(),
                ),
                Node::Right => (
                    format!("I({}>{c} & {}>{c2})", nm(j), nm(second.k)),
                    xj.iter()
                        .zip(xk)
                        .map(|(&a, &b)| ind(a > c && b > c2))
                        .collect(),
                ),
            };
            alloc::vec![first, leaf]
        }
    }
}

fn is_constant(col: &[f64]) -> bool {
    col.iter().all(|&v| v == col[0])
}

/// Design for `form` adjusted for `adjust`: intercept, the form's columns,
/// each adjustment form's columns (columns identical to one already present
/// are dropped) and finally one column per confounder.
pub fn build_design(form: &FormSpec, data: &Dataset, adjust: &[FormSpec]) -> Result<DesignMatrix> {
    let n = data.n();
    let covs: Vec<&[f64]> = (0..data.p()).map(|j| data.covariate(j)).collect();
    for f in core::iter::once(form).chain(adjust) {
        if let Some(bad) = [f.covariate(), f.partner()]
            .into_iter()
            .flatten()
            .find(|&v| v >= data.p())
        {
            return Err(Error::DimensionMismatch(format!(
                "form refers to covariate {bad} but the data has {}",
                data.p()
            )));
        }
    }

    let mut design = DesignMatrix::intercept(n);
    for (idx, f) in core::iter::once(form).chain(adjust).enumerate() {
        for (col_idx, (label, col)) in form_columns(f, &covs, data.covariate_names())
            .into_iter()
            .enumerate()
        {
            if is_constant(&col) {
                return Err(Error::DegenerateColumn { column: label });
            }
            if design.contains_column(&col) {
                continue;
            }
            design.push(
                label,
                ColumnSource::Form {
                    form: idx,
                    column: col_idx,
                },
                &col,
            );
        }
    }
    for k in 0..data.q() {
        design.push(
            data.confounder_names()[k].clone(),
            ColumnSource::Confounder(k),
            data.confounder(k),
        );
    }
    Ok(design)
}
