use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::Family;
use crate::{Error, Result};

/// Outcome, continuous covariates, always-included confounders and the
/// outcome family. Columns are stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: Vec<f64>,
    x: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    family: Family,
    covariate_names: Vec<String>,
    confounder_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from an outcome vector, covariate columns and
    /// confounder columns. Every value must be finite and every outcome
    /// must lie in the family's support.
    pub fn new(y: Vec<f64>, x: Vec<Vec<f64>>, z: Vec<Vec<f64>>, family: Family) -> Result<Self> {
        let covariate_names = (1..=x.len()).map(|j| format!("x{j}")).collect();
        let confounder_names = (1..=z.len()).map(|k| format!("z{k}")).collect();
        let d = Dataset {
            y,
            x,
            z,
            family,
            covariate_names,
            confounder_names,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn with_names(
        mut self,
        covariate_names: Vec<String>,
        confounder_names: Vec<String>,
    ) -> Result<Self> {
        if covariate_names.len() != self.p() || confounder_names.len() != self.q() {
            return Err(Error::DimensionMismatch(
                "name lists must match the column counts".into(),
            ));
        }
        self.covariate_names = covariate_names;
        self.confounder_names = confounder_names;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.y.len();
        if n == 0 {
            return Err(Error::InvalidData("empty outcome vector".into()));
        }
        for (i, &v) in self.y.iter().enumerate() {
            if !self.family.valid_outcome(v) {
                return Err(Error::InvalidData(format!(
                    "outcome {v} at row {i} is outside the support of {}",
                    self.family.name()
                )));
            }
        }
        for (kind, cols) in [("covariate", &self.x), ("confounder", &self.z)] {
            for (j, col) in cols.iter().enumerate() {
                if col.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{kind} {j} has {} rows, outcome has {n}",
                        col.len()
                    )));
                }
                if col.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidData(format!(
                        "{kind} {j} has non-finite values"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smallest sample size at which every candidate form is estimable,
    /// `2 (q + 6)`.
    pub fn min_rows(&self) -> usize {
        2 * (self.q() + 6)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.len()
    }

    pub fn q(&self) -> usize {
        self.z.len()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn covariate(&self, j: usize) -> &[f64] {
        &self.x[j]
    }

    pub fn confounder(&self, k: usize) -> &[f64] {
        &self.z[k]
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn confounder_names(&self) -> &[String] {
        &self.confounder_names
    }

    /// Row subset in the given order. The size floor is not re-checked, so
    /// this is usable for leave-one-out training sets.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let pick = |v: &Vec<f64>| rows.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Dataset {
            y: pick(&self.y),
            x: self.x.iter().map(pick).collect(),
            z: self.z.iter().map(pick).collect(),
            family: self.family,
            covariate_names: self.covariate_names.clone(),
            confounder_names: self.confounder_names.clone(),
        }
    }

    pub fn without_row(&self, i: usize) -> Dataset {
        let rows: Vec<usize> = (0..self.n()).filter(|&r| r != i).collect();
        self.select_rows(&rows)
    }

    /// Copy with a replaced outcome vector (same support rules apply).
    pub fn with_outcome(&self, y: Vec<f64>) -> Result<Dataset> {
        let d = Dataset { y, ..self.clone() };
        d.validate()?;
        Ok(d)
    }
}
