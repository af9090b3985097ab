use alloc::string::String;
use alloc::vec::Vec;

/// Where a design column came from, so the same column can be rebuilt at
/// new covariate values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSource {
    Intercept,
    /// Column `column` of the `form`-th form passed to the builder
    /// (0 is the primary form, adjustment forms follow).
    Form {
        form: usize,
        column: usize,
    },
    Confounder(usize),
}

/// Column-major design matrix whose first column is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    values: Vec<f64>,
    labels: Vec<String>,
    sources: Vec<ColumnSource>,
}

impl DesignMatrix {
    /// Intercept-only design with `n` rows.
    pub fn intercept(n: usize) -> Self {
        DesignMatrix {
            n,
            values: alloc::vec![1.0; n],
            labels: alloc::vec!["intercept".into()],
            sources: alloc::vec![ColumnSource::Intercept],
        }
    }

    /// Intercept followed by the given labelled columns.
    pub fn with_columns(n: usize, columns: Vec<(String, Vec<f64>)>) -> Self {
        let mut d = Self::intercept(n);
        for (k, (label, col)) in columns.into_iter().enumerate() {
            d.push(label, ColumnSource::Form { form: 0, column: k }, &col);
        }
        d
    }

    pub fn push(&mut self, label: String, source: ColumnSource, column: &[f64]) {
        assert_eq!(column.len(), self.n, "column length must match row count");
        self.values.extend_from_slice(column);
        self.labels.push(label);
        self.sources.push(source);
    }

    /// True if an identical column is already present.
    pub fn contains_column(&self, column: &[f64]) -> bool {
        (0..self.n_cols()).any(|j| self.column(j) == column)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sources(&self) -> &[ColumnSource] {
        &self.sources
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    /// Drops column `j` (never the intercept).
    pub fn remove_column(&mut self, j: usize) {
        assert!(j > 0, "the intercept column cannot be removed");
        self.values.drain(j * self.n..(j + 1) * self.n);
        self.labels.remove(j);
        self.sources.remove(j);
    }

    pub fn without_row(&self, i: usize) -> DesignMatrix {
        let n = self.n - 1;
        let mut values = Vec::with_capacity(n * self.n_cols());
        for j in 0..self.n_cols() {
            let col = self.column(j);
            values.extend_from_slice(&col[..i]);
            values.extend_from_slice(&col[i + 1..]);
        }
        DesignMatrix {
            n,
            values,
            labels: self.labels.clone(),
            sources: self.sources.clone(),
        }
    }

    /// Linear predictor `X b`.
    pub fn predict(&self, coefficients: &[f64]) -> Vec<f64> {
        assert_eq!(coefficients.len(), self.n_cols());
        let mut eta = alloc::vec![0.0; self.n];
        for (j, &b) in coefficients.iter().enumerate() {
            for (e, x) in eta.iter_mut().zip(self.column(j)) {
                *e += b * x;
            }
        }
        eta
    }

    /// Linear predictor for row `i` only.
    pub fn predict_row(&self, i: usize, coefficients: &[f64]) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .map(|(j, b)| b * self.value(i, j))
            .sum()
    }
}
