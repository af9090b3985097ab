use alloc::vec::Vec;

use crate::glm::Dataset;
use crate::{Error, Result};

/// Candidate split thresholds for one variable, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitGrid {
    pub variable: usize,
    pub thresholds: Vec<f64>,
}

/// Empirical quantiles of `values` at levels `i / (grid_size + 1)`,
/// `i = 1..=grid_size`, using the lower order statistic. Duplicates are
/// merged and thresholds leaving fewer than `min_node` values on either
/// side (`<= c` vs `> c`) are removed.
pub fn quantile_thresholds(values: &[f64], grid_size: usize, min_node: usize) -> Vec<f64> {
    let n = values.len();
    if n == 0 || grid_size == 0 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(grid_size);
    for i in 1..=grid_size {
        let idx = i * (n - 1) / (grid_size + 1);
        let c = sorted[idx];
        if out.last() == Some(&c) {
            continue;
        }
        let left = sorted.partition_point(|&v| v <= c);
        let right = n - left;
        if left >= min_node && right >= min_node {
            out.push(c);
        }
    }
    out.dedup();
    out
}

/// Quantile split grid for covariate `j` on the full data.
pub fn make_grid(data: &Dataset, j: usize, grid_size: usize, min_node: usize) -> Result<SplitGrid> {
    if grid_size == 0 {
        return Err(Error::InvalidConfig("grid_size must be at least 1".into()));
    }
    let thresholds = quantile_thresholds(data.covariate(j), grid_size, min_node);
    if thresholds.is_empty() {
        return Err(Error::EmptyGrid { variable: j });
    }
    Ok(SplitGrid {
        variable: j,
        thresholds,
    })
}
