use alloc::vec::Vec;

use super::grid::quantile_thresholds;
use super::{build_design, FormSpec, Node, SecondSplit, SplitGrid, SplitTemplate};
use crate::glm::{fit_irls, Dataset, FitResult};
use crate::{Error, Result};

/// Relative slack under which two deviances count as tied, so the earlier
/// candidate in enumeration order wins regardless of rounding noise.
pub(crate) const TIE_TOL: f64 = 1e-10;

/// True if `candidate` beats the incumbent `best` by more than the tie slack.
pub(crate) fn improves(candidate: f64, best: f64) -> bool {
    if !candidate.is_finite() {
        return false;
    }
    if !best.is_finite() {
        return true;
    }
    candidate < best - TIE_TOL * best.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_form: FormSpec,
    pub fit: FitResult,
    /// Every candidate in enumeration order with its deviance; degenerate
    /// candidates carry `+inf`.
    pub trace: Vec<(FormSpec, f64)>,
}

/// Fits every candidate and returns the one with the smallest deviance.
/// Candidates are taken in order, so earlier ones win ties.
pub fn search_candidates(
    candidates: &[FormSpec],
    data: &Dataset,
    adjust: &[FormSpec],
) -> Result<SearchResult> {
    let fits: Vec<Option<FitResult>> = crate::par::map_range(candidates.len(), |i| {
        build_design(&candidates[i], data, adjust)
            .and_then(|d| fit_irls(&d, data.y(), data.family()))
            .ok()
    });
    let mut best: Option<usize> = None;
    let mut trace = Vec::with_capacity(candidates.len());
    for (i, fit) in fits.iter().enumerate() {
        let dev = fit.as_ref().map_or(f64::INFINITY, |f| f.deviance);
        trace.push((candidates[i], dev));
        let incumbent = best.map_or(f64::INFINITY, |b| trace[b].1);
        if improves(dev, incumbent) {
            best = Some(i);
        }
    }
    let best = best.ok_or(Error::AllCandidatesDegenerate)?;
    let fit = fits
        .into_iter()
        .nth(best)
        .flatten()
        .ok_or(Error::AllCandidatesDegenerate)?;
    Ok(SearchResult {
        best_form: candidates[best],
        fit,
        trace,
    })
}

/// Deviance-minimising threshold for a one-split form over `grid`; ties go
/// to the smallest threshold.
pub fn search_single_split(
    template: SplitTemplate,
    data: &Dataset,
    adjust: &[FormSpec],
    grid: &SplitGrid,
) -> Result<SearchResult> {
    if grid.variable != template.split_variable() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "grid is for covariate {} but the template splits covariate {}",
            grid.variable,
            template.split_variable()
        )));
    }
    if grid.thresholds.is_empty() {
        return Err(Error::EmptyGrid {
            variable: grid.variable,
        });
    }
    let candidates: Vec<FormSpec> = grid
        .thresholds
        .iter()
        .map(|&c| template.with_split(c))
        .collect();
    search_candidates(&candidates, data, adjust)
}

/// Every admissible second split of the piecewise-constant base
/// `I(x_j > c)`, ordered by split variable, then left before right node,
/// then ascending threshold. Thresholds are the quantile grid of the split
/// variable restricted to the node's observations, screened so that both
/// sub-nodes keep `min_node` observations.
pub fn second_split_candidates(
    data: &Dataset,
    j: usize,
    c: f64,
    split_variables: &[usize],
    grid_size: usize,
    min_node: usize,
) -> Vec<FormSpec> {
    let xj = data.covariate(j);
    let mut vars = split_variables.to_vec();
    vars.sort_unstable();
    vars.dedup();
    let mut out = Vec::new();
    for k in vars {
        let xk = data.covariate(k);
        for node in [Node::Left, Node::Right] {
            let in_node = |v: f64| match node {
                Node::Left => v <= c,
                Node::Right => v > c,
            };
            let values: Vec<f64> = xj
                .iter()
                .zip(xk)
                .filter(|(&a, _)| in_node(a))
                .map(|(_, &b)| b)
                .collect();
            for c2 in quantile_thresholds(&values, grid_size, min_node) {
                if k == j {
                    let ok = match node {
                        Node::Left => c2 < c,
                        Node::Right => c2 > c,
                    };
                    if !ok {
                        continue;
                    }
                }
                out.push(FormSpec::Tree {
                    j,
                    c,
                    second: SecondSplit { node, k, c2 },
                });
            }
        }
    }
    out
}

/// Best second split for a piecewise-constant `base` whose first split is
/// held fixed, searched over both nodes and all `split_variables`.
pub fn search_second_split(
    base: &FormSpec,
    data: &Dataset,
    adjust: &[FormSpec],
    split_variables: &[usize],
    grid_size: usize,
    min_node: usize,
) -> Result<SearchResult> {
    let FormSpec::PiecewiseConstant { j, c } = *base else {
        return Err(Error::InvalidConfig(
            "second-split search needs a piecewise-constant base".into(),
        ));
    };
    let candidates = second_split_candidates(data, j, c, split_variables, grid_size, min_node);
    if candidates.is_empty() {
        return Err(Error::AllCandidatesDegenerate);
    }
    search_candidates(&candidates, data, adjust)
}
