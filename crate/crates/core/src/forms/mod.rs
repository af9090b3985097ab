//! The nested family of predictor forms for one covariate, their design
//! columns, quantile split grids and deviance-minimising split search.
//!
//! ```text
//!                      Null
//!              /                \
//!          Linear          PiecewiseConstant
//!         /      \           /          \
//!   Additive  Multiplicative  Additive    Tree
//! ```
//!
//! Each form is a parent of its children: the child's design spans the
//! parent's, so its deviance can only be lower on the same data.

mod build;
mod grid;
mod search;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use build::{build_design, form_columns};
pub use grid::{make_grid, quantile_thresholds, SplitGrid};
pub use search::{
    search_candidates, search_second_split, search_single_split, second_split_candidates,
    SearchResult,
};

pub(crate) use search::improves;

/// Which of the two nodes created by the first split receives the second split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Node {
    /// `x_j <= c`
    Left,
    /// `x_j > c`
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SecondSplit {
    pub node: Node,
    /// Split variable; equal to the tree's own covariate for a univariable tree.
    pub k: usize,
    pub c2: f64,
}

/// One predictor form for covariate `j`. Covariate indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "form", rename_all = "snake_case")
)]
pub enum FormSpec {
    Null,
    Linear {
        j: usize,
    },
    PiecewiseConstant {
        j: usize,
        c: f64,
    },
    AdditiveCombo {
        j: usize,
        c: f64,
    },
    /// Slope of `x_j` changes where `x_k` crosses `c`. With `k == j` the
    /// hinge `I(x_j > c)(x_j - c)` keeps the fit continuous.
    MultiplicativeCombo {
        j: usize,
        k: usize,
        c: f64,
    },
    Tree {
        j: usize,
        c: f64,
        second: SecondSplit,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FormKind {
    Null,
    Linear,
    PiecewiseConstant,
    AdditiveCombo,
    MultiplicativeCombo,
    Tree,
}

impl FormKind {
    pub const ALL: [FormKind; 6] = [
        FormKind::Null,
        FormKind::Linear,
        FormKind::PiecewiseConstant,
        FormKind::AdditiveCombo,
        FormKind::MultiplicativeCombo,
        FormKind::Tree,
    ];

    /// One-letter label: N, L, P, A, M or T.
    pub fn code(self) -> char {
        match self {
            FormKind::Null => 'N',
            FormKind::Linear => 'L',
            FormKind::PiecewiseConstant => 'P',
            FormKind::AdditiveCombo => 'A',
            FormKind::MultiplicativeCombo => 'M',
            FormKind::Tree => 'T',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        FormKind::ALL.into_iter().find(|k| k.code() == c)
    }
}

impl FormSpec {
    pub fn kind(&self) -> FormKind {
        match self {
            FormSpec::Null => FormKind::Null,
            FormSpec::Linear { .. } => FormKind::Linear,
            FormSpec::PiecewiseConstant { .. } => FormKind::PiecewiseConstant,
            FormSpec::AdditiveCombo { .. } => FormKind::AdditiveCombo,
            FormSpec::MultiplicativeCombo { .. } => FormKind::MultiplicativeCombo,
            FormSpec::Tree { .. } => FormKind::Tree,
        }
    }

    /// Covariate whose effect this form describes.
    pub fn covariate(&self) -> Option<usize> {
        match *self {
            FormSpec::Null => None,
            FormSpec::Linear { j }
            | FormSpec::PiecewiseConstant { j, .. }
            | FormSpec::AdditiveCombo { j, .. }
            | FormSpec::MultiplicativeCombo { j, .. }
            | FormSpec::Tree { j, .. } => Some(j),
        }
    }

    /// The other covariate of a two-covariate form (effect modifier or
    /// second split variable), if it differs from the form's own covariate.
    pub fn partner(&self) -> Option<usize> {
        match *self {
            FormSpec::MultiplicativeCombo { j, k, .. } if k != j => Some(k),
            FormSpec::Tree { j, second, .. } if second.k != j => Some(second.k),
            _ => None,
        }
    }

    /// `(variable, threshold)` for every split in the form, outermost first.
    pub fn split_points(&self) -> Vec<(usize, f64)> {
        match *self {
            FormSpec::Null | FormSpec::Linear { .. } => vec![],
            FormSpec::PiecewiseConstant { j, c } | FormSpec::AdditiveCombo { j, c } => {
                vec![(j, c)]
            }
            FormSpec::MultiplicativeCombo { k, c, .. } => vec![(k, c)],
            FormSpec::Tree { j, c, second } => vec![(j, c), (second.k, second.c2)],
        }
    }

    /// Plain-language description using the given covariate names.
    pub fn describe(&self, names: &[String]) -> String {
        let nm = |i: usize| {
            names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i + 1))
        };
        match *self {
            FormSpec::Null => String::from("no effect detected"),
            FormSpec::Linear { .. } => String::from("linear"),
            FormSpec::PiecewiseConstant { c, .. } => {
                format!("piecewise constant with split at {c}")
            }
            FormSpec::AdditiveCombo { c, .. } => {
                format!("linear plus a jump (intercept break) at {c}")
            }
            FormSpec::MultiplicativeCombo { j, k, c } if k == j => {
                format!("linear with a change in slope (structural break) at {c}")
            }
            FormSpec::MultiplicativeCombo { k, c, .. } => {
                format!("linear with slope modified by {} > {c}", nm(k))
            }
            FormSpec::Tree { j, c, second } => {
                let node = match second.node {
                    Node::Left => format!("{} <= {c}", nm(j)),
                    Node::Right => format!("{} > {c}", nm(j)),
                };
                if second.k == j {
                    format!(
                        "piecewise constant with splits at {c} and {} (second split in {node})",
                        second.c2
                    )
                } else {
                    format!(
                        "tree-structured interaction: split at {c}, then {} > {} within {node}",
                        nm(second.k),
                        second.c2
                    )
                }
            }
        }
    }
}

/// A form family whose split threshold is still free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitTemplate {
    PiecewiseConstant { j: usize },
    AdditiveCombo { j: usize },
    MultiplicativeCombo { j: usize, k: usize },
}

impl SplitTemplate {
    /// Variable whose values the threshold is taken from.
    pub fn split_variable(self) -> usize {
        match self {
            SplitTemplate::PiecewiseConstant { j } | SplitTemplate::AdditiveCombo { j } => j,
            SplitTemplate::MultiplicativeCombo { k, .. } => k,
        }
    }

    pub fn with_split(self, c: f64) -> FormSpec {
        match self {
            SplitTemplate::PiecewiseConstant { j } => FormSpec::PiecewiseConstant { j, c },
            SplitTemplate::AdditiveCombo { j } => FormSpec::AdditiveCombo { j, c },
            SplitTemplate::MultiplicativeCombo { j, k } => {
                FormSpec::MultiplicativeCombo { j, k, c }
            }
        }
    }
}
