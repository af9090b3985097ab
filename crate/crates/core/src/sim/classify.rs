use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::DendiReport;
use crate::forms::{FormKind, FormSpec};

/// Labels of one simulated run and whether each scenario target was hit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunClassification {
    /// Final form kind per covariate.
    pub labels: Vec<FormKind>,
    /// Modifier or second-split partner per covariate, when it is another covariate.
    pub partners: Vec<Option<usize>>,
    /// One entry per target of [`target_names`], same order.
    pub correct: Vec<bool>,
}

/// Row names of the detection table for scenario `id`.
pub fn target_names(id: u8) -> Vec<String> {
    let one = |s: &str| alloc::vec![String::from(s)];
    match id {
        1 => one("x1:L"),
        2 => one("x1:P"),
        3 => one("x1:A"),
        4 => one("x1:M"),
        5 => one("x1:T"),
        6 => alloc::vec!["x1(x2)".into(), "x3,x4".into(), "x5".into()],
        _ => Vec::new(),
    }
}

fn is_tree_pair(f: &FormSpec, a: usize, b: usize) -> bool {
    matches!(*f, FormSpec::Tree { j, second, .. }
        if (j == a && second.k == b) || (j == b && second.k == a))
}

/// Maps every covariate's final form to its label and scores the targets
/// of scenario `id`. The x3/x4 interaction counts once whichever of the two
/// covariates carries the tree.
pub fn classify(report: &DendiReport, id: u8) -> RunClassification {
    let forms = &report.joint.forms;
    let labels: Vec<FormKind> = forms.iter().map(FormSpec::kind).collect();
    let partners = forms.iter().map(FormSpec::partner).collect();
    let f0 = forms[0];
    let correct = match id {
        1 => alloc::vec![labels[0] == FormKind::Linear],
        2 => alloc::vec![labels[0] == FormKind::PiecewiseConstant],
        3 => alloc::vec![labels[0] == FormKind::AdditiveCombo],
        4 => alloc::vec![matches!(
            f0,
            FormSpec::MultiplicativeCombo { j: 0, k: 0, .. }
        )],
        5 => alloc::vec![matches!(f0, FormSpec::Tree { j: 0, second, .. } if second.k == 0)],
        6 => alloc::vec![
            matches!(f0, FormSpec::MultiplicativeCombo { j: 0, k: 1, .. }),
            forms.iter().any(|f| is_tree_pair(f, 2, 3)),
            labels[4] == FormKind::Null,
        ],
        _ => Vec::new(),
    };
    RunClassification {
        labels,
        partners,
        correct,
    }
}
