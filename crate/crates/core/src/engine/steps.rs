use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{loocv_score, one_se_gate, DendiConfig, LoocvResult, ModifierSet, Recipe};
use crate::forms::{make_grid, search_candidates, second_split_candidates, FormKind, FormSpec};
use crate::glm::Dataset;
use crate::{Error, Result};

/// Result of one selection step for one covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub covariate: usize,
    /// Form carried forward: the winning candidate if it passed the gate,
    /// otherwise the step's reference form.
    pub selected: FormSpec,
    /// LOOCV of the model the candidates must beat (null model in step 1,
    /// the adjusted step-1 form in step 2).
    pub reference_loocv: LoocvResult,
    pub candidate_loocvs: BTreeMap<FormKind, LoocvResult>,
    /// Candidate kinds with no admissible configuration or too many failed folds.
    pub unavailable: Vec<FormKind>,
    /// Candidate kind with the best mean predictive log-likelihood.
    pub best_candidate: Option<FormKind>,
    pub gate_passed: bool,
}

/// Scores each candidate kind; returns the kinds in order with their
/// LOOCV (or `None` when unavailable).
fn score_kinds(
    kinds: &[(FormKind, Vec<FormSpec>)],
    adjust: &[FormSpec],
    data: &Dataset,
) -> Vec<(FormKind, Option<LoocvResult>)> {
    kinds
        .iter()
        .map(|(kind, cands)| {
            let res = if cands.is_empty() {
                None
            } else {
                loocv_score(&Recipe::search(cands.clone(), adjust.to_vec()), data).ok()
            };
            (*kind, res)
        })
        .collect()
}

/// Highest mean wins; on equal means the earlier kind is kept.
fn best_kind(scored: &[(FormKind, Option<LoocvResult>)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (_, r)) in scored.iter().enumerate() {
        let Some(r) = r else { continue };
        match best {
            Some(b) if scored[b].1.as_ref().is_some_and(|br| r.mean <= br.mean) => {}
            _ => best = Some(i),
        }
    }
    best
}

fn assemble(
    j: usize,
    reference: LoocvResult,
    scored: Vec<(FormKind, Option<LoocvResult>)>,
    best: Option<usize>,
    gate_passed: bool,
    selected: FormSpec,
) -> StepOutcome {
    let best_candidate = best.map(|b| scored[b].0);
    let mut candidate_loocvs = BTreeMap::new();
    let mut unavailable = Vec::new();
    for (kind, r) in scored {
        match r {
            Some(r) => {
                candidate_loocvs.insert(kind, r);
            }
            None => unavailable.push(kind),
        }
    }
    StepOutcome {
        covariate: j,
        selected,
        reference_loocv: reference,
        candidate_loocvs,
        unavailable,
        best_candidate,
        gate_passed,
    }
}

/// Step 1 for covariate `j`: linear versus piecewise constant (split
/// searched inside every fold), the better one gated against the null model.
pub fn step1(j: usize, data: &Dataset, config: &DendiConfig) -> Result<StepOutcome> {
    config.validate()?;
    if j >= data.p() {
        return Err(Error::DimensionMismatch(alloc::format!("no covariate {j}")));
    }
    let null = loocv_score(&Recipe::fixed(FormSpec::Null, Vec::new()), data)?;

    let grid = make_grid(data, j, config.grid_size, config.min_node).ok();
    let pc_cands: Vec<FormSpec> = grid
        .as_ref()
        .map(|g| {
            g.thresholds
                .iter()
                .map(|&c| FormSpec::PiecewiseConstant { j, c })
                .collect()
        })
        .unwrap_or_default();
    let kinds = [
        (FormKind::Linear, alloc::vec![FormSpec::Linear { j }]),
        (FormKind::PiecewiseConstant, pc_cands.clone()),
    ];
    let scored = score_kinds(&kinds, &[], data);
    let best = best_kind(&scored);

    let gate = best
        .and_then(|b| scored[b].1.as_ref())
        .is_some_and(|r| one_se_gate(r, &null, config));

    let selected = match (gate, best.map(|b| scored[b].0)) {
        (true, Some(FormKind::Linear)) => FormSpec::Linear { j },
        (true, Some(_)) => search_candidates(&pc_cands, data, &[])?.best_form,
        _ => FormSpec::Null,
    };
    Ok(assemble(j, null, scored, best, gate, selected))
}

fn modifier_list(j: usize, step1_all: &[StepOutcome], p: usize, set: ModifierSet) -> Vec<usize> {
    match set {
        ModifierSet::All => (0..p).collect(),
        ModifierSet::Step1Selected => (0..p)
            .filter(|&k| k == j || step1_all[k].selected != FormSpec::Null)
            .collect(),
    }
}

/// Step 2 for covariate `j`, which must have survived step 1. Candidates
/// are the children of the step-1 form; every fit is adjusted for the
/// step-1 forms of all other covariates. The best child must clear the gate
/// against the step-1 form refitted with the same adjustment.
pub fn step2(
    j: usize,
    step1_all: &[StepOutcome],
    data: &Dataset,
    config: &DendiConfig,
) -> Result<StepOutcome> {
    config.validate()?;
    if step1_all.len() != data.p() {
        return Err(Error::DimensionMismatch(
            "need one step-1 outcome per covariate".into(),
        ));
    }
    let base = step1_all[j].selected;
    let adjust: Vec<FormSpec> = step1_all
        .iter()
        .filter(|o| o.covariate != j && o.selected != FormSpec::Null)
        .map(|o| o.selected)
        .collect();
    let modifiers = modifier_list(j, step1_all, data.p(), config.candidate_modifiers);

    let kinds: [(FormKind, Vec<FormSpec>); 2] = match base {
        FormSpec::Linear { .. } => {
            let additive = make_grid(data, j, config.grid_size, config.min_node)
                .map(|g| {
                    g.thresholds
                        .iter()
                        .map(|&c| FormSpec::AdditiveCombo { j, c })
                        .collect()
                })
                .unwrap_or_default();
            let mut mult = Vec::new();
            for &k in &modifiers {
                if let Ok(g) = make_grid(data, k, config.grid_size, config.min_node) {
                    mult.extend(g.thresholds.iter().map(|&c| FormSpec::MultiplicativeCombo {
                        j,
                        k,
                        c,
                    }));
                }
            }
            [
                (FormKind::AdditiveCombo, additive),
                (FormKind::MultiplicativeCombo, mult),
            ]
        }
        FormSpec::PiecewiseConstant { c, .. } => [
            (
                FormKind::AdditiveCombo,
                alloc::vec![FormSpec::AdditiveCombo { j, c }],
            ),
            (
                FormKind::Tree,
                second_split_candidates(data, j, c, &modifiers, config.grid_size, config.min_node),
            ),
        ],
        other => {
            return Err(Error::InvalidConfig(alloc::format!(
                "step 2 needs a linear or piecewise-constant step-1 form, got {:?}",
                other.kind()
            )))
        }
    };

    let reference = loocv_score(&Recipe::fixed(base, adjust.clone()), data)?;
    let scored = score_kinds(&kinds, &adjust, data);
    let best = best_kind(&scored);
    let gate = best
        .and_then(|b| scored[b].1.as_ref())
        .is_some_and(|r| one_se_gate(r, &reference, config));

    let selected = match best {
        Some(b) if gate => search_candidates(&kinds[b].1, data, &adjust)?.best_form,
        _ => base,
    };
    Ok(assemble(j, reference, scored, best, gate, selected))
}
