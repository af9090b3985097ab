use std::collections::BTreeMap;
use std::io;

use dendi_core::sim::{GridResult, SplitStats};
use dendi_core::{ColumnSource, DendiReport, Family, FormKind, FormSpec, LoocvResult, StepOutcome};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;

pub const SOFTWARE: &str = concat!("dendi ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub software: String,
    pub wall_time_seconds: f64,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub family: Family,
    pub covariates: Vec<CovariateReport>,
    /// Covariate name pairs linked by a two-covariate form.
    pub interactions: Vec<(String, String)>,
    pub joint: JointReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateReport {
    pub name: String,
    pub selected_form: FormSpec,
    pub description: String,
    pub split_points: Vec<SplitPoint>,
    pub median: f64,
    /// Joint-fit coefficients of this covariate's columns.
    pub coefficients: Vec<Coefficient>,
    pub step1: StepReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step2: Option<StepReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPoint {
    pub variable: String,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoocvSummary {
    pub mean: f64,
    pub se: f64,
    pub failed_folds: usize,
}

impl From<&LoocvResult> for LoocvSummary {
    fn from(r: &LoocvResult) -> Self {
        LoocvSummary {
            mean: r.mean,
            se: r.se,
            failed_folds: r.n_failed_folds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub selected: FormSpec,
    pub reference: LoocvSummary,
    pub candidates: BTreeMap<FormKind, LoocvSummary>,
    pub unavailable: Vec<FormKind>,
    pub best: Option<FormKind>,
    pub gate_passed: bool,
}

impl From<&StepOutcome> for StepReport {
    fn from(o: &StepOutcome) -> Self {
        StepReport {
            selected: o.selected,
            reference: (&o.reference_loocv).into(),
            candidates: o
                .candidate_loocvs
                .iter()
                .map(|(k, v)| (*k, v.into()))
                .collect(),
            unavailable: o.unavailable.clone(),
            best: o.best_candidate,
            gate_passed: o.gate_passed,
        }
    }
}

/// Where a joint-fit column comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnRef {
    Intercept,
    /// Column `column` of covariate `covariate`'s selected form.
    Form {
        covariate: usize,
        column: usize,
    },
    Confounder {
        index: usize,
    },
}

impl From<ColumnSource> for ColumnRef {
    fn from(s: ColumnSource) -> Self {
        match s {
            ColumnSource::Intercept => ColumnRef::Intercept,
            // Form 0 of the joint design is the empty primary form.
            ColumnSource::Form { form, column } => ColumnRef::Form {
                covariate: form - 1,
                column,
            },
            ColumnSource::Confounder(index) => ColumnRef::Confounder { index },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointColumn {
    pub label: String,
    pub source: ColumnRef,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointReport {
    pub columns: Vec<JointColumn>,
    pub dropped_columns: Vec<String>,
    pub deviance: f64,
    pub dispersion: f64,
    pub converged: bool,
}

impl AnalysisReport {
    pub fn from_report(r: &DendiReport) -> Self {
        let joint = &r.joint;
        let columns: Vec<JointColumn> = joint
            .column_labels
            .iter()
            .zip(&joint.column_sources)
            .zip(&joint.fit.coefficients)
            .map(|((label, src), &b)| JointColumn {
                label: label.clone(),
                source: (*src).into(),
                coefficient: b,
            })
            .collect();
        let names = &r.covariate_names;
        let covariates = (0..names.len())
            .map(|j| {
                let form = r.final_form(j);
                CovariateReport {
                    name: names[j].clone(),
                    selected_form: form,
                    description: form.describe(names),
                    split_points: form
                        .split_points()
                        .into_iter()
                        .map(|(v, c)| SplitPoint {
                            variable: names[v].clone(),
                            threshold: c,
                        })
                        .collect(),
                    median: r.medians[j],
                    coefficients: columns
                        .iter()
                        .filter(|c| matches!(c.source, ColumnRef::Form { covariate, .. } if covariate == j))
                        .map(|c| Coefficient {
                            label: c.label.clone(),
                            value: c.coefficient,
                        })
                        .collect(),
                    step1: (&r.step1[j]).into(),
                    step2: r.step2[j].as_ref().map(StepReport::from),
                }
            })
            .collect();
        AnalysisReport {
            n: r.n,
            family: r.family,
            covariates,
            interactions: r
                .interactions
                .iter()
                .map(|&(a, b)| (names[a].clone(), names[b].clone()))
                .collect(),
            joint: JointReport {
                columns,
                dropped_columns: joint.dropped_columns.clone(),
                deviance: joint.fit.deviance,
                dispersion: joint.fit.dispersion,
                converged: joint.fit.converged,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: u8,
    pub p: usize,
    pub base_seed: u64,
    pub replications: usize,
    pub targets: Vec<String>,
    pub cells: Vec<CellReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: usize,
    pub sigma: f64,
    pub failed_runs: usize,
    /// Detection rate per target, in `targets` order.
    pub detection: Vec<f64>,
    /// Per covariate, how often each final-form label was chosen.
    pub labels: Vec<BTreeMap<String, usize>>,
    pub splits: Vec<Option<SplitStats>>,
}

/// Label of a final form: its one-letter kind, plus the partner covariate
/// in parentheses for two-covariate forms, e.g. `M(x2)`.
pub fn form_label(kind: FormKind, partner: Option<usize>) -> String {
    match partner {
        Some(k) => format!("{}(x{})", kind.code(), k + 1),
        None => kind.code().to_string(),
    }
}

impl SimulationReport {
    pub fn from_grid(g: &GridResult) -> Self {
        let cells = g
            .cells
            .iter()
            .zip(0..)
            .map(|(cell, c)| CellReport {
                n: cell.key.n,
                sigma: cell.key.sigma,
                failed_runs: cell.failed_runs(),
                detection: g.table.rates.iter().map(|row| row[c]).collect(),
                labels: (0..g.p)
                    .map(|j| {
                        cell.label_counts(j)
                            .into_iter()
                            .map(|((kind, partner), count)| (form_label(kind, partner), count))
                            .collect()
                    })
                    .collect(),
                splits: (0..g.p).map(|j| cell.split_stats(j)).collect(),
            })
            .collect();
        SimulationReport {
            scenario: g.scenario,
            p: g.p,
            base_seed: g.base_seed,
            replications: g.table.replications,
            targets: g.table.targets.clone(),
            cells,
        }
    }
}

/// Formats `v` with 17 significant digits: positional notation for
/// decimal exponents in `-5..=16`, scientific otherwise.
pub fn format_f64(v: f64) -> String {
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..=16).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        if frac.is_empty() {
            format!("{sign}{int}.0")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

/// Pretty JSON formatter that writes every float via [`format_f64`].
struct Digits17<'a>(serde_json::ser::PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

impl ReportFile {
    pub fn to_json(&self) -> Result<String> {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(
            &mut out,
            Digits17(serde_json::ser::PrettyFormatter::with_indent(b"  ")),
        );
        self.serialize(&mut ser)?;
        out.push(b'\n');
        Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
