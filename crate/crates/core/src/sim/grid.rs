use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{classify, generate, target_names, RunClassification, ScenarioSpec};
use crate::engine::{run_dendi, DendiConfig};
use crate::forms::FormKind;
use crate::math::{mean, sample_variance, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub n: usize,
    pub sigma: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` in cell `(n, sigma)`. Depends only on its
/// arguments, so cells and replications can run in any order.
pub fn replication_seed(base_seed: u64, scenario: u8, n: usize, sigma: f64, rep: usize) -> u64 {
    let mut h = splitmix64(base_seed);
    for v in [u64::from(scenario), n as u64, sigma.to_bits(), rep as u64] {
        h = splitmix64(h ^ v);
    }
    h
}

/// Summary of selected split points (the outermost split of each run's
/// final form).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitStats {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    pub sd: f64,
}

fn quantile7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl SplitStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        Some(SplitStats {
            count: s.len(),
            min: s[0],
            q1: quantile7(&s, 0.25),
            median: quantile7(&s, 0.5),
            mean: mean(&s),
            q3: quantile7(&s, 0.75),
            max: s[s.len() - 1],
            sd: sqrt(sample_variance(&s)),
        })
    }
}

/// All replications of one `(n, sigma)` setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    /// `None` for a replication whose analysis returned an error; it counts
    /// as a miss for every target.
    pub runs: Vec<Option<RunClassification>>,
    /// Per replication and covariate, the outermost split of the final form.
    pub splits: Vec<Vec<Option<f64>>>,
}

impl CellResult {
    pub fn replications(&self) -> usize {
        self.runs.len()
    }

    pub fn failed_runs(&self) -> usize {
        self.runs.iter().filter(|r| r.is_none()).count()
    }

    /// Share of replications in which target `t` was correctly identified.
    pub fn detection_rate(&self, t: usize) -> f64 {
        let hits = self
            .runs
            .iter()
            .flatten()
            .filter(|r| r.correct.get(t).copied().unwrap_or(false))
            .count();
        hits as f64 / self.runs.len() as f64
    }

    /// Share of replications selecting `kind` for covariate `j` (any partner).
    pub fn selection_rate(&self, j: usize, kind: FormKind) -> f64 {
        let hits = self
            .runs
            .iter()
            .flatten()
            .filter(|r| r.labels[j] == kind)
            .count();
        hits as f64 / self.runs.len() as f64
    }

    /// Counts of `(label, partner)` for covariate `j`; failed runs are not counted.
    pub fn label_counts(&self, j: usize) -> BTreeMap<(FormKind, Option<usize>), usize> {
        let mut m = BTreeMap::new();
        for r in self.runs.iter().flatten() {
            *m.entry((r.labels[j], r.partners[j])).or_insert(0) += 1;
        }
        m
    }

    pub fn split_stats(&self, j: usize) -> Option<SplitStats> {
        let v: Vec<f64> = self.splits.iter().filter_map(|s| s[j]).collect();
        SplitStats::from_values(&v)
    }
}

/// Detection proportions: one row per target, one column per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionTable {
    pub targets: Vec<String>,
    pub cells: Vec<CellKey>,
    pub rates: Vec<Vec<f64>>,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub scenario: u8,
    pub p: usize,
    pub base_seed: u64,
    pub cells: Vec<CellResult>,
    pub table: DetectionTable,
}

fn run_cell(
    scenario: u8,
    key: CellKey,
    replications: usize,
    config: &DendiConfig,
    base_seed: u64,
) -> Result<CellResult> {
    let p = ScenarioSpec::new(scenario, key.n, key.sigma, 0)?.p();
    let outcomes = crate::par::map_range(replications, |rep| {
        let seed = replication_seed(base_seed, scenario, key.n, key.sigma, rep);
        let spec = ScenarioSpec {
            id: scenario,
            n: key.n,
            sigma: key.sigma,
            seed,
        };
        let data = generate(&spec);
        match run_dendi(&data, config) {
            Ok(report) => {
                let splits = report
                    .joint
                    .forms
                    .iter()
                    .map(|f| f.split_points().first().map(|s| s.1))
                    .collect();
                (Some(classify(&report, scenario)), splits)
            }
            Err(_) => (None, alloc::vec![None; p]),
        }
    });
    let (runs, splits) = outcomes.into_iter().unzip();
    Ok(CellResult { key, runs, splits })
}

/// Replicates scenario `scenario` over every `(n, sigma)` combination
/// (n-major order) and tabulates detection rates.
pub fn run_grid(
    scenario: u8,
    ns: &[usize],
    sigmas: &[f64],
    replications: usize,
    config: &DendiConfig,
    base_seed: u64,
) -> Result<GridResult> {
    if replications == 0 {
        return Err(Error::InvalidConfig("replications must be >= 1".into()));
    }
    if ns.is_empty() || sigmas.is_empty() {
        return Err(Error::InvalidConfig(
            "need at least one n and one sigma".into(),
        ));
    }
    config.validate()?;
    let mut keys = Vec::new();
    for &n in ns {
        for &sigma in sigmas {
            ScenarioSpec::new(scenario, n, sigma, 0)?;
            keys.push(CellKey { n, sigma });
        }
    }
    let cells: Vec<CellResult> = keys
        .iter()
        .map(|&k| run_cell(scenario, k, replications, config, base_seed))
        .collect::<Result<_>>()?;
    let targets = target_names(scenario);
    let rates = (0..targets.len())
        .map(|t| cells.iter().map(|c| c.detection_rate(t)).collect())
        .collect();
    let p = ScenarioSpec::new(scenario, 1, 1.0, 0)?.p();
    Ok(GridResult {
        scenario,
        p,
        base_seed,
        table: DetectionTable {
            targets,
            cells: keys,
            rates,
            replications,
        },
        cells,
    })
}
