use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dendi_core::sim::GridResult;
use dendi_core::DendiReport;

use crate::error::{CliError, Result};
use crate::report::form_label;

/// Writes `contents` to `dir/name` through a temporary sibling file and a
/// rename, so a reader never sees a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))
}

fn tsv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn curves_tsv(r: &DendiReport) -> String {
    let rows = r.curves.iter().flat_map(|c| {
        let name = &r.covariate_names[c.covariate];
        (0..c.x.len()).map(move |i| {
            vec![
                name.clone(),
                c.x[i].to_string(),
                c.eta[i].to_string(),
                c.response[i].to_string(),
            ]
        })
    });
    tsv(&["covariate", "x", "eta", "response"], rows)
}

pub fn summary_txt(r: &DendiReport) -> String {
    let mut out = format!(
        "DENDI summary ({} observations, {} family)\n",
        r.n,
        r.family.name()
    );
    for (j, name) in r.covariate_names.iter().enumerate() {
        let _ = writeln!(
            out,
            "{name}: {}",
            r.final_form(j).describe(&r.covariate_names)
        );
    }
    if !r.interactions.is_empty() {
        let pairs: Vec<String> = r
            .interactions
            .iter()
            .map(|&(a, b)| format!("{} x {}", r.covariate_names[a], r.covariate_names[b]))
            .collect();
        let _ = writeln!(out, "interactions: {}", pairs.join(", "));
    }
    out
}

fn cell_name(n: usize, sigma: f64) -> String {
    format!("n={n},sigma={sigma}")
}

/// Targets as rows, one column per `(n, sigma)` cell.
pub fn detection_tsv(g: &GridResult) -> String {
    let t = &g.table;
    let names: Vec<String> = t.cells.iter().map(|k| cell_name(k.n, k.sigma)).collect();
    let mut header = vec!["target"];
    header.extend(names.iter().map(String::as_str));
    let rows = t.targets.iter().zip(&t.rates).map(|(target, rates)| {
        std::iter::once(target.clone())
            .chain(rates.iter().map(f64::to_string))
            .collect()
    });
    tsv(&header, rows)
}

/// Long-format label distribution: one row per cell, covariate and label.
pub fn labels_tsv(g: &GridResult) -> String {
    let rows = g.cells.iter().flat_map(|cell| {
        let r = cell.replications() as f64;
        (0..g.p).flat_map(move |j| {
            cell.label_counts(j)
                .into_iter()
                .map(move |((kind, partner), count)| {
                    vec![
                        cell.key.n.to_string(),
                        cell.key.sigma.to_string(),
                        format!("x{}", j + 1),
                        form_label(kind, partner),
                        count.to_string(),
                        (count as f64 / r).to_string(),
                    ]
                })
        })
    });
    tsv(
        &["n", "sigma", "covariate", "label", "count", "share"],
        rows,
    )
}

pub fn splits_tsv(g: &GridResult) -> String {
    let rows = g.cells.iter().flat_map(|cell| {
        (0..g.p).filter_map(move |j| {
            let s = cell.split_stats(j)?;
            let stats = [s.min, s.q1, s.median, s.mean, s.q3, s.max, s.sd];
            let mut row = vec![
                cell.key.n.to_string(),
                cell.key.sigma.to_string(),
                format!("x{}", j + 1),
                s.count.to_string(),
            ];
            row.extend(stats.iter().map(f64::to_string));
            Some(row)
        })
    });
    tsv(
        &[
            "n",
            "sigma",
            "covariate",
            "count",
            "min",
            "q1",
            "median",
            "mean",
            "q3",
            "max",
            "sd",
        ],
        rows,
    )
}
