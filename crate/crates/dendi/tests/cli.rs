use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dendi::report::{ColumnRef, ReportFile};
use dendi::{cmd_analyze, load_csv, CliError, Mode, RunConfig};
use dendi_core::sim::{generate, ScenarioSpec};
use dendi_core::{Dataset, Family, FormSpec, Node};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tempfile::TempDir;

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    fs::write(path, s).unwrap();
}

fn dataset_csv(dir: &Path, data: &Dataset) -> PathBuf {
    let path = dir.join("data.csv");
    let names: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();
    let mut header = vec!["y"];
    header.extend(names.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = (0..data.n())
        .map(|i| {
            std::iter::once(data.y()[i].to_string())
                .chain((0..data.p()).map(|j| data.covariate(j)[i].to_string()))
                .collect()
        })
        .collect();
    write_csv(&path, &header, &rows);
    path
}

fn analyze_config(input: &Path, out: &Path, p: usize) -> RunConfig {
    RunConfig {
        mode: Mode::Analyze,
        input_path: Some(input.to_path_buf()),
        outcome_column: Some("y".into()),
        covariate_columns: (1..=p).map(|j| format!("x{j}")).collect(),
        output_dir: out.to_path_buf(),
        ..RunConfig::default()
    }
}

fn row(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn small_config(dir: &Path, confounders: &[&str], family: Family) -> RunConfig {
    RunConfig {
        outcome_column: Some("y".into()),
        covariate_columns: vec!["x".into()],
        confounder_columns: confounders.iter().map(|s| s.to_string()).collect(),
        family,
        input_path: Some(dir.join("in.csv")),
        ..RunConfig::default()
    }
}

#[test]
fn three_row_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(
        &path,
        &["y", "x"],
        &[row(&["1", "0.5"]), row(&["2", "1.5"]), row(&["3", "-2"])],
    );
    let d = load_csv(
        &path,
        &small_config(dir.path(), &[], Family::GaussianIdentity),
    )
    .unwrap();
    assert_eq!((d.n(), d.p(), d.q()), (3, 1, 0));
    assert_eq!(d.covariate(0), &[0.5, 1.5, -2.0]);
    assert_eq!(d.y(), &[1.0, 2.0, 3.0]);
}

#[test]
fn categorical_confounder_becomes_indicators() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(
        &path,
        &["g", "y", "x"],
        &[
            row(&["c", "1", "0"]),
            row(&["a", "2", "1"]),
            row(&["b", "3", "2"]),
            row(&["a", "4", "3"]),
        ],
    );
    let d = load_csv(
        &path,
        &small_config(dir.path(), &["g"], Family::GaussianIdentity),
    )
    .unwrap();
    assert_eq!(d.q(), 2);
    assert_eq!(
        d.confounder_names(),
        &["g=b".to_string(), "g=c".to_string()]
    );
    assert_eq!(d.confounder(0), &[0.0, 0.0, 1.0, 0.0]);
    assert_eq!(d.confounder(1), &[1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn binomial_outcome_outside_support() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(
        &path,
        &["y", "x"],
        &[row(&["0", "1"]), row(&["2", "2"]), row(&["1", "3"])],
    );
    let err = load_csv(
        &path,
        &small_config(dir.path(), &[], Family::BernoulliLogit),
    )
    .unwrap_err();
    match err {
        CliError::NonNumericValue {
            column,
            row,
            value,
            expected,
        } => {
            assert_eq!(
                (column.as_str(), row, value.as_str(), expected),
                ("y", 2, "2", "0 or 1")
            );
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn poisson_outcome_must_be_count() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(&path, &["y", "x"], &[row(&["0", "1"]), row(&["1.5", "2"])]);
    let err = load_csv(&path, &small_config(dir.path(), &[], Family::PoissonLog)).unwrap_err();
    assert!(
        matches!(err, CliError::NonNumericValue { row: 2, .. }),
        "{err:?}"
    );
}

#[test]
fn non_numeric_covariate() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(&path, &["y", "x"], &[row(&["1", "1"]), row(&["2", "abc"])]);
    let err = load_csv(
        &path,
        &small_config(dir.path(), &[], Family::GaussianIdentity),
    )
    .unwrap_err();
    assert!(
        matches!(&err, CliError::NonNumericValue { column, row: 2, .. } if column == "x"),
        "{err:?}"
    );
}

#[test]
fn rows_with_missing_values_are_dropped() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(
        &path,
        &["y", "x", "unused"],
        &[
            row(&["1", "1", ""]),
            row(&["NA", "2", "5"]),
            row(&["3", "", "5"]),
            row(&["4", "4", "NA"]),
        ],
    );
    let d = load_csv(
        &path,
        &small_config(dir.path(), &[], Family::GaussianIdentity),
    )
    .unwrap();
    assert_eq!(d.y(), &[1.0, 4.0]);
    assert_eq!(d.covariate(0), &[1.0, 4.0]);
}

#[test]
fn missing_column_and_empty_input() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("in.csv");
    write_csv(&path, &["y", "w"], &[row(&["1", "1"])]);
    let err = load_csv(
        &path,
        &small_config(dir.path(), &[], Family::GaussianIdentity),
    )
    .unwrap_err();
    assert!(
        matches!(&err, CliError::MissingColumn(c) if c == "x"),
        "{err:?}"
    );

    write_csv(&path, &["y", "x"], &[row(&["1", "NA"]), row(&["", "2"])]);
    let err = load_csv(
        &path,
        &small_config(dir.path(), &[], Family::GaussianIdentity),
    )
    .unwrap_err();
    assert!(
        matches!(err, CliError::EmptyAfterFiltering { dropped: 2 }),
        "{err:?}"
    );
}

/// Candidate thresholds recomputed from the sorted sample: lower order
/// statistics at index i(n-1)/(g+1), kept when both sides hold at least
/// `min_node` points.
fn grid(values: &[f64], g: usize, min_node: usize) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let mut out = Vec::new();
    for i in 1..=g {
        let c = s[i * (n - 1) / (g + 1)];
        let left = s.iter().filter(|&&v| v <= c).count();
        if left >= min_node && n - left >= min_node && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn two_group_rss(x: &[f64], y: &[f64], c: f64) -> f64 {
    let mut sums = [(0.0, 0.0, 0.0); 2];
    for (&xi, &yi) in x.iter().zip(y) {
        let g = &mut sums[usize::from(xi > c)];
        g.0 += 1.0;
        g.1 += yi;
        g.2 += yi * yi;
    }
    sums.iter().map(|(n, s, ss)| ss - s * s / n).sum()
}

#[test]
fn analyze_scenario_two_finds_the_step() {
    let dir = TempDir::new().unwrap();
    let data = generate(&ScenarioSpec::new(2, 800, 1.0, 4242).unwrap());
    let input = dataset_csv(dir.path(), &data);
    let out = dir.path().join("out");
    let report = cmd_analyze(&analyze_config(&input, &out, 1)).unwrap();

    let x = data.covariate(0);
    let best = grid(x, 9, 10)
        .into_iter()
        .min_by(|a, b| two_group_rss(x, data.y(), *a).total_cmp(&two_group_rss(x, data.y(), *b)))
        .unwrap();
    let cov = &report.analysis.as_ref().unwrap().covariates[0];
    assert_eq!(
        cov.selected_form,
        FormSpec::PiecewiseConstant { j: 0, c: best }
    );
    assert!(best.abs() < 0.15, "split {best}");

    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(
        summary.contains(&format!("x1: piecewise constant with split at {best}")),
        "{summary}"
    );
    let curves = fs::read_to_string(out.join("curves.tsv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + 101);
}

#[test]
fn noise_covariate_reports_no_effect() {
    let dir = TempDir::new().unwrap();
    let data = generate(&ScenarioSpec::new(6, 500, 1.0, 99).unwrap());
    let input = dataset_csv(dir.path(), &data);
    let out = dir.path().join("out");
    cmd_analyze(&analyze_config(&input, &out, 5)).unwrap();
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("x5: no effect detected"), "{summary}");
}

#[test]
fn binomial_threshold_selects_piecewise_constant() {
    let dir = TempDir::new().unwrap();
    // a single draw; over 20 seeds of this design 19 end piecewise constant
    let mut r = ChaCha8Rng::seed_from_u64(31);
    let n = 600;
    let rows: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let x: f64 = r.sample(StandardNormal);
            let p = if x > 0.0 { 0.8 } else { 0.2 };
            let y = u8::from(r.random::<f64>() < p);
            vec![y.to_string(), x.to_string()]
        })
        .collect();
    let input = dir.path().join("data.csv");
    write_csv(&input, &["y", "x1"], &rows);
    let out = dir.path().join("out");
    let config = RunConfig {
        family: Family::BernoulliLogit,
        ..analyze_config(&input, &out, 1)
    };
    let report = cmd_analyze(&config).unwrap();
    let form = report.analysis.unwrap().covariates[0].selected_form;
    assert!(
        matches!(form, FormSpec::PiecewiseConstant { c, .. } if c.abs() < 0.3),
        "{form:?}"
    );
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Design column `column` of `form` at one covariate row.
fn form_column(form: &FormSpec, column: usize, x: &[f64]) -> f64 {
    match (*form, column) {
        (FormSpec::Linear { j }, 0) => x[j],
        (FormSpec::PiecewiseConstant { j, c }, 0) => ind(x[j] > c),
        (FormSpec::AdditiveCombo { j, .. }, 0) | (FormSpec::MultiplicativeCombo { j, .. }, 0) => {
            x[j]
        }
        (FormSpec::AdditiveCombo { j, c }, 1) => ind(x[j] > c),
        (FormSpec::MultiplicativeCombo { j, k, c }, 1) if k == j => ind(x[j] > c) * (x[j] - c),
        (FormSpec::MultiplicativeCombo { j, k, c }, 1) => ind(x[k] > c) * x[j],
        (FormSpec::Tree { j, c, .. }, 0) => ind(x[j] > c),
        (FormSpec::Tree { j, c, second }, 1) => {
            let in_node = match second.node {
                Node::Left => x[j] <= c,
                Node::Right => x[j] > c,
            };
            ind(in_node && x[second.k] > second.c2)
        }
        other => panic!("no column {other:?}"),
    }
}

#[test]
fn curves_match_report_coefficients() {
    let dir = TempDir::new().unwrap();
    let data = generate(&ScenarioSpec::new(6, 400, 1.0, 5).unwrap());
    let input = dataset_csv(dir.path(), &data);
    let out = dir.path().join("out");
    cmd_analyze(&analyze_config(&input, &out, 5)).unwrap();
    let report =
        ReportFile::from_json(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let analysis = report.analysis.unwrap();
    let forms: Vec<FormSpec> = analysis
        .covariates
        .iter()
        .map(|c| c.selected_form)
        .collect();
    let medians: Vec<f64> = analysis.covariates.iter().map(|c| c.median).collect();

    let curves = fs::read_to_string(out.join("curves.tsv")).unwrap();
    let mut lines = curves.lines();
    assert_eq!(lines.next(), Some("covariate\tx\teta\tresponse"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split('\t').collect();
        let j: usize = f[0][1..].parse::<usize>().unwrap() - 1;
        let (xv, eta): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        let mut row = medians.clone();
        row[j] = xv;
        let direct: f64 = analysis
            .joint
            .columns
            .iter()
            .map(|col| {
                col.coefficient
                    * match col.source {
                        ColumnRef::Intercept => 1.0,
                        ColumnRef::Form { covariate, column } => {
                            form_column(&forms[covariate], column, &row)
                        }
                        ColumnRef::Confounder { .. } => 0.0,
                    }
            })
            .sum();
        assert!((direct - eta).abs() <= 1e-10, "{line}: {direct}");
        let response: f64 = f[3].parse().unwrap();
        assert_eq!(response, eta);
        count += 1;
    }
    assert_eq!(count, 5 * 101);
}

#[test]
fn report_round_trips() {
    let dir = TempDir::new().unwrap();
    let data = generate(&ScenarioSpec::new(6, 300, 1.5, 8).unwrap());
    let input = dataset_csv(dir.path(), &data);
    let out = dir.path().join("out");
    let report = cmd_analyze(&analyze_config(&input, &out, 5)).unwrap();
    let text = fs::read_to_string(out.join("report.json")).unwrap();
    let parsed = ReportFile::from_json(&text).unwrap();
    assert_eq!(parsed, report);
    assert_eq!(parsed.to_json().unwrap(), text);
}

fn dendi(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dendi"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn without_lines(text: &str, keys: &[&str]) -> String {
    text.lines()
        .filter(|l| !keys.iter().any(|k| l.trim_start().starts_with(k)))
        .fold(String::new(), |mut s, l| {
            let _ = writeln!(s, "{l}");
            s
        })
}

#[test]
fn zero_replications_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = dendi(&[
        "--mode",
        "simulate",
        "--scenario",
        "1",
        "--n",
        "200",
        "--sigma",
        "1",
        "--replications",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.join("report.json").exists());
}

#[test]
fn analyze_failure_exits_nonzero_without_report() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.csv");
    write_csv(&input, &["y", "x"], &[row(&["1", "1"])]);
    let out = dir.path().join("out");
    let o = dendi(&[
        "--mode",
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--outcome",
        "y",
        "--covariates",
        "nope",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
    assert!(!out.join("report.json").exists());
}

#[test]
fn output_is_identical_across_runs_and_worker_counts() {
    let dir = TempDir::new().unwrap();
    let data = generate(&ScenarioSpec::new(6, 300, 1.0, 17).unwrap());
    let input = dataset_csv(dir.path(), &data);
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = dendi(&[
            "--mode",
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--outcome",
            "y",
            "--covariates",
            "x1,x2,x3,x4,x5",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a", "4");
    let b = run("b", "4");
    let c = run("c", "1");
    for file in ["curves.tsv", "summary.txt"] {
        let fa = fs::read(a.join(file)).unwrap();
        assert_eq!(fa, fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(fa, fs::read(c.join(file)).unwrap(), "{file}");
    }
    let report = |d: &Path| fs::read_to_string(d.join("report.json")).unwrap();
    let strip = |t: &str| {
        without_lines(
            t,
            &["\"wall_time_seconds\"", "\"output_dir\"", "\"workers\""],
        )
    };
    assert_eq!(
        without_lines(&report(&a), &["\"wall_time_seconds\""]).replace("/a\"", "/b\""),
        without_lines(&report(&b), &["\"wall_time_seconds\""])
    );
    assert_eq!(strip(&report(&a)), strip(&report(&c)));
}

#[test]
fn simulate_writes_tables() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = dendi(&[
        "--mode",
        "simulate",
        "--scenario",
        "6",
        "--n",
        "200,300",
        "--sigma",
        "1",
        "--replications",
        "3",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let detection = fs::read_to_string(out.join("detection.tsv")).unwrap();
    let rows: Vec<Vec<&str>> = detection.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["target", "n=200,sigma=1", "n=300,sigma=1"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1][0], "x1(x2)");
    for r in &rows[1..] {
        for v in &r[1..] {
            let rate: f64 = v.parse().unwrap();
            assert!((0.0..=1.0).contains(&rate) && (rate * 3.0).fract().abs() < 1e-9);
        }
    }

    let labels = fs::read_to_string(out.join("labels.tsv")).unwrap();
    let mut lines = labels.lines();
    assert_eq!(
        lines.next(),
        Some("n\tsigma\tcovariate\tlabel\tcount\tshare")
    );
    let mut totals = std::collections::BTreeMap::new();
    for l in lines {
        let f: Vec<&str> = l.split('\t').collect();
        *totals
            .entry((f[0].to_string(), f[2].to_string()))
            .or_insert(0) += f[4].parse::<usize>().unwrap();
    }
    assert_eq!(totals.len(), 2 * 5);
    assert!(totals.values().all(|&t| t == 3));

    let splits = fs::read_to_string(out.join("splits.tsv")).unwrap();
    assert!(splits.starts_with("n\tsigma\tcovariate\tcount\tmin\tq1\tmedian\tmean\tq3\tmax\tsd\n"));
    for l in splits.lines().skip(1) {
        assert_eq!(l.split('\t').count(), 11);
    }

    let report =
        ReportFile::from_json(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let sim = report.simulation.unwrap();
    assert_eq!(sim.cells.len(), 2);
    assert_eq!(sim.targets.len(), 3);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"mode": "simulate", "scenario": 1, "ns": [200], "sigmas": [1.0], "replications": 2, "seed": 5, "output_dir": "ignored"}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = dendi(&[
        "--config",
        cfg.to_str().unwrap(),
        "--replications",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report =
        ReportFile::from_json(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.config.replications, 3);
    assert_eq!(report.config.seed, 5);
    assert_eq!(report.simulation.unwrap().replications, 3);
    assert!(!Path::new("ignored").exists());

    fs::write(&cfg, r#"{"mode": "simulate", "bogus": 1}"#).unwrap();
    let o = dendi(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
