use std::fs;
use std::time::Instant;

use dendi_core::run_dendi;
use dendi_core::sim::run_grid;

use crate::config::{Mode, RunConfig};
use crate::error::{CliError, Result};
use crate::load::load_csv;
use crate::output::{curves_tsv, detection_tsv, labels_tsv, splits_tsv, summary_txt, write_atomic};
use crate::report::{AnalysisReport, ReportFile, SimulationReport, SOFTWARE};

fn prepare_output(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.output_dir).map_err(|e| CliError::io(&config.output_dir, e))
}

/// Runs the selection procedure on a CSV file and writes `report.json`,
/// `curves.tsv` and `summary.txt`.
pub fn cmd_analyze(config: &RunConfig) -> Result<ReportFile> {
    config.validate()?;
    let start = Instant::now();
    let input = config.input_path.as_deref().expect("validated");
    let data = load_csv(input, config)?;
    log::info!(
        "loaded {} rows, {} covariates, {} confounder columns",
        data.n(),
        data.p(),
        data.q()
    );
    let report = run_dendi(&data, &config.engine())?;

    prepare_output(config)?;
    let dir = &config.output_dir;
    write_atomic(dir, "curves.tsv", &curves_tsv(&report))?;
    let summary = summary_txt(&report);
    write_atomic(dir, "summary.txt", &summary)?;
    log::info!("\n{summary}");

    let file = ReportFile {
        software: SOFTWARE.to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config.clone(),
        analysis: Some(AnalysisReport::from_report(&report)),
        simulation: None,
    };
    write_atomic(dir, "report.json", &file.to_json()?)?;
    Ok(file)
}

/// Replicates a simulation scenario over the configured grid and writes
/// `detection.tsv`, `labels.tsv`, `splits.tsv` and `report.json`.
pub fn cmd_simulate(config: &RunConfig) -> Result<ReportFile> {
    config.validate()?;
    let start = Instant::now();
    let scenario = config.scenario.expect("validated");
    let grid = run_grid(
        scenario,
        &config.ns,
        &config.sigmas,
        config.replications,
        &config.engine(),
        config.seed,
    )?;

    prepare_output(config)?;
    let dir = &config.output_dir;
    write_atomic(dir, "detection.tsv", &detection_tsv(&grid))?;
    write_atomic(dir, "labels.tsv", &labels_tsv(&grid))?;
    write_atomic(dir, "splits.tsv", &splits_tsv(&grid))?;

    let file = ReportFile {
        software: SOFTWARE.to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: config.clone(),
        analysis: None,
        simulation: Some(SimulationReport::from_grid(&grid)),
    };
    write_atomic(dir, "report.json", &file.to_json()?)?;
    Ok(file)
}

pub fn run(config: &RunConfig) -> Result<ReportFile> {
    match config.mode {
        Mode::Analyze => cmd_analyze(config),
        Mode::Simulate => cmd_simulate(config),
    }
}
