use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dendi::{CliError, Mode, Result, RunConfig};
use dendi_core::{Family, ModifierSet};

#[derive(Debug, Parser)]
#[command(
    name = "dendi",
    version,
    about = "Detect functional forms of continuous covariates"
)]
struct Args {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// CSV file with a header row (analyze).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    outcome: Option<String>,
    #[arg(long, value_delimiter = ',')]
    covariates: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    confounders: Option<Vec<String>>,
    /// gaussian, binomial or poisson.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    min_node: Option<usize>,
    #[arg(long)]
    se_multiplier: Option<f64>,
    /// all or step1-selected.
    #[arg(long)]
    candidate_modifiers: Option<String>,
    /// Simulation scenario 1-6 (simulate).
    #[arg(long)]
    scenario: Option<u8>,
    #[arg(long = "n", value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long = "sigma", value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all logical cores).
    #[arg(long)]
    workers: Option<usize>,
}

fn build_config(args: Args) -> Result<RunConfig> {
    let mut c = match &args.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $flag:expr;)*) => { $(if let Some(v) = $flag { c.$field = v; })* };
    }
    set! {
        mode <- args.mode;
        grid_size <- args.grid_size;
        min_node <- args.min_node;
        se_multiplier <- args.se_multiplier;
        covariate_columns <- args.covariates;
        confounder_columns <- args.confounders;
        ns <- args.ns;
        sigmas <- args.sigmas;
        replications <- args.replications;
        seed <- args.seed;
        output_dir <- args.out;
    }
    if args.input.is_some() {
        c.input_path = args.input;
    }
    if args.outcome.is_some() {
        c.outcome_column = args.outcome;
    }
    if args.scenario.is_some() {
        c.scenario = args.scenario;
    }
    if args.workers.is_some() {
        c.workers = args.workers;
    }
    if let Some(name) = args.family {
        c.family = Family::from_name(&name)
            .ok_or_else(|| CliError::Usage(format!("unknown family `{name}`")))?;
    }
    if let Some(name) = args.candidate_modifiers {
        c.candidate_modifiers = match name.as_str() {
            "all" => ModifierSet::All,
            "step1-selected" => ModifierSet::Step1Selected,
            _ => return Err(CliError::Usage(format!("unknown modifier set `{name}`"))),
        };
    }
    if args.config.is_none() && args.mode.is_none() {
        return Err(CliError::Usage("--mode or --config is required".into()));
    }
    c.validate()?;
    Ok(c)
}

fn execute(args: Args) -> Result<()> {
    let config = build_config(args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dendi::run(&config))?;
    log::info!("wrote {}", config.output_dir.join("report.json").display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
