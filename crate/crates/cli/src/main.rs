use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sdgnet_core::pipeline::{run_stage, ModelSource, PipelineConfig, Stage};
use sdgnet_core::synthetic::{generate, SyntheticSpec};
use sdgnet_core::Error;

/// Signed SDG indicator networks and synergy classification.
#[derive(Debug, Parser)]
#[command(name = "sdgnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and clean the panel; writes clean_panel.csv and drop_log.csv.
    Ingest(Overrides),
    /// Build per-country networks; writes nodes_<c>.csv and heatmap_<c>.csv.
    Network(Overrides),
    /// Compute per-indicator features; writes features_<c>.csv.
    Features(Overrides),
    /// Fit the pooled model on the stratified training split; writes model.json.
    Fit(Overrides),
    /// Fit (or load) the model and score it; writes eval.json.
    Evaluate(Overrides),
    /// Classify indicators; writes report_<c>.csv.
    Classify(Overrides),
    /// Per-country reports, heatmaps, bar and pie charts.
    Report(Overrides),
    /// Full pipeline with manifest.json.
    Run(Overrides),
    /// Write a seeded synthetic panel and scores file for trying the pipeline.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON pipeline configuration.
    #[arg(long)]
    config: PathBuf,
    /// Restrict per-country outputs to this country (repeatable).
    #[arg(long = "country")]
    countries: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    strong_threshold: Option<f64>,
    /// Use the published pooled-model coefficients instead of fitting.
    #[arg(long)]
    paper_model: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip SVG renderings.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 20)]
    countries: usize,
    #[arg(long, default_value_t = 60)]
    indicators: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory for panel.csv and scores.csv.
    #[arg(long)]
    out: PathBuf,
}

impl Overrides {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = PipelineConfig::from_file(&self.config)?;
        if !self.countries.is_empty() {
            cfg.countries = self.countries.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.strong_threshold {
            cfg.strong_threshold = t;
        }
        if self.paper_model {
            cfg.model_source = ModelSource::Published;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if self.no_svg {
            cfg.svg = false;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (stage, overrides) = match cli.command {
        Command::Ingest(o) => (Stage::Ingest, o),
        Command::Network(o) => (Stage::Network, o),
        Command::Features(o) => (Stage::Features, o),
        Command::Fit(o) => (Stage::Fit, o),
        Command::Evaluate(o) => (Stage::Evaluate, o),
        Command::Classify(o) => (Stage::Classify, o),
        Command::Report(o) => (Stage::Report, o),
        Command::Run(o) => (Stage::Run, o),
        Command::Synth(args) => return synth(args),
    };
    let cfg = overrides.config()?;
    let manifest = run_stage(&cfg, stage)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, f.path);
    }
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let data = generate(&SyntheticSpec {
        countries: args.countries,
        indicators: args.indicators,
        seed: args.seed,
        ..Default::default()
    });
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("panel.csv"), data.long_csv())?;
    std::fs::write(args.out.join("scores.csv"), data.scores_csv())?;
    println!("{}", args.out.join("panel.csv").display());
    println!("{}", args.out.join("scores.csv").display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
