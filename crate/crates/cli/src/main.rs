use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mafcut::{BiasMode, PriorMode, RunConfig};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "mafcut", version, about = "Figure-ground segmentation with exemplar shape priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic exemplar library and/or scene set.
    Gen(GenArgs),
    /// Segment one image and write its hypothesis pool.
    Segment(SegmentArgs),
    /// First/Best/pool-size statistics over a scene set.
    Eval(EvalArgs),
    /// Dump the parametric breakpoints of each candidate's energy.
    Breakpoints(BreakpointsArgs),
    /// Build the shape prior of each candidate without segmenting.
    Prior(PriorArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Number of library exemplars.
    #[arg(long)]
    library: Option<usize>,
    /// Library seed; scenes draw their poses from the library with this seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of scenes.
    #[arg(long)]
    scenes: Option<usize>,
    #[arg(long, default_value_t = 7)]
    scene_seed: u64,
    /// Probability that a scene has an occluder.
    #[arg(long, default_value_t = 0.3)]
    occlude: f64,
    /// Output directory. With both --library and --scenes, they go to
    /// OUT/library and OUT/scenes.
    #[arg(long, required = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Baseline {
    /// No shape prior; grid seeds instead of the skeleton.
    NoPrior,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    #[arg(long)]
    image: PathBuf,
    /// Candidate list (JSON with PGM masks beside it).
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long, required_unless_present = "baseline")]
    library: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Ground truth mask; adds First/Best to the report.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Also write each candidate's prior S (PGM) and skeleton B (JSON).
    #[arg(long)]
    dump_prior: bool,
    /// Run the comparison model instead.
    #[arg(long, value_enum, conflicts_with = "dump_prior")]
    baseline: Option<Baseline>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Scene set directory.
    #[arg(long)]
    scenes: PathBuf,
    #[arg(long)]
    library: PathBuf,
    /// Also evaluate the comparison model and report the difference.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct BreakpointsArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long)]
    library: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct PriorArgs {
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long)]
    library: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

/// `--config` file plus per-field overrides.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// JSON run configuration; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    sigma_sq: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    w_s: Option<f64>,
    #[arg(long)]
    w_p: Option<f64>,
    #[arg(long, value_parser = parse_kebab::<BiasMode>)]
    bias_mode: Option<BiasMode>,
    #[arg(long, value_parser = parse_kebab::<PriorMode>)]
    prior_mode: Option<PriorMode>,
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long)]
    boundary_samples: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    min_match_fraction: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_max: Option<f64>,
    #[arg(long)]
    delta_lambda: Option<f64>,
    #[arg(long)]
    nms_threshold: Option<f64>,
}

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, commands::Failure> {
        let mut c = match &self.config {
            // validated only after the flags are applied
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| e.to_string())
                .and_then(|text| serde_json::from_str(&text).map_err(|e| e.to_string()))
                .map_err(|e| commands::Failure::Usage(format!("{}: {e}", p.display())))?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        set!(gamma, sigma_sq, k, w_s, w_p, bias_mode, prior_mode, rng_seed, boundary_samples, mu, epsilon);
        set!(min_match_fraction, nms_threshold);
        if self.lambda_min.is_some() {
            c.lambda_min = self.lambda_min;
        }
        if self.lambda_max.is_some() {
            c.lambda_max = self.lambda_max;
        }
        if self.delta_lambda.is_some() {
            c.delta_lambda = self.delta_lambda;
        }
        c.validate().map_err(|e| commands::Failure::Usage(e.to_string()))?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Segment(a) => commands::segment(a),
        Command::Eval(a) => commands::eval(a),
        Command::Breakpoints(a) => commands::breakpoints(a),
        Command::Prior(a) => commands::prior(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
