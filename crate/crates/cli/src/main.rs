use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tofplane::runner::{
    cmd_eval, cmd_fit, cmd_score, cmd_simulate, resolve_pipeline, FileConfig, PipelineFlags,
};
use tofplane_core::eval::Method;
use tofplane_core::mixture::{AicForm, ScoreForm};

/// Planar-deviation detection from time-of-flight transient histograms:
/// simulate datasets, fit surface models, score captures, run evaluations.
#[derive(Parser)]
#[command(name = "tofplane", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labeled dataset (JSONL plus manifest).
    Simulate(SimulateArgs),
    /// Fit a surface model to the planar frames of a dataset.
    Fit(FitArgs),
    /// Score every frame of a dataset under a fitted model.
    Score(ScoreArgs),
    /// Run an evaluation protocol and write a report bundle.
    Eval(EvalArgs),
    /// Shorthand for `eval --protocol ablation`.
    Ablate(AblateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    ForwardFacing,
    TopDown,
    CliffSweep,
    AmbiguityDemo,
    SensitivityDemo,
    Custom,
}

impl KindArg {
    fn name(self) -> &'static str {
        match self {
            KindArg::ForwardFacing => "forward_facing",
            KindArg::TopDown => "top_down",
            KindArg::CliffSweep => "cliff_sweep",
            KindArg::AmbiguityDemo => "ambiguity_demo",
            KindArg::SensitivityDemo => "sensitivity_demo",
            KindArg::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Histogram,
    Peaks,
    Onboard,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Histogram => Method::Histogram,
            MethodArg::Peaks => Method::Peaks,
            MethodArg::Onboard => Method::Onboard,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AicFormArg {
    Standard,
    Literal,
}

impl From<AicFormArg> for AicForm {
    fn from(a: AicFormArg) -> Self {
        match a {
            AicFormArg::Standard => AicForm::Standard,
            AicFormArg::Literal => AicForm::LiteralSum,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreFormArg {
    Eq3,
    Joint,
}

impl From<ScoreFormArg> for ScoreForm {
    fn from(s: ScoreFormArg) -> Self {
        match s {
            ScoreFormArg::Eq3 => ScoreForm::PerBin,
            ScoreFormArg::Joint => ScoreForm::Joint,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    PerObject,
    ByDistance,
    SurfaceSplits,
    CliffRange,
    Ablation,
    SampleSweep,
}

impl ProtocolArg {
    fn name(self) -> &'static str {
        match self {
            ProtocolArg::PerObject => "per_object",
            ProtocolArg::ByDistance => "by_distance",
            ProtocolArg::SurfaceSplits => "surface_splits",
            ProtocolArg::CliffRange => "cliff_range",
            ProtocolArg::Ablation => "ablation",
            ProtocolArg::SampleSweep => "sample_sweep",
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment protocol to generate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Output dataset path (JSONL).
    #[arg(long)]
    output: PathBuf,
    /// Root random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file with experiment/sensor/scene overrides.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CommonPipelineArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Feature pipeline feeding the mixture model.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// KDE bandwidth for ambient estimation, in counts.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// First histogram bin kept after pre-processing.
    #[arg(long)]
    bin_lo: Option<usize>,
    /// One past the last histogram bin kept.
    #[arg(long)]
    bin_hi: Option<usize>,
    /// Skip ambient-light subtraction.
    #[arg(long)]
    no_ambient_correction: bool,
    /// Skip per-pixel L1 normalization.
    #[arg(long)]
    no_normalization: bool,
    #[arg(long)]
    components_min: Option<usize>,
    #[arg(long)]
    components_max: Option<usize>,
    /// Log-likelihood aggregate inside the AIC.
    #[arg(long, value_enum)]
    aic_form: Option<AicFormArg>,
    /// Likelihood form used for scoring.
    #[arg(long, value_enum)]
    score_form: Option<ScoreFormArg>,
    /// False-positive-rate budget for detection thresholds.
    #[arg(long)]
    max_fpr: Option<f64>,
    /// JSON config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonPipelineArgs {
    fn flags(&self, surface: Option<String>) -> PipelineFlags {
        PipelineFlags {
            seed: self.seed,
            method: self.method.map(Into::into),
            bandwidth: self.bandwidth,
            bin_lo: self.bin_lo,
            bin_hi: self.bin_hi,
            no_ambient_correction: self.no_ambient_correction,
            no_normalization: self.no_normalization,
            components_min: self.components_min,
            components_max: self.components_max,
            aic_form: self.aic_form.map(Into::into),
            score_form: self.score_form.map(Into::into),
            max_fpr: self.max_fpr,
            surface,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Input dataset (JSONL); only planar frames are used.
    #[arg(long)]
    input: PathBuf,
    /// Output model file (JSON).
    #[arg(long)]
    output: PathBuf,
    /// Restrict training to one surface id.
    #[arg(long)]
    surface: Option<String>,
    #[command(flatten)]
    common: CommonPipelineArgs,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    input: PathBuf,
    /// Fitted model file.
    #[arg(long)]
    model: PathBuf,
    /// Output scores file (JSON).
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    common: CommonPipelineArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output report directory.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    /// Pre-fitted model (used by cliff-range instead of an internal split).
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    common: CommonPipelineArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    common: CommonPipelineArgs,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let config = FileConfig::load(args.config.as_deref())?;
            cmd_simulate(args.kind.name(), args.seed, &config, &args.output)?;
            Ok(())
        }
        Command::Fit(args) => {
            let config = FileConfig::load(args.common.config.as_deref())?;
            let resolved = resolve_pipeline(&config, &args.common.flags(args.surface.clone()))?;
            cmd_fit(&args.input, &args.output, &resolved)
        }
        Command::Score(args) => {
            let config = FileConfig::load(args.common.config.as_deref())?;
            let resolved = resolve_pipeline(&config, &args.common.flags(None))?;
            let form = args.common.score_form.map(Into::into);
            cmd_score(&args.input, &args.model, &args.output, &resolved, form)
        }
        Command::Eval(args) => {
            let config = FileConfig::load(args.common.config.as_deref())?;
            let resolved = resolve_pipeline(&config, &args.common.flags(None))?;
            cmd_eval(
                &args.input,
                &args.output,
                args.protocol.name(),
                &resolved,
                args.model.as_deref(),
            )
        }
        Command::Ablate(args) => {
            let config = FileConfig::load(args.common.config.as_deref())?;
            let resolved = resolve_pipeline(&config, &args.common.flags(None))?;
            cmd_eval(&args.input, &args.output, "ablation", &resolved, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
