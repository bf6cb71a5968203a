//! `fcl` — span-level factuality evaluation workflow.
//!
//! Stages: ingest → annotate → score → tune → evaluate / analyze /
//! humanqg → report. A JSON config file can supply defaults; flags
//! override file values. Every artifact embeds the seed and a digest of
//! the effective configuration and inputs.

mod commands;
mod plot;
mod util;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{IngestFormat, Level, Metric, ProviderArg};
use fcl_core::backends::BackendConfig;

#[derive(Parser)]
#[command(name = "fcl", version, about = "QA-based factuality evaluation with span-level error localization")]
struct Cli {
    /// JSON config file with default values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Output directory root (layout: <output>/<stage>/<dataset>/).
    #[arg(long)]
    output: Option<PathBuf>,
    /// RNG seed recorded in every artifact.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct BackendArgs {
    /// Question generation / answering provider.
    #[arg(long, value_enum)]
    provider: Option<ProviderArg>,
    /// Replay cache path (replay provider).
    #[arg(long)]
    cache: Option<String>,
    /// QG service endpoint (service provider; or FCL_QG_ENDPOINT).
    #[arg(long)]
    qg_endpoint: Option<String>,
    /// QA service endpoint (service provider; or FCL_QA_ENDPOINT).
    #[arg(long)]
    qa_endpoint: Option<String>,
    #[arg(long)]
    questions_per_span: Option<usize>,
    /// Stub QG context window (tokens each side); omit for full sentence.
    #[arg(long)]
    context_window: Option<usize>,
    #[arg(long)]
    answerability_threshold: Option<f64>,
}

impl BackendArgs {
    fn resolve(&self, file: &commands::FileConfig, metric: Metric) -> BackendConfig {
        let mut config = BackendConfig::stub();
        config.provider = self
            .provider
            .or(file.provider)
            .unwrap_or(ProviderArg::Stub)
            .into();
        config.cache_path = self.cache.clone().or_else(|| file.cache.clone());
        config.qg_endpoint = self.qg_endpoint.clone().or_else(|| file.qg_endpoint.clone());
        config.qa_endpoint = self.qa_endpoint.clone().or_else(|| file.qa_endpoint.clone());
        config.questions_per_span = self
            .questions_per_span
            .or(file.questions_per_span)
            .unwrap_or(match metric {
                Metric::Qe => 3,
                Metric::Qafe => 1,
            });
        config.context_window = self.context_window.or(file.context_window);
        if let Some(t) = self.answerability_threshold.or(file.answerability_threshold) {
            config.answerability_threshold = t;
        }
        config
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw annotated-corpus release to the native JSONL format.
    Ingest {
        #[arg(long, value_enum)]
        format: IngestFormat,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Extract candidate spans and POS tags into a reusable cache.
    Annotate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the QA metric pipeline (and optionally the EM baseline).
    Score {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        dataset_name: String,
        /// Annotation cache from `annotate`; defaults to the rule annotator.
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long, value_enum)]
        metric: Option<Metric>,
        /// Also compute the exact-match baseline scores.
        #[arg(long)]
        with_em: bool,
        #[command(flatten)]
        backend: BackendArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tune the best-F1 threshold on the validation half.
    Tune {
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[arg(long, value_enum)]
        level: Level,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// F1/ROC/sweep on the test half; optional paired bootstrap vs a
    /// second system.
    Evaluate {
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[arg(long)]
        thresholds: PathBuf,
        #[arg(long)]
        verdicts_b: Option<PathBuf>,
        #[arg(long)]
        thresholds_b: Option<PathBuf>,
        #[arg(long)]
        resamples: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Inherited-error and question-statistics analyses.
    Analyze {
        #[arg(long)]
        verdicts: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[arg(long)]
        thresholds: PathBuf,
        /// Second verdict dump for the common-subset comparison.
        #[arg(long)]
        verdicts_b: Option<PathBuf>,
        #[arg(long)]
        thresholds_b: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate with human-written questions replacing the QG backend.
    Humanqg {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[arg(long)]
        questions: PathBuf,
        #[arg(long, value_enum)]
        metric: Option<Metric>,
        #[command(flatten)]
        backend: BackendArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Render SVG plots from an evaluate stage directory.
    Report {
        /// Directory containing roc_*.csv / sweep_*.csv.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dataset_name: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn resolve_common(
    common: &CommonArgs,
    file: &commands::FileConfig,
) -> (PathBuf, u64) {
    let output = common
        .output
        .clone()
        .or_else(|| file.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = common.seed.or(file.seed).unwrap_or(17);
    (output, seed)
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let file = commands::FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Ingest {
            format,
            input,
            dataset_name,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            commands::ingest(*format, input, dataset_name, &output, seed)
        }
        Command::Annotate {
            dataset,
            dataset_name,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            commands::annotate(dataset, dataset_name, &output, seed)
        }
        Command::Score {
            dataset,
            dataset_name,
            annotations,
            metric,
            with_em,
            backend,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            let metric = metric.or(file.metric).unwrap_or(Metric::Qe);
            commands::score(&commands::ScoreArgs {
                dataset_path: dataset,
                dataset_name,
                annotations: annotations.as_deref(),
                metric,
                backend: backend.resolve(&file, metric),
                with_em: *with_em,
                seed,
                output: &output,
            })
        }
        Command::Tune {
            verdicts,
            dataset,
            dataset_name,
            level,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            commands::tune(verdicts, dataset, dataset_name, *level, seed, &output)
        }
        Command::Evaluate {
            verdicts,
            dataset,
            dataset_name,
            thresholds,
            verdicts_b,
            thresholds_b,
            resamples,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            commands::evaluate(&commands::EvaluateArgs {
                verdicts_path: verdicts,
                dataset_path: dataset,
                dataset_name,
                thresholds_path: thresholds,
                verdicts_b: verdicts_b.as_deref(),
                thresholds_b: thresholds_b.as_deref(),
                resamples: resamples.or(file.resamples).unwrap_or(1000),
                seed,
                output: &output,
            })
        }
        Command::Analyze {
            verdicts,
            dataset,
            dataset_name,
            thresholds,
            verdicts_b,
            thresholds_b,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            commands::analyze(&commands::AnalyzeArgs {
                verdicts_path: verdicts,
                dataset_path: dataset,
                dataset_name,
                thresholds_path: thresholds,
                verdicts_b: verdicts_b.as_deref(),
                thresholds_b: thresholds_b.as_deref(),
                seed,
                output: &output,
            })
        }
        Command::Humanqg {
            dataset,
            dataset_name,
            questions,
            metric,
            backend,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            let metric = metric.or(file.metric).unwrap_or(Metric::Qe);
            commands::humanqg_cmd(&commands::HumanQgArgs {
                dataset_path: dataset,
                dataset_name,
                questions_path: questions,
                metric,
                backend: backend.resolve(&file, metric),
                seed,
                output: &output,
            })
        }
        Command::Report {
            input,
            dataset_name,
            common,
        } => {
            let (output, seed) = resolve_common(common, &file);
            commands::report(input, dataset_name, &output, seed)
        }
    }
}

fn main() {
    if let Err(err) = run() {
        // machine-readable failure record on stderr
        let payload = serde_json::json!({ "error": format!("{err:#}") });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}
