//! Implementations of the CLI subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fcl_core::analysis;
use fcl_core::annotate::{
    extract_candidate_spans, select_em_tokens, Annotator, CandidateSpan, ReplayAnnotator,
    RuleAnnotator,
};
use fcl_core::backends::{BackendConfig, Provider};
use fcl_core::baselines;
use fcl_core::corpus::{self, Dataset};
use fcl_core::eval;
use fcl_core::humanqg;
use fcl_core::pipeline::{self, MetricConfig, Scorers, SummaryVerdict};

use crate::plot;
use crate::util::{self, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Span,
    Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Qe,
    Qafe,
}

impl Metric {
    pub fn config(self) -> MetricConfig {
        match self {
            Metric::Qe => MetricConfig::qe(),
            Metric::Qafe => MetricConfig::qafe(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IngestFormat {
    Cliff,
    Gd21,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderArg {
    Stub,
    Replay,
    Service,
}

impl From<ProviderArg> for Provider {
    fn from(p: ProviderArg) -> Provider {
        match p {
            ProviderArg::Stub => Provider::Stub,
            ProviderArg::Replay => Provider::Replay,
            ProviderArg::Service => Provider::Service,
        }
    }
}

/// Optional defaults from a JSON config file; flags override these.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub metric: Option<Metric>,
    pub provider: Option<ProviderArg>,
    pub questions_per_span: Option<usize>,
    pub context_window: Option<usize>,
    pub answerability_threshold: Option<f64>,
    pub cache: Option<String>,
    pub qg_endpoint: Option<String>,
    pub qa_endpoint: Option<String>,
    pub resamples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))
            }
        }
    }
}

fn load_dataset(path: &Path, name: &str) -> Result<Dataset> {
    corpus::load_dataset(path, name).context("loading dataset")
}

fn load_verdicts(path: &Path) -> Result<Vec<SummaryVerdict>> {
    pipeline::read_verdicts(path)
        .with_context(|| format!("reading verdicts {}", path.display()))
}

/// The tune stage output, consumed by evaluate/analyze.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdFile {
    pub level: Level,
    pub seed: u64,
    pub threshold: f64,
    pub validation_f1: f64,
    pub validation_pairs: Vec<String>,
    pub provenance: serde_json::Value,
}

fn read_thresholds(path: &Path) -> Result<ThresholdFile> {
    let text = std::fs::read_to_string(path).with_context(|| {
        format!(
            "reading thresholds {}; run `fcl tune` first to produce it",
            path.display()
        )
    })?;
    serde_json::from_str(&text).context("parsing thresholds file")
}

pub fn ingest(
    format: IngestFormat,
    input: &Path,
    dataset_name: &str,
    output: &Path,
    seed: u64,
) -> Result<()> {
    let dataset = match format {
        IngestFormat::Cliff => corpus::convert::convert_cliff(input, dataset_name)?,
        IngestFormat::Gd21 => corpus::convert::convert_gd21(input, dataset_name)?,
    };
    let dir = util::stage_dir(output, "ingest", dataset_name)?;
    corpus::save_dataset(&dataset, dir.join("dataset.jsonl"))?;
    let provenance = Provenance::new(seed, &(format, dataset_name)).with_input(input)?;
    util::write_json(
        &dir.join("meta.json"),
        &serde_json::json!({
            "dataset": dataset_name,
            "pairs": dataset.pairs.len(),
            "provenance": provenance,
        }),
    )?;
    println!("ingested {} pairs into {}", dataset.pairs.len(), dir.display());
    Ok(())
}

pub fn annotate(dataset_path: &Path, dataset_name: &str, output: &Path, seed: u64) -> Result<()> {
    let dataset = load_dataset(dataset_path, dataset_name)?;
    let annotator = RuleAnnotator::new();
    let cache = ReplayAnnotator::record(&dataset, &annotator)?;
    let dir = util::stage_dir(output, "annotate", dataset_name)?;
    cache.save(dir.join("annotations.jsonl"))?;

    let spans: Vec<Vec<(usize, usize)>> = dataset
        .pairs
        .iter()
        .map(|pair| {
            extract_candidate_spans(pair, &annotator)
                .map(|list| list.iter().map(|s| (s.start, s.end)).collect())
        })
        .collect::<fcl_core::Result<_>>()?;
    let stats = corpus::dataset_stats(&dataset, &spans)?;
    let provenance = Provenance::new(seed, &"rule-annotator").with_input(dataset_path)?;
    util::write_json(
        &dir.join("stats.json"),
        &serde_json::json!({ "stats": stats, "provenance": provenance }),
    )?;
    util::write_csv(
        &dir.join("stats.csv"),
        &provenance,
        "metric,value",
        &[
            format!("total_summaries,{}", stats.total_summaries),
            format!("pct_non_factual_summaries,{}", stats.pct_non_factual_summaries),
            format!("avg_spans_per_summary,{}", stats.avg_spans_per_summary),
            format!("pct_non_factual_spans,{}", stats.pct_non_factual_spans),
            format!("pct_non_factual_tokens,{}", stats.pct_non_factual_tokens),
            format!("pct_ignored_non_factual,{}", stats.pct_ignored_non_factual),
        ],
    )?;
    println!("annotations and stats written to {}", dir.display());
    Ok(())
}

pub struct ScoreArgs<'a> {
    pub dataset_path: &'a Path,
    pub dataset_name: &'a str,
    pub annotations: Option<&'a Path>,
    pub metric: Metric,
    pub backend: BackendConfig,
    pub with_em: bool,
    pub seed: u64,
    pub output: &'a Path,
}

fn spans_for(
    dataset: &Dataset,
    annotations: Option<&Path>,
) -> Result<Vec<Vec<CandidateSpan>>> {
    let replay;
    let rule;
    let annotator: &dyn Annotator = match annotations {
        Some(path) => {
            replay = ReplayAnnotator::load(path)?;
            &replay
        }
        None => {
            rule = RuleAnnotator::new();
            &rule
        }
    };
    dataset
        .pairs
        .iter()
        .map(|pair| extract_candidate_spans(pair, annotator))
        .collect::<fcl_core::Result<_>>()
        .map_err(Into::into)
}

pub fn score(args: &ScoreArgs<'_>) -> Result<()> {
    let dataset = load_dataset(args.dataset_path, args.dataset_name)?;
    let spans = spans_for(&dataset, args.annotations)?;
    let (qg, qa) = args.backend.build()?;
    let config = args.metric.config();
    let scorers = Scorers::default();
    let (verdicts, report) =
        pipeline::run_pipeline(&dataset, &spans, qg.as_ref(), qa.as_ref(), &config, &scorers)?;

    let dir = util::stage_dir(args.output, "score", args.dataset_name)?;
    pipeline::write_verdicts(&verdicts, dir.join("verdicts.jsonl"))?;
    let mut provenance =
        Provenance::new(args.seed, &(&args.backend, args.metric)).with_input(args.dataset_path)?;
    if let Some(path) = args.annotations {
        provenance = provenance.with_input(path)?;
    }
    util::write_json(
        &dir.join("run_report.json"),
        &serde_json::json!({
            "metric": args.metric,
            "report": report,
            "provenance": provenance,
        }),
    )?;

    if args.with_em {
        let mut summary_scores = BTreeMap::new();
        let mut span_scores = BTreeMap::new();
        let mut unscored = 0usize;
        for (pair, pair_spans) in dataset.pairs.iter().zip(&spans) {
            let tokens = select_em_tokens(pair, None)?;
            let em = baselines::em_scores(pair, &tokens);
            summary_scores.insert(pair.pair_id.clone(), em.summary_score);
            let conv = baselines::token_scores_to_span_scores(
                &em.token_scores,
                pair_spans,
                pair,
                0.5,
            )?;
            unscored += conv.unscored_spans;
            span_scores.extend(conv.span_scores);
        }
        util::write_json(
            &dir.join("em.json"),
            &serde_json::json!({
                "summary_scores": summary_scores,
                "span_scores": span_scores,
                "unscored_spans": unscored,
                "provenance": provenance,
            }),
        )?;
    }
    println!(
        "scored {} pairs ({} spans) into {}",
        report.pairs_scored,
        report.total_spans(),
        dir.display()
    );
    Ok(())
}

pub fn tune(
    verdicts_path: &Path,
    dataset_path: &Path,
    dataset_name: &str,
    level: Level,
    seed: u64,
    output: &Path,
) -> Result<()> {
    let dataset = load_dataset(dataset_path, dataset_name)?;
    let verdicts = load_verdicts(verdicts_path)?;
    let items = match level {
        Level::Span => util::span_items(&verdicts),
        Level::Summary => util::summary_items(&verdicts, &dataset)?,
    };
    let validation_pairs = util::validation_pairs(&items, seed);
    let val_items: Vec<_> = items
        .iter()
        .filter(|i| validation_pairs.binary_search(&i.pair_id).is_ok())
        .cloned()
        .collect();
    let (threshold, validation_f1) = eval::tune_threshold(&val_items)?;
    let provenance = Provenance::new(seed, &(level, "tune"))
        .with_input(verdicts_path)?
        .with_input(dataset_path)?;
    let dir = util::stage_dir(output, "tune", dataset_name)?;
    let file = ThresholdFile {
        level,
        seed,
        threshold,
        validation_f1,
        validation_pairs,
        provenance: serde_json::to_value(&provenance)?,
    };
    util::write_json(&dir.join(format!("thresholds_{}.json", level_name(level))), &file)?;
    println!(
        "tuned {} threshold {threshold} (validation F1 {validation_f1:.4})",
        level_name(level)
    );
    Ok(())
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Span => "span",
        Level::Summary => "summary",
    }
}

pub struct EvaluateArgs<'a> {
    pub verdicts_path: &'a Path,
    pub dataset_path: &'a Path,
    pub dataset_name: &'a str,
    pub thresholds_path: &'a Path,
    pub verdicts_b: Option<&'a Path>,
    pub thresholds_b: Option<&'a Path>,
    pub resamples: usize,
    pub seed: u64,
    pub output: &'a Path,
}

fn test_items(
    verdicts: &[SummaryVerdict],
    dataset: &Dataset,
    thresholds: &ThresholdFile,
) -> Result<Vec<eval::ScoredItem>> {
    let items = match thresholds.level {
        Level::Span => util::span_items(verdicts),
        Level::Summary => util::summary_items(verdicts, dataset)?,
    };
    Ok(items
        .into_iter()
        .filter(|i| thresholds.validation_pairs.binary_search(&i.pair_id).is_err())
        .collect())
}

pub fn evaluate(args: &EvaluateArgs<'_>) -> Result<()> {
    let dataset = load_dataset(args.dataset_path, args.dataset_name)?;
    let verdicts = load_verdicts(args.verdicts_path)?;
    let thresholds = read_thresholds(args.thresholds_path)?;
    let items = test_items(&verdicts, &dataset, &thresholds)?;
    if items.is_empty() {
        bail!("no test items left after removing the validation pairs");
    }
    let report = eval::evaluate_f1(&items, thresholds.threshold)?;
    let roc = eval::roc_curve(&items).ok();
    let sweep = eval::threshold_sweep(&items)?;

    let mut p_value = None;
    if let Some(vb_path) = args.verdicts_b {
        let tb = match args.thresholds_b {
            Some(path) => read_thresholds(path)?,
            None => thresholds.clone(),
        };
        if tb.level != thresholds.level {
            bail!("comparison systems were tuned at different levels");
        }
        let verdicts_b = load_verdicts(vb_path)?;
        // pair on the primary system's validation split
        let items_b: Vec<_> = {
            let all = match thresholds.level {
                Level::Span => util::span_items(&verdicts_b),
                Level::Summary => util::summary_items(&verdicts_b, &dataset)?,
            };
            all.into_iter()
                .filter(|i| thresholds.validation_pairs.binary_search(&i.pair_id).is_err())
                .collect()
        };
        p_value = Some(eval::paired_bootstrap(
            &items,
            thresholds.threshold,
            &items_b,
            tb.threshold,
            args.resamples,
            args.seed,
        )?);
    }

    let mut provenance = Provenance::new(args.seed, &("evaluate", thresholds.level))
        .with_input(args.verdicts_path)?
        .with_input(args.dataset_path)?
        .with_input(args.thresholds_path)?;
    if let Some(path) = args.verdicts_b {
        provenance = provenance.with_input(path)?;
    }
    let dir = util::stage_dir(args.output, "evaluate", args.dataset_name)?;
    util::write_json(
        &dir.join(format!("report_{}.json", level_name(thresholds.level))),
        &serde_json::json!({
            "level": thresholds.level,
            "threshold": thresholds.threshold,
            "report": report,
            "auc": roc.as_ref().map(|r| r.auc),
            "bootstrap_p": p_value,
            "bootstrap_convention":
                "p = share of resamples where the observed winner does not win; equal observed F1 gives p = 1",
            "positive_class": "non_factual",
            "provenance": provenance,
        }),
    )?;
    if let Some(roc) = &roc {
        util::write_csv(
            &dir.join(format!("roc_{}.csv", level_name(thresholds.level))),
            &provenance,
            "fpr,tpr",
            &roc.points
                .iter()
                .map(|(x, y)| format!("{x},{y}"))
                .collect::<Vec<_>>(),
        )?;
    }
    util::write_csv(
        &dir.join(format!("sweep_{}.csv", level_name(thresholds.level))),
        &provenance,
        "threshold,precision,recall,f1",
        &sweep
            .iter()
            .map(|r| format!("{},{},{},{}", r.threshold, r.precision, r.recall, r.f1))
            .collect::<Vec<_>>(),
    )?;
    println!(
        "{} F1 {:.4} (pooled), macro {:.4}, AUC {}",
        level_name(thresholds.level),
        report.f1,
        report.macro_f1.value,
        roc.map(|r| format!("{:.4}", r.auc)).unwrap_or_else(|| "n/a".into())
    );
    Ok(())
}

pub struct AnalyzeArgs<'a> {
    pub verdicts_path: &'a Path,
    pub dataset_path: &'a Path,
    pub dataset_name: &'a str,
    pub thresholds_path: &'a Path,
    pub verdicts_b: Option<&'a Path>,
    pub thresholds_b: Option<&'a Path>,
    pub seed: u64,
    pub output: &'a Path,
}

pub fn analyze(args: &AnalyzeArgs<'_>) -> Result<()> {
    let dataset = load_dataset(args.dataset_path, args.dataset_name)?;
    let verdicts = load_verdicts(args.verdicts_path)?;
    let thresholds = read_thresholds(args.thresholds_path)?;
    let rates = analysis::inherited_error_rates(&verdicts, &dataset)?;
    let accuracy =
        analysis::factual_span_accuracy_by_group(&verdicts, &dataset, thresholds.threshold)?;
    let stats = analysis::question_stats(&verdicts);

    let mut provenance = Provenance::new(args.seed, &"analyze")
        .with_input(args.verdicts_path)?
        .with_input(args.dataset_path)?
        .with_input(args.thresholds_path)?;
    if let Some(path) = args.verdicts_b {
        provenance = provenance.with_input(path)?;
    }
    let dir = util::stage_dir(args.output, "analyze", args.dataset_name)?;

    util::write_csv(
        &dir.join("inherited_rates.csv"),
        &provenance,
        "denominator,questions,extrinsic_pct,only_intrinsic_pct,none_pct",
        &[
            format!(
                "all_generated,{},{},{},{}",
                rates.questions_total, rates.extrinsic_pct, rates.only_intrinsic_pct, rates.none_pct
            ),
            format!(
                "kept_after_filtering,{},{},{},",
                rates.kept_questions_total, rates.kept_extrinsic_pct, rates.kept_only_intrinsic_pct
            ),
        ],
    )?;
    util::write_csv(
        &dir.join("span_accuracy.csv"),
        &provenance,
        "category,spans,correct,pct_correct",
        &accuracy
            .groups
            .iter()
            .map(|g| {
                format!("{},{},{},{}", g.category.name(), g.spans, g.correct, g.pct_correct)
            })
            .collect::<Vec<_>>(),
    )?;
    util::write_csv(
        &dir.join("question_stats.csv"),
        &provenance,
        "questions,summaries,avg_question_len,avg_questions_per_summary",
        &[format!(
            "{},{},{},{}",
            stats.questions, stats.summaries, stats.avg_question_len, stats.avg_questions_per_summary
        )],
    )?;

    let mut subset = None;
    if let Some(vb_path) = args.verdicts_b {
        let tb = match args.thresholds_b {
            Some(path) => read_thresholds(path)?,
            None => thresholds.clone(),
        };
        let verdicts_b = load_verdicts(vb_path)?;
        let systems = [
            analysis::QaSystem {
                name: "system_a",
                verdicts: &verdicts,
                threshold: thresholds.threshold,
            },
            analysis::QaSystem {
                name: "system_b",
                verdicts: &verdicts_b,
                threshold: tb.threshold,
            },
        ];
        subset = Some(analysis::common_subset_eval(&systems, &[])?);
    }

    let mut text = String::new();
    text.push_str(&format!("# analysis: {}\n# {}\n\n", args.dataset_name, provenance.comment()));
    text.push_str(&format!(
        "questions over non-factual summaries: {}\n  inherit extrinsic: {:.1}%\n  inherit only intrinsic: {:.1}%\n  clean: {:.1}%\n",
        rates.questions_total, rates.extrinsic_pct, rates.only_intrinsic_pct, rates.none_pct
    ));
    if let Some(note) = &rates.note {
        text.push_str(&format!("  note: {note}\n"));
    }
    text.push_str("\nfactual spans predicted factual, by question category:\n");
    for g in &accuracy.groups {
        text.push_str(&format!(
            "  {}: {}/{} ({:.1}%)\n",
            g.category.name(),
            g.correct,
            g.spans,
            g.pct_correct
        ));
    }
    for cat in &accuracy.omitted_groups {
        text.push_str(&format!("  {}: no spans, omitted\n", cat.name()));
    }
    text.push_str(&format!(
        "\nquestions: {} total, avg length {:.1} tokens, {:.1} per summary\n",
        stats.questions, stats.avg_question_len, stats.avg_questions_per_summary
    ));
    if let Some(report) = &subset {
        text.push_str(&format!(
            "\ncommon scored subset: {}/{} spans\n",
            report.subset_size, report.universe_size
        ));
        for sys in &report.systems {
            text.push_str(&format!(
                "  {}: F1 {:.4}, AUC {}\n",
                sys.name,
                sys.f1.f1,
                sys.auc.map(|a| format!("{a:.4}")).unwrap_or_else(|| "n/a".into())
            ));
        }
        util::write_json(
            &dir.join("common_subset.json"),
            &serde_json::json!({ "report": report, "provenance": provenance }),
        )?;
    }
    std::fs::write(dir.join("tables.txt"), text)?;
    util::write_json(
        &dir.join("analysis.json"),
        &serde_json::json!({
            "inherited_rates": rates,
            "span_accuracy": accuracy,
            "question_stats": stats,
            "provenance": provenance,
        }),
    )?;
    println!("analysis written to {}", dir.display());
    Ok(())
}

pub struct HumanQgArgs<'a> {
    pub dataset_path: &'a Path,
    pub dataset_name: &'a str,
    pub questions_path: &'a Path,
    pub metric: Metric,
    pub backend: BackendConfig,
    pub seed: u64,
    pub output: &'a Path,
}

pub fn humanqg_cmd(args: &HumanQgArgs<'_>) -> Result<()> {
    let dataset = load_dataset(args.dataset_path, args.dataset_name)?;
    let (sets, totals) = humanqg::load_human_questions(args.questions_path, &dataset)?;
    let (_, qa) = args.backend.build()?;
    let config = args.metric.config();
    let scorers = Scorers::default();
    let modes = [
        humanqg::LengthMode::Short,
        humanqg::LengthMode::Intermediate,
        humanqg::LengthMode::Long,
        humanqg::LengthMode::Oracle,
    ];
    let report = humanqg::run_humanqg_eval(
        &dataset,
        &sets,
        qa.as_ref(),
        &config,
        &scorers,
        &modes,
        args.seed,
    )?;
    let provenance = Provenance::new(args.seed, &(args.metric, &args.backend))
        .with_input(args.dataset_path)?
        .with_input(args.questions_path)?;
    let dir = util::stage_dir(args.output, "humanqg", args.dataset_name)?;
    util::write_json(
        &dir.join("humanqg.json"),
        &serde_json::json!({ "totals": totals, "report": report, "provenance": provenance }),
    )?;
    util::write_csv(
        &dir.join("modes.csv"),
        &provenance,
        "mode,threshold,validation_f1,test_f1,test_macro_f1,auc",
        &report
            .modes
            .iter()
            .map(|m| {
                format!(
                    "{},{},{},{},{},{}",
                    m.mode.name(),
                    m.threshold,
                    m.validation_f1,
                    m.report.f1,
                    m.report.macro_f1.value,
                    m.auc.map(|a| a.to_string()).unwrap_or_default()
                )
            })
            .collect::<Vec<_>>(),
    )?;
    util::write_csv(
        &dir.join("slot_rates.csv"),
        &provenance,
        "bucket,questions,inherited_pct,avg_len",
        &report
            .slot_rates
            .iter()
            .chain(&report.length_quartile_rates)
            .map(|b| format!("{},{},{},{}", b.label, b.questions, b.inherited_pct, b.avg_len))
            .collect::<Vec<_>>(),
    )?;
    println!(
        "human-question evaluation over {} spans written to {}",
        report.spans_evaluated,
        dir.display()
    );
    Ok(())
}

pub fn report(input: &Path, dataset_name: &str, output: &Path, seed: u64) -> Result<()> {
    let dir = util::stage_dir(output, "report", dataset_name)?;
    let provenance = Provenance::new(seed, &"report");
    let mut rendered = 0usize;
    for level in ["span", "summary"] {
        let roc_path = input.join(format!("roc_{level}.csv"));
        if roc_path.exists() {
            let text = std::fs::read_to_string(&roc_path)?;
            let points = plot::csv_columns(&text, "fpr", "tpr")?;
            let svg = plot::line_chart(
                &format!("ROC ({level} level)"),
                "false positive rate",
                "true positive rate",
                &[plot::Series {
                    label: "roc".into(),
                    points,
                }],
                &provenance.comment(),
            );
            std::fs::write(dir.join(format!("roc_{level}.svg")), svg)?;
            rendered += 1;
        }
        let sweep_path = input.join(format!("sweep_{level}.csv"));
        if sweep_path.exists() {
            let text = std::fs::read_to_string(&sweep_path)?;
            let mut series = Vec::new();
            for column in ["precision", "recall", "f1"] {
                series.push(plot::Series {
                    label: column.into(),
                    points: plot::csv_columns(&text, "threshold", column)?,
                });
            }
            let svg = plot::line_chart(
                &format!("Threshold sweep ({level} level)"),
                "threshold",
                "score",
                &series,
                &provenance.comment(),
            );
            std::fs::write(dir.join(format!("sweep_{level}.svg")), svg)?;
            rendered += 1;
        }
    }
    if rendered == 0 {
        // placeholder page so downstream tooling still finds an artifact
        let svg = plot::line_chart(
            "No evaluation outputs found",
            "",
            "",
            &[],
            &provenance.comment(),
        );
        std::fs::write(dir.join("placeholder.svg"), svg)?;
        println!("no CSV inputs found in {}; placeholder written", input.display());
    } else {
        println!("{rendered} plots written to {}", dir.display());
    }
    Ok(())
}
