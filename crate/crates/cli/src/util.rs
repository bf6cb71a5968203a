//! Shared plumbing: provenance stamps, output layout, item extraction,
//! and the validation/test split.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use fcl_core::corpus::{derive_summary_gold, Dataset};
use fcl_core::eval::ScoredItem;
use fcl_core::pipeline::{SpanStatus, SummaryVerdict};

/// Input digests + seed + config digest, embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_digest: String,
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(seed: u64, config: &impl Serialize) -> Self {
        let canonical = serde_json::to_string(config).expect("config serializes");
        Provenance {
            seed,
            config_digest: hex_prefix(Sha256::digest(canonical.as_bytes()).as_slice()),
            inputs: BTreeMap::new(),
        }
    }

    pub fn with_input(mut self, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)
            .with_context(|| format!("reading input {}", path.display()))?;
        self.inputs.insert(
            path.display().to_string(),
            hex_prefix(Sha256::digest(&bytes).as_slice()),
        );
        Ok(self)
    }

    /// One-line comment stamp for CSV/SVG artifacts.
    pub fn comment(&self) -> String {
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|(path, digest)| format!("{path}={digest}"))
            .collect();
        format!(
            "seed={} config={} inputs=[{}]",
            self.seed,
            self.config_digest,
            inputs.join(",")
        )
    }
}

fn hex_prefix(bytes: &[u8]) -> String {
    bytes.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// `<outdir>/<stage>/<dataset>/`, created on demand.
pub fn stage_dir(out: &Path, stage: &str, dataset: &str) -> Result<PathBuf> {
    let dir = out.join(stage).join(dataset);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_csv(path: &Path, provenance: &Provenance, header: &str, rows: &[String]) -> Result<()> {
    let mut text = format!("# {}\n{header}\n", provenance.comment());
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Span-level scored items from a verdict dump (errored spans excluded).
pub fn span_items(verdicts: &[SummaryVerdict]) -> Vec<ScoredItem> {
    verdicts
        .iter()
        .flat_map(|sv| &sv.span_verdicts)
        .filter(|s| s.status != SpanStatus::Errored)
        .map(|s| ScoredItem::new(s.span_id.clone(), s.score, s.gold_label, s.pair_id.clone()))
        .collect()
}

/// Summary-level scored items; gold derived from token annotations.
pub fn summary_items(verdicts: &[SummaryVerdict], dataset: &Dataset) -> Result<Vec<ScoredItem>> {
    verdicts
        .iter()
        .map(|sv| {
            let pair = dataset.pair(&sv.pair_id)?;
            Ok(ScoredItem::new(
                sv.pair_id.clone(),
                sv.score,
                derive_summary_gold(pair)?,
                sv.pair_id.clone(),
            ))
        })
        .collect::<fcl_core::Result<Vec<_>>>()
        .map_err(Into::into)
}

/// Deterministic validation half of the pair ids appearing in `items`
/// (the larger half on odd counts, matching the dataset splitter).
pub fn validation_pairs(items: &[ScoredItem], seed: u64) -> Vec<String> {
    let mut ids: Vec<&str> = items.iter().map(|i| i.pair_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let mut half: Vec<String> = ids[..ids.len().div_ceil(2)]
        .iter()
        .map(|s| s.to_string())
        .collect();
    half.sort();
    half
}
