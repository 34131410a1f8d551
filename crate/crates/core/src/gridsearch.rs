//! Alignment configurations, parameter spaces and staged grid search.
//!
//! A staged search evaluates every configuration on a first meeting set,
//! keeps the best `top_k`, and re-evaluates those on the next set. Results
//! per (configuration, meeting) are pure functions of their inputs and may
//! be cached on disk.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::alignment::AlignParams;
use crate::corpus::{load_alignment, MeetingBundle, SegmentAlignment};
use crate::error::{Error, Result};
use crate::fsio;
use crate::metrics::{evaluate_file, summarize, FileEvaluation, MicroSummary};
use crate::pipeline::align_meeting;
use crate::similarity::{EmbeddingTable, Pooling, ScorerKind};
use crate::windows::{Aggregation, Reduction, WindowConfig};

/// One point of the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignConfig {
    pub scorer: ScorerKind,
    /// Only used by the embedding scorer.
    #[serde(default)]
    pub pooling: Pooling,
    pub window: WindowConfig,
    pub align: AlignParams,
}

impl AlignConfig {
    /// Sentence-level scoring (no windows) with the given scorer.
    pub fn sentences(scorer: ScorerKind, align: AlignParams) -> Self {
        AlignConfig {
            scorer,
            pooling: Pooling::Sum,
            window: WindowConfig::sentences(default_agg(scorer)),
            align,
        }
        .normalized()
    }

    /// Best configuration reported for the embedding aligner: windows of
    /// two sentences overlapping by one, summed and multiplied back,
    /// `p = 4` and `vd = 1e-4`.
    pub fn published_best() -> Self {
        AlignConfig {
            scorer: ScorerKind::EmbeddingCosine,
            pooling: Pooling::Sum,
            window: WindowConfig {
                size: 2,
                overlap: 1,
                agg: Aggregation::Sum,
                red: Reduction::Product,
            },
            align: AlignParams {
                power: 4.0,
                horizontal_decay: 0.0,
                vertical_decay: 1e-4,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        self.align.validate()?;
        if !self.window.is_identity() && self.scorer.is_text() != (self.window.agg == Aggregation::Cat) {
            return Err(Error::Config(format!(
                "aggregation {:?} cannot be used with the {} scorer",
                self.window.agg, self.scorer
            )));
        }
        Ok(())
    }

    /// Drops settings that have no effect: pooling for non-embedding
    /// scorers, and aggregation/reduction when windows are single sentences.
    pub fn normalized(&self) -> Self {
        let mut c = self.clone();
        if c.scorer != ScorerKind::EmbeddingCosine {
            c.pooling = Pooling::Sum;
        }
        if c.window.is_identity() {
            c.window = WindowConfig::sentences(default_agg(c.scorer));
        }
        c
    }

    /// Stable text form used for ranking ties and cache keys.
    pub fn canonical(&self) -> String {
        let c = self.normalized();
        format!(
            "scorer={};pool={};s={};o={};agg={};red={};p={};hd={};vd={}",
            c.scorer,
            lower(&c.pooling),
            c.window.size,
            c.window.overlap,
            lower(&c.window.agg),
            lower(&c.window.red),
            c.align.power,
            c.align.horizontal_decay,
            c.align.vertical_decay,
        )
    }
}

fn lower<T: std::fmt::Debug>(v: &T) -> String {
    format!("{v:?}").to_lowercase()
}

fn default_agg(scorer: ScorerKind) -> Aggregation {
    if scorer.is_text() {
        Aggregation::Cat
    } else {
        Aggregation::Sum
    }
}

fn default_poolings() -> Vec<Pooling> {
    vec![Pooling::Sum]
}

/// Value lists whose cartesian product is searched. A window size of 0
/// means sentence-level scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub scorers: Vec<ScorerKind>,
    #[serde(default = "default_poolings")]
    pub poolings: Vec<Pooling>,
    pub sizes: Vec<usize>,
    pub overlaps: Vec<usize>,
    pub aggs: Vec<Aggregation>,
    pub reds: Vec<Reduction>,
    pub powers: Vec<f64>,
    pub hds: Vec<f64>,
    pub vds: Vec<f64>,
}

impl ParameterSpace {
    /// The published search space.
    pub fn published() -> Self {
        ParameterSpace {
            scorers: ScorerKind::ALL.to_vec(),
            poolings: default_poolings(),
            sizes: vec![0, 1, 2, 3, 4, 5, 10],
            overlaps: vec![1, 2, 3, 5],
            aggs: vec![Aggregation::Sum, Aggregation::Mean, Aggregation::Max, Aggregation::Cat],
            reds: vec![Reduction::Sum, Reduction::Product],
            powers: vec![1.0, 2.0, 4.0],
            hds: vec![0.0],
            vds: vec![0.0, 1e-4],
        }
    }
}

/// Cartesian product of the space minus invalid combinations, deduplicated
/// on the canonical form and kept in first-seen order.
pub fn enumerate_configs(space: &ParameterSpace) -> Result<Vec<AlignConfig>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &scorer in &space.scorers {
        for &pooling in &space.poolings {
            for &s in &space.sizes {
                for &o in &space.overlaps {
                    for &agg in &space.aggs {
                        for &red in &space.reds {
                            let window = if s == 0 {
                                WindowConfig::sentences(default_agg(scorer))
                            } else {
                                WindowConfig { size: s, overlap: o, agg, red }
                            };
                            for &power in &space.powers {
                                for &hd in &space.hds {
                                    for &vd in &space.vds {
                                        let c = AlignConfig {
                                            scorer,
                                            pooling,
                                            window,
                                            align: AlignParams {
                                                power,
                                                horizontal_decay: hd,
                                                vertical_decay: vd,
                                            },
                                        };
                                        if c.validate().is_err() {
                                            continue;
                                        }
                                        let c = c.normalized();
                                        if seen.insert(c.canonical()) {
                                            out.push(c);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config("the parameter space contains no valid configuration".into()));
    }
    Ok(out)
}

/// A meeting with its gold alignment.
#[derive(Debug, Clone)]
pub struct EvalMeeting {
    pub bundle: MeetingBundle,
    pub gold: SegmentAlignment,
}

impl EvalMeeting {
    pub fn new(bundle: MeetingBundle, gold: SegmentAlignment) -> Result<Self> {
        gold.validate_against(&bundle)?;
        Ok(EvalMeeting { bundle, gold })
    }

    /// Loads a meeting directory holding `transcription.json`,
    /// `report.json` and `gold.json`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let bundle = MeetingBundle::load_dir(dir)?;
        let gold_path = dir.join("gold.json");
        if !gold_path.exists() {
            return Err(Error::NotFound(format!(
                "gold alignment for meeting {} ({})",
                bundle.meeting_id,
                gold_path.display()
            )));
        }
        EvalMeeting::new(bundle, load_alignment(&gold_path)?)
    }
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub meetings: Vec<Arc<EvalMeeting>>,
    pub top_k: usize,
}

/// On-disk stage description: meeting directories and how many
/// configurations survive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub meetings: Vec<PathBuf>,
    pub top_k: usize,
}

impl StageSpec {
    /// Loads the meetings; directories shared between stages load once.
    pub fn load_all(specs: &[StageSpec]) -> Result<Vec<Stage>> {
        let mut cache: BTreeMap<PathBuf, Arc<EvalMeeting>> = BTreeMap::new();
        specs
            .iter()
            .map(|s| {
                let meetings = s
                    .meetings
                    .iter()
                    .map(|dir| {
                        if let Some(m) = cache.get(dir) {
                            return Ok(m.clone());
                        }
                        let m = Arc::new(EvalMeeting::load_dir(dir)?);
                        cache.insert(dir.clone(), m.clone());
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Stage { meetings, top_k: s.top_k })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMetric {
    Windowdiff,
    SegAcc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedConfig {
    pub config: AlignConfig,
    pub canonical: String,
    pub metrics: MicroSummary,
    /// Index of the last stage this configuration was evaluated in.
    pub stage_reached: usize,
}

/// Orders by the metric (windowdiff ascending, segment accuracy
/// descending), then by canonical string.
fn rank(results: &mut [RankedConfig], metric: RankMetric) {
    results.sort_by(|a, b| {
        let primary = match metric {
            RankMetric::Windowdiff => a.metrics.windowdiff.total_cmp(&b.metrics.windowdiff),
            RankMetric::SegAcc => b.metrics.seg_acc.total_cmp(&a.metrics.seg_acc),
        };
        primary.then_with(|| a.canonical.cmp(&b.canonical))
    });
}

#[derive(Debug, Clone, Default)]
pub struct GridSearch {
    pub embeddings: Option<Arc<EmbeddingTable>>,
    pub cache_dir: Option<PathBuf>,
}

fn cache_key(canonical: &str, meeting_id: &str) -> String {
    let digest = Sha256::new()
        .chain_update(canonical.as_bytes())
        .chain_update([0u8])
        .chain_update(meeting_id.as_bytes())
        .finalize();
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

impl GridSearch {
    /// Aligns one meeting with one configuration and scores it.
    pub fn evaluate(&self, config: &AlignConfig, meeting: &EvalMeeting) -> Result<FileEvaluation> {
        let cache_path = self.cache_dir.as_ref().map(|d| {
            d.join(format!("{}.json", cache_key(&config.canonical(), &meeting.bundle.meeting_id)))
        });
        if let Some(p) = &cache_path {
            if p.exists() {
                if let Ok(hit) = fsio::read_json::<FileEvaluation>(p) {
                    return Ok(hit);
                }
                log::warn!("ignoring unreadable cache entry {}", p.display());
            }
        }
        let hyp = align_meeting(&meeting.bundle, config, self.embeddings.as_ref())?.alignment;
        let eval = evaluate_file(&meeting.gold, &hyp, &meeting.bundle)?;
        if let Some(p) = &cache_path {
            fsio::write_json(p, &eval)?;
        }
        Ok(eval)
    }

    /// Micro-averaged metrics of each configuration over a meeting set.
    pub fn evaluate_set(&self, configs: &[AlignConfig], meetings: &[Arc<EvalMeeting>]) -> Result<Vec<MicroSummary>> {
        if meetings.is_empty() {
            return Err(Error::validation("stage has no meetings"));
        }
        if let Some(d) = &self.cache_dir {
            std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        let jobs: Vec<(usize, usize)> = (0..configs.len())
            .flat_map(|c| (0..meetings.len()).map(move |m| (c, m)))
            .collect();
        let evals: Vec<FileEvaluation> = jobs
            .par_iter()
            .map(|&(c, m)| self.evaluate(&configs[c], &meetings[m]))
            .collect::<Result<_>>()?;
        evals.chunks(meetings.len()).map(summarize).collect()
    }

    /// Runs the stages in order. The result lists every evaluated
    /// configuration: those reaching the last stage first, in that stage's
    /// ranking order, then the ones eliminated earlier.
    pub fn staged_search(&self, configs: &[AlignConfig], stages: &[Stage], metric: RankMetric) -> Result<Vec<RankedConfig>> {
        if stages.is_empty() {
            return Err(Error::Config("staged search needs at least one stage".into()));
        }
        if configs.is_empty() {
            return Err(Error::Config("no configuration to search".into()));
        }
        let mut survivors: Vec<AlignConfig> = configs.iter().map(AlignConfig::normalized).collect();
        let mut eliminated: Vec<Vec<RankedConfig>> = Vec::new();
        for (t, stage) in stages.iter().enumerate() {
            log::info!("stage {t}: {} configurations on {} meetings", survivors.len(), stage.meetings.len());
            let metrics = self.evaluate_set(&survivors, &stage.meetings)?;
            let mut ranked: Vec<RankedConfig> = survivors
                .iter()
                .zip(metrics)
                .map(|(c, m)| RankedConfig {
                    config: c.clone(),
                    canonical: c.canonical(),
                    metrics: m,
                    stage_reached: t,
                })
                .collect();
            rank(&mut ranked, metric);
            if t + 1 == stages.len() {
                eliminated.push(ranked);
                break;
            }
            let keep = stage.top_k.max(1).min(ranked.len());
            let dropped = ranked.split_off(keep);
            eliminated.push(dropped);
            survivors = ranked.into_iter().map(|r| r.config).collect();
        }
        Ok(eliminated.into_iter().rev().flatten().collect())
    }
}
