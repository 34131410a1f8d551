//! The `alignsum` command line.
//!
//! Exit codes: 0 on success, 1 when inputs fail validation or cannot be
//! read, 2 on usage errors. Outputs are written atomically; logs go to
//! standard error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::alignment::diagonal_alignment;
use crate::baselines::{boundaries_to_alignment, c99, texttiling, texttiling_grid, texttiling_with_count, TextTilingParams};
use crate::corpus::{load_alignment, write_alignment, MeetingBundle, Sentence};
use crate::corpus_builder::{extract_pairs, write_pairs, PairFilter, TrainingPair};
use crate::error::{Error, Result};
use crate::fsio;
use crate::gridsearch::{enumerate_configs, AlignConfig, GridSearch, ParameterSpace, RankMetric, StageSpec};
use crate::metrics::{evaluate_file, summarize, FileEvaluation, MicroSummary};
use crate::pipeline::align_meeting;
use crate::segmentation::{group_transcription, segment_report_text, SpeakerPatterns};
use crate::similarity::{tokenize, EmbeddingTable, Pooling, ScorerKind};
use crate::windows::{Aggregation, Reduction};

#[derive(Debug, Parser)]
#[command(name = "alignsum", version, about = "Align meeting transcriptions with written reports")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a raw report by speaker, or group transcription sentences.
    #[command(subcommand)]
    Segment(SegmentCommand),
    /// Align one meeting.
    Align(AlignArgs),
    /// Run a linear segmentation baseline on a transcription.
    Baseline(BaselineArgs),
    /// Evaluate hypothesis alignments against gold.
    Eval(EvalArgs),
    /// Staged grid search over alignment configurations.
    Grid(GridArgs),
    /// Extract filtered training pairs from aligned meetings.
    Extract(ExtractArgs),
    /// Serve the annotation API.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
enum SegmentCommand {
    /// Raw report text to report.json.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Speaker marker prefixes, one per line.
        #[arg(long)]
        patterns: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// One sentence per line to transcription.json.
    Transcription {
        #[arg(long)]
        input: PathBuf,
        /// Sentence ids starting a new segment, comma separated.
        #[arg(long, value_delimiter = ',')]
        boundaries: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct EmbeddingArgs {
    /// word2vec text file.
    #[arg(long, env = "ALIGNSUM_EMBEDDINGS")]
    embeddings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// AlignConfig JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scorer: Option<ScorerKind>,
    #[arg(long, value_enum)]
    pooling: Option<PoolingArg>,
    /// Window size; 0 scores single sentences.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    overlap: Option<usize>,
    #[arg(long, value_enum)]
    agg: Option<AggArg>,
    #[arg(long, value_enum)]
    red: Option<RedArg>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    hd: Option<f64>,
    #[arg(long)]
    vd: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PoolingArg {
    Sum,
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggArg {
    Sum,
    Mean,
    Max,
    Cat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RedArg {
    Sum,
    Product,
}

impl ConfigArgs {
    fn is_empty(&self) -> bool {
        self.config.is_none()
            && self.scorer.is_none()
            && self.pooling.is_none()
            && self.size.is_none()
            && self.overlap.is_none()
            && self.agg.is_none()
            && self.red.is_none()
            && self.power.is_none()
            && self.hd.is_none()
            && self.vd.is_none()
    }

    /// File values (or the published best configuration) with flags on top.
    fn resolve(&self) -> Result<AlignConfig> {
        let mut c = match &self.config {
            Some(p) => fsio::read_json::<AlignConfig>(p)?,
            None => AlignConfig::published_best(),
        };
        if let Some(s) = self.scorer {
            c.scorer = s;
            if self.agg.is_none() && s.is_text() != (c.window.agg == Aggregation::Cat) {
                c.window.agg = if s.is_text() { Aggregation::Cat } else { Aggregation::Sum };
            }
        }
        if let Some(p) = self.pooling {
            c.pooling = match p {
                PoolingArg::Sum => Pooling::Sum,
                PoolingArg::Mean => Pooling::Mean,
                PoolingArg::Max => Pooling::Max,
            };
        }
        if let Some(s) = self.size {
            if s == 0 {
                c.window.size = 1;
                c.window.overlap = 0;
            } else {
                c.window.size = s;
            }
        }
        if let Some(o) = self.overlap {
            c.window.overlap = o;
        }
        if let Some(a) = self.agg {
            c.window.agg = match a {
                AggArg::Sum => Aggregation::Sum,
                AggArg::Mean => Aggregation::Mean,
                AggArg::Max => Aggregation::Max,
                AggArg::Cat => Aggregation::Cat,
            };
        }
        if let Some(r) = self.red {
            c.window.red = match r {
                RedArg::Sum => Reduction::Sum,
                RedArg::Product => Reduction::Product,
            };
        }
        if let Some(p) = self.power {
            c.align.power = p;
        }
        if let Some(h) = self.hd {
            c.align.horizontal_decay = h;
        }
        if let Some(v) = self.vd {
            c.align.vertical_decay = v;
        }
        c.validate()?;
        Ok(c.normalized())
    }
}

#[derive(Debug, Args)]
struct AlignArgs {
    /// Meeting directory with transcription.json and report.json.
    #[arg(long)]
    meeting: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Use the similarity-free diagonal baseline.
    #[arg(long, conflicts_with = "config")]
    diagonal: bool,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    Texttiling,
    C99,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    meeting: PathBuf,
    /// Boundary list output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the induced segment alignment.
    #[arg(long)]
    alignment_out: Option<PathBuf>,
    /// Segment count for C99; defaults to the number of report segments.
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long, default_value_t = crate::baselines::DEFAULT_RANK_MASK)]
    rank_mask: usize,
    #[arg(long, default_value_t = 3)]
    block_size: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    sigma: f64,
    /// TextTiling: search a parameter grid for the report's segment count.
    #[arg(long)]
    match_count: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Gold alignment files.
    #[arg(long, required = true, num_args = 1..)]
    gold: Vec<PathBuf>,
    /// Hypothesis alignment files, paired with --gold in order.
    #[arg(long, required = true, num_args = 1..)]
    hyp: Vec<PathBuf>,
    /// Meeting directories; default to each gold file's directory.
    #[arg(long, num_args = 1..)]
    meeting: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Windowdiff,
    SegAcc,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    stages: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Windowdiff)]
    metric: MetricArg,
    /// Directory caching per-(config, meeting) results.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long, required = true, num_args = 1..)]
    meeting: Vec<PathBuf>,
    /// Alignment file name inside each meeting directory.
    #[arg(long, default_value = "gold.json")]
    alignment: String,
    /// Output file, or directory with --split-by-meeting.
    #[arg(long)]
    out: PathBuf,
    /// Write one `<meeting_id>.jsonl` per meeting.
    #[arg(long)]
    split_by_meeting: bool,
    #[arg(long, default_value_t = 10)]
    min_words: usize,
    #[arg(long, default_value_t = 1000)]
    max_words: usize,
    #[arg(long, default_value_t = 3)]
    min_sentences: usize,
    #[arg(long, default_value_t = 50)]
    max_sentences: usize,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Directory of meeting directories.
    #[arg(long)]
    corpus: PathBuf,
    /// Where sessions and corrected alignments are stored.
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Built annotation UI to serve at `/`.
    #[arg(long)]
    ui: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    embeddings: EmbeddingArgs,
}

/// Loads embeddings if a file is given, keeping only `vocabulary` words.
fn load_embeddings(args: &EmbeddingArgs, vocabulary: Option<&HashSet<String>>) -> Result<Option<Arc<EmbeddingTable>>> {
    match &args.embeddings {
        Some(p) => {
            log::info!("loading embeddings from {}", p.display());
            let t = EmbeddingTable::load_word2vec_text(p, vocabulary)?;
            log::info!("{} vectors of dimension {}", t.len(), t.dim());
            Ok(Some(Arc::new(t)))
        }
        None => Ok(None),
    }
}

fn vocabulary<'a>(bundles: impl IntoIterator<Item = &'a MeetingBundle>) -> HashSet<String> {
    let mut v = HashSet::new();
    for b in bundles {
        for s in b.transcription.sentences().iter().chain(b.report.sentences()) {
            v.extend(tokenize(&s.text));
        }
    }
    v
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fsio::write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
            Ok(())
        }
    }
}

fn cmd_segment(cmd: SegmentCommand) -> Result<()> {
    match cmd {
        SegmentCommand::Report { input, patterns, out } => {
            let patterns = match patterns {
                Some(p) => SpeakerPatterns::load(&p)?,
                None => SpeakerPatterns::default(),
            };
            let doc = segment_report_text(&fsio::read_to_string(&input)?, &patterns)?;
            crate::corpus::write_report(&doc, &out)?;
            log::info!("{} report segments, {} sentences", doc.num_segments(), doc.num_sentences());
            Ok(())
        }
        SegmentCommand::Transcription { input, boundaries, out } => {
            let sentences = fsio::read_to_string(&input)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .enumerate()
                .map(|(i, l)| Sentence::new(i, l.trim()))
                .collect::<Result<Vec<_>>>()?;
            let doc = group_transcription(sentences, &boundaries)?;
            crate::corpus::write_transcription(&doc, &out)
        }
    }
}

fn cmd_align(args: AlignArgs) -> Result<()> {
    let bundle = MeetingBundle::load_dir(&args.meeting)?;
    let alignment = if args.diagonal {
        if !args.config.is_empty() {
            return Err(Error::Config("--diagonal takes no alignment configuration".into()));
        }
        diagonal_alignment(&bundle)?
    } else {
        let config = args.config.resolve()?;
        let embeddings = if config.scorer == ScorerKind::EmbeddingCosine {
            load_embeddings(&args.embeddings, Some(&vocabulary([&bundle])))?
        } else {
            None
        };
        align_meeting(&bundle, &config, embeddings.as_ref())?.alignment
    };
    write_alignment(&alignment, &args.out)
}

#[derive(Serialize)]
struct BaselineOutput {
    meeting_id: String,
    algo: &'static str,
    boundaries: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    texttiling: Option<TextTilingParams>,
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let bundle = MeetingBundle::load_dir(&args.meeting)?;
    let tokens: Vec<Vec<String>> = bundle.transcription.sentences().iter().map(|s| tokenize(&s.text)).collect();
    let expected = args.segments.unwrap_or(bundle.report.num_segments());
    let (algo, boundaries, params) = match args.algo {
        Algo::C99 => ("c99", c99(&tokens, expected.min(tokens.len()), args.rank_mask)?, None),
        Algo::Texttiling if args.match_count => match texttiling_with_count(&tokens, expected, &texttiling_grid()) {
            Some((p, b)) => ("texttiling", b, Some(p)),
            None => {
                return Err(Error::validation(format!(
                    "no TextTiling parameters produce {expected} segments for meeting {}",
                    bundle.meeting_id
                )))
            }
        },
        Algo::Texttiling => {
            let p = TextTilingParams {
                block_size: args.block_size,
                step: args.step,
                sigma: args.sigma,
            };
            ("texttiling", texttiling(&tokens, &p), Some(p))
        }
    };
    if let Some(p) = &args.alignment_out {
        write_alignment(&boundaries_to_alignment(&boundaries, &bundle)?, p)?;
    }
    let out = BaselineOutput {
        meeting_id: bundle.meeting_id.clone(),
        algo,
        boundaries,
        texttiling: params,
    };
    emit(&out, args.out.as_deref())
}

#[derive(Serialize)]
struct EvalReport {
    per_file: Vec<FileEvaluation>,
    micro: MicroSummary,
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    if args.gold.len() != args.hyp.len() {
        return Err(Error::validation(format!(
            "{} gold files but {} hypothesis files",
            args.gold.len(),
            args.hyp.len()
        )));
    }
    if !args.meeting.is_empty() && args.meeting.len() != args.gold.len() {
        return Err(Error::validation("--meeting must be given once per gold file"));
    }
    let mut per_file = Vec::with_capacity(args.gold.len());
    for (k, (g, h)) in args.gold.iter().zip(&args.hyp).enumerate() {
        let gold = load_alignment(g)?;
        let hyp = load_alignment(h)?;
        if gold.meeting_id() != hyp.meeting_id() {
            return Err(Error::validation(format!(
                "{} is for meeting {:?} but {} is for {:?}",
                g.display(),
                gold.meeting_id(),
                h.display(),
                hyp.meeting_id()
            )));
        }
        let dir = match args.meeting.get(k) {
            Some(d) => d.clone(),
            None => g.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        let bundle = MeetingBundle::load_dir(if dir.as_os_str().is_empty() { Path::new(".") } else { &dir })?;
        gold.validate_against(&bundle)?;
        hyp.validate_against(&bundle)?;
        per_file.push(evaluate_file(&gold, &hyp, &bundle)?);
    }
    let micro = summarize(&per_file)?;
    emit(&EvalReport { per_file, micro }, args.out.as_deref())
}

fn cmd_grid(args: GridArgs) -> Result<()> {
    let space: ParameterSpace = fsio::read_json(&args.space)?;
    let specs: Vec<StageSpec> = fsio::read_json(&args.stages)?;
    let base = args.stages.parent().unwrap_or(Path::new("."));
    let specs: Vec<StageSpec> = specs
        .into_iter()
        .map(|s| StageSpec {
            meetings: s.meetings.into_iter().map(|m| if m.is_relative() { base.join(m) } else { m }).collect(),
            top_k: s.top_k,
        })
        .collect();
    let configs = enumerate_configs(&space)?;
    let stages = StageSpec::load_all(&specs)?;
    let needs_embeddings = configs.iter().any(|c| c.scorer == ScorerKind::EmbeddingCosine);
    let embeddings = if needs_embeddings {
        let vocab = vocabulary(stages.iter().flat_map(|s| s.meetings.iter().map(|m| &m.bundle)));
        load_embeddings(&args.embeddings, Some(&vocab))?
    } else {
        None
    };
    let search = GridSearch {
        embeddings,
        cache_dir: args.cache,
    };
    let metric = match args.metric {
        MetricArg::Windowdiff => RankMetric::Windowdiff,
        MetricArg::SegAcc => RankMetric::SegAcc,
    };
    log::info!("{} configurations, {} stages", configs.len(), stages.len());
    let ranking = search.staged_search(&configs, &stages, metric)?;
    fsio::write_json(&args.out, &ranking)
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let filter = PairFilter {
        min_words: args.min_words,
        max_words: args.max_words,
        min_sentences: args.min_sentences,
        max_sentences: args.max_sentences,
    };
    let mut per_meeting: Vec<Vec<TrainingPair>> = Vec::with_capacity(args.meeting.len());
    for dir in &args.meeting {
        let bundle = MeetingBundle::load_dir(dir)?;
        let alignment = load_alignment(&dir.join(&args.alignment))?;
        per_meeting.push(extract_pairs(&bundle, &alignment, &filter)?);
    }
    per_meeting.sort_by(|a, b| a.first().map(|p| &p.meeting_id).cmp(&b.first().map(|p| &p.meeting_id)));
    if args.split_by_meeting {
        std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
        for pairs in per_meeting.iter().filter(|p| !p.is_empty()) {
            write_pairs(pairs, &args.out.join(format!("{}.jsonl", pairs[0].meeting_id)))?;
        }
    } else {
        let all: Vec<TrainingPair> = per_meeting.into_iter().flatten().collect();
        log::info!("{} pairs", all.len());
        write_pairs(&all, &args.out)?;
    }
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Result<()> {
    let config = if args.config.is_empty() {
        None
    } else {
        Some(args.config.resolve()?)
    };
    let embeddings = match &config {
        Some(c) if c.scorer == ScorerKind::EmbeddingCosine => load_embeddings(&args.embeddings, None)?,
        _ => None,
    };
    let store = Arc::new(crate::annotation::AnnotationStore::open(&args.corpus, &args.state, config, embeddings)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
    runtime
        .block_on(crate::annotation::serve(store, args.addr, args.ui.as_deref()))
        .map_err(|e| Error::io(args.addr.to_string(), e))
}

fn dispatch(cli: Cli) -> Result<()> {
    let Format::Json = cli.format;
    match cli.command {
        Command::Segment(c) => cmd_segment(c),
        Command::Align(a) => cmd_align(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Serve(a) => cmd_serve(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            1
        }
    }
}
