use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;

use tagtopic_core::corpus::{generate_synthetic, train_test_split, SyntheticConfig, TopicWords};
use tagtopic_core::eval::{self, TagRecScores, DEFAULT_FUSION_WEIGHT, DEFAULT_SUGGESTIONS};
use tagtopic_core::lda::{self, LdaTrainer, ModelParams};
use tagtopic_core::ttm::{self, TtmTrainer};
use tagtopic_core::{Corpus, Matrix, NeighborMode, Schedule, TagGraph, TraceRow, TrainConfig, TtmConfig, TtmState};

use crate::checkpoint::{neighbor_name, parse_neighbor, schedule_name, Checkpoint};
use crate::config::FileConfig;
use crate::error::{CliError, Result};
use crate::formats;

#[derive(Debug, Parser)]
#[command(name = "tagtopic", version, about = "Loopy BP for LDA and tag-topic models")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Generate a synthetic tagged corpus with known topics.
    Synth(SynthArgs),
    /// Split a corpus and its tags into train and test documents.
    Split(SplitArgs),
    /// Train LDA or the tag-topic model.
    Train(TrainArgs),
    /// Held-out perplexity of a trained model on a test corpus.
    Perplexity(PerplexityArgs),
    /// Export topic-proportion features for external classifiers.
    #[command(subcommand)]
    Export(ExportCommand),
    /// Dump word-to-tag credit from a TTM checkpoint.
    Credit(CreditArgs),
    /// Top words per topic.
    Topics(TopicsArgs),
    /// Fuse two tag score files, suggest tags and score the suggestions.
    Tagrec(TagrecArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lda,
    Ttm,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    pub topics: usize,
    #[arg(long, default_value_t = 200)]
    pub docs: usize,
    #[arg(long, default_value_t = 100)]
    pub vocab: usize,
    #[arg(long, default_value_t = 3)]
    pub tags: usize,
    #[arg(long, default_value_t = 1)]
    pub tags_per_doc: usize,
    #[arg(long, default_value_t = 50)]
    pub tokens_per_doc: usize,
    /// Dirichlet mass on the topics of a document's tags.
    #[arg(long, default_value_t = 10.0)]
    pub concentration: f64,
    /// Dirichlet mass spread over all topics.
    #[arg(long, default_value_t = 0.1)]
    pub background: f64,
    /// Symmetric Dirichlet concentration of each topic's word distribution.
    #[arg(long, default_value_t = 0.1, conflicts_with = "disjoint")]
    pub word_prior: f64,
    /// Give each topic its own block of words instead.
    #[arg(long)]
    pub disjoint: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub tags: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Tag file; required for the tag-topic model.
    #[arg(long)]
    pub tags: Option<PathBuf>,
    /// Tag count T (default: one past the largest tag id).
    #[arg(long)]
    pub num_tags: Option<usize>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub topics: Option<usize>,
    /// Default 50/J.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Default 0.01.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Weight of the pairwise tag messages (default 0.2).
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Weight of the hyperedge message (default 0).
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Hyperedge tuple order, 2 or 3 (default 3).
    #[arg(long)]
    pub order: Option<usize>,
    /// Per-tag / per-document relation cap; 0 disables it (default 10000).
    #[arg(long)]
    pub tuple_cap: Option<usize>,
    /// LDA sweeps before the tag messages switch on (default 10).
    #[arg(long)]
    pub warmup: Option<usize>,
    /// How tuples pair documents across tags: cross or joint (default cross).
    #[arg(long)]
    pub neighbors: Option<String>,
    /// Maximum number of sweeps (default 500).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Convergence threshold on the largest message change (default 1e-4).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use the synchronous schedule on this many worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Top-k tags per word written to credit.txt (TTM only, default 1).
    #[arg(long)]
    pub credit_top_k: Option<usize>,
    /// TOML file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Continue from a checkpoint written by an earlier run.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Also write a checkpoint every N sweeps.
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerplexityArgs {
    /// Directory written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Held-out corpus over the training vocabulary.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Fold-in sweeps (default 500).
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExportCommand {
    /// Hadamard products of document pairs' topic proportions, one CSV row per pair.
    Links {
        #[arg(long)]
        theta: PathBuf,
        /// Lines `d d' label` with label 0 or 1.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Topic proportions of labelled documents, one CSV row per document.
    Docs {
        #[arg(long)]
        theta: PathBuf,
        /// Lines `d label`.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct CreditArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub tags: PathBuf,
    #[arg(long)]
    pub num_tags: Option<usize>,
    /// TTM checkpoint written by `train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub top_k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TopicsArgs {
    /// Topic-word matrix written by `train`.
    #[arg(long)]
    pub phi: PathBuf,
    /// One word per line.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(short = 'k', long, default_value_t = 10)]
    pub top: usize,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TagrecArgs {
    /// First score file, lines `d t score`.
    #[arg(long)]
    pub scores1: PathBuf,
    /// Second score file over the same (d, t) pairs.
    #[arg(long)]
    pub scores2: PathBuf,
    /// Weight of the first source.
    #[arg(long, default_value_t = DEFAULT_FUSION_WEIGHT)]
    pub omega: f64,
    #[arg(long, default_value_t = DEFAULT_SUGGESTIONS)]
    pub top_k: usize,
    /// Ground-truth tags of the test documents.
    #[arg(long)]
    pub truth: PathBuf,
    /// Number of test documents (default: as many as the scores cover).
    #[arg(long)]
    pub docs: Option<usize>,
    #[arg(long)]
    pub num_tags: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let _ = env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .parse_default_env()
        .try_init();
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match cli.command {
        Command::Synth(a) => synth(&a, &argv),
        Command::Split(a) => split(&a, &argv),
        Command::Train(a) => train(&a, &argv),
        Command::Perplexity(a) => perplexity(&a).map(|p| println!("{p}")),
        Command::Export(e) => export(&e),
        Command::Credit(a) => credit(&a),
        Command::Topics(a) => topics(&a),
        Command::Tagrec(a) => tagrec(&a, &argv),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    tagtopic_version: &'a str,
    argv: &'a [String],
    config: C,
}

fn write_manifest<C: Serialize>(dir: &Path, command: &str, argv: &[String], config: C) -> Result<()> {
    let m = Manifest { command, tagtopic_version: env!("CARGO_PKG_VERSION"), argv, config };
    let text = toml::to_string(&m).map_err(|e| CliError::Config(e.to_string()))?;
    formats::write_text(&dir.join("manifest.toml"), &text)
}

#[derive(Serialize)]
struct SynthEcho {
    topics: usize,
    docs: usize,
    vocab: usize,
    tags: usize,
    tags_per_doc: usize,
    tokens_per_doc: usize,
    concentration: f64,
    background: f64,
    word_prior: Option<f64>,
    disjoint: bool,
    seed: u64,
}

fn synth(a: &SynthArgs, argv: &[String]) -> Result<()> {
    let cfg = SyntheticConfig {
        topics: a.topics,
        docs: a.docs,
        vocab: a.vocab,
        tags: a.tags,
        tags_per_doc: a.tags_per_doc,
        tokens_per_doc: a.tokens_per_doc,
        topic_concentration: a.concentration,
        background: a.background,
        topic_words: if a.disjoint { TopicWords::DisjointBlocks } else { TopicWords::Dirichlet(a.word_prior) },
        seed: a.seed,
    };
    let (corpus, tags, truth) = generate_synthetic(&cfg)?;
    create_dir(&a.out)?;
    formats::write_corpus(&a.out.join("corpus.txt"), &corpus)?;
    formats::write_tags(&a.out.join("tags.txt"), &tags)?;
    formats::write_matrix(&a.out.join("true_theta.txt"), &truth.theta)?;
    formats::write_matrix(&a.out.join("true_phi.txt"), &truth.phi)?;
    let map: String = truth.tag_topic.iter().enumerate().map(|(t, j)| format!("{t} {j}\n")).collect();
    formats::write_text(&a.out.join("tag_topics.txt"), &map)?;
    let echo = SynthEcho {
        topics: a.topics,
        docs: a.docs,
        vocab: a.vocab,
        tags: a.tags,
        tags_per_doc: a.tags_per_doc,
        tokens_per_doc: a.tokens_per_doc,
        concentration: a.concentration,
        background: a.background,
        word_prior: (!a.disjoint).then_some(a.word_prior),
        disjoint: a.disjoint,
        seed: a.seed,
    };
    write_manifest(&a.out, "synth", argv, echo)
}

fn load_tags_for(path: Option<&Path>, corpus: &Corpus, num_tags: Option<usize>) -> Result<TagGraph> {
    match path {
        Some(p) => formats::read_tags(p, corpus.num_docs(), num_tags),
        None => Ok(TagGraph::untagged(corpus.num_docs())),
    }
}

fn split(a: &SplitArgs, argv: &[String]) -> Result<()> {
    let corpus = formats::read_corpus(&a.corpus)?;
    let tags = load_tags_for(a.tags.as_deref(), &corpus, None)?;
    let s = train_test_split(&corpus, &tags, a.test_fraction, a.seed)?;
    create_dir(&a.out)?;
    formats::write_corpus(&a.out.join("train.txt"), &s.train)?;
    formats::write_corpus(&a.out.join("test.txt"), &s.test)?;
    if a.tags.is_some() {
        formats::write_tags(&a.out.join("train_tags.txt"), &s.train_tags)?;
        formats::write_tags(&a.out.join("test_tags.txt"), &s.test_tags)?;
    }
    let ids = |v: &[usize]| v.iter().map(|d| format!("{d}\n")).collect::<String>();
    formats::write_text(&a.out.join("train_ids.txt"), &ids(&s.train_ids))?;
    formats::write_text(&a.out.join("test_ids.txt"), &ids(&s.test_ids))?;
    #[derive(Serialize)]
    struct Echo {
        test_fraction: f64,
        seed: u64,
    }
    write_manifest(&a.out, "split", argv, Echo { test_fraction: a.test_fraction, seed: a.seed })
}

/// Fully resolved training settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSettings {
    pub model: ModelKind,
    pub train: TrainConfig,
    pub ttm: TtmConfig,
    pub threads: Option<usize>,
    pub credit_top_k: usize,
}

#[derive(Serialize)]
struct TrainEcho {
    model: ModelKind,
    topics: usize,
    alpha: f64,
    beta: f64,
    iters: usize,
    tol: f64,
    seed: u64,
    schedule: &'static str,
    threads: Option<usize>,
    omega1: Option<f64>,
    omega2: Option<f64>,
    order: Option<usize>,
    tuple_cap: Option<usize>,
    warmup: Option<usize>,
    neighbors: Option<&'static str>,
    resumed_from: Option<String>,
}

impl TrainSettings {
    /// Flags over config file over defaults.
    pub fn resolve(a: &TrainArgs, file: &FileConfig) -> Result<Self> {
        let model = match (a.model, file.model.as_deref()) {
            (Some(m), _) => m,
            (None, None) => ModelKind::Lda,
            (None, Some(s)) => {
                ModelKind::from_str(s, true).map_err(|_| CliError::Config(format!("unknown model {s:?}")))?
            }
        };
        let topics = a.topics.or(file.topics).unwrap_or(10);
        let defaults = TrainConfig::new(topics);
        let threads = a.threads.or(file.threads);
        if threads == Some(0) {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        let train = TrainConfig {
            topics,
            alpha: a.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            beta: a.beta.or(file.beta).unwrap_or(defaults.beta),
            max_iters: a.iters.or(file.iters).unwrap_or(defaults.max_iters),
            tol: a.tol.or(file.tol).unwrap_or(defaults.tol),
            schedule: if threads.is_some() { Schedule::Synchronous } else { Schedule::Sequential },
            seed: a.seed.or(file.seed).unwrap_or(0),
        };
        train.validate()?;
        let preset = TtmConfig::pairwise();
        let neighbors = match a.neighbors.as_deref().or(file.neighbors.as_deref()) {
            None => NeighborMode::default(),
            Some(s) => parse_neighbor(s)
                .ok_or_else(|| CliError::Config(format!("neighbours must be cross or joint, got {s:?}")))?,
        };
        let ttm = TtmConfig {
            omega1: a.omega1.or(file.omega1).unwrap_or(preset.omega1),
            omega2: a.omega2.or(file.omega2).unwrap_or(preset.omega2),
            order: a.order.or(file.order).unwrap_or(preset.order),
            tuple_cap: match a.tuple_cap.or(file.tuple_cap) {
                None => preset.tuple_cap,
                Some(0) => None,
                Some(n) => Some(n),
            },
            neighbor_mode: neighbors,
            warmup: a.warmup.or(file.warmup).unwrap_or(preset.warmup),
        };
        if model == ModelKind::Ttm {
            ttm.validate()?;
        }
        let credit_top_k = a.credit_top_k.or(file.credit_top_k).unwrap_or(1);
        Ok(TrainSettings { model, train, ttm, threads, credit_top_k })
    }

    fn echo(&self, resumed_from: Option<&Path>) -> TrainEcho {
        let ttm = (self.model == ModelKind::Ttm).then_some(&self.ttm);
        TrainEcho {
            model: self.model,
            topics: self.train.topics,
            alpha: self.train.alpha,
            beta: self.train.beta,
            iters: self.train.max_iters,
            tol: self.train.tol,
            seed: self.train.seed,
            schedule: schedule_name(self.train.schedule),
            threads: self.threads,
            omega1: ttm.map(|t| t.omega1),
            omega2: ttm.map(|t| t.omega2),
            order: ttm.map(|t| t.order),
            tuple_cap: ttm.map(|t| t.tuple_cap.unwrap_or(0)),
            warmup: ttm.map(|t| t.warmup),
            neighbors: ttm.map(|t| neighbor_name(t.neighbor_mode)),
            resumed_from: resumed_from.map(|p| p.display().to_string()),
        }
    }
}

/// What a finished training run leaves behind.
struct Trained {
    params: ModelParams,
    trace: Vec<TraceRow>,
    checkpoint: Checkpoint,
    credit: Option<Vec<ttm::CreditRecord>>,
}

fn train(a: &TrainArgs, argv: &[String]) -> Result<()> {
    let file = FileConfig::load(a.config.as_deref())?;
    let mut settings = TrainSettings::resolve(a, &file)?;
    let corpus = formats::read_corpus(&a.corpus)?;
    let tags = match (settings.model, a.tags.as_deref()) {
        (ModelKind::Ttm, None) => return Err(CliError::Config("the tag-topic model needs --tags".into())),
        (_, path) => load_tags_for(path, &corpus, a.num_tags)?,
    };
    let resume = a.resume.as_deref().map(Checkpoint::load).transpose()?;
    create_dir(&a.out)?;

    let threads = settings.threads;
    let mut run = || train_loop(&corpus, &tags, &mut settings, resume.as_ref(), a.checkpoint_every, &a.out);
    let trained = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(run),
        None => run(),
    }?;

    let out = &a.out;
    formats::write_matrix(&out.join("theta.txt"), &trained.params.theta)?;
    formats::write_matrix(&out.join("phi.txt"), &trained.params.phi)?;
    formats::write_trace(&out.join("trace.csv"), &trained.trace)?;
    trained.checkpoint.save(&out.join("checkpoint.txt"))?;
    formats::write_text(
        &out.join("params.toml"),
        &toml::to_string(&ModelFile {
            topics: settings.train.topics,
            vocab: corpus.num_vocab(),
            alpha: trained.params.alpha,
            beta: trained.params.beta,
        })
        .map_err(|e| CliError::Config(e.to_string()))?,
    )?;
    if let Some(credit) = &trained.credit {
        formats::write_credit(&out.join("credit.txt"), credit)?;
    }
    write_manifest(out, "train", argv, settings.echo(a.resume.as_deref()))?;
    match trained.trace.last() {
        Some(r) => println!("{}", r.perplexity),
        None => println!("{}", lda::perplexity(&trained.params.theta, &trained.params.phi, &corpus)?),
    }
    Ok(())
}

fn train_loop(
    corpus: &Corpus,
    tags: &TagGraph,
    settings: &mut TrainSettings,
    resume: Option<&Checkpoint>,
    every: Option<usize>,
    out: &Path,
) -> Result<Trained> {
    let save = |ck: Checkpoint| ck.save(&out.join(format!("checkpoint_{:05}.txt", ck.iteration)));
    let due = |it: usize| every.is_some_and(|n| n > 0 && it.is_multiple_of(n));
    let log_row =
        |r: &TraceRow| info!("iteration {} max_delta {} perplexity {}", r.iteration, r.max_delta, r.perplexity);
    match settings.model {
        ModelKind::Lda => {
            let mut t = match resume {
                Some(ck) => ck.resume_lda(corpus, &mut settings.train)?,
                None => LdaTrainer::new(corpus, settings.train.clone())?,
            };
            while !t.is_done() {
                log_row(&t.step()?);
                if due(t.iteration()) {
                    save(Checkpoint::from_lda(&settings.train, &t))?;
                }
            }
            Ok(Trained {
                params: t.params(),
                trace: t.trace().to_vec(),
                checkpoint: Checkpoint::from_lda(&settings.train, &t),
                credit: None,
            })
        }
        ModelKind::Ttm => {
            let mut t = match resume {
                Some(ck) => ck.resume_ttm(corpus, tags, &mut settings.train, &mut settings.ttm)?,
                None => TtmTrainer::new(corpus, tags, settings.train.clone(), settings.ttm.clone())?,
            };
            info!("{} relations indexed", t.index().num_relations());
            while !t.is_done() {
                log_row(&t.step()?);
                if due(t.iteration()) {
                    save(Checkpoint::from_ttm(&settings.train, &settings.ttm, &t))?;
                }
            }
            Ok(Trained {
                params: t.params(),
                trace: t.trace().to_vec(),
                checkpoint: Checkpoint::from_ttm(&settings.train, &settings.ttm, &t),
                credit: Some(ttm::top_credit(corpus, tags, t.ttm_state(), settings.credit_top_k)),
            })
        }
    }
}

#[derive(Debug, Serialize, serde::Deserialize)]
struct ModelFile {
    topics: usize,
    vocab: usize,
    alpha: f64,
    beta: f64,
}

fn load_model(dir: &Path) -> Result<ModelParams> {
    let path = dir.join("params.toml");
    let meta: ModelFile = toml::from_str(&formats::read_text(&path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let phi = formats::read_matrix(&dir.join("phi.txt"))?;
    if phi.rows() != meta.topics || phi.cols() != meta.vocab {
        return Err(CliError::Config(format!(
            "phi.txt is {}x{}, params.toml says {}x{}",
            phi.rows(),
            phi.cols(),
            meta.topics,
            meta.vocab
        )));
    }
    Ok(ModelParams { alpha: meta.alpha, beta: meta.beta, theta: Matrix::zeros(0, meta.topics), phi })
}

/// Fold-in on the test corpus with `φ` fixed, then per-token perplexity.
pub fn perplexity(a: &PerplexityArgs) -> Result<f64> {
    let file = FileConfig::load(a.config.as_deref())?;
    let model = load_model(&a.model)?;
    let test = formats::read_corpus(&a.corpus)?;
    if test.num_vocab() != model.num_vocab() {
        return Err(tagtopic_core::Error::Validation(format!(
            "test vocabulary has {} words, model has {}",
            test.num_vocab(),
            model.num_vocab()
        ))
        .into());
    }
    let defaults = TrainConfig::new(model.topics());
    let cfg = TrainConfig {
        alpha: model.alpha,
        beta: model.beta,
        max_iters: a.iters.or(file.iters).unwrap_or(defaults.max_iters),
        tol: a.tol.or(file.tol).unwrap_or(defaults.tol),
        seed: a.seed.or(file.seed).unwrap_or(0),
        ..defaults
    };
    let theta = lda::fold_in(&test, &model, &cfg)?;
    Ok(lda::perplexity(&theta, &model.phi, &test)?)
}

fn export(e: &ExportCommand) -> Result<()> {
    match e {
        ExportCommand::Links { theta, pairs, out } => {
            let theta = formats::read_matrix(theta)?;
            let rows = eval::link_features(&theta, &formats::read_link_pairs(pairs)?)?;
            formats::write_features(out, theta.cols(), &rows)
        }
        ExportCommand::Docs { theta, labels, out } => {
            let theta = formats::read_matrix(theta)?;
            let labels = formats::read_labels(labels, theta.rows())?;
            let (rows, skipped) = eval::doc_features(&theta, &labels)?;
            if skipped > 0 {
                warn!("{skipped} unlabelled documents skipped");
            }
            formats::write_features(out, theta.cols(), &rows)
        }
    }
}

fn credit(a: &CreditArgs) -> Result<()> {
    let corpus = formats::read_corpus(&a.corpus)?;
    let tags = formats::read_tags(&a.tags, corpus.num_docs(), a.num_tags)?;
    let ck = Checkpoint::load(&a.checkpoint)?;
    let Some((_, parts)) = ck.ttm else {
        return Err(CliError::Config("credit needs a tag-topic checkpoint".into()));
    };
    let state = TtmState::from_parts(&corpus, &tags, ck.config.topics, parts)?;
    formats::write_credit(&a.out, &ttm::top_credit(&corpus, &tags, &state, a.top_k))
}

fn topics(a: &TopicsArgs) -> Result<()> {
    let phi = formats::read_matrix(&a.phi)?;
    let vocab = a.vocab.as_deref().map(formats::read_vocab).transpose()?;
    let table = formats::topic_table(&eval::top_words(&phi, a.top)?, vocab.as_deref());
    match &a.out {
        Some(p) => formats::write_text(p, &table),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn tagrec(a: &TagrecArgs, argv: &[String]) -> Result<()> {
    let scores = TagRecScores::join(a.omega, &formats::read_scores(&a.scores1)?, &formats::read_scores(&a.scores2)?)?;
    let docs = a.docs.unwrap_or_else(|| scores.num_docs());
    let truth = formats::read_tags(&a.truth, docs, a.num_tags)?;
    let ranked = eval::fuse_tagrec_scores(&scores, docs, a.top_k);
    if ranked.len() > docs {
        return Err(tagtopic_core::Error::Validation(format!("scores mention documents beyond --docs {docs}")).into());
    }
    let suggestions: Vec<Vec<usize>> = ranked.iter().map(|r| r.iter().map(|&(t, _)| t).collect()).collect();
    let result = eval::tagrec_metrics(&suggestions, &truth)?;
    create_dir(&a.out)?;
    formats::write_suggestions(&a.out.join("suggestions.txt"), &ranked)?;
    formats::write_metrics(&a.out.join("metrics.csv"), &result)?;
    let summary = formats::metrics_summary(&result);
    formats::write_text(&a.out.join("summary.txt"), &format!("{summary}\n"))?;
    #[derive(Serialize)]
    struct Echo {
        omega: f64,
        top_k: usize,
        docs: usize,
    }
    write_manifest(&a.out, "tagrec", argv, Echo { omega: a.omega, top_k: a.top_k, docs })?;
    println!("{summary}");
    Ok(())
}
