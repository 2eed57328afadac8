//! Belief propagation for LDA on the document/word two-factor graph.
//!
//! The variable `z_{w,d}` receives one message from the document factor and
//! one from the word factor. With the product of neighbour messages replaced
//! by their sum (the sum-sum approximation) and the factor functions
//! normalizing over topics and over the vocabulary, the update is
//!
//! ```text
//! μ(z_{w,d}=j) ∝ (μ(z_{-w,d}=j) + α) / Σ_j [μ(z_{-w,d}=j) + α]
//!              × (μ(z_{w,-d}=j) + β) / Σ_w [μ(z_{w,-d}=j) + β]
//! ```
//!
//! The vocabulary sum in the second denominator is taken from the cached
//! global totals minus the current entry's own contribution.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Corpus;
use crate::error::{bad_config, invalid, Error, Result};
use crate::math::{self, Matrix};
use crate::message::MessageState;

/// Order in which a sweep commits new messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Commit each message immediately; later updates see it. Reference semantics.
    #[default]
    Sequential,
    /// Compute every update from the previous sweep's state, commit at the end.
    /// Updates are independent, so they are evaluated in parallel when the
    /// `parallel` feature is on.
    Synchronous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub topics: usize,
    /// Symmetric Dirichlet pseudo-count on θ.
    pub alpha: f64,
    /// Symmetric Dirichlet pseudo-count on φ.
    pub beta: f64,
    pub max_iters: usize,
    /// Stop once the largest L∞ message change of a sweep is below this.
    pub tol: f64,
    pub schedule: Schedule,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults: `α = 50/J`, `β = 0.01`, at most 500 sweeps, tolerance `1e-4`.
    pub fn new(topics: usize) -> Self {
        TrainConfig {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            max_iters: 500,
            tol: 1e-4,
            schedule: Schedule::Sequential,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.topics == 0 {
            return Err(bad_config!("topic count must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(bad_config!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(bad_config!("beta must be positive, got {}", self.beta));
        }
        if self.max_iters == 0 {
            return Err(bad_config!("at least one iteration is required"));
        }
        if !(self.tol >= 0.0) {
            return Err(bad_config!("tolerance must be non-negative, got {}", self.tol));
        }
        Ok(())
    }
}

/// Estimated parameters: `theta` is `D × J`, `phi` is `J × W`; all rows sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub theta: Matrix,
    pub phi: Matrix,
}

impl ModelParams {
    pub fn topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn num_vocab(&self) -> usize {
        self.phi.cols()
    }
}

/// One training iteration as logged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub max_delta: f64,
    pub perplexity: f64,
}

/// Document- and word-factor messages for entry `idx`, written into
/// `doc_msg` and `word_msg`. Both are normalized factor outputs, not yet combined.
#[inline]
pub(crate) fn factor_messages(
    corpus: &Corpus,
    state: &MessageState,
    alpha: f64,
    beta: f64,
    idx: usize,
    doc_msg: &mut [f64],
    word_msg: &mut [f64],
) {
    state.neighbor_sums_at(corpus, idx, doc_msg, word_msg);
    let n = corpus.count_of(idx) as f64;
    let mu = state.message(idx);
    let global = state.global_total();
    let vocab_mass = corpus.num_vocab() as f64 * beta;
    let mut doc_norm = 0.0;
    for j in 0..doc_msg.len() {
        doc_msg[j] += alpha;
        doc_norm += doc_msg[j];
        let word_norm = (global[j] - n * mu[j]).max(0.0) + vocab_mass;
        word_msg[j] = (word_msg[j] + beta) / word_norm;
    }
    for x in doc_msg.iter_mut() {
        *x /= doc_norm;
    }
}

/// Product of the two factor messages, normalized over topics.
#[inline]
pub(crate) fn combine(doc_msg: &[f64], word_msg: &[f64], out: &mut [f64]) {
    for j in 0..out.len() {
        out[j] = doc_msg[j] * word_msg[j];
    }
    math::normalize(out);
}

/// Reusable buffers for one update.
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    pub doc_msg: Vec<f64>,
    pub word_msg: Vec<f64>,
    pub mix: Vec<f64>,
}

impl Scratch {
    pub fn new(topics: usize) -> Self {
        Scratch { doc_msg: vec![0.0; topics], word_msg: vec![0.0; topics], mix: vec![0.0; topics] }
    }
}

/// The full message update for entry `(w, d)`.
pub fn lda_update(corpus: &Corpus, state: &MessageState, config: &TrainConfig, w: usize, d: usize) -> Result<Vec<f64>> {
    let idx = corpus.find(d, w).ok_or(Error::MissingEntry { word: w, doc: d })?;
    let mut scratch = Scratch::new(state.topics());
    let mut out = vec![0.0; state.topics()];
    lda_update_at(corpus, state, config.alpha, config.beta, idx, &mut scratch, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn lda_update_at(
    corpus: &Corpus,
    state: &MessageState,
    alpha: f64,
    beta: f64,
    idx: usize,
    scratch: &mut Scratch,
    out: &mut [f64],
) {
    factor_messages(corpus, state, alpha, beta, idx, &mut scratch.doc_msg, &mut scratch.word_msg);
    combine(&scratch.doc_msg, &scratch.word_msg, out);
}

/// Runs one sweep of `update` over every entry and returns the largest L∞ change.
///
/// The aggregates are rebuilt from scratch at the end of every sweep, so the
/// state after a sweep depends only on the messages.
pub(crate) fn sweep_with<F>(corpus: &Corpus, state: &mut MessageState, schedule: Schedule, update: F) -> f64
where
    F: Fn(&MessageState, usize, &mut Scratch, &mut [f64]) + Sync,
{
    let k = state.topics();
    match schedule {
        Schedule::Sequential => {
            let mut scratch = Scratch::new(k);
            let mut new_mu = vec![0.0; k];
            let mut max_delta: f64 = 0.0;
            for idx in 0..corpus.nnz() {
                update(state, idx, &mut scratch, &mut new_mu);
                max_delta = max_delta.max(math::max_abs_diff(&new_mu, state.message(idx)));
                state.commit_at(corpus, idx, &new_mu);
            }
            state.refresh(corpus);
            max_delta
        }
        Schedule::Synchronous => {
            let mut next = vec![0.0; state.messages().len()];
            synchronous_pass(state, k, &mut next, &update);
            let max_delta = math::max_abs_diff(&next, state.messages());
            state.replace_all(corpus, next);
            max_delta
        }
    }
}

#[cfg(feature = "parallel")]
fn synchronous_pass<F>(state: &MessageState, k: usize, next: &mut [f64], update: &F)
where
    F: Fn(&MessageState, usize, &mut Scratch, &mut [f64]) + Sync,
{
    use rayon::prelude::*;
    if k == 0 {
        return;
    }
    next.par_chunks_mut(k)
        .enumerate()
        .for_each_init(|| Scratch::new(k), |scratch, (idx, out)| update(state, idx, scratch, out));
}

#[cfg(not(feature = "parallel"))]
fn synchronous_pass<F>(state: &MessageState, k: usize, next: &mut [f64], update: &F)
where
    F: Fn(&MessageState, usize, &mut Scratch, &mut [f64]) + Sync,
{
    let mut scratch = Scratch::new(k);
    for (idx, out) in next.chunks_exact_mut(k).enumerate() {
        update(state, idx, &mut scratch, out);
    }
}

/// One LDA sweep; returns the largest L∞ message change.
pub fn lda_sweep(corpus: &Corpus, state: &mut MessageState, config: &TrainConfig) -> f64 {
    let (alpha, beta) = (config.alpha, config.beta);
    sweep_with(corpus, state, config.schedule, |s, idx, scratch, out| {
        lda_update_at(corpus, s, alpha, beta, idx, scratch, out)
    })
}

/// `θ_d(j) = (μ(z_{·,d}=j) + α) / Σ_j [μ(z_{·,d}=j) + α]`.
pub fn estimate_theta(state: &MessageState, num_docs: usize, alpha: f64) -> Matrix {
    let k = state.topics();
    let mut theta = Matrix::zeros(num_docs, k);
    for d in 0..num_docs {
        let row = theta.row_mut(d);
        let totals = state.doc_total(d);
        let mut norm = 0.0;
        for j in 0..k {
            row[j] = totals[j] + alpha;
            norm += row[j];
        }
        row.iter_mut().for_each(|x| *x /= norm);
    }
    theta
}

/// `φ_w(j) = (μ(z_{w,·}=j) + β) / Σ_w [μ(z_{w,·}=j) + β]`, stored topic-major.
pub fn estimate_phi(state: &MessageState, num_vocab: usize, beta: f64) -> Matrix {
    let k = state.topics();
    let mut phi = Matrix::zeros(k, num_vocab);
    let mut norm = vec![0.0; k];
    for w in 0..num_vocab {
        let totals = state.word_total(w);
        for j in 0..k {
            let v = totals[j] + beta;
            phi.row_mut(j)[w] = v;
            norm[j] += v;
        }
    }
    for j in 0..k {
        let n = norm[j];
        phi.row_mut(j).iter_mut().for_each(|x| *x /= n);
    }
    phi
}

pub fn estimate_params(corpus: &Corpus, state: &MessageState, config: &TrainConfig) -> ModelParams {
    ModelParams {
        alpha: config.alpha,
        beta: config.beta,
        theta: estimate_theta(state, corpus.num_docs(), config.alpha),
        phi: estimate_phi(state, corpus.num_vocab(), config.beta),
    }
}

/// Per-token perplexity `exp(−Σ n log Σ_j θ_d(j) φ_w(j) / Σ n)`.
pub fn perplexity(theta: &Matrix, phi: &Matrix, corpus: &Corpus) -> Result<f64> {
    if theta.rows() != corpus.num_docs() || phi.cols() < corpus.num_vocab() || theta.cols() != phi.rows() {
        return Err(invalid!(
            "θ is {}x{}, φ is {}x{}, corpus is {}x{}",
            theta.rows(),
            theta.cols(),
            phi.rows(),
            phi.cols(),
            corpus.num_docs(),
            corpus.num_vocab()
        ));
    }
    let tokens = corpus.total_tokens();
    if tokens == 0 {
        return Err(invalid!("perplexity of an empty corpus is undefined"));
    }
    let mut log_lik = 0.0;
    for e in corpus.entries() {
        let th = theta.row(e.doc);
        let p: f64 = (0..th.len()).map(|j| th[j] * phi.get(j, e.word)).sum();
        if !(p > 0.0) {
            return Err(Error::ZeroProbability { word: e.word, doc: e.doc });
        }
        log_lik += e.count as f64 * math::ln(p);
    }
    Ok(math::exp(-log_lik / tokens as f64))
}

/// Result of a finished training run.
#[derive(Debug, Clone)]
pub struct LdaFit {
    pub params: ModelParams,
    pub state: MessageState,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

/// Step-wise LDA training, resumable from a saved [`MessageState`].
#[derive(Debug, Clone)]
pub struct LdaTrainer<'a> {
    corpus: &'a Corpus,
    config: TrainConfig,
    state: MessageState,
    iteration: usize,
    converged: bool,
    trace: Vec<TraceRow>,
}

impl<'a> LdaTrainer<'a> {
    pub fn new(corpus: &'a Corpus, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let state = MessageState::init(corpus, config.topics, config.seed)?;
        Ok(LdaTrainer { corpus, config, state, iteration: 0, converged: false, trace: Vec::new() })
    }

    /// Continues from `state` after `iteration` completed sweeps.
    pub fn resume(
        corpus: &'a Corpus,
        config: TrainConfig,
        state: MessageState,
        iteration: usize,
        converged: bool,
    ) -> Result<Self> {
        config.validate()?;
        if state.topics() != config.topics || state.num_entries() != corpus.nnz() {
            return Err(invalid!("saved state does not match corpus and topic count"));
        }
        Ok(LdaTrainer { corpus, config, state, iteration, converged, trace: Vec::new() })
    }

    pub fn state(&self) -> &MessageState {
        &self.state
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn is_done(&self) -> bool {
        self.converged || self.iteration >= self.config.max_iters
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn params(&self) -> ModelParams {
        estimate_params(self.corpus, &self.state, &self.config)
    }

    pub fn step(&mut self) -> Result<TraceRow> {
        let max_delta = lda_sweep(self.corpus, &mut self.state, &self.config);
        self.iteration += 1;
        self.converged = max_delta < self.config.tol;
        let params = self.params();
        let row =
            TraceRow { iteration: self.iteration, max_delta, perplexity: training_perplexity(&params, self.corpus)? };
        self.trace.push(row);
        Ok(row)
    }

    pub fn run(mut self) -> Result<LdaFit> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(LdaFit { params: self.params(), state: self.state, trace: self.trace, converged: self.converged })
    }
}

/// Perplexity on the training corpus; `NaN` for a corpus without tokens.
pub(crate) fn training_perplexity(params: &ModelParams, corpus: &Corpus) -> Result<f64> {
    if corpus.total_tokens() == 0 {
        return Ok(f64::NAN);
    }
    perplexity(&params.theta, &params.phi, corpus)
}

/// Trains LDA until convergence or `max_iters` sweeps.
pub fn train_lda(corpus: &Corpus, config: &TrainConfig) -> Result<LdaFit> {
    LdaTrainer::new(corpus, config.clone())?.run()
}

/// Held-out inference with `φ` fixed: only document-factor messages adapt.
///
/// The word-factor message of `(w, d)` is `φ_w(j)` itself. Uses the model's
/// `α` and the sweep limits, schedule and seed of `config`.
pub fn fold_in(test: &Corpus, model: &ModelParams, config: &TrainConfig) -> Result<Matrix> {
    config.validate()?;
    let k = model.topics();
    if let Some(e) = test.entries().find(|e| e.word >= model.num_vocab()) {
        return Err(invalid!("test word id {} outside the model vocabulary (W = {})", e.word, model.num_vocab()));
    }
    let mut state = MessageState::init(test, k, config.seed)?;
    let alpha = model.alpha;
    let phi = &model.phi;
    for _ in 0..config.max_iters {
        let delta = sweep_with(test, &mut state, config.schedule, |s, idx, scratch, out| {
            s.neighbor_sums_at(test, idx, &mut scratch.doc_msg, &mut scratch.word_msg);
            let w = test.word_of(idx);
            for j in 0..k {
                out[j] = (scratch.doc_msg[j] + alpha) * phi.get(j, w);
            }
            math::normalize(out);
        });
        if delta < config.tol {
            break;
        }
    }
    Ok(estimate_theta(&state, test.num_docs(), alpha))
}
