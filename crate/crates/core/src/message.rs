//! Per-entry topic messages and their count-weighted aggregates.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;
use crate::error::{bad_config, invalid, Error, Result};
use crate::math;

/// Tolerance on `Σ_j μ(j) = 1` for committed messages.
pub const NORM_TOL: f64 = 1e-9;

/// Topic messages `μ(z_{w,d})`, one length-`J` vector per corpus entry, plus
///
/// * `doc_totals[d]   = Σ_w n_{w,d} μ(z_{w,d})`
/// * `word_totals[w]  = Σ_d n_{w,d} μ(z_{w,d})`
/// * `global_totals   = Σ_w word_totals[w]`
///
/// The aggregates are updated incrementally by [`MessageState::commit_at`]
/// and rebuilt from scratch by [`MessageState::refresh`].
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    topics: usize,
    seed: u64,
    messages: Vec<f64>,
    doc_totals: Vec<f64>,
    word_totals: Vec<f64>,
    global_totals: Vec<f64>,
}

impl MessageState {
    /// Seeded uniform draws, normalized per entry; aggregates computed once.
    pub fn init(corpus: &Corpus, topics: usize, seed: u64) -> Result<Self> {
        if topics == 0 {
            return Err(bad_config!("topic count must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut messages = vec![0.0; corpus.nnz() * topics];
        for mu in messages.chunks_exact_mut(topics) {
            for x in mu.iter_mut() {
                // (0, 1]: keeps every component strictly positive
                *x = 1.0 - rng.random::<f64>();
            }
            math::normalize(mu);
        }
        Self::assemble(corpus, topics, seed, messages)
    }

    /// Restores a state from raw messages (e.g. a checkpoint); aggregates are recomputed.
    pub fn from_messages(corpus: &Corpus, topics: usize, seed: u64, messages: Vec<f64>) -> Result<Self> {
        if topics == 0 {
            return Err(bad_config!("topic count must be at least 1"));
        }
        if messages.len() != corpus.nnz() * topics {
            return Err(invalid!("{} message values for {} entries x {} topics", messages.len(), corpus.nnz(), topics));
        }
        for mu in messages.chunks_exact(topics) {
            check_distribution(mu)?;
        }
        Self::assemble(corpus, topics, seed, messages)
    }

    fn assemble(corpus: &Corpus, topics: usize, seed: u64, messages: Vec<f64>) -> Result<Self> {
        let mut state = MessageState {
            topics,
            seed,
            messages,
            doc_totals: vec![0.0; corpus.num_docs() * topics],
            word_totals: vec![0.0; corpus.num_vocab() * topics],
            global_totals: vec![0.0; topics],
        };
        state.refresh(corpus);
        Ok(state)
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_entries(&self) -> usize {
        self.messages.len() / self.topics
    }

    /// All messages, entry-major.
    pub fn messages(&self) -> &[f64] {
        &self.messages
    }

    #[inline]
    pub fn message(&self, idx: usize) -> &[f64] {
        &self.messages[idx * self.topics..(idx + 1) * self.topics]
    }

    #[inline]
    pub fn doc_total(&self, d: usize) -> &[f64] {
        &self.doc_totals[d * self.topics..(d + 1) * self.topics]
    }

    #[inline]
    pub fn word_total(&self, w: usize) -> &[f64] {
        &self.word_totals[w * self.topics..(w + 1) * self.topics]
    }

    #[inline]
    pub fn global_total(&self) -> &[f64] {
        &self.global_totals
    }

    /// Exclusion sums for `(w, d)`: `(μ(z_{-w,d}), μ(z_{w,-d}))`.
    pub fn neighbor_sums(&self, corpus: &Corpus, w: usize, d: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let idx = corpus.find(d, w).ok_or(Error::MissingEntry { word: w, doc: d })?;
        let mut minus_w = vec![0.0; self.topics];
        let mut minus_d = vec![0.0; self.topics];
        self.neighbor_sums_at(corpus, idx, &mut minus_w, &mut minus_d);
        Ok((minus_w, minus_d))
    }

    /// Allocation-free form of [`MessageState::neighbor_sums`] by entry index.
    #[inline]
    pub fn neighbor_sums_at(&self, corpus: &Corpus, idx: usize, minus_w: &mut [f64], minus_d: &mut [f64]) {
        let n = corpus.count_of(idx) as f64;
        let mu = self.message(idx);
        let doc = self.doc_total(corpus.doc_of(idx));
        let word = self.word_total(corpus.word_of(idx));
        for j in 0..self.topics {
            let own = n * mu[j];
            minus_w[j] = (doc[j] - own).max(0.0);
            minus_d[j] = (word[j] - own).max(0.0);
        }
    }

    /// Replaces `μ(z_{w,d})` and shifts the aggregates by `n_{w,d}·(new − old)`.
    pub fn commit_message(&mut self, corpus: &Corpus, w: usize, d: usize, new_mu: &[f64]) -> Result<()> {
        let idx = corpus.find(d, w).ok_or(Error::MissingEntry { word: w, doc: d })?;
        if new_mu.len() != self.topics {
            return Err(invalid!("message of length {} for {} topics", new_mu.len(), self.topics));
        }
        check_distribution(new_mu)?;
        self.commit_at(corpus, idx, new_mu);
        Ok(())
    }

    /// Unchecked commit by entry index; `new_mu` must already be a distribution.
    #[inline]
    pub fn commit_at(&mut self, corpus: &Corpus, idx: usize, new_mu: &[f64]) {
        let k = self.topics;
        let n = corpus.count_of(idx) as f64;
        let (d, w) = (corpus.doc_of(idx), corpus.word_of(idx));
        for j in 0..k {
            let delta = n * (new_mu[j] - self.messages[idx * k + j]);
            self.doc_totals[d * k + j] += delta;
            self.word_totals[w * k + j] += delta;
            self.global_totals[j] += delta;
        }
        self.messages[idx * k..(idx + 1) * k].copy_from_slice(new_mu);
    }

    /// Replaces every message at once and rebuilds the aggregates.
    pub(crate) fn replace_all(&mut self, corpus: &Corpus, messages: Vec<f64>) {
        debug_assert_eq!(messages.len(), self.messages.len());
        self.messages = messages;
        self.refresh(corpus);
    }

    /// Recomputes all aggregates from the raw messages.
    pub fn refresh(&mut self, corpus: &Corpus) {
        let (doc, word, global) = self.recompute(corpus);
        self.doc_totals = doc;
        self.word_totals = word;
        self.global_totals = global;
    }

    fn recompute(&self, corpus: &Corpus) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let k = self.topics;
        let mut doc = vec![0.0; corpus.num_docs() * k];
        let mut word = vec![0.0; corpus.num_vocab() * k];
        for idx in 0..corpus.nnz() {
            let n = corpus.count_of(idx) as f64;
            let (d, w) = (corpus.doc_of(idx), corpus.word_of(idx));
            let mu = self.message(idx);
            for j in 0..k {
                doc[d * k + j] += n * mu[j];
                word[w * k + j] += n * mu[j];
            }
        }
        let mut global = vec![0.0; k];
        for row in word.chunks_exact(k) {
            for j in 0..k {
                global[j] += row[j];
            }
        }
        (doc, word, global)
    }

    /// Largest deviation between the cached aggregates and a from-scratch rebuild.
    pub fn aggregate_drift(&self, corpus: &Corpus) -> f64 {
        let (doc, word, global) = self.recompute(corpus);
        math::max_abs_diff(&doc, &self.doc_totals)
            .max(math::max_abs_diff(&word, &self.word_totals))
            .max(math::max_abs_diff(&global, &self.global_totals))
    }
}

fn check_distribution(mu: &[f64]) -> Result<()> {
    let sum: f64 = mu.iter().sum();
    let min = mu.iter().copied().fold(f64::INFINITY, f64::min);
    if (sum - 1.0).abs() > NORM_TOL || !(min >= 0.0) {
        return Err(Error::Unnormalized { sum, min });
    }
    Ok(())
}
