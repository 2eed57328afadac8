//! Tag-topic model: credit attribution, document-tag messages, pairwise and
//! higher-order factors over the tag hypergraph, and the fused word update.
//!
//! Per training iteration the document-level quantities are refreshed once,
//! in dependency order, before the word sweep:
//!
//! 1. credit `p(x_{w,d}=t) ∝ Σ_j μ(z_{w,d}=j) μ_{γt→z}(j)` (previous iteration's γ-messages);
//! 2. document-tag messages `μ̄_{d,t}`, the credit-weighted mean of the word messages;
//! 3. factors `f_{γt}` (mean Hadamard product over document pairs sharing `t`)
//!    and `f_{δd}` (mean Hadamard product over cross-tag document tuples);
//! 4. messages `μ_{γt→z} = f_{γt} ∘ Σ_{m∈ne(t)∖d} μ̄_{m,t}` and
//!    `μ_{δd→z} = f_{δd} ∘ Σ_{(m,m')} (μ̄_{m,t} + μ̄_{m',t'})`, each normalized.
//!
//! The word update mixes the document, tag and hyperedge messages convexly
//! with weights `(1 − ω₁ − ω₂, ω₁, ω₂)` and multiplies by the word-factor message.

mod relations;
mod train;

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, TagGraph};
use crate::error::{bad_config, invalid, Error, Result};
use crate::lda::{self, Scratch, TrainConfig};
use crate::math;
use crate::message::MessageState;

pub use relations::RelationIndex;
pub use train::{train_ttm, TtmFit, TtmTrainer};

/// RNG stream used for the random credit initialization.
const CREDIT_STREAM: u64 = 1;

/// How the documents of a tag subset `{t, t', …}` are paired up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborMode {
    /// One document from each `ne(t)`, all distinct.
    #[default]
    CrossProduct,
    /// Distinct documents that carry every tag of the subset.
    Joint,
}

/// Tag-topic model settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TtmConfig {
    /// Weight of the pairwise tag messages.
    pub omega1: f64,
    /// Weight of the hyperedge message.
    pub omega2: f64,
    /// Tuple order of the hyperedge factor, 2 or 3.
    pub order: usize,
    /// Per-tag / per-document relation cap; `None` enumerates everything.
    pub tuple_cap: Option<usize>,
    pub neighbor_mode: NeighborMode,
    /// Plain LDA sweeps run before the tag messages are switched on.
    ///
    /// Started cold, every tag's γ-message tends to lock onto the same
    /// globally dominant topic; a few LDA sweeps first separate the topics.
    pub warmup: usize,
}

impl TtmConfig {
    pub const DEFAULT_TUPLE_CAP: usize = 10_000;
    pub const DEFAULT_WARMUP: usize = 10;

    pub fn new(omega1: f64, omega2: f64) -> Self {
        TtmConfig {
            omega1,
            omega2,
            order: 3,
            tuple_cap: Some(Self::DEFAULT_TUPLE_CAP),
            neighbor_mode: NeighborMode::CrossProduct,
            warmup: Self::DEFAULT_WARMUP,
        }
    }

    /// TTM-P: pairwise relations only, `ω₁ = 0.2, ω₂ = 0`.
    pub fn pairwise() -> Self {
        Self::new(0.2, 0.0)
    }

    /// TTM-H: pairwise and higher-order relations, `ω₁ = 0.1, ω₂ = 0.05`.
    pub fn higher_order() -> Self {
        Self::new(0.1, 0.05)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.omega1, self.omega2);
        if !(a >= 0.0 && b >= 0.0 && a + b <= 1.0) {
            return Err(bad_config!("need omega1 >= 0, omega2 >= 0, omega1 + omega2 <= 1 (got {a}, {b})"));
        }
        if !(2..=3).contains(&self.order) {
            return Err(bad_config!("hyperedge order must be 2 or 3, got {}", self.order));
        }
        if self.tuple_cap == Some(0) {
            return Err(bad_config!("tuple cap must be positive"));
        }
        Ok(())
    }
}

/// TTM per-iteration state. All `J`-vectors are stored flat.
///
/// * `credit`: per corpus entry, a distribution over `ne(d)` (aligned with
///   [`TagGraph::tags_of`]); untagged documents have empty rows.
/// * `doc_tag`, `gamma`: per slot `(d, t)`.
/// * `pairwise`: per tag, raw (unnormalized) `f_{γt}`.
/// * `hyper`, `delta`: per document.
#[derive(Debug, Clone, PartialEq)]
pub struct TtmState {
    topics: usize,
    credit_ptr: Vec<usize>,
    credit: Vec<f64>,
    doc_tag: Vec<f64>,
    pairwise: Vec<f64>,
    hyper: Vec<f64>,
    gamma: Vec<f64>,
    delta: Vec<f64>,
    gamma_ready: bool,
}

/// Flat arrays of a [`TtmState`], for checkpointing.
#[derive(Debug, Clone, PartialEq)]
pub struct TtmStateParts {
    pub credit: Vec<f64>,
    pub doc_tag: Vec<f64>,
    pub pairwise: Vec<f64>,
    pub hyper: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma_ready: bool,
}

impl TtmState {
    /// Seeded random credit rows; all vectors start uniform.
    pub fn init(corpus: &Corpus, tags: &TagGraph, topics: usize, seed: u64) -> Result<Self> {
        let mut state = Self::empty(corpus, tags, topics)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(CREDIT_STREAM);
        for idx in 0..corpus.nnz() {
            let row = &mut state.credit[state.credit_ptr[idx]..state.credit_ptr[idx + 1]];
            for x in row.iter_mut() {
                *x = 1.0 - rng.random::<f64>();
            }
            if !row.is_empty() {
                math::normalize(row);
            }
        }
        Ok(state)
    }

    fn empty(corpus: &Corpus, tags: &TagGraph, topics: usize) -> Result<Self> {
        if topics == 0 {
            return Err(bad_config!("topic count must be at least 1"));
        }
        if tags.num_docs() != corpus.num_docs() {
            return Err(invalid!("tag graph has {} documents, corpus has {}", tags.num_docs(), corpus.num_docs()));
        }
        let mut credit_ptr = Vec::with_capacity(corpus.nnz() + 1);
        credit_ptr.push(0);
        for idx in 0..corpus.nnz() {
            let width = tags.tags_of(corpus.doc_of(idx)).len();
            credit_ptr.push(credit_ptr[idx] + width);
        }
        let u = 1.0 / topics as f64;
        Ok(TtmState {
            topics,
            credit: vec![0.0; credit_ptr[corpus.nnz()]],
            credit_ptr,
            doc_tag: vec![u; tags.num_slots() * topics],
            pairwise: vec![u; tags.num_tags() * topics],
            hyper: vec![u; corpus.num_docs() * topics],
            gamma: vec![u; tags.num_slots() * topics],
            delta: vec![u; corpus.num_docs() * topics],
            gamma_ready: false,
        })
    }

    /// Rebuilds a state from checkpointed arrays, checking every length.
    pub fn from_parts(corpus: &Corpus, tags: &TagGraph, topics: usize, parts: TtmStateParts) -> Result<Self> {
        let mut state = Self::empty(corpus, tags, topics)?;
        let check = |name: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(invalid!("{name}: {got} values, expected {want}"))
            }
        };
        check("credit", parts.credit.len(), state.credit.len())?;
        check("doc_tag", parts.doc_tag.len(), state.doc_tag.len())?;
        check("pairwise", parts.pairwise.len(), state.pairwise.len())?;
        check("hyper", parts.hyper.len(), state.hyper.len())?;
        check("gamma", parts.gamma.len(), state.gamma.len())?;
        check("delta", parts.delta.len(), state.delta.len())?;
        state.credit = parts.credit;
        state.doc_tag = parts.doc_tag;
        state.pairwise = parts.pairwise;
        state.hyper = parts.hyper;
        state.gamma = parts.gamma;
        state.delta = parts.delta;
        state.gamma_ready = parts.gamma_ready;
        Ok(state)
    }

    pub fn to_parts(&self) -> TtmStateParts {
        TtmStateParts {
            credit: self.credit.clone(),
            doc_tag: self.doc_tag.clone(),
            pairwise: self.pairwise.clone(),
            hyper: self.hyper.clone(),
            gamma: self.gamma.clone(),
            delta: self.delta.clone(),
            gamma_ready: self.gamma_ready,
        }
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    fn vec_at(v: &[f64], i: usize, k: usize) -> &[f64] {
        &v[i * k..(i + 1) * k]
    }

    /// Credit of entry `idx` over `ne(d)`, aligned with `tags.tags_of(d)`.
    pub fn credit_row(&self, idx: usize) -> &[f64] {
        &self.credit[self.credit_ptr[idx]..self.credit_ptr[idx + 1]]
    }

    pub fn set_credit_row(&mut self, idx: usize, row: &[f64]) {
        self.credit[self.credit_ptr[idx]..self.credit_ptr[idx + 1]].copy_from_slice(row);
    }

    /// Cached `μ̄_{d,t}` by slot.
    pub fn doc_tag(&self, slot: usize) -> &[f64] {
        Self::vec_at(&self.doc_tag, slot, self.topics)
    }

    pub fn set_doc_tag(&mut self, slot: usize, v: &[f64]) {
        let k = self.topics;
        self.doc_tag[slot * k..(slot + 1) * k].copy_from_slice(v);
    }

    /// Cached raw `f_{γt}`.
    pub fn pairwise(&self, t: usize) -> &[f64] {
        Self::vec_at(&self.pairwise, t, self.topics)
    }

    pub fn set_pairwise(&mut self, t: usize, v: &[f64]) {
        let k = self.topics;
        self.pairwise[t * k..(t + 1) * k].copy_from_slice(v);
    }

    /// Cached raw `f_{δd}`.
    pub fn hyper(&self, d: usize) -> &[f64] {
        Self::vec_at(&self.hyper, d, self.topics)
    }

    pub fn set_hyper(&mut self, d: usize, v: &[f64]) {
        let k = self.topics;
        self.hyper[d * k..(d + 1) * k].copy_from_slice(v);
    }

    /// Cached `μ_{γt→z}` for slot `(d, t)`.
    pub fn gamma(&self, slot: usize) -> &[f64] {
        Self::vec_at(&self.gamma, slot, self.topics)
    }

    pub fn set_gamma(&mut self, slot: usize, v: &[f64]) {
        let k = self.topics;
        self.gamma[slot * k..(slot + 1) * k].copy_from_slice(v);
        self.gamma_ready = true;
    }

    /// Cached `μ_{δd→z}`.
    pub fn delta(&self, d: usize) -> &[f64] {
        Self::vec_at(&self.delta, d, self.topics)
    }

    pub fn set_delta(&mut self, d: usize, v: &[f64]) {
        let k = self.topics;
        self.delta[d * k..(d + 1) * k].copy_from_slice(v);
    }

    /// Whether γ-messages from a previous iteration are available for credit.
    pub fn gamma_ready(&self) -> bool {
        self.gamma_ready
    }

    /// Refreshes word-to-tag credit for every entry of every tagged document.
    pub fn refresh_credit(&mut self, corpus: &Corpus, tags: &TagGraph, msgs: &MessageState) {
        for d in 0..corpus.num_docs() {
            let slots = tags.slot_range(d);
            if slots.is_empty() {
                continue;
            }
            for idx in corpus.doc_range(d) {
                let (a, b) = (self.credit_ptr[idx], self.credit_ptr[idx + 1]);
                credit_into(msgs.message(idx), &self.gamma, slots.clone(), self.topics, &mut self.credit[a..b]);
            }
        }
    }

    /// Recomputes every `μ̄_{d,t}` from the word messages and current credit.
    pub fn refresh_doc_tags(&mut self, corpus: &Corpus, tags: &TagGraph, msgs: &MessageState) {
        let k = self.topics;
        for d in 0..corpus.num_docs() {
            for (pos, slot) in tags.slot_range(d).enumerate() {
                let mut out = vec![0.0; k];
                doc_tag_into(corpus, msgs, self, d, pos, &mut out);
                self.doc_tag[slot * k..(slot + 1) * k].copy_from_slice(&out);
            }
        }
    }

    /// Recomputes factors and factor-to-variable messages from the cached `μ̄`.
    ///
    /// Cost is linear in the number of stored relations plus the number of slots.
    pub fn refresh_relations(&mut self, tags: &TagGraph, index: &RelationIndex) {
        let k = self.topics;
        let mut buf = vec![0.0; k];
        for t in 0..tags.num_tags() {
            pairwise_into(tags, index, self, t, &mut buf);
            self.pairwise[t * k..(t + 1) * k].copy_from_slice(&buf);
        }
        for d in 0..tags.num_docs() {
            hyper_into(tags, index, self, d, &mut buf);
            self.hyper[d * k..(d + 1) * k].copy_from_slice(&buf);
        }

        // Σ_{m∈ne(t)} μ̄_{m,t}, then subtract the slot's own term
        let mut tag_sums = vec![0.0; tags.num_tags() * k];
        for t in 0..tags.num_tags() {
            let sum = &mut tag_sums[t * k..(t + 1) * k];
            for &slot in tags.slots_of_tag(t) {
                let v = Self::vec_at(&self.doc_tag, slot as usize, k);
                for j in 0..k {
                    sum[j] += v[j];
                }
            }
        }
        for slot in 0..tags.num_slots() {
            let t = tags.tag_of_slot(slot);
            let own = Self::vec_at(&self.doc_tag, slot, k);
            let f = usable_factor(Self::vec_at(&self.pairwise, t, k));
            let sum = &tag_sums[t * k..(t + 1) * k];
            let lonely = tags.docs_of(t).len() < 2;
            for j in 0..k {
                buf[j] = if lonely { 0.0 } else { f.get(j) * (sum[j] - own[j]).max(0.0) };
            }
            math::normalize(&mut buf);
            self.gamma[slot * k..(slot + 1) * k].copy_from_slice(&buf);
        }
        self.gamma_ready = true;

        for d in 0..tags.num_docs() {
            delta_into(index, self, d, &mut buf);
            self.delta[d * k..(d + 1) * k].copy_from_slice(&buf);
        }
    }
}

/// A factor with the all-zero case replaced by uniform.
enum Factor<'a> {
    Given(&'a [f64]),
    Uniform,
}

impl Factor<'_> {
    #[inline]
    fn get(&self, j: usize) -> f64 {
        match self {
            Factor::Given(f) => f[j],
            Factor::Uniform => 1.0,
        }
    }
}

fn usable_factor(f: &[f64]) -> Factor<'_> {
    if f.iter().any(|&x| x > 0.0) {
        Factor::Given(f)
    } else {
        Factor::Uniform
    }
}

fn credit_into(mu: &[f64], gamma: &[f64], slots: core::ops::Range<usize>, k: usize, out: &mut [f64]) {
    for (p, slot) in out.iter_mut().zip(slots) {
        let g = &gamma[slot * k..(slot + 1) * k];
        *p = mu.iter().zip(g).map(|(a, b)| a * b).sum();
    }
    math::normalize(out);
}

fn doc_tag_into(corpus: &Corpus, msgs: &MessageState, ttm: &TtmState, d: usize, pos: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let mut mass = 0.0;
    for idx in corpus.doc_range(d) {
        let weight = corpus.count_of(idx) as f64 * ttm.credit_row(idx)[pos];
        let mu = msgs.message(idx);
        for j in 0..out.len() {
            out[j] += weight * mu[j];
        }
        mass += weight;
    }
    if mass > 0.0 {
        out.iter_mut().for_each(|x| *x /= mass);
    } else {
        math::fill_uniform(out);
    }
}

fn pairwise_into(tags: &TagGraph, index: &RelationIndex, ttm: &TtmState, t: usize, out: &mut [f64]) {
    let pairs = index.tag_pairs(t);
    if tags.docs_of(t).len() < 2 || pairs.is_empty() {
        math::fill_uniform(out);
        return;
    }
    out.iter_mut().for_each(|x| *x = 0.0);
    for &[a, b] in pairs {
        let (x, y) = (ttm.doc_tag(a as usize), ttm.doc_tag(b as usize));
        for j in 0..out.len() {
            out[j] += x[j] * y[j];
        }
    }
    let n = pairs.len() as f64;
    out.iter_mut().for_each(|x| *x /= n);
}

fn hyper_into(tags: &TagGraph, index: &RelationIndex, ttm: &TtmState, d: usize, out: &mut [f64]) {
    if tags.tags_of(d).len() < index.order() || index.num_hyper_tuples(d) == 0 {
        math::fill_uniform(out);
        return;
    }
    out.iter_mut().for_each(|x| *x = 0.0);
    for tuple in index.hyper_tuples(d) {
        for j in 0..out.len() {
            out[j] += tuple.iter().map(|&s| ttm.doc_tag(s as usize)[j]).product::<f64>();
        }
    }
    let n = index.num_hyper_tuples(d) as f64;
    out.iter_mut().for_each(|x| *x /= n);
}

fn delta_into(index: &RelationIndex, ttm: &TtmState, d: usize, out: &mut [f64]) {
    let pairs = index.delta_pairs(d);
    out.iter_mut().for_each(|x| *x = 0.0);
    for &[a, b] in pairs {
        let (x, y) = (ttm.doc_tag(a as usize), ttm.doc_tag(b as usize));
        for j in 0..out.len() {
            out[j] += x[j] + y[j];
        }
    }
    let f = usable_factor(ttm.hyper(d));
    for (j, x) in out.iter_mut().enumerate() {
        *x *= f.get(j);
    }
    math::normalize(out);
}

/// `μ̄_{d,t}`: credit-weighted mean of document `d`'s word messages toward tag `t`.
///
/// An empty document, or one whose credit toward `t` is zero, yields uniform.
pub fn doc_tag_message(
    corpus: &Corpus,
    tags: &TagGraph,
    msgs: &MessageState,
    ttm: &TtmState,
    d: usize,
    t: usize,
) -> Result<Vec<f64>> {
    let slot = tags.slot(d, t).ok_or_else(|| invalid!("tag {t} is not attached to document {d}"))?;
    let mut out = vec![0.0; ttm.topics];
    doc_tag_into(corpus, msgs, ttm, d, slot - tags.slot_range(d).start, &mut out);
    Ok(out)
}

/// Credit row of `(w, d)` over `ne(d)` from the cached γ-messages.
///
/// Documents without tags have no credit; the result is then empty.
pub fn update_credit(
    corpus: &Corpus,
    tags: &TagGraph,
    msgs: &MessageState,
    ttm: &TtmState,
    w: usize,
    d: usize,
) -> Result<Vec<f64>> {
    let idx = corpus.find(d, w).ok_or(Error::MissingEntry { word: w, doc: d })?;
    let slots = tags.slot_range(d);
    let mut out = vec![0.0; slots.len()];
    if !out.is_empty() {
        credit_into(msgs.message(idx), &ttm.gamma, slots, ttm.topics, &mut out);
    }
    Ok(out)
}

/// Raw `f_{γt}`: mean Hadamard product of `μ̄` over the indexed document pairs of `t`.
/// Uniform when `|ne(t)| < 2`.
pub fn pairwise_factor(tags: &TagGraph, index: &RelationIndex, ttm: &TtmState, t: usize) -> Vec<f64> {
    let mut out = vec![0.0; ttm.topics];
    pairwise_into(tags, index, ttm, t, &mut out);
    out
}

/// Raw `f_{δd}`: mean Hadamard product of `μ̄` over the indexed cross-tag tuples
/// of `d`. Uniform when `|ne(d)|` is below the index order or no tuple exists.
pub fn hyper_factor(tags: &TagGraph, index: &RelationIndex, ttm: &TtmState, d: usize) -> Vec<f64> {
    let mut out = vec![0.0; ttm.topics];
    hyper_into(tags, index, ttm, d, &mut out);
    out
}

/// `μ_{γt→z_{·,d}}` from the cached `f_{γt}` and `μ̄`; uniform when `ne(t)∖d` is empty.
pub fn gamma_message(tags: &TagGraph, ttm: &TtmState, t: usize, d: usize) -> Result<Vec<f64>> {
    if tags.slot(d, t).is_none() {
        return Err(invalid!("tag {t} is not attached to document {d}"));
    }
    let k = ttm.topics;
    let mut out = vec![0.0; k];
    for (&m, &slot) in tags.docs_of(t).iter().zip(tags.slots_of_tag(t)) {
        if m as usize == d {
            continue;
        }
        let v = ttm.doc_tag(slot as usize);
        for j in 0..k {
            out[j] += v[j];
        }
    }
    let f = usable_factor(ttm.pairwise(t));
    for (j, x) in out.iter_mut().enumerate() {
        *x *= f.get(j);
    }
    math::normalize(&mut out);
    Ok(out)
}

/// `μ_{δd→z_{·,d}}` from the cached `f_{δd}` and `μ̄`; uniform without qualifying pairs.
pub fn delta_message(index: &RelationIndex, ttm: &TtmState, d: usize) -> Vec<f64> {
    let mut out = vec![0.0; ttm.topics];
    delta_into(index, ttm, d, &mut out);
    out
}

/// Fused word update for entry `idx`.
///
/// Untagged documents and `ω₁ = ω₂ = 0` take the plain LDA path; a document
/// with a single tag has no hyperedge, and its `ω₂` share goes to the
/// document-factor message.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn ttm_update_at(
    corpus: &Corpus,
    tags: &TagGraph,
    msgs: &MessageState,
    ttm: &TtmState,
    config: &TrainConfig,
    ttm_config: &TtmConfig,
    idx: usize,
    scratch: &mut Scratch,
    out: &mut [f64],
) {
    let d = corpus.doc_of(idx);
    let slots = tags.slot_range(d);
    let (omega1, omega2) = (ttm_config.omega1, ttm_config.omega2);
    if slots.is_empty() || (omega1 == 0.0 && omega2 == 0.0) {
        lda::lda_update_at(corpus, msgs, config.alpha, config.beta, idx, scratch, out);
        return;
    }
    let omega2 = if slots.len() >= 2 { omega2 } else { 0.0 };
    lda::factor_messages(corpus, msgs, config.alpha, config.beta, idx, &mut scratch.doc_msg, &mut scratch.word_msg);
    let k = out.len();
    let own = 1.0 - omega1 - omega2;
    for j in 0..k {
        scratch.mix[j] = own * scratch.doc_msg[j];
    }
    for slot in slots {
        let g = ttm.gamma(slot);
        for j in 0..k {
            scratch.mix[j] += omega1 * g[j];
        }
    }
    if omega2 > 0.0 {
        let delta = ttm.delta(d);
        for j in 0..k {
            scratch.mix[j] += omega2 * delta[j];
        }
    }
    lda::combine(&scratch.mix, &scratch.word_msg, out);
}

/// The fused message update for entry `(w, d)`.
#[allow(clippy::too_many_arguments)]
pub fn ttm_update(
    corpus: &Corpus,
    tags: &TagGraph,
    msgs: &MessageState,
    ttm: &TtmState,
    config: &TrainConfig,
    ttm_config: &TtmConfig,
    w: usize,
    d: usize,
) -> Result<Vec<f64>> {
    let idx = corpus.find(d, w).ok_or(Error::MissingEntry { word: w, doc: d })?;
    let mut scratch = Scratch::new(msgs.topics());
    let mut out = vec![0.0; msgs.topics()];
    ttm_update_at(corpus, tags, msgs, ttm, config, ttm_config, idx, &mut scratch, &mut out);
    Ok(out)
}

/// One credit-attribution record: word `word` of document `doc` credited to `tag` with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreditRecord {
    pub doc: usize,
    pub word: usize,
    pub tag: usize,
    pub p: f64,
}

/// The `top_k` most credited tags of every entry, highest first, ties by ascending tag id.
pub fn top_credit(corpus: &Corpus, tags: &TagGraph, ttm: &TtmState, top_k: usize) -> Vec<CreditRecord> {
    let mut out = Vec::new();
    for e_idx in 0..corpus.nnz() {
        let e = corpus.entry(e_idx);
        let ne = tags.tags_of(e.doc);
        let row = ttm.credit_row(e_idx);
        let mut ranked: Vec<(usize, f64)> = ne.iter().map(|&t| t as usize).zip(row.iter().copied()).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out.extend(ranked.into_iter().take(top_k).map(|(tag, p)| CreditRecord { doc: e.doc, word: e.word, tag, p }));
    }
    out
}

/// Tag with the largest credit for entry `idx`, ties by ascending tag id.
pub fn argmax_credit(tags: &TagGraph, ttm: &TtmState, corpus: &Corpus, idx: usize) -> Option<usize> {
    let ne = tags.tags_of(corpus.doc_of(idx));
    let row = ttm.credit_row(idx);
    let mut best: Option<(usize, f64)> = None;
    for (&t, &p) in ne.iter().zip(row) {
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((t as usize, p));
        }
    }
    best.map(|(t, _)| t)
}
