use alloc::vec::Vec;

use super::{ttm_update_at, RelationIndex, TtmConfig, TtmState};
use crate::corpus::{Corpus, TagGraph};
use crate::error::{invalid, Result};
use crate::lda::{self, ModelParams, TraceRow, TrainConfig};
use crate::message::MessageState;

#[derive(Debug, Clone)]
pub struct TtmFit {
    pub params: ModelParams,
    pub state: MessageState,
    pub ttm: TtmState,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

/// Step-wise TTM training, resumable from saved message and TTM states.
#[derive(Debug, Clone)]
pub struct TtmTrainer<'a> {
    corpus: &'a Corpus,
    tags: &'a TagGraph,
    config: TrainConfig,
    ttm_config: TtmConfig,
    index: RelationIndex,
    msgs: MessageState,
    ttm: TtmState,
    iteration: usize,
    converged: bool,
    trace: Vec<TraceRow>,
}

impl<'a> TtmTrainer<'a> {
    pub fn new(corpus: &'a Corpus, tags: &'a TagGraph, config: TrainConfig, ttm_config: TtmConfig) -> Result<Self> {
        config.validate()?;
        ttm_config.validate()?;
        let msgs = MessageState::init(corpus, config.topics, config.seed)?;
        let ttm = TtmState::init(corpus, tags, config.topics, config.seed)?;
        Self::resume(corpus, tags, config, ttm_config, msgs, ttm, 0, false)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn resume(
        corpus: &'a Corpus,
        tags: &'a TagGraph,
        config: TrainConfig,
        ttm_config: TtmConfig,
        msgs: MessageState,
        ttm: TtmState,
        iteration: usize,
        converged: bool,
    ) -> Result<Self> {
        config.validate()?;
        ttm_config.validate()?;
        if tags.num_docs() != corpus.num_docs() {
            return Err(invalid!("tag graph has {} documents, corpus has {}", tags.num_docs(), corpus.num_docs()));
        }
        if msgs.topics() != config.topics || ttm.topics() != config.topics || msgs.num_entries() != corpus.nnz() {
            return Err(invalid!("saved state does not match corpus and topic count"));
        }
        let index = RelationIndex::build(tags, &ttm_config, config.seed);
        Ok(TtmTrainer { corpus, tags, config, ttm_config, index, msgs, ttm, iteration, converged, trace: Vec::new() })
    }

    pub fn index(&self) -> &RelationIndex {
        &self.index
    }

    pub fn messages(&self) -> &MessageState {
        &self.msgs
    }

    pub fn ttm_state(&self) -> &TtmState {
        &self.ttm
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
        lda::estimate_params(self.corpus, &self.msgs, &self.config)
    }

    /// Document-level refresh (credit, `μ̄`, factors, factor messages), then one word sweep.
    /// During warm-up the sweep is plain LDA and the TTM state is left untouched.
    pub fn step(&mut self) -> Result<TraceRow> {
        let (corpus, tags) = (self.corpus, self.tags);
        let max_delta = if self.iteration < self.ttm_config.warmup {
            lda::lda_sweep(corpus, &mut self.msgs, &self.config)
        } else {
            if self.ttm.gamma_ready() {
                self.ttm.refresh_credit(corpus, tags, &self.msgs);
            }
            self.ttm.refresh_doc_tags(corpus, tags, &self.msgs);
            self.ttm.refresh_relations(tags, &self.index);
            let (ttm, config, ttm_config) = (&self.ttm, &self.config, &self.ttm_config);
            lda::sweep_with(corpus, &mut self.msgs, config.schedule, |s, idx, scratch, out| {
                ttm_update_at(corpus, tags, s, ttm, config, ttm_config, idx, scratch, out)
            })
        };
        self.iteration += 1;
        // a quiet warm-up sweep is not convergence of the tag model
        self.converged = max_delta < self.config.tol && self.iteration > self.ttm_config.warmup;
        let params = self.params();
        let row =
            TraceRow { iteration: self.iteration, max_delta, perplexity: lda::training_perplexity(&params, corpus)? };
        self.trace.push(row);
        Ok(row)
    }

    pub fn run(mut self) -> Result<TtmFit> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(TtmFit {
            params: self.params(),
            state: self.msgs,
            ttm: self.ttm,
            trace: self.trace,
            converged: self.converged,
        })
    }
}

/// Trains the tag-topic model until convergence or `max_iters` iterations.
pub fn train_ttm(corpus: &Corpus, tags: &TagGraph, config: &TrainConfig, ttm_config: &TtmConfig) -> Result<TtmFit> {
    TtmTrainer::new(corpus, tags, config.clone(), ttm_config.clone())?.run()
}
