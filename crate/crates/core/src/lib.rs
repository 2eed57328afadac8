//! Sparse loopy belief propagation for topic models.
//!
//! The crate covers two models that share one message store:
//!
//! * LDA on the two-factor graph (document factor `θ_d`, word factor `φ_w`),
//!   trained by the sum-sum approximation of sum-product BP.
//! * The tag-topic model (TTM), which adds per-tag pairwise factors and a
//!   per-document hyperedge over the tags attached to a document, plus
//!   word-level credit attribution to tags.
//!
//! Messages are stored once per distinct (word, document) entry; word counts
//! enter only as weights. Everything here is `no_std` + `alloc`; file
//! formats and the command-line driver live in the `tagtopic` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// index loops over topic vectors; `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod corpus;
pub mod error;
pub mod eval;
pub mod lda;
pub mod math;
pub mod message;
pub mod ttm;

pub use corpus::{Corpus, Entry, SyntheticConfig, SyntheticTruth, TagGraph, TopicWords};
pub use error::{Error, Result};
pub use lda::{ModelParams, Schedule, TraceRow, TrainConfig};
pub use math::Matrix;
pub use message::MessageState;
pub use ttm::{NeighborMode, RelationIndex, TtmConfig, TtmState};
