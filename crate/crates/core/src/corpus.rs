//! Sparse bag-of-words corpora, the tag↔document bipartite graph, and a
//! seeded synthetic generator used as a ground-truth oracle.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{bad_config, invalid, Result};
use crate::math::{self, Matrix};

/// One sparse corpus entry: distinct word `word` occurs `count` times in `doc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub doc: usize,
    pub word: usize,
    pub count: u32,
}

/// Average sizes, as reported for the data sets (tokens and distinct words per document).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub avg_tokens: f64,
    pub avg_distinct: f64,
}

/// Document × vocabulary count matrix in compressed-row form.
///
/// Entries are kept sorted by `(doc, word)`; entry indices in that order are
/// the addressing scheme used by every message array in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    num_docs: usize,
    num_vocab: usize,
    doc_ptr: Vec<usize>,
    docs: Vec<u32>,
    words: Vec<u32>,
    counts: Vec<u32>,
    labels: Vec<Option<String>>,
}

impl Corpus {
    /// Builds a corpus from `(doc, word, count)` triples in any order.
    pub fn new<I>(num_docs: usize, num_vocab: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        if num_docs > u32::MAX as usize || num_vocab > u32::MAX as usize {
            return Err(invalid!("corpus dimensions exceed u32 range"));
        }
        let mut triples: Vec<(usize, usize, u32)> = triples.into_iter().collect();
        for &(d, w, n) in &triples {
            if d >= num_docs {
                return Err(invalid!("document id {d} out of range (D = {num_docs})"));
            }
            if w >= num_vocab {
                return Err(invalid!("word id {w} out of range (W = {num_vocab})"));
            }
            if n == 0 {
                return Err(invalid!("zero count for word {w} in document {d}"));
            }
        }
        triples.sort_unstable_by_key(|&(d, w, _)| (d, w));
        if let Some(pair) = triples.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(invalid!("duplicate entry for document {} word {}", pair[0].0, pair[0].1));
        }
        let mut doc_ptr = vec![0usize; num_docs + 1];
        for &(d, _, _) in &triples {
            doc_ptr[d + 1] += 1;
        }
        for d in 0..num_docs {
            doc_ptr[d + 1] += doc_ptr[d];
        }
        Ok(Corpus {
            num_docs,
            num_vocab,
            doc_ptr,
            docs: triples.iter().map(|t| t.0 as u32).collect(),
            words: triples.iter().map(|t| t.1 as u32).collect(),
            counts: triples.iter().map(|t| t.2).collect(),
            labels: Vec::new(),
        })
    }

    /// Attaches one optional class label per document.
    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Result<Self> {
        if labels.len() != self.num_docs {
            return Err(invalid!("{} labels for {} documents", labels.len(), self.num_docs));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn num_vocab(&self) -> usize {
        self.num_vocab
    }

    /// Number of distinct (word, document) entries.
    pub fn nnz(&self) -> usize {
        self.words.len()
    }

    pub fn entry(&self, idx: usize) -> Entry {
        Entry { doc: self.docs[idx] as usize, word: self.words[idx] as usize, count: self.counts[idx] }
    }

    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        (0..self.nnz()).map(move |i| self.entry(i))
    }

    #[inline]
    pub fn doc_of(&self, idx: usize) -> usize {
        self.docs[idx] as usize
    }

    #[inline]
    pub fn word_of(&self, idx: usize) -> usize {
        self.words[idx] as usize
    }

    #[inline]
    pub fn count_of(&self, idx: usize) -> u32 {
        self.counts[idx]
    }

    /// Entry-index range of document `d`.
    pub fn doc_range(&self, d: usize) -> Range<usize> {
        self.doc_ptr[d]..self.doc_ptr[d + 1]
    }

    /// Entry index of `(doc, word)`, if present.
    pub fn find(&self, doc: usize, word: usize) -> Option<usize> {
        if doc >= self.num_docs {
            return None;
        }
        let range = self.doc_range(doc);
        self.words[range.clone()].binary_search(&(word as u32)).ok().map(|k| range.start + k)
    }

    pub fn doc_tokens(&self, d: usize) -> u64 {
        self.counts[self.doc_range(d)].iter().map(|&n| n as u64).sum()
    }

    pub fn total_tokens(&self) -> u64 {
        self.counts.iter().map(|&n| n as u64).sum()
    }

    pub fn labels(&self) -> Option<&[Option<String>]> {
        (!self.labels.is_empty()).then_some(&self.labels[..])
    }

    pub fn stats(&self) -> CorpusStats {
        let d = self.num_docs.max(1) as f64;
        CorpusStats { avg_tokens: self.total_tokens() as f64 / d, avg_distinct: self.nnz() as f64 / d }
    }

    /// Sub-corpus of the listed documents, renumbered `0..docs.len()` in the given order.
    pub fn select_docs(&self, docs: &[usize]) -> Result<Corpus> {
        let mut triples = Vec::new();
        for (new_d, &d) in docs.iter().enumerate() {
            if d >= self.num_docs {
                return Err(invalid!("document id {d} out of range (D = {})", self.num_docs));
            }
            for i in self.doc_range(d) {
                triples.push((new_d, self.word_of(i), self.count_of(i)));
            }
        }
        let sub = Corpus::new(docs.len(), self.num_vocab, triples)?;
        if self.labels.is_empty() {
            Ok(sub)
        } else {
            sub.with_labels(docs.iter().map(|&d| self.labels[d].clone()).collect())
        }
    }
}

/// Bipartite tag↔document adjacency.
///
/// `ne(d)` is kept sorted ascending. Each `(d, k)` position of the flattened
/// document→tag lists is a *slot*; per-(document, tag) state is addressed by slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TagGraph {
    num_tags: usize,
    doc_ptr: Vec<usize>,
    doc_tags: Vec<u32>,
    tag_ptr: Vec<usize>,
    tag_docs: Vec<u32>,
    tag_slots: Vec<u32>,
}

impl TagGraph {
    /// Builds the graph from one tag list per document.
    ///
    /// Tag ids must be below `num_tags`; a tag repeated within a document is rejected.
    pub fn new(num_tags: usize, doc_tags: &[Vec<usize>]) -> Result<Self> {
        let num_docs = doc_tags.len();
        let mut doc_ptr = Vec::with_capacity(num_docs + 1);
        doc_ptr.push(0);
        let mut flat: Vec<u32> = Vec::new();
        for (d, tags) in doc_tags.iter().enumerate() {
            let mut sorted = tags.clone();
            sorted.sort_unstable();
            if let Some(p) = sorted.windows(2).find(|p| p[0] == p[1]) {
                return Err(invalid!("document {d} lists tag {} twice", p[0]));
            }
            if let Some(&t) = sorted.iter().find(|&&t| t >= num_tags) {
                return Err(invalid!("tag id {t} out of range (T = {num_tags})"));
            }
            flat.extend(sorted.iter().map(|&t| t as u32));
            doc_ptr.push(flat.len());
        }

        let mut tag_ptr = vec![0usize; num_tags + 1];
        for &t in &flat {
            tag_ptr[t as usize + 1] += 1;
        }
        for t in 0..num_tags {
            tag_ptr[t + 1] += tag_ptr[t];
        }
        let mut fill = tag_ptr.clone();
        let mut tag_docs = vec![0u32; flat.len()];
        let mut tag_slots = vec![0u32; flat.len()];
        for d in 0..num_docs {
            for slot in doc_ptr[d]..doc_ptr[d + 1] {
                let t = flat[slot] as usize;
                tag_docs[fill[t]] = d as u32;
                tag_slots[fill[t]] = slot as u32;
                fill[t] += 1;
            }
        }
        Ok(TagGraph { num_tags, doc_ptr, doc_tags: flat, tag_ptr, tag_docs, tag_slots })
    }

    /// Like [`TagGraph::new`] with `T` taken as one past the largest tag id.
    pub fn from_doc_tags(doc_tags: &[Vec<usize>]) -> Result<Self> {
        let num_tags = doc_tags.iter().flatten().max().map_or(0, |&t| t + 1);
        Self::new(num_tags, doc_tags)
    }

    /// A graph with `num_docs` documents and no tags at all.
    pub fn untagged(num_docs: usize) -> Self {
        TagGraph {
            num_tags: 0,
            doc_ptr: vec![0; num_docs + 1],
            doc_tags: Vec::new(),
            tag_ptr: vec![0],
            tag_docs: Vec::new(),
            tag_slots: Vec::new(),
        }
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ptr.len() - 1
    }

    pub fn num_tags(&self) -> usize {
        self.num_tags
    }

    /// Total number of (document, tag) incidences.
    pub fn num_slots(&self) -> usize {
        self.doc_tags.len()
    }

    /// `ne(d)`: tags of document `d`, ascending.
    pub fn tags_of(&self, d: usize) -> &[u32] {
        &self.doc_tags[self.doc_ptr[d]..self.doc_ptr[d + 1]]
    }

    /// `ne(t)`: documents carrying tag `t`, ascending.
    pub fn docs_of(&self, t: usize) -> &[u32] {
        &self.tag_docs[self.tag_ptr[t]..self.tag_ptr[t + 1]]
    }

    /// Slots of `(m, t)` for every `m` in `docs_of(t)`, aligned with it.
    pub fn slots_of_tag(&self, t: usize) -> &[u32] {
        &self.tag_slots[self.tag_ptr[t]..self.tag_ptr[t + 1]]
    }

    pub fn slot_range(&self, d: usize) -> Range<usize> {
        self.doc_ptr[d]..self.doc_ptr[d + 1]
    }

    /// Slot of `(d, t)`, if `t ∈ ne(d)`.
    pub fn slot(&self, d: usize, t: usize) -> Option<usize> {
        let range = self.slot_range(d);
        self.doc_tags[range.clone()].binary_search(&(t as u32)).ok().map(|k| range.start + k)
    }

    pub fn tag_of_slot(&self, slot: usize) -> usize {
        self.doc_tags[slot] as usize
    }

    /// Average number of tags per document.
    pub fn avg_tags_per_doc(&self) -> f64 {
        self.num_slots() as f64 / self.num_docs().max(1) as f64
    }

    /// Per-document tag lists, the inverse of [`TagGraph::new`].
    pub fn to_doc_tags(&self) -> Vec<Vec<usize>> {
        (0..self.num_docs()).map(|d| self.tags_of(d).iter().map(|&t| t as usize).collect()).collect()
    }

    /// Sub-graph of the listed documents, renumbered in the given order; `T` is kept.
    pub fn select_docs(&self, docs: &[usize]) -> Result<TagGraph> {
        let lists: Vec<Vec<usize>> = docs
            .iter()
            .map(|&d| {
                if d >= self.num_docs() {
                    Err(invalid!("document id {d} out of range (D = {})", self.num_docs()))
                } else {
                    Ok(self.tags_of(d).iter().map(|&t| t as usize).collect())
                }
            })
            .collect::<Result<_>>()?;
        TagGraph::new(self.num_tags, &lists)
    }
}

/// Seeded random train/test partition of documents.
#[derive(Debug, Clone)]
pub struct Split {
    pub train_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
    pub train: Corpus,
    pub test: Corpus,
    pub train_tags: TagGraph,
    pub test_tags: TagGraph,
}

/// Shuffles documents with `seed` and moves `round(D · test_fraction)` of them to the test side.
///
/// Both sides keep the original document order and the shared vocabulary.
pub fn train_test_split(corpus: &Corpus, tags: &TagGraph, test_fraction: f64, seed: u64) -> Result<Split> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(bad_config!("test fraction {test_fraction} outside [0, 1]"));
    }
    if tags.num_docs() != corpus.num_docs() {
        return Err(invalid!("tag graph has {} documents, corpus has {}", tags.num_docs(), corpus.num_docs()));
    }
    let mut order: Vec<usize> = (0..corpus.num_docs()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = libm::round(corpus.num_docs() as f64 * test_fraction) as usize;
    let mut test_ids = order[..n_test].to_vec();
    let mut train_ids = order[n_test..].to_vec();
    test_ids.sort_unstable();
    train_ids.sort_unstable();
    Ok(Split {
        train: corpus.select_docs(&train_ids)?,
        test: corpus.select_docs(&test_ids)?,
        train_tags: tags.select_docs(&train_ids)?,
        test_tags: tags.select_docs(&test_ids)?,
        train_ids,
        test_ids,
    })
}

/// How the generator shapes each topic's word distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopicWords {
    /// Symmetric Dirichlet draw with the given concentration.
    Dirichlet(f64),
    /// Topic `j` is uniform over its own contiguous block of the vocabulary.
    DisjointBlocks,
}

/// Parameters of [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub topics: usize,
    pub docs: usize,
    pub vocab: usize,
    pub tags: usize,
    pub tags_per_doc: usize,
    pub tokens_per_doc: usize,
    /// Dirichlet mass placed on the topics of a document's tags.
    pub topic_concentration: f64,
    /// Dirichlet mass spread evenly over all topics.
    pub background: f64,
    pub topic_words: TopicWords,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn new(topics: usize, docs: usize, vocab: usize, tags: usize) -> Self {
        SyntheticConfig {
            topics,
            docs,
            vocab,
            tags,
            tags_per_doc: 1,
            tokens_per_doc: 50,
            topic_concentration: 10.0,
            background: 0.1,
            topic_words: TopicWords::Dirichlet(0.1),
            seed: 0,
        }
    }
}

/// Generator ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTruth {
    /// `D × J`, rows sum to one.
    pub theta: Matrix,
    /// `J × W`, rows sum to one.
    pub phi: Matrix,
    /// Dominant topic of each tag.
    pub tag_topic: Vec<usize>,
    /// `nnz × J`: how many tokens of each corpus entry each topic produced.
    pub entry_topic_counts: Vec<u32>,
}

impl SyntheticTruth {
    pub fn topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn entry_topic_counts(&self, idx: usize) -> &[u32] {
        let j = self.topics();
        &self.entry_topic_counts[idx * j..(idx + 1) * j]
    }
}

/// Samples a tagged corpus from the standard mixture `p(w|d) = Σ_j θ_d(j) φ_j(w)`.
///
/// Tag `t` is mapped to topic `t mod J`. Each document receives `tags_per_doc`
/// distinct tags uniformly at random, and `θ_d ~ Dir(background + c · share_j)`
/// where `share_j` is the fraction of the document's tags mapped to topic `j`,
/// so documents that share tags have correlated proportions.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<(Corpus, TagGraph, SyntheticTruth)> {
    let j_count = cfg.topics;
    if j_count == 0 || cfg.docs == 0 || cfg.vocab == 0 || cfg.tags == 0 {
        return Err(bad_config!("topics, docs, vocab and tags must all be positive"));
    }
    if j_count > cfg.tags {
        return Err(bad_config!("{} topics exceed {} tags", j_count, cfg.tags));
    }
    if cfg.tags_per_doc == 0 || cfg.tags_per_doc > cfg.tags {
        return Err(bad_config!("tags per document must be in 1..={}", cfg.tags));
    }
    if cfg.tokens_per_doc == 0 {
        return Err(bad_config!("tokens per document must be positive"));
    }
    if !(cfg.topic_concentration > 0.0) || !(cfg.background > 0.0) {
        return Err(bad_config!("Dirichlet masses must be positive"));
    }
    if cfg.topic_words == TopicWords::DisjointBlocks && cfg.vocab < j_count {
        return Err(bad_config!("disjoint word blocks need W >= J"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut phi = Matrix::zeros(j_count, cfg.vocab);
    for j in 0..j_count {
        let row = phi.row_mut(j);
        match cfg.topic_words {
            TopicWords::Dirichlet(a) => {
                if !(a > 0.0) {
                    return Err(bad_config!("word Dirichlet concentration must be positive"));
                }
                dirichlet_into(&mut rng, &vec![a; cfg.vocab], row);
            }
            TopicWords::DisjointBlocks => {
                let block = block_range(j, j_count, cfg.vocab);
                let p = 1.0 / block.len() as f64;
                row[block].iter_mut().for_each(|x| *x = p);
            }
        }
    }

    let tag_topic: Vec<usize> = (0..cfg.tags).map(|t| t % j_count).collect();
    let all_tags: Vec<usize> = (0..cfg.tags).collect();
    let mut doc_tags = Vec::with_capacity(cfg.docs);
    let mut theta = Matrix::zeros(cfg.docs, j_count);
    for d in 0..cfg.docs {
        let mut tags: Vec<usize> = all_tags.choose_multiple(&mut rng, cfg.tags_per_doc).copied().collect();
        tags.sort_unstable();
        let mut conc = vec![cfg.background; j_count];
        for &t in &tags {
            conc[tag_topic[t]] += cfg.topic_concentration / tags.len() as f64;
        }
        dirichlet_into(&mut rng, &conc, theta.row_mut(d));
        doc_tags.push(tags);
    }

    // (doc, word) -> per-topic token counts
    let mut triples = Vec::new();
    let mut origin = Vec::new();
    let mut counts = vec![0u32; cfg.vocab * j_count];
    for d in 0..cfg.docs {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..cfg.tokens_per_doc {
            let z = math::sample_categorical(&mut rng, theta.row(d));
            let w = math::sample_categorical(&mut rng, phi.row(z));
            counts[w * j_count + z] += 1;
        }
        for w in 0..cfg.vocab {
            let per_topic = &counts[w * j_count..(w + 1) * j_count];
            let n: u32 = per_topic.iter().sum();
            if n > 0 {
                triples.push((d, w, n));
                origin.extend_from_slice(per_topic);
            }
        }
    }
    // triples are generated in (d, w) order, matching the corpus entry order
    let corpus = Corpus::new(cfg.docs, cfg.vocab, triples)?;
    let graph = TagGraph::new(cfg.tags, &doc_tags)?;
    Ok((corpus, graph, SyntheticTruth { theta, phi, tag_topic, entry_topic_counts: origin }))
}

/// Vocabulary block owned by topic `j` under [`TopicWords::DisjointBlocks`].
pub fn block_range(j: usize, topics: usize, vocab: usize) -> Range<usize> {
    let size = vocab / topics;
    let start = j * size;
    let end = if j + 1 == topics { vocab } else { start + size };
    start..end
}

fn dirichlet_into<R: Rng + ?Sized>(rng: &mut R, conc: &[f64], out: &mut [f64]) {
    for (x, &a) in out.iter_mut().zip(conc) {
        // shape > 0 and scale 1 are always accepted
        *x = Gamma::new(a, 1.0).map(|g| g.sample(rng)).unwrap_or(0.0);
    }
    math::normalize(out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_normalizes_entry_order() {
        let c = Corpus::new(2, 3, [(1, 1, 5), (0, 2, 1), (0, 0, 2)]).unwrap();
        assert_eq!(c.nnz(), 3);
        let e: Vec<_> = c.entries().map(|e| (e.doc, e.word, e.count)).collect();
        assert_eq!(e, [(0, 0, 2), (0, 2, 1), (1, 1, 5)]);
        assert_eq!(c.find(0, 2), Some(1));
        assert_eq!(c.find(1, 0), None);
        assert_eq!(c.doc_tokens(0), 3);
    }

    #[test]
    fn corpus_empty_is_valid() {
        let c = Corpus::new(1, 1, []).unwrap();
        assert_eq!(c.nnz(), 0);
        assert_eq!(c.doc_range(0), 0..0);
    }

    #[test]
    fn corpus_rejects_bad_entries() {
        assert!(Corpus::new(1, 1, [(0, 0, 2), (0, 0, 2)]).is_err());
        assert!(Corpus::new(1, 1, [(1, 0, 2)]).is_err());
        assert!(Corpus::new(1, 1, [(0, 1, 2)]).is_err());
        assert!(Corpus::new(1, 1, [(0, 0, 0)]).is_err());
    }

    #[test]
    fn stats_match_entries() {
        let c = Corpus::new(2, 3, [(0, 0, 2), (0, 2, 1), (1, 1, 5)]).unwrap();
        let s = c.stats();
        assert_eq!(s.avg_tokens, 4.0);
        assert_eq!(s.avg_distinct, 1.5);
    }

    #[test]
    fn tag_graph_inverse_index() {
        let g = TagGraph::new(8, &[vec![7, 5], vec![5]]).unwrap();
        assert_eq!(g.docs_of(5), &[0, 1]);
        assert_eq!(g.tags_of(0), &[5, 7]);
        assert_eq!(g.slot(0, 7), Some(1));
        assert_eq!(g.slots_of_tag(5), &[0, 2]);
        assert!(g.docs_of(0).is_empty());
    }

    #[test]
    fn tag_graph_rejects_duplicates_and_range() {
        assert!(TagGraph::new(8, &[vec![5, 5]]).is_err());
        assert!(TagGraph::new(3, &[vec![3]]).is_err());
    }

    #[test]
    fn untagged_graph_has_empty_sets() {
        let g = TagGraph::untagged(3);
        assert_eq!(g.num_docs(), 3);
        assert!((0..3).all(|d| g.tags_of(d).is_empty()));
    }

    #[test]
    fn split_partitions_documents() {
        let mut cfg = SyntheticConfig::new(2, 20, 10, 2);
        cfg.seed = 3;
        let (c, g, _) = generate_synthetic(&cfg).unwrap();
        let s = train_test_split(&c, &g, 0.2, 11).unwrap();
        assert_eq!(s.test_ids.len(), 4);
        assert_eq!(s.train.num_docs() + s.test.num_docs(), 20);
        assert_eq!(s.train.total_tokens() + s.test.total_tokens(), c.total_tokens());
        for (new_d, &d) in s.test_ids.iter().enumerate() {
            assert_eq!(s.test_tags.tags_of(new_d), g.tags_of(d));
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let mut cfg = SyntheticConfig::new(2, 4, 10, 2);
        cfg.seed = 7;
        assert_eq!(generate_synthetic(&cfg).unwrap(), generate_synthetic(&cfg).unwrap());
    }

    #[test]
    fn synthetic_precondition_boundary() {
        let cfg = SyntheticConfig::new(3, 4, 10, 2);
        assert!(generate_synthetic(&cfg).is_err());
        let cfg = SyntheticConfig::new(2, 4, 10, 3);
        let (_, _, truth) = generate_synthetic(&cfg).unwrap();
        assert_eq!(truth.tag_topic, [0, 1, 0]);
    }

    #[test]
    fn synthetic_tag_zero_docs_draw_from_topic_zero() {
        // J=2, D=4, W=10, T=2, 1 tag/doc, 50 tokens/doc, concentration 10, seed 7
        let mut cfg = SyntheticConfig::new(2, 4, 10, 2);
        cfg.seed = 7;
        let (c, g, truth) = generate_synthetic(&cfg).unwrap();
        let (mut from0, mut total) = (0u32, 0u32);
        for d in g.docs_of(0) {
            for i in c.doc_range(*d as usize) {
                let per = truth.entry_topic_counts(i);
                from0 += per[0];
                total += per.iter().sum::<u32>();
            }
        }
        assert!(total > 0);
        assert!(from0 as f64 >= 0.8 * total as f64, "{from0}/{total}");
    }

    #[test]
    fn disjoint_blocks_rows_are_stochastic() {
        let mut cfg = SyntheticConfig::new(3, 5, 10, 3);
        cfg.topic_words = TopicWords::DisjointBlocks;
        let (_, _, truth) = generate_synthetic(&cfg).unwrap();
        for row in truth.phi.iter_rows() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(block_range(2, 3, 10), 6..10);
        assert_eq!(truth.phi.get(0, 3), 0.0);
    }
}
