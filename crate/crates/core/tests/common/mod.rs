//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tagtopic_core::{Corpus, Matrix, MessageState, NeighborMode, TagGraph, TtmState};

/// Random corpus with `D ≤ max_docs`, `W ≤ max_vocab`, counts in `1..=4`.
pub fn tiny_corpus(rng: &mut ChaCha8Rng, max_docs: usize, max_vocab: usize) -> Corpus {
    let docs = rng.random_range(1..=max_docs);
    let vocab = rng.random_range(1..=max_vocab);
    let mut triples = Vec::new();
    for d in 0..docs {
        for w in 0..vocab {
            if rng.random_bool(0.5) {
                triples.push((d, w, rng.random_range(1..=4u32)));
            }
        }
    }
    if triples.is_empty() {
        triples.push((0, 0, 1));
    }
    Corpus::new(docs, vocab, triples).unwrap()
}

/// Random tag graph; every document gets between zero and `max_tags` tags.
pub fn tiny_tags(rng: &mut ChaCha8Rng, docs: usize, num_tags: usize, max_tags: usize) -> TagGraph {
    let all: Vec<usize> = (0..num_tags).collect();
    let doc_tags: Vec<Vec<usize>> = (0..docs)
        .map(|_| {
            let k = rng.random_range(0..=max_tags.min(num_tags));
            all.choose_multiple(rng, k).copied().collect()
        })
        .collect();
    TagGraph::new(num_tags, &doc_tags).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The LDA message update for `(w, d)` with every exclusion sum rebuilt from
/// the raw message list.
pub fn brute_lda_update(corpus: &Corpus, state: &MessageState, alpha: f64, beta: f64, w: usize, d: usize) -> Vec<f64> {
    let k = state.topics();
    let mut doc_side = vec![0.0; k];
    let mut word_side = vec![0.0; k];
    let mut global = vec![0.0; k];
    for (idx, e) in corpus.entries().enumerate() {
        let mu = state.message(idx);
        let n = e.count as f64;
        if e.doc == d && e.word == w {
            continue;
        }
        for j in 0..k {
            global[j] += n * mu[j];
            if e.doc == d {
                doc_side[j] += n * mu[j];
            }
            if e.word == w {
                word_side[j] += n * mu[j];
            }
        }
    }
    let doc_norm: f64 = doc_side.iter().map(|x| x + alpha).sum();
    let wb = corpus.num_vocab() as f64 * beta;
    let mut out: Vec<f64> =
        (0..k).map(|j| (doc_side[j] + alpha) / doc_norm * (word_side[j] + beta) / (global[j] + wb)).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Per-topic cosines between `truth` rows and `est` rows under the topic
/// matching that maximizes the smallest cosine.
pub fn best_permutation_cosines(truth: &Matrix, est: &Matrix) -> Vec<f64> {
    let j = truth.rows();
    permutations(j)
        .into_iter()
        .map(|p| (0..j).map(|i| cosine(truth.row(i), est.row(p[i]))).collect::<Vec<f64>>())
        .max_by(|a, b| {
            let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
            min(a).total_cmp(&min(b))
        })
        .unwrap()
}

fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

fn mbar(tags: &TagGraph, ttm: &TtmState, m: usize, t: usize) -> Vec<f64> {
    ttm.doc_tag(tags.slot(m, t).unwrap()).to_vec()
}

fn subsets(ne: &[u32], k: usize) -> Vec<Vec<usize>> {
    let ne: Vec<usize> = ne.iter().map(|&t| t as usize).collect();
    let mut out = Vec::new();
    for a in 0..ne.len() {
        for b in a + 1..ne.len() {
            if k == 2 {
                out.push(vec![ne[a], ne[b]]);
            } else {
                for c in b + 1..ne.len() {
                    out.push(vec![ne[a], ne[b], ne[c]]);
                }
            }
        }
    }
    out
}

/// Ordered tuples of distinct documents, coordinate `i` drawn for tag `subset[i]`.
fn doc_tuples(tags: &TagGraph, subset: &[usize], mode: NeighborMode, skip: Option<usize>) -> Vec<Vec<usize>> {
    let pool = |t: usize| -> Vec<usize> {
        let own: Vec<usize> = tags.docs_of(t).iter().map(|&m| m as usize).collect();
        match mode {
            NeighborMode::CrossProduct => own,
            NeighborMode::Joint => {
                own.into_iter().filter(|&m| subset.iter().all(|&u| tags.slot(m, u).is_some())).collect()
            }
        }
    };
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for &t in subset {
        let mut next = Vec::new();
        for prefix in &out {
            for m in pool(t) {
                if Some(m) != skip && !prefix.contains(&m) {
                    let mut p = prefix.clone();
                    p.push(m);
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

/// Mean Hadamard product of `μ̄` over all document pairs sharing tag `t`.
pub fn brute_pairwise(tags: &TagGraph, ttm: &TtmState, t: usize) -> Vec<f64> {
    let k = ttm.topics();
    let docs = tags.docs_of(t);
    if docs.len() < 2 {
        return uniform(k);
    }
    let mut sum = vec![0.0; k];
    let mut n = 0.0;
    for a in 0..docs.len() {
        for b in a + 1..docs.len() {
            let (x, y) = (mbar(tags, ttm, docs[a] as usize, t), mbar(tags, ttm, docs[b] as usize, t));
            for j in 0..k {
                sum[j] += x[j] * y[j];
            }
            n += 1.0;
        }
    }
    sum.iter().map(|s| s / n).collect()
}

/// Mean Hadamard product of `μ̄` over every cross-tag tuple of `d`.
pub fn brute_hyper(tags: &TagGraph, ttm: &TtmState, d: usize, order: usize, mode: NeighborMode) -> Vec<f64> {
    let k = ttm.topics();
    let mut sum = vec![0.0; k];
    let mut n = 0.0;
    for subset in subsets(tags.tags_of(d), order) {
        for tuple in doc_tuples(tags, &subset, mode, None) {
            for j in 0..k {
                sum[j] += tuple.iter().zip(&subset).map(|(&m, &t)| mbar(tags, ttm, m, t)[j]).product::<f64>();
            }
            n += 1.0;
        }
    }
    if n == 0.0 {
        return uniform(k);
    }
    sum.iter().map(|s| s / n).collect()
}

/// Hyperedge message: pair sums over `ne(d)` 2-subsets, weighted by the hyperedge factor.
pub fn brute_delta(tags: &TagGraph, ttm: &TtmState, d: usize, order: usize, mode: NeighborMode) -> Vec<f64> {
    let k = ttm.topics();
    let mut sum = vec![0.0; k];
    for subset in subsets(tags.tags_of(d), 2) {
        for tuple in doc_tuples(tags, &subset, mode, Some(d)) {
            let (x, y) = (mbar(tags, ttm, tuple[0], subset[0]), mbar(tags, ttm, tuple[1], subset[1]));
            for j in 0..k {
                sum[j] += x[j] + y[j];
            }
        }
    }
    let mut f = brute_hyper(tags, ttm, d, order, mode);
    if f.iter().all(|&x| x == 0.0) {
        f = vec![1.0; k];
    }
    let mut out: Vec<f64> = sum.iter().zip(&f).map(|(s, f)| s * f).collect();
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        out.iter_mut().for_each(|x| *x /= s);
        out
    } else {
        uniform(k)
    }
}

/// A one-word-per-document corpus and TTM state whose `μ̄` are random distributions.
pub fn random_doc_tag_state(rng: &mut ChaCha8Rng, tags: &TagGraph, k: usize) -> (Corpus, TtmState) {
    let corpus = Corpus::new(tags.num_docs(), 1, (0..tags.num_docs()).map(|d| (d, 0, 1))).unwrap();
    let mut ttm = TtmState::init(&corpus, tags, k, 0).unwrap();
    for slot in 0..tags.num_slots() {
        let mut v: Vec<f64> = (0..k).map(|_| 1.0 - rng.random::<f64>()).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        ttm.set_doc_tag(slot, &v);
    }
    (corpus, ttm)
}
