//! Evaluation surface: topic tables, feature rows for external classifiers,
//! tag-recommendation score fusion and recall/precision/Rate⁺ metrics.
//!
//! Ties are broken by ascending id everywhere.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::TagGraph;
use crate::error::{bad_config, invalid, Result};
use crate::math::Matrix;

/// Default number of suggested tags per document.
pub const DEFAULT_SUGGESTIONS: usize = 5;

/// Mixture weight of the first score source found best on training data.
pub const DEFAULT_FUSION_WEIGHT: f64 = 0.25;

/// Per topic, the `k` words with the largest `φ_w(j)` as `(word, φ)`.
pub fn top_words(phi: &Matrix, k: usize) -> Result<Vec<Vec<(usize, f64)>>> {
    if k > phi.cols() {
        return Err(invalid!("asked for {k} words from a vocabulary of {}", phi.cols()));
    }
    Ok(phi
        .iter_rows()
        .map(|row| {
            let mut ranked: Vec<(usize, f64)> = row.iter().copied().enumerate().collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            ranked.truncate(k);
            ranked
        })
        .collect())
}

/// A feature vector with its class label, as handed to an external classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub features: Vec<f64>,
    pub label: String,
}

/// Link features `θ_d ∘ θ_{d'}` with a binary label (`1` linked, `0` not).
pub fn link_features(theta: &Matrix, pairs: &[(usize, usize, bool)]) -> Result<Vec<FeatureRow>> {
    pairs
        .iter()
        .map(|&(a, b, linked)| {
            if a == b {
                return Err(invalid!("link pair ({a}, {b}) repeats a document"));
            }
            if a >= theta.rows() || b >= theta.rows() {
                return Err(invalid!("link pair ({a}, {b}) outside {} documents", theta.rows()));
            }
            let features = theta.row(a).iter().zip(theta.row(b)).map(|(x, y)| x * y).collect();
            Ok(FeatureRow { features, label: if linked { "1" } else { "0" }.to_string() })
        })
        .collect()
}

/// Document features `θ_d` for labelled documents; returns the rows and the number skipped.
pub fn doc_features(theta: &Matrix, labels: &[Option<String>]) -> Result<(Vec<FeatureRow>, usize)> {
    if labels.len() != theta.rows() {
        return Err(invalid!("{} labels for {} documents", labels.len(), theta.rows()));
    }
    let mut skipped = 0;
    let mut rows = Vec::new();
    for (d, label) in labels.iter().enumerate() {
        match label {
            Some(label) => rows.push(FeatureRow { features: theta.row(d).to_vec(), label: label.clone() }),
            None => skipped += 1,
        }
    }
    Ok((rows, skipped))
}

/// Two per-(document, tag) likelihoods to be fused with weight `ω` on the first.
#[derive(Debug, Clone, PartialEq)]
pub struct TagRecScores {
    omega: f64,
    scores: BTreeMap<(usize, usize), (f64, f64)>,
}

impl TagRecScores {
    pub fn new(omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(bad_config!("fusion weight {omega} outside [0, 1]"));
        }
        Ok(TagRecScores { omega, scores: BTreeMap::new() })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn insert(&mut self, doc: usize, tag: usize, first: f64, second: f64) -> Result<()> {
        for s in [first, second] {
            if !(0.0..=1.0).contains(&s) {
                return Err(invalid!("score {s} for document {doc} tag {tag} outside [0, 1]"));
            }
        }
        if self.scores.insert((doc, tag), (first, second)).is_some() {
            return Err(invalid!("duplicate score for document {doc} tag {tag}"));
        }
        Ok(())
    }

    /// Joins two `(doc, tag, score)` lists; every pair must appear in both.
    pub fn join(omega: f64, first: &[(usize, usize, f64)], second: &[(usize, usize, f64)]) -> Result<Self> {
        let mut other: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(d, t, s) in second {
            if other.insert((d, t), s).is_some() {
                return Err(invalid!("duplicate score for document {d} tag {t}"));
            }
        }
        let mut out = Self::new(omega)?;
        for &(d, t, s) in first {
            let s2 = other.remove(&(d, t)).ok_or_else(|| invalid!("no second score for document {d} tag {t}"))?;
            out.insert(d, t, s, s2)?;
        }
        if let Some((&(d, t), _)) = other.iter().next() {
            return Err(invalid!("no first score for document {d} tag {t}"));
        }
        Ok(out)
    }

    /// Largest document id with a score, plus one.
    pub fn num_docs(&self) -> usize {
        self.scores.keys().map(|&(d, _)| d + 1).max().unwrap_or(0)
    }

    /// `(doc, tag, y)` with `y = ω·first + (1 − ω)·second`, in (doc, tag) order.
    pub fn fused(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.scores.iter().map(move |(&(d, t), &(a, b))| (d, t, self.omega * a + (1.0 - self.omega) * b))
    }
}

/// Per document `0..num_docs`, the `top_k` tags by fused score (descending, ties by tag id).
pub fn fuse_tagrec_scores(scores: &TagRecScores, num_docs: usize, top_k: usize) -> Vec<Vec<(usize, f64)>> {
    let mut per_doc: Vec<Vec<(usize, f64)>> = vec![Vec::new(); num_docs.max(scores.num_docs())];
    for (d, t, y) in scores.fused() {
        per_doc[d].push((t, y));
    }
    for ranked in &mut per_doc {
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(top_k);
    }
    per_doc
}

/// Counts and rates for one tag.
#[derive(Debug, Clone, PartialEq)]
pub struct TagMetrics {
    pub tag: usize,
    /// Test documents labelled with the tag.
    pub n_h: usize,
    /// Test documents the system suggested the tag for.
    pub n_s: usize,
    /// Correct suggestions.
    pub n_c: usize,
    /// `N_c / N_h`; absent when `N_h = 0`.
    pub recall: Option<f64>,
    /// `N_c / N_s`; absent when `N_s = 0`.
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagRecResult {
    /// Every tag that is labelled or suggested at least once, ascending.
    pub per_tag: Vec<TagMetrics>,
    /// Mean recall over tags present in the test labels.
    pub mean_recall: f64,
    /// Mean precision over tags present in the test labels; never-suggested tags count as 0.
    pub mean_precision: f64,
    /// Fraction of tags present in the test labels with positive recall.
    pub rate_plus: f64,
}

/// Scores suggestions (one tag list per test document) against the test tag graph.
pub fn tagrec_metrics(suggestions: &[Vec<usize>], truth: &TagGraph) -> Result<TagRecResult> {
    if suggestions.len() != truth.num_docs() {
        return Err(invalid!("suggestions for {} documents, ground truth has {}", suggestions.len(), truth.num_docs()));
    }
    let num_tags = suggestions.iter().flatten().map(|&t| t + 1).max().unwrap_or(0).max(truth.num_tags());
    let (mut n_h, mut n_s, mut n_c) = (vec![0usize; num_tags], vec![0usize; num_tags], vec![0usize; num_tags]);
    for (d, suggested) in suggestions.iter().enumerate() {
        let labelled = truth.tags_of(d);
        for &t in labelled {
            n_h[t as usize] += 1;
        }
        let mut seen = suggested.clone();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            n_s[t] += 1;
            if labelled.binary_search(&(t as u32)).is_ok() {
                n_c[t] += 1;
            }
        }
    }

    let mut per_tag = Vec::new();
    let (mut recall_sum, mut precision_sum, mut positive, mut present) = (0.0, 0.0, 0usize, 0usize);
    for t in 0..num_tags {
        if n_h[t] == 0 && n_s[t] == 0 {
            continue;
        }
        let recall = (n_h[t] > 0).then(|| n_c[t] as f64 / n_h[t] as f64);
        let precision = (n_s[t] > 0).then(|| n_c[t] as f64 / n_s[t] as f64);
        if let Some(r) = recall {
            present += 1;
            recall_sum += r;
            precision_sum += precision.unwrap_or(0.0);
            if r > 0.0 {
                positive += 1;
            }
        }
        per_tag.push(TagMetrics { tag: t, n_h: n_h[t], n_s: n_s[t], n_c: n_c[t], recall, precision });
    }
    let denom = present.max(1) as f64;
    Ok(TagRecResult {
        per_tag,
        mean_recall: recall_sum / denom,
        mean_precision: precision_sum / denom,
        rate_plus: positive as f64 / denom,
    })
}
