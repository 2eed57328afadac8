//! Enumeration of the pairwise and higher-order document relations induced
//! by the tag graph.
//!
//! Every relation is stored as a tuple of *slots* (see [`TagGraph`]), so the
//! factor computations read `μ̄_{m,t}` directly by slot.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NeighborMode, TtmConfig};
use crate::corpus::TagGraph;

/// RNG stream reserved for relation subsampling.
const SUBSAMPLE_STREAM: u64 = 2;

/// Above `OVERSAMPLE × cap` candidate tuples the index switches from
/// enumerate-then-select to rejection sampling.
const OVERSAMPLE: u128 = 8;

/// Pairwise and higher-order relations of a tag graph.
///
/// * per tag `t`: unordered document pairs `{d, d'} ⊆ ne(t)`;
/// * per document `d`: for every `order`-subset `{t, t', …}` of `ne(d)`, the
///   cross-neighbour tuples `(m ∈ ne(t), m' ∈ ne(t'), …)` of distinct documents
///   used by the hyperedge factor;
/// * per document `d`: for every 2-subset `{t, t'}` of `ne(d)`, the pairs
///   `(m ∈ ne(t)∖d, m' ∈ ne(t')∖d)`, `m ≠ m'`, used by the hyperedge message.
///
/// With a tuple cap, each tag's pair list and each document's tuple and pair
/// lists are subsampled uniformly (seeded) down to the cap.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationIndex {
    order: usize,
    tag_pair_ptr: Vec<usize>,
    tag_pairs: Vec<[u32; 2]>,
    hyper_ptr: Vec<usize>,
    hyper_slots: Vec<u32>,
    delta_ptr: Vec<usize>,
    delta_pairs: Vec<[u32; 2]>,
}

impl RelationIndex {
    pub fn build(tags: &TagGraph, config: &TtmConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SUBSAMPLE_STREAM);
        let cap = config.tuple_cap;
        let order = config.order;

        let mut tag_pair_ptr = vec![0];
        let mut tag_pairs = Vec::new();
        for t in 0..tags.num_tags() {
            collect_tag_pairs(tags.slots_of_tag(t), cap, &mut rng, &mut tag_pairs);
            tag_pair_ptr.push(tag_pairs.len());
        }

        let mut hyper_ptr = vec![0];
        let mut hyper_slots = Vec::new();
        let mut delta_ptr = vec![0];
        let mut delta_flat = Vec::new();
        for d in 0..tags.num_docs() {
            let ne = tags.tags_of(d);
            let spaces: Vec<Vec<Coord>> =
                subsets(ne, order).iter().map(|s| coords(tags, s, config.neighbor_mode, None)).collect();
            collect_tuples(&spaces, order, cap, &mut rng, &mut hyper_slots);
            hyper_ptr.push(hyper_slots.len() / order);

            let spaces: Vec<Vec<Coord>> =
                subsets(ne, 2).iter().map(|s| coords(tags, s, config.neighbor_mode, Some(d as u32))).collect();
            collect_tuples(&spaces, 2, cap, &mut rng, &mut delta_flat);
            delta_ptr.push(delta_flat.len() / 2);
        }
        let delta_pairs = delta_flat.chunks_exact(2).map(|p| [p[0], p[1]]).collect();

        RelationIndex { order, tag_pair_ptr, tag_pairs, hyper_ptr, hyper_slots, delta_ptr, delta_pairs }
    }

    /// Order of the hyperedge factor tuples (2 or 3).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Slot pairs of documents sharing tag `t`.
    pub fn tag_pairs(&self, t: usize) -> &[[u32; 2]] {
        &self.tag_pairs[self.tag_pair_ptr[t]..self.tag_pair_ptr[t + 1]]
    }

    /// Slot tuples (each of length [`RelationIndex::order`]) for document `d`'s hyperedge factor.
    pub fn hyper_tuples(&self, d: usize) -> core::slice::ChunksExact<'_, u32> {
        let (a, b) = (self.hyper_ptr[d], self.hyper_ptr[d + 1]);
        self.hyper_slots[a * self.order..b * self.order].chunks_exact(self.order)
    }

    pub fn num_hyper_tuples(&self, d: usize) -> usize {
        self.hyper_ptr[d + 1] - self.hyper_ptr[d]
    }

    /// Slot pairs feeding document `d`'s hyperedge message.
    pub fn delta_pairs(&self, d: usize) -> &[[u32; 2]] {
        &self.delta_pairs[self.delta_ptr[d]..self.delta_ptr[d + 1]]
    }

    /// Total number of stored relations `L`.
    pub fn num_relations(&self) -> usize {
        self.tag_pairs.len() + self.hyper_slots.len() / self.order + self.delta_pairs.len()
    }
}

/// All `k`-subsets of `items`, in lexicographic position order.
pub(crate) fn subsets(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k == 0 || k > items.len() {
        return out;
    }
    let n = items.len();
    let mut pos: Vec<usize> = (0..k).collect();
    loop {
        out.push(pos.iter().map(|&p| items[p]).collect());
        let Some(i) = (0..k).rev().find(|&i| pos[i] < n - k + i) else {
            return out;
        };
        pos[i] += 1;
        for j in i + 1..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
}

/// Candidate documents (and their slots for the coordinate's tag) of one tuple coordinate.
#[derive(Debug, Clone)]
struct Coord {
    docs: Vec<u32>,
    slots: Vec<u32>,
}

fn coords(tags: &TagGraph, subset: &[u32], mode: NeighborMode, exclude: Option<u32>) -> Vec<Coord> {
    let keep = |m: &u32| Some(*m) != exclude;
    match mode {
        NeighborMode::CrossProduct => subset
            .iter()
            .map(|&t| {
                let t = t as usize;
                let (docs, slots) = tags
                    .docs_of(t)
                    .iter()
                    .zip(tags.slots_of_tag(t))
                    .filter(|(m, _)| keep(m))
                    .map(|(&m, &s)| (m, s))
                    .unzip();
                Coord { docs, slots }
            })
            .collect(),
        NeighborMode::Joint => {
            let mut common: Vec<u32> = tags.docs_of(subset[0] as usize).to_vec();
            for &t in &subset[1..] {
                let other = tags.docs_of(t as usize);
                common.retain(|m| other.binary_search(m).is_ok());
            }
            common.retain(keep);
            subset
                .iter()
                .map(|&t| Coord {
                    slots: common
                        .iter()
                        .map(|&m| tags.slot(m as usize, t as usize).expect("m is tagged with t") as u32)
                        .collect(),
                    docs: common.clone(),
                })
                .collect()
        }
    }
}

fn space_size(space: &[Coord]) -> u128 {
    space.iter().map(|c| c.docs.len() as u128).product()
}

/// Visits every tuple of pairwise-distinct documents, one per coordinate, as slots.
fn for_each_tuple(space: &[Coord], visit: &mut impl FnMut(&[u32])) {
    fn rec(space: &[Coord], depth: usize, docs: &mut [u32; 3], slots: &mut [u32; 3], visit: &mut impl FnMut(&[u32])) {
        if depth == space.len() {
            visit(&slots[..depth]);
            return;
        }
        let c = &space[depth];
        for (&m, &s) in c.docs.iter().zip(&c.slots) {
            if docs[..depth].contains(&m) {
                continue;
            }
            docs[depth] = m;
            slots[depth] = s;
            rec(space, depth + 1, docs, slots, visit);
        }
    }
    debug_assert!(space.len() <= 3);
    rec(space, 0, &mut [0; 3], &mut [0; 3], visit);
}

fn collect_tuples(spaces: &[Vec<Coord>], k: usize, cap: Option<usize>, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
    let sizes: Vec<u128> = spaces.iter().map(|s| space_size(s)).collect();
    let total: u128 = sizes.iter().sum();
    match cap {
        Some(cap) if total > OVERSAMPLE * cap as u128 => {
            let mut seen: BTreeSet<[u32; 3]> = BTreeSet::new();
            let mut attempts = 0usize;
            while seen.len() < cap && attempts < 64 * cap {
                attempts += 1;
                let mut u = rng.random_range(0..total);
                let s = sizes.iter().position(|&n| {
                    if u < n {
                        true
                    } else {
                        u -= n;
                        false
                    }
                });
                let space = &spaces[s.expect("u < total")];
                let mut docs = [0u32; 3];
                let mut key = [0u32; 3];
                let mut distinct = true;
                for (i, c) in space.iter().enumerate() {
                    let pick = rng.random_range(0..c.docs.len());
                    if docs[..i].contains(&c.docs[pick]) {
                        distinct = false;
                        break;
                    }
                    docs[i] = c.docs[pick];
                    key[i] = c.slots[pick];
                }
                if distinct {
                    seen.insert(key);
                }
            }
            for key in seen {
                out.extend_from_slice(&key[..k]);
            }
        }
        _ => {
            let mut all = Vec::new();
            for space in spaces {
                for_each_tuple(space, &mut |slots| all.extend_from_slice(slots));
            }
            let count = all.len() / k;
            match cap {
                Some(cap) if count > cap => {
                    let mut picks = index::sample(rng, count, cap).into_vec();
                    picks.sort_unstable();
                    for i in picks {
                        out.extend_from_slice(&all[i * k..(i + 1) * k]);
                    }
                }
                _ => out.extend_from_slice(&all),
            }
        }
    }
}

fn collect_tag_pairs(slots: &[u32], cap: Option<usize>, rng: &mut ChaCha8Rng, out: &mut Vec<[u32; 2]>) {
    let n = slots.len();
    let total = n * n.saturating_sub(1) / 2;
    let pair = |i: usize, j: usize| [slots[i], slots[j]];
    match cap {
        Some(cap) if total > cap && total as u128 > OVERSAMPLE * cap as u128 => {
            let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
            let mut attempts = 0usize;
            while seen.len() < cap && attempts < 64 * cap {
                attempts += 1;
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j {
                    seen.insert((i.min(j), i.max(j)));
                }
            }
            out.extend(seen.into_iter().map(|(i, j)| pair(i, j)));
        }
        Some(cap) if total > cap => {
            let mut picks = index::sample(rng, total, cap).into_vec();
            picks.sort_unstable();
            let mut all = Vec::with_capacity(total);
            for i in 0..n {
                for j in i + 1..n {
                    all.push(pair(i, j));
                }
            }
            out.extend(picks.into_iter().map(|p| all[p]));
        }
        _ => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(pair(i, j));
                }
            }
        }
    }
}
