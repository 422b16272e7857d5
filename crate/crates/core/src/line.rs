//! Exact learning of perfect line embeddings.
//!
//! Each connected component of the similarity graph is handled on its own.
//! A small family of candidate orderings is built (one per starting object)
//! such that, whenever a perfect embedding exists, one of them is compatible
//! with it. For a fixed ordering the gaps between consecutive objects form a
//! system of difference constraints, decided exactly by Bellman–Ford over
//! integers on a common power-of-two scale. Components are laid out left to
//! right with a gap of `l` between them.

use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::{ConstraintKind, Instance};

/// Orderings are enumerated outright up to this size when `l ≤ u`, where the
/// candidate construction does not apply.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// A (possibly abandoned) candidate ordering of object indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    pub sequence: Vec<usize>,
    /// False when construction stopped because the prefix's neighborhood was
    /// not a clique; no perfect embedding extends such a prefix.
    pub viable: bool,
}

/// Candidate orderings of a connected, completely labeled instance.
///
/// One ordering per starting object. At each step the prefix is contracted;
/// its neighborhood must be a clique, and the next object is taken among the
/// neighbors of minimum contracted degree, preferring the one with the most
/// neighbors inside the prefix, then the smallest index. With three objects
/// or fewer, or when `l ≤ u`, all permutations are returned.
pub fn candidate_orderings(inst: &Instance) -> Result<Vec<Ordering>> {
    inst.require_complete()?;
    let n = inst.n();
    let g = inst.similarity_graph();
    if g.components().len() > 1 {
        return Err(Error::NotConnected);
    }
    if n <= 3 || inst.l() <= inst.u() {
        if n > EXHAUSTIVE_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "with l <= u orderings are enumerated exhaustively, which is limited to {EXHAUSTIVE_LIMIT} objects"
            )));
        }
        return Ok(permutations(n)
            .into_iter()
            .map(|sequence| Ordering {
                sequence,
                viable: true,
            })
            .collect());
    }
    Ok((0..n).map(|start| grow_ordering(&g, start)).collect())
}

fn grow_ordering(g: &Graph, start: usize) -> Ordering {
    let n = g.n();
    let mut in_prefix = vec![false; n];
    // neighbors inside the prefix, for every vertex
    let mut prefix_links = vec![0usize; n];
    let mut sequence = vec![start];
    in_prefix[start] = true;
    for &w in g.neighbors(start) {
        prefix_links[w] += 1;
    }
    while sequence.len() < n {
        let frontier: Vec<usize> = (0..n)
            .filter(|&v| !in_prefix[v] && prefix_links[v] > 0)
            .collect();
        let clique = frontier
            .iter()
            .enumerate()
            .all(|(i, &a)| frontier[i + 1..].iter().all(|&b| g.has_edge(a, b)));
        if frontier.is_empty() || !clique {
            return Ordering {
                sequence,
                viable: false,
            };
        }
        let key = |v: usize| {
            let outside = g.degree(v) - prefix_links[v];
            (outside, std::cmp::Reverse(prefix_links[v]), v)
        };
        let next = *frontier
            .iter()
            .min_by_key(|&&v| key(v))
            .expect("frontier is nonempty");
        sequence.push(next);
        in_prefix[next] = true;
        for &w in g.neighbors(next) {
            prefix_links[w] += 1;
        }
    }
    Ordering {
        sequence,
        viable: true,
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n)
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// `u` and `l` as integers on a shared scale `2^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Scaled {
    pub u: i128,
    pub l: i128,
    pub exp: i32,
}

impl Scaled {
    pub fn new(u: f64, l: f64) -> Result<Self> {
        let (mu, eu) = dyadic(u);
        let (ml, el) = dyadic(l);
        let exp = eu.min(el);
        let (su, sl) = ((eu - exp) as u32, (el - exp) as u32);
        // leave head room for sums over thousands of constraints
        if su > 60 || sl > 60 {
            return Err(Error::ThresholdRange { u, l });
        }
        Ok(Scaled {
            u: (mu as i128) << su,
            l: (ml as i128) << sl,
            exp,
        })
    }

    pub fn to_f64(self, v: i128) -> f64 {
        (v as f64) * 2f64.powi(self.exp)
    }
}

/// Odd mantissa and exponent of a positive finite float.
fn dyadic(x: f64) -> (u64, i32) {
    let (mut m, mut e, _) = Float::integer_decode(x);
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i16;
    (m, e as i32)
}

/// Decides whether some perfect embedding is compatible with `order`
/// (a permutation of all objects of `inst`), returning a witness.
pub fn feasible_embedding_for_ordering(
    inst: &Instance,
    order: &[usize],
) -> Result<Option<Embedding>> {
    let scale = Scaled::new(inst.u(), inst.l())?;
    let positions = solve_ordering(inst, order, scale)?;
    positions
        .map(|p| {
            Embedding::line(
                inst.objects().to_vec(),
                p.iter().map(|&v| scale.to_f64(v)).collect(),
            )
        })
        .transpose()
}

/// Integer positions (indexed by object) or `None` when infeasible.
fn solve_ordering(inst: &Instance, order: &[usize], scale: Scaled) -> Result<Option<Vec<i128>>> {
    let n = inst.n();
    let mut slot = vec![usize::MAX; n];
    for (i, &x) in order.iter().enumerate() {
        if x >= n || slot[x] != usize::MAX {
            return Err(Error::InvalidParameter(
                "ordering must be a permutation of the objects".into(),
            ));
        }
        slot[x] = i;
    }
    if order.len() != n {
        return Err(Error::InvalidParameter(
            "ordering must be a permutation of the objects".into(),
        ));
    }
    // edge (a, b, w) encodes p_b − p_a ≤ w over ordering slots
    let mut edges: Vec<(usize, usize, i128)> = Vec::with_capacity(inst.num_constraints() + n);
    for i in 0..n.saturating_sub(1) {
        edges.push((i + 1, i, 0));
    }
    for (a, b, kind) in inst.constraints() {
        let (i, j) = (slot[a].min(slot[b]), slot[a].max(slot[b]));
        match kind {
            ConstraintKind::Similar => edges.push((i, j, scale.u)),
            ConstraintKind::Dissimilar => edges.push((j, i, -scale.l)),
        }
    }
    let Some(dist) = bellman_ford(n, &edges) else {
        return Ok(None);
    };
    let base = dist.first().copied().unwrap_or(0);
    Ok(Some((0..n).map(|x| dist[slot[x]] - base).collect()))
}

/// Shortest distances from a virtual source joined to every vertex by a
/// zero edge; `None` on a negative cycle.
fn bellman_ford(n: usize, edges: &[(usize, usize, i128)]) -> Option<Vec<i128>> {
    let mut dist = vec![0i128; n];
    for _ in 0..=n {
        let mut changed = false;
        for &(a, b, w) in edges {
            if dist[a] + w < dist[b] {
                dist[b] = dist[a] + w;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
    }
    None
}

/// Learns a perfect line embedding or proves that none exists.
///
/// Returns `Ok(None)` exactly when no embedding satisfies every constraint
/// at distortion 1.
pub fn learn_line(inst: &Instance) -> Result<Option<Embedding>> {
    inst.require_complete()?;
    let scale = Scaled::new(inst.u(), inst.l())?;
    let g = inst.similarity_graph();
    let mut coords = vec![0i128; inst.n()];
    let mut offset = 0i128;
    for comp in g.components() {
        let (sub, map) = inst.restrict(&comp);
        let Some(local) = solve_component(&sub, scale)? else {
            return Ok(None);
        };
        let lo = *local.iter().min().expect("components are nonempty");
        let hi = *local.iter().max().expect("components are nonempty");
        for (i, &v) in local.iter().enumerate() {
            coords[map[i]] = v - lo + offset;
        }
        offset += hi - lo + scale.l;
    }
    let coords = coords.into_iter().map(|v| scale.to_f64(v)).collect();
    Embedding::line(inst.objects().to_vec(), coords).map(Some)
}

fn solve_component(sub: &Instance, scale: Scaled) -> Result<Option<Vec<i128>>> {
    let orderings = candidate_orderings(sub)?;
    // first feasible ordering in index order, whatever the scheduling
    let found = orderings
        .par_iter()
        .filter(|o| o.viable)
        .map(|o| solve_ordering(sub, &o.sequence, scale))
        .find_map_first(|r| match r {
            Ok(Some(p)) => Some(Ok(p)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        });
    found.transpose()
}
