//! Random bounded-diameter partitions of the similarity metric.
//!
//! Ball carving: centers in random order, one radius drawn uniformly from
//! `[Δ/4, Δ/2]`, every object joins the first center within that radius.
//! Balls are split into connected pieces of the similarity graph, and then
//! adjacent pieces are merged whenever the union still has diameter at most
//! `Δ`. Merging only removes separations, so the per-pair cut probability of
//! the carving still bounds that of the output.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimilarityMetric;
use crate::rng;

/// One sampled partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzPartitionSample {
    /// Sorted clusters ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
    pub delta: f64,
    /// Separation rate the carving is designed for: `4·H_n/Δ` per unit of `ρ_S`.
    pub beta_target: f64,
    /// Similar pairs whose endpoints ended in different clusters.
    pub cut_similar_pairs: Vec<(usize, usize)>,
}

/// Samples a partition of the objects listed in `members` (all objects when
/// `None`) whose clusters have `ρ_S`-diameter at most `delta` and induce
/// connected similarity subgraphs.
pub fn sample_lipschitz_partition(
    rho: &SimilarityMetric,
    delta: f64,
    seed: u64,
) -> Result<LipschitzPartitionSample> {
    let all: Vec<usize> = (0..rho.n()).collect();
    sample_lipschitz_partition_of(rho, &all, delta, seed)
}

pub fn sample_lipschitz_partition_of(
    rho: &SimilarityMetric,
    members: &[usize],
    delta: f64,
    seed: u64,
) -> Result<LipschitzPartitionSample> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive and finite, got {delta}"
        )));
    }
    let n = members.len();
    let harmonic: f64 = (1..=n.max(1)).map(|i| 1.0 / i as f64).sum();
    let beta_target = 4.0 * harmonic / delta;
    let mut members = members.to_vec();
    members.sort_unstable();
    if n == 0 {
        return Ok(LipschitzPartitionSample {
            clusters: vec![],
            delta,
            beta_target,
            cut_similar_pairs: vec![],
        });
    }

    let mut rng = rng::stream(seed, 0);
    let radius = rng.gen_range(delta / 4.0..=delta / 2.0);
    let mut centers = members.clone();
    centers.shuffle(&mut rng);
    let mut ball = vec![usize::MAX; rho.n()];
    for (ci, &c) in centers.iter().enumerate() {
        for &x in &members {
            if ball[x] == usize::MAX && rho.rho(c, x) <= radius {
                ball[x] = ci;
            }
        }
    }

    // connected pieces of each ball
    let g = rho.graph();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut by_ball: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for &x in &members {
        by_ball.entry(ball[x]).or_default().push(x);
    }
    for group in by_ball.values() {
        clusters.extend(g.components_within(group));
    }

    // merge neighbors while the diameter allows it
    let mut owner = vec![usize::MAX; rho.n()];
    for (i, c) in clusters.iter().enumerate() {
        for &x in c {
            owner[x] = i;
        }
    }
    let in_members = |x: usize| owner[x] != usize::MAX;
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(a, b)| in_members(a) && in_members(b))
        .collect();
    loop {
        let mut merged = false;
        for &(a, b) in &edges {
            let (ca, cb) = (owner[a], owner[b]);
            if ca == cb {
                continue;
            }
            let fits = clusters[ca]
                .iter()
                .all(|&x| clusters[cb].iter().all(|&y| rho.rho(x, y) <= delta));
            if fits {
                let (keep, gone) = (ca.min(cb), ca.max(cb));
                let moved = std::mem::take(&mut clusters[gone]);
                for &x in &moved {
                    owner[x] = keep;
                }
                clusters[keep].extend(moved);
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }
    let mut clusters: Vec<Vec<usize>> = clusters
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    clusters.sort_by_key(|c| c[0]);
    let mut label = vec![usize::MAX; rho.n()];
    for (i, c) in clusters.iter().enumerate() {
        for &x in c {
            label[x] = i;
        }
    }
    let cut_similar_pairs = edges
        .into_iter()
        .filter(|&(a, b)| label[a] != label[b])
        .collect();
    Ok(LipschitzPartitionSample {
        clusters,
        delta,
        beta_target,
        cut_similar_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path(n: usize) -> SimilarityMetric {
        SimilarityMetric::from_graph(Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))), 1.0)
    }

    fn check_invariants(rho: &SimilarityMetric, s: &LipschitzPartitionSample) {
        let mut all: Vec<usize> = s.clusters.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..rho.n()).collect::<Vec<_>>());
        for c in &s.clusters {
            assert!(rho.diameter_of(c) <= s.delta);
            assert_eq!(rho.graph().components_within(c).len(), 1);
        }
    }

    #[test]
    fn single_object_is_one_cluster() {
        let rho = SimilarityMetric::from_graph(Graph::new(1), 1.0);
        let s = sample_lipschitz_partition(&rho, 1.0, 0).unwrap();
        assert_eq!(s.clusters, vec![vec![0]]);
    }

    #[test]
    fn large_delta_keeps_components_whole() {
        let rho = path(8);
        for seed in 0..20 {
            let s = sample_lipschitz_partition(&rho, 7.0, seed).unwrap();
            assert_eq!(s.clusters.len(), 1);
            assert!(s.cut_similar_pairs.is_empty());
        }
    }

    #[test]
    fn path_cut_rate_and_diameters() {
        // ten unit edges, Δ = 3u, measured over 1000 seeds
        let rho = path(11);
        let mut cut = 0usize;
        for seed in 0..1000 {
            let s = sample_lipschitz_partition(&rho, 3.0, seed).unwrap();
            check_invariants(&rho, &s);
            cut += s.cut_similar_pairs.len();
        }
        let mean = cut as f64 / (1000.0 * 10.0);
        assert!(mean <= 0.5, "mean cut fraction {mean}");
    }

    #[test]
    fn components_never_mix() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)]);
        let rho = SimilarityMetric::from_graph(g, 1.0);
        for seed in 0..50 {
            let s = sample_lipschitz_partition(&rho, 100.0, seed).unwrap();
            assert_eq!(s.clusters, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        }
    }
}
