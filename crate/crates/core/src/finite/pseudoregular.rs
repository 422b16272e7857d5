//! Equitable pseudoregular partitions.
//!
//! For a partition `V_1..V_k` with densities `d_ij = e(V_i, V_j)/(|V_i||V_j|)`
//! the defect is `max |e(S,T) − Σ d_ij |S∩V_i||T∩V_j|| / n²` over disjoint
//! `S, T`. It is computed exactly on small graphs (one pass over all `S`,
//! choosing the best `T` per `S`) and estimated by alternating local search
//! from random cuts otherwise.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Knobs for [`pseudoregular_partition`].
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionConfig {
    /// Upper bound on the number of parts.
    pub max_parts: usize,
    /// Graphs up to this size get an exact defect.
    pub exact_limit: usize,
    /// Random starts of the estimator, multiplied by `ln(1/δ)`.
    pub samples: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            max_parts: 64,
            exact_limit: 12,
            samples: 16,
        }
    }
}

/// An equitable partition together with its measured defect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoregularPartition {
    pub parts: Vec<Vec<usize>>,
    pub epsilon: f64,
    /// Row-major `k × k` densities.
    pub densities: Vec<f64>,
    /// Measured defect of the returned partition.
    pub defect: f64,
    /// Whether `defect` is exact or a lower estimate.
    pub exact: bool,
}

impl PseudoregularPartition {
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn density(&self, i: usize, j: usize) -> f64 {
        self.densities[i * self.k() + j]
    }

    /// Part index of every vertex.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                out[v] = i;
            }
        }
        out
    }
}

/// Computes an equitable partition of `graph` with defect at most `epsilon`
/// (exactly on small graphs, per estimate above [`PartitionConfig::exact_limit`]).
pub fn pseudoregular_partition(
    graph: &Graph,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<PseudoregularPartition> {
    pseudoregular_partition_with(graph, epsilon, delta, seed, &PartitionConfig::default())
}

pub fn pseudoregular_partition_with(
    graph: &Graph,
    epsilon: f64,
    delta: f64,
    seed: u64,
    cfg: &PartitionConfig,
) -> Result<PseudoregularPartition> {
    let (partition, reached) = partition_best_effort(graph, epsilon, delta, seed, cfg)?;
    if reached {
        Ok(partition)
    } else {
        Err(Error::PartBudgetExceeded { cap: cfg.max_parts })
    }
}

/// Like [`pseudoregular_partition_with`] but returns the last partition
/// reached under the part cap, with a flag telling whether the target held.
pub(crate) fn partition_best_effort(
    graph: &Graph,
    epsilon: f64,
    delta: f64,
    seed: u64,
    cfg: &PartitionConfig,
) -> Result<(PseudoregularPartition, bool)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let n = graph.n();
    if n == 0 {
        let p = PseudoregularPartition {
            parts: vec![],
            epsilon,
            densities: vec![],
            defect: 0.0,
            exact: true,
        };
        return Ok((p, true));
    }
    let mut rng = rng::stream(seed, 0);
    let samples = cfg.samples.max(1) * ((1.0 / delta).ln().ceil() as usize).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut k = 1;
    loop {
        let parts = chunk(&order, k);
        let densities = densities(graph, &parts);
        let w = weight_matrix(graph, &parts, &densities);
        let exact = n <= cfg.exact_limit;
        let (defect, s, t) = if exact {
            max_cut_excess(&w, n)
        } else {
            estimate(&w, n, samples, &mut rng)
        };
        let partition = PseudoregularPartition {
            parts,
            epsilon,
            densities,
            defect,
            exact,
        };
        if defect <= epsilon || k == n {
            return Ok((partition, true));
        }
        let next = (2 * k).min(n);
        if next > cfg.max_parts {
            return Ok((partition, false));
        }
        // group each part's vertices by their side of the witness cut before re-chunking
        let labels = partition.labels(n);
        let side = |v: usize| {
            if s.contains(&v) {
                0
            } else if t.contains(&v) {
                1
            } else {
                2
            }
        };
        order.sort_by_key(|&v| (labels[v], side(v), v));
        k = next;
    }
}

/// Splits `order` into `k` consecutive chunks whose sizes differ by at most one.
fn chunk(order: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = order.len();
    let (q, r) = (n / k, n % k);
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = q + usize::from(i < r);
        let mut part = order[start..start + len].to_vec();
        part.sort_unstable();
        out.push(part);
        start += len;
    }
    out
}

/// `d_ij` with ordered pairs, so `d_ii = 2·edges(V_i)/|V_i|²`.
fn densities(graph: &Graph, parts: &[Vec<usize>]) -> Vec<f64> {
    let k = parts.len();
    let mut label = vec![0; graph.n()];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            label[v] = i;
        }
    }
    let mut e = vec![0.0; k * k];
    for v in 0..graph.n() {
        for &w in graph.neighbors(v) {
            e[label[v] * k + label[w]] += 1.0;
        }
    }
    for i in 0..k {
        for j in 0..k {
            e[i * k + j] /= (parts[i].len() * parts[j].len()) as f64;
        }
    }
    e
}

fn weight_matrix(graph: &Graph, parts: &[Vec<usize>], d: &[f64]) -> Vec<f64> {
    let n = graph.n();
    let k = parts.len();
    let mut label = vec![0; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            label[v] = i;
        }
    }
    let mut w = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            if x != y {
                w[x * n + y] = -d[label[x] * k + label[y]];
            }
        }
        for &y in graph.neighbors(x) {
            w[x * n + y] += 1.0;
        }
    }
    w
}

/// Best `T ⊆ V \ S` for a given column-sum vector; returns (value, T).
fn best_response(col: &[f64], in_s: &[bool]) -> (f64, Vec<usize>, bool) {
    let (mut pos, mut neg) = (0.0, 0.0);
    for (y, &c) in col.iter().enumerate() {
        if in_s[y] {
            continue;
        }
        if c > 0.0 {
            pos += c;
        } else {
            neg -= c;
        }
    }
    let positive = pos >= neg;
    let t = (0..col.len())
        .filter(|&y| !in_s[y] && if positive { col[y] > 0.0 } else { col[y] < 0.0 })
        .collect();
    (pos.max(neg), t, positive)
}

/// Exact maximum of `|Σ_{S×T} W|` by Gray-code enumeration of `S`.
fn max_cut_excess(w: &[f64], n: usize) -> (f64, Vec<usize>, Vec<usize>) {
    assert!(n < 31, "exact defect is limited to small graphs");
    let mut col = vec![0.0; n];
    let mut in_s = vec![false; n];
    let mut best = (0.0, 0u32);
    let mut gray = 0u32;
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let sign = if in_s[bit] { -1.0 } else { 1.0 };
        in_s[bit] = !in_s[bit];
        for y in 0..n {
            col[y] += sign * w[bit * n + y];
        }
        let (mut pos, mut neg) = (0.0, 0.0);
        for y in 0..n {
            if !in_s[y] {
                let c = col[y];
                if c > 0.0 {
                    pos += c;
                } else {
                    neg -= c;
                }
            }
        }
        let v = f64::max(pos, neg);
        if v > best.0 + 1e-12 {
            best = (v, gray);
        }
    }
    let s: Vec<usize> = (0..n).filter(|&i| best.1 >> i & 1 == 1).collect();
    let mut mask = vec![false; n];
    let mut col = vec![0.0; n];
    for &x in &s {
        mask[x] = true;
        for y in 0..n {
            col[y] += w[x * n + y];
        }
    }
    let (v, t, _) = best_response(&col, &mask);
    (v / (n * n) as f64, s, t)
}

/// Lower estimate of the defect by alternating best responses from random cuts.
fn estimate(
    w: &[f64],
    n: usize,
    samples: usize,
    rng: &mut rng::Rng,
) -> (f64, Vec<usize>, Vec<usize>) {
    let mut best: (f64, Vec<usize>, Vec<usize>) = (0.0, vec![], vec![]);
    for _ in 0..samples {
        let mut in_s: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let mut last = -1.0;
        for _ in 0..50 {
            let mut col = vec![0.0; n];
            for x in (0..n).filter(|&x| in_s[x]) {
                for y in 0..n {
                    col[y] += w[x * n + y];
                }
            }
            let (value, t, positive) = best_response(&col, &in_s);
            if value > best.0 {
                let s = (0..n).filter(|&x| in_s[x]).collect();
                best = (value, s, t.clone());
            }
            if value <= last + 1e-12 {
                break;
            }
            last = value;
            // best S against the fixed T, same sign
            let mut in_t = vec![false; n];
            for &y in &t {
                in_t[y] = true;
            }
            let mut row = vec![0.0; n];
            for &y in &t {
                for x in 0..n {
                    row[x] += w[x * n + y];
                }
            }
            for x in 0..n {
                in_s[x] = !in_t[x] && if positive { row[x] > 0.0 } else { row[x] < 0.0 };
            }
        }
    }
    (best.0 / (n * n) as f64, best.1, best.2)
}

/// Exact defect of an arbitrary partition (graphs up to 30 vertices).
pub fn exact_defect(graph: &Graph, parts: &[Vec<usize>]) -> f64 {
    let d = densities(graph, parts);
    let w = weight_matrix(graph, parts, &d);
    max_cut_excess(&w, graph.n()).0
}

/// `|e(S,T) − Σ d_ij |S_i||T_j|| / n²` for one pair of disjoint sets, from the definition.
pub fn cut_defect(graph: &Graph, parts: &[Vec<usize>], s: &[usize], t: &[usize]) -> f64 {
    let n = graph.n();
    let k = parts.len();
    let d = densities(graph, parts);
    let mut e = 0.0;
    for &x in s {
        for &y in t {
            if graph.has_edge(x, y) {
                e += 1.0;
            }
        }
    }
    let count =
        |set: &[usize], part: &[usize]| set.iter().filter(|v| part.contains(v)).count() as f64;
    let mut predicted = 0.0;
    for i in 0..k {
        for j in 0..k {
            predicted += d[i * k + j] * count(s, &parts[i]) * count(t, &parts[j]);
        }
    }
    (e - predicted).abs() / (n * n) as f64
}

/// Common refinement: every nonempty `A ∩ B` for `A` in `p1`, `B` in `p2`.
pub fn refine_partitions(p1: &[Vec<usize>], p2: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let ground = |p: &[Vec<usize>]| {
        let mut all: Vec<usize> = p.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    };
    let g1 = ground(p1);
    if g1 != ground(p2) || g1.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::GroundSetMismatch);
    }
    let mut out = Vec::new();
    for a in p1 {
        for b in p2 {
            let mut part: Vec<usize> = a.iter().copied().filter(|v| b.contains(v)).collect();
            if !part.is_empty() {
                part.sort_unstable();
                out.push(part);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut r = rng::stream(seed, 99);
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|_| r.gen_bool(p))
            .collect();
        Graph::from_edges(n, edges)
    }

    /// Defect by brute force over all 3^n (S, T, neither) labelings.
    fn brute_defect(graph: &Graph, parts: &[Vec<usize>]) -> f64 {
        let n = graph.n();
        let mut best: f64 = 0.0;
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let (mut s, mut t) = (vec![], vec![]);
            for v in 0..n {
                match c % 3 {
                    0 => s.push(v),
                    1 => t.push(v),
                    _ => {}
                }
                c /= 3;
            }
            best = best.max(cut_defect(graph, parts, &s, &t));
        }
        best
    }

    #[test]
    fn empty_graph_is_one_part_with_zero_defect() {
        let g = Graph::new(9);
        let p = pseudoregular_partition(&g, 0.1, 0.1, 0).unwrap();
        assert_eq!(p.k(), 1);
        assert_eq!(p.defect, 0.0);
    }

    #[test]
    fn complete_graph_single_part_defect_is_at_most_one_over_n() {
        for n in 2..=10 {
            let g = complete(n);
            let p = pseudoregular_partition(&g, 0.5, 0.1, 0).unwrap();
            assert_eq!(p.k(), 1);
            assert!((p.density(0, 0) - (1.0 - 1.0 / n as f64)).abs() < 1e-12);
            let brute = brute_defect(&g, &p.parts);
            assert!((brute - p.defect).abs() < 1e-12);
            assert!(brute <= 1.0 / n as f64 + 1e-12);
        }
    }

    #[test]
    fn exact_defect_matches_three_way_enumeration() {
        for seed in 0..6 {
            let g = random_graph(7, 0.5, seed);
            let parts = vec![vec![0, 1, 2, 3], vec![4, 5, 6]];
            assert!((exact_defect(&g, &parts) - brute_defect(&g, &parts)).abs() < 1e-12);
        }
    }

    #[test]
    fn random_graph_reaches_target() {
        let g = random_graph(20, 0.5, 1);
        let cfg = PartitionConfig {
            exact_limit: 20,
            ..PartitionConfig::default()
        };
        let p = pseudoregular_partition_with(&g, 0.25, 0.1, 1, &cfg).unwrap();
        assert!(p.exact);
        assert!(p.defect <= 0.25);
        // independent recomputation
        assert!(exact_defect(&g, &p.parts) <= 0.25 + 1e-12);
    }

    #[test]
    fn estimator_never_exceeds_exact_value() {
        for seed in 0..4 {
            let g = random_graph(12, 0.4, seed);
            let parts = chunk(&(0..12).collect::<Vec<_>>(), 2);
            let d = densities(&g, &parts);
            let w = weight_matrix(&g, &parts, &d);
            let mut r = rng::stream(seed, 0);
            let est = estimate(&w, 12, 32, &mut r).0;
            let exact = exact_defect(&g, &parts);
            assert!(est <= exact + 1e-12);
            assert!(est >= 0.5 * exact, "estimate {est} far below exact {exact}");
        }
    }

    #[test]
    fn part_cap_is_reported() {
        let g = random_graph(16, 0.5, 3);
        let cfg = PartitionConfig {
            max_parts: 1,
            ..PartitionConfig::default()
        };
        assert!(matches!(
            pseudoregular_partition_with(&g, 0.001, 0.1, 0, &cfg),
            Err(Error::PartBudgetExceeded { cap: 1 })
        ));
    }

    #[test]
    fn refinement_examples() {
        let single = vec![vec![0, 1, 2, 3]];
        assert_eq!(refine_partitions(&single, &single).unwrap(), single);
        let ab = vec![vec![0, 1], vec![2, 3]];
        assert_eq!(refine_partitions(&ab, &ab).unwrap(), ab);
        let cross = vec![vec![0, 2], vec![1, 3]];
        assert_eq!(
            refine_partitions(&ab, &cross).unwrap(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        assert!(matches!(
            refine_partitions(&ab, &[vec![0, 1, 2]]),
            Err(Error::GroundSetMismatch)
        ));
    }

    proptest! {
        #[test]
        fn partitions_are_equitable(n in 1usize..26, p in 0.0f64..1.0, seed in 0u64..1000, eps in 0.02f64..0.5) {
            let g = random_graph(n, p, seed);
            let (part, _) = partition_best_effort(&g, eps, 0.1, seed, &PartitionConfig::default()).unwrap();
            let sizes: Vec<usize> = part.parts.iter().map(|p| p.len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let mut all: Vec<usize> = part.parts.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn refinement_is_bounded_and_covers(a in prop::collection::vec(0usize..3, 1..12), b in prop::collection::vec(0usize..3, 12)) {
            let n = a.len();
            let group = |lab: &[usize]| -> Vec<Vec<usize>> {
                (0..3).map(|g| (0..n).filter(|&v| lab[v] == g).collect::<Vec<_>>()).filter(|p: &Vec<usize>| !p.is_empty()).collect()
            };
            let p1 = group(&a);
            let p2 = group(&b[..n]);
            let r = refine_partitions(&p1, &p2).unwrap();
            prop_assert!(r.len() <= p1.len() * p2.len());
            let mut all: Vec<usize> = r.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
