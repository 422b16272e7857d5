//! Brute-force references for small instances.
//!
//! Everything here computes distances and checks thresholds on its own so
//! that agreement with the learners means something.

use rayon::prelude::*;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::finite::FiniteMetric;
use crate::instance::{ConstraintKind, Instance};
use crate::tree::CanonicalTree;
use crate::tree_metric::TreeMetric;

/// Default cap on enumerated assignments.
pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

/// Largest instance [`brute_force_line_feasible`] accepts.
pub const LINE_ORACLE_LIMIT: usize = 8;

const TOL: f64 = 1e-9;

/// An optimal assignment and its score.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub embedding: Embedding,
    pub satisfied: usize,
    pub total: usize,
    pub accuracy: f64,
}

fn holds(kind: ConstraintKind, d: f64, u: f64, l: f64, c: f64) -> bool {
    match kind {
        ConstraintKind::Similar => d <= u * c + TOL,
        ConstraintKind::Dissimilar => d >= l / c - TOL,
    }
}

/// Best assignment of the objects to points of `host` at distortion `c`,
/// the lexicographically first among ties.
pub fn brute_force_finite(inst: &Instance, host: &FiniteMetric, c: f64) -> Result<OracleResult> {
    brute_force_finite_with(inst, host, c, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_finite_with(
    inst: &Instance,
    host: &FiniteMetric,
    c: f64,
    cap: u64,
) -> Result<OracleResult> {
    let doc = host.to_document();
    let (satisfied, assignment) = enumerate(inst, &doc.matrix, c, cap)?;
    let total = inst.num_constraints();
    let embedding = Embedding::finite(inst.objects().to_vec(), host.clone(), assignment)?;
    Ok(OracleResult {
        embedding,
        satisfied,
        total,
        accuracy: ratio(satisfied, total),
    })
}

/// Best embedding into the canonical tree `T_{α,k,k'}` at distortion `c`.
pub fn brute_force_tree_small(
    inst: &Instance,
    alpha: f64,
    k: usize,
    k_prime: usize,
    c: f64,
) -> Result<OracleResult> {
    let shape = CanonicalTree::new(alpha, k, k_prime)?;
    let needed = shape.vertex_count().powi(inst.n() as i32);
    if needed > DEFAULT_ORACLE_CAP as f64 {
        return Err(Error::OracleBudgetExceeded {
            needed,
            cap: DEFAULT_ORACLE_CAP,
        });
    }
    let tree = shape.materialize(DEFAULT_ORACLE_CAP as usize)?;
    let matrix = tree_distances(&tree);
    let (satisfied, assignment) = enumerate(inst, &matrix, c, DEFAULT_ORACLE_CAP)?;
    let total = inst.num_constraints();
    let embedding = Embedding::tree(inst.objects().to_vec(), tree, assignment)?;
    Ok(OracleResult {
        embedding,
        satisfied,
        total,
        accuracy: ratio(satisfied, total),
    })
}

fn ratio(satisfied: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        satisfied as f64 / total as f64
    }
}

/// All-pairs distances by Floyd–Warshall over the edge list.
fn tree_distances(tree: &TreeMetric) -> Vec<Vec<f64>> {
    let m = tree.len();
    let mut d = vec![vec![f64::INFINITY; m]; m];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in tree.edges() {
        d[a][b] = w;
        d[b][a] = w;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Exhaustive search; work is split on the first object's point.
fn enumerate(
    inst: &Instance,
    matrix: &[Vec<f64>],
    c: f64,
    cap: u64,
) -> Result<(usize, Vec<usize>)> {
    if c.is_nan() || c < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "distortion must be at least 1, got {c}"
        )));
    }
    let n = inst.n();
    let m = matrix.len();
    let needed = (m as f64).powi(n as i32);
    if needed > cap as f64 {
        return Err(Error::OracleBudgetExceeded { needed, cap });
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    // constraints toward earlier objects, per object
    let mut back: Vec<Vec<(usize, ConstraintKind)>> = vec![Vec::new(); n];
    for (a, b, kind) in inst.constraints() {
        back[a.max(b)].push((a.min(b), kind));
    }
    let (u, l) = (inst.u(), inst.l());
    let best = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut a = vec![0usize; n];
            a[0] = first;
            let mut best = None;
            dfs(1, 0, &mut a, &mut best, &back, matrix, u, l, c);
            best.expect("every branch reaches a leaf")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|x, y| if y.0 > x.0 { y } else { x })
        .expect("at least one point");
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    i: usize,
    score: usize,
    a: &mut [usize],
    best: &mut Option<(usize, Vec<usize>)>,
    back: &[Vec<(usize, ConstraintKind)>],
    matrix: &[Vec<f64>],
    u: f64,
    l: f64,
    c: f64,
) {
    if i == a.len() {
        // strict improvement keeps the lexicographically first optimum
        if best.as_ref().is_none_or(|b| score > b.0) {
            *best = Some((score, a.to_vec()));
        }
        return;
    }
    for p in 0..matrix.len() {
        a[i] = p;
        let gain = back[i]
            .iter()
            .filter(|&&(j, kind)| holds(kind, matrix[p][a[j]], u, l, c))
            .count();
        dfs(i + 1, score + gain, a, best, back, matrix, u, l, c);
    }
}

/// Tries every ordering of the objects and returns a perfect line embedding
/// at distortion 1 if any exists.
pub fn brute_force_line_feasible(inst: &Instance) -> Result<Option<Embedding>> {
    let n = inst.n();
    if n > LINE_ORACLE_LIMIT {
        let needed = (1..=n).map(|i| i as f64).product();
        return Err(Error::OracleBudgetExceeded {
            needed,
            cap: 40_320,
        });
    }
    if n == 0 {
        return Ok(Some(Embedding::line(Vec::new(), Vec::new())?));
    }
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        if let Some(x) = solve_order(inst, &order) {
            return Ok(Some(Embedding::line(inst.objects().to_vec(), x)?));
        }
        if !next_permutation(&mut order) {
            return Ok(None);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Positions in the given left-to-right order satisfying every constraint,
/// from the difference system `x_j − x_i ≤ w` solved by Floyd–Warshall.
fn solve_order(inst: &Instance, order: &[usize]) -> Option<Vec<f64>> {
    let n = order.len();
    let mut rank = vec![0; n];
    for (r, &o) in order.iter().enumerate() {
        rank[o] = r;
    }
    // w[i][j] bounds x_j − x_i from above
    let mut w = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let mut tighten = |i: usize, j: usize, bound: f64| {
        if bound < w[i][j] {
            w[i][j] = bound;
        }
    };
    for pair in order.windows(2) {
        // x_left − x_right ≤ 0
        tighten(pair[1], pair[0], 0.0);
    }
    for (a, b, kind) in inst.constraints() {
        let (lo, hi) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
        match kind {
            ConstraintKind::Similar => tighten(lo, hi, inst.u()),
            ConstraintKind::Dissimilar => tighten(hi, lo, -inst.l()),
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k] + w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    if (0..n).any(|i| w[i][i] < -TOL) {
        return None;
    }
    // x_j = min over sources of the shortest path, shifted to start at 0
    let x: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| w[i][j]).fold(0.0, f64::min))
        .collect();
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    Some(x.into_iter().map(|v| v - lo).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Host;
    use crate::evaluation::accuracy;
    use crate::instance::generate_planted;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("o{i}")).collect()
    }

    fn pairs(objects: &[String], p: &[(usize, usize)]) -> Vec<(String, String)> {
        p.iter()
            .map(|&(a, b)| (objects[a].clone(), objects[b].clone()))
            .collect()
    }

    #[test]
    fn single_object_finite() {
        let host = FiniteMetric::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let o = ids(1);
        let inst = Instance::new(o, Vec::new(), Vec::new(), 1.0, 2.0).unwrap();
        let r = brute_force_finite(&inst, &host, 1.0).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn dissimilar_pair_on_two_points() {
        let host = FiniteMetric::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
        )
        .unwrap();
        let o = ids(2);
        let inst = Instance::new(o.clone(), Vec::new(), pairs(&o, &[(0, 1)]), 1.0, 2.0).unwrap();
        let r = brute_force_finite(&inst, &host, 1.0).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(accuracy(&inst, &r.embedding, 1.0).unwrap().accuracy, 1.0);
    }

    #[test]
    fn ties_go_to_the_lexicographically_first_assignment() {
        let host = FiniteMetric::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
        )
        .unwrap();
        let o = ids(2);
        let inst = Instance::new(o.clone(), pairs(&o, &[(0, 1)]), Vec::new(), 1.0, 2.0).unwrap();
        let r = brute_force_finite(&inst, &host, 1.0).unwrap();
        let crate::embedding::Placement::Finite { points, .. } = r.embedding.placement() else {
            panic!()
        };
        assert_eq!(points, &vec![0, 0]);
    }

    #[test]
    fn budget_is_enforced() {
        let host = FiniteMetric::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
        )
        .unwrap();
        let inst = Instance::new(ids(30), Vec::new(), Vec::new(), 1.0, 2.0).unwrap();
        assert!(matches!(
            brute_force_finite(&inst, &host, 1.0),
            Err(Error::OracleBudgetExceeded { .. })
        ));
    }

    #[test]
    fn planted_line_has_a_witness() {
        let (inst, _) = generate_planted(Host::Line, 5, 1.0, 2.0, 0.0, 3).unwrap();
        let emb = brute_force_line_feasible(&inst).unwrap().expect("feasible");
        assert_eq!(accuracy(&inst, &emb, 1.0).unwrap().accuracy, 1.0);
    }

    #[test]
    fn long_similar_chain_cannot_stretch() {
        // a−b−c−d similar, a,d dissimilar with l > 3u
        let o = ids(4);
        let s = pairs(&o, &[(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]);
        let d = pairs(&o, &[(0, 3)]);
        let inst = Instance::new(o, s, d, 1.0, 3.5).unwrap();
        assert!(brute_force_line_feasible(&inst).unwrap().is_none());
    }

    #[test]
    fn single_object_line() {
        let inst = Instance::new(ids(1), Vec::new(), Vec::new(), 1.0, 2.0).unwrap();
        let emb = brute_force_line_feasible(&inst).unwrap().unwrap();
        let crate::embedding::Placement::Line(x) = emb.placement() else {
            panic!()
        };
        assert_eq!(x, &vec![0.0]);
    }

    #[test]
    fn too_many_objects_for_orderings() {
        let inst = Instance::new(ids(9), Vec::new(), Vec::new(), 1.0, 2.0).unwrap();
        assert!(matches!(
            brute_force_line_feasible(&inst),
            Err(Error::OracleBudgetExceeded { .. })
        ));
    }

    #[test]
    fn flat_tree_puts_everything_together() {
        let o = ids(4);
        let inst = Instance::new(
            o.clone(),
            pairs(&o, &[(0, 1)]),
            pairs(&o, &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            1.0,
            2.0,
        )
        .unwrap();
        let r = brute_force_tree_small(&inst, 1.0, 0, 2, 1.0).unwrap();
        assert!((r.accuracy - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn tree_separates_a_dissimilar_pair() {
        let o = ids(2);
        let inst = Instance::new(o.clone(), Vec::new(), pairs(&o, &[(0, 1)]), 1.0, 2.0).unwrap();
        let r = brute_force_tree_small(&inst, 1.0, 1, 2, 1.0).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn permutations_are_all_visited() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }
}
