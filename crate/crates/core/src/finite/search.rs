//! Count-table search over a finite host.
//!
//! Objects are grouped into parts of the refined pseudoregular partition.
//! Each part is cut into units of `granularity` objects; a count table says
//! how many units of each part go to each point. Tables are enumerated as
//! depth-first placements of units where points within a part never
//! decrease, so every table is visited once and realized by filling parts
//! in order. Children are tried best-first and pruned against the best
//! complete assignment so far; with an unlimited budget the search is
//! exhaustive over tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::pseudoregular::{partition_best_effort, refine_partitions, PartitionConfig};
use super::{FiniteMetric, SearchHost};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::evaluation::DEFAULT_TOLERANCE;
use crate::graph::Graph;
use crate::instance::{ConstraintKind, Instance};
use crate::rng;

/// Search limits.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Maximum number of unit placements explored after the first complete
    /// descent.
    pub budget: u64,
    /// Expand only this many best children per node; `None` expands all.
    pub branching: Option<usize>,
    /// Candidate points for the first unit; `None` means every point.
    pub anchor: Option<Vec<usize>>,
    /// Object whose part is placed first; `None` picks the highest-degree
    /// object of the similarity graph.
    pub start: Option<usize>,
    pub partition: PartitionConfig,
    /// Failure probability handed to the partitioner.
    pub delta: f64,
    pub seed: u64,
}

impl SearchOptions {
    /// Unlimited search: every count table is considered.
    pub fn exhaustive() -> Self {
        SearchOptions {
            budget: u64::MAX,
            branching: None,
            anchor: None,
            start: None,
            partition: PartitionConfig::default(),
            delta: 0.1,
            seed: 0,
        }
    }

    pub fn with_budget(budget: u64) -> Self {
        SearchOptions {
            budget,
            ..Self::exhaustive()
        }
    }
}

/// `entries[(point, part)]` = number of units of `part` placed on `point`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub entries: BTreeMap<(usize, usize), usize>,
    pub granularity: usize,
}

/// Result of the search.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteEmbedding {
    /// Host point of each object of the sub-instance.
    pub assignment: Vec<usize>,
    pub satisfied: usize,
    pub total: usize,
    pub accuracy: f64,
    pub table: CountTable,
    pub parts: Vec<Vec<usize>>,
    /// Objects left outside every unit and placed greedily.
    pub leftovers: Vec<usize>,
    pub nodes: u64,
    /// False when the budget stopped the search early.
    pub complete: bool,
    /// False when the part cap stopped the partitioner before its target.
    pub partition_reached: bool,
}

/// Searches `host` for a good `(1+eps_prime)`-embedding of `sub` and wraps it
/// as an embedding into the finite metric.
pub fn embed_into_finite_metric(
    sub: &Instance,
    host: &FiniteMetric,
    epsilon: f64,
    eps_prime: f64,
    opts: &SearchOptions,
) -> Result<(Embedding, FiniteEmbedding)> {
    let found = embed_with_host(sub, host, epsilon, eps_prime, opts)?;
    let emb = Embedding::finite(
        sub.objects().to_vec(),
        host.clone(),
        found.assignment.clone(),
    )?;
    Ok((emb, found))
}

/// Host-generic search.
pub fn embed_with_host<H: SearchHost + ?Sized>(
    sub: &Instance,
    host: &H,
    epsilon: f64,
    eps_prime: f64,
    opts: &SearchOptions,
) -> Result<FiniteEmbedding> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if !(eps_prime >= 0.0 && eps_prime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps_prime must be nonnegative, got {eps_prime}"
        )));
    }
    let m = host.len();
    if m == 0 {
        return Err(Error::InvalidMetric("host has no points".into()));
    }
    if let Some(anchor) = &opts.anchor {
        if anchor.is_empty() || anchor.iter().any(|&p| p >= m) {
            return Err(Error::InvalidParameter(
                "anchor points must be nonempty host points".into(),
            ));
        }
    }
    let n = sub.n();
    if opts.start.is_some_and(|s| s >= n) {
        return Err(Error::InvalidParameter(
            "start object is out of range".into(),
        ));
    }

    // partitions of the similar and dissimilar graphs, then their refinement
    let c1 = (epsilon / (8.0 * (m * m) as f64)).min(1.0);
    let hs = sub.similarity_graph();
    let hd = Graph::from_edges(n, sub.dissimilar().iter().copied());
    let (ps, ok_s) = partition_best_effort(
        &hs,
        c1,
        opts.delta,
        rng::derive_seed(opts.seed, 1),
        &opts.partition,
    )?;
    let (pd, ok_d) = partition_best_effort(
        &hd,
        c1,
        opts.delta,
        rng::derive_seed(opts.seed, 2),
        &opts.partition,
    )?;
    let mut parts = if n == 0 {
        Vec::new()
    } else {
        refine_partitions(&ps.parts, &pd.parts)?
    };
    let k = ps.k().max(pd.k()).max(1);
    let c2 = epsilon * n as f64 / (8.0 * (m * m) as f64 * (k as f64).powi(4));
    let granularity = (c2.floor() as usize).max(1);

    order_parts(&mut parts, &hs, opts.start);
    let mut units: Vec<Unit> = Vec::new();
    let mut leftovers = Vec::new();
    for (pi, part) in parts.iter().enumerate() {
        let full = part.len() / granularity;
        for c in 0..full {
            units.push(Unit {
                part: pi,
                objects: part[c * granularity..(c + 1) * granularity].to_vec(),
            });
        }
        leftovers.extend_from_slice(&part[full * granularity..]);
    }

    let c = 1.0 + eps_prime;
    let near = sub.u() * c + DEFAULT_TOLERANCE;
    let far = sub.l() / c - DEFAULT_TOLERANCE;
    let mut labeled: Vec<Vec<(usize, ConstraintKind)>> = vec![Vec::new(); n];
    for (a, b, kind) in sub.constraints() {
        labeled[a].push((b, kind));
        labeled[b].push((a, kind));
    }
    // constraints not yet decided once units[..i] are placed
    let mut placed_at = vec![usize::MAX; n];
    for (i, unit) in units.iter().enumerate() {
        for &o in &unit.objects {
            placed_at[o] = i;
        }
    }
    let mut open_after = vec![0usize; units.len() + 1];
    for (a, b, _) in sub.constraints() {
        let last = placed_at[a].max(placed_at[b]);
        // pairs touching a leftover stay open until the end
        let upto = if last == usize::MAX {
            units.len()
        } else {
            last
        };
        for slot in open_after.iter_mut().take(upto + 1) {
            *slot += 1;
        }
    }

    let total = sub.num_constraints();
    let mut search = Search {
        host,
        units: &units,
        leftovers: &leftovers,
        labeled: &labeled,
        open_after: &open_after,
        near,
        far,
        opts,
        pos: vec![usize::MAX; n],
        unit_point: vec![usize::MAX; units.len()],
        best: None,
        nodes: 0,
        stopped: false,
    };
    search.descend(0, 0);
    let complete = !search.stopped;
    let nodes = search.nodes;
    let (satisfied, assignment, unit_point) =
        search.best.take().expect("at least one leaf is reached");

    let mut entries = BTreeMap::new();
    for (unit, &p) in units.iter().zip(&unit_point) {
        *entries.entry((p, unit.part)).or_insert(0) += 1;
    }
    let accuracy = if total == 0 {
        1.0
    } else {
        satisfied as f64 / total as f64
    };
    Ok(FiniteEmbedding {
        assignment,
        satisfied,
        total,
        accuracy,
        table: CountTable {
            entries,
            granularity,
        },
        parts,
        leftovers,
        nodes,
        complete,
        partition_reached: ok_s && ok_d,
    })
}

struct Unit {
    part: usize,
    objects: Vec<usize>,
}

/// Orders parts so each part tends to follow parts it shares similar edges
/// with: breadth-first over the similarity graph from its highest-degree
/// vertex (or `start`), parts ranked by the first time one of their members
/// is reached.
fn order_parts(parts: &mut [Vec<usize>], hs: &Graph, start: Option<usize>) {
    let n = hs.n();
    if n == 0 {
        return;
    }
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(hs.degree(v)), v));
    if let Some(s) = start {
        by_degree.retain(|&v| v != s);
        by_degree.insert(0, s);
    }
    for &s in &by_degree {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = next;
        next += 1;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in hs.neighbors(v) {
                if rank[w] == usize::MAX {
                    rank[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    for part in parts.iter_mut() {
        part.sort_by_key(|&v| (rank[v], v));
    }
    parts.sort_by_key(|p| rank[p[0]]);
}

struct Search<'a, H: SearchHost + ?Sized> {
    host: &'a H,
    units: &'a [Unit],
    leftovers: &'a [usize],
    labeled: &'a [Vec<(usize, ConstraintKind)>],
    open_after: &'a [usize],
    near: f64,
    far: f64,
    opts: &'a SearchOptions,
    pos: Vec<usize>,
    unit_point: Vec<usize>,
    best: Option<(usize, Vec<usize>, Vec<usize>)>,
    nodes: u64,
    stopped: bool,
}

impl<H: SearchHost + ?Sized> Search<'_, H> {
    #[inline]
    fn sat(&self, kind: ConstraintKind, p: usize, q: usize) -> bool {
        match kind {
            ConstraintKind::Similar => p == q || self.host.within(p, q, self.near),
            ConstraintKind::Dissimilar => p != q && self.host.beyond(p, q, self.far),
        }
    }

    /// Constraints decided by putting `objects` on `p`: pairs with placed
    /// objects plus pairs inside the group.
    fn gain(&self, objects: &[usize], p: usize) -> usize {
        let mut g = 0;
        for (i, &o) in objects.iter().enumerate() {
            for &(y, kind) in &self.labeled[o] {
                let q = self.pos[y];
                if q != usize::MAX {
                    g += usize::from(self.sat(kind, p, q));
                } else if kind == ConstraintKind::Similar && objects[..i].contains(&y) {
                    g += 1;
                }
            }
        }
        g
    }

    fn best_score(&self) -> Option<usize> {
        self.best.as_ref().map(|b| b.0)
    }

    fn descend(&mut self, depth: usize, score: usize) {
        if depth == self.units.len() {
            self.finish(score);
            return;
        }
        let unit = &self.units[depth];
        let floor = if depth > 0 && self.units[depth - 1].part == unit.part {
            self.unit_point[depth - 1]
        } else {
            0
        };
        let mut candidates: Vec<(usize, usize)> = match (&self.opts.anchor, depth) {
            (Some(anchor), 0) => anchor
                .iter()
                .map(|&p| (self.gain(&unit.objects, p), p))
                .collect(),
            _ => (floor..self.host.len())
                .map(|p| (self.gain(&unit.objects, p), p))
                .collect(),
        };
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        if let Some(b) = self.opts.branching {
            candidates.truncate(b.max(1));
        }
        let open = self.open_after[depth + 1];
        for (g, p) in candidates {
            if self.stopped {
                return;
            }
            if let Some(best) = self.best_score() {
                if score + g + open <= best {
                    // children are sorted by gain, so the rest cannot do better either
                    break;
                }
            }
            // the first descent always completes so there is a leaf to return
            if self.nodes >= self.opts.budget && self.best.is_some() {
                self.stopped = true;
                return;
            }
            self.nodes += 1;
            for &o in &self.units[depth].objects {
                self.pos[o] = p;
            }
            self.unit_point[depth] = p;
            self.descend(depth + 1, score + g);
            for &o in &self.units[depth].objects {
                self.pos[o] = usize::MAX;
            }
        }
    }

    /// Places leftovers greedily and records the leaf if it beats the best.
    fn finish(&mut self, mut score: usize) {
        let mut placed = Vec::with_capacity(self.leftovers.len());
        for &o in self.leftovers {
            let mut top = (0, 0);
            for p in 0..self.host.len() {
                let g = self.gain(&[o], p);
                if g > top.0 || p == 0 {
                    top = (g, p);
                }
            }
            self.pos[o] = top.1;
            score += top.0;
            placed.push(o);
        }
        if self.best_score().is_none_or(|b| score > b) {
            self.best = Some((score, self.pos.clone(), self.unit_point.clone()));
        }
        for o in placed {
            self.pos[o] = usize::MAX;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::accuracy;

    fn two_points(d: f64) -> FiniteMetric {
        FiniteMetric::new(
            vec!["p".into(), "q".into()],
            vec![vec![0.0, d], vec![d, 0.0]],
        )
        .unwrap()
    }

    fn inst(n: usize, similar: &[(usize, usize)], u: f64, l: f64) -> Instance {
        let objects: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
        let s: std::collections::BTreeSet<_> = similar.iter().copied().collect();
        let d = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|p| !s.contains(p))
            .collect();
        Instance::from_parts(objects, s, d, u, l)
    }

    #[test]
    fn single_point_host_forces_everything_together() {
        let host = FiniteMetric::new(vec!["p".into()], vec![vec![0.0]]).unwrap();
        let sub = inst(4, &[(0, 1), (2, 3)], 1.0, 2.0);
        let (emb, found) =
            embed_into_finite_metric(&sub, &host, 0.25, 0.5, &SearchOptions::exhaustive()).unwrap();
        assert_eq!(found.assignment, vec![0; 4]);
        assert!((found.accuracy - 2.0 / 6.0).abs() < 1e-12);
        assert_eq!(accuracy(&sub, &emb, 1.5).unwrap().accuracy, found.accuracy);
    }

    #[test]
    fn dissimilar_pair_is_split() {
        let sub = inst(2, &[], 1.0, 2.0);
        let (emb, found) = embed_into_finite_metric(
            &sub,
            &two_points(2.0),
            0.25,
            0.0,
            &SearchOptions::exhaustive(),
        )
        .unwrap();
        assert_ne!(found.assignment[0], found.assignment[1]);
        assert_eq!(accuracy(&sub, &emb, 1.0).unwrap().accuracy, 1.0);
    }

    #[test]
    fn empty_instance_is_fine() {
        let sub = inst(0, &[], 1.0, 2.0);
        let found = embed_with_host(
            &sub,
            &two_points(1.0),
            0.25,
            0.5,
            &SearchOptions::exhaustive(),
        )
        .unwrap();
        assert!(found.assignment.is_empty());
        assert_eq!(found.accuracy, 1.0);
    }

    #[test]
    fn count_table_matches_assignment() {
        let sub = inst(6, &[(0, 1), (1, 2), (3, 4)], 1.0, 2.0);
        let host = FiniteMetric::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let found = embed_with_host(&sub, &host, 0.25, 0.0, &SearchOptions::exhaustive()).unwrap();
        let g = found.table.granularity;
        for (pi, part) in found.parts.iter().enumerate() {
            for p in 0..3 {
                let realized = part
                    .iter()
                    .filter(|&&o| found.assignment[o] == p && !found.leftovers.contains(&o))
                    .count();
                let table = found.table.entries.get(&(p, pi)).copied().unwrap_or(0);
                assert_eq!(realized, table * g);
            }
        }
        assert!(found.complete);
    }

    #[test]
    fn budget_stops_early_and_reports_it() {
        let sub = inst(6, &[(0, 1), (1, 2), (3, 4)], 1.0, 2.0);
        let host = two_points(2.0);
        let found =
            embed_with_host(&sub, &host, 0.25, 0.0, &SearchOptions::with_budget(0)).unwrap();
        assert_eq!(found.nodes, 6, "only the first descent runs");
        assert_eq!(found.assignment.len(), 6);
        let full = embed_with_host(&sub, &host, 0.25, 0.0, &SearchOptions::exhaustive()).unwrap();
        assert!(full.complete);
        assert!(full.satisfied >= found.satisfied);
    }
}
