//! Simple undirected graphs on `0..n` and the hop metric of the
//! similarity graph.

use std::collections::VecDeque;

use crate::instance::Instance;

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a != b && a < n && b < n, "bad edge ({a}, {b})");
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut edges = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edges += list.len();
        }
        Graph {
            adj,
            edges: edges / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, in order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.n()).collect();
        self.components_within(&all)
    }

    /// Components of the subgraph induced on `members`.
    pub fn components_within(&self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.n()];
        for &v in members {
            inside[v] = true;
        }
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for &s in &sorted {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if inside[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// BFS hop counts from `source`; `usize::MAX` when unreachable.
    pub fn hops_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Subgraph induced on `members` (re-indexed in the given order).
    pub fn induced(&self, members: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in members.iter().enumerate() {
            local[v] = i;
        }
        let edges = members.iter().enumerate().flat_map(|(i, &v)| {
            let local = &local;
            self.adj[v].iter().filter_map(move |&w| {
                let j = local[w];
                (j != usize::MAX && j > i).then_some((i, j))
            })
        });
        Graph::from_edges(members.len(), edges.collect::<Vec<_>>())
    }

    /// Copy of the graph without the listed edges.
    pub fn without_edges(&self, removed: &[(usize, usize)]) -> Graph {
        let mut drop: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
        for &(a, b) in removed {
            drop.insert((a.min(b), a.max(b)));
        }
        Graph::from_edges(
            self.n(),
            self.edges()
                .filter(|e| !drop.contains(e))
                .collect::<Vec<_>>(),
        )
    }
}

/// The metric `ρ_S`: hop distance in the similarity graph times `u`.
#[derive(Clone, Debug)]
pub struct SimilarityMetric {
    graph: Graph,
    u: f64,
    hops: Vec<usize>,
}

impl SimilarityMetric {
    pub fn new(inst: &Instance) -> Self {
        Self::from_graph(inst.similarity_graph(), inst.u())
    }

    pub fn from_graph(graph: Graph, u: f64) -> Self {
        let n = graph.n();
        let mut hops = Vec::with_capacity(n * n);
        for s in 0..n {
            hops.extend(graph.hops_from(s));
        }
        SimilarityMetric { graph, u, hops }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn hops(&self, a: usize, b: usize) -> usize {
        self.hops[a * self.n() + b]
    }

    /// `ρ_S(a, b)`, infinite across components.
    pub fn rho(&self, a: usize, b: usize) -> f64 {
        match self.hops(a, b) {
            usize::MAX => f64::INFINITY,
            h => h as f64 * self.u,
        }
    }

    /// Largest `ρ_S` distance inside `members`.
    pub fn diameter_of(&self, members: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for &a in members {
            for &b in members {
                best = best.max(self.rho(a, b));
            }
        }
        best
    }
}
