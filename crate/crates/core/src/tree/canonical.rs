//! Canonical trees and the search for embeddings into them.
//!
//! `T_{α,k,k'}` is the full `k'`-ary tree of depth `k` with every edge of
//! length `α`. Small ones are materialized and handed to the count-table
//! search. Large ones are searched implicitly: the first object sits at the
//! root and every later object goes either onto a vertex of the subtree
//! spanned so far or `m` levels down a fresh branch below one. Fresh
//! branches are interchangeable under automorphisms that fix the spanned
//! subtree, so this visits every vertex up to symmetry, with `m` capped
//! where further descent no longer changes any decision.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::evaluation::DEFAULT_TOLERANCE;
use crate::finite::{embed_into_finite_metric, FiniteMetric, SearchOptions};
use crate::instance::{ConstraintKind, Instance};
use crate::rng;
use crate::tree_metric::TreeMetric;

/// Shape of a canonical tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalTree {
    pub alpha: f64,
    pub depth: usize,
    pub arity: usize,
}

impl CanonicalTree {
    pub fn new(alpha: f64, depth: usize, arity: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "edge length must be positive, got {alpha}"
            )));
        }
        if arity == 0 {
            return Err(Error::InvalidParameter("arity must be at least 1".into()));
        }
        Ok(CanonicalTree {
            alpha,
            depth,
            arity,
        })
    }

    /// Number of vertices; may be infinite in floating point.
    pub fn vertex_count(&self) -> f64 {
        if self.arity == 1 {
            (self.depth + 1) as f64
        } else {
            let k = self.arity as f64;
            (k.powf(self.depth as f64 + 1.0) - 1.0) / (k - 1.0)
        }
    }

    /// Builds the tree explicitly. Vertices are named by their child-index
    /// paths from the root `r` and listed breadth first.
    pub fn materialize(&self, cap: usize) -> Result<TreeMetric> {
        let count = self.vertex_count();
        if count > cap as f64 {
            return Err(Error::SizeBudgetExceeded {
                vertices: count,
                cap,
            });
        }
        let mut names = vec!["r".to_string()];
        let mut edges = Vec::with_capacity(count as usize);
        let mut level = vec![0usize];
        for _ in 0..self.depth {
            let mut next = Vec::with_capacity(level.len() * self.arity);
            for &p in &level {
                for c in 0..self.arity {
                    let id = names.len();
                    names.push(format!("{}.{c}", names[p]));
                    edges.push((p, id, self.alpha));
                    next.push(id);
                }
            }
            level = next;
        }
        TreeMetric::from_indexed(names, edges, 0)
    }
}

/// `T_{α,k,k'}` as an explicit tree, refused above `cap` vertices.
pub fn canonical_tree(alpha: f64, k: usize, k_prime: usize, cap: usize) -> Result<TreeMetric> {
    CanonicalTree::new(alpha, k, k_prime)?.materialize(cap)
}

/// Limits of [`embed_into_canonical_tree`].
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSearchOptions {
    /// Search nodes after the first complete descent.
    pub budget: u64,
    pub branching: Option<usize>,
    /// Object placed first (at the root in the implicit search).
    pub start: Option<usize>,
    /// Trees up to this many vertices are materialized.
    pub explicit_limit: usize,
    /// Largest subtree the implicit search may span.
    pub size_budget: usize,
    pub seed: u64,
}

impl Default for TreeSearchOptions {
    fn default() -> Self {
        TreeSearchOptions {
            budget: u64::MAX,
            branching: None,
            start: None,
            explicit_limit: 4096,
            size_budget: 100_000,
            seed: 0,
        }
    }
}

/// Embedding of a cluster into (a subtree of) a canonical tree.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalEmbedding {
    /// Over the materialized tree, or the spanned subtree when implicit.
    pub embedding: Embedding,
    pub satisfied: usize,
    pub total: usize,
    pub accuracy: f64,
    pub nodes: u64,
    pub complete: bool,
    /// Vertices of the tree the embedding lives in.
    pub host_size: usize,
    pub implicit: bool,
}

/// Searches for a `(1+eps_prime)`-embedding of `sub` into `tree`.
pub fn embed_into_canonical_tree(
    sub: &Instance,
    tree: &CanonicalTree,
    epsilon: f64,
    eps_prime: f64,
    opts: &TreeSearchOptions,
) -> Result<CanonicalEmbedding> {
    if !(eps_prime >= 0.0 && eps_prime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps_prime must be nonnegative, got {eps_prime}"
        )));
    }
    if sub.n() == 0 {
        return Err(Error::InvalidInstance("no objects".into()));
    }
    if opts.start.is_some_and(|s| s >= sub.n()) {
        return Err(Error::InvalidParameter(
            "start object is out of range".into(),
        ));
    }
    if tree.vertex_count() <= opts.explicit_limit as f64 {
        let t = tree.materialize(opts.explicit_limit)?;
        let mut flat = Vec::with_capacity(t.len() * t.len());
        for v in 0..t.len() {
            flat.extend(t.distances_from(v));
        }
        let host = FiniteMetric::from_trusted(t.vertices().to_vec(), flat);
        let search = SearchOptions {
            budget: opts.budget,
            branching: opts.branching,
            start: opts.start,
            seed: opts.seed,
            ..SearchOptions::exhaustive()
        };
        let (_, found) = embed_into_finite_metric(sub, &host, epsilon, eps_prime, &search)?;
        let host_size = t.len();
        let embedding = Embedding::tree(sub.objects().to_vec(), t, found.assignment)?;
        return Ok(CanonicalEmbedding {
            embedding,
            satisfied: found.satisfied,
            total: found.total,
            accuracy: found.accuracy,
            nodes: found.nodes,
            complete: found.complete,
            host_size,
            implicit: false,
        });
    }
    implicit_search(sub, tree, eps_prime, opts)
}

/// Subtree spanned so far; nodes are appended after their parents.
#[derive(Clone, Debug)]
struct Trie {
    parent: Vec<usize>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl Trie {
    fn new() -> Self {
        Trie {
            parent: vec![usize::MAX],
            depth: vec![0],
            children: vec![Vec::new()],
        }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn push(&mut self, p: usize) -> usize {
        let id = self.len();
        self.parent.push(p);
        self.depth.push(self.depth[p] + 1);
        self.children.push(Vec::new());
        self.children[p].push(id);
        id
    }

    /// Drops nodes added after the trie had `len` nodes.
    fn truncate(&mut self, len: usize) {
        while self.len() > len {
            let p = self.parent.pop().expect("nonempty");
            self.depth.pop();
            self.children.pop();
            self.children[p].pop();
        }
    }

    /// Edge counts from `v` to every node.
    fn hops_from(&self, v: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.len()];
        out[v] = 0;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            let p = self.parent[x];
            if p != usize::MAX && out[p] == usize::MAX {
                out[p] = out[x] + 1;
                stack.push(p);
            }
            for &c in &self.children[x] {
                if out[c] == usize::MAX {
                    out[c] = out[x] + 1;
                    stack.push(c);
                }
            }
        }
        out
    }
}

fn implicit_search(
    sub: &Instance,
    tree: &CanonicalTree,
    eps_prime: f64,
    opts: &TreeSearchOptions,
) -> Result<CanonicalEmbedding> {
    let n = sub.n();
    let c = 1.0 + eps_prime;
    let near = ((sub.u() * c + DEFAULT_TOLERANCE) / tree.alpha)
        .floor()
        .max(0.0) as usize;
    let far = ((sub.l() / c - DEFAULT_TOLERANCE) / tree.alpha)
        .ceil()
        .max(1.0) as usize;
    let max_descent = near.max(far).min(tree.depth);
    let worst = 1 + (n - 1) * max_descent;
    if worst > opts.size_budget {
        return Err(Error::SizeBudgetExceeded {
            vertices: worst as f64,
            cap: opts.size_budget,
        });
    }

    let order = placement_order(sub, opts.start);
    let mut rank = vec![0; n];
    for (i, &o) in order.iter().enumerate() {
        rank[o] = i;
    }
    let mut labeled: Vec<Vec<(usize, ConstraintKind)>> = vec![Vec::new(); n];
    let mut open_after = vec![0usize; n + 1];
    for (a, b, kind) in sub.constraints() {
        labeled[a].push((b, kind));
        labeled[b].push((a, kind));
        for slot in open_after.iter_mut().take(rank[a].max(rank[b]) + 1) {
            *slot += 1;
        }
    }
    let mut search = Implicit {
        tree,
        order: &order,
        labeled: &labeled,
        open_after: &open_after,
        near,
        far,
        max_descent,
        opts,
        trie: Trie::new(),
        pos: vec![usize::MAX; n],
        best: None,
        nodes: 0,
        stopped: false,
    };
    search.pos[order[0]] = 0;
    search.nodes = 1;
    search.descend(1, 0);
    let complete = !search.stopped;
    let nodes = search.nodes;
    let (satisfied, pos, trie) = search.best.take().expect("the first descent completes");

    let mut names = vec!["r".to_string()];
    let mut edges = Vec::with_capacity(trie.len());
    for v in 1..trie.len() {
        let p = trie.parent[v];
        let idx = trie.children[p]
            .iter()
            .position(|&c| c == v)
            .expect("child of its parent");
        names.push(format!("{}.{idx}", names[p]));
        edges.push((p, v, tree.alpha));
    }
    let host_size = trie.len();
    let t = TreeMetric::from_indexed(names, edges, 0)?;
    let total = sub.num_constraints();
    Ok(CanonicalEmbedding {
        embedding: Embedding::tree(sub.objects().to_vec(), t, pos)?,
        satisfied,
        total,
        accuracy: if total == 0 {
            1.0
        } else {
            satisfied as f64 / total as f64
        },
        nodes,
        complete,
        host_size,
        implicit: true,
    })
}

/// Breadth-first order over the similarity graph from `start` (or the
/// highest-degree object), unreached objects continuing by degree.
fn placement_order(sub: &Instance, start: Option<usize>) -> Vec<usize> {
    let g = sub.similarity_graph();
    let n = g.n();
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    if let Some(s) = start {
        roots.retain(|&v| v != s);
        roots.insert(0, s);
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for r in roots {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut queue = std::collections::VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

struct Implicit<'a> {
    tree: &'a CanonicalTree,
    order: &'a [usize],
    labeled: &'a [Vec<(usize, ConstraintKind)>],
    open_after: &'a [usize],
    near: usize,
    far: usize,
    max_descent: usize,
    opts: &'a TreeSearchOptions,
    trie: Trie,
    pos: Vec<usize>,
    best: Option<(usize, Vec<usize>, Trie)>,
    nodes: u64,
    stopped: bool,
}

impl Implicit<'_> {
    /// Gains of every `(attach, descent)` candidate for object `o`, best first.
    fn candidates(&self, o: usize) -> Vec<(usize, usize, usize)> {
        let placed: Vec<(usize, ConstraintKind)> = self.labeled[o]
            .iter()
            .filter(|(y, _)| self.pos[*y] != usize::MAX)
            .map(|&(y, k)| (self.pos[y], k))
            .collect();
        let rows: Vec<(Vec<usize>, ConstraintKind)> = placed
            .iter()
            .map(|&(p, k)| (self.trie.hops_from(p), k))
            .collect();
        let mut out = Vec::new();
        for a in 0..self.trie.len() {
            let can_branch = self.trie.children[a].len() < self.tree.arity;
            let room = self.tree.depth - self.trie.depth[a];
            let reach = if can_branch {
                self.max_descent.min(room)
            } else {
                0
            };
            for m in 0..=reach {
                let g = rows
                    .iter()
                    .filter(|(hops, kind)| {
                        let h = hops[a] + m;
                        match kind {
                            ConstraintKind::Similar => h <= self.near,
                            ConstraintKind::Dissimilar => h >= self.far,
                        }
                    })
                    .count();
                out.push((g, m, a));
            }
        }
        out.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        if let Some(b) = self.opts.branching {
            out.truncate(b.max(1));
        }
        out
    }

    fn descend(&mut self, depth: usize, score: usize) {
        if depth == self.order.len() {
            if self.best.as_ref().is_none_or(|b| score > b.0) {
                self.best = Some((score, self.pos.clone(), self.trie.clone()));
            }
            return;
        }
        let o = self.order[depth];
        let open = self.open_after[depth + 1];
        for (g, m, a) in self.candidates(o) {
            if self.stopped {
                return;
            }
            if let Some(best) = self.best.as_ref().map(|b| b.0) {
                if score + g + open <= best {
                    break;
                }
            }
            if self.nodes >= self.opts.budget && self.best.is_some() {
                self.stopped = true;
                return;
            }
            self.nodes += 1;
            let mark = self.trie.len();
            let mut v = a;
            for _ in 0..m {
                v = self.trie.push(v);
            }
            self.pos[o] = v;
            self.descend(depth + 1, score + g);
            self.pos[o] = usize::MAX;
            self.trie.truncate(mark);
        }
    }
}

/// Random member of `members`, or the one of least eccentricity under `ecc`.
pub(crate) fn pick_start(
    members: &[usize],
    random: bool,
    seed: u64,
    ecc: impl Fn(usize) -> f64,
) -> usize {
    if random && members.len() > 1 {
        members[rng::stream(seed, 0).gen_range(0..members.len())]
    } else {
        *members
            .iter()
            .min_by(|&&a, &&b| ecc(a).total_cmp(&ecc(b)).then(a.cmp(&b)))
            .expect("nonempty cluster")
    }
}
