//! End-to-end tree learners.
//!
//! Perfect information: annuli around the smallest object of each
//! similarity component, one canonical-tree search per cluster, and a merge
//! under a common root. Imperfect information: the well-linked decomposition
//! supplies the clusters and the isoperimetric bound caps their depth.

use rayon::prelude::*;

use super::annuli::{annuli_with_shift, draw_shift};
use super::canonical::{embed_into_canonical_tree, pick_start, CanonicalTree, TreeSearchOptions};
use super::merge::merge_trees;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::evaluation::accuracy;
use crate::graph::SimilarityMetric;
use crate::instance::Instance;
use crate::partition::{imperfect_alpha, well_linked_decomposition_with, WellLinkedConfig};
use crate::rng;
use crate::stats::ClusterStat;
use crate::tree_metric::TreeMetric;

/// Constants and resource limits of the tree learners.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeConfig {
    /// Search nodes per cluster.
    pub search_nodes: u64,
    pub branching: Option<usize>,
    /// Number of independent runs; `None` uses `⌈log₂ n⌉`.
    pub restarts: Option<usize>,
    /// Canonical trees up to this many vertices are materialized.
    pub explicit_limit: usize,
    /// Largest subtree an implicit search may span.
    pub size_budget: usize,
    /// Depth cap `c_iso·u·ln n / α'` of the imperfect learner.
    pub isoperimetry_constant: f64,
    pub well_linked: WellLinkedConfig,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            search_nodes: 4_000,
            branching: None,
            restarts: None,
            explicit_limit: 4096,
            size_budget: 100_000,
            isoperimetry_constant: 1.0,
            well_linked: WellLinkedConfig::default(),
        }
    }
}

/// Result of a tree learner run.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeOutcome {
    pub tree: TreeMetric,
    pub embedding: Embedding,
    /// Accuracy at distortion `1 + ε'`.
    pub accuracy: f64,
    pub restart: usize,
    pub clusters: Vec<Vec<String>>,
    pub cut_similar: usize,
    pub stats: Vec<ClusterStat>,
    pub budget_limited: bool,
}

/// The canonical tree of a run: edges `ε'·min(u,l)/2`, depth covering half
/// of `Δ = 8u/ε`, arity `⌈8/ε⌉`.
pub fn canonical_shape(inst: &Instance, epsilon: f64, eps_prime: f64) -> Result<CanonicalTree> {
    let delta = 8.0 * inst.u() / epsilon;
    let alpha = eps_prime * inst.u().min(inst.l()) / 2.0;
    let depth = (delta / (2.0 * alpha)).ceil() as usize;
    CanonicalTree::new(alpha, depth, (8.0 / epsilon).ceil() as usize)
}

fn check_params(inst: &Instance, epsilon: f64, eps_prime: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if !(eps_prime > 0.0 && eps_prime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps_prime must be positive, got {eps_prime}"
        )));
    }
    if inst.n() == 0 {
        return Err(Error::InvalidInstance("no objects".into()));
    }
    inst.require_complete()
}

fn restarts(cfg: &TreeConfig, n: usize) -> usize {
    cfg.restarts
        .unwrap_or_else(|| (n.max(2) as f64).log2().ceil() as usize)
        .max(1)
}

/// Learns a tree and an embedding into it, assuming a perfect embedding exists.
pub fn learn_tree_perfect(
    inst: &Instance,
    epsilon: f64,
    eps_prime: f64,
    seed: u64,
    cfg: &TreeConfig,
) -> Result<TreeOutcome> {
    check_params(inst, epsilon, eps_prime)?;
    let rho = SimilarityMetric::new(inst);
    let delta = 8.0 * inst.u() / epsilon;
    let shape = canonical_shape(inst, epsilon, eps_prime)?;
    let components = rho.graph().components();
    let runs: Vec<Result<Run>> = (0..restarts(cfg, inst.n()))
        .into_par_iter()
        .map(|r| {
            let seed_r = rng::derive_seed(seed, r as u64);
            let mut clusters = Vec::new();
            let mut cut = 0;
            for (ci, comp) in components.iter().enumerate() {
                let p = annuli_with_shift(
                    &rho,
                    comp,
                    delta,
                    draw_shift(rng::derive_seed(seed_r, ci as u64)),
                )?;
                cut += p.cut_similar_pairs.len();
                clusters.extend(p.clusters);
            }
            let jobs: Vec<(Vec<usize>, CanonicalTree)> =
                clusters.into_iter().map(|c| (c, shape)).collect();
            run_clusters(inst, &rho, &jobs, epsilon, eps_prime, cut, r, seed_r, cfg)
        })
        .collect();
    best_run(inst, runs, eps_prime)
}

/// Learns a tree when a `ζ` fraction of the labels may be wrong.
pub fn learn_tree_imperfect(
    inst: &Instance,
    epsilon: f64,
    eps_prime: f64,
    zeta: f64,
    seed: u64,
    cfg: &TreeConfig,
) -> Result<TreeOutcome> {
    check_params(inst, epsilon, eps_prime)?;
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::InvalidParameter(format!(
            "zeta must lie in [0, 1), got {zeta}"
        )));
    }
    let n = inst.n();
    let alpha = imperfect_alpha(zeta, n);
    let shape = canonical_shape(inst, epsilon, eps_prime)?;
    let g = inst.similarity_graph();
    let (components, removed, expansion) = if alpha > 0.0 {
        let dec = well_linked_decomposition_with(inst, alpha, &cfg.well_linked)?;
        (dec.components, dec.removed_edges, dec.achieved_expansion)
    } else {
        let comps = g.components();
        let none = vec![None; comps.len()];
        (comps, Vec::new(), none)
    };
    let ln = (n as f64).ln().max(1.0);
    let jobs: Vec<(Vec<usize>, CanonicalTree)> = components
        .into_iter()
        .zip(expansion)
        .map(|(c, e)| {
            let mut s = shape;
            if let Some(a) = e.filter(|a| *a > 0.0) {
                let cap = cfg.isoperimetry_constant * inst.u() * ln / a;
                s.depth = s.depth.min((cap / s.alpha).ceil() as usize);
            }
            (c, s)
        })
        .collect();
    log::debug!(
        "tree imperfect: α = {alpha}, {} components, {} edges removed",
        jobs.len(),
        removed.len()
    );
    let rho = SimilarityMetric::from_graph(g.without_edges(&removed), inst.u());
    let runs: Vec<Result<Run>> = (0..restarts(cfg, n))
        .into_par_iter()
        .map(|r| {
            run_clusters(
                inst,
                &rho,
                &jobs,
                epsilon,
                eps_prime,
                removed.len(),
                r,
                rng::derive_seed(seed, r as u64),
                cfg,
            )
        })
        .collect();
    best_run(inst, runs, eps_prime)
}

struct Run {
    restart: usize,
    parts: Vec<Embedding>,
    stats: Vec<ClusterStat>,
    limited: bool,
    cut: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_clusters(
    inst: &Instance,
    rho: &SimilarityMetric,
    jobs: &[(Vec<usize>, CanonicalTree)],
    epsilon: f64,
    eps_prime: f64,
    cut: usize,
    restart: usize,
    seed: u64,
    cfg: &TreeConfig,
) -> Result<Run> {
    let done: Vec<Result<(Embedding, ClusterStat)>> = jobs
        .par_iter()
        .enumerate()
        .map(|(ci, (members, shape))| {
            let cseed = rng::derive_seed(seed, 1 + ci as u64);
            let ecc = |a: usize| members.iter().map(|&x| rho.rho(a, x)).fold(0.0, f64::max);
            let start = pick_start(members, restart > 0, cseed, ecc);
            let (sub, map) = inst.restrict(members);
            let opts = TreeSearchOptions {
                budget: cfg.search_nodes,
                branching: cfg.branching,
                start: map.iter().position(|&g| g == start),
                explicit_limit: cfg.explicit_limit,
                size_budget: cfg.size_budget,
                seed: rng::derive_seed(cseed, 1),
            };
            let found = embed_into_canonical_tree(&sub, shape, epsilon / 8.0, eps_prime, &opts)?;
            let stat = ClusterStat {
                restart,
                cluster: ci,
                objects: members.len(),
                radius: shape.alpha * shape.depth as f64,
                host_size: found.host_size,
                nodes: found.nodes,
                satisfied: found.satisfied,
                total: found.total,
                complete: found.complete,
            };
            Ok((found.embedding, stat))
        })
        .collect();
    let mut run = Run {
        restart,
        parts: Vec::new(),
        stats: Vec::new(),
        limited: false,
        cut,
    };
    for item in done {
        let (emb, stat) = item?;
        run.limited |= !stat.complete;
        run.parts.push(emb);
        run.stats.push(stat);
    }
    Ok(run)
}

fn best_run(inst: &Instance, runs: Vec<Result<Run>>, eps_prime: f64) -> Result<TreeOutcome> {
    let mut best: Option<(TreeOutcome, usize)> = None;
    let mut all_stats = Vec::new();
    for run in runs {
        let run = run?;
        let (tree, embedding) = merge_trees(&run.parts, inst.l())?;
        let report = accuracy(inst, &embedding, 1.0 + eps_prime)?;
        all_stats.extend(run.stats.iter().cloned());
        if best.as_ref().is_none_or(|(_, s)| report.satisfied() > *s) {
            let clusters = run.parts.iter().map(|p| p.objects().to_vec()).collect();
            let out = TreeOutcome {
                tree,
                embedding,
                accuracy: report.accuracy,
                restart: run.restart,
                clusters,
                cut_similar: run.cut,
                stats: Vec::new(),
                budget_limited: run.limited,
            };
            best = Some((out, report.satisfied()));
        }
    }
    let (mut out, _) = best.expect("at least one run");
    out.stats = all_stats;
    Ok(out)
}
