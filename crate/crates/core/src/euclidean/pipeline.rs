//! End-to-end Euclidean learners.
//!
//! Perfect information: a bounded-diameter random partition of the
//! similarity metric, one grid search per cluster, clusters translated
//! apart along the first axis. Imperfect information: a well-linked
//! decomposition replaces the random partition and the grid radius is capped
//! by the isoperimetric diameter bound of each component. Both repeat with
//! independent seeds and keep the most accurate run.

use rand::Rng as _;
use rayon::prelude::*;

use super::grid::{grid_spacing, GridHost};
use super::lipschitz::{sample_lipschitz_partition, sample_lipschitz_partition_of};
use crate::embedding::{Embedding, Placement};
use crate::error::{Error, Result};
use crate::evaluation::accuracy;
use crate::finite::{embed_with_host, SearchOptions};
use crate::graph::SimilarityMetric;
use crate::instance::Instance;
use crate::partition::{imperfect_alpha, well_linked_decomposition_with, WellLinkedConfig};
use crate::rng;
use crate::stats::ClusterStat;

/// Constants and resource limits of the Euclidean learners.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanConfig {
    /// `Δ = c·√d·u/ε`.
    pub delta_constant: f64,
    /// Partition diameter is capped at this multiple of `u·n`.
    pub diameter_cap: f64,
    /// Grid radius cap `c_iso·u·ln n / α'` of the imperfect learner.
    pub isoperimetry_constant: f64,
    /// Largest grid per cluster; bigger clusters are split further.
    pub grid_points: usize,
    /// Search nodes per cluster.
    pub search_nodes: u64,
    pub branching: Option<usize>,
    /// Number of independent runs; `None` uses `⌈log₂ n⌉`.
    pub restarts: Option<usize>,
    pub well_linked: WellLinkedConfig,
}

impl Default for EuclideanConfig {
    fn default() -> Self {
        EuclideanConfig {
            delta_constant: 1.0,
            diameter_cap: 1.0,
            isoperimetry_constant: 1.0,
            grid_points: 20_000,
            search_nodes: 4_000,
            branching: None,
            restarts: None,
            well_linked: WellLinkedConfig::default(),
        }
    }
}

/// Result of a learner run.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanOutcome {
    pub embedding: Embedding,
    /// Accuracy of `embedding` at distortion `1 + ε'`.
    pub accuracy: f64,
    /// Index of the winning run.
    pub restart: usize,
    /// Clusters of the winning run, as object ids.
    pub clusters: Vec<Vec<String>>,
    /// Similar pairs separated before the search (cut by the partition or
    /// removed by the decomposition).
    pub cut_similar: usize,
    pub stats: Vec<ClusterStat>,
    /// Some search in the winning run stopped on its node budget.
    pub budget_limited: bool,
}

fn check_params(inst: &Instance, d: usize, epsilon: f64, eps_prime: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
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
    Ok(())
}

fn restarts(cfg: &EuclideanConfig, n: usize) -> usize {
    cfg.restarts
        .unwrap_or_else(|| (n.max(2) as f64).log2().ceil() as usize)
        .max(1)
}

/// Learns an embedding into `R^d` for an instance believed to have a
/// perfect one.
pub fn learn_euclidean_perfect(
    inst: &Instance,
    d: usize,
    epsilon: f64,
    eps_prime: f64,
    seed: u64,
    cfg: &EuclideanConfig,
) -> Result<EuclideanOutcome> {
    check_params(inst, d, epsilon, eps_prime)?;
    let u = inst.u();
    let n = inst.n();
    let rho = SimilarityMetric::new(inst);
    let delta = cfg.delta_constant * (d as f64).sqrt() * u / epsilon;
    let delta_prime = (u * (1.0 + 4.0 * delta / u).powi(d as i32))
        .min(cfg.diameter_cap * u * n as f64)
        .max(u);
    log::debug!("euclidean perfect: Δ = {delta}, Δ' = {delta_prime}");

    let runs: Vec<Result<Run>> = (0..restarts(cfg, n))
        .into_par_iter()
        .map(|r| {
            let seed_r = rng::derive_seed(seed, r as u64);
            let sample =
                sample_lipschitz_partition(&rho, delta_prime, rng::derive_seed(seed_r, 0))?;
            let cut = sample.cut_similar_pairs.len();
            run_clusters(
                inst,
                &rho,
                &sample.clusters,
                d,
                epsilon / 2.0,
                eps_prime,
                f64::INFINITY,
                cut,
                r,
                seed_r,
                cfg,
            )
        })
        .collect();
    best_run(inst, runs, eps_prime)
}

/// Learns an embedding into `R^d` when a `ζ` fraction of the labels may be
/// wrong. Needs complete information.
pub fn learn_euclidean_imperfect(
    inst: &Instance,
    d: usize,
    epsilon: f64,
    eps_prime: f64,
    zeta: f64,
    seed: u64,
    cfg: &EuclideanConfig,
) -> Result<EuclideanOutcome> {
    check_params(inst, d, epsilon, eps_prime)?;
    inst.require_complete()?;
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::InvalidParameter(format!(
            "zeta must lie in [0, 1), got {zeta}"
        )));
    }
    let n = inst.n();
    let alpha = imperfect_alpha(zeta, n);
    let g = inst.similarity_graph();
    let (components, removed, caps) = if alpha > 0.0 {
        let dec = well_linked_decomposition_with(inst, alpha, &cfg.well_linked)?;
        let ln = (n as f64).ln().max(1.0);
        let caps: Vec<f64> = dec
            .achieved_expansion
            .iter()
            .map(|e| match e {
                Some(a) if *a > 0.0 => cfg.isoperimetry_constant * inst.u() * ln / a,
                _ => f64::INFINITY,
            })
            .collect();
        (dec.components, dec.removed_edges, caps)
    } else {
        let comps = g.components();
        let caps = vec![f64::INFINITY; comps.len()];
        (comps, Vec::new(), caps)
    };
    log::debug!(
        "euclidean imperfect: α = {alpha}, {} components, {} edges removed",
        components.len(),
        removed.len()
    );
    let rho = SimilarityMetric::from_graph(g.without_edges(&removed), inst.u());

    let runs: Vec<Result<Run>> = (0..restarts(cfg, n))
        .into_par_iter()
        .map(|r| {
            let seed_r = rng::derive_seed(seed, r as u64);
            let mut pieces = Vec::new();
            let mut stats = Vec::new();
            let mut limited = false;
            for (ci, (comp, cap)) in components.iter().zip(&caps).enumerate() {
                let mut one = run_clusters(
                    inst,
                    &rho,
                    std::slice::from_ref(comp),
                    d,
                    epsilon / 2.0,
                    eps_prime,
                    *cap,
                    0,
                    r,
                    rng::derive_seed(seed_r, ci as u64),
                    cfg,
                )?;
                for s in &mut one.stats {
                    s.cluster = ci;
                }
                pieces.append(&mut one.pieces);
                stats.append(&mut one.stats);
                limited |= one.limited;
            }
            Ok(Run {
                restart: r,
                pieces,
                stats,
                limited,
                cut: removed.len(),
            })
        })
        .collect();
    best_run(inst, runs, eps_prime)
}

struct Run {
    restart: usize,
    /// Object indices and their points, one entry per embedded cluster.
    pieces: Vec<(Vec<usize>, Vec<Vec<f64>>)>,
    stats: Vec<ClusterStat>,
    limited: bool,
    cut: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_clusters(
    inst: &Instance,
    rho: &SimilarityMetric,
    clusters: &[Vec<usize>],
    d: usize,
    epsilon: f64,
    eps_prime: f64,
    radius_cap: f64,
    cut: usize,
    restart: usize,
    seed: u64,
    cfg: &EuclideanConfig,
) -> Result<Run> {
    let done: Vec<Result<Vec<Piece>>> = clusters
        .par_iter()
        .enumerate()
        .map(|(ci, c)| {
            embed_cluster(
                inst,
                rho,
                c,
                d,
                epsilon,
                eps_prime,
                radius_cap,
                restart,
                rng::derive_seed(seed, 1 + ci as u64),
                cfg,
            )
        })
        .collect();
    let mut run = Run {
        restart,
        pieces: Vec::new(),
        stats: Vec::new(),
        limited: false,
        cut,
    };
    for (ci, pieces) in done.into_iter().enumerate() {
        for (members, points, mut stat) in pieces? {
            stat.cluster = ci;
            run.limited |= !stat.complete;
            run.pieces.push((members, points));
            run.stats.push(stat);
        }
    }
    Ok(run)
}

type Piece = (Vec<usize>, Vec<Vec<f64>>, ClusterStat);

/// Embeds one cluster into a grid ball around its first object. Clusters
/// whose grid would exceed the point budget are split by a finer random
/// partition first.
#[allow(clippy::too_many_arguments)]
fn embed_cluster(
    inst: &Instance,
    rho: &SimilarityMetric,
    members: &[usize],
    d: usize,
    epsilon: f64,
    eps_prime: f64,
    radius_cap: f64,
    restart: usize,
    seed: u64,
    cfg: &EuclideanConfig,
) -> Result<Vec<Piece>> {
    let ecc = |a: usize| members.iter().map(|&x| rho.rho(a, x)).fold(0.0, f64::max);
    // first run starts from the metric center, later runs from a random member
    let start = if restart == 0 || members.len() == 1 {
        *members
            .iter()
            .min_by(|&&a, &&b| ecc(a).total_cmp(&ecc(b)).then(a.cmp(&b)))
            .expect("nonempty cluster")
    } else {
        members[rng::stream(seed, 0).gen_range(0..members.len())]
    };
    let radius = ecc(start).min(radius_cap);
    let spacing = grid_spacing(d, eps_prime, inst.u(), inst.l());
    let grid = match GridHost::ball(radius, d, spacing, cfg.grid_points) {
        Ok(g) => g,
        Err(Error::PointBudgetExceeded { .. }) if members.len() > 1 => {
            let diameter = rho.diameter_of(members).min(2.0 * radius);
            let sample = sample_lipschitz_partition_of(
                rho,
                members,
                diameter / 2.0,
                rng::derive_seed(seed, 1),
            )?;
            let mut out = Vec::new();
            for (i, part) in sample.clusters.iter().enumerate() {
                let s = rng::derive_seed(seed, 2 + i as u64);
                out.extend(embed_cluster(
                    inst, rho, part, d, epsilon, eps_prime, radius_cap, restart, s, cfg,
                )?);
            }
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let (sub, map) = inst.restrict(members);
    let opts = SearchOptions {
        budget: cfg.search_nodes,
        branching: cfg.branching,
        anchor: Some(vec![grid.center()]),
        start: Some(
            map.iter()
                .position(|&g| g == start)
                .expect("start is a member"),
        ),
        seed: rng::derive_seed(seed, 3),
        ..SearchOptions::exhaustive()
    };
    let found = embed_with_host(&sub, &grid, epsilon, eps_prime, &opts)?;
    let points = found.assignment.iter().map(|&p| grid.point(p)).collect();
    let stat = ClusterStat {
        restart,
        cluster: 0,
        objects: members.len(),
        radius,
        host_size: grid.len(),
        nodes: found.nodes,
        satisfied: found.satisfied,
        total: found.total,
        complete: found.complete,
    };
    Ok(vec![(map, points, stat)])
}

fn best_run(inst: &Instance, runs: Vec<Result<Run>>, eps_prime: f64) -> Result<EuclideanOutcome> {
    let mut best: Option<(EuclideanOutcome, usize)> = None;
    let mut all_stats = Vec::new();
    for run in runs {
        let run = run?;
        let parts: Vec<Embedding> = run
            .pieces
            .iter()
            .map(|(members, points)| {
                let dim = points.first().map_or(1, Vec::len);
                Embedding::euclidean(
                    members.iter().map(|&i| inst.id(i).to_string()).collect(),
                    dim,
                    points.clone(),
                )
            })
            .collect::<Result<_>>()?;
        let embedding = combine_cluster_embeddings(&parts, inst.l().max(inst.u()))?;
        let report = accuracy(inst, &embedding, 1.0 + eps_prime)?;
        all_stats.extend(run.stats.iter().cloned());
        let satisfied = report.satisfied();
        if best.as_ref().is_none_or(|(_, s)| satisfied > *s) {
            let clusters = run
                .pieces
                .iter()
                .map(|(m, _)| m.iter().map(|&i| inst.id(i).to_string()).collect())
                .collect();
            best = Some((
                EuclideanOutcome {
                    embedding,
                    accuracy: report.accuracy,
                    restart: run.restart,
                    clusters,
                    cut_similar: run.cut,
                    stats: Vec::new(),
                    budget_limited: run.limited,
                },
                satisfied,
            ));
        }
    }
    let (mut out, _) = best.expect("at least one run");
    out.stats = all_stats;
    Ok(out)
}

/// Places cluster embeddings side by side along the first axis so that
/// points of different clusters are at least `separation` apart. Output
/// objects are sorted by id.
pub fn combine_cluster_embeddings(parts: &[Embedding], separation: f64) -> Result<Embedding> {
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "separation must be nonnegative, got {separation}"
        )));
    }
    let mut dim = None;
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    let mut offset = 0.0;
    for (i, part) in parts.iter().enumerate() {
        let Placement::Euclidean { dim: pd, points } = part.placement() else {
            return Err(Error::InvalidParameter(format!(
                "part {i} is not a Euclidean embedding"
            )));
        };
        match dim {
            None => dim = Some(*pd),
            Some(expected) if expected != *pd => {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: *pd,
                })
            }
            _ => {}
        }
        if points.is_empty() {
            continue;
        }
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points
            .iter()
            .map(|p| p[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let shift = if rows.is_empty() {
            -lo
        } else {
            offset + separation - lo
        };
        for (id, p) in part.objects().iter().zip(points) {
            let mut q = p.clone();
            q[0] += shift;
            rows.push((id.clone(), q));
        }
        offset = hi + shift;
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let (objects, points): (Vec<String>, Vec<Vec<f64>>) = rows.into_iter().unzip();
    Embedding::euclidean(objects, dim.unwrap_or(1), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{euclid, Host};
    use crate::instance::generate_planted;

    fn small_cfg() -> EuclideanConfig {
        EuclideanConfig {
            search_nodes: 500,
            restarts: Some(2),
            ..EuclideanConfig::default()
        }
    }

    #[test]
    fn combine_separates_clusters() {
        let a = Embedding::euclidean(
            vec!["a".into(), "b".into()],
            2,
            vec![vec![0.0, 0.0], vec![1.0, 3.0]],
        )
        .unwrap();
        let b = Embedding::euclidean(vec!["c".into()], 2, vec![vec![-5.0, 0.0]]).unwrap();
        let out = combine_cluster_embeddings(&[a, b], 2.0).unwrap();
        let Placement::Euclidean { points, .. } = out.placement() else {
            panic!()
        };
        assert_eq!(out.objects(), &["a", "b", "c"]);
        assert!((euclid(&points[0], &points[1]) - 10f64.sqrt()).abs() < 1e-12);
        assert!(euclid(&points[0], &points[2]) >= 2.0);
        assert!(euclid(&points[1], &points[2]) >= 2.0);
    }

    #[test]
    fn combine_rejects_mixed_dimensions() {
        let a = Embedding::euclidean(vec!["a".into()], 2, vec![vec![0.0, 0.0]]).unwrap();
        let b = Embedding::euclidean(vec!["b".into()], 3, vec![vec![0.0, 0.0, 0.0]]).unwrap();
        let err = combine_cluster_embeddings(&[a, b], 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn perfect_planted_plane_is_learned_well() {
        let (inst, _) = generate_planted(Host::Euclidean(2), 12, 1.0, 1.5, 0.0, 3).unwrap();
        let out = learn_euclidean_perfect(&inst, 2, 0.25, 0.5, 9, &small_cfg()).unwrap();
        assert_eq!(out.embedding.host(), Host::Euclidean(2));
        assert!(out.accuracy >= 0.9, "accuracy {}", out.accuracy);
        let again = learn_euclidean_perfect(&inst, 2, 0.25, 0.5, 9, &small_cfg()).unwrap();
        assert_eq!(again.embedding.to_json(), out.embedding.to_json());
    }

    #[test]
    fn perfect_line_instance_in_one_dimension() {
        let (inst, _) = generate_planted(Host::Line, 10, 1.0, 2.0, 0.0, 4).unwrap();
        let out = learn_euclidean_perfect(&inst, 1, 0.25, 0.5, 1, &small_cfg()).unwrap();
        assert!(out.accuracy >= 0.95, "accuracy {}", out.accuracy);
    }

    #[test]
    fn imperfect_learner_runs_on_noisy_data() {
        let (inst, _) = generate_planted(Host::Euclidean(2), 12, 1.0, 1.5, 0.05, 5).unwrap();
        let out = learn_euclidean_imperfect(&inst, 2, 0.25, 0.5, 0.05, 2, &small_cfg()).unwrap();
        assert!(
            out.accuracy >= crate::evaluation::single_point_baseline(&inst) - 1e-12
                || out.accuracy >= 0.7
        );
    }

    #[test]
    fn bad_parameters() {
        let (inst, _) = generate_planted(Host::Line, 4, 1.0, 2.0, 0.0, 4).unwrap();
        assert!(learn_euclidean_perfect(&inst, 0, 0.25, 0.5, 1, &small_cfg()).is_err());
        assert!(learn_euclidean_perfect(&inst, 2, 0.0, 0.5, 1, &small_cfg()).is_err());
        assert!(learn_euclidean_imperfect(&inst, 2, 0.25, 0.5, 1.0, 1, &small_cfg()).is_err());
    }
}
