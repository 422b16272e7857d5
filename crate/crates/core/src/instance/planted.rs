//! Planted instances: sample points in a host, label pairs by the
//! thresholds, then flip labels independently at the noise rate.

use std::collections::BTreeSet;

use rand::Rng as _;

use crate::embedding::{euclid, Embedding, Host};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng;
use crate::tree_metric::TreeMetric;

/// Generator settings. [`PlantedConfig::new`] fills in defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedConfig {
    pub host: Host,
    pub n: usize,
    pub u: f64,
    pub l: f64,
    pub noise_rate: f64,
    pub seed: u64,
    /// Side of the sampling box for line and Euclidean hosts; derived from
    /// `n`, `d` and `u` when unset.
    pub box_side: Option<f64>,
    /// Edge lengths of the random tree are uniform in this range, in units of `u`.
    pub edge_length: (f64, f64),
    /// Redraws allowed per object before giving up.
    pub max_retries: usize,
}

impl PlantedConfig {
    pub fn new(host: Host, n: usize, u: f64, l: f64, noise_rate: f64, seed: u64) -> Self {
        PlantedConfig {
            host,
            n,
            u,
            l,
            noise_rate,
            seed,
            box_side: None,
            edge_length: (0.3, 1.0),
            max_retries: 10_000,
        }
    }

    fn side(&self, d: usize) -> f64 {
        self.box_side
            .unwrap_or_else(|| self.u * (1.5 * (self.n as f64).powf(1.0 / d as f64)).max(3.0))
    }
}

/// What the generator knows about an instance it produced.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedTruth {
    pub host: Host,
    pub ground_embedding: Embedding,
    pub noise_rate: f64,
    /// Pairs whose label was flipped, smaller id first.
    pub flipped: Vec<(String, String)>,
}

/// Generates with default geometry settings.
pub fn generate_planted(
    host: Host,
    n: usize,
    u: f64,
    l: f64,
    noise_rate: f64,
    seed: u64,
) -> Result<(Instance, PlantedTruth)> {
    generate_planted_with(&PlantedConfig::new(host, n, u, l, noise_rate, seed))
}

pub fn generate_planted_with(cfg: &PlantedConfig) -> Result<(Instance, PlantedTruth)> {
    if !(cfg.u > 0.0 && cfg.u.is_finite() && cfg.l > 0.0 && cfg.l.is_finite()) {
        return Err(Error::InvalidParameter("u and l must be positive".into()));
    }
    if !(0.0..=1.0).contains(&cfg.noise_rate) {
        return Err(Error::InvalidParameter(format!(
            "noise rate must lie in [0, 1], got {}",
            cfg.noise_rate
        )));
    }
    let (lo, hi) = cfg.edge_length;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidParameter(
            "edge length range must be positive".into(),
        ));
    }
    let n = cfg.n;
    let width = (n.saturating_sub(1).to_string().len()).max(2);
    let objects: Vec<String> = (0..n).map(|i| format!("x{i:0width$}")).collect();
    let mut geo = rng::stream(cfg.seed, 0);
    let (u, l) = (cfg.u, cfg.l);
    let in_gap = |d: f64| d > u && d < l;

    let (ground, dist): (Embedding, Vec<f64>) = match cfg.host {
        Host::Line | Host::Euclidean(_) => {
            let d = match cfg.host {
                Host::Euclidean(d) if d >= 1 => d,
                Host::Euclidean(_) => {
                    return Err(Error::InvalidParameter(
                        "dimension must be at least 1".into(),
                    ))
                }
                _ => 1,
            };
            let side = cfg.side(d);
            let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
            for i in 0..n {
                let mut tries = 0;
                loop {
                    let p: Vec<f64> = (0..d).map(|_| geo.gen_range(0.0..side)).collect();
                    if !points.iter().any(|q| in_gap(euclid(&p, q))) {
                        points.push(p);
                        break;
                    }
                    tries += 1;
                    if tries >= cfg.max_retries {
                        return Err(Error::GenerationBudgetExceeded {
                            object: i,
                            retries: tries,
                        });
                    }
                }
            }
            let mut dist = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    dist[i * n + j] = euclid(&points[i], &points[j]);
                }
            }
            let emb = match cfg.host {
                Host::Line => {
                    Embedding::line(objects.clone(), points.iter().map(|p| p[0]).collect())?
                }
                _ => Embedding::euclidean(objects.clone(), d, points)?,
            };
            (emb, dist)
        }
        Host::Tree => {
            // random recursive tree: vertex i hangs off a uniformly chosen earlier vertex
            let mut dist = vec![0.0; n * n];
            let mut edges = Vec::with_capacity(n.saturating_sub(1));
            for i in 1..n {
                let mut tries = 0;
                loop {
                    let parent = geo.gen_range(0..i);
                    let len = u * geo.gen_range(lo..=hi);
                    if !(0..i).any(|j| in_gap(len + dist[parent * n + j])) {
                        for j in 0..i {
                            let d = len + dist[parent * n + j];
                            dist[i * n + j] = d;
                            dist[j * n + i] = d;
                        }
                        edges.push((parent, i, len));
                        break;
                    }
                    tries += 1;
                    if tries >= cfg.max_retries {
                        return Err(Error::GenerationBudgetExceeded {
                            object: i,
                            retries: tries,
                        });
                    }
                }
            }
            if n == 0 {
                return Err(Error::InvalidParameter(
                    "tree host needs at least one object".into(),
                ));
            }
            let vertices: Vec<String> = (0..n).map(|i| format!("t{i:0width$}")).collect();
            let tree = TreeMetric::from_indexed(vertices, edges, 0)?;
            (
                Embedding::tree(objects.clone(), tree, (0..n).collect())?,
                dist,
            )
        }
        Host::Finite => {
            return Err(Error::InvalidParameter(
                "planted instances need a line, euclidean or tree host".into(),
            ))
        }
    };

    let mut flips = rng::stream(cfg.seed, 1);
    let mut similar = BTreeSet::new();
    let mut dissimilar = BTreeSet::new();
    let mut flipped = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut is_similar = dist[i * n + j] <= u;
            if cfg.noise_rate > 0.0 && flips.gen_bool(cfg.noise_rate) {
                is_similar = !is_similar;
                flipped.push((objects[i].clone(), objects[j].clone()));
            }
            if is_similar {
                similar.insert((i, j));
            } else {
                dissimilar.insert((i, j));
            }
        }
    }
    let inst = Instance::from_parts(objects, similar, dissimilar, u, l);
    let truth = PlantedTruth {
        host: cfg.host,
        ground_embedding: ground,
        noise_rate: cfg.noise_rate,
        flipped,
    };
    Ok((inst, truth))
}
