//! Contrastive metric learning.
//!
//! Objects come with "similar" and "dissimilar" pair labels and two
//! thresholds `u` and `l`. An embedding into a host metric satisfies a
//! similar pair at distortion `c` when the pair lands within `u·c`, and a
//! dissimilar pair when it lands at least `l/c` apart. This crate learns
//! such embeddings into the line, into `R^d` and into trees.
//!
//! - [`line::learn_line`] decides exactly whether a perfect line embedding
//!   exists and builds one.
//! - [`euclidean::learn_euclidean_perfect`] and
//!   [`euclidean::learn_euclidean_imperfect`] cluster the instance, search
//!   each cluster on a grid and translate the pieces apart.
//! - [`tree::learn_tree_perfect`] and [`tree::learn_tree_imperfect`] do the
//!   same with canonical trees glued under a new root.
//! - [`finite::embed_into_finite_metric`] is the per-cluster search on an
//!   explicit finite host.
//! - [`partition`] has the well-linked decomposition and core extraction used
//!   under label noise.
//! - [`oracle`] holds brute-force references for small inputs.
//!
//! The `contrastive` binary wraps all of this in [`cli::run`]; instances and
//! embeddings travel as JSON (see [`parse_instance`] and [`parse_embedding`]).
//! Every randomized step takes an explicit seed, and results do not depend on
//! the number of rayon threads.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod euclidean;
pub mod evaluation;
pub mod finite;
pub mod graph;
pub mod instance;
pub mod line;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod stats;
pub mod tree;
pub mod tree_metric;

pub use embedding::{parse_embedding, Embedding, Host, Placement};
pub use error::{Error, Result};
pub use evaluation::{accuracy, min_distortion, satisfies, AccuracyReport};
pub use finite::FiniteMetric;
pub use instance::{generate_planted, parse_instance, ConstraintKind, Instance, PlantedTruth};
pub use tree_metric::TreeMetric;
