//! Learning embeddings into `R^d`.

mod grid;
mod lipschitz;
mod pipeline;

pub use grid::{discretize_ball, grid_spacing, GridHost};
pub use lipschitz::{
    sample_lipschitz_partition, sample_lipschitz_partition_of, LipschitzPartitionSample,
};
pub use pipeline::{
    combine_cluster_embeddings, learn_euclidean_imperfect, learn_euclidean_perfect,
    EuclideanConfig, EuclideanOutcome,
};
