//! Learning tree metrics.

mod annuli;
mod canonical;
mod merge;
mod pipeline;

pub use annuli::{annuli_partition, annuli_with_shift, AnnuliPartition};
pub use canonical::{
    canonical_tree, embed_into_canonical_tree, CanonicalEmbedding, CanonicalTree, TreeSearchOptions,
};
pub use merge::{merge_trees, MERGE_ROOT};
pub use pipeline::{
    canonical_shape, learn_tree_imperfect, learn_tree_perfect, TreeConfig, TreeOutcome,
};
