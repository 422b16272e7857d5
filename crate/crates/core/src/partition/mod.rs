//! Sparse cuts, well-linked decompositions and isoperimetric cores.

mod core;
mod cut;
mod well_linked;

pub use self::core::{extract_core, extract_core_with};
pub use cut::{cut_between, sparsest_cut, Cut, EXACT_CUT_LIMIT};
pub use well_linked::{
    imperfect_alpha, well_linked_decomposition, well_linked_decomposition_with, WellLinkedConfig,
    WellLinkedDecomposition,
};
