//! The three partitions the learners build on: Lipschitz ball carving,
//! random annuli and the well-linked decomposition.

use contrastive::embedding::Host;
use contrastive::euclidean::sample_lipschitz_partition;
use contrastive::graph::SimilarityMetric;
use contrastive::instance::generate_planted;
use contrastive::partition::well_linked_decomposition;
use contrastive::tree::annuli_partition;

fn main() -> contrastive::error::Result<()> {
    let (inst, _) = generate_planted(Host::Tree, 30, 1.0, 1.5, 0.05, 4)?;
    let rho = SimilarityMetric::new(&inst);

    let lip = sample_lipschitz_partition(&rho, 4.0, 0)?;
    println!(
        "lipschitz: {} clusters, {} similar pairs cut",
        lip.clusters.len(),
        lip.cut_similar_pairs.len()
    );

    // annuli need a connected similarity graph
    if rho.graph().components().len() == 1 {
        let ann = annuli_partition(&inst, 6.0, 0)?;
        println!(
            "annuli: shift {:.3}, {} clusters",
            ann.shift,
            ann.clusters.len()
        );
    }

    let wl = well_linked_decomposition(&inst, 0.1)?;
    println!(
        "well-linked: removed {:?}, {} components, threshold {:.4}",
        wl.removed_edges,
        wl.components.len(),
        wl.chi
    );
    Ok(())
}
