//! Learn a planar embedding from noiseless labels.

use contrastive::embedding::Host;
use contrastive::euclidean::{learn_euclidean_perfect, EuclideanConfig};
use contrastive::instance::generate_planted;

fn main() -> contrastive::error::Result<()> {
    let (inst, _) = generate_planted(Host::Euclidean(2), 24, 1.0, 1.5, 0.0, 5)?;
    let out = learn_euclidean_perfect(&inst, 2, 0.25, 0.5, 0, &EuclideanConfig::default())?;
    println!(
        "accuracy {:.3} at c = 1.5 using restart {}; {} clusters, {} similar pairs cut",
        out.accuracy,
        out.restart,
        out.clusters.len(),
        out.cut_similar
    );
    for s in out.stats.iter().filter(|s| s.restart == out.restart) {
        println!(
            "  cluster {}: {} objects on {} grid points, {} nodes",
            s.cluster, s.objects, s.host_size, s.nodes
        );
    }
    Ok(())
}
