//! Tree learning under label noise at a few noise rates.

use contrastive::embedding::Host;
use contrastive::evaluation::single_point_baseline;
use contrastive::instance::generate_planted;
use contrastive::tree::{learn_tree_imperfect, TreeConfig};

fn main() -> contrastive::error::Result<()> {
    for zeta in [0.01, 0.05, 0.1] {
        let (inst, _) = generate_planted(Host::Tree, 16, 1.0, 1.5, zeta, 21)?;
        let out = learn_tree_imperfect(&inst, 0.25, 0.5, zeta, 0, &TreeConfig::default())?;
        println!(
            "zeta {zeta}: accuracy {:.3} vs baseline {:.3}, {} components",
            out.accuracy,
            single_point_baseline(&inst),
            out.clusters.len()
        );
    }
    Ok(())
}
