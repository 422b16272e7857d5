//! Learn from labels with a few flips, writing per-cluster statistics as CSV.

use contrastive::embedding::Host;
use contrastive::euclidean::{learn_euclidean_imperfect, EuclideanConfig};
use contrastive::evaluation::single_point_baseline;
use contrastive::instance::generate_planted;
use contrastive::stats::write_csv;

fn main() -> contrastive::error::Result<()> {
    let zeta = 0.05;
    let (inst, truth) = generate_planted(Host::Euclidean(2), 20, 1.0, 1.5, zeta, 8)?;
    let out = learn_euclidean_imperfect(&inst, 2, 0.25, 0.5, zeta, 1, &EuclideanConfig::default())?;
    println!(
        "{} flipped labels; accuracy {:.3} (single point gets {:.3}); budget limited: {}",
        truth.flipped.len(),
        out.accuracy,
        single_point_baseline(&inst),
        out.budget_limited
    );
    write_csv(&out.stats, std::io::stdout().lock())?;
    Ok(())
}
