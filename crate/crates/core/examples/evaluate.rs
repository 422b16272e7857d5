//! Score an embedding at several distortions and list what it violates.

use contrastive::embedding::Host;
use contrastive::evaluation::{accuracy, min_distortion};
use contrastive::instance::generate_planted;

fn main() -> contrastive::error::Result<()> {
    let (inst, truth) = generate_planted(Host::Euclidean(2), 15, 1.0, 1.5, 0.1, 12)?;
    let emb = &truth.ground_embedding;
    for c in [1.0, 1.25, 2.0] {
        let r = accuracy(&inst, emb, c)?;
        println!("c = {c}: {}/{} satisfied", r.satisfied(), r.total());
    }
    let r = accuracy(&inst, emb, 1.0)?;
    for v in r.violated.iter().take(5) {
        println!("  {v:?}");
    }
    println!(
        "smallest distortion satisfying everything: {}",
        min_distortion(&inst, emb)?
    );
    Ok(())
}
