//! Generate planted instances for every host and print their summaries.
//!
//! `cargo run --example generate_instances`

use contrastive::embedding::Host;
use contrastive::instance::generate_planted;

fn main() -> contrastive::error::Result<()> {
    for host in [
        Host::Line,
        Host::Euclidean(2),
        Host::Euclidean(3),
        Host::Tree,
    ] {
        let (inst, truth) = generate_planted(host, 16, 1.0, 1.5, 0.05, 7)?;
        let report = inst.validate();
        println!(
            "{host}: {} objects, {} similar, {} dissimilar, {} flipped labels, complete: {}",
            inst.n(),
            inst.similar().len(),
            inst.dissimilar().len(),
            truth.flipped.len(),
            inst.is_complete()
        );
        println!("  {report:?}");
    }
    let (inst, _) = generate_planted(Host::Line, 4, 1.0, 2.0, 0.0, 1)?;
    println!("\nsmall instance as JSON:\n{}", inst.to_json());
    Ok(())
}
