//! Decide whether a perfect line embedding exists and build one.

use contrastive::embedding::Host;
use contrastive::evaluation::accuracy;
use contrastive::instance::{generate_planted, Instance};
use contrastive::line::learn_line;

fn main() -> contrastive::error::Result<()> {
    let (inst, _) = generate_planted(Host::Line, 10, 1.0, 2.0, 0.0, 3)?;
    let emb = learn_line(&inst)?.expect("a planted noiseless instance is feasible");
    println!("accuracy {} at c = 1", accuracy(&inst, &emb, 1.0)?.accuracy);
    println!("{}", emb.to_json());

    // a center similar to three mutually dissimilar leaves does not fit on a line
    let star = Instance::new(
        ["c", "a", "b", "d"].map(String::from).to_vec(),
        [("c", "a"), ("c", "b"), ("c", "d")].map(|(x, y)| (x.to_string(), y.to_string())),
        [("a", "b"), ("a", "d"), ("b", "d")].map(|(x, y)| (x.to_string(), y.to_string())),
        1.0,
        1.5,
    )?;
    println!(
        "star on a line: {:?}",
        learn_line(&star)?.map(|e| e.to_json())
    );
    Ok(())
}
