//! Learn a tree embedding from noiseless labels and inspect the host tree.

use contrastive::embedding::Host;
use contrastive::instance::generate_planted;
use contrastive::tree::{canonical_shape, learn_tree_perfect, TreeConfig};

fn main() -> contrastive::error::Result<()> {
    let (inst, _) = generate_planted(Host::Tree, 18, 1.0, 1.5, 0.0, 2)?;
    let shape = canonical_shape(&inst, 0.25, 0.5)?;
    println!(
        "canonical tree: edge {}, depth {}, arity {}, about {:.3e} vertices",
        shape.alpha,
        shape.depth,
        shape.arity,
        shape.vertex_count()
    );
    let out = learn_tree_perfect(&inst, 0.25, 0.5, 0, &TreeConfig::default())?;
    println!(
        "accuracy {:.3} at c = 1.5 on a tree of {} vertices",
        out.accuracy,
        out.tree.len()
    );
    println!("{}", out.embedding.to_json());
    Ok(())
}
