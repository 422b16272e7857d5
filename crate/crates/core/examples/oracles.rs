//! Exhaustive references for tiny instances.

use contrastive::embedding::Host;
use contrastive::finite::FiniteMetric;
use contrastive::instance::generate_planted;
use contrastive::oracle::{brute_force_finite, brute_force_line_feasible, brute_force_tree_small};

fn main() -> contrastive::error::Result<()> {
    let (inst, _) = generate_planted(Host::Tree, 5, 1.0, 1.5, 0.1, 3)?;
    println!(
        "line feasible: {}",
        brute_force_line_feasible(&inst)?.is_some()
    );

    let tree = brute_force_tree_small(&inst, 0.5, 3, 2, 1.5)?;
    println!("best on T(0.5, 3, 2): {}/{}", tree.satisfied, tree.total);

    let pair = FiniteMetric::new(
        vec!["a".into(), "b".into()],
        vec![vec![0.0, 2.0], vec![2.0, 0.0]],
    )?;
    let two = brute_force_finite(&inst, &pair, 1.0)?;
    println!("best on two points: {}/{}", two.satisfied, two.total);
    Ok(())
}
