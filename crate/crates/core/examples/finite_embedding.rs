//! Place a small instance onto an explicit three-point metric with the
//! count-table search, then compare against the exhaustive optimum.

use contrastive::embedding::Host;
use contrastive::finite::{embed_into_finite_metric, FiniteMetric, SearchOptions};
use contrastive::instance::generate_planted;
use contrastive::oracle::brute_force_finite;

fn main() -> contrastive::error::Result<()> {
    let host = FiniteMetric::new(
        vec!["left".into(), "mid".into(), "right".into()],
        vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ],
    )?;
    let (inst, _) = generate_planted(Host::Line, 8, 1.0, 2.0, 0.1, 11)?;
    let (emb, found) =
        embed_into_finite_metric(&inst, &host, 0.25, 0.0, &SearchOptions::with_budget(10_000))?;
    let best = brute_force_finite(&inst, &host, 1.0)?;
    println!(
        "search: {}/{} satisfied after {} nodes (complete: {}); optimum {}/{}",
        found.satisfied, found.total, found.nodes, found.complete, best.satisfied, best.total
    );
    println!("parts {:?}, table {:?}", found.parts, found.table);
    println!("{}", emb.to_json());
    Ok(())
}
