//! Random-shift annuli around a fixed object.
//!
//! With shift `α ∈ [0,1)`, object `x` lands in ring
//! `i = ⌊2ρ_S(v*, x)/Δ − α⌋`, so ring `i` holds distances in
//! `[Δ(i+α)/2, Δ(i+α+1)/2)`. Ring `−1` catches the distances below `Δα/2`.
//! Clusters are the similarity components inside each ring; a similar edge
//! is cut only when a ring boundary falls between its endpoints' distances,
//! which differ by at most `u`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimilarityMetric;
use crate::instance::Instance;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnuliPartition {
    pub shift: f64,
    pub delta: f64,
    /// Center object, the smallest index of the component.
    pub v_star: usize,
    /// Ring of each member, listed alongside `members`.
    pub members: Vec<usize>,
    pub ring_index: Vec<i64>,
    /// Sorted clusters ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
    pub cut_similar_pairs: Vec<(usize, usize)>,
}

/// Annuli of a connected instance with a shift drawn from `seed`.
pub fn annuli_partition(inst: &Instance, delta: f64, seed: u64) -> Result<AnnuliPartition> {
    let rho = SimilarityMetric::new(inst);
    if rho.graph().components().len() > 1 {
        return Err(Error::NotConnected);
    }
    let members: Vec<usize> = (0..inst.n()).collect();
    annuli_with_shift(&rho, &members, delta, draw_shift(seed))
}

pub(crate) fn draw_shift(seed: u64) -> f64 {
    rng::stream(seed, 0).gen_range(0.0..1.0)
}

/// Annuli of one similarity component `members` for a given shift.
pub fn annuli_with_shift(
    rho: &SimilarityMetric,
    members: &[usize],
    delta: f64,
    shift: f64,
) -> Result<AnnuliPartition> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive and finite, got {delta}"
        )));
    }
    if !(0.0..1.0).contains(&shift) {
        return Err(Error::InvalidParameter(format!(
            "shift must lie in [0, 1), got {shift}"
        )));
    }
    let mut members = members.to_vec();
    members.sort_unstable();
    let Some(&v_star) = members.first() else {
        return Err(Error::EmptyGraph);
    };
    let mut ring_index = Vec::with_capacity(members.len());
    for &x in &members {
        let r = rho.rho(v_star, x);
        if !r.is_finite() {
            return Err(Error::NotConnected);
        }
        ring_index.push((2.0 * r / delta - shift).floor() as i64);
    }
    let mut rings: std::collections::BTreeMap<i64, Vec<usize>> = std::collections::BTreeMap::new();
    for (&x, &i) in members.iter().zip(&ring_index) {
        rings.entry(i).or_default().push(x);
    }
    let g = rho.graph();
    let mut clusters: Vec<Vec<usize>> = rings
        .values()
        .flat_map(|ring| g.components_within(ring))
        .collect();
    clusters.sort_by_key(|c| c[0]);
    let mut ring_of = std::collections::HashMap::new();
    for (&x, &i) in members.iter().zip(&ring_index) {
        ring_of.insert(x, i);
    }
    let cut_similar_pairs = g
        .edges()
        .filter(|(a, b)| matches!((ring_of.get(a), ring_of.get(b)), (Some(x), Some(y)) if x != y))
        .collect();
    Ok(AnnuliPartition {
        shift,
        delta,
        v_star,
        members,
        ring_index,
        clusters,
        cut_similar_pairs,
    })
}
