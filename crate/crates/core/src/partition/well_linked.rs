//! Recursive removal of sparse similarity cuts under an edge budget.

use serde::{Deserialize, Serialize};

use super::cut::sparsest_cut;
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Constants of the decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct WellLinkedConfig {
    /// Divides the sparsity threshold: `χ = α / (c · ln^{3/2} n · ln ln n)`.
    pub c: f64,
    /// Cuts up to `χ · slack` are accepted, standing in for the
    /// approximation factor of the cut finder.
    pub slack: f64,
}

impl Default for WellLinkedConfig {
    fn default() -> Self {
        WellLinkedConfig { c: 1.0, slack: 1.0 }
    }
}

/// Removed similar edges and the resulting components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellLinkedDecomposition {
    /// Similar pairs removed, `(a, b)` with `a < b`, in removal order.
    pub removed_edges: Vec<(usize, usize)>,
    /// Components of the similarity graph minus the removed edges, sorted.
    pub components: Vec<Vec<usize>>,
    pub alpha: f64,
    /// Sparsity threshold used.
    pub chi: f64,
    /// Sparsity of the sparsest cut found inside each final component
    /// (`None` for singletons).
    pub achieved_expansion: Vec<Option<f64>>,
}

/// `χ` for `n` objects; the logarithms are clamped below at 1 so the
/// threshold never exceeds `α / c`.
pub(crate) fn threshold(alpha: f64, n: usize, c: f64) -> f64 {
    let ln = (n as f64).ln().max(1.0);
    let lnln = ln.ln().max(1.0);
    alpha / (c * ln.powf(1.5) * lnln)
}

/// `α = √ζ · ln^{3/4} n · (ln ln n)^{1/2}`, logarithms clamped at 1, kept below 1.
pub fn imperfect_alpha(zeta: f64, n: usize) -> f64 {
    let ln = (n as f64).ln().max(1.0);
    let lnln = ln.ln().max(1.0);
    (zeta.sqrt() * ln.powf(0.75) * lnln.sqrt()).min(0.99)
}

pub fn well_linked_decomposition(inst: &Instance, alpha: f64) -> Result<WellLinkedDecomposition> {
    well_linked_decomposition_with(inst, alpha, &WellLinkedConfig::default())
}

/// Splits components along cuts of sparsity at most `χ·slack` while the
/// number of removed edges stays within `α·|S ∪ D|`.
pub fn well_linked_decomposition_with(
    inst: &Instance,
    alpha: f64,
    cfg: &WellLinkedConfig,
) -> Result<WellLinkedDecomposition> {
    inst.require_complete()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(cfg.c > 0.0 && cfg.slack > 0.0) {
        return Err(Error::InvalidParameter(
            "c and slack must be positive".into(),
        ));
    }
    let n = inst.n();
    let chi = threshold(alpha, n, cfg.c);
    let budget = (alpha * inst.num_constraints() as f64).floor() as usize;
    let g = inst.similarity_graph();

    let mut removed: Vec<(usize, usize)> = Vec::new();
    let mut done: Vec<(Vec<usize>, Option<f64>)> = Vec::new();
    let mut work: Vec<Vec<usize>> = g.components();
    work.reverse();
    while let Some(comp) = work.pop() {
        if comp.len() < 2 {
            done.push((comp, None));
            continue;
        }
        let local = g.induced(&comp);
        let cut = sparsest_cut(&local)?;
        let accept = cut.sparsity <= chi * cfg.slack && removed.len() + cut.capacity <= budget;
        if !accept {
            done.push((comp, Some(cut.sparsity)));
            continue;
        }
        let mut in_u = vec![false; comp.len()];
        for &v in &cut.side {
            in_u[v] = true;
        }
        for (a, b) in local.edges() {
            if in_u[a] != in_u[b] {
                removed.push((comp[a], comp[b]));
            }
        }
        let u_side: Vec<usize> = cut.side.iter().map(|&v| comp[v]).collect();
        let rest: Vec<usize> = (0..comp.len())
            .filter(|&v| !in_u[v])
            .map(|v| comp[v])
            .collect();
        // both sides go back on the stack, smaller-indexed side first
        for side in [rest, u_side] {
            let mut parts = g.without_edges(&removed).components_within(&side);
            parts.reverse();
            work.extend(parts);
        }
    }
    assert!(
        removed.len() <= budget,
        "well-linked decomposition removed more edges than its budget"
    );
    done.sort_by(|a, b| a.0[0].cmp(&b.0[0]));
    let (components, achieved_expansion) = done.into_iter().unzip();
    Ok(WellLinkedDecomposition {
        removed_edges: removed,
        components,
        alpha,
        chi,
        achieved_expansion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn from_similar(n: usize, similar: &[(usize, usize)]) -> Instance {
        let objects: Vec<String> = (0..n).map(|i| format!("v{i:02}")).collect();
        let s: BTreeSet<_> = similar.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let d = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|p| !s.contains(p))
            .collect();
        Instance::from_parts(objects, s, d, 1.0, 1.5)
    }

    fn two_k5_bridge() -> Instance {
        let mut s = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    s.push((base + i, base + j));
                }
            }
        }
        s.push((4, 5));
        from_similar(10, &s)
    }

    #[test]
    fn complete_similarity_graph_stays_whole() {
        let all: Vec<(usize, usize)> = (0..6)
            .flat_map(|a| (a + 1..6).map(move |b| (a, b)))
            .collect();
        let d = well_linked_decomposition(&from_similar(6, &all), 0.5).unwrap();
        assert!(d.removed_edges.is_empty());
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.achieved_expansion, vec![Some(1.0)]);
    }

    #[test]
    fn existing_components_cost_nothing() {
        let d = well_linked_decomposition(&from_similar(4, &[(0, 1), (2, 3)]), 0.5).unwrap();
        assert!(d.removed_edges.is_empty());
        assert_eq!(d.components, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn bridge_is_removed() {
        let inst = two_k5_bridge();
        // χ ≥ 1/25 needs α ≥ ln(10)^{3/2} / 25
        let alpha = 0.2;
        assert!(threshold(alpha, 10, 1.0) >= 1.0 / 25.0);
        let d = well_linked_decomposition(&inst, alpha).unwrap();
        assert_eq!(d.removed_edges, vec![(4, 5)]);
        assert_eq!(d.components, vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);
        assert!(d.removed_edges.len() as f64 <= alpha * 45.0);
    }

    #[test]
    fn small_alpha_keeps_the_bridge() {
        let d = well_linked_decomposition(&two_k5_bridge(), 0.01).unwrap();
        assert!(d.removed_edges.is_empty());
        assert_eq!(d.components.len(), 1);
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(well_linked_decomposition(&two_k5_bridge(), 0.0).is_err());
        assert!(well_linked_decomposition(&two_k5_bridge(), 1.0).is_err());
    }

    #[test]
    fn alpha_formula() {
        assert_eq!(imperfect_alpha(0.0, 20), 0.0);
        let a = imperfect_alpha(0.02, 20);
        let ln = 20f64.ln();
        assert!((a - 0.02f64.sqrt() * ln.powf(0.75) * ln.ln().sqrt()).abs() < 1e-12);
    }
}
