//! Isoperimetric core of a component.

use super::cut::sparsest_cut;
use crate::graph::Graph;

/// Core with `c' = 1`.
pub fn extract_core(
    s_graph: &Graph,
    component: &[usize],
    f: &[(usize, usize)],
    alpha_prime: f64,
) -> Vec<usize> {
    extract_core_with(s_graph, component, f, alpha_prime, 1.0)
}

/// Returns `J ⊆ component` that contains no edge of `f` and in which the
/// cut finder sees no `U` with `|E_S(U, J∖U)| < c'·α'·|U|·|J∖U|`.
///
/// Starts from the largest component of the similarity graph minus `f`,
/// then alternately deletes the smaller side of a violating cut and one
/// endpoint of any `f` edge still inside, until neither applies.
pub fn extract_core_with(
    s_graph: &Graph,
    component: &[usize],
    f: &[(usize, usize)],
    alpha_prime: f64,
    c_prime: f64,
) -> Vec<usize> {
    let pruned = s_graph.without_edges(f);
    let Some(mut core) = pruned
        .components_within(component)
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
    else {
        return Vec::new();
    };
    let threshold = c_prime * alpha_prime;
    loop {
        // an f edge with both ends inside: drop the endpoint touching more of them
        let mut inside = vec![false; s_graph.n()];
        core.iter().for_each(|&v| inside[v] = true);
        let mut load = std::collections::BTreeMap::<usize, usize>::new();
        for &(a, b) in f {
            if inside[a] && inside[b] {
                *load.entry(a).or_insert(0) += 1;
                *load.entry(b).or_insert(0) += 1;
            }
        }
        if let Some((&v, _)) = load.iter().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0))) {
            core.retain(|&w| w != v);
            continue;
        }
        if core.len() < 2 {
            return core;
        }
        let local = pruned.induced(&core);
        let cut = sparsest_cut(&local).expect("core has at least two vertices");
        if cut.sparsity >= threshold {
            return core;
        }
        let drop: Vec<usize> = cut.side.iter().map(|&v| core[v]).collect();
        core.retain(|v| !drop.contains(v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    #[test]
    fn expander_without_f_is_kept() {
        let g = complete(6);
        assert_eq!(
            extract_core(&g, &[0, 1, 2, 3, 4, 5], &[], 0.5),
            vec![0, 1, 2, 3, 4, 5]
        );
    }

    #[test]
    fn single_f_edge_leaves_one_vertex() {
        let g = Graph::from_edges(2, [(0, 1)]);
        assert_eq!(extract_core(&g, &[0, 1], &[(0, 1)], 0.5).len(), 1);
    }

    #[test]
    fn k6_with_star_removed() {
        let g = complete(6);
        let f: Vec<(usize, usize)> = (1..6).map(|w| (0, w)).collect();
        let j = extract_core(&g, &[0, 1, 2, 3, 4, 5], &f, 0.5);
        assert_eq!(j, vec![1, 2, 3, 4, 5]);
        // all 10 pairs inside J are labeled in a complete instance; 15 pairs overall
        let inside = j.len() * (j.len() - 1) / 2;
        assert_eq!(inside, 10);
        assert!(inside as f64 >= (1.0 - 5.0 / (0.5 * 15.0)) * 15.0);
    }

    #[test]
    fn f_edge_inside_connected_remainder_is_broken() {
        // triangle minus f = path through 2; the core must still avoid the f edge
        let g = complete(3);
        let j = extract_core(&g, &[0, 1, 2], &[(0, 1)], 0.1);
        assert!(!(j.contains(&0) && j.contains(&1)));
        assert!(!j.is_empty());
    }
}
