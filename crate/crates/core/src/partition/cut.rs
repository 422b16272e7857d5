//! Uniform-demand sparsest cut: exact enumeration on small graphs, a
//! spectral sweep on larger ones.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Graphs up to this many vertices are cut exactly.
pub const EXACT_CUT_LIMIT: usize = 16;

/// A cut `(U, V \ U)` with unit capacities and unit demands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    /// The smaller side (the one holding vertex 0 on equal sizes), sorted.
    pub side: Vec<usize>,
    /// Edges crossing the cut.
    pub capacity: usize,
    /// `|U|·|V \ U|`.
    pub demand: usize,
    pub sparsity: f64,
}

impl Cut {
    fn sparser_than(&self, other: &Cut) -> bool {
        // exact comparison of capacity/demand, then the lexicographic rule
        let lhs = self.capacity as u128 * other.demand as u128;
        let rhs = other.capacity as u128 * self.demand as u128;
        match lhs.cmp(&rhs) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.side < other.side,
        }
    }
}

/// Builds the cut with `in_u` marking one side.
pub fn cut_between(graph: &Graph, in_u: &[bool]) -> Cut {
    let n = graph.n();
    let size = in_u.iter().filter(|&&b| b).count();
    let capacity = graph.edges().filter(|&(a, b)| in_u[a] != in_u[b]).count();
    let demand = size * (n - size);
    let flip = size * 2 > n || (size * 2 == n && !in_u[0]);
    let side: Vec<usize> = (0..n).filter(|&v| in_u[v] != flip).collect();
    Cut {
        side,
        capacity,
        demand,
        sparsity: capacity as f64 / demand as f64,
    }
}

/// Minimum-sparsity cut among the candidates (all cuts up to
/// [`EXACT_CUT_LIMIT`] vertices, sweep cuts of the Fiedler vector above).
/// Ties go to the lexicographically smallest reported side.
pub fn sparsest_cut(graph: &Graph) -> Result<Cut> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n == 1 {
        return Err(Error::InvalidParameter("a single vertex has no cut".into()));
    }
    let comps = graph.components();
    if comps.len() > 1 {
        // zero-capacity cuts; pick by the tie rule
        return Ok(comps
            .iter()
            .map(|c| {
                let mut mask = vec![false; n];
                c.iter().for_each(|&v| mask[v] = true);
                cut_between(graph, &mask)
            })
            .reduce(|a, b| if b.sparser_than(&a) { b } else { a })
            .expect("at least two components"));
    }
    if n <= EXACT_CUT_LIMIT {
        Ok(exact(graph))
    } else {
        Ok(sweep(graph))
    }
}

fn exact(graph: &Graph) -> Cut {
    let n = graph.n();
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut best: Option<Cut> = None;
    // vertex 0 always on the enumerated side; skip the full set
    for rest in 0u32..(1u32 << (n - 1)) - 1 {
        let mask = (rest << 1) | 1;
        let size = mask.count_ones() as usize;
        let capacity = edges
            .iter()
            .filter(|&&(a, b)| (mask >> a & 1) != (mask >> b & 1))
            .count();
        let demand = size * (n - size);
        if let Some(b) = &best {
            // quick reject before materializing the side
            if (capacity as u128) * (b.demand as u128) > (b.capacity as u128) * (demand as u128) {
                continue;
            }
        }
        let in_u: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let cut = cut_between(graph, &in_u);
        if best.as_ref().is_none_or(|b| cut.sparser_than(b)) {
            best = Some(cut);
        }
    }
    best.expect("graphs with two or more vertices have cuts")
}

fn sweep(graph: &Graph) -> Cut {
    let n = graph.n();
    let deg: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64).collect();
    let mut lap = DMatrix::<f64>::identity(n, n);
    for (a, b) in graph.edges() {
        let w = 1.0 / (deg[a] * deg[b]).sqrt();
        lap[(a, b)] -= w;
        lap[(b, a)] -= w;
    }
    let eig = SymmetricEigen::new(lap);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .total_cmp(&eig.eigenvalues[j])
            .then(i.cmp(&j))
    });
    let fiedler = eig.eigenvectors.column(idx[1]);
    let score: Vec<f64> = (0..n).map(|v| fiedler[v] / deg[v].sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));
    let mut in_u = vec![false; n];
    let mut best: Option<Cut> = None;
    for &v in &order[..n - 1] {
        in_u[v] = true;
        let cut = cut_between(graph, &in_u);
        if best.as_ref().is_none_or(|b| cut.sparser_than(b)) {
            best = Some(cut);
        }
    }
    best.expect("n >= 2")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_cliques(a: usize, b: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..a {
            for j in i + 1..a {
                edges.push((i, j));
            }
        }
        for i in a..a + b {
            for j in i + 1..a + b {
                edges.push((i, j));
            }
        }
        edges.push((a - 1, a));
        Graph::from_edges(a + b, edges)
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    #[test]
    fn bridge_between_cliques() {
        let cut = sparsest_cut(&two_cliques(4, 4)).unwrap();
        assert_eq!(cut.side, vec![0, 1, 2, 3]);
        assert_eq!(cut.capacity, 1);
        assert_eq!(cut.sparsity, 1.0 / 16.0);
    }

    #[test]
    fn complete_graph_has_sparsity_one() {
        for n in 2..9 {
            assert_eq!(sparsest_cut(&complete(n)).unwrap().sparsity, 1.0);
        }
        let one_edge = sparsest_cut(&Graph::from_edges(2, [(0, 1)])).unwrap();
        assert_eq!((one_edge.side.clone(), one_edge.sparsity), (vec![0], 1.0));
    }

    #[test]
    fn disconnected_graph_gives_zero_cut() {
        let g = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4)]);
        let cut = sparsest_cut(&g).unwrap();
        assert_eq!(cut.sparsity, 0.0);
        assert_eq!(cut.side, vec![0, 1]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            sparsest_cut(&Graph::new(0)),
            Err(Error::EmptyGraph)
        ));
        assert!(sparsest_cut(&Graph::new(1)).is_err());
    }

    #[test]
    fn sweep_finds_bridge_in_large_cliques() {
        let g = two_cliques(12, 13);
        let cut = sparsest_cut(&g).unwrap();
        assert_eq!(cut.capacity, 1);
        assert_eq!(cut.side, (0..12).collect::<Vec<_>>());
    }
}
