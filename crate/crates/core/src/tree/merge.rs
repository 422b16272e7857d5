//! Joining cluster trees under a common root.

use crate::embedding::{Embedding, Placement};
use crate::error::{Error, Result};
use crate::tree_metric::TreeMetric;

/// Id of the new root.
pub const MERGE_ROOT: &str = "root";

/// Hangs every part's tree from a new root by an edge of length `2l` to the
/// part's lexicographically smallest vertex. Vertices are renamed
/// `c{index}/{old id}`; output objects are sorted by id.
///
/// Distances inside a part are unchanged and objects of different parts are
/// at least `4l` apart.
pub fn merge_trees(parts: &[Embedding], l: f64) -> Result<(TreeMetric, Embedding)> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "l must be positive, got {l}"
        )));
    }
    if parts.is_empty() {
        return Err(Error::InvalidParameter("nothing to merge".into()));
    }
    let mut names = vec![MERGE_ROOT.to_string()];
    let mut edges = Vec::new();
    let mut rows: Vec<(String, usize)> = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let Placement::Tree { tree, vertices } = part.placement() else {
            return Err(Error::InvalidParameter(format!(
                "part {i} is not a tree embedding"
            )));
        };
        let base = names.len();
        names.extend(tree.vertices().iter().map(|v| format!("c{i:03}/{v}")));
        edges.extend(
            tree.edges()
                .iter()
                .map(|&(a, b, w)| (base + a, base + b, w)),
        );
        let attach = (0..tree.len())
            .min_by(|&a, &b| tree.vertex_id(a).cmp(tree.vertex_id(b)))
            .expect("nonempty tree");
        edges.push((0, base + attach, 2.0 * l));
        rows.extend(
            part.objects()
                .iter()
                .cloned()
                .zip(vertices.iter().map(|&v| base + v)),
        );
    }
    let merged = TreeMetric::from_indexed(names, edges, 0)?;
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    if rows.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidInstance(
            "an object appears in two parts".into(),
        ));
    }
    let (objects, vertices): (Vec<String>, Vec<usize>) = rows.into_iter().unzip();
    let emb = Embedding::tree(objects, merged.clone(), vertices)?;
    Ok((merged, emb))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(id: &str) -> Embedding {
        let t = TreeMetric::from_indexed(vec!["v".into()], vec![], 0).unwrap();
        Embedding::tree(vec![id.into()], t, vec![0]).unwrap()
    }

    fn path_part(ids: [&str; 3]) -> Embedding {
        let t = TreeMetric::from_indexed(
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1, 0.4), (1, 2, 0.5)],
            0,
        )
        .unwrap();
        Embedding::tree(
            ids.iter().map(|s| s.to_string()).collect(),
            t,
            vec![0, 1, 2],
        )
        .unwrap()
    }

    fn dist(e: &Embedding, a: &str, b: &str) -> f64 {
        let pos = e.position_map();
        let m = e.distance_matrix();
        m[pos[a] * e.len() + pos[b]]
    }

    #[test]
    fn two_singletons_make_a_star() {
        let (tree, emb) = merge_trees(&[single("x"), single("y")], 1.5).unwrap();
        assert_eq!(tree.len(), 3);
        assert_eq!(tree.vertex_id(tree.root()), "root");
        assert_eq!(dist(&emb, "x", "y"), 6.0);
    }

    #[test]
    fn one_part_keeps_distances() {
        let part = path_part(["p", "q", "r"]);
        let (tree, emb) = merge_trees(std::slice::from_ref(&part), 2.0).unwrap();
        assert_eq!(tree.len(), 4);
        for (a, b) in [("p", "q"), ("q", "r"), ("p", "r")] {
            assert_eq!(dist(&emb, a, b), dist(&part, a, b));
        }
    }

    #[test]
    fn parts_are_far_apart() {
        let parts = [
            path_part(["a1", "a2", "a3"]),
            path_part(["b1", "b2", "b3"]),
            single("c1"),
        ];
        let l = 1.0;
        let (tree, emb) = merge_trees(&parts, l).unwrap();
        assert_eq!(tree.edges().len(), tree.len() - 1);
        for a in ["a1", "a2", "a3"] {
            for b in ["b1", "b2", "b3", "c1"] {
                assert!(dist(&emb, a, b) >= 4.0 * l);
            }
        }
        assert_eq!(emb.objects().len(), 7);
    }

    #[test]
    fn duplicate_objects_are_refused() {
        assert!(merge_trees(&[single("x"), single("x")], 1.0).is_err());
    }
}
