//! Embedding a cluster into an explicit finite metric space.
//!
//! The search follows the count-table construction: the similar and
//! dissimilar graphs of the cluster are partitioned pseudoregularly, the
//! partitions are refined into a common one, and candidate tables of
//! "how many objects of part `U` land on point `p`" are enumerated and
//! realized as assignments.

mod pseudoregular;
mod search;

pub use pseudoregular::{
    cut_defect, exact_defect, pseudoregular_partition, refine_partitions, PartitionConfig,
    PseudoregularPartition,
};
pub use search::{
    embed_into_finite_metric, embed_with_host, CountTable, FiniteEmbedding, SearchOptions,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything the count-table search can place objects on.
///
/// `within` and `beyond` default to plain distance comparisons; hosts with
/// cheaper exact tests (squared Euclidean distances) override them.
pub trait SearchHost: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn distance(&self, p: usize, q: usize) -> f64;

    fn within(&self, p: usize, q: usize, radius: f64) -> bool {
        self.distance(p, q) <= radius
    }

    fn beyond(&self, p: usize, q: usize, radius: f64) -> bool {
        self.distance(p, q) >= radius
    }
}

/// Explicit point set with a symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    points: Vec<String>,
    matrix: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricDocument {
    pub points: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

const TRIANGLE_TOL: f64 = 1e-9;

impl FiniteMetric {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle inequality.
    pub fn new(points: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidMetric("no points".into()));
        }
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("matrix must be {n}x{n}")));
        }
        let mut sorted = points.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMetric("duplicate point id".into()));
        }
        for i in 0..n {
            if matrix[i][i] != 0.0 {
                return Err(Error::InvalidMetric(format!(
                    "nonzero diagonal at {}",
                    points[i]
                )));
            }
            for j in 0..n {
                let d = matrix[i][j];
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::InvalidMetric(format!("bad distance {d}")));
                }
                if d != matrix[j][i] {
                    return Err(Error::InvalidMetric(format!(
                        "asymmetric entry ({}, {})",
                        points[i], points[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][j] > matrix[i][k] + matrix[k][j] + TRIANGLE_TOL {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({}, {}, {})",
                            points[i], points[k], points[j]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric {
            points,
            matrix: matrix.into_iter().flatten().collect(),
        })
    }

    /// Metric whose validity is guaranteed by construction (tree or lattice distances).
    pub(crate) fn from_trusted(points: Vec<String>, matrix: Vec<f64>) -> Self {
        debug_assert_eq!(matrix.len(), points.len() * points.len());
        FiniteMetric { points, matrix }
    }

    pub fn from_document(doc: FiniteMetricDocument) -> Result<Self> {
        Self::new(doc.points, doc.matrix)
    }

    pub fn to_document(&self) -> FiniteMetricDocument {
        let n = self.points.len();
        FiniteMetricDocument {
            points: self.points.clone(),
            matrix: self.matrix.chunks(n).map(|r| r.to_vec()).collect(),
        }
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p == id)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl SearchHost for FiniteMetric {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn distance(&self, p: usize, q: usize) -> f64 {
        self.matrix[p * self.points.len() + q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_metric_axioms() {
        let ids = vec!["p".to_string(), "q".to_string(), "r".to_string()];
        let ok = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        assert!(FiniteMetric::new(ids.clone(), ok).is_ok());
        let tri = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        assert!(matches!(
            FiniteMetric::new(ids.clone(), tri),
            Err(Error::InvalidMetric(_))
        ));
        let asym = vec![
            vec![0.0, 1.0, 1.0],
            vec![2.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert!(FiniteMetric::new(ids, asym).is_err());
    }

    #[test]
    fn document_round_trip() {
        let m = FiniteMetric::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
        )
        .unwrap();
        let json = serde_json::to_string(&m.to_document()).unwrap();
        let back = FiniteMetric::from_document(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.distance(0, 1), 2.0);
    }
}
