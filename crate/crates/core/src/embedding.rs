//! Embeddings of objects into a host metric, and their document format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{FiniteMetric, SearchHost};
use crate::tree_metric::TreeMetric;

pub const EMBEDDING_VERSION: u32 = 1;

/// Host space descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Host {
    Line,
    Euclidean(usize),
    Tree,
    Finite,
}

impl fmt::Display for Host {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Host::Line => write!(f, "line"),
            Host::Euclidean(d) => write!(f, "euclidean({d})"),
            Host::Tree => write!(f, "tree"),
            Host::Finite => write!(f, "finite"),
        }
    }
}

/// Where the objects went.
#[derive(Clone, Debug, PartialEq)]
pub enum Placement {
    Line(Vec<f64>),
    Euclidean {
        dim: usize,
        points: Vec<Vec<f64>>,
    },
    Tree {
        tree: TreeMetric,
        vertices: Vec<usize>,
    },
    Finite {
        metric: FiniteMetric,
        points: Vec<usize>,
    },
}

/// A map from object ids to points of a host. `objects[i]` sits at the
/// `i`-th entry of the placement.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    objects: Vec<String>,
    placement: Placement,
}

impl Embedding {
    pub fn line(objects: Vec<String>, coords: Vec<f64>) -> Result<Self> {
        Self::new(objects, Placement::Line(coords))
    }

    pub fn euclidean(objects: Vec<String>, dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(objects, Placement::Euclidean { dim, points })
    }

    pub fn tree(objects: Vec<String>, tree: TreeMetric, vertices: Vec<usize>) -> Result<Self> {
        Self::new(objects, Placement::Tree { tree, vertices })
    }

    pub fn finite(objects: Vec<String>, metric: FiniteMetric, points: Vec<usize>) -> Result<Self> {
        Self::new(objects, Placement::Finite { metric, points })
    }

    pub fn new(objects: Vec<String>, placement: Placement) -> Result<Self> {
        let n = objects.len();
        let len = match &placement {
            Placement::Line(c) => {
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite coordinate".into()));
                }
                c.len()
            }
            Placement::Euclidean { dim, points } => {
                for p in points {
                    if p.len() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            found: p.len(),
                        });
                    }
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidParameter("non-finite coordinate".into()));
                    }
                }
                points.len()
            }
            Placement::Tree { tree, vertices } => {
                if vertices.iter().any(|&v| v >= tree.len()) {
                    return Err(Error::InvalidTree(
                        "assignment references a missing vertex".into(),
                    ));
                }
                vertices.len()
            }
            Placement::Finite { metric, points } => {
                if points.iter().any(|&p| p >= metric.len()) {
                    return Err(Error::InvalidMetric(
                        "assignment references a missing point".into(),
                    ));
                }
                points.len()
            }
        };
        if len != n {
            return Err(Error::InvalidParameter(format!(
                "{n} objects but {len} placed points"
            )));
        }
        let mut seen = objects.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("object assigned twice".into()));
        }
        Ok(Embedding { objects, placement })
    }

    pub fn host(&self) -> Host {
        match &self.placement {
            Placement::Line(_) => Host::Line,
            Placement::Euclidean { dim, .. } => Host::Euclidean(*dim),
            Placement::Tree { .. } => Host::Tree,
            Placement::Finite { .. } => Host::Finite,
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn tree_metric(&self) -> Option<&TreeMetric> {
        match &self.placement {
            Placement::Tree { tree, .. } => Some(tree),
            _ => None,
        }
    }

    /// Position of each id within this embedding.
    pub fn position_map(&self) -> HashMap<&str, usize> {
        self.objects
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect()
    }

    /// Full distance matrix between embedded objects (row-major, `len()²`).
    ///
    /// Tree distances use one traversal per distinct occupied vertex.
    pub fn distance_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n * n];
        match &self.placement {
            Placement::Line(c) => {
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = (c[i] - c[j]).abs();
                    }
                }
            }
            Placement::Euclidean { points, .. } => {
                for i in 0..n {
                    for j in i + 1..n {
                        let d = euclid(&points[i], &points[j]);
                        out[i * n + j] = d;
                        out[j * n + i] = d;
                    }
                }
            }
            Placement::Tree { tree, vertices } => {
                let mut cache: HashMap<usize, Vec<f64>> = HashMap::new();
                for i in 0..n {
                    let row = cache
                        .entry(vertices[i])
                        .or_insert_with(|| tree.distances_from(vertices[i]));
                    for j in 0..n {
                        out[i * n + j] = row[vertices[j]];
                    }
                }
            }
            Placement::Finite { metric, points } => {
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = metric.distance(points[i], points[j]);
                    }
                }
            }
        }
        out
    }

    /// Serializes to the embedding document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("embedding serializes")
    }

    pub fn to_document(&self) -> EmbeddingDocument {
        let body = match &self.placement {
            Placement::Line(c) => Body::Line {
                assignment: self
                    .objects
                    .iter()
                    .cloned()
                    .zip(c.iter().copied())
                    .collect(),
            },
            Placement::Euclidean { dim, points } => Body::Euclidean {
                dim: *dim,
                assignment: self
                    .objects
                    .iter()
                    .cloned()
                    .zip(points.iter().cloned())
                    .collect(),
            },
            Placement::Tree { tree, vertices } => {
                let doc = tree.to_document();
                Body::Tree {
                    vertices: doc.vertices,
                    edges: doc.edges,
                    root: doc.root,
                    assignment: self
                        .objects
                        .iter()
                        .cloned()
                        .zip(vertices.iter().map(|&v| tree.vertex_id(v).to_string()))
                        .collect(),
                }
            }
            Placement::Finite { metric, points } => {
                let doc = metric.to_document();
                Body::Finite {
                    points: doc.points,
                    matrix: doc.matrix,
                    assignment: self
                        .objects
                        .iter()
                        .cloned()
                        .zip(points.iter().map(|&p| metric.points()[p].clone()))
                        .collect(),
                }
            }
        };
        EmbeddingDocument {
            version: EMBEDDING_VERSION,
            body,
        }
    }

    pub fn from_document(doc: EmbeddingDocument) -> Result<Self> {
        if doc.version != EMBEDDING_VERSION {
            return Err(Error::Parse(format!(
                "unsupported embedding version {}",
                doc.version
            )));
        }
        match doc.body {
            Body::Line { assignment } => {
                let (objects, coords) = assignment.into_iter().unzip();
                Embedding::line(objects, coords)
            }
            Body::Euclidean { dim, assignment } => {
                let (objects, points) = assignment.into_iter().unzip();
                Embedding::euclidean(objects, dim, points)
            }
            Body::Tree {
                vertices,
                edges,
                root,
                assignment,
            } => {
                let tree = TreeMetric::new(vertices, edges, &root)?;
                let mut objects = Vec::with_capacity(assignment.len());
                let mut placed = Vec::with_capacity(assignment.len());
                for (obj, v) in assignment {
                    let idx = tree.index_of(&v).ok_or_else(|| {
                        Error::InvalidTree(format!(
                            "object `{obj}` assigned to unknown vertex `{v}`"
                        ))
                    })?;
                    objects.push(obj);
                    placed.push(idx);
                }
                Embedding::tree(objects, tree, placed)
            }
            Body::Finite {
                points,
                matrix,
                assignment,
            } => {
                let metric = FiniteMetric::new(points, matrix)?;
                let mut objects = Vec::with_capacity(assignment.len());
                let mut placed = Vec::with_capacity(assignment.len());
                for (obj, p) in assignment {
                    let idx = metric.index_of(&p).ok_or_else(|| {
                        Error::InvalidMetric(format!(
                            "object `{obj}` assigned to unknown point `{p}`"
                        ))
                    })?;
                    objects.push(obj);
                    placed.push(idx);
                }
                Embedding::finite(objects, metric, placed)
            }
        }
    }
}

/// Parses an embedding document.
pub fn parse_embedding(text: &str) -> Result<Embedding> {
    let doc: EmbeddingDocument = serde_json::from_str(text)?;
    Embedding::from_document(doc)
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Versioned embedding document; the host-specific fields sit next to `host`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDocument {
    pub version: u32,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "host", rename_all = "lowercase")]
pub enum Body {
    Line {
        assignment: BTreeMap<String, f64>,
    },
    Euclidean {
        dim: usize,
        assignment: BTreeMap<String, Vec<f64>>,
    },
    Tree {
        vertices: Vec<String>,
        edges: Vec<(String, String, f64)>,
        root: String,
        assignment: BTreeMap<String, String>,
    },
    Finite {
        points: Vec<String>,
        matrix: Vec<Vec<f64>>,
        assignment: BTreeMap<String, String>,
    },
}
