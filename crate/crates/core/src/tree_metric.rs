//! Weighted trees and their shortest-path metric.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite tree with positive edge lengths and a designated root.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMetric {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, f64)>>,
    root: usize,
}

/// Serialized form of a tree: `{vertices, edges: [[v, w, length]], root}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
    pub root: String,
}

impl TreeMetric {
    /// Builds and validates a tree. Edge endpoints are vertex ids.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, f64)>,
        root: &str,
    ) -> Result<Self> {
        let index: HashMap<String, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        if index.len() != vertices.len() {
            return Err(Error::InvalidTree("duplicate vertex id".into()));
        }
        let lookup = |v: &str| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| Error::InvalidTree(format!("edge mentions unknown vertex `{v}`")))
        };
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b, len) in &edges {
            idx_edges.push((lookup(a)?, lookup(b)?, *len));
        }
        let root = lookup(root)?;
        Self::from_indexed(vertices, idx_edges, root)
    }

    /// Builds a tree from index-based edges.
    pub fn from_indexed(
        vertices: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
        root: usize,
    ) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::InvalidTree("tree has no vertices".into()));
        }
        if root >= n {
            return Err(Error::InvalidTree("root is not a vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} vertices need {} edges, found {}",
                n,
                n - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b, len) in &edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidTree(format!("bad edge ({a}, {b})")));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidTree(format!(
                    "edge length must be positive, got {len}"
                )));
            }
            adj[a].push((b, len));
            adj[b].push((a, len));
        }
        // n - 1 edges plus connectivity implies acyclic
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return Err(Error::InvalidTree(
                "edges do not connect all vertices".into(),
            ));
        }
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect::<HashMap<_, _>>();
        if index.len() != n {
            return Err(Error::InvalidTree("duplicate vertex id".into()));
        }
        Ok(TreeMetric {
            vertices,
            index,
            edges,
            adj,
            root,
        })
    }

    pub fn from_document(doc: TreeDocument) -> Result<Self> {
        Self::new(doc.vertices, doc.edges, &doc.root)
    }

    pub fn to_document(&self) -> TreeDocument {
        TreeDocument {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b, len)| (self.vertices[a].clone(), self.vertices[b].clone(), len))
                .collect(),
            root: self.vertices[self.root].clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Path lengths from `source` to every vertex.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::NAN; self.len()];
        dist[source] = 0.0;
        let mut stack = vec![source];
        while let Some(v) = stack.pop() {
            for &(w, len) in &self.adj[v] {
                if dist[w].is_nan() {
                    dist[w] = dist[v] + len;
                    stack.push(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distances_from(a)[b]
    }

    /// Largest vertex-to-vertex distance (two sweeps).
    pub fn diameter(&self) -> f64 {
        let d0 = self.distances_from(self.root);
        let far = argmax(&d0);
        let d1 = self.distances_from(far);
        d1[argmax(&d1)]
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Four-point condition on a distance function: among the three pairings of
/// four points, the two largest sums agree (up to `tol`).
pub fn four_point_holds(
    d: impl Fn(usize, usize) -> f64,
    a: usize,
    b: usize,
    c: usize,
    e: usize,
    tol: f64,
) -> bool {
    let mut sums = [d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)];
    sums.sort_by(|x, y| x.total_cmp(y));
    (sums[2] - sums[1]).abs() <= tol
}
