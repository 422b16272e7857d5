//! Problem instances: a universe of objects, similar/dissimilar pair labels
//! and the two distance thresholds `u` (similar) and `l` (dissimilar).

mod planted;

pub use planted::{generate_planted, generate_planted_with, PlantedConfig, PlantedTruth};

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Format version written into instance documents.
pub const INSTANCE_VERSION: u32 = 1;

/// Label carried by a constrained pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Similar,
    Dissimilar,
}

/// A validated instance.
///
/// Objects are kept in sorted id order; internal indices refer to that order.
/// Pairs are stored as `(i, j)` with `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    objects: Vec<String>,
    index: HashMap<String, usize>,
    similar: BTreeSet<(usize, usize)>,
    dissimilar: BTreeSet<(usize, usize)>,
    u: f64,
    l: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDocument {
    version: u32,
    objects: Vec<String>,
    u: f64,
    l: f64,
    similar: Vec<(String, String)>,
    dissimilar: Vec<(String, String)>,
}

impl Instance {
    /// Builds an instance from ids and labeled id pairs, checking every invariant.
    pub fn new<I, J>(
        objects: Vec<String>,
        similar: I,
        dissimilar: J,
        u: f64,
        l: f64,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
        J: IntoIterator<Item = (String, String)>,
    {
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "u must be a positive finite number, got {u}"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "l must be a positive finite number, got {l}"
            )));
        }
        let mut objects = objects;
        objects.sort();
        for w in objects.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInstance(format!(
                    "duplicate object id `{}`",
                    w[0]
                )));
            }
        }
        let index: HashMap<String, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();

        let resolve = |a: &str, b: &str| -> Result<(usize, usize)> {
            if a == b {
                return Err(Error::InvalidInstance(format!(
                    "pair ({a}, {a}) repeats an id"
                )));
            }
            let ia = *index.get(a).ok_or_else(|| {
                Error::InvalidInstance(format!("pair mentions unknown object `{a}`"))
            })?;
            let ib = *index.get(b).ok_or_else(|| {
                Error::InvalidInstance(format!("pair mentions unknown object `{b}`"))
            })?;
            Ok((ia.min(ib), ia.max(ib)))
        };

        let mut s = BTreeSet::new();
        for (a, b) in similar {
            s.insert(resolve(&a, &b)?);
        }
        let mut d = BTreeSet::new();
        for (a, b) in dissimilar {
            let p = resolve(&a, &b)?;
            if s.contains(&p) {
                return Err(Error::InvalidInstance(format!(
                    "pair ({}, {}) is labeled both similar and dissimilar",
                    objects[p.0], objects[p.1]
                )));
            }
            d.insert(p);
        }
        Ok(Instance {
            objects,
            index,
            similar: s,
            dissimilar: d,
            u,
            l,
        })
    }

    /// Index-based constructor for callers that already hold sorted ids.
    pub(crate) fn from_parts(
        objects: Vec<String>,
        similar: BTreeSet<(usize, usize)>,
        dissimilar: BTreeSet<(usize, usize)>,
        u: f64,
        l: f64,
    ) -> Self {
        debug_assert!(objects.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(similar.is_disjoint(&dissimilar));
        let index = objects
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Instance {
            objects,
            index,
            similar,
            dissimilar,
            u,
            l,
        }
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn id(&self, i: usize) -> &str {
        &self.objects[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn similar(&self) -> &BTreeSet<(usize, usize)> {
        &self.similar
    }

    pub fn dissimilar(&self) -> &BTreeSet<(usize, usize)> {
        &self.dissimilar
    }

    /// All constrained pairs with their label, in index order.
    pub fn constraints(&self) -> impl Iterator<Item = (usize, usize, ConstraintKind)> + '_ {
        let s = self
            .similar
            .iter()
            .map(|&(a, b)| (a, b, ConstraintKind::Similar));
        let d = self
            .dissimilar
            .iter()
            .map(|&(a, b)| (a, b, ConstraintKind::Dissimilar));
        s.chain(d)
    }

    pub fn num_constraints(&self) -> usize {
        self.similar.len() + self.dissimilar.len()
    }

    pub fn label(&self, a: usize, b: usize) -> Option<ConstraintKind> {
        let p = (a.min(b), a.max(b));
        if self.similar.contains(&p) {
            Some(ConstraintKind::Similar)
        } else if self.dissimilar.contains(&p) {
            Some(ConstraintKind::Dissimilar)
        } else {
            None
        }
    }

    pub fn total_pairs(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1) / 2
    }

    /// True iff every unordered pair carries a label.
    pub fn is_complete(&self) -> bool {
        self.num_constraints() == self.total_pairs()
    }

    pub fn missing_pairs(&self) -> usize {
        self.total_pairs() - self.num_constraints()
    }

    pub(crate) fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteInformation {
                missing: self.missing_pairs(),
            })
        }
    }

    /// Graph on object indices whose edges are the similar pairs.
    pub fn similarity_graph(&self) -> Graph {
        Graph::from_edges(self.n(), self.similar.iter().copied())
    }

    /// Sub-instance induced on `members` (global indices, any order).
    ///
    /// Returns the sub-instance and the map from its local indices back to
    /// global indices.
    pub fn restrict(&self, members: &[usize]) -> (Instance, Vec<usize>) {
        let mut global: Vec<usize> = members.to_vec();
        global.sort_unstable();
        global.dedup();
        let mut local = HashMap::with_capacity(global.len());
        for (i, &g) in global.iter().enumerate() {
            local.insert(g, i);
        }
        let pick = |set: &BTreeSet<(usize, usize)>| -> BTreeSet<(usize, usize)> {
            set.iter()
                .filter_map(|&(a, b)| Some((*local.get(&a)?, *local.get(&b)?)))
                .collect()
        };
        let objects = global.iter().map(|&g| self.objects[g].clone()).collect();
        let sub = Instance::from_parts(
            objects,
            pick(&self.similar),
            pick(&self.dissimilar),
            self.u,
            self.l,
        );
        (sub, global)
    }

    /// Serializes to the instance document (pretty JSON, pairs in id order).
    pub fn to_json(&self) -> String {
        let pairs = |set: &BTreeSet<(usize, usize)>| -> Vec<(String, String)> {
            let mut v: Vec<(String, String)> = set
                .iter()
                .map(|&(a, b)| (self.objects[a].clone(), self.objects[b].clone()))
                .collect();
            v.sort();
            v
        };
        let doc = InstanceDocument {
            version: INSTANCE_VERSION,
            objects: self.objects.clone(),
            u: self.u,
            l: self.l,
            similar: pairs(&self.similar),
            dissimilar: pairs(&self.dissimilar),
        };
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }

    /// Structural report: completeness, label counts, similarity connectivity.
    pub fn validate(&self) -> ValidationReport {
        let comps = self.similarity_graph().components();
        ValidationReport {
            n: self.n(),
            similar: self.similar.len(),
            dissimilar: self.dissimilar.len(),
            complete: self.is_complete(),
            missing_pairs: self.missing_pairs(),
            similarity_components: comps.len(),
            similarity_connected: comps.len() <= 1,
        }
    }
}

/// Parses an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_str(text)?;
    if doc.version != INSTANCE_VERSION {
        return Err(Error::Parse(format!(
            "unsupported instance version {}",
            doc.version
        )));
    }
    Instance::new(doc.objects, doc.similar, doc.dissimilar, doc.u, doc.l)
}

/// Outcome of [`Instance::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub similar: usize,
    pub dissimilar: usize,
    pub complete: bool,
    pub missing_pairs: usize,
    pub similarity_components: usize,
    pub similarity_connected: bool,
}
