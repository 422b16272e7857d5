//! Constraint satisfaction under contrastive distortion.
//!
//! A similar pair is satisfied when its distance is at most `u·c`, a
//! dissimilar pair when it is at least `l/c`. Boundaries count as satisfied,
//! and comparisons allow an absolute slack of [`DEFAULT_TOLERANCE`] in favor
//! of satisfaction.

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::instance::{ConstraintKind, Instance};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Threshold test with the default tolerance.
pub fn satisfies(kind: ConstraintKind, distance: f64, u: f64, l: f64, c: f64) -> Result<bool> {
    satisfies_with_tolerance(kind, distance, u, l, c, DEFAULT_TOLERANCE)
}

pub fn satisfies_with_tolerance(
    kind: ConstraintKind,
    distance: f64,
    u: f64,
    l: f64,
    c: f64,
    tol: f64,
) -> Result<bool> {
    if c.is_nan() || c < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "distortion c must be at least 1, got {c}"
        )));
    }
    Ok(check(kind, distance, u, l, c, tol))
}

#[inline]
pub(crate) fn check(kind: ConstraintKind, distance: f64, u: f64, l: f64, c: f64, tol: f64) -> bool {
    match kind {
        ConstraintKind::Similar => distance <= u * c + tol,
        ConstraintKind::Dissimilar => distance >= l / c - tol,
    }
}

/// One unsatisfied constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub a: String,
    pub b: String,
    pub kind: ConstraintKind,
    pub distance: f64,
}

/// Outcome of [`accuracy`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub satisfied_similar: usize,
    pub satisfied_dissimilar: usize,
    pub total_similar: usize,
    pub total_dissimilar: usize,
    pub violated: Vec<Violation>,
    pub accuracy: f64,
    pub c_used: f64,
}

impl AccuracyReport {
    pub fn satisfied(&self) -> usize {
        self.satisfied_similar + self.satisfied_dissimilar
    }

    pub fn total(&self) -> usize {
        self.total_similar + self.total_dissimilar
    }
}

/// Maps instance indices to rows of `emb.distance_matrix()`.
fn align(inst: &Instance, emb: &Embedding) -> Result<Vec<usize>> {
    if inst.objects() == emb.objects() {
        return Ok((0..inst.n()).collect());
    }
    let pos = emb.position_map();
    inst.objects()
        .iter()
        .map(|id| {
            pos.get(id.as_str())
                .copied()
                .ok_or_else(|| Error::MissingAssignment(id.clone()))
        })
        .collect()
}

/// Scores every constraint of `inst` under `emb` at distortion `c`.
pub fn accuracy(inst: &Instance, emb: &Embedding, c: f64) -> Result<AccuracyReport> {
    accuracy_with_tolerance(inst, emb, c, DEFAULT_TOLERANCE)
}

pub fn accuracy_with_tolerance(
    inst: &Instance,
    emb: &Embedding,
    c: f64,
    tol: f64,
) -> Result<AccuracyReport> {
    if c.is_nan() || c < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "distortion c must be at least 1, got {c}"
        )));
    }
    let rows = align(inst, emb)?;
    let m = emb.len();
    let dist = emb.distance_matrix();
    let (u, l) = (inst.u(), inst.l());
    let mut report = AccuracyReport {
        satisfied_similar: 0,
        satisfied_dissimilar: 0,
        total_similar: inst.similar().len(),
        total_dissimilar: inst.dissimilar().len(),
        violated: Vec::new(),
        accuracy: 1.0,
        c_used: c,
    };
    for (a, b, kind) in inst.constraints() {
        let d = dist[rows[a] * m + rows[b]];
        if check(kind, d, u, l, c, tol) {
            match kind {
                ConstraintKind::Similar => report.satisfied_similar += 1,
                ConstraintKind::Dissimilar => report.satisfied_dissimilar += 1,
            }
        } else {
            report.violated.push(Violation {
                a: inst.id(a).to_string(),
                b: inst.id(b).to_string(),
                kind,
                distance: d,
            });
        }
    }
    if report.total() > 0 {
        report.accuracy = report.satisfied() as f64 / report.total() as f64;
    }
    Ok(report)
}

/// Smallest `c ≥ 1` at which every constraint holds; `+∞` when a dissimilar
/// pair sits at distance zero.
pub fn min_distortion(inst: &Instance, emb: &Embedding) -> Result<f64> {
    let rows = align(inst, emb)?;
    let m = emb.len();
    let dist = emb.distance_matrix();
    let mut c = 1.0f64;
    for (a, b, kind) in inst.constraints() {
        let d = dist[rows[a] * m + rows[b]];
        match kind {
            ConstraintKind::Similar => c = c.max(d / inst.u()),
            ConstraintKind::Dissimilar => {
                if d == 0.0 {
                    return Ok(f64::INFINITY);
                }
                c = c.max(inst.l() / d);
            }
        }
    }
    Ok(c)
}

/// Accuracy of mapping every object to one point: only similar pairs hold.
pub fn single_point_baseline(inst: &Instance) -> f64 {
    if inst.num_constraints() == 0 {
        1.0
    } else {
        inst.similar().len() as f64 / inst.num_constraints() as f64
    }
}
