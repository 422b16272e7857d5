//! Per-stage statistics rows, written as CSV for plotting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One cluster search within one run of a learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterStat {
    pub restart: usize,
    pub cluster: usize,
    pub objects: usize,
    /// Grid radius or tree depth times edge length.
    pub radius: f64,
    /// Points of the host the search ran on.
    pub host_size: usize,
    pub nodes: u64,
    pub satisfied: usize,
    pub total: usize,
    /// False when the node budget cut the search short.
    pub complete: bool,
}

/// Writes `rows` with a header line.
pub fn write_csv<W: Write>(rows: &[ClusterStat], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}
