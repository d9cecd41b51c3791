use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::StableGraph;
use crate::error::{Error, Result};

/// One line of a graph file:
/// `{"genus":2,"weights":[0,0],"edges":[[0,1],[0,1],[0,1]]}`.
///
/// Edge `i` owns half-edges `2i` (at the first listed endpoint) and `2i + 1`,
/// which is exactly the in-memory layout, so the conversion is lossless.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub genus: i64,
    pub weights: Vec<u32>,
    pub edges: Vec<[usize; 2]>,
}

impl From<&StableGraph> for GraphRecord {
    fn from(g: &StableGraph) -> Self {
        GraphRecord {
            genus: g.genus(),
            weights: g.weights().to_vec(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<&GraphRecord> for StableGraph {
    type Error = Error;

    fn try_from(r: &GraphRecord) -> Result<Self> {
        let edges: Vec<(usize, usize)> = r.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = StableGraph::new(r.weights.clone(), &edges)?;
        if g.genus() != r.genus {
            return Err(Error::GenusMismatch {
                declared: r.genus,
                computed: g.genus(),
            });
        }
        Ok(g)
    }
}

impl GraphRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("graph records always serialize")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn write_jsonl<'a, W: Write>(
    mut out: W,
    graphs: impl IntoIterator<Item = &'a StableGraph>,
) -> std::io::Result<()> {
    for g in graphs {
        writeln!(out, "{}", GraphRecord::from(g).to_line())?;
    }
    Ok(())
}

/// Reads graph records, skipping blank lines and lines starting with `#`.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<StableGraph>> {
    let mut graphs = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        graphs.push(StableGraph::try_from(&GraphRecord::from_line(line)?)?);
    }
    Ok(graphs)
}
