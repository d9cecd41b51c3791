//! Graph sets on disk: `<root>/g<g>/<kind>.jsonl`, one canonical
//! representative per line after a header naming the format version.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tropgc::canonical::canonical_form;
use tropgc::graphs::{enumerate_trivalent, gc_graphs, read_jsonl, saturate_contractions, write_jsonl, GraphSet};

use crate::failure::Failure;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Trivalent,
    /// every stable graph of the genus
    Jg,
    /// loopless weight-0 graphs of minimum valence 3
    Gc,
}

impl SetKind {
    pub fn name(self) -> &'static str {
        match self {
            SetKind::Trivalent => "trivalent",
            SetKind::Jg => "jg",
            SetKind::Gc => "gc",
        }
    }
}

fn header(g: u32, kind: SetKind) -> String {
    format!("# tropgc graph cache v{FORMAT_VERSION} genus={g} kind={}", kind.name())
}

#[derive(Debug, Clone, Default)]
pub struct Store {
    root: Option<PathBuf>,
}

impl Store {
    pub fn new(root: Option<PathBuf>) -> Self {
        Store { root }
    }

    pub fn path(&self, g: u32, kind: SetKind) -> Option<PathBuf> {
        self.root
            .as_ref()
            .map(|r| r.join(format!("g{g}")).join(format!("{}.jsonl", kind.name())))
    }

    pub fn graphs(&self, g: u32, kind: SetKind) -> Result<GraphSet, Failure> {
        let path = self.path(g, kind);
        if let Some(set) = path.as_deref().and_then(|p| load(p, &header(g, kind))) {
            return Ok(set);
        }
        let set = match kind {
            SetKind::Trivalent => enumerate_trivalent(g)?,
            SetKind::Jg => saturate_contractions(&self.graphs(g, SetKind::Trivalent)?),
            SetKind::Gc => gc_graphs(g)?,
        };
        if let Some(p) = path {
            save(&p, &header(g, kind), &set)?;
        }
        Ok(set)
    }
}

/// `None` for a missing, stale or unreadable file; it is then rebuilt.
fn load(path: &Path, expected_header: &str) -> Option<GraphSet> {
    let mut reader = BufReader::new(fs::File::open(path).ok()?);
    let mut first = String::new();
    reader.read_line(&mut first).ok()?;
    if first.trim_end() != expected_header {
        return None;
    }
    let graphs = read_jsonl(reader).ok()?;
    let keyed: Vec<_> = graphs
        .into_par_iter()
        .map(|gr| {
            let f = canonical_form(&gr);
            (f.key, f.graph)
        })
        .collect();
    Some(keyed.into_iter().collect())
}

fn save(path: &Path, header: &str, set: &GraphSet) -> Result<(), Failure> {
    let dir = path.parent().expect("cache paths have a parent");
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(dir, e))?;
    writeln!(tmp, "{header}").map_err(|e| Failure::io(path, e))?;
    write_jsonl(&mut tmp, set.values()).map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}
