use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected, connected coupling graph of a device.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGraph {
    num_physical: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CouplingGraph {
    /// Edges are stored as `(min, max)`; duplicates collapse.
    pub fn new(num_physical: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on {u}")));
            }
            if u >= num_physical || v >= num_physical {
                return Err(Error::InvalidArgument(format!("edge {u}–{v} outside 0..{num_physical}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let g = Self { num_physical, edges: set };
        if num_physical == 0 || !g.is_connected() {
            return Err(Error::InvalidArgument("coupling graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn num_physical(&self) -> usize {
        self.num_physical
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).len()
    }

    pub fn is_connected(&self) -> bool {
        if self.num_physical == 0 {
            return true;
        }
        let mut seen = vec![false; self.num_physical];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Writes the graph as `u v` lines.
    pub fn to_edge_list(&self) -> String {
        self.edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
    }
}

/// ibmq_casablanca: an H-shaped 7-qubit Falcon layout.
pub fn casablanca_topology() -> CouplingGraph {
    CouplingGraph::new(7, [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]).expect("static graph")
}

/// Parses `u v` per line; `#` starts a comment. The node count is one more
/// than the largest index mentioned.
pub fn parse_edge_list(text: &str) -> Result<CouplingGraph> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected `u v`, got {line:?}")));
        }
        let u: usize = fields[0].parse().map_err(|_| bad(format!("bad node {:?}", fields[0])))?;
        let v: usize = fields[1].parse().map_err(|_| bad(format!("bad node {:?}", fields[1])))?;
        edges.push((u, v));
    }
    let n = edges
        .iter()
        .map(|&(u, v)| u.max(v) + 1)
        .max()
        .ok_or_else(|| Error::Parse { line: 0, message: "no edges".into() })?;
    CouplingGraph::new(n, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<CouplingGraph> {
    let text =
        std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_edge_list(&text)
}
