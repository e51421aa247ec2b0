//! Edge-list file ingestion.
//!
//! Format: UTF-8 text, one edge per line `u w m` with `m` an optional
//! multiplicity (default 1), `#` starting a comment, loops written as
//! `u u m`. An optional JSON header line `{"max_degree": d}` may precede
//! the edges.

use super::Graph;
use crate::error::{HeatLabError, Result};
use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_edge_list(&text)
}

pub(crate) fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared_max_degree: Option<usize> = None;
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    let mut saw_content = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !saw_content && line.starts_with('{') {
            saw_content = true;
            let header: serde_json::Value =
                serde_json::from_str(line).map_err(|e| HeatLabError::FormatError {
                    line: lineno + 1,
                    reason: format!("bad JSON header: {e}"),
                })?;
            if let Some(d) = header.get("max_degree") {
                let d = d.as_u64().ok_or_else(|| HeatLabError::FormatError {
                    line: lineno + 1,
                    reason: "max_degree must be a positive integer".into(),
                })?;
                declared_max_degree = Some(d as usize);
            }
            continue;
        }
        saw_content = true;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (u, w, m) = match fields.as_slice() {
            [u, w] => (*u, *w, 1u64),
            [u, w, m] => {
                let mult: u64 = m.parse().map_err(|_| HeatLabError::FormatError {
                    line: lineno + 1,
                    reason: format!("bad multiplicity `{m}`"),
                })?;
                (*u, *w, mult)
            }
            _ => {
                return Err(HeatLabError::FormatError {
                    line: lineno + 1,
                    reason: "expected `u w` or `u w m`".into(),
                })
            }
        };
        if m == 0 {
            return Err(HeatLabError::FormatError {
                line: lineno + 1,
                reason: "multiplicity must be >= 1".into(),
            });
        }
        edges.push((u.to_string(), w.to_string(), m));
    }

    let graph = Graph::finite_from_edges(
        edges.iter().map(|(u, w, m)| (u.as_str(), w.as_str(), *m)),
        declared_max_degree,
    )?;
    check_connected(&graph)?;
    Ok(graph)
}

fn check_connected(g: &Graph) -> Result<()> {
    let verts = g.finite_vertices()?;
    if verts.is_empty() {
        return Err(HeatLabError::DisconnectedError { components: 0 });
    }
    let mut seen: HashSet<_> = HashSet::new();
    let mut components = 0usize;
    let mut assigned: HashMap<_, usize> = HashMap::new();
    for &start in &verts {
        if assigned.contains_key(&start) {
            continue;
        }
        components += 1;
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        assigned.insert(start, components);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v)?.iter() {
                if seen.insert(w) {
                    assigned.insert(w, components);
                    queue.push_back(w);
                }
            }
        }
    }
    if components > 1 {
        return Err(HeatLabError::DisconnectedError { components });
    }
    Ok(())
}
