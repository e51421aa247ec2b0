//! Uniform adjacency-oracle interface over finite and lazily generated
//! multigraphs with loops.
//!
//! Vertices are identified by canonical string labels. Within one `Graph`
//! instance each label is interned to a small [`VertexId`] handle; handles
//! are only meaningful for the graph that issued them. Neighbor lists are
//! multisets (a multi-edge repeats the neighbor, a loop lists the vertex
//! itself twice) and are cached forever for generated graphs, so repeated
//! queries are cheap and deterministic.

mod edge_list;
mod family;
pub mod random;

pub use edge_list::load_edge_list;
pub use family::Family;

use crate::error::{HeatLabError, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

/// Default cap on the number of vertices any single operation may
/// materialize.
pub const DEFAULT_VERTEX_BUDGET: usize = 10_000_000;

/// Handle for an interned vertex label. Valid only for the graph that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub(crate) u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Declarative description of a graph source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    /// A file-backed finite graph in edge-list format.
    File { path: PathBuf },
    /// One of the built-in lazily generated families.
    Builtin(Family),
}

impl GeneratorSpec {
    pub fn lattice(dim: usize) -> Self {
        GeneratorSpec::Builtin(Family::Lattice { dim })
    }
    pub fn regular_tree(degree: usize) -> Self {
        GeneratorSpec::Builtin(Family::RegularTree { degree })
    }
    pub fn free_group(rank: usize) -> Self {
        GeneratorSpec::Builtin(Family::FreeGroup { rank })
    }
    pub fn cycle_tower(p: u64, k_max: u32) -> Self {
        GeneratorSpec::Builtin(Family::CycleTower { p, k_max })
    }
    pub fn sl2_tower(p: u64, k_max: u32) -> Self {
        GeneratorSpec::Builtin(Family::Sl2Tower { p, k_max })
    }
}

/// Build a graph from a generator spec.
pub fn make_generator(spec: &GeneratorSpec) -> Result<Graph> {
    match spec {
        GeneratorSpec::File { path } => load_edge_list(path),
        GeneratorSpec::Builtin(family) => Graph::generated(family.clone()),
    }
}

#[derive(Default)]
struct Interner {
    labels: Vec<Arc<str>>,
    map: HashMap<Arc<str>, u32>,
}

impl Interner {
    fn get(&self, label: &str) -> Option<u32> {
        self.map.get(label).copied()
    }

    fn intern(&mut self, label: &str) -> u32 {
        if let Some(id) = self.map.get(label) {
            return *id;
        }
        let id = self.labels.len() as u32;
        let owned: Arc<str> = Arc::from(label);
        self.labels.push(owned.clone());
        self.map.insert(owned, id);
        id
    }

    fn len(&self) -> usize {
        self.labels.len()
    }
}

enum Backend {
    Finite {
        adj: Vec<Arc<[VertexId]>>,
    },
    Generated {
        family: Family,
        cache: RwLock<HashMap<u32, Arc<[VertexId]>>>,
    },
}

/// Whether a graph is explicitly materialized or backed by a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Finite,
    Generated,
}

/// A finite or lazily generated multigraph with loops.
pub struct Graph {
    backend: Backend,
    interner: RwLock<Interner>,
    max_degree: usize,
    budget: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("kind", &self.kind())
            .field("max_degree", &self.max_degree)
            .field("interned", &self.interner.read().unwrap().len())
            .finish()
    }
}

impl Graph {
    /// Wrap a built-in family as a lazily generated graph.
    pub fn generated(family: Family) -> Result<Graph> {
        family.validate_params()?;
        let max_degree = family.max_degree();
        Ok(Graph {
            backend: Backend::Generated {
                family,
                cache: RwLock::new(HashMap::new()),
            },
            interner: RwLock::new(Interner::default()),
            max_degree,
            budget: DEFAULT_VERTEX_BUDGET,
        })
    }

    /// Build a finite multigraph from undirected edges `(u, w, multiplicity)`.
    /// A line with `u == w` adds a loop, which contributes 2 to the degree.
    /// Vertices are interned in sorted label order. Connectivity is not
    /// enforced here; `load_edge_list` checks it for file input.
    pub fn finite_from_edges<'a, I>(edges: I, declared_max_degree: Option<usize>) -> Result<Graph>
    where
        I: IntoIterator<Item = (&'a str, &'a str, u64)>,
    {
        let mut incident: HashMap<String, Vec<(String, u64)>> = HashMap::new();
        for (u, w, m) in edges {
            if m == 0 {
                return Err(HeatLabError::FormatError {
                    line: 0,
                    reason: "edge multiplicity must be >= 1".into(),
                });
            }
            if u == w {
                incident
                    .entry(u.to_string())
                    .or_default()
                    .push((w.to_string(), 2 * m));
            } else {
                incident
                    .entry(u.to_string())
                    .or_default()
                    .push((w.to_string(), m));
                incident
                    .entry(w.to_string())
                    .or_default()
                    .push((u.to_string(), m));
            }
        }
        if incident.is_empty() {
            return Err(HeatLabError::FormatError {
                line: 0,
                reason: "no edges".into(),
            });
        }

        let mut labels: Vec<String> = incident.keys().cloned().collect();
        labels.sort();
        let mut interner = Interner::default();
        for label in &labels {
            interner.intern(label);
        }

        let mut adj: Vec<Arc<[VertexId]>> = Vec::with_capacity(labels.len());
        let mut max_degree = 0usize;
        for label in &labels {
            let mut entries: Vec<(String, u64)> = incident.remove(label).unwrap();
            entries.sort();
            let mut list: Vec<VertexId> = Vec::new();
            for (neighbor, mult) in entries {
                let id = VertexId(interner.get(&neighbor).expect("neighbor interned"));
                for _ in 0..mult {
                    list.push(id);
                }
            }
            max_degree = max_degree.max(list.len());
            adj.push(list.into());
        }
        if let Some(d) = declared_max_degree {
            if max_degree > d {
                return Err(HeatLabError::FormatError {
                    line: 0,
                    reason: format!("vertex degree {max_degree} exceeds declared bound {d}"),
                });
            }
            max_degree = d;
        }

        Ok(Graph {
            backend: Backend::Finite { adj },
            interner: RwLock::new(interner),
            max_degree,
            budget: DEFAULT_VERTEX_BUDGET,
        })
    }

    pub fn kind(&self) -> GraphKind {
        match self.backend {
            Backend::Finite { .. } => GraphKind::Finite,
            Backend::Generated { .. } => GraphKind::Generated,
        }
    }

    /// The generating family, for generated graphs.
    pub fn family(&self) -> Option<&Family> {
        match &self.backend {
            Backend::Generated { family, .. } => Some(family),
            Backend::Finite { .. } => None,
        }
    }

    /// Degree upper bound `d`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
    }

    /// Number of vertices, for finite graphs.
    pub fn vertex_count(&self) -> Option<usize> {
        match &self.backend {
            Backend::Finite { adj } => Some(adj.len()),
            Backend::Generated { .. } => None,
        }
    }

    /// All vertices of a finite graph, in label order.
    pub fn finite_vertices(&self) -> Result<Vec<VertexId>> {
        match &self.backend {
            Backend::Finite { adj } => Ok((0..adj.len() as u32).map(VertexId).collect()),
            Backend::Generated { .. } => Err(HeatLabError::UnsupportedGraph(
                "vertex enumeration needs a finite graph".into(),
            )),
        }
    }

    /// Resolve a label to a vertex handle, validating it against the graph.
    pub fn vertex(&self, label: &str) -> Result<VertexId> {
        match &self.backend {
            Backend::Finite { .. } => self
                .interner
                .read()
                .unwrap()
                .get(label)
                .map(VertexId)
                .ok_or_else(|| HeatLabError::invalid_vertex(label, "not a vertex of this graph")),
            Backend::Generated { family, .. } => {
                family.validate(label)?;
                Ok(VertexId(self.intern(label)))
            }
        }
    }

    pub fn label(&self, v: VertexId) -> Arc<str> {
        self.interner.read().unwrap().labels[v.index()].clone()
    }

    /// Number of labels this graph has interned so far; used as the budget
    /// measure of how much of a generated graph has been touched.
    pub fn touched(&self) -> usize {
        self.interner.read().unwrap().len()
    }

    fn intern(&self, label: &str) -> u32 {
        if let Some(id) = self.interner.read().unwrap().get(label) {
            return id;
        }
        self.interner.write().unwrap().intern(label)
    }

    /// Neighbor multiset of `v`, sorted by label. Cached for generated
    /// graphs; racing inserts compute identical values, so they are benign.
    pub fn neighbors(&self, v: VertexId) -> Result<Arc<[VertexId]>> {
        match &self.backend {
            Backend::Finite { adj } => adj
                .get(v.index())
                .cloned()
                .ok_or_else(|| HeatLabError::invalid_vertex(format!("#{}", v.0), "unknown handle")),
            Backend::Generated { family, cache } => {
                if let Some(hit) = cache.read().unwrap().get(&v.0) {
                    return Ok(hit.clone());
                }
                let label = self.label(v);
                let mut labels = family.neighbor_labels(&label)?;
                labels.sort();
                let ids: Vec<VertexId> = labels.iter().map(|l| VertexId(self.intern(l))).collect();
                debug_assert!(ids.len() <= self.max_degree);
                let entry: Arc<[VertexId]> = ids.into();
                cache.write().unwrap().insert(v.0, entry.clone());
                Ok(entry)
            }
        }
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }

    /// The adjacency oracle: degree plus neighbor multiset.
    pub fn adjacency(&self, v: VertexId) -> Result<(usize, Arc<[VertexId]>)> {
        let neighbors = self.neighbors(v)?;
        Ok((neighbors.len(), neighbors))
    }

    /// Multiplicity of `w` in the neighbor multiset of `v`.
    pub fn multiplicity(&self, v: VertexId, w: VertexId) -> Result<usize> {
        Ok(self.neighbors(v)?.iter().filter(|&&x| x == w).count())
    }

    /// Breadth-first exploration out to `radius`, with distances.
    pub(crate) fn explore(&self, root: VertexId, radius: u32) -> Result<Exploration> {
        let mut verts = vec![root];
        let mut dist = vec![0u32];
        let mut index: HashMap<VertexId, usize> = HashMap::new();
        index.insert(root, 0);
        let mut head = 0;
        while head < verts.len() {
            let v = verts[head];
            let d = dist[head];
            head += 1;
            if d == radius {
                continue;
            }
            for &w in self.neighbors(v)?.iter() {
                if !index.contains_key(&w) {
                    if verts.len() >= self.budget {
                        return Err(HeatLabError::BudgetExceeded {
                            budget: self.budget,
                            context: format!("ball of radius {radius}"),
                        });
                    }
                    index.insert(w, verts.len());
                    verts.push(w);
                    dist.push(d + 1);
                }
            }
        }
        Ok(Exploration { verts, dist, index })
    }
}

/// Result of a budget-checked BFS.
pub(crate) struct Exploration {
    pub verts: Vec<VertexId>,
    pub dist: Vec<u32>,
    pub index: HashMap<VertexId, usize>,
}


/// A graph with a distinguished root vertex.
#[derive(Debug, Clone)]
pub struct RootedGraph {
    pub graph: Arc<Graph>,
    pub root: VertexId,
}

impl RootedGraph {
    pub fn new(graph: Graph, root_label: &str) -> Result<RootedGraph> {
        let root = graph.vertex(root_label)?;
        Ok(RootedGraph {
            graph: Arc::new(graph),
            root,
        })
    }

    pub fn from_arc(graph: Arc<Graph>, root: VertexId) -> RootedGraph {
        RootedGraph { graph, root }
    }

    pub fn root_label(&self) -> Arc<str> {
        self.graph.label(self.root)
    }

    /// Induced sub-multigraph on all vertices at distance <= r from the
    /// root, returned as a finite rooted graph with the same labels. Loops
    /// and multi-edges inside the ball are retained.
    pub fn ball(&self, r: u32) -> Result<RootedGraph> {
        let g = &self.graph;
        let exploration = g.explore(self.root, r)?;
        let mut labels: Vec<(Arc<str>, VertexId)> = exploration
            .verts
            .iter()
            .map(|&v| (g.label(v), v))
            .collect();
        labels.sort_by(|a, b| a.0.cmp(&b.0));

        let mut interner = Interner::default();
        let mut old_to_new: HashMap<VertexId, VertexId> = HashMap::new();
        for (label, old) in &labels {
            let id = interner.intern(label);
            old_to_new.insert(*old, VertexId(id));
        }

        let mut adj: Vec<Arc<[VertexId]>> = Vec::with_capacity(labels.len());
        let mut max_degree = 0usize;
        for (_, old) in &labels {
            let mut list: Vec<(Arc<str>, VertexId)> = Vec::new();
            for &w in g.neighbors(*old)?.iter() {
                if let Some(&new) = old_to_new.get(&w) {
                    list.push((g.label(w), new));
                }
            }
            list.sort_by(|a, b| a.0.cmp(&b.0));
            max_degree = max_degree.max(list.len());
            adj.push(list.into_iter().map(|(_, id)| id).collect());
        }

        let root_label = g.label(self.root);
        let finite = Graph {
            backend: Backend::Finite { adj },
            interner: RwLock::new(interner),
            max_degree,
            budget: g.budget,
        };
        let root = finite.vertex(&root_label)?;
        Ok(RootedGraph {
            graph: Arc::new(finite),
            root,
        })
    }

    /// Vertex set of the ball of radius r, with distances from the root.
    pub fn ball_vertices(&self, r: u32) -> Result<Vec<(VertexId, u32)>> {
        let exploration = self.graph.explore(self.root, r)?;
        Ok(exploration
            .verts
            .iter()
            .copied()
            .zip(exploration.dist.iter().copied())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_line() -> RootedGraph {
        let g = make_generator(&GeneratorSpec::lattice(1)).unwrap();
        RootedGraph::new(g, "0").unwrap()
    }

    #[test]
    fn lattice_adjacency() {
        let rooted = z_line();
        let g = &rooted.graph;
        let (deg, nbrs) = g.adjacency(rooted.root).unwrap();
        assert_eq!(deg, 2);
        let mut labels: Vec<String> = nbrs.iter().map(|&v| g.label(v).to_string()).collect();
        labels.sort();
        assert_eq!(labels, vec!["-1", "1"]);
    }

    #[test]
    fn tree_root_adjacency() {
        let g = make_generator(&GeneratorSpec::regular_tree(3)).unwrap();
        let rooted = RootedGraph::new(g, "").unwrap();
        let (deg, nbrs) = rooted.graph.adjacency(rooted.root).unwrap();
        assert_eq!(deg, 3);
        let labels: Vec<String> = nbrs
            .iter()
            .map(|&v| rooted.graph.label(v).to_string())
            .collect();
        assert_eq!(labels, vec!["a", "b", "c"]);
    }

    #[test]
    fn malformed_labels_rejected() {
        let g = make_generator(&GeneratorSpec::cycle_tower(2, 3)).unwrap();
        assert!(g.vertex("1:0").is_ok());
        assert!(g.vertex("4:0").is_err()); // level above k_max
        assert!(g.vertex("1:2").is_err()); // index out of range
        assert!(g.vertex("nonsense").is_err());
    }

    #[test]
    fn ball_radius_two_on_z_is_path() {
        let rooted = z_line();
        let ball = rooted.ball(2).unwrap();
        assert_eq!(ball.graph.vertex_count(), Some(5));
        let labels: Vec<String> = ball
            .graph
            .finite_vertices()
            .unwrap()
            .iter()
            .map(|&v| ball.graph.label(v).to_string())
            .collect();
        assert_eq!(labels, vec!["-1", "-2", "0", "1", "2"]);
        // endpoints have degree 1 inside the ball
        let end = ball.graph.vertex("2").unwrap();
        assert_eq!(ball.graph.degree(end).unwrap(), 1);
        assert_eq!(ball.root_label().as_ref(), "0");
    }

    #[test]
    fn ball_radius_zero_keeps_loops() {
        let g = Graph::finite_from_edges([("x", "x", 1), ("x", "y", 1)], None).unwrap();
        let rooted = RootedGraph::new(g, "x").unwrap();
        let ball = rooted.ball(0).unwrap();
        assert_eq!(ball.graph.vertex_count(), Some(1));
        // the loop at the root survives, the edge to y does not
        assert_eq!(ball.graph.degree(ball.root).unwrap(), 2);
    }

    #[test]
    fn ball_on_tree_is_star() {
        let g = make_generator(&GeneratorSpec::regular_tree(3)).unwrap();
        let rooted = RootedGraph::new(g, "").unwrap();
        let ball = rooted.ball(1).unwrap();
        assert_eq!(ball.graph.vertex_count(), Some(4));
        assert_eq!(ball.graph.degree(ball.root).unwrap(), 3);
        let leaf = ball.graph.vertex("a").unwrap();
        assert_eq!(ball.graph.degree(leaf).unwrap(), 1);
    }

    #[test]
    fn budget_exceeded_on_big_ball() {
        let mut g = make_generator(&GeneratorSpec::free_group(2)).unwrap();
        g.set_budget(100);
        let rooted = RootedGraph::new(g, "").unwrap();
        assert!(matches!(
            rooted.ball(6),
            Err(HeatLabError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn loop_contributes_two_to_degree() {
        let g = Graph::finite_from_edges([("a", "a", 1)], None).unwrap();
        let v = g.vertex("a").unwrap();
        assert_eq!(g.degree(v).unwrap(), 2);
        assert_eq!(g.multiplicity(v, v).unwrap(), 2);
    }
}
