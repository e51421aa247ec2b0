//! Seeded random finite graphs for test matrices and benchmarks.

use super::Graph;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Options for [`random_connected_graph`].
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphOptions {
    pub vertices: usize,
    pub extra_edges: usize,
    pub allow_loops: bool,
    pub allow_multi_edges: bool,
}

impl Default for RandomGraphOptions {
    fn default() -> Self {
        RandomGraphOptions {
            vertices: 12,
            extra_edges: 8,
            allow_loops: false,
            allow_multi_edges: false,
        }
    }
}

/// A connected random multigraph: a random attachment tree plus
/// `extra_edges` uniformly random extra edges. Deterministic in the seed.
pub fn random_connected_graph(seed: u64, options: RandomGraphOptions) -> Graph {
    let n = options.vertices.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label = |i: usize| format!("v{i:03}");
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();

    for i in 1..n {
        let parent = rng.random_range(0..i);
        edges.push((label(parent), label(i), 1));
        seen.insert((parent.min(i), parent.max(i)));
    }
    let mut placed = 0usize;
    let mut attempts = 0usize;
    while placed < options.extra_edges && attempts < options.extra_edges * 20 {
        attempts += 1;
        let u = rng.random_range(0..n);
        let w = rng.random_range(0..n);
        if u == w && !options.allow_loops {
            continue;
        }
        let key = (u.min(w), u.max(w));
        if !options.allow_multi_edges && !seen.insert(key) {
            continue;
        }
        edges.push((label(u), label(w), 1));
        placed += 1;
    }

    Graph::finite_from_edges(
        edges.iter().map(|(u, w, m)| (u.as_str(), w.as_str(), *m)),
        None,
    )
    .expect("random graph construction cannot fail")
}
