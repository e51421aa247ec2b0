//! Shared helpers for the integration suites: standard small graphs, a
//! walk-enumeration kernel oracle, a brute-force subset minimizer, and a
//! brute-force rooted-isomorphism oracle. These stay independent of the
//! library's own computation paths on purpose.

#![allow(dead_code)]

use heatlab_core::{Exact, Graph, Mass, RootedGraph, VertexId};
use std::collections::{HashMap, HashSet};

pub fn petersen() -> Graph {
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    for i in 0..5u32 {
        edges.push((format!("o{i}"), format!("o{}", (i + 1) % 5), 1));
        edges.push((format!("i{i}"), format!("i{}", (i + 2) % 5), 1));
        edges.push((format!("o{i}"), format!("i{i}"), 1));
    }
    Graph::finite_from_edges(
        edges.iter().map(|(u, w, m)| (u.as_str(), w.as_str(), *m)),
        None,
    )
    .unwrap()
}

/// A path 0 - 1 - ... - len, long enough to stand in for the half-line as
/// long as walks cannot reach the far end.
pub fn half_line(len: usize) -> RootedGraph {
    let labels: Vec<String> = (0..=len).map(|i| format!("{i:04}")).collect();
    let edges: Vec<(String, String, u64)> = (0..len)
        .map(|i| (labels[i].clone(), labels[i + 1].clone(), 1))
        .collect();
    let g = Graph::finite_from_edges(
        edges.iter().map(|(u, w, m)| (u.as_str(), w.as_str(), *m)),
        None,
    )
    .unwrap();
    RootedGraph::new(g, &labels[0]).unwrap()
}

/// Independent kernel oracle: enumerate every length-n walk from the root
/// with its product weight. Exponential; keep n small.
pub fn enumerated_kernel(rooted: &RootedGraph, n: u32) -> HashMap<VertexId, Exact> {
    let g = &rooted.graph;
    let mut dist: HashMap<VertexId, Exact> = HashMap::new();
    let mut stack: Vec<(VertexId, u32, Exact)> =
        vec![(rooted.root, 0, Exact::from_ratio_u64(1, 1))];
    while let Some((v, depth, weight)) = stack.pop() {
        if depth == n {
            dist.entry(v)
                .or_insert_with(|| Exact::from_ratio_u64(0, 1))
                .add_assign(&weight);
            continue;
        }
        let neighbors = g.neighbors(v).unwrap();
        let share = weight.div_u64(neighbors.len() as u64);
        for &w in neighbors.iter() {
            stack.push((w, depth + 1, share.clone()));
        }
    }
    dist
}

/// Independent subset oracle: minimum expansion ratio over all nonempty
/// subsets of the support with mass at most half, boundaries recomputed
/// from scratch per subset.
pub fn brute_force_min_ratio(
    g: &Graph,
    mu: &heatlab_core::VertexMeasure<Exact>,
) -> Option<Exact> {
    let verts: Vec<VertexId> = mu.support().collect();
    let half = mu.total_mass().div_u64(2);
    let mut best: Option<Exact> = None;
    for mask in 1u64..(1 << verts.len()) {
        let set: std::collections::BTreeSet<VertexId> = verts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let mass_s = mu.mass_of_vertices(set.iter());
        if mass_s.is_zero() || mass_s > half {
            continue;
        }
        let mut boundary_mass = Exact::from_ratio_u64(0, 1);
        for &v in &set {
            if g.neighbors(v).unwrap().iter().any(|w| !set.contains(w)) {
                boundary_mass.add_assign(&mu.mass_of(v));
            }
        }
        let ratio = boundary_mass.div(&mass_s);
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
        }
    }
    best
}

/// Rooted ball as explicit matrices, for the brute-force iso oracle.
#[derive(Debug, Clone)]
pub struct SmallBall {
    pub n: usize,
    pub root: usize,
    pub mult: Vec<Vec<u32>>,
    pub dist: Vec<u32>,
    pub deco: Vec<bool>,
}

pub fn extract_ball(rooted: &RootedGraph, r: u32, marked: &HashSet<String>) -> SmallBall {
    let g = &rooted.graph;
    let verts = rooted.ball_vertices(r).unwrap();
    let index: HashMap<VertexId, usize> = verts
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (*v, i))
        .collect();
    let n = verts.len();
    let mut mult = vec![vec![0u32; n]; n];
    let mut deco = vec![false; n];
    for (i, (v, _)) in verts.iter().enumerate() {
        deco[i] = marked.contains(g.label(*v).as_ref());
        for &w in g.neighbors(*v).unwrap().iter() {
            if let Some(&j) = index.get(&w) {
                mult[i][j] += 1;
            }
        }
    }
    SmallBall {
        n,
        root: 0,
        mult,
        dist: verts.iter().map(|(_, d)| *d).collect(),
        deco,
    }
}

/// Exhaustive backtracking search for a root-preserving decorated
/// isomorphism.
pub fn rooted_isomorphic(a: &SmallBall, b: &SmallBall) -> bool {
    if a.n != b.n {
        return false;
    }
    let invariant = |ball: &SmallBall, i: usize| -> (u32, u32, u32, bool) {
        (
            ball.dist[i],
            ball.mult[i].iter().sum(),
            ball.mult[i][i],
            ball.deco[i],
        )
    };
    let mut inv_a: Vec<_> = (0..a.n).map(|i| invariant(a, i)).collect();
    let mut inv_b: Vec<_> = (0..b.n).map(|i| invariant(b, i)).collect();
    inv_a.sort();
    inv_b.sort();
    if inv_a != inv_b {
        return false;
    }

    // map a-vertices in BFS-ish order (sorted by distance) to b-vertices
    let mut order: Vec<usize> = (0..a.n).collect();
    order.sort_by_key(|&i| a.dist[i]);
    let mut mapping: Vec<Option<usize>> = vec![None; a.n];
    let mut used = vec![false; b.n];

    fn backtrack(
        a: &SmallBall,
        b: &SmallBall,
        order: &[usize],
        pos: usize,
        mapping: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let va = order[pos];
        for vb in 0..b.n {
            if used[vb]
                || a.dist[va] != b.dist[vb]
                || a.deco[va] != b.deco[vb]
                || a.mult[va][va] != b.mult[vb][vb]
                || a.mult[va].iter().sum::<u32>() != b.mult[vb].iter().sum::<u32>()
            {
                continue;
            }
            if va == a.root && vb != b.root {
                continue;
            }
            if vb == b.root && va != a.root {
                continue;
            }
            let consistent = (0..a.n).all(|ua| match mapping[ua] {
                Some(ub) => a.mult[va][ua] == b.mult[vb][ub],
                None => true,
            });
            if !consistent {
                continue;
            }
            mapping[va] = Some(vb);
            used[vb] = true;
            if backtrack(a, b, order, pos + 1, mapping, used) {
                return true;
            }
            mapping[va] = None;
            used[vb] = false;
        }
        false
    }

    backtrack(a, b, &order, 0, &mut mapping, &mut used)
}
