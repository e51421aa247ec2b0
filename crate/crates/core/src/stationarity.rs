//! Empirical stationarity diagnostics: canonical codes of rooted balls,
//! Cesaro rerooting distributions, and total-variation stationarity
//! deficits, with optional marked-subset decoration.

use crate::error::Result;
use crate::expansion::CutPredicate;
use crate::graph::{Graph, RootedGraph, VertexId};
use crate::heat::walk_step;
use crate::measure::{Mass, VertexMeasure};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// Canonical string code of a rooted, optionally decorated, radius-r ball.
/// Two balls receive the same code iff they are isomorphic as rooted
/// decorated multigraphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallType(pub String);

/// Induced ball data extracted for coding: aggregated edge multiplicities,
/// root distances, and decoration bits.
struct BallData {
    n: usize,
    root: usize,
    /// multiset adjacency: mult[i][j] = multiplicity of j in i's induced
    /// neighbor list; mult[i][i] counts loop half-edges (2 per loop)
    mult: Vec<HashMap<usize, u32>>,
    dist: Vec<u32>,
    deco: Vec<bool>,
}

impl BallData {
    fn extract(
        g: &Graph,
        center: VertexId,
        r: u32,
        decoration: Option<&dyn CutPredicate>,
    ) -> Result<BallData> {
        let exploration = g.explore(center, r)?;
        let n = exploration.verts.len();
        let mut mult: Vec<HashMap<usize, u32>> = vec![HashMap::new(); n];
        for (i, &v) in exploration.verts.iter().enumerate() {
            for &w in g.neighbors(v)?.iter() {
                if let Some(&j) = exploration.index.get(&w) {
                    *mult[i].entry(j).or_insert(0) += 1;
                }
            }
        }
        let mut deco = vec![false; n];
        if let Some(pred) = decoration {
            for (i, &v) in exploration.verts.iter().enumerate() {
                deco[i] = pred.contains(g, v)?;
            }
        }
        Ok(BallData {
            n,
            root: 0,
            mult,
            dist: exploration.dist.clone(),
            deco,
        })
    }

    fn degree(&self, i: usize) -> u32 {
        self.mult[i].values().sum()
    }

    fn loops(&self, i: usize) -> u32 {
        self.mult[i].get(&i).copied().unwrap_or(0)
    }

    /// Simple tree test: connected (by construction), n-1 edges, no loops
    /// or multi-edges.
    fn is_simple_tree(&self) -> bool {
        let mut edge_sum = 0u32;
        for i in 0..self.n {
            if self.loops(i) > 0 {
                return false;
            }
            for (&j, &m) in &self.mult[i] {
                if j != i && m > 1 {
                    return false;
                }
            }
            edge_sum += self.degree(i);
        }
        edge_sum / 2 == self.n as u32 - 1
    }
}

/// Canonical code of the radius-r ball around `center`, optionally
/// decorated by a marked-subset predicate evaluated on the ambient graph.
///
/// Tree balls use bottom-up subtree coding, which handles the highly
/// symmetric balls of regular trees in linear time; everything else goes
/// through root-anchored iterative refinement with backtracking over the
/// refinement-equivalent orderings.
pub fn ball_type_code(
    g: &Graph,
    center: VertexId,
    r: u32,
    decoration: Option<&dyn CutPredicate>,
) -> Result<BallType> {
    let ball = BallData::extract(g, center, r, decoration)?;
    let code = if ball.is_simple_tree() {
        format!("t:{}", tree_code(&ball))
    } else {
        format!("g:{}", refine_code(&ball))
    };
    Ok(BallType(code))
}

/// Classic bottom-up rooted-tree coding with decoration bits.
fn tree_code(ball: &BallData) -> String {
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); ball.n];
    for v in 0..ball.n {
        if v == ball.root {
            continue;
        }
        let parent = ball.mult[v]
            .keys()
            .copied()
            .find(|&u| ball.dist[u] + 1 == ball.dist[v])
            .expect("tree ball vertex has a parent");
        children[parent].push(v);
    }
    let mut order: Vec<usize> = (0..ball.n).collect();
    order.sort_by(|&a, &b| ball.dist[b].cmp(&ball.dist[a]));
    let mut codes: Vec<String> = vec![String::new(); ball.n];
    for &v in &order {
        let mut child_codes: Vec<&str> = children[v].iter().map(|&c| codes[c].as_str()).collect();
        child_codes.sort();
        let deco = if ball.deco[v] { '*' } else { '.' };
        codes[v] = format!("({deco}{})", child_codes.concat());
    }
    codes[ball.root].clone()
}

/// Iterative color refinement from root-anchored seeds.
fn refine(ball: &BallData, colors: &mut Vec<u32>) {
    loop {
        let mut keys: Vec<(u32, Vec<(u32, u32)>)> = Vec::with_capacity(ball.n);
        for i in 0..ball.n {
            let mut neighbor_sig: Vec<(u32, u32)> = ball.mult[i]
                .iter()
                .filter(|(&j, _)| j != i)
                .map(|(&j, &m)| (m, colors[j]))
                .collect();
            neighbor_sig.sort_unstable();
            keys.push((colors[i], neighbor_sig));
        }
        let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = keys.iter().collect();
        sorted.sort();
        sorted.dedup();
        let rank: HashMap<&(u32, Vec<(u32, u32)>), u32> = sorted
            .iter()
            .enumerate()
            .map(|(idx, key)| (*key, idx as u32))
            .collect();
        let before = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        for i in 0..ball.n {
            colors[i] = rank[&keys[i]];
        }
        let after = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        if after == before {
            break;
        }
    }
}

fn emit_code(ball: &BallData, colors: &[u32]) -> String {
    let mut perm: Vec<usize> = (0..ball.n).collect();
    perm.sort_by_key(|&i| colors[i]);
    let mut pos = vec![0usize; ball.n];
    for (p, &i) in perm.iter().enumerate() {
        pos[i] = p;
    }
    let mut out = format!("n{};r{};", ball.n, pos[ball.root]);
    for &i in &perm {
        out.push(if ball.deco[i] { '*' } else { '.' });
        out.push_str(&ball.loops(i).to_string());
        out.push(';');
    }
    for a in 0..ball.n {
        for b in (a + 1)..ball.n {
            let m = ball.mult[perm[a]]
                .get(&perm[b])
                .copied()
                .unwrap_or(0);
            if m > 0 {
                out.push_str(&format!("{a}-{b}x{m};"));
            }
        }
    }
    out
}

/// Backtracking individualization-refinement: minimum emitted code over all
/// refinement-equivalent discrete orderings.
fn refine_code(ball: &BallData) -> String {
    let mut colors: Vec<u32> = Vec::with_capacity(ball.n);
    // root-anchored seed: distance from root, degree, loops, decoration
    let mut seeds: Vec<(u32, u32, u32, bool)> = Vec::with_capacity(ball.n);
    for i in 0..ball.n {
        seeds.push((ball.dist[i], ball.degree(i), ball.loops(i), ball.deco[i]));
    }
    let mut sorted = seeds.clone();
    sorted.sort();
    sorted.dedup();
    for seed in &seeds {
        colors.push(sorted.binary_search(seed).unwrap() as u32);
    }
    refine(ball, &mut colors);
    search_min_code(ball, colors)
}

fn search_min_code(ball: &BallData, colors: Vec<u32>) -> String {
    let classes = colors
        .iter()
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    if classes == ball.n {
        return emit_code(ball, &colors);
    }
    // first non-singleton color class, by color value
    let mut by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colors.iter().enumerate() {
        by_color.entry(c).or_default().push(i);
    }
    let members = by_color
        .into_values()
        .find(|m| m.len() > 1)
        .expect("non-discrete coloring has a splittable class");
    let fresh = ball.n as u32 + 1;
    let mut best: Option<String> = None;
    for m in members {
        let mut branch = colors.clone();
        branch[m] = fresh;
        refine(ball, &mut branch);
        let code = search_min_code(ball, branch);
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    }
    best.unwrap()
}

/// Empirical distribution over ball-type codes.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeDistribution {
    pub counts: BTreeMap<BallType, u64>,
    pub sample_count: u64,
    pub radius: u32,
}

impl TypeDistribution {
    pub fn probability(&self, code: &BallType) -> f64 {
        *self.counts.get(code).unwrap_or(&0) as f64 / self.sample_count as f64
    }

    pub fn type_count(&self) -> usize {
        self.counts.len()
    }

    pub fn total_variation(&self, other: &TypeDistribution) -> f64 {
        let mut keys: std::collections::BTreeSet<&BallType> = self.counts.keys().collect();
        keys.extend(other.counts.keys());
        let mut acc = 0.0;
        for key in keys {
            acc += (self.probability(key) - other.probability(key)).abs();
        }
        acc / 2.0
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (code, count) in &self.counts {
            let record = serde_json::json!({
                "code": code.0,
                "p": *count as f64 / self.sample_count as f64,
                "count": count,
            });
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out
    }
}

fn simulate_endpoints(
    rooted: &RootedGraph,
    n_steps_of: impl Fn(u64, &mut ChaCha8Rng) -> u32 + Sync,
    extra_step: bool,
    trials: u64,
    seed: u64,
) -> Result<(HashMap<VertexId, u64>, HashMap<VertexId, u64>)> {
    let g = &rooted.graph;
    let results: Result<Vec<(VertexId, VertexId)>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(VertexId, VertexId)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial.wrapping_add(1));
            let k = n_steps_of(trial, &mut rng);
            let mut at = rooted.root;
            for _ in 0..k {
                let neighbors = g.neighbors(at)?;
                at = neighbors[rng.random_range(0..neighbors.len())];
            }
            let first = at;
            let second = if extra_step {
                let neighbors = g.neighbors(at)?;
                neighbors[rng.random_range(0..neighbors.len())]
            } else {
                at
            };
            Ok((first, second))
        })
        .collect();
    let mut a: HashMap<VertexId, u64> = HashMap::new();
    let mut b: HashMap<VertexId, u64> = HashMap::new();
    for (first, second) in results? {
        *a.entry(first).or_insert(0) += 1;
        *b.entry(second).or_insert(0) += 1;
    }
    Ok((a, b))
}

fn histogram_to_types(
    rooted: &RootedGraph,
    histogram: &HashMap<VertexId, u64>,
    r: u32,
    decoration: Option<&dyn CutPredicate>,
    code_cache: &mut HashMap<VertexId, BallType>,
    trials: u64,
) -> Result<TypeDistribution> {
    let mut counts: BTreeMap<BallType, u64> = BTreeMap::new();
    for (&v, &count) in histogram {
        let code = match code_cache.get(&v) {
            Some(code) => code.clone(),
            None => {
                let code = ball_type_code(&rooted.graph, v, r, decoration)?;
                code_cache.insert(v, code.clone());
                code
            }
        };
        *counts.entry(code).or_insert(0) += count;
    }
    Ok(TypeDistribution {
        counts,
        sample_count: trials,
        radius: r,
    })
}

/// Monte Carlo estimate of the Cesaro rerooting distribution pushed to
/// radius-r ball types: sample k uniform in 0..N, walk k steps, record the
/// type at the endpoint. Deterministic given the seed.
pub fn cesaro_distribution(
    rooted: &RootedGraph,
    cesaro_n: u32,
    r: u32,
    trials: u64,
    seed: u64,
    decoration: Option<&dyn CutPredicate>,
) -> Result<TypeDistribution> {
    let (histogram, _) = simulate_endpoints(
        rooted,
        |_, rng| rng.random_range(0..cesaro_n),
        false,
        trials,
        seed,
    )?;
    let mut cache = HashMap::new();
    histogram_to_types(rooted, &histogram, r, decoration, &mut cache, trials)
}

/// Exact Cesaro type distribution on a finite graph, as rational masses per
/// code: (1/N) * sum over k < N of the k-step kernel, pushed to types.
pub fn cesaro_distribution_exact<M: Mass>(
    rooted: &RootedGraph,
    cesaro_n: u32,
    r: u32,
    decoration: Option<&dyn CutPredicate>,
) -> Result<BTreeMap<BallType, M>> {
    let g = &rooted.graph;
    let mut mu: VertexMeasure<M> = VertexMeasure::dirac(rooted.root);
    let mut acc: BTreeMap<BallType, M> = BTreeMap::new();
    let mut cache: HashMap<VertexId, BallType> = HashMap::new();
    for step in 0..cesaro_n {
        for (v, mass) in mu.iter() {
            let code = match cache.get(&v) {
                Some(code) => code.clone(),
                None => {
                    let code = ball_type_code(g, v, r, decoration)?;
                    cache.insert(v, code.clone());
                    code
                }
            };
            acc.entry(code)
                .or_insert_with(M::zero)
                .add_assign(&mass.div_u64(cesaro_n as u64));
        }
        if step + 1 < cesaro_n {
            mu = walk_step(g, &mu, false)?;
        }
    }
    Ok(acc)
}

/// Result of the stationarity deficit estimate.
#[derive(Debug, Clone, Copy)]
pub struct StationarityDeficit {
    /// Measured TV distance between the Cesaro type distribution and its
    /// one-step rerooted pushforward (same trials, one extra step).
    pub tv: f64,
    /// Analytic telescoping bound 1/N plus a 3-sigma sampling term.
    pub bound: f64,
    pub types: usize,
}

/// Estimate the stationarity deficit of the Cesaro distribution: rerooting
/// a nu_N-random graph at a uniform neighbor shifts the average by one
/// step, so the true deficit is at most 1/N; sampling noise is added as
/// 3 * sqrt(#types / trials).
pub fn stationarity_deficit(
    rooted: &RootedGraph,
    cesaro_n: u32,
    r: u32,
    trials: u64,
    seed: u64,
    decoration: Option<&dyn CutPredicate>,
) -> Result<StationarityDeficit> {
    let (hist_a, hist_b) = simulate_endpoints(
        rooted,
        |_, rng| rng.random_range(0..cesaro_n),
        true,
        trials,
        seed,
    )?;
    let mut cache = HashMap::new();
    let dist_a = histogram_to_types(rooted, &hist_a, r, decoration, &mut cache, trials)?;
    let dist_b = histogram_to_types(rooted, &hist_b, r, decoration, &mut cache, trials)?;
    let tv = dist_a.total_variation(&dist_b);
    let mut keys: std::collections::BTreeSet<&BallType> = dist_a.counts.keys().collect();
    keys.extend(dist_b.counts.keys());
    let types = keys.len();
    let bound = 1.0 / cesaro_n as f64 + 3.0 * (types as f64 / trials as f64).sqrt();
    Ok(StationarityDeficit { tv, bound, types })
}
