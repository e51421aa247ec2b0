//! Random-walk distributions: the n-step kernel, its lazy variant, uniform
//! ball measures, the flattening sequence, and Monte Carlo cross-validation.

use crate::error::{HeatLabError, Result};
use crate::graph::{Family, Graph, RootedGraph, VertexId};
use crate::measure::{Mass, VertexMeasure};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Absolute drift of total mass tolerated in float mode.
pub const FLOAT_MASS_TOLERANCE: f64 = 1e-9;

/// PRNG tag recorded in reports next to the seed.
pub const PRNG_ALGORITHM: &str = "chacha8-stream-per-trial";

/// One step of the random walk applied to a measure.
///
/// Simple case: `out(v) = sum over neighbors w of m(w,v) * mu(w) / deg(w)`,
/// with `m` the edge multiplicity. Lazy case: stay put with probability 1/2.
/// Total mass is preserved exactly in exact mode.
pub fn walk_step<M: Mass>(
    g: &Graph,
    mu: &VertexMeasure<M>,
    lazy: bool,
) -> Result<VertexMeasure<M>> {
    let mut out: VertexMeasure<M> = VertexMeasure::default();
    for (v, mass) in mu.iter() {
        let neighbors = g.neighbors(v)?;
        if neighbors.is_empty() {
            return Err(HeatLabError::invalid_vertex(
                g.label(v).to_string(),
                "isolated vertex has no walk step",
            ));
        }
        let share = mass.div_u64(neighbors.len() as u64);
        for &w in neighbors.iter() {
            out.insert_mass(w, share.clone());
        }
    }
    if lazy {
        let mut mixed: VertexMeasure<M> = VertexMeasure::default();
        for (v, mass) in mu.iter() {
            mixed.insert_mass(v, mass.div_u64(2));
        }
        for (v, mass) in out.iter() {
            mixed.insert_mass(v, mass.div_u64(2));
        }
        return Ok(mixed);
    }
    Ok(out)
}

fn check_budget(g: &Graph, context: &str) -> Result<()> {
    if g.kind() == crate::graph::GraphKind::Generated && g.touched() > g.budget() {
        return Err(HeatLabError::BudgetExceeded {
            budget: g.budget(),
            context: context.into(),
        });
    }
    Ok(())
}

fn check_drift<M: Mass>(mu: &VertexMeasure<M>, step: u32) -> Result<()> {
    if M::IS_EXACT {
        assert!(
            mu.total_mass() == M::one(),
            "exact-mode mass conservation violated at step {step}"
        );
    } else {
        let drift = (mu.total_mass().to_f64() - 1.0).abs();
        if drift > FLOAT_MASS_TOLERANCE {
            return Err(HeatLabError::NumericalError(format!(
                "mass drift {drift:.3e} after step {step} exceeds {FLOAT_MASS_TOLERANCE:.0e}"
            )));
        }
    }
    Ok(())
}

/// Distribution of the n-th step of the walk started at the root.
pub fn heat_kernel<M: Mass>(
    rooted: &RootedGraph,
    n: u32,
    lazy: bool,
) -> Result<VertexMeasure<M>> {
    let mut mu = VertexMeasure::dirac(rooted.root);
    for step in 0..n {
        mu = walk_step(&rooted.graph, &mu, lazy)?;
        check_budget(&rooted.graph, &format!("heat kernel frontier at step {step}"))?;
        check_drift(&mu, step + 1)?;
    }
    Ok(mu)
}

/// Uniform distribution on the ball of radius r around the root.
pub fn uniform_ball_measure<M: Mass>(rooted: &RootedGraph, r: u32) -> Result<VertexMeasure<M>> {
    let vertices = rooted.ball_vertices(r)?;
    let share = M::one().div_u64(vertices.len() as u64);
    Ok(VertexMeasure::from_entries(
        vertices.into_iter().map(|(v, _)| (v, share.clone())),
    ))
}

/// The flattening sequence c_n = max over v of mu^n(v)/deg(v).
#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningCurve<M: Mass> {
    pub values: Vec<M>,
    pub lazy: bool,
}

impl<M: Mass> FlatteningCurve<M> {
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Compute c_0..c_n from the heat kernel at every step.
///
/// Regular trees get a radial fast path: the kernel started at any vertex of
/// T_d is a function of the distance from the root, so it suffices to track
/// one mass value per sphere. This is what makes exact tree curves at n = 40
/// feasible (the full support has around 3^40 vertices). The fast path is
/// checked against the generic propagation in tests.
pub fn flattening_curve<M: Mass>(
    rooted: &RootedGraph,
    n: u32,
    lazy: bool,
) -> Result<FlatteningCurve<M>> {
    let degree = match rooted.graph.family() {
        Some(Family::RegularTree { degree }) => Some(*degree),
        Some(Family::FreeGroup { rank }) => Some(2 * rank),
        _ => None,
    };
    let curve = match degree {
        Some(d) => radial_tree_curve(d, n, lazy),
        None => generic_curve(rooted, n, lazy)?,
    };
    let curve = FlatteningCurve {
        values: curve,
        lazy,
    };
    if M::IS_EXACT {
        assert!(
            curve.is_non_increasing(),
            "flattening sequence must be non-increasing"
        );
    }
    Ok(curve)
}

fn generic_curve<M: Mass>(rooted: &RootedGraph, n: u32, lazy: bool) -> Result<Vec<M>> {
    let g = &rooted.graph;
    let mut mu: VertexMeasure<M> = VertexMeasure::dirac(rooted.root);
    let mut values = Vec::with_capacity(n as usize + 1);
    for step in 0..=n {
        let mut best = M::zero();
        for (v, mass) in mu.iter() {
            let scaled = mass.div_u64(g.degree(v)? as u64);
            if scaled > best {
                best = scaled;
            }
        }
        values.push(best);
        if step < n {
            mu = walk_step(g, &mu, lazy)?;
            check_budget(g, &format!("flattening curve at step {step}"))?;
            check_drift(&mu, step + 1)?;
        }
    }
    Ok(values)
}

/// Per-vertex masses by distance from the root on T_d: `p[k]` is the mass of
/// any single vertex at distance k. A distance-k vertex (k >= 1) has one
/// neighbor at distance k-1 and d-1 at distance k+1; the root has d at
/// distance 1.
fn radial_tree_curve<M: Mass>(d: usize, n: u32, lazy: bool) -> Vec<M> {
    let d64 = d as u64;
    let mut p: Vec<M> = vec![M::one()];
    let mut values = Vec::with_capacity(n as usize + 1);
    for step in 0..=n {
        let best = p
            .iter()
            .cloned()
            .reduce(|a, b| if b > a { b } else { a })
            .unwrap_or_else(M::zero);
        values.push(best.div_u64(d64));
        if step == n {
            break;
        }
        let len = p.len() + 1;
        let mut next: Vec<M> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = M::zero();
            if k == 0 {
                if let Some(p1) = p.get(1) {
                    acc.add_assign(p1);
                }
            } else {
                if let Some(prev) = p.get(k - 1) {
                    acc.add_assign(&prev.div_u64(d64));
                }
                if let Some(next_shell) = p.get(k + 1) {
                    acc.add_assign(&next_shell.mul_u64(d64 - 1).div_u64(d64));
                }
            }
            if lazy {
                acc = acc.div_u64(2);
                if let Some(cur) = p.get(k) {
                    acc.add_assign(&cur.div_u64(2));
                }
            }
            next.push(acc);
        }
        p = next;
    }
    values
}

/// Empirical distribution of X_n over independent simulated walks.
///
/// Deterministic given the seed: trial t uses an independent ChaCha8 stream
/// derived from (seed, t), so the result does not depend on the parallel
/// schedule.
pub fn monte_carlo_kernel<M: Mass>(
    rooted: &RootedGraph,
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<VertexMeasure<M>> {
    if trials == 0 {
        return Err(HeatLabError::ConfigError {
            field: "trials".into(),
            reason: "must be >= 1".into(),
        });
    }
    let g = &rooted.graph;
    let counts: Result<std::collections::HashMap<VertexId, u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<VertexId> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial.wrapping_add(1));
            let mut at = rooted.root;
            for _ in 0..n {
                let neighbors = g.neighbors(at)?;
                at = neighbors[rng.random_range(0..neighbors.len())];
            }
            Ok(at)
        })
        .try_fold(std::collections::HashMap::new, |mut acc, v| {
            *acc.entry(v?).or_insert(0u64) += 1;
            Ok(acc)
        })
        .try_reduce(std::collections::HashMap::new, |mut a, b| {
            for (v, c) in b {
                *a.entry(v).or_insert(0) += c;
            }
            Ok(a)
        });
    let counts = counts?;
    check_budget(g, "monte carlo kernel")?;
    Ok(VertexMeasure::from_entries(
        counts
            .into_iter()
            .map(|(v, c)| (v, M::from_ratio_u64(c, trials))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_generator, GeneratorSpec};
    use crate::measure::Exact;

    fn z_rooted() -> RootedGraph {
        RootedGraph::new(make_generator(&GeneratorSpec::lattice(1)).unwrap(), "0").unwrap()
    }

    fn ratio(n: u64, d: u64) -> Exact {
        Exact::from_ratio_u64(n, d)
    }

    #[test]
    fn simple_step_on_z() {
        let rooted = z_rooted();
        let mu = VertexMeasure::dirac(rooted.root);
        let next: VertexMeasure<Exact> = walk_step(&rooted.graph, &mu, false).unwrap();
        assert_eq!(next.support_len(), 2);
        let minus = rooted.graph.vertex("-1").unwrap();
        let plus = rooted.graph.vertex("1").unwrap();
        assert_eq!(next.mass_of(minus), ratio(1, 2));
        assert_eq!(next.mass_of(plus), ratio(1, 2));
    }

    #[test]
    fn two_steps_on_z() {
        let rooted = z_rooted();
        let mu: VertexMeasure<Exact> = heat_kernel(&rooted, 2, false).unwrap();
        let expect = [("-2", ratio(1, 4)), ("0", ratio(1, 2)), ("2", ratio(1, 4))];
        assert_eq!(mu.support_len(), expect.len());
        for (label, mass) in expect {
            let v = rooted.graph.vertex(label).unwrap();
            assert_eq!(mu.mass_of(v), mass);
        }
    }

    #[test]
    fn loop_vertex_is_fixed_point() {
        let g = Graph::finite_from_edges([("v", "v", 1)], None).unwrap();
        let rooted = RootedGraph::new(g, "v").unwrap();
        let mu: VertexMeasure<Exact> = heat_kernel(&rooted, 5, false).unwrap();
        assert_eq!(mu.mass_of(rooted.root), Exact::from_ratio_u64(1, 1));
    }

    #[test]
    fn lazy_step_on_z() {
        let rooted = z_rooted();
        let mu = VertexMeasure::dirac(rooted.root);
        let next: VertexMeasure<Exact> = walk_step(&rooted.graph, &mu, true).unwrap();
        assert_eq!(next.mass_of(rooted.root), ratio(1, 2));
        let plus = rooted.graph.vertex("1").unwrap();
        assert_eq!(next.mass_of(plus), ratio(1, 4));
    }

    #[test]
    fn heat_kernel_zero_steps_is_dirac() {
        let rooted = z_rooted();
        let mu: VertexMeasure<Exact> = heat_kernel(&rooted, 0, false).unwrap();
        assert_eq!(mu.mass_of(rooted.root), Exact::from_ratio_u64(1, 1));
        assert_eq!(mu.support_len(), 1);
    }

    #[test]
    fn tree_return_probability() {
        let g = make_generator(&GeneratorSpec::regular_tree(3)).unwrap();
        let rooted = RootedGraph::new(g, "").unwrap();
        let mu: VertexMeasure<Exact> = heat_kernel(&rooted, 2, false).unwrap();
        assert_eq!(mu.mass_of(rooted.root), ratio(1, 3));
    }

    #[test]
    fn binomial_kernel_on_z_n4() {
        let rooted = z_rooted();
        let mu: VertexMeasure<Exact> = heat_kernel(&rooted, 4, false).unwrap();
        for (label, num) in [("0", 6u64), ("2", 4), ("-2", 4), ("4", 1), ("-4", 1)] {
            let v = rooted.graph.vertex(label).unwrap();
            assert_eq!(mu.mass_of(v), ratio(num, 16), "mass at {label}");
        }
    }

    #[test]
    fn uniform_ball_measures() {
        let rooted = z_rooted();
        let mu: VertexMeasure<Exact> = uniform_ball_measure(&rooted, 1).unwrap();
        assert_eq!(mu.support_len(), 3);
        assert_eq!(mu.mass_of(rooted.root), ratio(1, 3));

        let tree = RootedGraph::new(
            make_generator(&GeneratorSpec::regular_tree(3)).unwrap(),
            "",
        )
        .unwrap();
        let mu: VertexMeasure<Exact> = uniform_ball_measure(&tree, 1).unwrap();
        assert_eq!(mu.support_len(), 4);
        assert_eq!(mu.mass_of(tree.root), ratio(1, 4));
    }

    #[test]
    fn flattening_on_z_first_values() {
        let rooted = z_rooted();
        let curve: FlatteningCurve<Exact> = flattening_curve(&rooted, 2, false).unwrap();
        assert_eq!(curve.values, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
    }

    #[test]
    fn flattening_on_t3() {
        let tree = RootedGraph::new(
            make_generator(&GeneratorSpec::regular_tree(3)).unwrap(),
            "",
        )
        .unwrap();
        let curve: FlatteningCurve<Exact> = flattening_curve(&tree, 2, false).unwrap();
        assert_eq!(curve.values[2], ratio(1, 9));
    }

    #[test]
    fn radial_curve_matches_generic_on_trees() {
        for degree in [3usize, 4] {
            let g = make_generator(&GeneratorSpec::regular_tree(degree)).unwrap();
            let rooted = RootedGraph::new(g, "").unwrap();
            for lazy in [false, true] {
                let fast: Vec<Exact> = radial_tree_curve(degree, 8, lazy);
                let slow: Vec<Exact> = generic_curve(&rooted, 8, lazy).unwrap();
                assert_eq!(fast, slow, "degree {degree} lazy {lazy}");
            }
        }
        // free-group route as well: F_1 is the line, compare with lattice(1)
        let f1 = RootedGraph::new(make_generator(&GeneratorSpec::free_group(1)).unwrap(), "")
            .unwrap();
        let z = z_rooted();
        let fast: FlatteningCurve<Exact> = flattening_curve(&f1, 10, false).unwrap();
        let slow: Vec<Exact> = generic_curve(&z, 10, false).unwrap();
        assert_eq!(fast.values, slow);
    }

    #[test]
    fn monte_carlo_at_zero_steps_is_dirac() {
        let rooted = z_rooted();
        let mu: VertexMeasure<Exact> = monte_carlo_kernel(&rooted, 0, 50, 99).unwrap();
        assert_eq!(mu.mass_of(rooted.root), Exact::from_ratio_u64(1, 1));
    }

    #[test]
    fn monte_carlo_is_deterministic_in_seed() {
        let rooted = z_rooted();
        let a: VertexMeasure<Exact> = monte_carlo_kernel(&rooted, 7, 2000, 1234).unwrap();
        let b: VertexMeasure<Exact> = monte_carlo_kernel(&rooted, 7, 2000, 1234).unwrap();
        assert_eq!(a, b);
    }
}
