//! Expansion machinery against the independent brute-force subset oracle,
//! plus structural properties of boundaries and the translate search.

mod common;

use heatlab_core::expansion::{
    exact_profile, folner_translate_search, inner_boundary, sweep_profile, CutWitness,
    ProfilePolicy,
};
use heatlab_core::graph::random::{random_connected_graph, RandomGraphOptions};
use heatlab_core::{
    heat_kernel, make_generator, Exact, GeneratorSpec, Mass, RootedGraph, VertexId,
    VertexMeasure,
};
use std::collections::BTreeSet;
use std::sync::Arc;

fn random_instance(seed: u64, max_support: usize) -> (Arc<heatlab_core::Graph>, VertexMeasure<Exact>) {
    let g = Arc::new(random_connected_graph(
        seed,
        RandomGraphOptions {
            vertices: 7 + (seed as usize % 6),
            extra_edges: 2 + (seed as usize % 7),
            allow_loops: seed % 3 == 0,
            allow_multi_edges: seed % 4 == 0,
        },
    ));
    let v0 = g.finite_vertices().unwrap()[seed as usize % g.vertex_count().unwrap()];
    let rooted = RootedGraph::from_arc(g.clone(), v0);
    // lazy kernels quickly fill the graph; step count keeps support bounded
    let mut n = 1;
    let mut mu: VertexMeasure<Exact> = heat_kernel(&rooted, n, true).unwrap();
    while mu.support_len() < max_support && n < 6 {
        n += 1;
        let next: VertexMeasure<Exact> = heat_kernel(&rooted, n, true).unwrap();
        if next.support_len() > max_support {
            break;
        }
        mu = next;
    }
    (g, mu)
}

#[test]
fn exact_profile_matches_brute_force_oracle() {
    for seed in 0..60u64 {
        let (g, mu) = random_instance(seed, 12);
        let expected = common::brute_force_min_ratio(&g, &mu);
        let got = exact_profile(&g, &mu, ProfilePolicy::SupportOnly, 22);
        match (expected, got) {
            (Some(h_oracle), Ok((h, witness))) => {
                assert_eq!(h, h_oracle, "seed {seed}");
                assert_eq!(witness.ratio, h_oracle, "seed {seed}");
            }
            (None, Err(_)) => {}
            (expected, got) => panic!("seed {seed}: oracle {expected:?} vs {got:?}"),
        }
    }
}

#[test]
fn sweep_never_beats_exact() {
    let mut equality_seen = 0usize;
    for seed in 0..80u64 {
        let (g, mu) = random_instance(seed, 14);
        let (h_star, _) = match exact_profile(&g, &mu, ProfilePolicy::SupportOnly, 22) {
            Ok(result) => result,
            Err(_) => continue,
        };
        let sweep = sweep_profile(&g, &mu).unwrap();
        assert!(sweep.ratio >= h_star, "seed {seed}");
        if sweep.ratio == h_star {
            equality_seen += 1;
        }
    }
    assert!(equality_seen > 0, "sweep never matched the exact minimum");
}

#[test]
fn scale_invariance_of_profiles() {
    for seed in [3u64, 11, 19] {
        let (g, mu) = random_instance(seed, 12);
        let scaled = mu.scaled(&Exact::from_ratio_u64(7, 3));
        let plain = exact_profile(&g, &mu, ProfilePolicy::SupportOnly, 22);
        let scaled_run = exact_profile(&g, &scaled, ProfilePolicy::SupportOnly, 22);
        match (plain, scaled_run) {
            (Ok((h1, w1)), Ok((h2, w2))) => {
                assert_eq!(h1, h2, "seed {seed}");
                assert_eq!(w1.sets, w2.sets, "seed {seed}");
            }
            (Err(_), Err(_)) => {}
            other => panic!("seed {seed}: {other:?}"),
        }
        let s1 = sweep_profile(&g, &mu).unwrap();
        let s2 = sweep_profile(&g, &scaled).unwrap();
        assert_eq!(s1.ratio, s2.ratio);
        assert_eq!(s1.sets, s2.sets);
    }
}

#[test]
fn boundary_empty_iff_union_of_components() {
    // oracle: S is a union of components iff no edge leaves S
    for seed in 0..20u64 {
        let g = random_connected_graph(
            seed,
            RandomGraphOptions {
                vertices: 10,
                extra_edges: 4,
                ..Default::default()
            },
        );
        let verts = g.finite_vertices().unwrap();
        let set: BTreeSet<VertexId> = verts
            .iter()
            .enumerate()
            .filter(|(i, _)| (seed >> (i % 10)) & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        if set.is_empty() {
            continue;
        }
        let bd = inner_boundary(&g, &set).unwrap();
        assert!(bd.iter().all(|v| set.contains(v)), "boundary inside S");
        let closed = set.iter().all(|&v| {
            g.neighbors(v)
                .unwrap()
                .iter()
                .all(|w| set.contains(w))
        });
        assert_eq!(bd.is_empty(), closed, "seed {seed}");
    }
}

#[test]
fn folner_bound_certified_on_z2() {
    let rooted = RootedGraph::new(make_generator(&GeneratorSpec::lattice(2)).unwrap(), "0,0")
        .unwrap();
    let mut f_labels = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            f_labels.push(format!("{x},{y}"));
        }
    }
    // inner boundary of the 4x4 square is the 12-cell rim
    let witness: CutWitness<Exact> = folner_translate_search(&rooted, &f_labels, 12).unwrap();
    assert!(witness.ratio <= Exact::from_ratio_u64(12, 16));
    assert_eq!(witness.n, Some(12));
}

#[test]
fn folner_on_free_group() {
    let rooted =
        RootedGraph::new(make_generator(&GeneratorSpec::free_group(2)).unwrap(), "").unwrap();
    // F = ball of radius 1 in T_4: 5 vertices, all of them boundary
    let f_labels: Vec<String> = ["", "a", "A", "b", "B"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let witness: CutWitness<Exact> = folner_translate_search(&rooted, &f_labels, 9).unwrap();
    assert!(witness.ratio <= Exact::from_ratio_u64(5, 5));
}
