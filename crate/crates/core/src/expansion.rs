//! Boundary operators, expansion ratios of vertex measures, exact and
//! heuristic expansion profiles, and witness constructions.
//!
//! The boundary is the inner vertex boundary: the vertices of S having at
//! least one neighbor outside S, with neighbors taken in the full graph.
//! An outer mode exists for sensitivity analysis.

use crate::error::{HeatLabError, Result};
use crate::graph::{Graph, RootedGraph, VertexId};
use crate::measure::{Mass, VertexMeasure};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Which side of the cut the boundary vertices are taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Vertices of S with a neighbor outside S (the default everywhere).
    Inner,
    /// Vertices outside S with a neighbor in S.
    Outer,
}

/// Boundary of a finite vertex set, in the chosen mode. Neighbors are
/// resolved in the full graph, not in any induced subgraph.
pub fn boundary(
    g: &Graph,
    set: &BTreeSet<VertexId>,
    mode: BoundaryMode,
) -> Result<BTreeSet<VertexId>> {
    let mut out = BTreeSet::new();
    match mode {
        BoundaryMode::Inner => {
            for &v in set {
                if g.neighbors(v)?.iter().any(|w| !set.contains(w)) {
                    out.insert(v);
                }
            }
        }
        BoundaryMode::Outer => {
            for &v in set {
                for &w in g.neighbors(v)?.iter() {
                    if !set.contains(&w) {
                        out.insert(w);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Inner vertex boundary of S.
pub fn inner_boundary(g: &Graph, set: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>> {
    boundary(g, set, BoundaryMode::Inner)
}

/// Masses and ratio of a candidate cut: `(mu(S), mu(boundary S), ratio)`.
pub fn expansion_ratio<M: Mass>(
    g: &Graph,
    mu: &VertexMeasure<M>,
    set: &BTreeSet<VertexId>,
) -> Result<(M, M, M)> {
    expansion_ratio_with_mode(g, mu, set, BoundaryMode::Inner)
}

pub fn expansion_ratio_with_mode<M: Mass>(
    g: &Graph,
    mu: &VertexMeasure<M>,
    set: &BTreeSet<VertexId>,
    mode: BoundaryMode,
) -> Result<(M, M, M)> {
    let mass_s = mu.mass_of_vertices(set.iter());
    if mass_s.is_zero() {
        return Err(HeatLabError::ZeroMassError);
    }
    let bd = boundary(g, set, mode)?;
    let mass_boundary = mu.mass_of_vertices(bd.iter());
    let ratio = mass_boundary.div(&mass_s);
    Ok((mass_s, mass_boundary, ratio))
}

/// How the quantifier over candidate sets is read when minimizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfilePolicy {
    /// Candidate sets range over subsets of supp(mu); boundary in the full
    /// graph. The measure-theoretically meaningful minimum.
    #[default]
    SupportOnly,
    /// Candidate sets are implicitly padded with every zero-mass vertex:
    /// only neighbors inside supp(mu)\S make a vertex boundary. The literal
    /// adversarial minimum.
    SupportPlusPadding,
}

/// Method tag carried by a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMethod {
    Exact,
    Sweep,
    PartitionWitness,
    Folner,
}

impl WitnessMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessMethod::Exact => "exact",
            WitnessMethod::Sweep => "sweep",
            WitnessMethod::PartitionWitness => "partition-witness",
            WitnessMethod::Folner => "folner",
        }
    }
}

/// The candidate set and its boundary, either listed in full or summarized
/// when a certified-finite set is too large to enumerate.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessSets {
    Explicit {
        s: Vec<String>,
        boundary: Vec<String>,
    },
    /// One descriptor per selected component plus the boundary vertices that
    /// carry positive mass.
    Summarized {
        components: Vec<String>,
        boundary_support: Vec<String>,
    },
}

/// A candidate cut S with its masses under some measure, plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct CutWitness<M: Mass> {
    /// Walk step the measure came from, when known.
    pub n: Option<u32>,
    pub sets: WitnessSets,
    pub mass_s: M,
    pub mass_boundary: M,
    pub ratio: M,
    pub method: WitnessMethod,
    /// A bound h with ratio < h, when one is certified.
    pub certified_below: Option<M>,
    pub flags: Vec<String>,
}

impl<M: Mass> CutWitness<M> {
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        if let Some(n) = self.n {
            obj.insert("n".into(), serde_json::json!(n));
        }
        match &self.sets {
            WitnessSets::Explicit { s, boundary } => {
                obj.insert("S".into(), serde_json::json!(s));
                obj.insert("boundary".into(), serde_json::json!(boundary));
            }
            WitnessSets::Summarized {
                components,
                boundary_support,
            } => {
                obj.insert("S_components".into(), serde_json::json!(components));
                obj.insert(
                    "boundary_support".into(),
                    serde_json::json!(boundary_support),
                );
            }
        }
        obj.insert("mass_S".into(), serde_json::json!(self.mass_s.render()));
        obj.insert(
            "mass_boundary".into(),
            serde_json::json!(self.mass_boundary.render()),
        );
        obj.insert("ratio".into(), serde_json::json!(self.ratio.render()));
        obj.insert("method".into(), serde_json::json!(self.method.as_str()));
        if let Some(h) = &self.certified_below {
            obj.insert("certified_below".into(), serde_json::json!(h.render()));
        }
        obj.insert("flags".into(), serde_json::json!(self.flags));
        serde_json::Value::Object(obj)
    }
}

pub const DEFAULT_SEARCH_CAP: usize = 22;

fn sorted_labels(g: &Graph, set: &BTreeSet<VertexId>) -> Vec<String> {
    let mut labels: Vec<String> = set.iter().map(|&v| g.label(v).to_string()).collect();
    labels.sort();
    labels
}

/// Shared incremental state for subset enumeration: per-vertex count of
/// distinct in-support neighbors currently outside the set, plus the mass of
/// the current set and of its boundary.
struct SubsetState<M: Mass> {
    masses: Vec<M>,
    fixed_outside: Vec<bool>,
    supp_adj: Vec<Vec<usize>>,
    in_set: Vec<bool>,
    out_cnt: Vec<u32>,
    is_boundary: Vec<bool>,
    mass_s: M,
    mass_boundary: M,
    members: usize,
    policy: ProfilePolicy,
}

impl<M: Mass> SubsetState<M> {
    fn new(
        g: &Graph,
        verts: &[VertexId],
        mu: &VertexMeasure<M>,
        policy: ProfilePolicy,
    ) -> Result<SubsetState<M>> {
        let index: HashMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut fixed_outside = vec![false; verts.len()];
        let mut supp_adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            let mut seen: BTreeSet<usize> = BTreeSet::new();
            for &w in g.neighbors(v)?.iter() {
                match index.get(&w) {
                    Some(&j) if j != i => {
                        seen.insert(j);
                    }
                    Some(_) => {} // a loop never separates v from the set
                    None => fixed_outside[i] = true,
                }
            }
            supp_adj[i] = seen.into_iter().collect();
        }
        let out_cnt = supp_adj.iter().map(|a| a.len() as u32).collect();
        Ok(SubsetState {
            masses: verts.iter().map(|&v| mu.mass_of(v)).collect(),
            fixed_outside,
            supp_adj,
            in_set: vec![false; verts.len()],
            out_cnt,
            is_boundary: vec![false; verts.len()],
            mass_s: M::zero(),
            mass_boundary: M::zero(),
            members: 0,
            policy,
        })
    }

    fn boundary_condition(&self, i: usize) -> bool {
        let outside_counts = match self.policy {
            ProfilePolicy::SupportOnly => self.fixed_outside[i],
            ProfilePolicy::SupportPlusPadding => false,
        };
        outside_counts || self.out_cnt[i] > 0
    }

    fn refresh_flag(&mut self, i: usize) {
        if !self.in_set[i] {
            if self.is_boundary[i] {
                let m = self.masses[i].clone();
                self.mass_boundary.sub_assign(&m);
                self.is_boundary[i] = false;
            }
            return;
        }
        let want = self.boundary_condition(i);
        if want && !self.is_boundary[i] {
            let m = self.masses[i].clone();
            self.mass_boundary.add_assign(&m);
            self.is_boundary[i] = true;
        } else if !want && self.is_boundary[i] {
            let m = self.masses[i].clone();
            self.mass_boundary.sub_assign(&m);
            self.is_boundary[i] = false;
        }
    }

    fn toggle(&mut self, j: usize) {
        let mass_j = self.masses[j].clone();
        if !self.in_set[j] {
            self.in_set[j] = true;
            self.members += 1;
            self.mass_s.add_assign(&mass_j);
            for idx in 0..self.supp_adj[j].len() {
                let i = self.supp_adj[j][idx];
                self.out_cnt[i] -= 1;
                self.refresh_flag(i);
            }
        } else {
            self.in_set[j] = false;
            self.members -= 1;
            self.mass_s.sub_assign(&mass_j);
            for idx in 0..self.supp_adj[j].len() {
                let i = self.supp_adj[j][idx];
                self.out_cnt[i] += 1;
                self.refresh_flag(i);
            }
        }
        self.refresh_flag(j);
    }
}

/// Exhaustive minimum of the expansion ratio over nonempty S inside
/// supp(mu) with mu(S) at most half the total mass. Subsets are enumerated
/// in Gray-code order with O(deg) incremental boundary updates per step.
pub fn exact_profile<M: Mass>(
    g: &Graph,
    mu: &VertexMeasure<M>,
    policy: ProfilePolicy,
    cap: usize,
) -> Result<(M, CutWitness<M>)> {
    let verts: Vec<VertexId> = mu.support().collect();
    if verts.len() > cap {
        return Err(HeatLabError::SearchCapExceeded {
            support: verts.len(),
            cap,
        });
    }
    if verts.is_empty() {
        return Err(HeatLabError::NoFeasibleSet);
    }
    let half = mu.total_mass().div_u64(2);

    let mut state = SubsetState::new(g, &verts, mu, policy)?;
    let total = 1u64 << verts.len();
    let mut best: Option<(M, M, u64)> = None; // (mass_boundary, mass_s, mask)
    let mut mask = 0u64;
    for t in 1..total {
        let bit = t.trailing_zeros() as usize;
        state.toggle(bit);
        mask ^= 1 << bit;
        if state.members == 0 || state.mass_s.is_zero() || state.mass_s > half {
            continue;
        }
        let better = match &best {
            None => true,
            // strict cross-multiplied comparison keeps the first minimizer
            Some((bm, ms, _)) => state.mass_boundary.mul(ms) < bm.mul(&state.mass_s),
        };
        if better {
            best = Some((state.mass_boundary.clone(), state.mass_s.clone(), mask));
        }
    }

    let (mass_boundary, mass_s, mask) = best.ok_or(HeatLabError::NoFeasibleSet)?;
    let set: BTreeSet<VertexId> = verts
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect();
    let bd = profile_boundary(g, mu, &set, policy)?;
    let ratio = mass_boundary.div(&mass_s);
    let witness = CutWitness {
        n: None,
        sets: WitnessSets::Explicit {
            s: sorted_labels(g, &set),
            boundary: sorted_labels(g, &bd),
        },
        mass_s,
        mass_boundary,
        ratio: ratio.clone(),
        method: WitnessMethod::Exact,
        certified_below: None,
        flags: vec![match policy {
            ProfilePolicy::SupportOnly => "policy:support-only".into(),
            ProfilePolicy::SupportPlusPadding => "policy:support-plus-padding".into(),
        }],
    };
    Ok((ratio, witness))
}

/// Boundary of S under a profile policy: the full-graph inner boundary for
/// support-only, and the boundary against supp(mu)\S for the padded policy.
fn profile_boundary<M: Mass>(
    g: &Graph,
    mu: &VertexMeasure<M>,
    set: &BTreeSet<VertexId>,
    policy: ProfilePolicy,
) -> Result<BTreeSet<VertexId>> {
    match policy {
        ProfilePolicy::SupportOnly => inner_boundary(g, set),
        ProfilePolicy::SupportPlusPadding => {
            let mut out = BTreeSet::new();
            for &v in set {
                if g.neighbors(v)?
                    .iter()
                    .any(|w| !set.contains(w) && mu.contains(*w))
                {
                    out.insert(v);
                }
            }
            Ok(out)
        }
    }
}

/// Sweep cut: order support vertices by mu(v)/deg(v) descending (ties by
/// label), evaluate every prefix with mass at most half the total under
/// support-only semantics, and return the best.
pub fn sweep_profile<M: Mass>(g: &Graph, mu: &VertexMeasure<M>) -> Result<CutWitness<M>> {
    let mut order: Vec<(VertexId, M)> = Vec::new();
    for (v, mass) in mu.iter() {
        let key = mass.div_u64(g.degree(v)? as u64);
        order.push((v, key));
    }
    order.sort_by(|(va, ka), (vb, kb)| {
        kb.partial_cmp(ka)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| g.label(*va).cmp(&g.label(*vb)))
    });
    let verts: Vec<VertexId> = order.into_iter().map(|(v, _)| v).collect();
    if verts.is_empty() {
        return Err(HeatLabError::NoFeasibleSet);
    }
    let half = mu.total_mass().div_u64(2);

    let mut state = SubsetState::new(g, &verts, mu, ProfilePolicy::SupportOnly)?;
    let mut best: Option<(M, M, usize)> = None;
    for prefix in 0..verts.len() {
        state.toggle(prefix);
        if state.mass_s > half {
            break; // prefix masses only grow along the sweep
        }
        if state.mass_s.is_zero() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bm, ms, _)) => state.mass_boundary.mul(ms) < bm.mul(&state.mass_s),
        };
        if better {
            best = Some((
                state.mass_boundary.clone(),
                state.mass_s.clone(),
                prefix + 1,
            ));
        }
    }
    let (mass_boundary, mass_s, len) = best.ok_or(HeatLabError::NoFeasibleSet)?;
    let set: BTreeSet<VertexId> = verts[..len].iter().copied().collect();
    let bd = inner_boundary(g, &set)?;
    let ratio = mass_boundary.div(&mass_s);
    Ok(CutWitness {
        n: None,
        sets: WitnessSets::Explicit {
            s: sorted_labels(g, &set),
            boundary: sorted_labels(g, &bd),
        },
        mass_s,
        mass_boundary,
        ratio,
        method: WitnessMethod::Sweep,
        certified_below: None,
        flags: Vec::new(),
    })
}

/// Per-step expansion record.
#[derive(Debug, Clone)]
pub struct ProfileEntry<M: Mass> {
    pub n: u32,
    pub h_star: M,
    pub witness: CutWitness<M>,
    /// Whether h_star is the certified exhaustive minimum.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct ExpansionProfile<M: Mass> {
    pub entries: Vec<ProfileEntry<M>>,
}

impl<M: Mass> Default for ExpansionProfile<M> {
    fn default() -> Self {
        ExpansionProfile {
            entries: Vec::new(),
        }
    }
}

/// Expansion profile across walk steps 0..=n_max: the exhaustive minimum
/// while the support fits under the cap, the sweep upper bound afterwards.
/// Steps with no feasible candidate set (e.g. n = 0) are skipped.
pub fn expansion_profile<M: Mass>(
    rooted: &RootedGraph,
    n_max: u32,
    lazy: bool,
    policy: ProfilePolicy,
    cap: usize,
) -> Result<ExpansionProfile<M>> {
    let g = &rooted.graph;
    let mut mu: VertexMeasure<M> = VertexMeasure::dirac(rooted.root);
    let mut profile = ExpansionProfile::default();
    for n in 0..=n_max {
        if n > 0 {
            mu = crate::heat::walk_step(g, &mu, lazy)?;
        }
        let result = match exact_profile(g, &mu, policy, cap) {
            Ok((h_star, mut witness)) => {
                witness.n = Some(n);
                Some((h_star, witness, true))
            }
            Err(HeatLabError::SearchCapExceeded { .. }) => {
                let mut witness = sweep_profile(g, &mu)?;
                witness.n = Some(n);
                Some((witness.ratio.clone(), witness, false))
            }
            Err(HeatLabError::NoFeasibleSet) => None,
            Err(other) => return Err(other),
        };
        if let Some((h_star, witness, exact)) = result {
            profile.entries.push(ProfileEntry {
                n,
                h_star,
                witness,
                exact,
            });
        }
    }
    Ok(profile)
}

/// Predicate selecting the removed set in a partition witness.
pub trait CutPredicate {
    fn contains(&self, g: &Graph, v: VertexId) -> Result<bool>;
    fn describe(&self) -> String;
}

/// An explicit finite cut given by vertex labels.
pub struct LabelCut(pub HashSet<String>);

impl CutPredicate for LabelCut {
    fn contains(&self, g: &Graph, v: VertexId) -> Result<bool> {
        Ok(self.0.contains(g.label(v).as_ref()))
    }
    fn describe(&self) -> String {
        format!("label-set({} vertices)", self.0.len())
    }
}

/// Assemble a small-boundary set from the connected components left after
/// removing a cut: explore the ball of radius n + guard, drop the cut,
/// order components by decreasing mass (ties by smallest vertex label), and
/// take whole components until the next one would push the cumulative mass
/// to half or beyond.
///
/// Components touching the guard shell cannot be certified finite here; if
/// one of them is needed for S the search fails with `GuardTooSmall`.
pub fn witness_from_partition<M: Mass>(
    rooted: &RootedGraph,
    n: u32,
    mu: &VertexMeasure<M>,
    cut: &dyn CutPredicate,
    guard: u32,
) -> Result<CutWitness<M>> {
    let g = &rooted.graph;
    let radius = n + guard;
    let exploration = g.explore(rooted.root, radius)?;

    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    let nverts = exploration.verts.len();
    let mut parent: Vec<usize> = (0..nverts).collect();
    let mut in_cut = vec![false; nverts];
    for (i, &v) in exploration.verts.iter().enumerate() {
        in_cut[i] = cut.contains(g, v)?;
    }
    for (i, &v) in exploration.verts.iter().enumerate() {
        if in_cut[i] {
            continue;
        }
        for &w in g.neighbors(v)?.iter() {
            if let Some(&j) = exploration.index.get(&w) {
                if !in_cut[j] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }

    struct Component<M> {
        members: Vec<usize>,
        mass: M,
        min_label: String,
        confirmed: bool,
    }
    let mut components: BTreeMap<usize, Component<M>> = BTreeMap::new();
    for i in 0..nverts {
        if in_cut[i] {
            continue;
        }
        let root = find(&mut parent, i);
        let v = exploration.verts[i];
        let label = g.label(v).to_string();
        let entry = components.entry(root).or_insert_with(|| Component {
            members: Vec::new(),
            mass: M::zero(),
            min_label: label.clone(),
            confirmed: true,
        });
        entry.members.push(i);
        entry.mass.add_assign(&mu.mass_of(v));
        if label < entry.min_label {
            entry.min_label = label;
        }
        if exploration.dist[i] == radius {
            entry.confirmed = false;
        }
    }

    let mut ordered: Vec<Component<M>> = components.into_values().collect();
    ordered.sort_by(|a, b| {
        b.mass
            .partial_cmp(&a.mass)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.min_label.cmp(&b.min_label))
    });

    let half = mu.total_mass().div_u64(2);
    let mut cumulative = M::zero();
    let mut k: Option<usize> = None;
    for (idx, component) in ordered.iter().enumerate() {
        cumulative.add_assign(&component.mass);
        if cumulative >= half {
            k = Some(idx + 1);
            break;
        }
    }
    let k = k.ok_or_else(|| {
        HeatLabError::DegeneratePartition(
            "components carry less than half the total mass".into(),
        )
    })?;
    if k == 1 {
        return Err(HeatLabError::DegeneratePartition(format!(
            "first component (min label {}) already carries mass >= 1/2",
            ordered[0].min_label
        )));
    }
    for component in &ordered[..k - 1] {
        if !component.confirmed {
            return Err(HeatLabError::GuardTooSmall {
                component: component.min_label.clone(),
            });
        }
    }

    let mut flags = Vec::new();
    if !ordered[k - 1].confirmed {
        flags.push("ck-unconfirmed".to_string());
    }
    let set: BTreeSet<VertexId> = ordered[..k - 1]
        .iter()
        .flat_map(|c| c.members.iter().map(|&i| exploration.verts[i]))
        .collect();
    let bd = inner_boundary(g, &set)?;
    let mass_s = mu.mass_of_vertices(set.iter());
    let mass_boundary = mu.mass_of_vertices(bd.iter());
    let ratio = mass_boundary.div(&mass_s);
    Ok(CutWitness {
        n: Some(n),
        sets: WitnessSets::Explicit {
            s: sorted_labels(g, &set),
            boundary: sorted_labels(g, &bd),
        },
        mass_s,
        mass_boundary,
        ratio,
        method: WitnessMethod::PartitionWitness,
        certified_below: None,
        flags,
    })
}

/// Scan the translates gF of a finite set F under the graph's translation
/// action and return the one minimizing the expansion ratio of the n-step
/// kernel at the root. The averaging identity guarantees the minimum is at
/// most |inner boundary of F| / |F|; this is asserted.
pub fn folner_translate_search<M: Mass>(
    rooted: &RootedGraph,
    f_labels: &[String],
    n: u32,
) -> Result<CutWitness<M>> {
    let g = &rooted.graph;
    let family = g
        .family()
        .ok_or_else(|| {
            HeatLabError::UnsupportedGraph("translate search needs a generated graph".into())
        })?
        .clone();
    if f_labels.is_empty() {
        return Err(HeatLabError::NoFeasibleSet);
    }
    let f_set: BTreeSet<VertexId> = f_labels
        .iter()
        .map(|l| g.vertex(l))
        .collect::<Result<_>>()?;
    let f_boundary = inner_boundary(g, &f_set)?;
    let f_boundary_labels: Vec<String> = f_boundary
        .iter()
        .map(|&v| g.label(v).to_string())
        .collect();
    let averaging_bound = M::from_ratio_u64(f_boundary.len() as u64, f_set.len() as u64);

    let mu: VertexMeasure<M> = crate::heat::heat_kernel(rooted, n, false)?;

    // Candidate translates: anything mapping some f in F onto a support
    // vertex, i.e. g = s * f^{-1}. Every translate with positive mass is of
    // this form.
    let mut candidates: BTreeSet<String> = BTreeSet::new();
    for s in mu.support() {
        let s_label = g.label(s);
        for f in f_labels {
            let f_inv = family.invert(f)?;
            candidates.insert(family.translate(&s_label, &f_inv)?);
        }
    }

    let mut best: Option<(M, M, String)> = None;
    for shift in &candidates {
        let mut mass_s = M::zero();
        for f in &f_set {
            let moved = family.translate(shift, &g.label(*f))?;
            mass_s.add_assign(&mu.mass_of(g.vertex(&moved)?));
        }
        if mass_s.is_zero() {
            continue;
        }
        let mut mass_boundary = M::zero();
        for b in &f_boundary {
            let moved = family.translate(shift, &g.label(*b))?;
            mass_boundary.add_assign(&mu.mass_of(g.vertex(&moved)?));
        }
        let better = match &best {
            None => true,
            Some((bm, ms, _)) => mass_boundary.mul(ms) < bm.mul(&mass_s),
        };
        if better {
            best = Some((mass_boundary, mass_s, shift.clone()));
        }
    }
    let (mass_boundary, mass_s, shift) = best.ok_or(HeatLabError::ZeroMassError)?;
    let ratio = mass_boundary.div(&mass_s);
    assert!(
        ratio <= averaging_bound,
        "averaging bound violated: min translate ratio exceeds |bd F| / |F|"
    );

    let mut s_labels: Vec<String> = Vec::new();
    for f in &f_set {
        s_labels.push(family.translate(&shift, &g.label(*f))?);
    }
    s_labels.sort();
    let mut bd_labels: Vec<String> = Vec::new();
    for b in &f_boundary_labels {
        bd_labels.push(family.translate(&shift, b)?);
    }
    bd_labels.sort();
    let certified = if ratio < averaging_bound {
        Some(averaging_bound)
    } else {
        None
    };
    Ok(CutWitness {
        n: Some(n),
        sets: WitnessSets::Explicit {
            s: s_labels,
            boundary: bd_labels,
        },
        mass_s,
        mass_boundary,
        ratio,
        method: WitnessMethod::Folner,
        certified_below: certified,
        flags: vec![format!("translate:{shift}")],
    })
}
