//! Built-in graph families behind the lazy adjacency oracle.
//!
//! Every family works on canonical string labels: a label is valid iff the
//! family's `validate` accepts it, and `neighbor_labels` only ever emits
//! canonical labels. Two labels denote the same vertex iff they are equal
//! as strings.

use crate::error::{HeatLabError, Result};
use serde::{Deserialize, Serialize};

/// A lazily generated graph family with canonical string labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// The integer lattice Z^dim with nearest-neighbor edges. Labels are
    /// comma-separated coordinates, e.g. `"2,-1"`.
    Lattice { dim: usize },
    /// The degree-regular infinite tree T_d. Labels are words over the first
    /// `degree` lowercase letters with no letter repeated consecutively;
    /// the root is the empty word.
    RegularTree { degree: usize },
    /// The Cayley graph of the free group of the given rank, i.e. the
    /// 2·rank-regular tree. Labels are reduced words; uppercase letters are
    /// the inverses of their lowercase counterparts.
    FreeGroup { rank: usize },
    /// Tower of cyclic quotients C_{p^k} for k = 0..=k_max, with one edge
    /// from each vertex down to its mod-p^{k-1} reduction. Labels are
    /// `"k:i"`.
    CycleTower { p: u64, k_max: u32 },
    /// Tower of SL2(Z/p^k) Cayley graphs (generators [[1,1],[0,1]],
    /// [[1,0],[1,1]] and inverses) with the same vertical edges. Labels are
    /// `"k:a,b,c,d"` with entries reduced mod p^k.
    Sl2Tower { p: u64, k_max: u32 },
}

impl Family {
    pub fn validate_params(&self) -> Result<()> {
        match *self {
            Family::Lattice { dim } => {
                if dim == 0 {
                    return Err(HeatLabError::SpecError("lattice dim must be >= 1".into()));
                }
            }
            Family::RegularTree { degree } => {
                if degree == 0 || degree > 26 {
                    return Err(HeatLabError::SpecError(
                        "regular-tree degree must be in 1..=26".into(),
                    ));
                }
            }
            Family::FreeGroup { rank } => {
                if rank == 0 || rank > 26 {
                    return Err(HeatLabError::SpecError(
                        "free-group rank must be in 1..=26".into(),
                    ));
                }
            }
            Family::CycleTower { p, k_max } | Family::Sl2Tower { p, k_max } => {
                if p < 2 {
                    return Err(HeatLabError::SpecError("tower p must be >= 2".into()));
                }
                if k_max < 1 {
                    return Err(HeatLabError::SpecError("tower k_max must be >= 1".into()));
                }
                // Modulus arithmetic has to stay inside u128, including
                // products taken mod p^k during matrix multiplication.
                let modulus = (p as u128).checked_pow(k_max);
                match modulus {
                    Some(m) if m <= (1u128 << 63) => {}
                    _ => {
                        return Err(HeatLabError::SpecError(
                            "tower p^k_max too large (must fit in 63 bits)".into(),
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// Degree upper bound promised by the family.
    pub fn max_degree(&self) -> usize {
        match *self {
            Family::Lattice { dim } => 2 * dim,
            Family::RegularTree { degree } => degree,
            Family::FreeGroup { rank } => 2 * rank,
            // within-level 2, one edge down, p preimages up
            Family::CycleTower { p, .. } => 2 + 1 + p as usize,
            // within-level 4, one edge down, at most p^3 lifts up
            Family::Sl2Tower { p, .. } => 4 + 1 + (p as usize).pow(3),
        }
    }

    /// Canonical root used by the CLI when no root is configured.
    pub fn root_label(&self) -> String {
        match *self {
            Family::Lattice { dim } => vec!["0"; dim].join(","),
            Family::RegularTree { .. } | Family::FreeGroup { .. } => String::new(),
            Family::CycleTower { .. } => "0:0".into(),
            Family::Sl2Tower { .. } => "0:0,0,0,0".into(),
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(
            self,
            Family::RegularTree { .. } | Family::FreeGroup { .. }
        )
    }

    /// Tower level encoded in a label, for the tower families.
    pub fn tower_level(&self, label: &str) -> Option<u32> {
        match self {
            Family::CycleTower { .. } | Family::Sl2Tower { .. } => {
                label.split(':').next()?.parse().ok()
            }
            _ => None,
        }
    }

    pub fn validate(&self, label: &str) -> Result<()> {
        match *self {
            Family::Lattice { dim } => validate_lattice(dim, label),
            Family::RegularTree { degree } => validate_tree_word(degree, label),
            Family::FreeGroup { rank } => validate_free_word(rank, label),
            Family::CycleTower { p, k_max } => {
                let (k, rest) = split_level(label, k_max)?;
                let size = pow_u128(p, k);
                let i = parse_canonical_u128(rest, label)?;
                if i >= size {
                    return Err(HeatLabError::invalid_vertex(
                        label,
                        format!("index {i} out of range for level {k}"),
                    ));
                }
                Ok(())
            }
            Family::Sl2Tower { p, k_max } => {
                let (k, rest) = split_level(label, k_max)?;
                let m = pow_u128(p, k);
                let e = parse_matrix(rest, label)?;
                if e.iter().any(|&x| x >= m.max(1)) {
                    return Err(HeatLabError::invalid_vertex(label, "entry out of range"));
                }
                if det_mod(e, m) != 1 % m.max(1) {
                    return Err(HeatLabError::invalid_vertex(label, "determinant is not 1"));
                }
                Ok(())
            }
        }
    }

    /// Neighbor multiset of a (valid) label, as canonical labels. A loop at
    /// the vertex contributes the vertex's own label twice.
    pub fn neighbor_labels(&self, label: &str) -> Result<Vec<String>> {
        self.validate(label)?;
        let mut out = Vec::new();
        match *self {
            Family::Lattice { dim } => {
                let coords: Vec<i64> = label.split(',').map(|c| c.parse().unwrap()).collect();
                for axis in 0..dim {
                    for delta in [-1i64, 1] {
                        let mut c = coords.clone();
                        c[axis] += delta;
                        out.push(format_lattice(&c));
                    }
                }
            }
            Family::RegularTree { degree } => {
                let alphabet: Vec<char> = (0..degree).map(|i| (b'a' + i as u8) as char).collect();
                match label.chars().last() {
                    None => out.extend(alphabet.iter().map(|c| c.to_string())),
                    Some(last) => {
                        out.push(label[..label.len() - 1].to_string());
                        for &c in alphabet.iter().filter(|&&c| c != last) {
                            out.push(format!("{label}{c}"));
                        }
                    }
                }
            }
            Family::FreeGroup { rank } => {
                for i in 0..rank {
                    for s in [(b'a' + i as u8) as char, (b'A' + i as u8) as char] {
                        out.push(append_reduced(label, s));
                    }
                }
            }
            Family::CycleTower { p, k_max } => {
                let (k, rest) = split_level(label, k_max)?;
                let size = pow_u128(p, k);
                let i = rest.parse::<u128>().unwrap();
                out.push(format!("{k}:{}", (i + 1) % size));
                out.push(format!("{k}:{}", (i + size - 1) % size));
                if k > 0 {
                    out.push(format!("{}:{}", k - 1, i % pow_u128(p, k - 1)));
                }
                if k < k_max {
                    let up = k + 1;
                    for t in 0..p as u128 {
                        out.push(format!("{up}:{}", i + t * size));
                    }
                }
            }
            Family::Sl2Tower { p, k_max } => {
                let (k, rest) = split_level(label, k_max)?;
                let m = pow_u128(p, k);
                let x = parse_matrix(rest, label)?;
                for g in sl2_generators(m) {
                    out.push(format!("{k}:{}", format_matrix(mat_mul_mod(x, g, m))));
                }
                if k > 0 {
                    let down = pow_u128(p, k - 1);
                    let reduced = x.map(|e| e % down.max(1));
                    out.push(format!("{}:{}", k - 1, format_matrix(reduced)));
                }
                if k < k_max {
                    let up_mod = pow_u128(p, k + 1);
                    for lift in sl2_lifts(x, m, p as u128, up_mod) {
                        out.push(format!("{}:{}", k + 1, format_matrix(lift)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Left-translation of vertex `v` by group element `g`, for the
    /// vertex-transitive families that carry one.
    pub fn translate(&self, g: &str, v: &str) -> Result<String> {
        match self {
            Family::Lattice { .. } => {
                let a: Vec<i64> = g.split(',').map(|c| c.parse().unwrap()).collect();
                let b: Vec<i64> = v.split(',').map(|c| c.parse().unwrap()).collect();
                let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                Ok(format_lattice(&sum))
            }
            Family::FreeGroup { .. } => Ok(concat_reduced(g, v, false)),
            Family::RegularTree { .. } => Ok(concat_reduced(g, v, true)),
            _ => Err(HeatLabError::UnsupportedGraph(
                "no translation action on this family".into(),
            )),
        }
    }

    /// Inverse of a group element, where a translation action exists.
    pub fn invert(&self, g: &str) -> Result<String> {
        match self {
            Family::Lattice { .. } => {
                let a: Vec<i64> = g.split(',').map(|c| c.parse().unwrap()).collect();
                Ok(format_lattice(&a.iter().map(|x| -x).collect::<Vec<_>>()))
            }
            Family::FreeGroup { .. } => Ok(g.chars().rev().map(swap_case).collect()),
            Family::RegularTree { .. } => Ok(g.chars().rev().collect()),
            _ => Err(HeatLabError::UnsupportedGraph(
                "no translation action on this family".into(),
            )),
        }
    }
}

fn swap_case(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

fn is_inverse_pair(a: char, b: char) -> bool {
    a != b && a.eq_ignore_ascii_case(&b)
}

fn append_reduced(word: &str, s: char) -> String {
    match word.chars().last() {
        Some(last) if is_inverse_pair(last, s) => word[..word.len() - 1].to_string(),
        _ => format!("{word}{s}"),
    }
}

/// Concatenate two reduced words, cancelling at the junction. With
/// `involutions` set, each letter is its own inverse (regular-tree case).
fn concat_reduced(g: &str, v: &str, involutions: bool) -> String {
    let mut out: Vec<char> = g.chars().collect();
    for c in v.chars() {
        let cancels = match out.last() {
            Some(&last) if involutions => last == c,
            Some(&last) => is_inverse_pair(last, c),
            None => false,
        };
        if cancels {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out.into_iter().collect()
}

fn format_lattice(coords: &[i64]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn validate_lattice(dim: usize, label: &str) -> Result<()> {
    let parts: Vec<&str> = label.split(',').collect();
    if parts.len() != dim {
        return Err(HeatLabError::invalid_vertex(
            label,
            format!("expected {dim} coordinates"),
        ));
    }
    for part in parts {
        let value: i64 = part
            .parse()
            .map_err(|_| HeatLabError::invalid_vertex(label, "bad coordinate"))?;
        if value.to_string() != part {
            return Err(HeatLabError::invalid_vertex(label, "non-canonical coordinate"));
        }
    }
    Ok(())
}

fn validate_tree_word(degree: usize, label: &str) -> Result<()> {
    let mut prev: Option<char> = None;
    for c in label.chars() {
        let idx = (c as i32) - ('a' as i32);
        if !(0..degree as i32).contains(&idx) {
            return Err(HeatLabError::invalid_vertex(label, "letter out of alphabet"));
        }
        if prev == Some(c) {
            return Err(HeatLabError::invalid_vertex(label, "word is not reduced"));
        }
        prev = Some(c);
    }
    Ok(())
}

fn validate_free_word(rank: usize, label: &str) -> Result<()> {
    let mut prev: Option<char> = None;
    for c in label.chars() {
        let lower = c.to_ascii_lowercase();
        let idx = (lower as i32) - ('a' as i32);
        if !c.is_ascii_alphabetic() || !(0..rank as i32).contains(&idx) {
            return Err(HeatLabError::invalid_vertex(label, "letter out of alphabet"));
        }
        if let Some(p) = prev {
            if is_inverse_pair(p, c) {
                return Err(HeatLabError::invalid_vertex(label, "word is not reduced"));
            }
        }
        prev = Some(c);
    }
    Ok(())
}

fn split_level(label: &str, k_max: u32) -> Result<(u32, &str)> {
    let (k_str, rest) = label
        .split_once(':')
        .ok_or_else(|| HeatLabError::invalid_vertex(label, "missing level prefix"))?;
    let k: u32 = k_str
        .parse()
        .map_err(|_| HeatLabError::invalid_vertex(label, "bad level"))?;
    if k_str != k.to_string() {
        return Err(HeatLabError::invalid_vertex(label, "non-canonical level"));
    }
    if k > k_max {
        return Err(HeatLabError::invalid_vertex(
            label,
            format!("level {k} above tower height {k_max}"),
        ));
    }
    Ok((k, rest))
}

fn parse_canonical_u128(s: &str, label: &str) -> Result<u128> {
    let value: u128 = s
        .parse()
        .map_err(|_| HeatLabError::invalid_vertex(label, "bad index"))?;
    if value.to_string() != s {
        return Err(HeatLabError::invalid_vertex(label, "non-canonical index"));
    }
    Ok(value)
}

fn parse_matrix(s: &str, label: &str) -> Result<[u128; 4]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(HeatLabError::invalid_vertex(label, "expected 4 matrix entries"));
    }
    let mut out = [0u128; 4];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_canonical_u128(part, label)?;
    }
    Ok(out)
}

fn format_matrix(m: [u128; 4]) -> String {
    format!("{},{},{},{}", m[0], m[1], m[2], m[3])
}

fn pow_u128(p: u64, k: u32) -> u128 {
    (p as u128).pow(k)
}

/// Determinant mod m, with mod-1 collapsing everything to 0.
fn det_mod(x: [u128; 4], m: u128) -> u128 {
    if m <= 1 {
        return 0;
    }
    let ad = (x[0] * x[3]) % m;
    let bc = (x[1] * x[2]) % m;
    (ad + m - bc) % m
}

fn mat_mul_mod(x: [u128; 4], y: [u128; 4], m: u128) -> [u128; 4] {
    if m <= 1 {
        return [0; 4];
    }
    [
        (x[0] * y[0] + x[1] * y[2]) % m,
        (x[0] * y[1] + x[1] * y[3]) % m,
        (x[2] * y[0] + x[3] * y[2]) % m,
        (x[2] * y[1] + x[3] * y[3]) % m,
    ]
}

/// The generator multiset {A, A^-1, B, B^-1} reduced mod m.
fn sl2_generators(m: u128) -> [[u128; 4]; 4] {
    if m <= 1 {
        return [[0; 4]; 4];
    }
    let neg_one = m - 1;
    [
        [1 % m, 1 % m, 0, 1 % m],
        [1 % m, neg_one % m, 0, 1 % m],
        [1 % m, 0, 1 % m, 1 % m],
        [1 % m, 0, neg_one % m, 1 % m],
    ]
}

/// All lifts of x in SL2(Z/m) to SL2(Z/up_mod), where up_mod = m * p.
fn sl2_lifts(x: [u128; 4], m: u128, p: u128, up_mod: u128) -> Vec<[u128; 4]> {
    let base = x.map(|e| e % up_mod);
    let mut lifts = Vec::new();
    let step = m.max(1);
    for e0 in 0..p {
        for e1 in 0..p {
            for e2 in 0..p {
                for e3 in 0..p {
                    let y = [
                        (base[0] + e0 * step) % up_mod,
                        (base[1] + e1 * step) % up_mod,
                        (base[2] + e2 * step) % up_mod,
                        (base[3] + e3 * step) % up_mod,
                    ];
                    if det_mod(y, up_mod) == 1 {
                        lifts.push(y);
                    }
                }
            }
        }
    }
    lifts
}
