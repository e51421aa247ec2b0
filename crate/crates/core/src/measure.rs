//! Sparse probability measures on vertices, generic over the arithmetic.
//!
//! Exact mode works in arbitrary-precision rationals and keeps total mass
//! exactly 1; float mode works in f64 and is checked against drift by the
//! operations that iterate it.

use crate::error::Result;
use crate::graph::{Graph, VertexId};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Arithmetic used for vertex masses. Implemented by [`BigRational`]
/// (exact mode) and [`f64`] (float mode).
pub trait Mass: Clone + PartialEq + PartialOrd + std::fmt::Debug + Send + Sync + 'static {
    const IS_EXACT: bool;
    /// Mode tag recorded in reports: "exact" or "float".
    const MODE_NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio_u64(num: u64, den: u64) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn mul_u64(&self, k: u64) -> Self;
    fn div_u64(&self, k: u64) -> Self;
    fn abs_diff(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// Numerator/denominator strings in lowest terms, exact mode only.
    fn rational_parts(&self) -> Option<(String, String)>;

    /// Sum with whatever compensation the representation needs.
    fn sum<'a, I: Iterator<Item = &'a Self>>(iter: I) -> Self
    where
        Self: 'a,
    {
        let mut acc = Self::zero();
        for x in iter {
            acc.add_assign(x);
        }
        acc
    }

    /// Report rendering: `"p/q"` in exact mode, a decimal in float mode.
    fn render(&self) -> String {
        match self.rational_parts() {
            Some((num, den)) => format!("{num}/{den}"),
            None => format!("{}", self.to_f64()),
        }
    }
}

impl Mass for BigRational {
    const IS_EXACT: bool = true;
    const MODE_NAME: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio_u64(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn mul_u64(&self, k: u64) -> Self {
        self * BigRational::from_integer(BigInt::from(k))
    }
    fn div_u64(&self, k: u64) -> Self {
        self / BigRational::from_integer(BigInt::from(k))
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Fall back through a scaled integer division for extreme values.
            let scaled =
                (self * BigRational::from_integer(BigInt::from(1u64 << 52))).to_integer();
            ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN) / (1u64 << 52) as f64
        })
    }
    fn rational_parts(&self) -> Option<(String, String)> {
        Some((self.numer().to_string(), self.denom().to_string()))
    }
}

impl Mass for f64 {
    const IS_EXACT: bool = false;
    const MODE_NAME: &'static str = "float";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio_u64(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn mul_u64(&self, k: u64) -> Self {
        self * k as f64
    }
    fn div_u64(&self, k: u64) -> Self {
        self / k as f64
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn rational_parts(&self) -> Option<(String, String)> {
        None
    }

    fn sum<'a, I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        // Kahan summation keeps the drift check honest on large supports.
        let mut acc = 0.0f64;
        let mut carry = 0.0f64;
        for &x in iter {
            let y = x - carry;
            let t = acc + y;
            carry = (t - acc) - y;
            acc = t;
        }
        acc
    }
}

/// Exact arithmetic alias used throughout the exact-mode pipelines.
pub type Exact = BigRational;

/// Sparse nonnegative vertex measure. Zero-mass vertices are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMeasure<M: Mass> {
    entries: BTreeMap<VertexId, M>,
}

impl<M: Mass> Default for VertexMeasure<M> {
    fn default() -> Self {
        VertexMeasure {
            entries: BTreeMap::new(),
        }
    }
}

impl<M: Mass> VertexMeasure<M> {
    pub fn dirac(v: VertexId) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(v, M::one());
        VertexMeasure { entries }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (VertexId, M)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, m) in entries {
            if !m.is_zero() {
                let slot = map.entry(v).or_insert_with(M::zero);
                slot.add_assign(&m);
            }
        }
        VertexMeasure { entries: map }
    }

    pub fn insert_mass(&mut self, v: VertexId, m: M) {
        if m.is_zero() {
            return;
        }
        let slot = self.entries.entry(v).or_insert_with(M::zero);
        slot.add_assign(&m);
    }

    pub fn get(&self, v: VertexId) -> Option<&M> {
        self.entries.get(&v)
    }

    pub fn mass_of(&self, v: VertexId) -> M {
        self.entries.get(&v).cloned().unwrap_or_else(M::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &M)> {
        self.entries.iter().map(|(&v, m)| (v, m))
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.entries.contains_key(&v)
    }

    pub fn total_mass(&self) -> M {
        M::sum(self.entries.values())
    }

    pub fn mass_of_vertices<'a>(&self, set: impl IntoIterator<Item = &'a VertexId>) -> M {
        let mut acc = M::zero();
        for v in set {
            if let Some(m) = self.entries.get(v) {
                acc.add_assign(m);
            }
        }
        acc
    }

    /// Pointwise scaling; used by the scale-invariance checks.
    pub fn scaled(&self, factor: &M) -> Self {
        VertexMeasure {
            entries: self
                .entries
                .iter()
                .map(|(&v, m)| (v, m.mul(factor)))
                .collect(),
        }
    }

    /// Arithmetic mode tag ("exact" or "float").
    pub fn mode(&self) -> &'static str {
        M::MODE_NAME
    }

    /// JSONL serialization, one record per vertex, sorted by label.
    pub fn to_jsonl(&self, graph: &Graph) -> String {
        let mut rows: Vec<(String, &M)> = self
            .entries
            .iter()
            .map(|(&v, m)| (graph.label(v).to_string(), m))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = String::new();
        for (label, mass) in rows {
            let record = match mass.rational_parts() {
                Some((num, den)) => serde_json::json!({
                    "v": label,
                    "mass_num": num,
                    "mass_den": den,
                }),
                None => serde_json::json!({
                    "v": label,
                    "mass": mass.to_f64(),
                }),
            };
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out
    }
}

/// Total-variation distance between two measures on the same graph,
/// computed in the measure arithmetic (exact in exact mode).
pub fn total_variation<M: Mass>(a: &VertexMeasure<M>, b: &VertexMeasure<M>) -> M {
    let mut acc = M::zero();
    for (v, mass) in a.iter() {
        acc.add_assign(&mass.abs_diff(&b.mass_of(v)));
    }
    for (v, mass) in b.iter() {
        if !a.contains(v) {
            acc.add_assign(&mass.abs_diff(&M::zero()));
        }
    }
    acc.div_u64(2)
}

/// Parse an exact rational from a `"p/q"` or integer string.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| crate::error::HeatLabError::ConfigError {
                field: "ratio".into(),
                reason: format!("bad integer `{s}`"),
            })
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(crate::error::HeatLabError::ConfigError {
                    field: "ratio".into(),
                    reason: "zero denominator".into(),
                });
            }
            Ok(BigRational::new(parse_int(num)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(text)?)),
    }
}
