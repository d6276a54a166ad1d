//! Index sets, coefficient vectors and the norms of the sequence-space scale.
//!
//! Coefficients are stored level-major: level `j` occupies a contiguous block
//! of the flat value array, with `k` ascending inside the block. The maps
//! between `(j, k)` and flat indices are explicit methods on
//! [`LeveledIndexSet`].

mod interp;
mod io;
mod norms;

pub use interp::interp_norm_upper;
pub(crate) use io::index_set_from_sizes;
pub use io::{read_csv, read_json, write_csv, write_json, CoefficientsJson};
pub use norms::{besov_norm, weak_quasi_norm, weighted_norm, SequenceNorm};

use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VarregError};

/// The index set Λ = {(j, k)} with level sizes |Λ_j|.
///
/// A flat index set is a single level that carries no dyadic structure.
#[derive(Debug, Clone, PartialEq)]
pub struct LeveledIndexSet {
    d: u32,
    level_sizes: Vec<usize>,
    offsets: Vec<usize>,
    flat: bool,
    c_lambda: f64,
}

impl LeveledIndexSet {
    /// Dyadic levels `j = 0..=finest_level` with |Λ_j| = 2^{jd} exactly.
    pub fn dyadic(d: u32, finest_level: usize) -> Result<Self> {
        if d == 0 {
            return Err(VarregError::invalid("spatial dimension d must be positive"));
        }
        if finest_level.checked_mul(d as usize).is_none_or(|b| b >= 40) {
            return Err(VarregError::invalid("finest level too large (more than 2^40 coordinates)"));
        }
        let sizes = (0..=finest_level).map(|j| 1usize << (j * d as usize)).collect();
        Self::leveled(d, sizes, 1.0)
    }

    /// Leveled index set with explicit sizes; checks 2^{jd} <= |Λ_j| <= C_Λ 2^{jd}.
    pub fn leveled(d: u32, level_sizes: Vec<usize>, c_lambda: f64) -> Result<Self> {
        if d == 0 {
            return Err(VarregError::invalid("spatial dimension d must be positive"));
        }
        if level_sizes.is_empty() {
            return Err(VarregError::Empty("index set with no levels".into()));
        }
        if !(c_lambda >= 1.0) || !c_lambda.is_finite() {
            return Err(VarregError::invalid("C_Λ must be a finite constant >= 1"));
        }
        for (j, &n) in level_sizes.iter().enumerate() {
            let base = 2f64.powi((j as u32 * d) as i32);
            if (n as f64) < base || (n as f64) > c_lambda * base {
                return Err(VarregError::invalid(format!(
                    "level {j} has {n} coordinates, outside [2^(jd), C_Λ 2^(jd)] = [{base}, {}]",
                    c_lambda * base
                )));
            }
        }
        Ok(Self::build(d, level_sizes, false, c_lambda))
    }

    /// A single flat level of `n` coordinates.
    pub fn flat(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(VarregError::Empty("flat index set with zero coordinates".into()));
        }
        Ok(Self::build(1, vec![n], true, 1.0))
    }

    fn build(d: u32, level_sizes: Vec<usize>, flat: bool, c_lambda: f64) -> Self {
        let mut offsets = Vec::with_capacity(level_sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &n in &level_sizes {
            acc += n;
            offsets.push(acc);
        }
        LeveledIndexSet { d, level_sizes, offsets, flat, c_lambda }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn num_levels(&self) -> usize {
        self.level_sizes.len()
    }

    /// Total number of coordinates Σ_j |Λ_j|.
    pub fn len(&self) -> usize {
        *self.offsets.last().expect("offsets never empty")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn c_lambda(&self) -> f64 {
        self.c_lambda
    }

    /// Flat positions of level `j`.
    pub fn level_range(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    pub fn flat_index(&self, j: usize, k: usize) -> Option<usize> {
        (j < self.num_levels() && k < self.level_sizes[j]).then(|| self.offsets[j] + k)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn level_of(&self, i: usize) -> Option<(usize, usize)> {
        if i >= self.len() {
            return None;
        }
        // offsets is sorted; find the last offset <= i
        let j = self.offsets.partition_point(|&o| o <= i) - 1;
        Some((j, i - self.offsets[j]))
    }

    /// Level number of every coordinate, in flat order.
    pub fn levels_per_coordinate(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for (j, &n) in self.level_sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(j, n));
        }
        out
    }

    pub(crate) fn ensure_same(&self, other: &LeveledIndexSet) -> Result<()> {
        if self.level_sizes != other.level_sizes || self.flat != other.flat {
            return Err(VarregError::IndexSetMismatch(format!(
                "level sizes {:?} (flat={}) vs {:?} (flat={})",
                self.level_sizes, self.flat, other.level_sizes, other.flat
            )));
        }
        Ok(())
    }
}

/// A finite real sequence over a [`LeveledIndexSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    index_set: Arc<LeveledIndexSet>,
    values: Vec<f64>,
}

impl Coefficients {
    pub fn new(index_set: Arc<LeveledIndexSet>, values: Vec<f64>) -> Result<Self> {
        if values.len() != index_set.len() {
            return Err(VarregError::LengthMismatch { expected: index_set.len(), found: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(VarregError::invalid(format!("coefficient {i} is not finite")));
        }
        Ok(Coefficients { index_set, values })
    }

    pub fn zeros(index_set: Arc<LeveledIndexSet>) -> Self {
        let values = vec![0.0; index_set.len()];
        Coefficients { index_set, values }
    }

    /// Convenience constructor on a fresh flat index set.
    pub fn flat(values: Vec<f64>) -> Result<Self> {
        let set = Arc::new(LeveledIndexSet::flat(values.len())?);
        Self::new(set, values)
    }

    /// Same index set, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.index_set.clone(), values)
    }

    pub fn index_set(&self) -> &Arc<LeveledIndexSet> {
        &self.index_set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.values[self.index_set.level_range(j)]
    }

    pub fn get(&self, j: usize, k: usize) -> Option<f64> {
        self.index_set.flat_index(j, k).map(|i| self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Unweighted ℓ² norm.
    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| v * factor).collect())
    }

    /// `self - other`, requiring identical index sets.
    pub fn sub(&self, other: &Coefficients) -> Result<Self> {
        self.ensure_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.with_values(values)
    }

    pub fn add(&self, other: &Coefficients) -> Result<Self> {
        self.ensure_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        self.with_values(values)
    }

    pub fn dot(&self, other: &Coefficients) -> Result<f64> {
        self.ensure_compatible(other)?;
        Ok(dot(&self.values, &other.values))
    }

    pub(crate) fn ensure_compatible(&self, other: &Coefficients) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(VarregError::LengthMismatch { expected: self.values.len(), found: other.values.len() });
        }
        self.index_set.ensure_same(&other.index_set)
    }
}

/// Strictly positive, finite per-coordinate weights (ā, r̄, s̄, μ, ν, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(VarregError::Empty("weight vector".into()));
        }
        if let Some(i) = values.iter().position(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(VarregError::invalid(format!(
                "weight {i} = {} is not strictly positive and finite",
                values[i]
            )));
        }
        Ok(WeightVector(values))
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// Weight constant on each level, `w_{(j,k)} = level_weight(j)`.
    pub fn per_level(index_set: &LeveledIndexSet, level_weight: impl Fn(usize) -> f64) -> Result<Self> {
        let mut out = Vec::with_capacity(index_set.len());
        for (j, &n) in index_set.level_sizes().iter().enumerate() {
            out.extend(std::iter::repeat_n(level_weight(j), n));
        }
        Self::new(out)
    }

    /// ω̄_{s,p} with (ω̄_{s,p})_{(j,k)} = 2^{j(s + d/2 − d/p)}, the weight that
    /// identifies b^s_{p,p} with a weighted ℓ^p space.
    pub fn besov_identification(index_set: &LeveledIndexSet, s: f64, p: f64) -> Result<Self> {
        let d = index_set.d() as f64;
        Self::per_level(index_set, |j| 2f64.powf(j as f64 * (s + d / 2.0 - d / p)))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(VarregError::LengthMismatch { expected: n, found: self.0.len() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = VarregError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// Inner or outer exponent of a Besov sequence norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    fn validate(self, name: &str) -> Result<()> {
        match self {
            Exponent::Finite(v) if !(v > 0.0) || !v.is_finite() => {
                Err(VarregError::invalid(format!("exponent {name} = {v} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// Parameters (s, p, q) of b^s_{p,q}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl BesovParams {
    pub fn new(s: f64, p: Exponent, q: Exponent) -> Result<Self> {
        if !s.is_finite() {
            return Err(VarregError::invalid("smoothness s must be finite"));
        }
        p.validate("p")?;
        q.validate("q")?;
        Ok(BesovParams { s, p, q })
    }

    pub fn finite(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(s, Exponent::Finite(p), Exponent::Finite(q))
    }
}

/// ℓ² norm with max-scaling; fixed left-to-right summation.
pub fn l2_norm(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let s: f64 = v.iter().map(|x| (x / m) * (x / m)).sum();
    m * s.sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_sizes_and_maps() {
        let set = LeveledIndexSet::dyadic(1, 3).unwrap();
        assert_eq!(set.level_sizes(), &[1, 2, 4, 8]);
        assert_eq!(set.len(), 15);
        assert_eq!(set.level_range(2), 3..7);
        for i in 0..set.len() {
            let (j, k) = set.level_of(i).unwrap();
            assert_eq!(set.flat_index(j, k), Some(i));
        }
        assert_eq!(set.level_of(15), None);
        assert_eq!(set.flat_index(1, 2), None);
    }

    #[test]
    fn leveled_checks_size_bounds() {
        assert!(LeveledIndexSet::leveled(1, vec![1, 2, 4], 1.0).is_ok());
        assert!(LeveledIndexSet::leveled(1, vec![1, 3, 4], 1.0).is_err());
        assert!(LeveledIndexSet::leveled(1, vec![1, 3, 4], 2.0).is_ok());
        assert!(LeveledIndexSet::leveled(2, vec![1, 3], 1.0).is_err());
    }

    #[test]
    fn coefficients_reject_bad_input() {
        let set = Arc::new(LeveledIndexSet::flat(2).unwrap());
        assert!(Coefficients::new(set.clone(), vec![1.0]).is_err());
        assert!(Coefficients::new(set, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
        let w: std::result::Result<WeightVector, _> = serde_json::from_str("[1.0, -2.0]");
        assert!(w.is_err());
    }

    #[test]
    fn l2_norm_scaling() {
        assert_eq!(l2_norm(&[]), 0.0);
        assert_eq!(l2_norm(&[3.0, 4.0]), 5.0);
        assert!((l2_norm(&[3e200, 4e200]) - 5e200).abs() / 5e200 < 1e-15);
        assert!((l2_norm(&[3e-200, 4e-200]) - 5e-200).abs() / 5e-200 < 1e-15);
    }
}
