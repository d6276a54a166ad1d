//! The diagonal forward operator (Ax)_i = ā_i x_i and noisy observations.
//!
//! The image space is unweighted ℓ² over the same index set, so
//! ‖Ax‖ = ‖x‖_{ℓ²_ā} holds exactly and A is an isometry from ℓ²_ā.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, VarregError};
use crate::sequences::{l2_norm, Coefficients, LeveledIndexSet, WeightVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    index_set: Arc<LeveledIndexSet>,
    a: WeightVector,
    smoothing: Option<f64>,
}

impl DiagonalOperator {
    pub fn new(index_set: Arc<LeveledIndexSet>, a: WeightVector) -> Result<Self> {
        a.check_len(index_set.len())?;
        Ok(DiagonalOperator { index_set, a, smoothing: None })
    }

    /// ā_{(j,k)} = 2^{−ja} on dyadic levels 0..=finest_level in dimension d.
    pub fn besov(d: u32, a: f64, finest_level: usize) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(VarregError::invalid(format!("smoothing degree a = {a} must be positive")));
        }
        let set = Arc::new(LeveledIndexSet::dyadic(d, finest_level)?);
        let weights = WeightVector::per_level(&set, |j| 2f64.powf(-(j as f64) * a))?;
        Ok(DiagonalOperator { index_set: set, a: weights, smoothing: Some(a) })
    }

    /// Explicit weights on a flat index set.
    pub fn explicit(weights: Vec<f64>) -> Result<Self> {
        let set = Arc::new(LeveledIndexSet::flat(weights.len())?);
        Self::new(set, WeightVector::new(weights)?)
    }

    pub fn index_set(&self) -> &Arc<LeveledIndexSet> {
        &self.index_set
    }

    pub fn weights(&self) -> &WeightVector {
        &self.a
    }

    /// The smoothing degree a when built in Besov mode.
    pub fn smoothing(&self) -> Option<f64> {
        self.smoothing
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub(crate) fn check(&self, x: &Coefficients) -> Result<()> {
        if x.len() != self.len() {
            return Err(VarregError::LengthMismatch { expected: self.len(), found: x.len() });
        }
        self.index_set.ensure_same(x.index_set())
    }

    pub fn apply_forward(&self, x: &Coefficients) -> Result<Coefficients> {
        self.check(x)?;
        x.with_values(x.values().iter().zip(self.a.values()).map(|(v, a)| a * v).collect())
    }

    /// A* on unweighted ℓ²; the same diagonal.
    pub fn apply_adjoint(&self, y: &Coefficients) -> Result<Coefficients> {
        self.apply_forward(y)
    }

    /// ‖Ax − Az‖ without materializing either image.
    pub fn image_distance(&self, x: &Coefficients, z: &Coefficients) -> Result<f64> {
        self.check(x)?;
        self.check(z)?;
        let diff: Vec<f64> =
            x.values().iter().zip(z.values()).zip(self.a.values()).map(|((u, v), a)| a * (u - v)).collect();
        Ok(l2_norm(&diff))
    }

    pub fn from_spec(spec: &OperatorSpec) -> Result<Self> {
        match spec {
            OperatorSpec::Besov { a, d, finest_level } => Self::besov(*d, *a, *finest_level),
            OperatorSpec::Explicit { weights } => Self::explicit(weights.clone()),
        }
    }
}

/// JSON form: `{"mode":"besov","a":0.5,"d":1,"J":10}` or `{"mode":"explicit","weights":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Besov {
        a: f64,
        d: u32,
        #[serde(rename = "J")]
        finest_level: usize,
    },
    Explicit {
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub g: Coefficients,
    pub delta: f64,
    pub seed: u64,
}

/// Seeded unit direction: standard normal draws, normalized.
pub fn unit_direction(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(VarregError::Empty("noise direction of dimension zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let draw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = l2_norm(&draw);
        if norm > 0.0 {
            return Ok(draw.into_iter().map(|v| v / norm).collect());
        }
    }
}

/// g^δ = g + δu for a seeded unit vector u, so ‖g^δ − g‖ = δ up to rounding.
pub fn add_noise(g: &Coefficients, delta: f64, seed: u64) -> Result<Observation> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(VarregError::invalid(format!("noise level δ = {delta} must be nonnegative")));
    }
    if g.is_empty() {
        return Err(VarregError::Empty("observation of dimension zero".into()));
    }
    let noisy = if delta == 0.0 {
        g.clone()
    } else {
        let u = unit_direction(g.len(), seed)?;
        g.with_values(g.values().iter().zip(&u).map(|(v, u)| v + delta * u).collect())?
    };
    Ok(Observation { g: noisy, delta, seed })
}
