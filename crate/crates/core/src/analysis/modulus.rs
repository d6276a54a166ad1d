use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::sequences::{Coefficients, SequenceNorm};

/// K = {x : ‖x‖_K ≤ radius} for a symmetric (quasi-)norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBall {
    pub norm: SequenceNorm,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusEstimate {
    /// A lower bound on Ω(δ, K): L(h, −h) for the best h found.
    pub value: f64,
    /// The maximizing h; h and −h both lie in K and ‖A(2h)‖ ≤ δ.
    pub witness: Coefficients,
}

const ASCENT_MAX_COORDS: usize = 512;

/// Randomized lower bound on Ω(δ, K) = sup{L(x₁ − x₂) : x₁, x₂ ∈ K, ‖A(x₁ − x₂)‖ ≤ δ}.
///
/// Pairs are taken antipodal, x₁ = h = −x₂, and every direction v is rescaled
/// to the largest h = tv that stays in K with ‖2Ah‖ ≤ δ. Directions tried are
/// `trials` Gaussian draws and the coordinate vectors, followed by a local
/// coordinate ascent from the best one when the dimension is moderate.
pub fn modulus_estimate(
    op: &DiagonalOperator,
    ball: &NormBall,
    error_norm: &SequenceNorm,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<ModulusEstimate> {
    if trials == 0 {
        return Err(VarregError::Empty("zero modulus trials".into()));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(VarregError::invalid(format!("δ = {delta} must be nonnegative")));
    }
    if !(ball.radius >= 0.0) || !ball.radius.is_finite() {
        return Err(VarregError::invalid(format!("ball radius {} must be nonnegative", ball.radius)));
    }
    let set = op.index_set().clone();
    let n = op.len();
    let zero = Coefficients::zeros(set.clone());
    if ball.radius == 0.0 || delta == 0.0 {
        return Ok(ModulusEstimate { value: 0.0, witness: zero });
    }
    let score = |v: &[f64]| -> Result<(f64, f64)> {
        let c = Coefficients::new(set.clone(), v.to_vec())?;
        let k = ball.norm.eval(&c)?;
        let img = op.apply_forward(&c)?.norm();
        if k == 0.0 || img == 0.0 {
            return Ok((0.0, 0.0));
        }
        let t = (ball.radius / k).min(delta / (2.0 * img));
        Ok((2.0 * t * error_norm.eval(&c)?, t))
    };

    let mut best_v = vec![0.0; n];
    let mut best = 0.0f64;
    let consider = |v: Vec<f64>, best: &mut f64, best_v: &mut Vec<f64>| -> Result<()> {
        let (s, _) = score(&v)?;
        if s > *best {
            *best = s;
            *best_v = v;
        }
        Ok(())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        consider(v, &mut best, &mut best_v)?;
    }
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        consider(v, &mut best, &mut best_v)?;
    }

    if n <= ASCENT_MAX_COORDS && best > 0.0 {
        let mut step = 0.5;
        while step > 1e-4 {
            let mut improved = false;
            let scale = best_v.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut v = best_v.clone();
                    v[i] += sign * step * scale;
                    let (s, _) = score(&v)?;
                    if s > best * (1.0 + 1e-12) {
                        best = s;
                        best_v = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 4.0;
            }
        }
    }

    let (value, t) = score(&best_v)?;
    let witness = Coefficients::new(set, best_v.iter().map(|v| t * v).collect())?;
    Ok(ModulusEstimate { value, witness })
}
