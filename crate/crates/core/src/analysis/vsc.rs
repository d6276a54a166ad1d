use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::sequences::{l2_norm, Coefficients};
use crate::tikhonov::{minimize, PenaltySpec};

use super::IndexFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct VscReport {
    /// max over all tested z of R(x) − R(z) − φ(‖Ax − Az‖²).
    pub max_violation: f64,
    /// The same maximum restricted to the path points z = x_α.
    pub path_max_violation: f64,
    /// Smallest |violation| on the path, near zero when φ is the minimal one.
    pub path_min_gap: f64,
    pub tested: usize,
}

/// Seeded comparison points around x.
///
/// Even draws add a Gaussian direction at a log-uniform scale between 1e-6
/// and 10 times max(‖x‖, 1); odd draws rescale each coordinate by a factor
/// in [−1, 2]. The scalings λx for a few λ, and z = 0, are always included.
pub fn sample_perturbations(x: &Coefficients, trials: usize, seed: u64) -> Result<Vec<Coefficients>> {
    if trials == 0 {
        return Err(VarregError::Empty("zero perturbation trials".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = x.norm().max(1.0);
    let mut out = Vec::with_capacity(trials + 6);
    for lambda in [0.0, 0.25, 0.5, 0.9, 1.1, 2.0] {
        out.push(x.scaled(lambda)?);
    }
    for i in 0..trials {
        let vals: Vec<f64> = if i % 2 == 0 {
            let dir: Vec<f64> = (0..x.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = l2_norm(&dir);
            let scale = base * 10f64.powf(rng.random_range(-6.0..1.0)) / n.max(f64::MIN_POSITIVE);
            x.values().iter().zip(&dir).map(|(v, d)| v + scale * d).collect()
        } else {
            x.values().iter().map(|v| v * rng.random_range(-1.0..2.0)).collect()
        };
        out.push(x.with_values(vals)?);
    }
    Ok(out)
}

/// Largest violation of R(x) − R(z) ≤ φ(‖Ax − Az‖²) over `samples` and the
/// exact-data path points x_α for α in `path_alphas`.
pub fn vsc_check(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    phi: &dyn IndexFunction,
    samples: &[Coefficients],
    path_alphas: &[f64],
) -> Result<VscReport> {
    if samples.is_empty() && path_alphas.is_empty() {
        return Err(VarregError::Empty("no comparison points".into()));
    }
    let violation = |z: &Coefficients| -> Result<f64> {
        let d = op.image_distance(x, z)?;
        Ok(penalty.difference(x, z)? - phi.eval(d * d))
    };
    let sampled: Vec<f64> = samples.par_iter().map(violation).collect::<Result<_>>()?;
    let ax = op.apply_forward(x)?;
    let path: Vec<f64> = path_alphas
        .par_iter()
        .map(|&alpha| violation(&minimize(op, penalty, &ax, alpha)?.x_hat))
        .collect::<Result<_>>()?;
    let path_max = path.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(VscReport {
        max_violation: sampled.iter().copied().fold(path_max, f64::max),
        path_max_violation: path_max,
        path_min_gap: path.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min),
        tested: sampled.len() + path.len(),
    })
}
