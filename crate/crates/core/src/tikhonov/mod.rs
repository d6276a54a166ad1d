//! Exact minimization of T_α(x,g) = (1/(2α))‖g − Ax‖² + R(x) on the diagonal model.
//!
//! Both the operator and the penalties separate over coordinates (or over
//! levels for `LevelTwoQ`), so the global minimizer is assembled from
//! independent one-dimensional proximal solves.

mod penalty;
mod prox;
mod rules;

pub use penalty::{PenaltyJson, PenaltySpec};
pub use prox::{prox_level_2q, prox_power_scalar};
pub use rules::{
    apriori_alpha, discrepancy_alpha, nu_from_theta, DiscrepancyOptions, DiscrepancyOutcome, DiscrepancyStatus,
    RateExponent,
};

use rayon::prelude::*;

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::sequences::{l2_norm, Coefficients};

/// Coordinates per rayon task; smaller problems stay on one thread.
const PAR_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct TikhonovSolution {
    pub x_hat: Coefficients,
    pub alpha: f64,
    /// ‖g − A x̂_α‖.
    pub residual: f64,
    /// R(x̂_α).
    pub penalty_value: f64,
    /// Largest scaled stationarity violation over coordinates or levels.
    pub kkt_gap: f64,
}

impl TikhonovSolution {
    /// T_α(x̂_α, g), rebuilt from the residual and the penalty value.
    pub fn objective(&self) -> f64 {
        if self.alpha.is_infinite() {
            return self.penalty_value;
        }
        self.residual * self.residual / (2.0 * self.alpha) + self.penalty_value
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(VarregError::invalid(format!("α = {alpha} must be positive and finite")));
    }
    Ok(())
}

/// The unique minimizer x̂_α of T_α(·, g).
pub fn minimize(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    g: &Coefficients,
    alpha: f64,
) -> Result<TikhonovSolution> {
    check_alpha(alpha)?;
    op.check(g)?;
    penalty.check(g)?;
    let a = op.weights().values();
    let gv = g.values();
    let x = match penalty {
        PenaltySpec::WeightedPower { p, weights } => {
            let w = weights.values();
            let solved: Result<Vec<f64>> = (0..gv.len())
                .into_par_iter()
                .with_min_len(PAR_CHUNK)
                .map(|i| prox_power_scalar(gv[i], a[i], w[i], *p, alpha))
                .collect();
            solved?
        }
        PenaltySpec::LevelTwoQ { q } => {
            let set = g.index_set();
            let levels: Result<Vec<Vec<f64>>> = (0..set.num_levels())
                .into_par_iter()
                .map(|j| {
                    let range = set.level_range(j);
                    let a_level = a[range.start];
                    if a[range.clone()].iter().any(|&v| v != a_level) {
                        return Err(VarregError::NonuniformLevelWeight { level: j });
                    }
                    prox_level_2q(&gv[range], a_level, *q, alpha)
                })
                .collect();
            levels?.concat()
        }
    };
    let x_hat = g.with_values(x)?;
    assemble(op, penalty, g, x_hat, alpha)
}

/// Fills residual, penalty value and KKT gap for a candidate minimizer.
pub(crate) fn assemble(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    g: &Coefficients,
    x_hat: Coefficients,
    alpha: f64,
) -> Result<TikhonovSolution> {
    let a = op.weights().values();
    let residual_vec: Vec<f64> = g.values().iter().zip(x_hat.values()).zip(a).map(|((g, x), a)| g - a * x).collect();
    let residual = l2_norm(&residual_vec);
    let penalty_value = penalty.value(&x_hat)?;
    let kkt_gap = kkt_gap(op, penalty, g, &x_hat, alpha)?;
    Ok(TikhonovSolution { x_hat, alpha, residual, penalty_value, kkt_gap })
}

/// max over coordinates (levels) of |(a/α)(a x − g) + ∇R(x)| / max(1, |g| a/α).
pub fn kkt_gap(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    g: &Coefficients,
    x: &Coefficients,
    alpha: f64,
) -> Result<f64> {
    let a = op.weights().values();
    let grad = penalty.gradient(x)?;
    let stationarity: Vec<f64> = g
        .values()
        .iter()
        .zip(x.values())
        .zip(a)
        .zip(grad.values())
        .map(|(((g, x), a), d)| (a / alpha) * (a * x - g) + d)
        .collect();
    Ok(match penalty {
        PenaltySpec::WeightedPower { .. } => stationarity
            .iter()
            .zip(g.values())
            .zip(a)
            .map(|((s, g), a)| s.abs() / (g.abs() * a / alpha).max(1.0))
            .fold(0.0, f64::max),
        PenaltySpec::LevelTwoQ { .. } => {
            let set = g.index_set();
            (0..set.num_levels())
                .map(|j| {
                    let range = set.level_range(j);
                    let scale = (l2_norm(&g.values()[range.clone()]) * a[range.start] / alpha).max(1.0);
                    l2_norm(&stationarity[range]) / scale
                })
                .fold(0.0, f64::max)
        }
    })
}

/// ϑ_g(α) = T_α(x̂_α, g) and ϑ'_g(α) = −‖g − A x̂_α‖²/(2α²).
pub fn minimal_value(op: &DiagonalOperator, penalty: &PenaltySpec, g: &Coefficients, alpha: f64) -> Result<(f64, f64)> {
    let sol = minimize(op, penalty, g, alpha)?;
    let derivative = -sol.residual * sol.residual / (2.0 * alpha * alpha);
    Ok((sol.objective(), derivative))
}
