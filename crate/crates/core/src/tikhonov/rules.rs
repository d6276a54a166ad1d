//! Parameter choice: the a-priori interval and the discrepancy principle.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::sequences::Coefficients;

use super::{minimize, PenaltySpec, TikhonovSolution};

/// Exponent in which the a-priori rule is stated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RateExponent {
    /// Image-space rate ν ∈ (0, 1].
    Nu(f64),
    /// Interpolation index θ ∈ (0, 1] for a penalty of homogeneity u.
    Theta { theta: f64, u: f64 },
}

/// ν = θ / ((1−θ)(u−1) + θ).
pub fn nu_from_theta(theta: f64, u: f64) -> f64 {
    theta / ((1.0 - theta) * (u - 1.0) + theta)
}

impl RateExponent {
    fn validate(self) -> Result<()> {
        match self {
            RateExponent::Nu(nu) if !(nu > 0.0 && nu <= 1.0) => {
                Err(VarregError::invalid(format!("ν = {nu} must lie in (0, 1]")))
            }
            RateExponent::Theta { theta, u } if !(theta > 0.0 && theta <= 1.0) || !(u >= 1.0) || !u.is_finite() => {
                Err(VarregError::invalid(format!("need θ ∈ (0,1] and u ≥ 1, got θ = {theta}, u = {u}")))
            }
            _ => Ok(()),
        }
    }

    /// (exponent of ρ, exponent of δ) in α = c ρ^{e_ρ} δ^{e_δ}.
    fn powers(self) -> (f64, f64) {
        match self {
            RateExponent::Nu(nu) => (-1.0 / nu, 1.0 / nu),
            RateExponent::Theta { theta, u } => (-(u - 1.0) / theta, ((1.0 - theta) * (u - 1.0) + theta) / theta),
        }
    }

    /// The equivalent image-space exponent ν.
    pub fn nu(self) -> f64 {
        match self {
            RateExponent::Nu(nu) => nu,
            RateExponent::Theta { theta, u } => nu_from_theta(theta, u),
        }
    }
}

/// The admissible interval [c_l ρ^{e_ρ} δ^{e_δ}, c_r ρ^{e_ρ} δ^{e_δ}].
pub fn apriori_alpha(delta: f64, rho: f64, exponent: RateExponent, c_l: f64, c_r: f64) -> Result<(f64, f64)> {
    exponent.validate()?;
    for (name, v) in [("δ", delta), ("ρ", rho), ("c_l", c_l), ("c_r", c_r)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(VarregError::invalid(format!("{name} = {v} must be positive and finite")));
        }
    }
    if c_l > c_r {
        return Err(VarregError::invalid(format!("c_l = {c_l} exceeds c_r = {c_r}")));
    }
    let (e_rho, e_delta) = exponent.powers();
    let base = (e_rho * rho.ln() + e_delta * delta.ln()).exp();
    Ok((c_l * base, c_r * base))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscrepancyOptions {
    pub alpha0: f64,
    pub factor: f64,
    pub max_expansions: usize,
    pub max_bisections: usize,
}

impl Default for DiscrepancyOptions {
    fn default() -> Self {
        DiscrepancyOptions { alpha0: 1.0, factor: 4.0, max_expansions: 200, max_bisections: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyStatus {
    /// The residual lies in [c_D δ, C_D δ].
    Window,
    /// ‖g^δ‖ < c_D δ: no α reaches the window and x̂ = 0 is returned with α = ∞.
    NoiseDominates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyOutcome {
    pub alpha: f64,
    pub solution: TikhonovSolution,
    pub status: DiscrepancyStatus,
    /// Number of minimizations performed.
    pub probes: usize,
}

/// Finds α with c_D δ ≤ ‖g^δ − A x̂_α‖ ≤ C_D δ.
///
/// The residual is nondecreasing in α, so the search brackets the window
/// geometrically from α₀ and then bisects in log α. The first α that lands
/// in the window is returned.
pub fn discrepancy_alpha(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    g_delta: &Coefficients,
    delta: f64,
    c_d: f64,
    big_c_d: f64,
    opts: &DiscrepancyOptions,
) -> Result<DiscrepancyOutcome> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(VarregError::invalid(format!("δ = {delta} must be positive")));
    }
    if !(c_d > 1.0 && big_c_d > c_d) || !big_c_d.is_finite() {
        return Err(VarregError::invalid(format!("need C_D > c_D > 1, got c_D = {c_d}, C_D = {big_c_d}")));
    }
    if !(opts.alpha0 > 0.0 && opts.alpha0.is_finite() && opts.factor > 1.0 && opts.factor.is_finite()) {
        return Err(VarregError::invalid("discrepancy search needs α₀ > 0 and factor > 1"));
    }
    let (lo_target, hi_target) = (c_d * delta, big_c_d * delta);
    if g_delta.norm() < lo_target {
        let zero = Coefficients::zeros(g_delta.index_set().clone());
        let solution = TikhonovSolution {
            x_hat: zero,
            alpha: f64::INFINITY,
            residual: g_delta.norm(),
            penalty_value: 0.0,
            kkt_gap: 0.0,
        };
        return Ok(DiscrepancyOutcome {
            alpha: f64::INFINITY,
            solution,
            status: DiscrepancyStatus::NoiseDominates,
            probes: 0,
        });
    }

    let mut probes = 0;
    let solve = |alpha: f64, probes: &mut usize| {
        *probes += 1;
        minimize(op, penalty, g_delta, alpha)
    };
    let done = |sol: TikhonovSolution, probes: usize| DiscrepancyOutcome {
        alpha: sol.alpha,
        solution: sol,
        status: DiscrepancyStatus::Window,
        probes,
    };

    let mut alpha = opts.alpha0;
    let first = solve(alpha, &mut probes)?;
    if first.residual >= lo_target && first.residual <= hi_target {
        return Ok(done(first, probes));
    }
    // bracket [lo, hi] with residual(lo) < c_D δ and residual(hi) > C_D δ
    let growing = first.residual < lo_target;
    let (mut lo, mut hi) = if growing { (alpha, f64::NAN) } else { (f64::NAN, alpha) };
    let mut expansions = 0;
    loop {
        if expansions >= opts.max_expansions {
            return Err(VarregError::BracketFail { expansions });
        }
        expansions += 1;
        alpha = if growing { alpha * opts.factor } else { alpha / opts.factor };
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(VarregError::BracketFail { expansions });
        }
        let sol = solve(alpha, &mut probes)?;
        if sol.residual >= lo_target && sol.residual <= hi_target {
            return Ok(done(sol, probes));
        }
        if growing && sol.residual > hi_target {
            hi = alpha;
            break;
        }
        if !growing && sol.residual < lo_target {
            lo = alpha;
            break;
        }
        if growing {
            lo = alpha;
        } else {
            hi = alpha;
        }
    }
    for _ in 0..opts.max_bisections {
        let mid = (lo * hi).sqrt();
        let sol = solve(mid, &mut probes)?;
        if sol.residual >= lo_target && sol.residual <= hi_target {
            return Ok(done(sol, probes));
        }
        if sol.residual < lo_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(VarregError::Divergence(format!(
        "discrepancy bisection did not reach the window within {} steps (bracket [{lo:e}, {hi:e}])",
        opts.max_bisections
    )))
}
