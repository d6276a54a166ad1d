//! ρ_ν(x) = sup_α α^{−ν}‖Ax − Ax_α‖, ρ₁ in closed form, the source element
//! ω = lim (Ax − Ax_α)/α and best-approximation bounds γ_x.

use rayon::prelude::*;

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::grid::check_ascending;
use crate::sequences::{besov_norm, l2_norm, weighted_norm, BesovParams, Coefficients, WeightVector};
use crate::tikhonov::PenaltySpec;

use super::{path_point, RateSample};

#[derive(Debug, Clone, PartialEq)]
pub struct RhoEstimate {
    /// max over the grid of α^{−ν}‖Ax − Ax_α‖, a lower bound on ρ_ν(x).
    pub rho_hat: f64,
    pub argmax_alpha: f64,
    /// An upper bound on ρ_ν(x) over all α > 0 (see [`rho_nu_estimate`]).
    pub certified_upper: f64,
    pub samples: Vec<RateSample>,
}

/// Grid estimate of ρ_ν(x) for ν ∈ [0, 1].
///
/// Besides the grid maximum this returns a certified upper bound. Between
/// neighbours α_i < α_{i+1} the image error e is nondecreasing and e(α)/α is
/// nonincreasing, so α^{−ν}e(α) is at most the smaller of α_i^{−ν}e(α_{i+1})
/// and α_{i+1}^{1−ν}e(α_i)/α_i. Below the grid e(α)/α ≤ ρ₁(x), hence
/// α^{−ν}e(α) ≤ α_min^{1−ν}ρ₁(x); above it e(α) ≤ ‖Ax‖.
pub fn rho_nu_estimate(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    nu: f64,
    alpha_grid: &[f64],
) -> Result<RhoEstimate> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(VarregError::invalid(format!("ν = {nu} must lie in [0, 1]")));
    }
    check_ascending(alpha_grid, "α grid")?;
    let ax = op.apply_forward(x)?;
    let samples: Vec<RateSample> = alpha_grid
        .par_iter()
        .map(|&alpha| path_point(op, penalty, x, &ax, alpha).map(|(s, _)| s))
        .collect::<Result<_>>()?;
    let scaled = |s: &RateSample| s.alpha.powf(-nu) * s.image_error;
    let (argmax, rho_hat) =
        samples
            .iter()
            .map(scaled)
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });

    let mut upper = rho_hat;
    for w in samples.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let by_error = lo.alpha.powf(-nu) * hi.image_error;
        let by_ratio = hi.alpha.powf(1.0 - nu) * lo.image_error / lo.alpha;
        upper = upper.max(by_error.min(by_ratio));
    }
    let (a_min, a_max) = (alpha_grid[0], *alpha_grid.last().expect("nonempty"));
    upper = upper.max(a_min.powf(1.0 - nu) * rho_one(op, penalty, x)?);
    upper = upper.max(a_max.powf(-nu) * ax.norm());
    Ok(RhoEstimate { rho_hat, argmax_alpha: samples[argmax].alpha, certified_upper: upper, samples })
}

/// ρ₁(x) = ‖ω‖ for the source element with A*ω = ∇R(x), i.e. ω = ∇R(x)/ā.
pub fn rho_one(op: &DiagonalOperator, penalty: &PenaltySpec, x: &Coefficients) -> Result<f64> {
    op.check(x)?;
    let grad = penalty.gradient(x)?;
    let omega: Vec<f64> = grad.values().iter().zip(op.weights().values()).map(|(d, a)| d / a).collect();
    Ok(l2_norm(&omega))
}

/// Settings with a closed-form ρ₁.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoOneSetting {
    /// R = (1/p)‖x‖_p^p with A the identity.
    Plain { p: f64 },
    /// R = (1/p)Σ r̄^p|x|^p with operator weights ā.
    Weighted { a: WeightVector, r: WeightVector, p: f64 },
    /// b^0_{p,p} penalty, ā = 2^{−ja}.
    Besov0pp { a: f64, p: f64 },
    /// b^0_{2,q} penalty, ā = 2^{−ja}.
    Besov02q { a: f64, q: f64 },
}

/// ρ₁(x) from the closed-form characterizations of K₁:
/// ‖x‖_{2p−2}^{p−1}, ‖x‖_{ℓ^{2p−2}_{s̄}}^{p−1} with s̄ = ā^{−1/(p−1)} r̄^{p/(p−1)},
/// ‖x‖_{b^{a/(p−1)}_{2p−2,2p−2}}^{p−1} and ‖x‖_{b^{a/(q−1)}_{2,2q−2}}^{q−1}.
pub fn rho_one_closed_form(x: &Coefficients, setting: &RhoOneSetting) -> Result<f64> {
    let check = |name: &str, v: f64| {
        if !(v > 1.0) || !v.is_finite() {
            Err(VarregError::invalid(format!("{name} = {v} must lie in (1, ∞)")))
        } else {
            Ok(())
        }
    };
    match setting {
        RhoOneSetting::Plain { p } => {
            check("p", *p)?;
            let w = WeightVector::ones(x.len())?;
            Ok(weighted_norm(x, &w, 2.0 * p - 2.0)?.powf(p - 1.0))
        }
        RhoOneSetting::Weighted { a, r, p } => {
            check("p", *p)?;
            a.check_len(x.len())?;
            r.check_len(x.len())?;
            let s_bar: Vec<f64> = a
                .values()
                .iter()
                .zip(r.values())
                .map(|(a, r)| a.powf(-1.0 / (p - 1.0)) * r.powf(p / (p - 1.0)))
                .collect();
            Ok(weighted_norm(x, &WeightVector::new(s_bar)?, 2.0 * p - 2.0)?.powf(p - 1.0))
        }
        RhoOneSetting::Besov0pp { a, p } => {
            check("p", *p)?;
            let t = 2.0 * p - 2.0;
            Ok(besov_norm(x, &BesovParams::finite(a / (p - 1.0), t, t)?)?.powf(p - 1.0))
        }
        RhoOneSetting::Besov02q { a, q } => {
            check("q", *q)?;
            Ok(besov_norm(x, &BesovParams::finite(a / (q - 1.0), 2.0, 2.0 * q - 2.0)?)?.powf(q - 1.0))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceCertificate {
    /// (Ax − Ax_α)/α at the last α of the sequence.
    pub omega: Coefficients,
    pub omega_norm: f64,
    /// ‖∇R(x)/ā‖, the value ‖ω_α‖ increases to.
    pub rho_one: f64,
    /// (α, ‖ω_α − ω‖) along the sequence.
    pub limit_residuals: Vec<(f64, f64)>,
    /// (α, ‖ω_α‖) along the sequence.
    pub norms: Vec<(f64, f64)>,
    /// max_i |ā_i ω_i − ∂_i R(x)| / max(1, max_i |∂_i R(x)|) at the last α.
    pub subgradient_gap: f64,
}

/// Follows ω_α = (Ax − Ax_α)/α along a decreasing α sequence.
///
/// Fails with `Divergence` when ‖ω_α‖ exceeds ten times ‖∇R(x)/ā‖, which
/// means the sequence is not resolving the limit.
pub fn source_element_limit(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    alpha_seq: &[f64],
) -> Result<SourceCertificate> {
    if alpha_seq.is_empty() {
        return Err(VarregError::Empty("α sequence".into()));
    }
    if alpha_seq.iter().any(|a| !(*a > 0.0) || !a.is_finite()) || alpha_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(VarregError::invalid("α sequence must be positive and strictly decreasing"));
    }
    let ax = op.apply_forward(x)?;
    let rho1 = rho_one(op, penalty, x)?;
    let a = op.weights().values();
    let omegas: Vec<Vec<f64>> = alpha_seq
        .par_iter()
        .map(|&alpha| {
            let (_, sol) = path_point(op, penalty, x, &ax, alpha)?;
            Ok(x.values().iter().zip(sol.x_hat.values()).zip(a).map(|((u, v), a)| a * (u - v) / alpha).collect())
        })
        .collect::<Result<_>>()?;
    let last = omegas.last().expect("nonempty").clone();
    let mut norms = Vec::with_capacity(omegas.len());
    let mut limit_residuals = Vec::with_capacity(omegas.len());
    for (alpha, w) in alpha_seq.iter().zip(&omegas) {
        let n = l2_norm(w);
        if n > 10.0 * rho1 * (1.0 + 1e-12) {
            return Err(VarregError::Divergence(format!(
                "‖ω_α‖ = {n:e} at α = {alpha:e} exceeds 10·ρ₁ = {:e}",
                10.0 * rho1
            )));
        }
        norms.push((*alpha, n));
        let diff: Vec<f64> = w.iter().zip(&last).map(|(u, v)| u - v).collect();
        limit_residuals.push((*alpha, l2_norm(&diff)));
    }
    let grad = penalty.gradient(x)?;
    let gmax = grad.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap =
        grad.values().iter().zip(&last).zip(a).map(|((d, w), a)| (a * w - d).abs()).fold(0.0, f64::max) / gmax.max(1.0);
    let omega = x.with_values(last)?;
    Ok(SourceCertificate {
        omega_norm: omega.norm(),
        omega,
        rho_one: rho1,
        limit_residuals,
        norms,
        subgradient_gap: gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaBounds {
    /// ≥ γ_x(r): the image error of a Tikhonov path point with ρ₁(x_α) ≤ r,
    /// or of a better grid point for tiny problems.
    pub upper: f64,
    /// ≤ γ_x(r) from e(α) ≤ 4γ_x(e(α)/(4α)).
    pub lower: f64,
}

/// e(α)/α along the path paired with e(α).
fn level_point(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    ax: &Coefficients,
    alpha: f64,
) -> Result<(f64, f64)> {
    let (s, _) = path_point(op, penalty, x, ax, alpha)?;
    Ok((s.image_error / alpha, s.image_error))
}

/// Brackets the α where e(α)/α crosses `target` (it decreases from ρ₁ to 0).
/// Returns (e at the largest α with ratio > target, e at the smallest α with ratio ≤ target).
fn crossing(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    ax: &Coefficients,
    target: f64,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let (mut f_lo, mut e_lo) = level_point(op, penalty, x, ax, lo)?;
    let (mut f_hi, mut e_hi) = (f_lo, e_lo);
    let mut steps = 0;
    while f_lo <= target {
        lo /= 4.0;
        (f_lo, e_lo) = level_point(op, penalty, x, ax, lo)?;
        steps += 1;
        if steps > 400 {
            return Err(VarregError::BracketFail { expansions: steps });
        }
    }
    while f_hi > target {
        hi *= 4.0;
        (f_hi, e_hi) = level_point(op, penalty, x, ax, hi)?;
        steps += 1;
        if steps > 400 {
            return Err(VarregError::BracketFail { expansions: steps });
        }
    }
    for _ in 0..80 {
        if hi / lo <= 1.0 + 1e-12 {
            break;
        }
        let mid = (lo * hi).sqrt();
        let (f, e) = level_point(op, penalty, x, ax, mid)?;
        if f > target {
            (lo, e_lo) = (mid, e);
        } else {
            (hi, e_hi) = (mid, e);
        }
    }
    Ok((e_lo, e_hi))
}

/// Bounds on γ_x(r) = inf{‖Ax − Az‖ : ρ₁(z) ≤ r}.
///
/// First-order optimality gives ρ₁(x_α) = e(α)/α, so x_α at the crossing
/// e(α)/α = r is feasible and its image error bounds γ_x(r) from above. For
/// α with e(α)/α ≥ 4r, e(α) ≤ 4γ_x(e(α)/(4α)) ≤ 4γ_x(r) bounds it from below.
/// Problems with at most three coordinates also scan a grid of feasible
/// shrinkages z_i = λ_i x_i, which can only lower the upper bound.
pub fn gamma_estimate(op: &DiagonalOperator, penalty: &PenaltySpec, x: &Coefficients, r: f64) -> Result<GammaBounds> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(VarregError::invalid(format!("radius r = {r} must be nonnegative")));
    }
    let ax = op.apply_forward(x)?;
    let rho1 = rho_one(op, penalty, x)?;
    if r >= rho1 {
        return Ok(GammaBounds { upper: 0.0, lower: 0.0 });
    }
    if r == 0.0 {
        // only z = 0 has ρ₁(z) = 0
        return Ok(GammaBounds { upper: ax.norm(), lower: ax.norm() });
    }
    let (_, mut upper) = crossing(op, penalty, x, &ax, r)?;
    let lower = if 4.0 * r < rho1 { crossing(op, penalty, x, &ax, 4.0 * r)?.0 / 4.0 } else { 0.0 };
    if x.len() <= 3 {
        upper = upper.min(grid_upper(op, penalty, x, r)?);
    }
    Ok(GammaBounds { upper, lower })
}

fn grid_upper(op: &DiagonalOperator, penalty: &PenaltySpec, x: &Coefficients, r: f64) -> Result<f64> {
    const STEPS: usize = 40;
    let n = x.len();
    let total = (STEPS + 1).pow(n as u32);
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut c = code;
        let vals: Vec<f64> = x
            .values()
            .iter()
            .map(|v| {
                let lambda = (c % (STEPS + 1)) as f64 / STEPS as f64;
                c /= STEPS + 1;
                lambda * v
            })
            .collect();
        let z = x.with_values(vals)?;
        if rho_one(op, penalty, &z)? <= r {
            best = best.min(op.image_distance(x, &z)?);
        }
    }
    Ok(best)
}
