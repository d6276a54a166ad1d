//! Constant bookkeeping between the three equivalent Hölder statements
//!
//!   (i)   ‖Ax − Ax_α‖ ≤ c₁ α^ν          for all α > 0,
//!   (ii)  σ_x(α) ≤ c₂ α^{2ν−1}           for all α > 0,
//!   (iii) R(x) − R(z) ≤ c₃ ‖Ax − Az‖^{(2ν−1)/ν} for all z,
//!
//! with c₂ = c₁²/(4ν − 2), c₃ = 2 c₂^{1/(2ν)} and (iii) ⇒ (i) with c₁ = c₃^ν.

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::sequences::Coefficients;
use crate::tikhonov::PenaltySpec;

use super::{rho_nu_estimate, vsc_check};

/// (c₂, c₃, c₁ reconstructed from c₃).
pub fn equivalence_chain(nu: f64, c1: f64) -> Result<(f64, f64, f64)> {
    if !(nu > 0.5 && nu <= 1.0) {
        return Err(VarregError::invalid(format!("ν = {nu} must lie in (1/2, 1]")));
    }
    if !(c1 >= 0.0) || !c1.is_finite() {
        return Err(VarregError::invalid(format!("c₁ = {c1} must be nonnegative")));
    }
    let c2 = c1 * c1 / (4.0 * nu - 2.0);
    let c3 = 2.0 * c2.powf(1.0 / (2.0 * nu));
    Ok((c2, c3, c3.powf(nu)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub nu: f64,
    /// Grid maximum of α^{−ν}‖Ax − Ax_α‖.
    pub c1_grid: f64,
    /// The c₁ used for the chain: an upper bound valid for every α > 0.
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c1_back: f64,
    /// max over the grid of ‖Ax − Ax_α‖ − c₁α^ν.
    pub image_violation: f64,
    /// max over the grid of σ_x(α) − c₂α^{2ν−1}.
    pub defect_violation: f64,
    /// max over samples and path of R(x) − R(z) − c₃‖Ax − Az‖^{(2ν−1)/ν}.
    pub vsc_violation: f64,
}

impl EquivalenceReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.image_violation <= tol && self.defect_violation <= tol && self.vsc_violation <= tol
    }
}

/// Measures c₁ on `alpha_grid`, derives c₂ and c₃ and checks (i), (ii) on the
/// grid and (iii) on `samples` plus the path.
///
/// The c₁ fed into the chain is the certified bound from [`rho_nu_estimate`],
/// since (i) has to hold for all α and not only at the grid points.
pub fn verify_equivalence(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    nu: f64,
    alpha_grid: &[f64],
    samples: &[Coefficients],
) -> Result<EquivalenceReport> {
    equivalence_chain(nu, 0.0)?;
    let est = rho_nu_estimate(op, penalty, x, nu, alpha_grid)?;
    let c1 = est.certified_upper;
    let (c2, c3, c1_back) = equivalence_chain(nu, c1)?;
    let image_violation =
        est.samples.iter().map(|s| s.image_error - c1 * s.alpha.powf(nu)).fold(f64::NEG_INFINITY, f64::max);
    let defect_violation =
        est.samples.iter().map(|s| s.defect - c2 * s.alpha.powf(2.0 * nu - 1.0)).fold(f64::NEG_INFINITY, f64::max);
    let expo = (2.0 * nu - 1.0) / (2.0 * nu);
    // φ(t) = c₃ t^{(2ν−1)/(2ν)} evaluated at t = ‖Ax − Az‖²
    let phi = move |t: f64| c3 * t.powf(expo);
    let rep = vsc_check(op, penalty, x, &phi, samples, alpha_grid)?;
    Ok(EquivalenceReport {
        nu,
        c1_grid: est.rho_hat,
        c1,
        c2,
        c3,
        c1_back,
        image_violation,
        defect_violation,
        vsc_violation: rep.max_violation,
    })
}
