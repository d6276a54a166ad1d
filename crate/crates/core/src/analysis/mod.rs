//! Rate functionals of the exact-data Tikhonov path α ↦ x_α = argmin T_α(·, Ax).

mod defect;
mod equivalence;
mod modulus;
mod rates;
mod transforms;
mod vsc;

pub use defect::{defect_derivative, defect_integral_check, defect_sigma, DEFAULT_QUAD_POINTS};
pub use equivalence::{equivalence_chain, verify_equivalence, EquivalenceReport};
pub use modulus::{modulus_estimate, ModulusEstimate, NormBall};
pub use rates::{
    gamma_estimate, rho_nu_estimate, rho_one, rho_one_closed_form, source_element_limit, GammaBounds, RhoEstimate,
    RhoOneSetting, SourceCertificate,
};
pub use transforms::{
    f_inverse, f_inverse_at, f_transform, f_transform_at, IndexFunction, Monotonicity, SampledIndexFunction, Shape,
    GOLDEN_ITERS,
};
pub use vsc::{sample_perturbations, vsc_check, VscReport};

use serde::Serialize;

use crate::error::Result;
use crate::forward::DiagonalOperator;
use crate::sequences::Coefficients;
use crate::tikhonov::{minimize, PenaltySpec, TikhonovSolution};

/// One point of the exact-data path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSample {
    pub alpha: f64,
    /// ‖Ax − Ax_α‖.
    pub image_error: f64,
    /// σ_x(α) = T_α(x, Ax) − T_α(x_α, Ax).
    pub defect: f64,
    /// R(x) − R(x_α).
    pub penalty_defect: f64,
}

/// Solves the exact-data problem at α and measures the path quantities.
pub(crate) fn path_point(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    ax: &Coefficients,
    alpha: f64,
) -> Result<(RateSample, TikhonovSolution)> {
    let sol = minimize(op, penalty, ax, alpha)?;
    let image_error = op.image_distance(x, &sol.x_hat)?;
    let penalty_defect = penalty.difference(x, &sol.x_hat)?;
    let defect = penalty_defect - image_error * image_error / (2.0 * alpha);
    Ok((RateSample { alpha, image_error, defect, penalty_defect }, sol))
}
