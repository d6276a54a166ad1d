use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::grid::geometric;
use crate::sequences::Coefficients;
use crate::tikhonov::PenaltySpec;

use super::{path_point, RateSample};

pub const DEFAULT_QUAD_POINTS: usize = 400;

/// σ_x(α) together with the image error and R(x) − R(x_α).
pub fn defect_sigma(op: &DiagonalOperator, penalty: &PenaltySpec, x: &Coefficients, alpha: f64) -> Result<RateSample> {
    let ax = op.apply_forward(x)?;
    Ok(path_point(op, penalty, x, &ax, alpha)?.0)
}

/// σ'_x(α) = ‖Ax − Ax_α‖² / (2α²).
pub fn defect_derivative(sample: &RateSample) -> f64 {
    sample.image_error * sample.image_error / (2.0 * sample.alpha * sample.alpha)
}

/// (σ_x(α) directly, σ_x(α) from ∫₀^α ‖Ax − Ax_β‖²/(2β²) dβ).
///
/// The integral is a trapezoid rule in u = ln β on [1e-8 α, α] applied to
/// e(β)²/(2β), with an Euler–Maclaurin end correction from one-sided
/// differences. Below the cutoff ε the integrand is within O(ε) of its limit
/// ρ₁²/2, so the head contributes ε·e(ε)²/(2ε²).
pub fn defect_integral_check(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    x: &Coefficients,
    alpha: f64,
    quad_points: usize,
) -> Result<(f64, f64)> {
    if quad_points < 3 {
        return Err(VarregError::Empty("quadrature needs at least 3 points".into()));
    }
    let ax = op.apply_forward(x)?;
    let direct = path_point(op, penalty, x, &ax, alpha)?.0.defect;
    let eps = 1e-8 * alpha;
    let betas = geometric(eps, alpha, quad_points)?;
    let f: Vec<f64> = betas
        .iter()
        .map(|&b| path_point(op, penalty, x, &ax, b).map(|(s, _)| s.image_error * s.image_error / (2.0 * b)))
        .collect::<Result<_>>()?;
    let h = (alpha / eps).ln() / (quad_points - 1) as f64;
    let n = f.len();
    let mut trap = 0.5 * (f[0] + f[n - 1]);
    trap += f[1..n - 1].iter().sum::<f64>();
    trap *= h;
    let d_start = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    let d_end = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    let corrected = trap - h * h / 12.0 * (d_end - d_start);
    Ok((direct, corrected + f[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> (DiagonalOperator, PenaltySpec, Coefficients) {
        let op = DiagonalOperator::explicit(vec![1.0]).unwrap();
        let x = Coefficients::new(op.index_set().clone(), vec![x]).unwrap();
        (op, PenaltySpec::lp(2.0, 1).unwrap(), x)
    }

    #[test]
    fn quadratic_defect_closed_form() {
        let (op, r, x) = scalar(1.0);
        for alpha in [0.01, 0.5, 1.0, 7.0] {
            let s = defect_sigma(&op, &r, &x, alpha).unwrap();
            let exact = alpha / (2.0 * (1.0 + alpha));
            assert!((s.defect - exact).abs() < 1e-15, "α={alpha}");
            assert!((defect_derivative(&s) - 1.0 / (2.0 * (1.0 + alpha) * (1.0 + alpha))).abs() < 1e-15);
        }
    }

    #[test]
    fn integral_closed_form() {
        let (op, r, x) = scalar(1.0);
        let (direct, integral) = defect_integral_check(&op, &r, &x, 1.0, DEFAULT_QUAD_POINTS).unwrap();
        assert!((direct - 0.25).abs() < 1e-15);
        assert!((integral - 0.25).abs() < 1e-7, "{integral}");
    }

    #[test]
    fn zero_truth() {
        let (op, r, x) = scalar(0.0);
        assert_eq!(defect_integral_check(&op, &r, &x, 1.0, 50).unwrap(), (0.0, 0.0));
    }
}
