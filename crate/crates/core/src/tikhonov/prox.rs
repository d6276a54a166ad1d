//! Scalar and level-wise proximal kernels.
//!
//! The scalar problem min_x (1/(2α))(g − a x)² + (w^p/p)|x|^p is solved in the
//! normalized variable x = sign(g)(|g|/a)ξ. Stationarity becomes
//!
//!   ψ(ξ) = ξ + κ ξ^{p−1} − 1 = 0,   κ = α w^p |g|^{p−2} a^{−p},
//!
//! which has a unique root in (0, 1]. κ is carried as ln κ so that extreme
//! parameter ratios neither overflow nor underflow before the root is known.

use crate::error::{Result, VarregError};
use crate::sequences::l2_norm;

const MAX_ITER: usize = 200;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(VarregError::invalid(format!("{name} = {v} must be positive and finite")));
    }
    Ok(())
}

pub(crate) fn check_exponent(name: &str, p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(VarregError::invalid(format!("exponent {name} = {p} must lie in (1, ∞)")));
    }
    Ok(())
}

/// Unique minimizer of (1/(2α))(g − a x)² + (w^p/p)|x|^p.
pub fn prox_power_scalar(g: f64, a: f64, w: f64, p: f64, alpha: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_positive("a", a)?;
    check_positive("w", w)?;
    check_positive("alpha", alpha)?;
    if !g.is_finite() {
        return Err(VarregError::invalid(format!("data value {g} is not finite")));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    let scale = g.abs() / a;
    let xi = if p == 2.0 {
        1.0 / (1.0 + alpha * w * w / (a * a))
    } else {
        let ln_kappa = alpha.ln() + p * w.ln() + (p - 2.0) * g.abs().ln() - p * a.ln();
        solve_normalized(ln_kappa, p)
    };
    Ok(g.signum() * scale * xi)
}

/// Root of ξ + κ ξ^{p−1} = 1 on (0, 1] by bracketed Newton.
fn solve_normalized(ln_kappa: f64, p: f64) -> f64 {
    let q = p - 1.0;
    // ψ(lo) <= 0 <= ψ(hi)
    let mut lo = 0.5f64.min((-(std::f64::consts::LN_2 + ln_kappa) / q).exp());
    let mut hi = 1.0f64.min((-ln_kappa / q).exp());
    if hi == 0.0 {
        return 0.0;
    }
    if lo == 0.0 {
        lo = f64::MIN_POSITIVE;
    }
    // κ ξ^{p−1} evaluated in log space
    let power_term = |xi: f64| (ln_kappa + q * xi.ln()).exp();
    let mut xi = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_ITER {
        let t = power_term(xi);
        let psi = xi + t - 1.0;
        if psi == 0.0 {
            return xi;
        }
        if psi < 0.0 {
            lo = xi;
        } else {
            hi = xi;
        }
        let dpsi = 1.0 + q * t / xi;
        let newton = xi - psi / dpsi;
        let next = if newton > lo && newton < hi {
            newton
        } else if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - xi).abs();
        xi = next;
        if step <= 1e-15 * xi || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    xi
}

/// Minimizer of (1/(2α))‖g − a x‖² + (1/q)‖x‖^q on one level (a constant weight).
///
/// The minimizer is collinear with g, so the level reduces to the scalar
/// kernel applied to ‖g‖ with w = 1.
pub fn prox_level_2q(g_level: &[f64], a_level: f64, q: f64, alpha: f64) -> Result<Vec<f64>> {
    let norm = l2_norm(g_level);
    if norm == 0.0 {
        check_exponent("q", q)?;
        check_positive("a", a_level)?;
        check_positive("alpha", alpha)?;
        return Ok(vec![0.0; g_level.len()]);
    }
    let radius = prox_power_scalar(norm, a_level, 1.0, q, alpha)?;
    let factor = radius / norm;
    Ok(g_level.iter().map(|v| v * factor).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stationarity(x: f64, g: f64, a: f64, w: f64, p: f64, alpha: f64) -> f64 {
        let r = (a / alpha) * (a * x - g) + w.powf(p) * x.signum() * x.abs().powf(p - 1.0);
        r.abs() / (1.0f64).max(g.abs() * a / alpha)
    }

    #[test]
    fn closed_forms() {
        assert_eq!(prox_power_scalar(0.0, 1.0, 1.0, 3.0, 1.0).unwrap(), 0.0);
        assert!((prox_power_scalar(1.0, 1.0, 1.0, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        // x² + x − 2 = 0
        assert!((prox_power_scalar(2.0, 1.0, 1.0, 3.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((prox_power_scalar(-2.0, 1.0, 1.0, 3.0, 1.0).unwrap() + 1.0).abs() < 1e-14);
        // x³ + x − 2 = 0 on a one-coordinate level
        let x = prox_level_2q(&[2.0], 1.0, 4.0, 1.0).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_level_is_componentwise() {
        let g = [0.3, -1.2, 2.0];
        let (a, alpha) = (0.25, 0.7);
        let x = prox_level_2q(&g, a, 2.0, alpha).unwrap();
        for (xi, gi) in x.iter().zip(g) {
            assert!((xi - a * gi / (a * a + alpha)).abs() < 1e-14);
        }
        assert_eq!(prox_level_2q(&[0.0, 0.0], 1.0, 3.0, 1.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(prox_power_scalar(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(prox_power_scalar(1.0, 0.0, 1.0, 2.0, 1.0).is_err());
        assert!(prox_power_scalar(1.0, 1.0, -1.0, 2.0, 1.0).is_err());
        assert!(prox_power_scalar(1.0, 1.0, 1.0, 2.0, 0.0).is_err());
        assert!(prox_power_scalar(f64::NAN, 1.0, 1.0, 2.0, 1.0).is_err());
        assert!(prox_level_2q(&[0.0], 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn stationarity_on_extreme_parameters() {
        for &p in &[1.01, 1.2, 1.5, 2.5, 3.0, 4.0, 10.0] {
            for &g in &[1e-12, 1e-6, 0.3, 1.0, 7.0, 1e6] {
                for &a in &[1e-4, 0.1, 1.0, 30.0] {
                    for &alpha in &[1e-10, 1e-4, 1.0, 1e4] {
                        let w = 1.7;
                        let x = prox_power_scalar(g, a, w, p, alpha).unwrap();
                        assert!(x >= 0.0 && x <= g / a * (1.0 + 1e-15), "p={p} g={g} a={a} α={alpha}");
                        let r = stationarity(x, g, a, w, p, alpha);
                        if x > 1e-280 {
                            assert!(r <= 1e-12, "p={p} g={g} a={a} α={alpha} x={x} r={r}");
                        }
                    }
                }
            }
        }
    }
}
