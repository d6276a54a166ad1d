//! Geometric grids used for α sweeps, t sweeps and noise levels.

use crate::error::{Result, VarregError};

/// `count` points geometrically spaced on `[lo, hi]`, ascending, endpoints exact.
pub fn geometric(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(VarregError::invalid(format!("geometric grid needs 0 < lo <= hi < inf, got [{lo}, {hi}]")));
    }
    match count {
        0 => Err(VarregError::Empty("geometric grid with zero points".into())),
        1 => Ok(vec![lo]),
        _ => {
            let (l0, l1) = (lo.ln(), hi.ln());
            let step = (l1 - l0) / (count - 1) as f64;
            let mut out: Vec<f64> = (0..count).map(|i| (l0 + step * i as f64).exp()).collect();
            out[0] = lo;
            out[count - 1] = hi;
            Ok(out)
        }
    }
}

/// Default α grid: 121 points on `[1e-6, 1e2]`.
pub fn default_alpha_grid() -> Vec<f64> {
    geometric(1e-6, 1e2, 121).expect("static grid")
}

/// Default t grid for interpolation-norm bounds: 161 points on `[1e-8, 1e8]`.
pub fn default_t_grid() -> Vec<f64> {
    geometric(1e-8, 1e8, 161).expect("static grid")
}

/// Checks that a grid is strictly increasing and positive.
pub fn check_ascending(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(VarregError::Empty(what.to_string()));
    }
    if grid.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(VarregError::invalid(format!("{what}: entries must be positive and finite")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VarregError::invalid(format!("{what}: must be strictly increasing")));
    }
    Ok(())
}
