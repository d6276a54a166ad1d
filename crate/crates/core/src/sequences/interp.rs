//! Upper bounds for the real interpolation norm of (ℓ²_aw, ℓ^{t_S}_sw)_{θ,∞}.
//!
//! K(x,t) = inf_z ‖x−z‖_A + t‖z‖_S is bounded above by restricting z to a
//! finite family. Every family member contributes a line A_z + t·S_z in t, so
//! the restricted K is the lower envelope of those lines. On one envelope
//! piece t^{−θ}(A + tS) decreases and then increases, so its sup over an
//! interval sits at an endpoint. The sup over the grid range is therefore
//! attained at the range ends or at envelope breakpoints inside it, which
//! makes the bound exact for the family rather than a grid sample.

use crate::error::{Result, VarregError};
use crate::grid::check_ascending;

use super::{Coefficients, WeightVector};

const MULTIPLE_STEPS: usize = 32;

#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
}

impl Line {
    fn at(&self, t: f64) -> f64 {
        self.intercept + t * self.slope
    }
}

/// Certified upper bound on ‖x‖_{(ℓ²_aw, ℓ^{t_S}_sw)_{θ,∞}} over t ∈ [min t_grid, max t_grid].
///
/// The z-family is: scalar multiples λx for λ = i/32, and hard thresholds of x
/// keeping the top-k coordinates under three orderings (|x_i|, aw_i|x_i| and
/// the ratio aw_i/sw_i).
pub fn interp_norm_upper(
    x: &Coefficients,
    theta: f64,
    aw: &WeightVector,
    sw: &WeightVector,
    t_s: f64,
    t_grid: &[f64],
) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(VarregError::invalid(format!("θ = {theta} must lie in (0,1)")));
    }
    if !(t_s > 0.0) || !t_s.is_finite() {
        return Err(VarregError::invalid(format!("t_S = {t_s} must be positive")));
    }
    check_ascending(t_grid, "t grid")?;
    aw.check_len(x.len())?;
    sw.check_len(x.len())?;

    let nz: Vec<usize> = (0..x.len()).filter(|&i| x.values()[i] != 0.0).collect();
    if nz.is_empty() {
        return Ok(0.0);
    }
    let xv = x.values();
    let (awv, swv) = (aw.values(), sw.values());
    let amag: Vec<f64> = nz.iter().map(|&i| awv[i] * xv[i].abs()).collect();
    let smag: Vec<f64> = nz.iter().map(|&i| swv[i] * xv[i].abs()).collect();
    let amax = amag.iter().cloned().fold(0.0, f64::max);
    let smax = smag.iter().cloned().fold(0.0, f64::max);
    let a2: Vec<f64> = amag.iter().map(|v| (v / amax).powi(2)).collect();
    let sp: Vec<f64> = smag.iter().map(|v| (v / smax).powf(t_s)).collect();

    let a_full = amax * a2.iter().sum::<f64>().sqrt();
    let s_full = smax * sp.iter().sum::<f64>().powf(1.0 / t_s);

    let mut lines = Vec::with_capacity(MULTIPLE_STEPS + 1 + 3 * nz.len());
    for i in 0..=MULTIPLE_STEPS {
        let lambda = i as f64 / MULTIPLE_STEPS as f64;
        lines.push(Line { slope: lambda * s_full, intercept: (1.0 - lambda) * a_full });
    }

    let orderings: [Box<dyn Fn(usize) -> f64>; 3] =
        [Box::new(|m| xv[nz[m]].abs()), Box::new(|m| amag[m]), Box::new(|m| awv[nz[m]] / swv[nz[m]])];
    let n = nz.len();
    for key in orderings.iter() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| key(q).total_cmp(&key(p)).then(amag[q].total_cmp(&amag[p])));
        // suffix sums of the dropped A-mass, prefix sums of the kept S-mass
        let mut suffix = vec![0.0; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] + a2[order[k]];
        }
        let mut kept = 0.0;
        for k in 1..n {
            kept += sp[order[k - 1]];
            lines.push(Line { slope: smax * kept.powf(1.0 / t_s), intercept: amax * suffix[k].sqrt() });
        }
    }

    let hull = lower_envelope(lines);
    let (t_lo, t_hi) = (t_grid[0], *t_grid.last().expect("checked nonempty"));

    let mut best = 0.0f64;
    let mut eval = |t: f64, value: f64| best = best.max(t.powf(-theta) * value);
    let h = |t: f64| hull.iter().map(|l| l.at(t)).fold(f64::INFINITY, f64::min);
    eval(t_lo, h(t_lo));
    eval(t_hi, h(t_hi));
    for w in hull.windows(2) {
        let t = (w[1].intercept - w[0].intercept) / (w[0].slope - w[1].slope);
        if t > t_lo && t < t_hi {
            eval(t, w[0].at(t).min(w[1].at(t)));
        }
    }
    Ok(best)
}

/// Lines of the pointwise minimum over t > 0, ordered by decreasing slope.
fn lower_envelope(mut lines: Vec<Line>) -> Vec<Line> {
    lines.sort_by(|a, b| b.slope.total_cmp(&a.slope).then(a.intercept.total_cmp(&b.intercept)));
    let mut hull: Vec<Line> = Vec::new();
    for line in lines {
        if let Some(top) = hull.last() {
            if top.slope == line.slope {
                continue;
            }
        }
        // a steeper line with no smaller intercept never wins for t > 0
        while hull.last().is_some_and(|top| top.intercept >= line.intercept) {
            hull.pop();
        }
        while hull.len() >= 2 {
            let (l1, l2) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let x12 = (l2.intercept - l1.intercept) / (l1.slope - l2.slope);
            let x13 = (line.intercept - l1.intercept) / (l1.slope - line.slope);
            if x13 <= x12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::default_t_grid;

    #[test]
    fn zero_is_zero() {
        let x = Coefficients::flat(vec![0.0, 0.0]).unwrap();
        let w = WeightVector::ones(2).unwrap();
        assert_eq!(interp_norm_upper(&x, 0.5, &w, &w, 1.0, &default_t_grid()).unwrap(), 0.0);
    }

    #[test]
    fn one_coordinate_closed_form() {
        let grid = default_t_grid();
        for &(a, s, theta, v, ts) in
            &[(1.0, 1.0, 0.5, 1.0, 2.0), (0.25, 3.0, 0.3, -2.5, 0.7), (8.0, 0.5, 0.9, 0.01, 1.5)]
        {
            let x = Coefficients::flat(vec![v]).unwrap();
            let aw = WeightVector::new(vec![a]).unwrap();
            let sw = WeightVector::new(vec![s]).unwrap();
            let got = interp_norm_upper(&x, theta, &aw, &sw, ts, &grid).unwrap();
            let expect = a.powf(1.0 - theta) * s.powf(theta) * v.abs();
            assert!((got - expect).abs() <= 1e-12 * expect, "{got} vs {expect}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let x = Coefficients::flat(vec![1.0]).unwrap();
        let w = WeightVector::ones(1).unwrap();
        assert!(interp_norm_upper(&x, 0.0, &w, &w, 1.0, &default_t_grid()).is_err());
        assert!(interp_norm_upper(&x, 1.0, &w, &w, 1.0, &default_t_grid()).is_err());
        assert!(interp_norm_upper(&x, 0.5, &w, &w, 1.0, &[]).is_err());
    }

    #[test]
    fn envelope_drops_dominated_lines() {
        let lines = vec![
            Line { slope: 2.0, intercept: 0.0 },
            Line { slope: 1.0, intercept: 1.0 },
            Line { slope: 1.5, intercept: 5.0 },
            Line { slope: 0.0, intercept: 3.0 },
        ];
        let hull = lower_envelope(lines);
        let slopes: Vec<f64> = hull.iter().map(|l| l.slope).collect();
        assert_eq!(slopes, vec![2.0, 1.0, 0.0]);
    }
}
