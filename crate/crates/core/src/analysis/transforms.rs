//! Index functions and the conjugate-type transforms between defect
//! functions σ and VSC functions φ:
//!
//!   F(σ)(t)   = inf_{α>0} σ(α) + t/(2α)
//!   F⁻¹(φ)(α) = sup_{t≥0} φ(t) − t/(2α)

use crate::error::{Result, VarregError};
use crate::grid::check_ascending;

/// Golden-section refinement steps between neighbouring samples.
pub const GOLDEN_ITERS: usize = 20;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// A function on (0, ∞).
pub trait IndexFunction: Sync {
    fn eval(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> IndexFunction for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Unconstrained,
    /// α ↦ σ(1/α) is convex.
    ConvexInInverse,
    Concave,
}

/// A monotone function given by samples (t_i, v_i).
///
/// Between samples it interpolates linearly in log-log coordinates when both
/// neighbours are positive, which reproduces power laws exactly; otherwise it
/// interpolates linearly in t (or in 1/t for `ConvexInInverse`). Outside the
/// sample range it extends the outermost log-log segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledIndexFunction {
    args: Vec<f64>,
    values: Vec<f64>,
    monotone: Monotonicity,
    shape: Shape,
}

impl SampledIndexFunction {
    pub fn new(args: Vec<f64>, values: Vec<f64>, monotone: Monotonicity, shape: Shape) -> Result<Self> {
        check_ascending(&args, "index function arguments")?;
        if values.len() != args.len() {
            return Err(VarregError::LengthMismatch { expected: args.len(), found: values.len() });
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(VarregError::invalid("index function values must be finite and nonnegative"));
        }
        let slack = 1e-10 * values.iter().cloned().fold(1.0, f64::max);
        for (i, w) in values.windows(2).enumerate() {
            let ok = match monotone {
                Monotonicity::Nondecreasing => w[1] >= w[0] - slack,
                Monotonicity::Nonincreasing => w[1] <= w[0] + slack,
            };
            if !ok {
                return Err(VarregError::invalid(format!("samples {i},{} violate the {monotone:?} tag", i + 1)));
            }
        }
        for i in 1..args.len().saturating_sub(1) {
            let ok = match shape {
                Shape::Unconstrained => true,
                Shape::Concave => {
                    values[i] >= chord(args[i - 1], args[i + 1], values[i - 1], values[i + 1], args[i]) - slack
                }
                Shape::ConvexInInverse => {
                    let (s0, s1, s2) = (1.0 / args[i - 1], 1.0 / args[i], 1.0 / args[i + 1]);
                    values[i] <= chord(s0, s2, values[i - 1], values[i + 1], s1) + slack
                }
            };
            if !ok {
                return Err(VarregError::invalid(format!("sample {i} violates the {shape:?} tag")));
            }
        }
        Ok(SampledIndexFunction { args, values, monotone, shape })
    }

    /// Samples `f` at `args`.
    pub fn from_fn(f: &dyn IndexFunction, args: Vec<f64>, monotone: Monotonicity, shape: Shape) -> Result<Self> {
        let values = args.iter().map(|&t| f.eval(t)).collect();
        Self::new(args, values, monotone, shape)
    }

    pub fn args(&self) -> &[f64] {
        &self.args
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn monotone(&self) -> Monotonicity {
        self.monotone
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn segment(&self, i: usize, t: f64) -> f64 {
        let (t0, t1, v0, v1) = (self.args[i], self.args[i + 1], self.values[i], self.values[i + 1]);
        if v0 > 0.0 && v1 > 0.0 {
            let w = (t / t0).ln() / (t1 / t0).ln();
            (v0.ln() + w * (v1 / v0).ln()).exp()
        } else if self.shape == Shape::ConvexInInverse {
            chord(1.0 / t0, 1.0 / t1, v0, v1, 1.0 / t)
        } else {
            chord(t0, t1, v0, v1, t)
        }
    }
}

fn chord(x0: f64, x1: f64, y0: f64, y1: f64, x: f64) -> f64 {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl IndexFunction for SampledIndexFunction {
    fn eval(&self, t: f64) -> f64 {
        let n = self.args.len();
        if n == 1 {
            return self.values[0];
        }
        let i = match self.args.binary_search_by(|a| a.total_cmp(&t)) {
            Ok(i) => return self.values[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        self.segment(i, t).max(0.0)
    }
}

/// Golden-section minimization of `h` over ln α ∈ [ln lo, ln hi].
fn golden_min(h: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (h(c.exp()), h(d.exp()));
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = h(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = h(d.exp());
        }
    }
    fc.min(fd)
}

/// min over `candidates` of h, refined by golden section between the
/// neighbours of the best candidate.
fn refined_min(h: &dyn Fn(f64) -> f64, candidates: &[f64]) -> f64 {
    let (best, best_val) = candidates
        .iter()
        .enumerate()
        .map(|(i, &c)| (i, h(c)))
        .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    if candidates.len() < 2 {
        return best_val;
    }
    let lo = candidates[best.saturating_sub(1)];
    let hi = candidates[(best + 1).min(candidates.len() - 1)];
    best_val.min(golden_min(h, lo, hi))
}

/// F(σ)(t) with the infimum taken over [min, max] of `candidates`.
pub fn f_transform_at(sigma: &dyn IndexFunction, candidates: &[f64], t: f64) -> f64 {
    refined_min(&|alpha: f64| sigma.eval(alpha) + t / (2.0 * alpha), candidates)
}

/// F⁻¹(φ)(α) with the supremum taken over [min, max] of `candidates`.
pub fn f_inverse_at(phi: &dyn IndexFunction, candidates: &[f64], alpha: f64) -> f64 {
    let sup = -refined_min(&|t: f64| -(phi.eval(t) - t / (2.0 * alpha)), candidates);
    // t → 0 contributes φ(0+) ≥ 0
    sup.max(0.0)
}

/// F(σ) sampled on `t_grid`, minimizing over σ's own sample arguments.
pub fn f_transform(sigma: &SampledIndexFunction, t_grid: &[f64]) -> Result<SampledIndexFunction> {
    if sigma.monotone != Monotonicity::Nondecreasing || sigma.shape != Shape::ConvexInInverse {
        return Err(VarregError::invalid("F needs a nondecreasing σ with σ(1/·) convex"));
    }
    check_ascending(t_grid, "t grid")?;
    // a flat last segment extends as a constant, whose α → ∞ limit is σ(α_max)
    let n = sigma.values.len();
    let tail = if n >= 2 && sigma.values[n - 1] == sigma.values[n - 2] { sigma.values[n - 1] } else { f64::INFINITY };
    let values = t_grid.iter().map(|&t| f_transform_at(sigma, &sigma.args, t).min(tail)).collect();
    SampledIndexFunction::new(t_grid.to_vec(), values, Monotonicity::Nondecreasing, Shape::Concave)
}

/// F⁻¹(φ) sampled on `alpha_grid`, maximizing over φ's own sample arguments.
pub fn f_inverse(phi: &SampledIndexFunction, alpha_grid: &[f64]) -> Result<SampledIndexFunction> {
    if phi.monotone != Monotonicity::Nondecreasing || phi.shape != Shape::Concave {
        return Err(VarregError::invalid("F⁻¹ needs a concave nondecreasing φ"));
    }
    check_ascending(alpha_grid, "α grid")?;
    let values = alpha_grid.iter().map(|&a| f_inverse_at(phi, &phi.args, a)).collect();
    SampledIndexFunction::new(alpha_grid.to_vec(), values, Monotonicity::Nondecreasing, Shape::ConvexInInverse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::geometric;

    #[test]
    fn power_laws_interpolate_exactly() {
        let args = geometric(1e-3, 1e3, 13).unwrap();
        let f = SampledIndexFunction::from_fn(
            &|t: f64| 3.0 * t.powf(0.3),
            args,
            Monotonicity::Nondecreasing,
            Shape::Concave,
        )
        .unwrap();
        for t in [1.7e-3, 0.42, 999.0, 1e-5, 1e5] {
            let v = 3.0 * f64::powf(t, 0.3);
            assert!((f.eval(t) - v).abs() < 1e-12 * v, "t={t}");
        }
    }

    #[test]
    fn tags_are_verified() {
        let args = vec![1.0, 2.0, 3.0];
        assert!(SampledIndexFunction::new(
            args.clone(),
            vec![1.0, 0.5, 2.0],
            Monotonicity::Nondecreasing,
            Shape::Unconstrained
        )
        .is_err());
        // convex in t, not concave
        assert!(SampledIndexFunction::new(
            args.clone(),
            vec![1.0, 2.0, 5.0],
            Monotonicity::Nondecreasing,
            Shape::Concave
        )
        .is_err());
        assert!(SampledIndexFunction::new(
            args.clone(),
            vec![1.0, 2.0, 2.5],
            Monotonicity::Nondecreasing,
            Shape::Concave
        )
        .is_ok());
        assert!(SampledIndexFunction::new(
            vec![2.0, 1.0],
            vec![1.0, 1.0],
            Monotonicity::Nondecreasing,
            Shape::Unconstrained
        )
        .is_err());
        assert!(SampledIndexFunction::new(
            args,
            vec![1.0, -1.0, 1.0],
            Monotonicity::Nondecreasing,
            Shape::Unconstrained
        )
        .is_err());
    }

    #[test]
    fn f_of_identity() {
        let args = geometric(1e-8, 1e8, 161).unwrap();
        let sigma =
            SampledIndexFunction::from_fn(&|a: f64| a, args, Monotonicity::Nondecreasing, Shape::ConvexInInverse)
                .unwrap();
        let t_grid = geometric(1e-6, 1e6, 25).unwrap();
        let f = f_transform(&sigma, &t_grid).unwrap();
        for (t, v) in t_grid.iter().zip(f.values()) {
            let exact = (2.0 * t).sqrt();
            assert!((v - exact).abs() <= 1e-8 * exact.max(1.0), "t={t} {v} vs {exact}");
        }
    }

    #[test]
    fn f_inverse_of_sqrt() {
        let args = geometric(1e-12, 1e12, 241).unwrap();
        let phi = SampledIndexFunction::from_fn(&|t: f64| t.sqrt(), args, Monotonicity::Nondecreasing, Shape::Concave)
            .unwrap();
        let a_grid = geometric(1e-4, 1e4, 17).unwrap();
        let s = f_inverse(&phi, &a_grid).unwrap();
        for (a, v) in a_grid.iter().zip(s.values()) {
            assert!((v - a / 2.0).abs() <= 1e-8 * (a / 2.0).max(1.0), "α={a} {v}");
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let args = geometric(1e-3, 1e3, 7).unwrap();
        let zero =
            SampledIndexFunction::new(args.clone(), vec![0.0; 7], Monotonicity::Nondecreasing, Shape::ConvexInInverse)
                .unwrap();
        assert!(f_transform(&zero, &args).unwrap().values().iter().all(|v| *v == 0.0));
        let zc =
            SampledIndexFunction::new(args.clone(), vec![0.0; 7], Monotonicity::Nondecreasing, Shape::Concave).unwrap();
        assert!(f_inverse(&zc, &args).unwrap().values().iter().all(|v| *v == 0.0));
    }
}
