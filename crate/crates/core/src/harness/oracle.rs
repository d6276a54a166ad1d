//! Brute-force reference minimizer and the randomized cross-check corpus.
//!
//! The oracle shares no code with the prox kernels: every scalar or radial
//! subproblem is solved by golden-section search, comparing objective values
//! through differences that are evaluated without cancellation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, VarregError};
use crate::forward::DiagonalOperator;
use crate::sequences::{index_set_from_sizes, l2_norm, Coefficients, LeveledIndexSet, WeightVector};
use crate::tikhonov::{minimize, PenaltySpec};

pub const ORACLE_MAX_COORDS: usize = 8;

const WIDTH: f64 = 1e-10;
const MAX_ITERS: usize = 400;

/// f(u) − f(v) for
/// f(t) = (c − b t)²/(2α) + k|t|^m/m, written so that nearby u, v do not cancel.
fn scalar_diff(c: f64, b: f64, k: f64, m: f64, alpha: f64, u: f64, v: f64) -> f64 {
    let quad = b * (v - u) * (2.0 * c - b * (u + v)) / (2.0 * alpha);
    quad + k / m * pow_diff(u.abs(), v.abs(), m)
}

/// |u|^m − |v|^m for u, v ≥ 0.
fn pow_diff(u: f64, v: f64, m: f64) -> f64 {
    if u == v {
        0.0
    } else if u == 0.0 || v == 0.0 {
        u.powf(m) - v.powf(m)
    } else if u > v {
        u.powf(m) * -(m * ((v - u) / u).ln_1p()).exp_m1()
    } else {
        v.powf(m) * (m * ((u - v) / v).ln_1p()).exp_m1()
    }
}

/// Golden-section minimization on [lo, hi] of a function known only through
/// the sign of `diff(u, v) = f(u) − f(v)`.
fn golden(lo: f64, hi: f64, diff: impl Fn(f64, f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..MAX_ITERS {
        if b - a <= WIDTH {
            break;
        }
        if diff(c, d) <= 0.0 {
            b = d;
            d = c;
            c = b - r * (b - a);
        } else {
            a = c;
            c = d;
            d = a + r * (b - a);
        }
    }
    0.5 * (a + b)
}

/// Reference minimizer of T_α(·, g) for at most eight coordinates.
pub fn oracle_minimize(
    op: &DiagonalOperator,
    penalty: &PenaltySpec,
    g: &Coefficients,
    alpha: f64,
) -> Result<Coefficients> {
    let n = op.len();
    if n > ORACLE_MAX_COORDS {
        return Err(VarregError::DimensionCap { n, cap: ORACLE_MAX_COORDS });
    }
    if g.len() != n {
        return Err(VarregError::LengthMismatch { expected: n, found: g.len() });
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(VarregError::invalid(format!("α = {alpha} must be positive")));
    }
    let a = op.weights().values();
    let mut out = vec![0.0; n];
    match penalty {
        PenaltySpec::WeightedPower { p, weights } => {
            weights.check_len(n)?;
            for i in 0..n {
                let (gi, ai) = (g.values()[i], a[i]);
                let k = weights.values()[i].powf(*p);
                let bound = 2.0 * gi.abs() / ai;
                out[i] = golden(-bound, bound, |u, v| scalar_diff(gi, ai, k, *p, alpha, u, v));
            }
        }
        PenaltySpec::LevelTwoQ { q } => {
            let set = op.index_set();
            for j in 0..set.num_levels() {
                let range = set.level_range(j);
                let aj = a[range.start];
                if a[range.clone()].iter().any(|&v| v != aj) {
                    return Err(VarregError::NonuniformLevelWeight { level: j });
                }
                let gj = &g.values()[range.clone()];
                let r = l2_norm(gj);
                if r == 0.0 {
                    continue;
                }
                // the minimizer is t·g_j/‖g_j‖ with t ≥ 0 solving the radial problem
                let t = golden(0.0, 2.0 * r / aj, |u, v| scalar_diff(r, aj, 1.0, *q, alpha, u, v));
                for (o, gv) in out[range].iter_mut().zip(gj) {
                    *o = t * gv / r;
                }
            }
        }
    }
    g.with_values(out)
}

/// One instance of the cross-check corpus.
#[derive(Debug, Clone)]
pub struct ProxInstance {
    pub op: DiagonalOperator,
    pub penalty: PenaltySpec,
    pub g: Coefficients,
    pub alpha: f64,
}

pub const CORPUS_EXPONENTS: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 4.0];

/// Seeded random instances with at most four coordinates, alternating
/// between weighted powers and level-wise (2, q) penalties.
pub fn prox_test_corpus(count: usize, seed: u64) -> Result<Vec<ProxInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layouts: [&[usize]; 5] = [&[1], &[1, 2], &[2, 2], &[1, 3], &[4]];
    (0..count)
        .map(|i| {
            let exponent = CORPUS_EXPONENTS[rng.random_range(0..CORPUS_EXPONENTS.len())];
            let alpha = 10f64.powf(rng.random_range(-3.0..1.0));
            if i % 2 == 0 {
                let n = rng.random_range(1..=4);
                let set = Arc::new(LeveledIndexSet::flat(n)?);
                let a: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..0.3))).collect();
                let w: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-0.3..0.3))).collect();
                let g: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
                let op = DiagonalOperator::new(set.clone(), WeightVector::new(a)?)?;
                let penalty = PenaltySpec::weighted_power(exponent, WeightVector::new(w)?)?;
                Ok(ProxInstance { op, penalty, g: Coefficients::new(set, g)?, alpha })
            } else {
                let sizes = layouts[rng.random_range(0..layouts.len())].to_vec();
                let set = Arc::new(index_set_from_sizes(1, sizes)?);
                let level_a: Vec<f64> =
                    (0..set.num_levels()).map(|_| 10f64.powf(rng.random_range(-1.0..0.3))).collect();
                let a = WeightVector::per_level(&set, |j| level_a[j])?;
                let g: Vec<f64> = (0..set.len()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let op = DiagonalOperator::new(set.clone(), a)?;
                Ok(ProxInstance {
                    op,
                    penalty: PenaltySpec::level_two_q(exponent)?,
                    g: Coefficients::new(set, g)?,
                    alpha,
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProxTestReport {
    pub instances: usize,
    /// max over instances and coordinates of |minimize − oracle|.
    pub max_gap: f64,
    pub worst_instance: usize,
}

pub fn run_prox_test(corpus: &[ProxInstance]) -> Result<ProxTestReport> {
    let mut report = ProxTestReport { instances: corpus.len(), max_gap: 0.0, worst_instance: 0 };
    for (i, inst) in corpus.iter().enumerate() {
        let fast = minimize(&inst.op, &inst.penalty, &inst.g, inst.alpha)?;
        let slow = oracle_minimize(&inst.op, &inst.penalty, &inst.g, inst.alpha)?;
        let gap = fast.x_hat.values().iter().zip(slow.values()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        if gap > report.max_gap {
            report.max_gap = gap;
            report.worst_instance = i;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(a: f64, p: f64, g: f64, alpha: f64) -> f64 {
        let op = DiagonalOperator::explicit(vec![a]).unwrap();
        let pen = PenaltySpec::lp(p, 1).unwrap();
        let g = Coefficients::new(op.index_set().clone(), vec![g]).unwrap();
        oracle_minimize(&op, &pen, &g, alpha).unwrap().values()[0]
    }

    #[test]
    fn closed_forms() {
        // quadratic: x = a g / (a² + α)
        assert!((one(0.5, 2.0, 1.3, 0.2) - 0.5 * 1.3 / 0.45).abs() < 1e-8);
        // p = 3, a = α = 1, g = 2: x + x² = 2 at x = 1
        assert!((one(1.0, 3.0, 2.0, 1.0) - 1.0).abs() < 1e-8);
        assert_eq!(one(1.0, 1.5, 0.0, 1.0), 0.0);
    }

    #[test]
    fn pow_diff_without_cancellation() {
        let u = 1.0 + 2f64.powi(-40);
        let exact = 1.5 * 2f64.powi(-40);
        assert!((pow_diff(u, 1.0, 1.5) - exact).abs() < 1e-6 * exact);
        assert!((pow_diff(1.0, u, 1.5) + exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn cap_enforced() {
        let op = DiagonalOperator::explicit(vec![1.0; 9]).unwrap();
        let g = Coefficients::new(op.index_set().clone(), vec![1.0; 9]).unwrap();
        let err = oracle_minimize(&op, &PenaltySpec::lp(2.0, 9).unwrap(), &g, 1.0).unwrap_err();
        assert!(matches!(err, VarregError::DimensionCap { n: 9, cap: 8 }));
    }

    #[test]
    fn level_radial() {
        // q = 2, a = 1, α = 1: x_j = g_j / 2
        let set = Arc::new(index_set_from_sizes(1, vec![1, 2]).unwrap());
        let op = DiagonalOperator::new(set.clone(), WeightVector::ones(3).unwrap()).unwrap();
        let g = Coefficients::new(set, vec![1.0, 3.0, -4.0]).unwrap();
        let x = oracle_minimize(&op, &PenaltySpec::level_two_q(2.0).unwrap(), &g, 1.0).unwrap();
        for (u, v) in x.values().iter().zip(g.values()) {
            assert!((u - v / 2.0).abs() < 1e-9);
        }
    }
}
