//! Seeded problem generators shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varreg::forward::DiagonalOperator;
use varreg::sequences::{Coefficients, LeveledIndexSet, WeightVector};
use varreg::tikhonov::PenaltySpec;

pub const EXPONENTS: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 4.0];

pub struct Instance {
    pub op: DiagonalOperator,
    pub penalty: PenaltySpec,
    pub x: Coefficients,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..hi))
}

/// Uniform draws in [−scale, scale], with roughly one coordinate in five set to zero.
pub fn values(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| if rng.random_bool(0.2) { 0.0 } else { scale * rng.random_range(-1.0..1.0) }).collect()
}

pub fn coeffs(set: &Arc<LeveledIndexSet>, v: Vec<f64>) -> Coefficients {
    Coefficients::new(set.clone(), v).unwrap()
}

/// One of three problem families, chosen by the seed: a weighted power on a
/// flat set of at most `max_n` coordinates, a b^0_{p,p} penalty on a small
/// dyadic set, or a level-wise (2, q) penalty on the same.
pub fn instance(seed: u64, max_n: usize) -> Instance {
    let mut r = rng(seed);
    let expo = EXPONENTS[r.random_range(0..EXPONENTS.len())];
    match seed % 3 {
        0 => {
            let n = r.random_range(1..=max_n);
            let a: Vec<f64> = (0..n).map(|_| log_uniform(&mut r, -1.0, 0.3)).collect();
            let w: Vec<f64> = (0..n).map(|_| log_uniform(&mut r, -0.3, 0.3)).collect();
            let op = DiagonalOperator::explicit(a).unwrap();
            let penalty = PenaltySpec::weighted_power(expo, WeightVector::new(w).unwrap()).unwrap();
            let x = coeffs(op.index_set(), values(&mut r, n, 2.0));
            Instance { op, penalty, x }
        }
        k => {
            let a = [0.5, 1.0][r.random_range(0..2)];
            let j = r.random_range(0..=3);
            let op = DiagonalOperator::besov(1, a, j).unwrap();
            let penalty = if k == 1 {
                PenaltySpec::besov_pp(expo, op.index_set()).unwrap()
            } else {
                PenaltySpec::level_two_q(expo).unwrap()
            };
            let x = coeffs(op.index_set(), values(&mut r, op.len(), 2.0));
            Instance { op, penalty, x }
        }
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
