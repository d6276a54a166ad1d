mod common;

use proptest::prelude::*;
use rand::Rng;
use varreg::analysis::{
    defect_sigma, f_transform, gamma_estimate, modulus_estimate, rho_nu_estimate, rho_one, rho_one_closed_form,
    source_element_limit, Monotonicity, NormBall, RhoOneSetting, SampledIndexFunction, Shape,
};
use varreg::forward::DiagonalOperator;
use varreg::grid::geometric;
use varreg::sequences::{Coefficients, SequenceNorm, WeightVector};
use varreg::tikhonov::PenaltySpec;

fn closed_form_setting(inst: &common::Instance) -> RhoOneSetting {
    match (&inst.penalty, inst.op.smoothing()) {
        (PenaltySpec::WeightedPower { p, weights }, None) => {
            RhoOneSetting::Weighted { a: inst.op.weights().clone(), r: weights.clone(), p: *p }
        }
        (PenaltySpec::WeightedPower { p, .. }, Some(a)) => RhoOneSetting::Besov0pp { a, p: *p },
        (PenaltySpec::LevelTwoQ { q }, Some(a)) => RhoOneSetting::Besov02q { a, q: *q },
        (PenaltySpec::LevelTwoQ { .. }, None) => unreachable!("generator pairs level penalties with dyadic sets"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rho_one_is_homogeneous(seed in any::<u64>(), lambda in 0.2f64..5.0, sign in prop::bool::ANY) {
        let mut r = common::rng(seed);
        let n = r.random_range(1..8);
        let p = common::EXPONENTS[r.random_range(0..5)];
        let a = WeightVector::new((0..n).map(|_| common::log_uniform(&mut r, -1.0, 0.3)).collect()).unwrap();
        let w = WeightVector::new((0..n).map(|_| common::log_uniform(&mut r, -0.3, 0.3)).collect()).unwrap();
        let x = Coefficients::flat(common::values(&mut r, n, 2.0)).unwrap();
        let lam = if sign { -lambda } else { lambda };
        let setting = RhoOneSetting::Weighted { a: a.clone(), r: w.clone(), p };
        let base = rho_one_closed_form(&x, &setting).unwrap();
        let scaled = rho_one_closed_form(&x.scaled(lam).unwrap(), &setting).unwrap();
        let factor = lambda.powf(p - 1.0);
        prop_assert!(common::rel_close(scaled, factor * base, 1e-12) || base == 0.0 && scaled == 0.0);

        let op = DiagonalOperator::explicit(a.values().to_vec()).unwrap();
        let pen = PenaltySpec::weighted_power(p, w).unwrap();
        let x = Coefficients::new(op.index_set().clone(), x.values().to_vec()).unwrap();
        let grid = geometric(1e-10, 1e2, 61).unwrap();
        let e0 = rho_nu_estimate(&op, &pen, &x, 1.0, &grid).unwrap();
        let e1 = rho_nu_estimate(&op, &pen, &x.scaled(lam).unwrap(), 1.0, &grid).unwrap();
        prop_assert!((e1.rho_hat - factor * e0.rho_hat).abs() <= 1e-3 * factor * e0.rho_hat + 1e-14);
    }

    #[test]
    fn interpolation_type_inequality(seed in any::<u64>(), nu1 in 0.0f64..1.0, frac in 0.01f64..1.0) {
        let inst = common::instance(seed, 6);
        let nu2 = nu1 + frac * (1.0 - nu1);
        let grid = geometric(1e-6, 1e2, 49).unwrap();
        let r1 = rho_nu_estimate(&inst.op, &inst.penalty, &inst.x, nu1, &grid).unwrap().rho_hat;
        let r2 = rho_nu_estimate(&inst.op, &inst.penalty, &inst.x, nu2, &grid).unwrap().rho_hat;
        let r0 = rho_nu_estimate(&inst.op, &inst.penalty, &inst.x, 0.0, &grid).unwrap().rho_hat;
        let k = nu1 / nu2;
        let bound = r2.powf(k) * r0.powf(1.0 - k);
        prop_assert!(r1 <= bound * (1.0 + 1e-12) + 1e-300, "{r1} > {bound}");
    }

    #[test]
    fn defect_shape(seed in any::<u64>()) {
        let inst = common::instance(seed, 6);
        let grid = geometric(1e-8, 1e3, 45).unwrap();
        let rho1 = rho_one(&inst.op, &inst.penalty, &inst.x).unwrap();
        let s: Vec<_> = grid.iter().map(|&a| defect_sigma(&inst.op, &inst.penalty, &inst.x, a).unwrap()).collect();
        let scale = s.iter().map(|v| v.defect).fold(1e-300, f64::max);
        let slack = 1e-10 * scale.max(1.0);
        for v in &s {
            prop_assert!(v.defect >= -slack);
            // σ' = e²/(2α²) ≤ ρ₁²/2 bounds σ(α) by αρ₁²/2, so σ → 0 as α ↓ 0
            prop_assert!(v.defect <= v.alpha * rho1 * rho1 / 2.0 * (1.0 + 1e-9) + slack);
            prop_assert!(v.image_error <= (2.0 * v.alpha * v.defect.max(0.0)).sqrt() + 1e-10,
                "e = {} exceeds √(2ασ) at α = {}", v.image_error, v.alpha);
            prop_assert!(v.defect <= v.penalty_defect + 1e-10);
        }
        for w in s.windows(2) {
            prop_assert!(w[1].defect >= w[0].defect - slack);
        }
        for w in s.windows(3) {
            let t = (w[1].alpha - w[0].alpha) / (w[2].alpha - w[0].alpha);
            let chord = w[0].defect + t * (w[2].defect - w[0].defect);
            prop_assert!(w[1].defect >= chord - slack, "σ not concave at α = {}", w[1].alpha);
        }
    }

    #[test]
    fn f_preserves_order(seed in any::<u64>(), k in 0.0f64..2.0) {
        let inst = common::instance(seed, 6);
        prop_assume!(!inst.x.is_zero());
        let grid = geometric(1e-6, 1e4, 41).unwrap();
        let s1: Vec<f64> = grid.iter().map(|&a| defect_sigma(&inst.op, &inst.penalty, &inst.x, a).unwrap().defect.max(0.0)).collect();
        let s2: Vec<f64> = s1.iter().zip(&grid).map(|(v, a)| v + k * a / (1.0 + a)).collect();
        let tag = |v: Vec<f64>| SampledIndexFunction::new(grid.clone(), v, Monotonicity::Nondecreasing, Shape::ConvexInInverse).unwrap();
        let t_grid = geometric(1e-8, 1e2, 31).unwrap();
        let f1 = f_transform(&tag(s1), &t_grid).unwrap();
        let f2 = f_transform(&tag(s2), &t_grid).unwrap();
        for (u, v) in f1.values().iter().zip(f2.values()) {
            prop_assert!(*u <= v * (1.0 + 1e-12) + 1e-300, "{u} > {v}");
        }
    }

    #[test]
    fn source_element_matches_closed_form(seed in any::<u64>()) {
        let inst = common::instance(seed, 6);
        prop_assume!(!inst.x.is_zero());
        let closed = rho_one_closed_form(&inst.x, &closed_form_setting(&inst)).unwrap();
        let seq: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
        let cert = source_element_limit(&inst.op, &inst.penalty, &inst.x, &seq).unwrap();
        prop_assert!((cert.omega_norm - closed).abs() <= 1e-3 * cert.rho_one, "{} vs {closed}", cert.omega_norm);
        prop_assert!(common::rel_close(cert.rho_one, closed, 1e-10));
    }

    #[test]
    fn gamma_bounds_are_ordered(seed in any::<u64>(), frac in 0.0f64..1.2) {
        let inst = common::instance(seed, 6);
        let rho1 = rho_one(&inst.op, &inst.penalty, &inst.x).unwrap();
        let g = gamma_estimate(&inst.op, &inst.penalty, &inst.x, frac * rho1).unwrap();
        let ax = inst.op.apply_forward(&inst.x).unwrap().norm();
        prop_assert!(g.lower >= 0.0 && g.lower <= g.upper * (1.0 + 1e-9) && g.upper <= ax * (1.0 + 1e-12));
    }

    #[test]
    fn modulus_witness_is_feasible(seed in any::<u64>(), delta_exp in -4.0f64..0.0, radius in 0.1f64..3.0) {
        let inst = common::instance(seed, 8);
        let delta = 10f64.powf(delta_exp);
        let set = inst.op.index_set();
        let ball = NormBall { norm: SequenceNorm::Weighted { weights: WeightVector::per_level(set, |j| 2f64.powi(j as i32)).unwrap(), p: 2.0 }, radius };
        let est = modulus_estimate(&inst.op, &ball, &SequenceNorm::Plain { p: 2.0 }, delta, 16, seed).unwrap();
        let h = &est.witness;
        prop_assert!(ball.norm.eval(h).unwrap() <= radius * (1.0 + 1e-12));
        prop_assert!(2.0 * inst.op.apply_forward(h).unwrap().norm() <= delta * (1.0 + 1e-12));
        prop_assert!((est.value - 2.0 * h.norm()).abs() <= 1e-12 * est.value.max(1e-300));
    }

    #[test]
    fn modulus_identity_sandwich(seed in any::<u64>(), n in 1usize..20, delta in 0.01f64..4.0, radius in 0.1f64..2.0) {
        let op = DiagonalOperator::explicit(vec![1.0; n]).unwrap();
        let ball = NormBall { norm: SequenceNorm::Plain { p: 2.0 }, radius };
        let est = modulus_estimate(&op, &ball, &SequenceNorm::Plain { p: 2.0 }, delta, 8, seed).unwrap();
        let exact = delta.min(2.0 * radius);
        prop_assert!(est.value <= exact * (1.0 + 1e-12) && est.value >= 0.95 * exact);
    }
}
