//! Convergence-rate experiments: noisy data over a δ grid, a parameter
//! choice per row, and a log-log slope fit of the reconstruction error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::rho_nu_estimate;
use crate::error::{Result, VarregError};
use crate::forward::{add_noise, DiagonalOperator};
use crate::grid::geometric;
use crate::sequences::{Coefficients, SequenceNorm};
use crate::tikhonov::{
    apriori_alpha, discrepancy_alpha, minimize, DiscrepancyStatus, PenaltySpec, RateExponent, TikhonovSolution,
};

use super::config::{ExperimentConfig, LevelProfile, RhoChoice, RuleConfig, TruthSpec};

/// Consecutive rows whose error shrinks by less than this factor are plateau rows.
pub const PLATEAU_RATIO: f64 = 0.98;
pub const MIN_FIT_ROWS: usize = 4;
/// α range and density for the automatic ρ_ν bound.
const AUTO_RHO_RANGE: (f64, f64) = (1e-12, 1e4);
const AUTO_RHO_PER_DECADE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Apriori,
    Window,
    NoiseDominates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub delta: f64,
    /// Infinite for noise-dominated rows, where x̂ = 0.
    pub alpha: f64,
    /// ‖x − x̂‖ in the configured norm.
    pub error: f64,
    /// ‖g^δ − Ax̂‖.
    pub residual: f64,
    /// ‖Ax − Ax̂‖.
    pub image_error: f64,
    /// (1 + c_r^ν)δ for the a-priori rule, (1 + C_D)δ for the discrepancy principle.
    pub image_bound: f64,
    pub status: RowStatus,
    pub plateau: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub rule: String,
    pub rows: Vec<RateRow>,
    /// Least-squares slope of ln error against ln δ over the fitted rows.
    pub fitted_slope: f64,
    pub intercept: f64,
    pub theoretical_slope: Option<f64>,
    pub fitted_rows: usize,
    /// ν and ρ used by the a-priori rule.
    pub nu: Option<f64>,
    pub rho: Option<f64>,
}

impl RateReport {
    /// Rows that enter the slope fit.
    pub fn fit_mask(&self) -> Vec<bool> {
        fit_mask(&self.rows)
    }

    /// Largest (image_error − image_bound) over all rows.
    pub fn worst_image_excess(&self) -> f64 {
        self.rows.iter().map(|r| r.image_error - r.image_bound).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn fit_mask(rows: &[RateRow]) -> Vec<bool> {
    rows.iter().map(|r| !r.plateau && r.status != RowStatus::NoiseDominates && r.error > 0.0).collect()
}

/// Builds the ground truth. `seed` drives random level profiles and signs.
pub fn generate_truth(spec: &TruthSpec, op: &DiagonalOperator, seed: u64) -> Result<Coefficients> {
    let set = op.index_set().clone();
    match spec {
        TruthSpec::Explicit { values } => Coefficients::new(set, values.clone()),
        TruthSpec::Spikes { spikes } => {
            let mut v = vec![0.0; set.len()];
            for s in spikes {
                let i = set
                    .flat_index(s.j, s.k)
                    .ok_or_else(|| VarregError::Config(format!("spike ({}, {}) is outside the index set", s.j, s.k)))?;
                v[i] = s.value;
            }
            Coefficients::new(set, v)
        }
        TruthSpec::BesovDecay { s, p_truth, profile } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = set.d() as f64;
            let mut v = vec![0.0; set.len()];
            for j in 0..set.num_levels() {
                let range = set.level_range(j);
                let dir: Vec<f64> = match profile {
                    LevelProfile::Random => range.clone().map(|_| StandardNormal.sample(&mut rng)).collect(),
                    LevelProfile::Flat => {
                        range.clone().map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
                    }
                    LevelProfile::Spike => range.clone().map(|i| if i == range.start { 1.0 } else { 0.0 }).collect(),
                };
                let m = dir.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let norm = m * dir.iter().map(|x| (x.abs() / m).powf(*p_truth)).sum::<f64>().powf(1.0 / p_truth);
                let target = 2f64.powf(-(j as f64) * (s + d / 2.0 - d / p_truth));
                for (out, x) in v[range].iter_mut().zip(&dir) {
                    *out = target * x / norm;
                }
            }
            Coefficients::new(set, v)
        }
    }
}

/// Seeds for the truth and for each δ row, derived from the master seed.
pub fn derive_seeds(master: u64, rows: usize) -> (u64, Vec<u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    let truth = rng.random();
    (truth, (0..rows).map(|_| rng.random()).collect())
}

/// The certified upper bound on ρ_ν(x) used by `"rho": "auto"`.
pub fn auto_rho(op: &DiagonalOperator, penalty: &PenaltySpec, x: &Coefficients, nu: f64) -> Result<f64> {
    let (lo, hi) = AUTO_RHO_RANGE;
    let decades = (hi / lo).log10().round() as usize;
    let grid = geometric(lo, hi, decades * AUTO_RHO_PER_DECADE + 1)?;
    Ok(rho_nu_estimate(op, penalty, x, nu, &grid)?.certified_upper)
}

/// Least-squares fit of ln y = b + m ln x, returned as (m, b).
pub fn log_log_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(VarregError::Empty("slope fit needs two points".into()));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(VarregError::invalid("slope fit needs distinct δ values"));
    }
    let m = sxy / sxx;
    Ok((m, my - m * mx))
}

enum Rule {
    Apriori { alpha_of: Box<dyn Fn(f64) -> Result<f64> + Sync>, bound_factor: f64 },
    Discrepancy { c_d: f64, big_c_d: f64, opts: crate::tikhonov::DiscrepancyOptions },
}

pub fn run_rate_experiment(config: &ExperimentConfig) -> Result<RateReport> {
    config.validate()?;
    let op = config.operator()?;
    let penalty = config.penalty(&op)?;
    let norm: SequenceNorm = config.error_norm.build(op.index_set())?;
    let deltas = config.delta_grid.values()?;
    let (truth_seed, row_seeds) = derive_seeds(config.seed, deltas.len());
    let x = generate_truth(&config.truth, &op, truth_seed)?;
    let ax = op.apply_forward(&x)?;

    let (rule, rule_name, nu, rho) = match &config.rule {
        RuleConfig::Apriori { exponent, c_l, c_r, rho } => {
            let exponent = exponent
                .or_else(|| config.default_exponent(&op, &penalty))
                .ok_or_else(|| VarregError::Config("a-priori rule needs an exponent".into()))?;
            let nu = exponent.nu();
            let rho = match rho {
                RhoChoice::Value(v) => *v,
                RhoChoice::Auto(_) => auto_rho(&op, &penalty, &x, nu)?,
            };
            if !(rho > 0.0) {
                return Err(VarregError::Config("a-priori rule needs ρ_ν(x) > 0; the truth is zero".into()));
            }
            let (c_l, c_r) = (*c_l, *c_r);
            let alpha_of = Box::new(move |delta: f64| {
                let (lo, hi) = apriori_alpha(delta, rho, RateExponent::Nu(nu), c_l, c_r)?;
                Ok((lo * hi).sqrt())
            });
            let rule = Rule::Apriori { alpha_of, bound_factor: 1.0 + c_r.powf(nu) };
            (rule, "apriori", Some(nu), Some(rho))
        }
        RuleConfig::Discrepancy { c_d, big_c_d, options } => {
            (Rule::Discrepancy { c_d: *c_d, big_c_d: *big_c_d, opts: *options }, "discrepancy", None, None)
        }
    };

    let mut rows: Vec<RateRow> = deltas
        .par_iter()
        .zip(row_seeds.par_iter())
        .map(|(&delta, &seed)| {
            let obs = add_noise(&ax, delta, seed)?;
            let (sol, status, bound): (TikhonovSolution, RowStatus, f64) = match &rule {
                Rule::Apriori { alpha_of, bound_factor } => {
                    (minimize(&op, &penalty, &obs.g, alpha_of(delta)?)?, RowStatus::Apriori, bound_factor * delta)
                }
                Rule::Discrepancy { c_d, big_c_d, opts } => {
                    let out = discrepancy_alpha(&op, &penalty, &obs.g, delta, *c_d, *big_c_d, opts)?;
                    let status = match out.status {
                        DiscrepancyStatus::Window => RowStatus::Window,
                        DiscrepancyStatus::NoiseDominates => RowStatus::NoiseDominates,
                    };
                    (out.solution, status, (1.0 + big_c_d) * delta)
                }
            };
            Ok(RateRow {
                delta,
                alpha: sol.alpha,
                error: norm.eval(&x.sub(&sol.x_hat)?)?,
                residual: sol.residual,
                image_error: op.image_distance(&x, &sol.x_hat)?,
                image_bound: bound,
                status,
                plateau: false,
                seed,
            })
        })
        .collect::<Result<_>>()?;

    for i in 1..rows.len() {
        rows[i].plateau = rows[i].error >= PLATEAU_RATIO * rows[i - 1].error;
    }
    let points: Vec<(f64, f64)> =
        rows.iter().zip(fit_mask(&rows)).filter(|(_, keep)| *keep).map(|(r, _)| (r.delta, r.error)).collect();
    if points.len() < MIN_FIT_ROWS {
        return Err(VarregError::Empty(format!(
            "only {} rows left for the slope fit, need at least {MIN_FIT_ROWS}",
            points.len()
        )));
    }
    let (fitted_slope, intercept) = log_log_fit(&points)?;
    Ok(RateReport {
        rule: rule_name.to_string(),
        rows,
        fitted_slope,
        intercept,
        theoretical_slope: config.reference_slope(&op),
        fitted_rows: points.len(),
        nu,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{besov_norm, BesovParams};

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [1e-3, 1e-2, 0.1, 1.0].iter().map(|&d: &f64| (d, 3.0 * d.powf(0.4))).collect();
        let (m, b) = log_log_fit(&pts).unwrap();
        assert!((m - 0.4).abs() < 1e-12 && (b - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn besov_truth_has_unit_norm() {
        let op = DiagonalOperator::besov(1, 1.0, 8).unwrap();
        for profile in [LevelProfile::Random, LevelProfile::Flat, LevelProfile::Spike] {
            for p in [2.0, 4.0 / 3.0] {
                let spec = TruthSpec::BesovDecay { s: 0.5, p_truth: p, profile };
                let x = generate_truth(&spec, &op, 11).unwrap();
                let params =
                    BesovParams::new(0.5, crate::sequences::Exponent::Finite(p), crate::sequences::Exponent::Infinite)
                        .unwrap();
                assert!((besov_norm(&x, &params).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        assert_eq!(derive_seeds(5, 4), derive_seeds(5, 4));
        assert_ne!(derive_seeds(5, 4).1, derive_seeds(6, 4).1);
    }
}
