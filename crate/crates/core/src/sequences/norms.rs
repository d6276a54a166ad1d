use crate::error::{Result, VarregError};

use super::{BesovParams, Coefficients, Exponent, WeightVector};

/// A configured sequence norm, used for error measurement and norm balls.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceNorm {
    /// Unweighted ℓ^p.
    Plain {
        p: f64,
    },
    Weighted {
        weights: WeightVector,
        p: f64,
    },
    Besov(BesovParams),
}

impl SequenceNorm {
    pub fn eval(&self, x: &Coefficients) -> Result<f64> {
        match self {
            SequenceNorm::Plain { p } => {
                if !(*p > 0.0) {
                    return Err(VarregError::invalid(format!("ℓ^p exponent p = {p} must be positive")));
                }
                Ok(p_norm(x.values().iter().copied(), Exponent::Finite(*p)))
            }
            SequenceNorm::Weighted { weights, p } => weighted_norm(x, weights, *p),
            SequenceNorm::Besov(params) => besov_norm(x, params),
        }
    }
}

/// (Σ |v_i|^p)^{1/p} with max-scaling, or max |v_i| for p = ∞.
pub(crate) fn p_norm<I>(values: I, p: Exponent) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let m = values.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    match p {
        Exponent::Infinite => m,
        Exponent::Finite(p) => {
            if m == 0.0 {
                return 0.0;
            }
            let s: f64 = values.map(|v| (v.abs() / m).powf(p)).sum();
            m * s.powf(1.0 / p)
        }
    }
}

/// The b^s_{p,q} sequence quasi-norm
/// ‖x‖^q = Σ_j 2^{jq(s+d/2−d/p)} (Σ_k |x_{j,k}|^p)^{q/p}, with sup for infinite exponents.
pub fn besov_norm(x: &Coefficients, params: &BesovParams) -> Result<f64> {
    let set = x.index_set();
    let d = set.d() as f64;
    let d_over_p = match params.p {
        Exponent::Finite(p) => d / p,
        Exponent::Infinite => 0.0,
    };
    let level_terms: Vec<f64> = (0..set.num_levels())
        .map(|j| {
            let inner = p_norm(x.level(j).iter().copied(), params.p);
            if inner == 0.0 {
                0.0
            } else {
                2f64.powf(j as f64 * (params.s + d / 2.0 - d_over_p)) * inner
            }
        })
        .collect();
    Ok(p_norm(level_terms.into_iter(), params.q))
}

/// (Σ w_i^p |x_i|^p)^{1/p}.
pub fn weighted_norm(x: &Coefficients, w: &WeightVector, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(VarregError::invalid(format!("weighted norm exponent p = {p} must be positive")));
    }
    w.check_len(x.len())?;
    let scaled = x.values().iter().zip(w.values()).map(|(v, w)| v * w);
    Ok(p_norm(scaled, Exponent::Finite(p)))
}

/// Weighted weak ℓ^t quasi-norm, ‖x‖^t = sup_τ τ^t Σ_i ν_i 1{μ_i|x_i| > τ}.
///
/// The step function in τ jumps only at the values μ_i|x_i|, and just below a
/// jump value v every coordinate with μ_i|x_i| >= v counts, so the sup is the
/// max over those values of v^t times the cumulative ν-mass of ties and larger.
pub fn weak_quasi_norm(x: &Coefficients, mu: &WeightVector, nu: &WeightVector, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(VarregError::invalid(format!("weak quasi-norm exponent t = {t} must be positive")));
    }
    mu.check_len(x.len())?;
    nu.check_len(x.len())?;
    let mut pairs: Vec<(f64, f64)> = x
        .values()
        .iter()
        .zip(mu.values())
        .zip(nu.values())
        .map(|((v, m), n)| (m * v.abs(), *n))
        .filter(|(v, _)| *v > 0.0)
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            mass += pairs[i].1;
            i += 1;
        }
        best = best.max(v * mass.powf(1.0 / t));
    }
    Ok(best)
}
