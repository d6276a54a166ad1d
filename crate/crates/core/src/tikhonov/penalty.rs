use serde::{Deserialize, Serialize};

use crate::error::{Result, VarregError};
use crate::sequences::{l2_norm, Coefficients, LeveledIndexSet, WeightVector};

use super::prox::check_exponent;

/// The penalty R.
///
/// `WeightedPower` is R(x) = (1/p) Σ r̄_i^p |x_i|^p, which covers plain ℓ^p,
/// weighted ℓ^p and b^0_{p,p} (with r̄ = 2^{j(d/2−d/p)}). `LevelTwoQ` is
/// R(x) = (1/q) Σ_j ‖x_j‖_2^q, the q-th power of the b^0_{2,q} norm over q.
#[derive(Debug, Clone, PartialEq)]
pub enum PenaltySpec {
    WeightedPower { p: f64, weights: WeightVector },
    LevelTwoQ { q: f64 },
}

/// JSON form of a penalty; weights for `besov_pp` and `lp` come from the index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyJson {
    WeightedPower { p: f64, weights: Vec<f64> },
    BesovPp { p: f64 },
    Lp { p: f64 },
    LevelTwoQ { q: f64 },
}

impl PenaltySpec {
    pub fn weighted_power(p: f64, weights: WeightVector) -> Result<Self> {
        check_exponent("p", p)?;
        Ok(PenaltySpec::WeightedPower { p, weights })
    }

    pub fn lp(p: f64, n: usize) -> Result<Self> {
        Self::weighted_power(p, WeightVector::ones(n)?)
    }

    /// b^0_{p,p} penalty through r̄_{(j,k)} = 2^{j(d/2 − d/p)}.
    pub fn besov_pp(p: f64, index_set: &LeveledIndexSet) -> Result<Self> {
        check_exponent("p", p)?;
        Self::weighted_power(p, WeightVector::besov_identification(index_set, 0.0, p)?)
    }

    pub fn level_two_q(q: f64) -> Result<Self> {
        check_exponent("q", q)?;
        Ok(PenaltySpec::LevelTwoQ { q })
    }

    pub fn from_json(json: &PenaltyJson, index_set: &LeveledIndexSet) -> Result<Self> {
        match json {
            PenaltyJson::WeightedPower { p, weights } => {
                let w = WeightVector::new(weights.clone())?;
                w.check_len(index_set.len())?;
                Self::weighted_power(*p, w)
            }
            PenaltyJson::BesovPp { p } => Self::besov_pp(*p, index_set),
            PenaltyJson::Lp { p } => Self::lp(*p, index_set.len()),
            PenaltyJson::LevelTwoQ { q } => Self::level_two_q(*q),
        }
    }

    /// Homogeneity degree u (p or q).
    pub fn u(&self) -> f64 {
        match self {
            PenaltySpec::WeightedPower { p, .. } => *p,
            PenaltySpec::LevelTwoQ { q } => *q,
        }
    }

    pub(crate) fn check(&self, x: &Coefficients) -> Result<()> {
        if let PenaltySpec::WeightedPower { weights, .. } = self {
            weights.check_len(x.len())?;
        }
        Ok(())
    }

    pub fn value(&self, x: &Coefficients) -> Result<f64> {
        self.check(x)?;
        Ok(match self {
            PenaltySpec::WeightedPower { p, weights } => {
                x.values().iter().zip(weights.values()).map(|(v, r)| (r * v.abs()).powf(*p)).sum::<f64>() / p
            }
            PenaltySpec::LevelTwoQ { q } => {
                let set = x.index_set();
                (0..set.num_levels()).map(|j| l2_norm(x.level(j)).powf(*q)).sum::<f64>() / q
            }
        })
    }

    /// R(x) − R(z), summed term by term so that nearby arguments do not cancel.
    pub fn difference(&self, x: &Coefficients, z: &Coefficients) -> Result<f64> {
        x.ensure_compatible(z)?;
        self.check(x)?;
        Ok(match self {
            PenaltySpec::WeightedPower { p, weights } => {
                let terms = x.values().iter().zip(z.values()).zip(weights.values());
                terms.map(|((u, v), r)| power_difference(*r, u.abs(), v.abs(), *p)).sum::<f64>() / p
            }
            PenaltySpec::LevelTwoQ { q } => {
                let set = x.index_set();
                (0..set.num_levels())
                    .map(|j| power_difference(1.0, l2_norm(x.level(j)), l2_norm(z.level(j)), *q))
                    .sum::<f64>()
                    / q
            }
        })
    }

    /// ∇R(x).
    pub fn gradient(&self, x: &Coefficients) -> Result<Coefficients> {
        self.check(x)?;
        match self {
            PenaltySpec::WeightedPower { p, weights } => x.with_values(
                x.values()
                    .iter()
                    .zip(weights.values())
                    .map(|(v, r)| v.signum() * r * (r * v.abs()).powf(p - 1.0))
                    .collect(),
            ),
            PenaltySpec::LevelTwoQ { q } => {
                let set = x.index_set();
                let mut out = Vec::with_capacity(x.len());
                for j in 0..set.num_levels() {
                    let level = x.level(j);
                    let n = l2_norm(level);
                    if n == 0.0 {
                        out.extend(std::iter::repeat_n(0.0, level.len()));
                    } else {
                        let f = n.powf(q - 2.0);
                        out.extend(level.iter().map(|v| f * v));
                    }
                }
                x.with_values(out)
            }
        }
    }
}

/// r^p (a^p − b^p) for a, b ≥ 0 without cancellation when a ≈ b.
pub(crate) fn power_difference(r: f64, a: f64, b: f64, p: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (hi, lo, sign) = if a > b { (a, b, 1.0) } else { (b, a, -1.0) };
    let ratio = lo / hi;
    let rel = if ratio < 0.5 { 1.0 - ratio.powf(p) } else { -(p * ((lo - hi) / hi).ln_1p()).exp_m1() };
    sign * (r * hi).powf(p) * rel
}

impl TryFrom<&str> for PenaltyJson {
    type Error = VarregError;
    fn try_from(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
