//! JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VarregError};
use crate::forward::{DiagonalOperator, OperatorSpec};
use crate::grid::geometric;
use crate::sequences::{BesovParams, Exponent, LeveledIndexSet, SequenceNorm, WeightVector};
use crate::tikhonov::{DiscrepancyOptions, PenaltyJson, PenaltySpec, RateExponent};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub operator: OperatorSpec,
    pub penalty: PenaltyJson,
    pub truth: TruthSpec,
    pub delta_grid: DeltaGrid,
    pub rule: RuleConfig,
    pub error_norm: NormSpec,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the default s/(s+a) reference slope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theoretical_slope: Option<f64>,
    /// Output path prefix; the CLI's `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelProfile {
    /// A seeded Gaussian direction, normalized on the level.
    #[default]
    Random,
    /// Equal magnitudes with seeded signs.
    Flat,
    /// All mass on the first coefficient of the level.
    Spike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spike {
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruthSpec {
    /// Level-major coefficient values.
    Explicit {
        values: Vec<f64>,
    },
    /// Every level normalized to 2^{j(s + d/2 − d/p)}‖x_j‖_p = 1, so the
    /// truth has b^s_{p,∞} norm exactly 1.
    BesovDecay {
        s: f64,
        p_truth: f64,
        #[serde(default)]
        profile: LevelProfile,
    },
    Spikes {
        spikes: Vec<Spike>,
    },
}

/// Noise levels, listed in decreasing order or given as a geometric range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaGrid {
    List(Vec<f64>),
    Geometric { lo: f64, hi: f64, count: usize },
}

impl DeltaGrid {
    /// Strictly decreasing noise levels.
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            DeltaGrid::List(v) => v.clone(),
            DeltaGrid::Geometric { lo, hi, count } => {
                let mut g = geometric(*lo, *hi, *count)?;
                g.reverse();
                g
            }
        };
        if v.is_empty() {
            return Err(VarregError::Config("empty δ grid".into()));
        }
        if v.iter().any(|d| !(*d > 0.0) || !d.is_finite()) || v.windows(2).any(|w| w[1] >= w[0]) {
            return Err(VarregError::Config("δ grid must be positive and strictly decreasing".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoChoice {
    /// The literal string "auto": a certified upper bound on ρ_ν(x).
    Auto(AutoTag),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

impl Default for RhoChoice {
    fn default() -> Self {
        RhoChoice::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleConfig {
    /// α = √(c_l c_r)(δ/ρ)^{1/ν}, the geometric middle of the admissible interval.
    Apriori {
        /// Defaults to θ = ((u−1)/u)(s+a)/a from the truth and operator.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<RateExponent>,
        c_l: f64,
        c_r: f64,
        #[serde(default)]
        rho: RhoChoice,
    },
    Discrepancy {
        c_d: f64,
        #[serde(rename = "C_D")]
        big_c_d: f64,
        #[serde(default)]
        options: DiscrepancyOptions,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Plain {
        p: f64,
    },
    Weighted {
        weights: Vec<f64>,
        p: f64,
    },
    /// b^s_{p,q}; omitted p or q means ∞.
    Besov {
        s: f64,
        p: Option<f64>,
        q: Option<f64>,
    },
}

impl NormSpec {
    pub fn build(&self, set: &LeveledIndexSet) -> Result<SequenceNorm> {
        let exp = |v: Option<f64>| v.map_or(Exponent::Infinite, Exponent::Finite);
        match self {
            NormSpec::Plain { p } => Ok(SequenceNorm::Plain { p: *p }),
            NormSpec::Weighted { weights, p } => {
                let w = WeightVector::new(weights.clone())?;
                w.check_len(set.len())?;
                Ok(SequenceNorm::Weighted { weights: w, p: *p })
            }
            NormSpec::Besov { s, p, q } => Ok(SequenceNorm::Besov(BesovParams::new(*s, exp(*p), exp(*q))?)),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| VarregError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn operator(&self) -> Result<DiagonalOperator> {
        DiagonalOperator::from_spec(&self.operator)
    }

    pub fn penalty(&self, op: &DiagonalOperator) -> Result<PenaltySpec> {
        PenaltySpec::from_json(&self.penalty, op.index_set())
    }

    /// Checks the version, the grids and the admissible regularity range
    /// 0 < s < a/(u − 1) for Besov truths under Besov operators.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(VarregError::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        let op = self.operator()?;
        let pen = self.penalty(&op)?;
        self.delta_grid.values()?;
        self.error_norm.build(op.index_set())?;
        if let TruthSpec::BesovDecay { s, p_truth, .. } = &self.truth {
            if !(*p_truth > 0.0) || !p_truth.is_finite() {
                return Err(VarregError::Config(format!("p_truth = {p_truth} must be positive")));
            }
            if let Some(a) = op.smoothing() {
                let limit = a / (pen.u() - 1.0);
                if !(*s > 0.0 && *s < limit) {
                    return Err(VarregError::Config(format!("smoothness s = {s} must lie in (0, {limit})")));
                }
            }
        }
        match &self.rule {
            RuleConfig::Apriori { c_l, c_r, rho, exponent } => {
                if !(*c_l > 0.0 && c_r >= c_l) || !c_r.is_finite() {
                    return Err(VarregError::Config(format!("need 0 < c_l ≤ c_r, got c_l = {c_l}, c_r = {c_r}")));
                }
                if let RhoChoice::Value(r) = rho {
                    if !(*r > 0.0) || !r.is_finite() {
                        return Err(VarregError::Config(format!("ρ = {r} must be positive")));
                    }
                }
                if exponent.is_none() && self.default_exponent(&op, &pen).is_none() {
                    return Err(VarregError::Config(
                        "a-priori rule needs an explicit exponent unless the truth is besov_decay under a besov operator"
                            .into(),
                    ));
                }
            }
            RuleConfig::Discrepancy { c_d, big_c_d, .. } => {
                if !(*c_d > 1.0 && big_c_d > c_d) || !big_c_d.is_finite() {
                    return Err(VarregError::Config(format!("need C_D > c_D > 1, got c_D = {c_d}, C_D = {big_c_d}")));
                }
            }
        }
        if let Some(t) = self.theoretical_slope {
            if !t.is_finite() {
                return Err(VarregError::Config("theoretical_slope must be finite".into()));
            }
        }
        Ok(())
    }

    /// θ = ((u−1)/u)(s+a)/a when the truth smoothness and operator order are known.
    pub fn default_exponent(&self, op: &DiagonalOperator, pen: &PenaltySpec) -> Option<RateExponent> {
        let (TruthSpec::BesovDecay { s, .. }, Some(a)) = (&self.truth, op.smoothing()) else {
            return None;
        };
        let u = pen.u();
        Some(RateExponent::Theta { theta: (u - 1.0) / u * (s + a) / a, u })
    }

    /// s/(s+a) unless overridden.
    pub fn reference_slope(&self, op: &DiagonalOperator) -> Option<f64> {
        if self.theoretical_slope.is_some() {
            return self.theoretical_slope;
        }
        match (&self.truth, op.smoothing()) {
            (TruthSpec::BesovDecay { s, .. }, Some(a)) => Some(s / (s + a)),
            _ => None,
        }
    }
}

/// Geometric α grid given by its range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        geometric(self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub norm: NormSpec,
    pub radius: f64,
}

/// A single problem instance for the `solve`, `rho`, `defect`, `equiv` and
/// `modulus` subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub version: u32,
    pub operator: OperatorSpec,
    pub penalty: PenaltyJson,
    pub truth: TruthSpec,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to 121 points on [1e-6, 1e2].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_norm: Option<NormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallSpec>,
}

impl ProblemConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = serde_json::from_str(text).map_err(|e| VarregError::Config(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(VarregError::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn operator(&self) -> Result<DiagonalOperator> {
        DiagonalOperator::from_spec(&self.operator)
    }

    pub fn penalty(&self, op: &DiagonalOperator) -> Result<PenaltySpec> {
        PenaltySpec::from_json(&self.penalty, op.index_set())
    }

    pub fn alpha_grid(&self) -> Result<Vec<f64>> {
        match &self.alpha_grid {
            Some(g) => g.values(),
            None => Ok(crate::grid::default_alpha_grid()),
        }
    }
}
