//! Factorized linear-softmax policy over actions and compression factors.
//!
//! Two independent heads share one feature vector: the action head scores
//! the layout's action vocabulary, the compression head scores a small
//! strictly increasing grid of history-compression factors. Both heads are
//! plain linear maps with exact softmax gradients, so the whole policy is
//! a pair of weight matrices — easy to snapshot, diff, and checkpoint.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("feature vector has length {found}, policy expects {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("logits became non-finite")]
    NonFiniteLogits,
    #[error("index {index} is out of support for a head of size {size}")]
    OutOfSupport { index: usize, size: usize },
    #[error("compression grid must be strictly increasing, start at a value >= 1, and contain 1.0")]
    InvalidGrid,
    #[error("checkpoint at `{path}` is invalid: {msg}")]
    CheckpointInvalid { path: String, msg: String },
}

/// The discrete support of the compression head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionGrid(Vec<f64>);

impl CompressionGrid {
    pub fn new(values: Vec<f64>) -> Result<CompressionGrid, PolicyError> {
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        let valid = !values.is_empty()
            && increasing
            && values.iter().all(|&v| v.is_finite() && v >= 1.0)
            && values.contains(&1.0);
        if valid {
            Ok(CompressionGrid(values))
        } else {
            Err(PolicyError::InvalidGrid)
        }
    }

    pub fn default_grid() -> CompressionGrid {
        CompressionGrid(vec![1.0, 1.5, 2.0, 3.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Column-major weight matrix: one contiguous weight vector per output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    pub features: usize,
    pub outputs: usize,
    /// `data[o * features + f]` is the weight from feature `f` to output `o`.
    pub data: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(features: usize, outputs: usize) -> WeightMatrix {
        WeightMatrix { features, outputs, data: vec![0.0; features * outputs] }
    }

    fn logits(&self, x: &[f64]) -> Result<Vec<f64>, PolicyError> {
        if x.len() != self.features {
            return Err(PolicyError::ShapeMismatch { expected: self.features, found: x.len() });
        }
        let mut z = vec![0.0; self.outputs];
        for (o, zo) in z.iter_mut().enumerate() {
            let col = &self.data[o * self.features..(o + 1) * self.features];
            *zo = col.iter().zip(x).map(|(w, xi)| w * xi).sum();
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(PolicyError::NonFiniteLogits);
        }
        Ok(z)
    }

    pub fn axpy(&mut self, scale: f64, other: &WeightMatrix) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }
}

/// Numerically stable softmax probabilities.
fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Both policy heads plus the compression grid they index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub action: WeightMatrix,
    pub compression: WeightMatrix,
    pub grid: CompressionGrid,
}

/// One sampled (action, compression) decision with its log-probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub action_idx: usize,
    pub factor_idx: usize,
    pub logp_action: f64,
    pub logp_factor: f64,
}

impl Decision {
    pub fn logp_total(&self) -> f64 {
        self.logp_action + self.logp_factor
    }
}

/// Gradient with the same shape as [`PolicyParams`] (grid excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGrad {
    pub action: WeightMatrix,
    pub compression: WeightMatrix,
}

impl PolicyGrad {
    pub fn zeros_like(params: &PolicyParams) -> PolicyGrad {
        PolicyGrad {
            action: WeightMatrix::zeros(params.action.features, params.action.outputs),
            compression: WeightMatrix::zeros(
                params.compression.features,
                params.compression.outputs,
            ),
        }
    }

    pub fn axpy(&mut self, scale: f64, other: &PolicyGrad) {
        self.action.axpy(scale, &other.action);
        self.compression.axpy(scale, &other.compression);
    }

    pub fn scale(&mut self, factor: f64) {
        for w in self.action.data.iter_mut().chain(self.compression.data.iter_mut()) {
            *w *= factor;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.action
            .data
            .iter()
            .chain(self.compression.data.iter())
            .all(|w| w.is_finite())
    }
}

impl PolicyParams {
    /// All-zero weights: the uniform policy over both heads.
    pub fn zeros(feature_dim: usize, n_actions: usize, grid: CompressionGrid) -> PolicyParams {
        PolicyParams {
            action: WeightMatrix::zeros(feature_dim, n_actions),
            compression: WeightMatrix::zeros(feature_dim, grid.len()),
            grid,
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.action.features
    }

    pub fn n_actions(&self) -> usize {
        self.action.outputs
    }

    /// Action and compression distributions at `features`.
    pub fn distributions(&self, features: &[f64]) -> Result<(Vec<f64>, Vec<f64>), PolicyError> {
        let pa = softmax(&self.action.logits(features)?);
        let pc = softmax(&self.compression.logits(features)?);
        Ok((pa, pc))
    }

    /// Samples both heads, consuming exactly two uniform draws from `rng`.
    pub fn sample_decision(
        &self,
        features: &[f64],
        rng: &mut impl Rng,
    ) -> Result<Decision, PolicyError> {
        let (pa, pc) = self.distributions(features)?;
        let action_idx = sample_index(&pa, rng.gen::<f64>());
        let factor_idx = sample_index(&pc, rng.gen::<f64>());
        Ok(Decision {
            action_idx,
            factor_idx,
            logp_action: pa[action_idx].ln(),
            logp_factor: pc[factor_idx].ln(),
        })
    }

    /// Greedy argmax on both heads; ties break to the lowest index.
    pub fn greedy_decision(&self, features: &[f64]) -> Result<(usize, usize), PolicyError> {
        let (pa, pc) = self.distributions(features)?;
        Ok((argmax(&pa), argmax(&pc)))
    }

    /// Joint log-probability of `(action_idx, factor_idx)` and its exact
    /// gradient w.r.t. both weight matrices: `(onehot - softmax) ⊗ features`
    /// per head.
    pub fn logprob_and_grad(
        &self,
        features: &[f64],
        action_idx: usize,
        factor_idx: usize,
    ) -> Result<(f64, PolicyGrad), PolicyError> {
        if action_idx >= self.action.outputs {
            return Err(PolicyError::OutOfSupport {
                index: action_idx,
                size: self.action.outputs,
            });
        }
        if factor_idx >= self.compression.outputs {
            return Err(PolicyError::OutOfSupport {
                index: factor_idx,
                size: self.compression.outputs,
            });
        }
        let (pa, pc) = self.distributions(features)?;
        let logp = pa[action_idx].ln() + pc[factor_idx].ln();
        let mut grad = PolicyGrad {
            action: WeightMatrix::zeros(self.action.features, self.action.outputs),
            compression: WeightMatrix::zeros(self.compression.features, self.compression.outputs),
        };
        fill_logprob_grad(&mut grad.action, features, &pa, action_idx);
        fill_logprob_grad(&mut grad.compression, features, &pc, factor_idx);
        Ok((logp, grad))
    }

    /// Joint log-probability only (no gradient allocation).
    pub fn logprob(
        &self,
        features: &[f64],
        action_idx: usize,
        factor_idx: usize,
    ) -> Result<f64, PolicyError> {
        let (pa, pc) = self.distributions(features)?;
        if action_idx >= pa.len() {
            return Err(PolicyError::OutOfSupport { index: action_idx, size: pa.len() });
        }
        if factor_idx >= pc.len() {
            return Err(PolicyError::OutOfSupport { index: factor_idx, size: pc.len() });
        }
        Ok(pa[action_idx].ln() + pc[factor_idx].ln())
    }

    /// Value-semantic copy used for π_old / π_ref freezing.
    pub fn snapshot(&self) -> PolicyParams {
        self.clone()
    }

    /// Writes a versioned JSON checkpoint; floats round-trip exactly.
    pub fn save(&self, path: &Path) -> Result<(), PolicyError> {
        let doc = Checkpoint { version: CHECKPOINT_VERSION, params: self.clone() };
        let text = serde_json::to_string_pretty(&doc).expect("checkpoint serializes");
        std::fs::write(path, text).map_err(|e| PolicyError::CheckpointInvalid {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<PolicyParams, PolicyError> {
        let invalid = |msg: String| PolicyError::CheckpointInvalid {
            path: path.display().to_string(),
            msg,
        };
        let text = std::fs::read_to_string(path).map_err(|e| invalid(e.to_string()))?;
        let doc: Checkpoint = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
        if doc.version != CHECKPOINT_VERSION {
            return Err(invalid(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                doc.version
            )));
        }
        let p = &doc.params;
        let shapes_ok = p.action.data.len() == p.action.features * p.action.outputs
            && p.compression.data.len() == p.compression.features * p.compression.outputs
            && p.action.features == p.compression.features
            && p.compression.outputs == p.grid.len();
        if !shapes_ok {
            return Err(invalid("weight shapes are inconsistent".into()));
        }
        Ok(doc.params)
    }
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    params: PolicyParams,
}

fn fill_logprob_grad(grad: &mut WeightMatrix, x: &[f64], probs: &[f64], chosen: usize) {
    for o in 0..grad.outputs {
        let coeff = (o == chosen) as u8 as f64 - probs[o];
        let col = &mut grad.data[o * grad.features..(o + 1) * grad.features];
        for (g, xi) in col.iter_mut().zip(x) {
            *g += coeff * xi;
        }
    }
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Exact KL divergence `KL(p || q)` between the joint decision
/// distributions of two parameter sets at one feature vector. Factorized
/// heads make the joint KL the sum of the per-head KLs.
pub fn exact_kl(
    p: &PolicyParams,
    q: &PolicyParams,
    features: &[f64],
) -> Result<f64, PolicyError> {
    let (pa, pc) = p.distributions(features)?;
    let (qa, qc) = q.distributions(features)?;
    Ok(categorical_kl(&pa, &qa) + categorical_kl(&pc, &qc))
}

fn categorical_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi.ln() - qi.ln()))
        .sum()
}

/// Gradient of `KL(p_θ || q)` w.r.t. θ's weights at one feature vector,
/// accumulated into `grad` with `scale`. Per head, the logit derivative is
/// `p_j * ((ln p_j - ln q_j) - KL)`.
pub fn accumulate_kl_grad(
    grad: &mut PolicyGrad,
    p: &PolicyParams,
    q: &PolicyParams,
    features: &[f64],
    scale: f64,
) -> Result<(), PolicyError> {
    let (pa, pc) = p.distributions(features)?;
    let (qa, qc) = q.distributions(features)?;
    fill_kl_grad(&mut grad.action, features, &pa, &qa, scale);
    fill_kl_grad(&mut grad.compression, features, &pc, &qc, scale);
    Ok(())
}

fn fill_kl_grad(grad: &mut WeightMatrix, x: &[f64], p: &[f64], q: &[f64], scale: f64) {
    let kl = categorical_kl(p, q);
    for o in 0..grad.outputs {
        let coeff = p[o] * ((p[o].ln() - q[o].ln()) - kl);
        let col = &mut grad.data[o * grad.features..(o + 1) * grad.features];
        for (g, xi) in col.iter_mut().zip(x) {
            *g += scale * coeff * xi;
        }
    }
}

// ---------------------------------------------------------------------------
