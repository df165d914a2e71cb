//! Affine score-to-LLR calibration trained by quasi-Newton minimization
//! of a proper-scoring-rule objective.

use crate::bfgs::minimize;
use crate::error::{Error, Result};
use crate::math::compensated_sum;
use crate::objective::{expected_cost, expected_cost_grad, ObjectiveParams, TrialSet};

/// The calibration transformation `llr = scale * score + offset`.
///
/// `scale` carries units of 1/score, `offset` is in log-odds. The scale
/// is not sign-constrained: a rule objective already penalizes an
/// inverted score ordering wherever the data can express it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineModel {
    pub scale: f64,
    pub offset: f64,
}

impl AffineModel {
    pub fn new(scale: f64, offset: f64) -> Result<Self> {
        if !scale.is_finite() || !offset.is_finite() {
            return Err(Error::domain(format!(
                "affine model parameters must be finite, got scale={scale}, offset={offset}"
            )));
        }
        Ok(AffineModel { scale, offset })
    }

    pub fn identity() -> Self {
        AffineModel { scale: 1.0, offset: 0.0 }
    }

    /// Map raw scores to LLRs, preserving order.
    pub fn apply(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|&s| self.scale * s + self.offset).collect()
    }

    /// Map a whole trial set.
    pub fn apply_set(&self, scores: &TrialSet) -> TrialSet {
        scores.map(|s| self.scale * s + self.offset)
    }
}

/// Training settings. With `init` unset, the optimizer starts from
/// `scale = 1 / pooled score standard deviation`, `offset = 0`.
#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub objective: ObjectiveParams,
    pub init: Option<AffineModel>,
    pub grad_tol: f64,
    pub max_iters: usize,
}

pub const DEFAULT_GRAD_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 200;

impl TrainConfig {
    pub fn new(objective: ObjectiveParams) -> Self {
        TrainConfig {
            objective,
            init: None,
            grad_tol: DEFAULT_GRAD_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn with_init(mut self, init: AffineModel) -> Self {
        self.init = Some(init);
        self
    }
}

/// What training produced, with convergence diagnostics. `converged`
/// implies `gradient_norm <= grad_tol` (infinity norm).
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: AffineModel,
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

/// Objective value and its gradient with respect to the affine
/// parameters, by backpropagation through the calibration map.
#[derive(Debug, Clone, Copy)]
pub struct ObjectiveEval {
    pub value: f64,
    pub d_scale: f64,
    pub d_offset: f64,
}

/// Evaluate the expected cost of `model` applied to raw scores, plus
/// `d/d scale = sum_i g_i s_i` and `d/d offset = sum_i g_i` where `g`
/// is the per-trial LLR gradient.
pub fn objective_of_model(
    model: &AffineModel,
    scores: &TrialSet,
    params: &ObjectiveParams,
) -> Result<ObjectiveEval> {
    let llrs = model.apply_set(scores);
    let value = expected_cost(params, &llrs)?;
    let grad = expected_cost_grad(params, &llrs)?;
    let d_scale = compensated_sum(
        grad.tar
            .iter()
            .zip(scores.tar())
            .map(|(g, s)| g * s)
            .chain(grad.non.iter().zip(scores.non()).map(|(g, s)| g * s)),
    );
    let d_offset = compensated_sum(grad.tar.iter().chain(grad.non.iter()).copied());
    Ok(ObjectiveEval { value, d_scale, d_offset })
}

fn pooled_std(scores: &TrialSet) -> f64 {
    let n = (scores.n_tar() + scores.n_non()) as f64;
    let all = || scores.tar().iter().chain(scores.non().iter()).copied();
    let mean = compensated_sum(all()) / n;
    let var = compensated_sum(all().map(|s| (s - mean) * (s - mean))) / n;
    var.sqrt()
}

/// Fit the affine calibration by BFGS on the configured objective.
///
/// Requires positive score variance (otherwise the scale is
/// unidentifiable) and at least one trial per class, which the
/// [`TrialSet`] already guarantees.
pub fn train(scores: &TrialSet, config: &TrainConfig) -> Result<TrainReport> {
    let std = pooled_std(scores);
    if !(std > 0.0) {
        return Err(Error::Degenerate(
            "scores have zero variance; calibration scale is unidentifiable".into(),
        ));
    }
    let init = config.init.unwrap_or(AffineModel { scale: 1.0 / std, offset: 0.0 });

    let f = |x: &[f64]| {
        let model = AffineModel { scale: x[0], offset: x[1] };
        match objective_of_model(&model, scores, &config.objective) {
            Ok(eval) if eval.value.is_finite() => {
                (eval.value, vec![eval.d_scale, eval.d_offset])
            }
            // Non-finite or failed evaluations are poison points the
            // line search backs away from.
            _ => (f64::INFINITY, vec![f64::NAN, f64::NAN]),
        }
    };
    let result = minimize(f, &[init.scale, init.offset], config.grad_tol, config.max_iters)?;
    Ok(TrainReport {
        model: AffineModel::new(result.x[0], result.x[1])?,
        final_objective: result.value,
        iterations: result.iterations,
        converged: result.converged,
        gradient_norm: result.grad_inf_norm(),
    })
}
