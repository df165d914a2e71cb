//! Prior-weighted expected-cost objectives over a set of trials.
//!
//! The objective averages a proper scoring rule over target and
//! non-target log-likelihood-ratios, with the two class averages mixed
//! by a synthetic prior `pi = sigma(tau)`. Everything is evaluated in
//! the LLR domain through softplus/sigmoid identities, so large `|llr|`
//! never round-trips through a saturated posterior.
//!
//! Per-class reductions use compensated summation in input order and no
//! shared mutable state, so results are bit-reproducible for a fixed
//! input ordering.

use crate::error::{Error, Result};
use crate::math::{
    compensated_sum, integrate, sigmoid, softplus, DEFAULT_QUAD_TOL, LOG_ODDS_TRUNC,
};
use crate::psr::{cost_integral_from_log_odds, cost_log_odds, Hypothesis, RuleParams};
use crate::weighting::{ln_r_tau, ln_w_beta, ImpulseWeighting, WeightParams};

/// Immutable target / non-target value collections (raw scores or LLRs,
/// depending on context).
///
/// Both classes must be nonempty — the empty-class domain error every
/// downstream operation would otherwise raise is rejected here, once.
/// Values may be infinite (costs extend continuously) but never NaN.
#[derive(Debug, Clone)]
pub struct TrialSet {
    tar: Vec<f64>,
    non: Vec<f64>,
}

impl TrialSet {
    pub fn new(tar: Vec<f64>, non: Vec<f64>) -> Result<Self> {
        if tar.is_empty() || non.is_empty() {
            return Err(Error::domain(format!(
                "both trial classes must be nonempty (got {} target, {} non-target)",
                tar.len(),
                non.len()
            )));
        }
        if tar.iter().chain(non.iter()).any(|v| v.is_nan()) {
            return Err(Error::domain("trial values must not be NaN"));
        }
        Ok(TrialSet { tar, non })
    }

    pub fn tar(&self) -> &[f64] {
        &self.tar
    }

    pub fn non(&self) -> &[f64] {
        &self.non
    }

    pub fn n_tar(&self) -> usize {
        self.tar.len()
    }

    pub fn n_non(&self) -> usize {
        self.non.len()
    }

    /// Apply `f` to every value, preserving class and order.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> TrialSet {
        TrialSet {
            tar: self.tar.iter().map(|&v| f(v)).collect(),
            non: self.non.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Rule shape plus prior log odds: everything that selects one objective
/// from the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams {
    rule: RuleParams,
    tau: f64,
}

impl ObjectiveParams {
    pub fn new(rule: RuleParams, tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::domain(format!("tau must be finite, got {tau}")));
        }
        Ok(ObjectiveParams { rule, tau })
    }

    pub fn rule(&self) -> &RuleParams {
        &self.rule
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The synthetic target prior `pi = sigma(tau)`.
    pub fn prior(&self) -> f64 {
        sigmoid(self.tau)
    }

    /// The matching threshold-weighting parameters.
    pub fn weighting(&self) -> WeightParams {
        WeightParams::new(self.rule.alpha(), self.rule.beta(), self.tau)
            .expect("validated at construction")
    }
}

/// Prior-weighted expected cost over LLRs:
/// `(pi/T) sum C*(q_i, tar) + ((1-pi)/N) sum C*(q_i, non)` with
/// `q_i = sigma(llr_i + tau)`.
///
/// Closed-form shapes evaluate directly; any other shape goes through
/// the per-trial quadrature route. A diverging trial (for example
/// `llr = -inf` under the logarithmic rule) yields `+inf`, not an error.
pub fn expected_cost(params: &ObjectiveParams, llrs: &TrialSet) -> Result<f64> {
    let tau = params.tau;
    match params.rule.closed_form() {
        Some(rule) => {
            let tar_sum = compensated_sum(
                llrs.tar.iter().map(|&l| cost_log_odds(rule, l + tau, Hypothesis::Target)),
            );
            let non_sum = compensated_sum(
                llrs.non.iter().map(|&l| cost_log_odds(rule, l + tau, Hypothesis::NonTarget)),
            );
            Ok(mix(params, llrs, tar_sum, non_sum))
        }
        None => {
            let mut tar_costs = Vec::with_capacity(llrs.n_tar());
            for &l in &llrs.tar {
                tar_costs.push(cost_integral_from_log_odds(
                    &params.rule,
                    l + tau,
                    Hypothesis::Target,
                    DEFAULT_QUAD_TOL,
                )?);
            }
            let mut non_costs = Vec::with_capacity(llrs.n_non());
            for &l in &llrs.non {
                non_costs.push(cost_integral_from_log_odds(
                    &params.rule,
                    l + tau,
                    Hypothesis::NonTarget,
                    DEFAULT_QUAD_TOL,
                )?);
            }
            let tar_sum = compensated_sum(tar_costs);
            let non_sum = compensated_sum(non_costs);
            Ok(mix(params, llrs, tar_sum, non_sum))
        }
    }
}

fn mix(params: &ObjectiveParams, llrs: &TrialSet, tar_sum: f64, non_sum: f64) -> f64 {
    let pi = params.prior();
    pi * (tar_sum / llrs.n_tar() as f64) + (1.0 - pi) * (non_sum / llrs.n_non() as f64)
}

/// Per-trial partial derivatives of [`expected_cost`] with respect to
/// each LLR, split by class.
#[derive(Debug, Clone)]
pub struct TrialGradient {
    pub tar: Vec<f64>,
    pub non: Vec<f64>,
}

/// Gradient of the expected cost in the LLR domain.
///
/// Uses the threshold-integral form of the objective, whose derivative
/// is simply the integrand at the trial's LLR:
/// `-(1/T)(1+e^{-l}) r_tau(l) w(l+tau)` for targets and
/// `+(1/N)(1+e^{l}) r_tau(l) w(l+tau)` for non-targets. This covers
/// every positive shape, closed form or not, with no quadrature.
pub fn expected_cost_grad(params: &ObjectiveParams, llrs: &TrialSet) -> Result<TrialGradient> {
    if llrs.tar.iter().chain(llrs.non.iter()).any(|v| !v.is_finite()) {
        return Err(Error::domain(
            "gradient requires finite LLRs (the cost itself extends to +/-inf, its slope does not)",
        ));
    }
    let (alpha, beta, tau) = (params.rule.alpha(), params.rule.beta(), params.tau);
    let t_scale = 1.0 / llrs.n_tar() as f64;
    let n_scale = 1.0 / llrs.n_non() as f64;
    let tar = llrs
        .tar
        .iter()
        .map(|&l| -t_scale * (softplus(-l) + ln_r_tau(tau, l) + ln_w_beta(alpha, beta, l + tau)).exp())
        .collect();
    let non = llrs
        .non
        .iter()
        .map(|&l| n_scale * (softplus(l) + ln_r_tau(tau, l) + ln_w_beta(alpha, beta, l + tau)).exp())
        .collect();
    Ok(TrialGradient { tar, non })
}

/// Expected cost in its threshold-weighting form: per-trial integrals of
/// `(1+e^{-t})` / `(1+e^{t})` against the normalized weighting, averaged
/// without prior factors. Satisfies
/// `expected_cost = Z * expected_cost_omega` up to quadrature error.
pub fn expected_cost_omega(params: &ObjectiveParams, llrs: &TrialSet, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    let w = crate::weighting::Omega::new(params.weighting())?;
    let (alpha, beta, tau) = (params.rule.alpha(), params.rule.beta(), params.tau);
    let ln_z = w.normalizer().ln();
    let upper = LOG_ODDS_TRUNC - tau;
    let lower = -LOG_ODDS_TRUNC - tau;

    let mut tar_costs = Vec::with_capacity(llrs.n_tar());
    for &l in &llrs.tar {
        let c = if l >= upper {
            0.0
        } else if l == f64::NEG_INFINITY {
            if alpha <= 1.0 {
                f64::INFINITY
            } else {
                integrate(
                    |t| (softplus(-t) + ln_r_tau(tau, t) + ln_w_beta(alpha, beta, t + tau) - ln_z).exp(),
                    lower,
                    upper,
                    tol,
                )?
            }
        } else {
            integrate(
                |t| (softplus(-t) + ln_r_tau(tau, t) + ln_w_beta(alpha, beta, t + tau) - ln_z).exp(),
                l,
                upper,
                tol,
            )?
        };
        tar_costs.push(c);
    }
    let mut non_costs = Vec::with_capacity(llrs.n_non());
    for &l in &llrs.non {
        let c = if l <= lower {
            0.0
        } else if l == f64::INFINITY {
            if beta <= 1.0 {
                f64::INFINITY
            } else {
                integrate(
                    |t| (softplus(t) + ln_r_tau(tau, t) + ln_w_beta(alpha, beta, t + tau) - ln_z).exp(),
                    lower,
                    upper,
                    tol,
                )?
            }
        } else {
            integrate(
                |t| (softplus(t) + ln_r_tau(tau, t) + ln_w_beta(alpha, beta, t + tau) - ln_z).exp(),
                lower,
                l,
                tol,
            )?
        };
        non_costs.push(c);
    }
    let tar_sum = compensated_sum(tar_costs);
    let non_sum = compensated_sum(non_costs);
    Ok(tar_sum / llrs.n_tar() as f64 + non_sum / llrs.n_non() as f64)
}

/// Exact expected cost under a discrete mixture of single-threshold
/// applications: pure counting, no quadrature.
///
/// Each impulse at `theta` is a simple accept/reject application with
/// `C_miss = 1+e^{-theta}` and `C_fa = 1+e^{theta}`. A trial with
/// `llr = theta` is rejected: a miss if it was a target, no false alarm
/// otherwise.
pub fn impulse_expected_cost(weights: &ImpulseWeighting, llrs: &TrialSet) -> f64 {
    let t_count = llrs.n_tar() as f64;
    let n_count = llrs.n_non() as f64;
    compensated_sum(
        weights
            .thresholds()
            .iter()
            .zip(weights.weights())
            .map(|(&theta, &w)| {
                let misses = llrs.tar.iter().filter(|&&l| l <= theta).count() as f64;
                let fas = llrs.non.iter().filter(|&&l| l > theta).count() as f64;
                w * ((1.0 + (-theta).exp()) * misses / t_count
                    + (1.0 + theta.exp()) * fas / n_count)
            }),
    )
}
