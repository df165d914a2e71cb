//! Binary proper scoring rules: the two-parameter (alpha, beta) family,
//! with closed forms for the four classic members and an adaptive
//! quadrature route for arbitrary shapes.
//!
//! A rule scores a posterior probability `q` against the true hypothesis.
//! The shape parameters control how the implied mixture of detection
//! applications weights low versus high decision thresholds: `alpha`
//! governs the left tail, `beta` the right.

use crate::error::{Error, Result};
use crate::math::{
    integrate, ln_beta, logit, sigmoid, softplus, DEFAULT_QUAD_TOL, LOG_ODDS_TRUNC,
};

/// Trial ground truth: the designated target speaker spoke, or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    Target,
    NonTarget,
}

/// Shape of a proper scoring rule in the (alpha, beta) family.
/// Both parameters must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    alpha: f64,
    beta: f64,
}

impl RuleParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "rule shape parameters must be positive and finite, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(RuleParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The closed-form member these parameters select, if any.
    pub fn closed_form(&self) -> Option<ClosedFormRule> {
        match (self.alpha, self.beta) {
            (a, b) if a == 0.5 && b == 0.5 => Some(ClosedFormRule::Boosting),
            (a, b) if a == 1.0 && b == 1.0 => Some(ClosedFormRule::Logarithmic),
            (a, b) if a == 2.0 && b == 2.0 => Some(ClosedFormRule::Brier),
            (a, b) if a == 2.0 && b == 1.0 => Some(ClosedFormRule::Asymmetric),
            _ => None,
        }
    }
}

/// The four members of the family with printed closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormRule {
    /// (1/2, 1/2): thick-tailed, outlier sensitive.
    Boosting,
    /// (1, 1): the logistic-regression objective.
    Logarithmic,
    /// (2, 2): quadratic, thin tails.
    Brier,
    /// (2, 1): thin left tail, logarithmic right tail.
    Asymmetric,
}

impl ClosedFormRule {
    pub fn params(self) -> RuleParams {
        let (alpha, beta) = match self {
            ClosedFormRule::Boosting => (0.5, 0.5),
            ClosedFormRule::Logarithmic => (1.0, 1.0),
            ClosedFormRule::Brier => (2.0, 2.0),
            ClosedFormRule::Asymmetric => (2.0, 1.0),
        };
        RuleParams { alpha, beta }
    }
}

const FRAC_2_PI: f64 = 2.0 / std::f64::consts::PI;

fn check_probability(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("q={q} is not a probability in [0, 1]")));
    }
    Ok(())
}

/// Rule cost `C*(q, h)` with normalization `k0 = 1`, `k1 = k2 = 0`.
///
/// Uses the printed closed form when the shape matches one of the four
/// classic members, and falls back to quadrature of the canonical
/// integral otherwise. At `q` of 0 or 1 the continuous extension is
/// returned; on a diverging side that is `+inf`, which is distinct from
/// the domain error raised for `q` outside `[0, 1]`.
pub fn rule_cost(params: &RuleParams, q: f64, h: Hypothesis) -> Result<f64> {
    check_probability(q)?;
    match params.closed_form() {
        Some(rule) => Ok(closed_form_cost(rule, q, h)),
        None => rule_cost_quadrature(params, q, h, DEFAULT_QUAD_TOL),
    }
}

fn closed_form_cost(rule: ClosedFormRule, q: f64, h: Hypothesis) -> f64 {
    match (rule, h) {
        (ClosedFormRule::Boosting, Hypothesis::Target) => FRAC_2_PI * ((1.0 - q) / q).sqrt(),
        (ClosedFormRule::Boosting, Hypothesis::NonTarget) => FRAC_2_PI * (q / (1.0 - q)).sqrt(),
        (ClosedFormRule::Logarithmic, Hypothesis::Target) => -q.ln(),
        (ClosedFormRule::Logarithmic, Hypothesis::NonTarget) => -(-q).ln_1p(),
        (ClosedFormRule::Brier, Hypothesis::Target) => 3.0 * (1.0 - q) * (1.0 - q),
        (ClosedFormRule::Brier, Hypothesis::NonTarget) => 3.0 * q * q,
        (ClosedFormRule::Asymmetric, Hypothesis::Target) => 2.0 * (1.0 - q),
        (ClosedFormRule::Asymmetric, Hypothesis::NonTarget) => -2.0 * (-q).ln_1p() - 2.0 * q,
    }
}

/// Derivative `dC*/dq` for the closed-form members.
///
/// Strictly negative for target trials and strictly positive for
/// non-target trials on the open interval. Shapes without a closed form
/// are rejected.
pub fn rule_cost_dq(params: &RuleParams, q: f64, h: Hypothesis) -> Result<f64> {
    check_probability(q)?;
    let rule = params.closed_form().ok_or_else(|| {
        Error::domain(format!(
            "analytic dC/dq requires a closed-form shape, got alpha={}, beta={}",
            params.alpha, params.beta
        ))
    })?;
    Ok(match (rule, h) {
        (ClosedFormRule::Boosting, Hypothesis::Target) => {
            -(1.0 / std::f64::consts::PI) / (q.powf(1.5) * (1.0 - q).sqrt())
        }
        (ClosedFormRule::Boosting, Hypothesis::NonTarget) => {
            (1.0 / std::f64::consts::PI) / ((1.0 - q).powf(1.5) * q.sqrt())
        }
        (ClosedFormRule::Logarithmic, Hypothesis::Target) => -1.0 / q,
        (ClosedFormRule::Logarithmic, Hypothesis::NonTarget) => 1.0 / (1.0 - q),
        (ClosedFormRule::Brier, Hypothesis::Target) => -6.0 * (1.0 - q),
        (ClosedFormRule::Brier, Hypothesis::NonTarget) => 6.0 * q,
        (ClosedFormRule::Asymmetric, Hypothesis::Target) => -2.0,
        (ClosedFormRule::Asymmetric, Hypothesis::NonTarget) => 2.0 * q / (1.0 - q),
    })
}

/// Rule cost by adaptive quadrature of the canonical threshold integral,
/// usable for any positive (alpha, beta).
///
/// For the closed-form members this is the independent numeric route the
/// closed forms are checked against. The integrand is evaluated in log
/// space and the log-odds axis is truncated at `LOG_ODDS_TRUNC`.
pub fn rule_cost_quadrature(
    params: &RuleParams,
    q: f64,
    h: Hypothesis,
    tol: f64,
) -> Result<f64> {
    check_probability(q)?;
    if !(tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    cost_integral_from_log_odds(params, logit(q), h, tol)
}

/// Canonical-integral cost as a function of the posterior log odds
/// `x = logit(q)`. Infinite `x` selects the continuous extension.
pub(crate) fn cost_integral_from_log_odds(
    params: &RuleParams,
    x: f64,
    h: Hypothesis,
    tol: f64,
) -> Result<f64> {
    let (alpha, beta) = (params.alpha, params.beta);
    let lb = ln_beta(alpha, beta);
    match h {
        Hypothesis::Target => {
            // integral of (1 + e^{-t}) w(t) over t in [x, inf)
            if x >= LOG_ODDS_TRUNC {
                return Ok(0.0);
            }
            let lo = if x == f64::NEG_INFINITY {
                // Converges at -inf only when the left tail is thin enough.
                if alpha <= 1.0 {
                    return Ok(f64::INFINITY);
                }
                -LOG_ODDS_TRUNC
            } else {
                x
            };
            integrate(
                |t| ((1.0 - alpha) * softplus(-t) - beta * softplus(t) - lb).exp(),
                lo,
                LOG_ODDS_TRUNC,
                tol,
            )
        }
        Hypothesis::NonTarget => {
            // integral of (1 + e^{t}) w(t) over t in (-inf, x]
            if x <= -LOG_ODDS_TRUNC {
                return Ok(0.0);
            }
            let hi = if x == f64::INFINITY {
                if beta <= 1.0 {
                    return Ok(f64::INFINITY);
                }
                LOG_ODDS_TRUNC
            } else {
                x
            };
            integrate(
                |t| ((1.0 - beta) * softplus(t) - alpha * softplus(-t) - lb).exp(),
                -LOG_ODDS_TRUNC,
                hi,
                tol,
            )
        }
    }
}

/// Closed-form rule cost as a function of the posterior log odds
/// `x = logit(q)`, organized so that nothing overflows before it must.
///
/// This is the evaluation route the objective module uses; it never
/// forms `q` and takes logs, so it stays accurate for `|x|` far beyond
/// where `sigma(x)` saturates.
pub fn cost_log_odds(rule: ClosedFormRule, x: f64, h: Hypothesis) -> f64 {
    match (rule, h) {
        (ClosedFormRule::Boosting, Hypothesis::Target) => FRAC_2_PI * (-0.5 * x).exp(),
        (ClosedFormRule::Boosting, Hypothesis::NonTarget) => FRAC_2_PI * (0.5 * x).exp(),
        (ClosedFormRule::Logarithmic, Hypothesis::Target) => softplus(-x),
        (ClosedFormRule::Logarithmic, Hypothesis::NonTarget) => softplus(x),
        (ClosedFormRule::Brier, Hypothesis::Target) => {
            let s = sigmoid(-x);
            3.0 * s * s
        }
        (ClosedFormRule::Brier, Hypothesis::NonTarget) => {
            let s = sigmoid(x);
            3.0 * s * s
        }
        (ClosedFormRule::Asymmetric, Hypothesis::Target) => 2.0 * sigmoid(-x),
        (ClosedFormRule::Asymmetric, Hypothesis::NonTarget) => {
            2.0 * (softplus(x) - sigmoid(x))
        }
    }
}

/// Derivative of [`cost_log_odds`] with respect to `x`.
pub fn cost_log_odds_deriv(rule: ClosedFormRule, x: f64, h: Hypothesis) -> f64 {
    match (rule, h) {
        (ClosedFormRule::Boosting, Hypothesis::Target) => {
            -(0.5 * FRAC_2_PI) * (-0.5 * x).exp()
        }
        (ClosedFormRule::Boosting, Hypothesis::NonTarget) => {
            (0.5 * FRAC_2_PI) * (0.5 * x).exp()
        }
        (ClosedFormRule::Logarithmic, Hypothesis::Target) => -sigmoid(-x),
        (ClosedFormRule::Logarithmic, Hypothesis::NonTarget) => sigmoid(x),
        (ClosedFormRule::Brier, Hypothesis::Target) => {
            let s = sigmoid(-x);
            -6.0 * s * s * sigmoid(x)
        }
        (ClosedFormRule::Brier, Hypothesis::NonTarget) => {
            let s = sigmoid(x);
            6.0 * s * s * sigmoid(-x)
        }
        (ClosedFormRule::Asymmetric, Hypothesis::Target) => -2.0 * sigmoid(x) * sigmoid(-x),
        (ClosedFormRule::Asymmetric, Hypothesis::NonTarget) => {
            let s = sigmoid(x);
            2.0 * s * s
        }
    }
}

/// The four closed-form members, in (alpha, beta) order of appearance.
pub const ALL_RULES: [ClosedFormRule; 4] = [
    ClosedFormRule::Boosting,
    ClosedFormRule::Logarithmic,
    ClosedFormRule::Brier,
    ClosedFormRule::Asymmetric,
];
