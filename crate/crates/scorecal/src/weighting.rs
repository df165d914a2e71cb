//! Threshold weightings: which decision thresholds an objective cares
//! about.
//!
//! Every member of the (alpha, beta, tau) family corresponds to a
//! normalized density over log-likelihood-ratio thresholds. This module
//! evaluates that density — the log-odds beta density `w`, the prior
//! modulation factor `r`, their normalized product — and exports sampled
//! grids for plotting. Discrete mixtures of single-threshold
//! applications are covered by [`ImpulseWeighting`].

use crate::error::{Error, Result};
use crate::math::{
    compensated_sum, integrate, ln_beta, sigmoid, softplus, LOG_ODDS_TRUNC,
};

/// Internal quadrature tolerance for the normalizer. Tighter than the
/// crate default because pointwise density comparisons at 1e-9 inherit
/// the relative error of Z.
const Z_TOL: f64 = 1e-10;

/// Parameters selecting one threshold weighting from the family:
/// rule shape (alpha, beta) plus prior log odds tau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    alpha: f64,
    beta: f64,
    tau: f64,
}

impl WeightParams {
    pub fn new(alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "weighting shape parameters must be positive and finite, got alpha={alpha}, beta={beta}"
            )));
        }
        if !tau.is_finite() {
            return Err(Error::domain(format!("tau must be finite, got {tau}")));
        }
        Ok(WeightParams { alpha, beta, tau })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Prior modulation factor `r_tau(t) = (1+e^{t+tau}) / ((1+e^t)(1+e^tau))`.
///
/// Computed as the raised and scaled sigmoid
/// `sigma(-tau) + (sigma(tau) - sigma(-tau)) sigma(t)`, which is
/// algebraically identical, stable for all finite inputs, and exactly
/// 1/2 when `tau` is zero.
pub fn r_tau(tau: f64, t: f64) -> f64 {
    let lo = sigmoid(-tau);
    let hi = sigmoid(tau);
    lo + (hi - lo) * sigmoid(t)
}

/// `ln r_tau`, for integrands assembled in log space.
pub(crate) fn ln_r_tau(tau: f64, t: f64) -> f64 {
    softplus(t + tau) - softplus(t) - softplus(tau)
}

/// Beta density transformed to the log-odds domain:
/// `sigma(t)^alpha sigma(-t)^beta / B(alpha, beta)`.
pub fn w_beta(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::domain(format!(
            "w_beta requires positive shapes, got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(ln_w_beta(alpha, beta, t).exp())
}

pub(crate) fn ln_w_beta(alpha: f64, beta: f64, t: f64) -> f64 {
    -alpha * softplus(-t) - beta * softplus(t) - ln_beta(alpha, beta)
}

/// Normalizer `Z` of the weighting: the total mass of
/// `r_tau(t) w_{alpha,beta}(t + tau)` over the real line.
///
/// Always in (0, 1]; exactly 1/2 when tau = 0, where `r` is the constant
/// 1/2 and `w` integrates to one.
pub fn normalizer_z(params: &WeightParams, tol: f64) -> Result<f64> {
    let (alpha, beta, tau) = (params.alpha, params.beta, params.tau);
    // Substituting u = t + tau puts the decaying density at the origin.
    integrate(
        |u| (ln_r_tau(tau, u - tau) + ln_w_beta(alpha, beta, u)).exp(),
        -LOG_ODDS_TRUNC,
        LOG_ODDS_TRUNC,
        tol,
    )
}

/// A weighting from the family with its normalizer precomputed, for
/// repeated density evaluation. Immutable once built; safe to share
/// across threads.
#[derive(Debug, Clone)]
pub struct Omega {
    params: WeightParams,
    z: f64,
}

impl Omega {
    pub fn new(params: WeightParams) -> Result<Self> {
        let z = normalizer_z(&params, Z_TOL)?;
        Ok(Omega { params, z })
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn normalizer(&self) -> f64 {
        self.z
    }

    /// Density at threshold `t`.
    pub fn density(&self, t: f64) -> f64 {
        let p = &self.params;
        (ln_r_tau(p.tau, t) + ln_w_beta(p.alpha, p.beta, t + p.tau)).exp() / self.z
    }
}

/// Normalized threshold weighting at a single point. Convenience wrapper
/// that computes the normalizer on each call; use [`Omega`] for grids.
pub fn omega(params: &WeightParams, t: f64) -> Result<f64> {
    Ok(Omega::new(*params)?.density(t))
}

/// A sampled threshold weighting, ordered by threshold.
#[derive(Debug, Clone)]
pub struct WeightGrid {
    t: Vec<f64>,
    omega: Vec<f64>,
}

impl WeightGrid {
    /// Build a grid after checking the type's invariants: strictly
    /// increasing thresholds, nonnegative density, and at most unit mass
    /// under the trapezoid rule.
    pub fn new(t: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if t.len() != omega.len() || t.len() < 2 {
            return Err(Error::domain("weight grid needs >= 2 equal-length columns"));
        }
        if !t.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("grid thresholds must be strictly increasing"));
        }
        if omega.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::domain("grid weights must be nonnegative"));
        }
        let grid = WeightGrid { t, omega };
        let mass = grid.trapezoid_mass();
        if mass > 1.0 + 1e-6 {
            return Err(Error::domain(format!(
                "grid mass {mass} exceeds 1; not a (sub-)probability density"
            )));
        }
        Ok(grid)
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Trapezoid-rule mass over the sampled range.
    pub fn trapezoid_mass(&self) -> f64 {
        compensated_sum((1..self.t.len()).map(|i| {
            0.5 * (self.omega[i] + self.omega[i - 1]) * (self.t[i] - self.t[i - 1])
        }))
    }

    /// Threshold with the largest sampled weight.
    pub fn argmax(&self) -> f64 {
        let mut best = 0;
        for i in 1..self.omega.len() {
            if self.omega[i] > self.omega[best] {
                best = i;
            }
        }
        self.t[best]
    }
}

/// Default export range: covers the visible support of every shape this
/// crate plots plus the low-false-alarm operating thresholds.
pub const GRID_T_MIN: f64 = -15.0;
pub const GRID_T_MAX: f64 = 15.0;
pub const GRID_POINTS: usize = 3001;

/// Sample the normalized weighting uniformly over `[t_min, t_max]`.
pub fn omega_grid(params: &WeightParams, t_min: f64, t_max: f64, n: usize) -> Result<WeightGrid> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(Error::domain(format!(
            "grid range [{t_min}, {t_max}] must be finite and increasing"
        )));
    }
    if n < 2 {
        return Err(Error::domain("grid needs at least 2 points"));
    }
    let w = Omega::new(*params)?;
    let step = (t_max - t_min) / (n - 1) as f64;
    let t: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { t_max } else { t_min + i as f64 * step })
        .collect();
    let omega = t.iter().map(|&ti| w.density(ti)).collect();
    WeightGrid::new(t, omega)
}

/// A discrete mixture of single-threshold applications: thresholds
/// `theta_i` with positive weights.
#[derive(Debug, Clone)]
pub struct ImpulseWeighting {
    thresholds: Vec<f64>,
    weights: Vec<f64>,
}

impl ImpulseWeighting {
    pub fn new(thresholds: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if thresholds.len() != weights.len() || thresholds.is_empty() {
            return Err(Error::domain(
                "impulse weighting needs equal-length, nonempty threshold and weight lists",
            ));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("impulse thresholds must be finite"));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::domain("impulse weights must be positive and finite"));
        }
        Ok(ImpulseWeighting { thresholds, weights })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}
