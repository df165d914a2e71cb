//! Numerical primitives shared across the crate: stable logistic-family
//! functions, log-gamma/log-beta, compensated summation, and an adaptive
//! Simpson integrator.
//!
//! Everything here is deterministic and allocation-free; the cost and
//! weighting modules lean on these to stay finite for arguments far out
//! in the tails.

use crate::error::{Error, Result};

/// Truncation of the log-odds axis for quadrature. The weighting
/// integrands decay at least like `e^{-min(alpha,beta)|t|}`, so for the
/// shapes this crate targets the discarded tails are far below the
/// default tolerance.
pub const LOG_ODDS_TRUNC: f64 = 50.0;

/// Default absolute tolerance for adaptive quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;

/// Logistic sigmoid `1 / (1 + e^{-x})`, stable in both tails.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow for large `x` or cancellation for small.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln sigmoid(x) = -softplus(-x)`.
#[inline]
pub fn ln_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// Log odds `ln(q / (1-q))`. Maps 0 to -inf and 1 to +inf.
#[inline]
pub fn logit(q: f64) -> f64 {
    q.ln() - (-q).ln_1p()
}

/// Log-gamma via the Lanczos approximation (g = 7, 9 coefficients),
/// accurate to ~1e-15 relative over the positive axis.
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    const PI: f64 = std::f64::consts::PI;

    if x < 0.5 {
        // Reflection formula keeps the series argument above 0.5.
        PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = COEFFS[0];
        for (i, &c) in COEFFS[1..].iter().enumerate() {
            acc += c / (x + (i as f64) + 1.0);
        }
        let t = x + 7.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Log of the beta function `B(a, b)`.
#[inline]
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Neumaier-compensated sum in the iteration order. Used wherever the
/// objective contract requires a deterministic, order-fixed reduction.
/// Infinite summands (diverging rule costs) propagate as the plain sum
/// would; compensation only applies to finite partials.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if t.is_finite() {
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
        }
        sum = t;
    }
    if sum.is_finite() {
        sum + comp
    } else {
        sum
    }
}

const INITIAL_PANELS: usize = 32;
const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute
/// tolerance `tol`.
///
/// The interval is pre-split into fixed panels so a sharply peaked
/// integrand cannot hide between coarse sample points, then each panel
/// is refined recursively with Richardson acceptance. Fails with a
/// numeric error if the estimated error still exceeds `tol` once the
/// depth limit is reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::domain(format!(
            "integration range [{a}, {b}] must be finite and increasing"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("integration tolerance must be positive"));
    }

    let panel_tol = tol / INITIAL_PANELS as f64;
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    let mut err_estimate = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + i as f64 * width;
        let hi = if i == INITIAL_PANELS - 1 { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let s = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_adapt(
            &f,
            lo,
            mid,
            hi,
            flo,
            fmid,
            fhi,
            s,
            panel_tol,
            MAX_DEPTH,
            &mut err_estimate,
        );
    }
    if !total.is_finite() {
        return Err(Error::numeric("integrand produced a non-finite value"));
    }
    if err_estimate > tol {
        return Err(Error::numeric(format!(
            "quadrature did not converge: estimated error {err_estimate:.3e} > tol {tol:.3e}"
        )));
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    s: f64,
    tol: f64,
    depth: u32,
    err_estimate: &mut f64,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let s_left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let s_right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let s2 = s_left + s_right;
    let delta = s2 - s;
    if depth == 0 {
        *err_estimate += delta.abs() / 15.0;
        return s2 + delta / 15.0;
    }
    if delta.abs() <= 15.0 * tol {
        return s2 + delta / 15.0;
    }
    simpson_adapt(f, a, lm, m, fa, flm, fm, s_left, 0.5 * tol, depth - 1, err_estimate)
        + simpson_adapt(f, m, rm, b, fm, frm, fb, s_right, 0.5 * tol, depth - 1, err_estimate)
}
