//! Dense BFGS with a backtracking line search.
//!
//! Small-dimension quasi-Newton minimizer in the style of Nocedal &
//! Wright: inverse-Hessian update, Armijo sufficient decrease, and a
//! curvature guard that skips updates which would break positive
//! definiteness. Non-finite objective values during the line search are
//! handled by step shrinkage.

use crate::error::{Error, Result};

const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    /// True when the gradient infinity norm reached `grad_tol`.
    pub converged: bool,
}

impl MinimizeResult {
    pub fn grad_inf_norm(&self) -> f64 {
        inf_norm(&self.gradient)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `f` starting from `x0`. `f` returns the value and gradient.
///
/// Stops when the gradient infinity norm drops to `grad_tol`, after
/// `max_iters` accepted steps, or when no step decreases the objective
/// beyond rounding noise; the accepted objective sequence is
/// non-increasing in every case. Errors only if no finite step exists
/// along a search direction.
pub fn minimize<F>(mut f: F, x0: &[f64], grad_tol: f64, max_iters: usize) -> Result<MinimizeResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    if !(grad_tol > 0.0) {
        return Err(Error::domain("grad_tol must be positive"));
    }
    if max_iters == 0 {
        return Err(Error::domain("max_iters must be at least 1"));
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric(
            "objective or gradient not finite at the initial point",
        ));
    }

    // Inverse Hessian approximation, row-major identity to start.
    let mut h = identity(n);
    let mut first_update = true;
    let mut iterations = 0;

    while iterations < max_iters {
        if inf_norm(&g) <= grad_tol {
            return Ok(MinimizeResult { x, value: fx, gradient: g, iterations, converged: true });
        }

        let mut dir = neg_mat_vec(&h, &g);
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) || !slope.is_finite() {
            // Curvature information went bad; restart from steepest descent.
            h = identity(n);
            first_update = true;
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        // Backtracking until the Armijo condition holds on a finite value.
        let mut step = 1.0;
        let mut saw_finite = false;
        let search = loop {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            saw_finite |= ft.is_finite();
            if ft.is_finite() && ft <= fx + ARMIJO_C1 * step * slope {
                break Some((trial, ft, gt));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let (x_new, f_new, g_new) = match search {
            Some(accepted) => accepted,
            None if !saw_finite => {
                return Err(Error::numeric(
                    "line search failed: no finite step exists along the search direction",
                ));
            }
            None => {
                // Finite steps exist but none decreases beyond rounding
                // noise: we are at the numerical floor. Stop here.
                break;
            }
        };

        let s: Vec<f64> = x.iter().zip(&x_new).map(|(a, b)| b - a).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| b - a).collect();
        let sy = dot(&s, &y);
        let s_norm = dot(&s, &s).sqrt();
        let y_norm = dot(&y, &y).sqrt();
        if sy > 1e-10 * s_norm * y_norm && y.iter().all(|v| v.is_finite()) {
            if first_update {
                // Scale the seed matrix before the first update (N&W 6.20).
                let gamma = sy / dot(&y, &y);
                h = identity(n);
                for v in h.iter_mut() {
                    *v *= gamma;
                }
                first_update = false;
            }
            bfgs_update(&mut h, &s, &y, sy);
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        iterations += 1;
    }

    let converged = inf_norm(&g) <= grad_tol;
    Ok(MinimizeResult { x, value: fx, gradient: g, iterations, converged })
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn neg_mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| -(0..n).map(|j| m[i * n + j] * v[j]).sum::<f64>())
        .collect()
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T` with `rho = 1/sy`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    // hy = H y, yhy = y^T H y
    let hy: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum::<f64>())
        .collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_bowl() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0] - 3.0, x[1] + 1.0);
            (a * a + 10.0 * b * b, vec![2.0 * a, 20.0 * b])
        };
        let r = minimize(f, &[0.0, 0.0], 1e-10, 100).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-8);
        assert!((r.x[1] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (v, g)
        };
        let r = minimize(f, &[-1.2, 1.0], 1e-8, 500).unwrap();
        assert!(r.converged, "iters={} grad={}", r.iterations, r.grad_inf_norm());
        assert!((r.x[0] - 1.0).abs() < 1e-6);
        assert!((r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn final_value_never_exceeds_initial() {
        let f = |x: &[f64]| {
            let v = x[0].powi(4) + (x[1] - 2.0).powi(2) + x[0] * x[1] * 0.1;
            (v, vec![4.0 * x[0].powi(3) + 0.1 * x[1], 2.0 * (x[1] - 2.0) + 0.1 * x[0]])
        };
        let x0 = [2.0, -2.0];
        let f0 = f(&x0).0;
        let r = minimize(f, &x0, 1e-8, 200).unwrap();
        assert!(r.value <= f0);
    }

    #[test]
    fn shrinks_through_non_finite_regions() {
        // Objective explodes for |x| > 2; the line search must recover.
        let f = |x: &[f64]| {
            if x[0].abs() > 2.0 {
                (f64::INFINITY, vec![f64::NAN])
            } else {
                ((x[0] - 1.9).powi(2), vec![2.0 * (x[0] - 1.9)])
            }
        };
        let r = minimize(f, &[-1.5], 1e-10, 200).unwrap();
        assert!((r.x[0] - 1.9).abs() < 1e-7);
    }

    #[test]
    fn errors_on_non_finite_start() {
        let f = |_: &[f64]| (f64::NAN, vec![0.0]);
        assert!(minimize(f, &[0.0], 1e-8, 10).is_err());
    }

    #[test]
    fn respects_max_iters() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (v, g)
        };
        let r = minimize(f, &[-1.2, 1.0], 1e-12, 3).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
