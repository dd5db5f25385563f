use serde::{Deserialize, Serialize};

use super::{check_threshold, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop once the Euclidean norm of the full gradient is at or below this.
    pub grad_tol: f64,
    pub threshold: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2_lambda: 1e-4,
            max_iters: 500,
            grad_tol: 1e-6,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
    pub threshold: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

impl LogisticModel {
    /// The untrained model: all weights and the bias zero.
    pub fn zeros(dim: usize) -> Self {
        LogisticModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            l2_lambda: 0.0,
            threshold: DEFAULT_THRESHOLD,
            iterations: 0,
            grad_norm: f64::NAN,
            converged: false,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<(f64, bool)> {
        logistic_predict(self, x)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn check_shapes(x: &Matrix, labels: &[bool], weights: &[f64]) -> Result<()> {
    if labels.len() != x.rows() {
        return Err(Error::LengthMismatch {
            expected: x.rows(),
            got: labels.len(),
        });
    }
    if weights.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            got: weights.len(),
        });
    }
    Ok(())
}

/// Mean negative log-likelihood plus `λ/2 ‖w‖²` (the bias is not penalized).
pub fn logistic_objective(x: &Matrix, labels: &[bool], weights: &[f64], bias: f64, l2_lambda: f64) -> Result<f64> {
    check_shapes(x, labels, weights)?;
    Ok(objective(x, labels, weights, bias, l2_lambda))
}

/// Gradient of [`logistic_objective`] as `(∂/∂w, ∂/∂b)`.
pub fn logistic_gradient(
    x: &Matrix,
    labels: &[bool],
    weights: &[f64],
    bias: f64,
    l2_lambda: f64,
) -> Result<(Vec<f64>, f64)> {
    check_shapes(x, labels, weights)?;
    Ok(gradient(x, labels, weights, bias, l2_lambda))
}

fn objective(x: &Matrix, labels: &[bool], w: &[f64], b: f64, lambda: f64) -> f64 {
    let nll: f64 = x
        .iter_rows()
        .zip(labels)
        .map(|(row, &y)| {
            let z = dot(row, w) + b;
            softplus(z) - if y { z } else { 0.0 }
        })
        .sum();
    nll / x.rows() as f64 + 0.5 * lambda * dot(w, w)
}

fn gradient(x: &Matrix, labels: &[bool], w: &[f64], b: f64, lambda: f64) -> (Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, &y) in x.iter_rows().zip(labels) {
        let r = sigmoid(dot(row, w) + b) - f64::from(u8::from(y));
        gb += r;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
    }
    for (g, wj) in gw.iter_mut().zip(w) {
        *g = *g / n + lambda * wj;
    }
    (gw, gb / n)
}

/// Hessian of the objective over (w, b), row-major (d+1)².
fn hessian(x: &Matrix, w: &[f64], b: f64, lambda: f64) -> Vec<f64> {
    let d = w.len();
    let p = d + 1;
    let n = x.rows() as f64;
    let mut h = vec![0.0; p * p];
    let mut aug = vec![1.0; p];
    for row in x.iter_rows() {
        let s = sigmoid(dot(row, w) + b);
        let c = s * (1.0 - s);
        if c == 0.0 {
            continue;
        }
        aug[..d].copy_from_slice(row);
        // upper triangle only; mirrored below
        for i in 0..p {
            let ci = c * aug[i];
            if ci == 0.0 {
                continue;
            }
            let hrow = &mut h[i * p..(i + 1) * p];
            for j in i..p {
                hrow[j] += ci * aug[j];
            }
        }
    }
    for i in 0..p {
        for j in i..p {
            h[i * p + j] /= n;
            h[j * p + i] = h[i * p + j];
        }
    }
    for i in 0..d {
        h[i * p + i] += lambda;
    }
    h
}

/// Solves `a x = rhs` for symmetric positive definite `a` (row-major p×p).
fn cholesky_solve(a: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let p = rhs.len();
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = (0..j).map(|t| l[i * p + t] * l[j * p + t]).sum();
            if i == j {
                let v = a[i * p + i] - s;
                if !(v > 0.0) || !v.is_finite() {
                    return None;
                }
                l[i * p + i] = v.sqrt();
            } else {
                l[i * p + j] = (a[i * p + j] - s) / l[j * p + j];
            }
        }
    }
    let mut y = vec![0.0; p];
    for i in 0..p {
        let s: f64 = (0..i).map(|t| l[i * p + t] * y[t]).sum();
        y[i] = (rhs[i] - s) / l[i * p + i];
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|t| l[t * p + i] * x[t]).sum();
        x[i] = (y[i] - s) / l[i * p + i];
    }
    Some(x)
}

/// Fits weights and bias by damped Newton iterations with an Armijo
/// backtracking line search, falling back to steepest descent whenever the
/// Newton system is not numerically positive definite.
pub fn logistic_fit(x: &Matrix, labels: &[bool], cfg: &LogisticConfig) -> Result<LogisticModel> {
    check_threshold(cfg.threshold)?;
    if !(cfg.l2_lambda >= 0.0 && cfg.l2_lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("l2_lambda must be non-negative, got {}", cfg.l2_lambda)));
    }
    if labels.len() != x.rows() {
        return Err(Error::LengthMismatch {
            expected: x.rows(),
            got: labels.len(),
        });
    }
    if x.rows() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: x.rows() });
    }
    if labels.iter().all(|&y| y) || labels.iter().all(|&y| !y) {
        return Err(Error::DegenerateLabels("only one class present".into()));
    }

    let d = x.cols();
    let lambda = cfg.l2_lambda;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut f = objective(x, labels, &w, b, lambda);
    let mut iterations = 0;
    let mut grad_norm;
    loop {
        let (gw, gb) = gradient(x, labels, &w, b, lambda);
        let g: Vec<f64> = gw.into_iter().chain(std::iter::once(gb)).collect();
        grad_norm = dot(&g, &g).sqrt();
        if grad_norm <= cfg.grad_tol || iterations >= cfg.max_iters {
            break;
        }
        iterations += 1;

        let h = hessian(x, &w, b, lambda);
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut dir = cholesky_solve(&h, &neg_g).unwrap_or_else(|| neg_g.clone());
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            dir = neg_g;
            slope = -grad_norm * grad_norm;
        }

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_new: Vec<f64> = w.iter().zip(&dir).map(|(wi, di)| wi + t * di).collect();
            let b_new = b + t * dir[d];
            let f_new = objective(x, labels, &w_new, b_new, lambda);
            if f_new <= f + 1e-4 * t * slope {
                w = w_new;
                b = b_new;
                f = f_new;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no representable decrease left along the search direction
            break;
        }
    }

    if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
        return Err(Error::DegenerateData("logistic fit diverged".into()));
    }
    Ok(LogisticModel {
        weights: w,
        bias: b,
        l2_lambda: lambda,
        threshold: cfg.threshold,
        iterations,
        grad_norm,
        converged: grad_norm <= cfg.grad_tol,
    })
}

pub fn logistic_predict(m: &LogisticModel, x: &[f64]) -> Result<(f64, bool)> {
    if x.len() != m.weights.len() {
        return Err(Error::DimensionMismatch {
            expected: m.weights.len(),
            got: x.len(),
        });
    }
    let p = sigmoid(dot(&m.weights, x) + m.bias);
    Ok((p, p >= m.threshold))
}
