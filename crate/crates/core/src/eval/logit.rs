//! Ridge-penalized logistic regression fit by damped Newton steps.
//!
//! Objective: mean negative log-likelihood plus `lambda * ||w||^2`; the
//! intercept is not penalized. Parameters are laid out `[intercept, w...]`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;

/// Linear predictors beyond this magnitude mean the unpenalized fit is
/// running off to infinity on separable data.
const SATURATION: f64 = 30.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogitOptions {
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LogitOptions {
    fn default() -> Self {
        LogitOptions {
            lambda: 1e-3,
            tolerance: 1e-6,
            max_iter: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Converged,
    /// Single-class labels: intercept-only model.
    Degenerate,
    /// Unpenalized fit on separable data; stopped early.
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogitModel {
    pub features: Vec<usize>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub status: FitStatus,
    /// Objective value before the first step and after each step.
    pub objective_trace: Vec<f64>,
}

/// Row-major design without the intercept column.
#[derive(Clone, Debug)]
pub struct Design {
    pub n: usize,
    pub d: usize,
    pub x: Vec<f64>,
}

impl Design {
    pub fn from_matrix(data: &FeatureMatrix, features: &[usize]) -> Design {
        let n = data.n_rows();
        let d = features.len();
        let mut x = Vec::with_capacity(n * d);
        for r in 0..n {
            x.extend(features.iter().map(|&f| data.value(r, f)));
        }
        Design { n, d, x }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Design {
        Design {
            n: rows.len(),
            d: rows.first().map_or(0, Vec::len),
            x: rows.concat(),
        }
    }

    #[inline]
    fn row(&self, r: usize) -> &[f64] {
        &self.x[r * self.d..(r + 1) * self.d]
    }

    fn eta(&self, r: usize, params: &[f64]) -> f64 {
        params[0] + self.row(r).iter().zip(&params[1..]).map(|(x, w)| x * w).sum::<f64>()
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn logit_objective(design: &Design, labels: &[u8], lambda: f64, params: &[f64]) -> f64 {
    let nll: f64 = (0..design.n)
        .map(|r| {
            let eta = design.eta(r, params);
            softplus(eta) - f64::from(labels[r]) * eta
        })
        .sum();
    nll / design.n as f64 + lambda * params[1..].iter().map(|w| w * w).sum::<f64>()
}

pub fn logit_gradient(design: &Design, labels: &[u8], lambda: f64, params: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; design.d + 1];
    for r in 0..design.n {
        let resid = sigmoid(design.eta(r, params)) - f64::from(labels[r]);
        g[0] += resid;
        for (gj, x) in g[1..].iter_mut().zip(design.row(r)) {
            *gj += resid * x;
        }
    }
    let n = design.n as f64;
    for v in g.iter_mut() {
        *v /= n;
    }
    for (gj, w) in g[1..].iter_mut().zip(&params[1..]) {
        *gj += 2.0 * lambda * w;
    }
    g
}

fn hessian(design: &Design, lambda: f64, params: &[f64]) -> Vec<f64> {
    let dim = design.d + 1;
    let mut h = vec![0.0; dim * dim];
    let mut z = vec![0.0; dim];
    for r in 0..design.n {
        let s = sigmoid(design.eta(r, params));
        let w = s * (1.0 - s);
        z[0] = 1.0;
        z[1..].copy_from_slice(design.row(r));
        for i in 0..dim {
            let wi = w * z[i];
            for j in 0..=i {
                h[i * dim + j] += wi * z[j];
            }
        }
    }
    let n = design.n as f64;
    for i in 0..dim {
        for j in 0..=i {
            h[i * dim + j] /= n;
            h[j * dim + i] = h[i * dim + j];
        }
    }
    for i in 1..dim {
        h[i * dim + i] += 2.0 * lambda;
    }
    h
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fits on the listed columns of `data`.
pub fn fit_logit(data: &FeatureMatrix, features: &[usize], options: &LogitOptions) -> Result<LogitModel> {
    let labels = data.labels()?;
    let design = Design::from_matrix(data, features);
    let mut model = fit_logit_design(&design, labels, options)?;
    model.features = features.to_vec();
    Ok(model)
}

pub fn fit_logit_design(design: &Design, labels: &[u8], options: &LogitOptions) -> Result<LogitModel> {
    if !(options.lambda >= 0.0) || !(options.tolerance > 0.0) {
        return Err(Error::InvalidConfig("lambda must be >= 0 and tolerance > 0".into()));
    }
    if design.n == 0 || labels.len() != design.n {
        return Err(Error::DimensionMismatch(format!("{} labels for {} rows", labels.len(), design.n)));
    }
    let dim = design.d + 1;
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == design.n {
        return Ok(intercept_only(design, labels, options, ones > 0));
    }

    let mut params = vec![0.0; dim];
    let mut objective = logit_objective(design, labels, options.lambda, &params);
    let mut trace = vec![objective];
    for iteration in 0..options.max_iter {
        let grad = logit_gradient(design, labels, options.lambda, &params);
        let grad_norm = norm(&grad);
        if grad_norm <= options.tolerance {
            return Ok(finish(params, options, iteration, grad_norm, FitStatus::Converged, trace));
        }
        if options.lambda == 0.0 && (0..design.n).any(|r| design.eta(r, &params).abs() > SATURATION) {
            warn!("unpenalized logistic fit is diverging (separable data); stopping early");
            return Ok(finish(params, options, iteration, grad_norm, FitStatus::Diverged, trace));
        }
        let mut h = hessian(design, options.lambda, &params);
        let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut jitter = 1e-12;
        let step = loop {
            if let Some(step) = cholesky_solve(&h, &neg_grad, dim) {
                break step;
            }
            for i in 0..dim {
                h[i * dim + i] += jitter;
            }
            jitter *= 10.0;
        };
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, s)| p + t * s).collect();
            let value = logit_objective(design, labels, options.lambda, &trial);
            if value <= objective + 1e-4 * t * slope {
                accepted = Some((trial, value));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, value)) => {
                params = trial;
                objective = value;
                trace.push(objective);
            }
            None => {
                // No decrease possible at working precision.
                return check_tolerance(
                    finish(params, options, iteration, grad_norm, FitStatus::Converged, trace),
                    options,
                );
            }
        }
    }
    let grad_norm = norm(&logit_gradient(design, labels, options.lambda, &params));
    if grad_norm <= options.tolerance {
        return Ok(finish(params, options, options.max_iter, grad_norm, FitStatus::Converged, trace));
    }
    Err(Error::NotConverged {
        iterations: options.max_iter,
        grad_norm,
    })
}

fn check_tolerance(model: LogitModel, options: &LogitOptions) -> Result<LogitModel> {
    if model.grad_norm <= options.tolerance {
        Ok(model)
    } else {
        Err(Error::NotConverged {
            iterations: model.iterations,
            grad_norm: model.grad_norm,
        })
    }
}

fn finish(
    params: Vec<f64>,
    options: &LogitOptions,
    iterations: usize,
    grad_norm: f64,
    status: FitStatus,
    objective_trace: Vec<f64>,
) -> LogitModel {
    LogitModel {
        features: Vec::new(),
        intercept: params[0],
        coefficients: params[1..].to_vec(),
        lambda: options.lambda,
        iterations,
        grad_norm,
        status,
        objective_trace,
    }
}

/// Single-class labels: zero coefficients and an intercept pushed far
/// enough toward the observed class that the full gradient is within
/// tolerance.
fn intercept_only(design: &Design, labels: &[u8], options: &LogitOptions, positive: bool) -> LogitModel {
    let mut mean_sq = 1.0;
    for j in 0..design.d {
        let mean = (0..design.n).map(|r| design.row(r)[j]).sum::<f64>() / design.n as f64;
        mean_sq += mean * mean;
    }
    let residual = 0.5 * options.tolerance / mean_sq.sqrt();
    let magnitude = ((1.0 - residual) / residual).ln();
    let mut params = vec![0.0; design.d + 1];
    params[0] = if positive { magnitude } else { -magnitude };
    let grad_norm = norm(&logit_gradient(design, labels, options.lambda, &params));
    let objective = logit_objective(design, labels, options.lambda, &params);
    finish(params, options, 0, grad_norm, FitStatus::Degenerate, vec![objective])
}

impl LogitModel {
    /// Class-1 probability; `row` is indexed by training-matrix column.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        let mut eta = self.intercept;
        for (&f, w) in self.features.iter().zip(&self.coefficients) {
            let v = row.get(f).copied().filter(|v| v.is_finite()).ok_or(Error::MissingFeature(f))?;
            eta += w * v;
        }
        Ok(sigmoid(eta))
    }

    pub fn predict_scores(&self, data: &FeatureMatrix) -> Result<Vec<f64>> {
        (0..data.n_rows()).map(|r| self.predict_proba(&data.row(r))).collect()
    }
}
