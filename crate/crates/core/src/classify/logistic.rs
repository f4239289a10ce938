//! Unpenalised logistic regression fitted by damped Newton iterations.
//!
//! The model is `logit(pi_i) = beta_0 + sum_j beta_j z_ij`; `beta` maximises
//! `l(beta) = sum_i y_i eta_i - log(1 + exp(eta_i))`. Each iteration solves the
//! Newton system by Cholesky (with a growing diagonal jitter if the Hessian is
//! singular) and halves the step until the log-likelihood does not decrease.
//! Iteration stops when the gradient's sup-norm drops below the tolerance, at
//! the iteration cap, or when no halving improves the likelihood.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    /// Gradient sup-norm reached the tolerance.
    Converged,
    /// The final coefficients classify every training row strictly correctly,
    /// so no finite maximiser exists; `beta` is wherever iteration stopped.
    Separated,
    /// Stopped without convergence on data that is not separated.
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub max_iter: usize,
    pub gradient_tolerance: f64,
    pub threshold: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            gradient_tolerance: 1e-8,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// Intercept first, then one coefficient per feature column.
    pub beta: Vec<f64>,
    pub threshold: f64,
    pub status: FitStatus,
    pub iterations: usize,
}

impl LogisticModel {
    pub fn n_features(&self) -> usize {
        self.beta.len() - 1
    }

    /// Linear predictor `beta_0 + z . beta[1..]`.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: row.len(),
            });
        }
        Ok(self.beta[0] + dot(&self.beta[1..], row))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(eta))` without overflow.
fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

fn check_inputs(beta: &[f64], z: &FeatureMatrix, y: &[u8]) -> Result<()> {
    if beta.len() != z.n_cols() + 1 {
        return Err(Error::DimensionMismatch {
            expected: z.n_cols() + 1,
            found: beta.len(),
        });
    }
    if y.len() != z.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: z.n_rows(),
            found: y.len(),
        });
    }
    Ok(())
}

pub fn log_likelihood(beta: &[f64], z: &FeatureMatrix, y: &[u8]) -> Result<f64> {
    check_inputs(beta, z, y)?;
    Ok(z.rows()
        .zip(y)
        .map(|(row, &yi)| {
            let eta = beta[0] + dot(&beta[1..], row);
            f64::from(yi) * eta - softplus(eta)
        })
        .sum())
}

/// Gradient of [`log_likelihood`]: `sum_i (y_i - pi_i) (1, z_i)`.
pub fn gradient(beta: &[f64], z: &FeatureMatrix, y: &[u8]) -> Result<Vec<f64>> {
    check_inputs(beta, z, y)?;
    let mut g = vec![0.0; beta.len()];
    for (row, &yi) in z.rows().zip(y) {
        let r = f64::from(yi) - sigmoid(beta[0] + dot(&beta[1..], row));
        g[0] += r;
        for (gj, zj) in g[1..].iter_mut().zip(row) {
            *gj += r * zj;
        }
    }
    Ok(g)
}

pub fn fit_logistic(z: &FeatureMatrix, y: &[u8]) -> Result<LogisticModel> {
    fit_logistic_with(z, y, &LogisticOptions::default())
}

pub fn fit_logistic_with(
    z: &FeatureMatrix,
    y: &[u8],
    options: &LogisticOptions,
) -> Result<LogisticModel> {
    let (n, q) = (z.n_rows(), z.n_cols());
    if n == 0 {
        return Err(Error::InvalidParameter(
            "logistic regression needs at least one row".into(),
        ));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::InvalidParameter("labels must be 0 or 1".into()));
    }
    if !(options.threshold > 0.0 && options.threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {}",
            options.threshold
        )));
    }

    // All-zero columns have zero gradient and Hessian rows; their coefficient stays 0.
    let active: Vec<usize> = (0..q)
        .filter(|&j| z.rows().any(|row| row[j] != 0.0))
        .collect();
    let p = active.len() + 1;
    let x = DMatrix::from_fn(
        n,
        p,
        |i, c| if c == 0 { 1.0 } else { z.get(i, active[c - 1]) },
    );
    let yv = DVector::from_iterator(n, y.iter().map(|&v| f64::from(v)));

    let loglik = |beta: &DVector<f64>| -> f64 {
        let eta = &x * beta;
        eta.iter()
            .zip(yv.iter())
            .map(|(&e, &t)| t * e - softplus(e))
            .sum()
    };

    let mut beta = DVector::<f64>::zeros(p);
    let mut ll = loglik(&beta);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iter {
        let eta = &x * &beta;
        let pi = eta.map(sigmoid);
        let grad = x.tr_mul(&(&yv - &pi));
        if grad.amax() <= options.gradient_tolerance && !separates(&eta, y) {
            converged = true;
            break;
        }
        iterations += 1;

        let weights = pi.map(|v| v * (1.0 - v));
        let mut xw = x.clone();
        for (i, mut row) in xw.row_iter_mut().enumerate() {
            row *= weights[i];
        }
        let hessian = x.tr_mul(&xw);
        let Some(step) = newton_step(hessian, &grad) else {
            break;
        };

        // Near the optimum the gain drops below rounding error in `ll`, so a
        // step is also accepted when it loses no more than that.
        let slack = 64.0 * f64::EPSILON * ll.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &beta + &step * t;
            let ll_candidate = loglik(&candidate);
            if ll_candidate.is_finite() && ll_candidate >= ll - slack {
                accepted = ll_candidate > ll || candidate != beta;
                beta = candidate;
                ll = ll_candidate;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let eta = &x * &beta;
    let status = if separates(&eta, y) {
        FitStatus::Separated
    } else if converged {
        FitStatus::Converged
    } else {
        FitStatus::MaxIterations
    };

    let mut full = vec![0.0; q + 1];
    full[0] = beta[0];
    for (c, &j) in active.iter().enumerate() {
        full[j + 1] = beta[c + 1];
    }
    Ok(LogisticModel {
        beta: full,
        threshold: options.threshold,
        status,
        iterations,
    })
}

/// True when every row is on the correct side of the decision boundary.
fn separates(eta: &DVector<f64>, y: &[u8]) -> bool {
    eta.iter()
        .zip(y)
        .all(|(&e, &t)| if t == 1 { e > 0.0 } else { e < 0.0 })
}

fn newton_step(hessian: DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let p = hessian.nrows();
    let scale = 1.0 + hessian.diagonal().amax();
    let mut jitter = 0.0;
    for _ in 0..12 {
        let mut h = hessian.clone();
        for i in 0..p {
            h[(i, i)] += jitter;
        }
        if let Some(chol) = h.cholesky() {
            let step = chol.solve(grad);
            if step.iter().all(|v| v.is_finite()) {
                return Some(step);
            }
        }
        jitter = if jitter == 0.0 {
            1e-10 * scale
        } else {
            jitter * 100.0
        };
    }
    None
}

/// Probability `P(Y = 1 | z)` and the class at the model's threshold
/// (class 1 only when the probability is strictly above it).
pub fn predict_logistic(model: &LogisticModel, row: &[f64]) -> Result<(f64, u8)> {
    let probability = sigmoid(model.score(row)?);
    let class = u8::from(probability > model.threshold);
    Ok((probability, class))
}
