//! Linear SVM trained by coordinate descent on the hinge-loss dual.
//!
//! The bias is folded in as an extra constant feature, so each machine is
//! a single weight vector of length d+1.

use crate::error::{Error, Result};

/// Convergence threshold on the largest dual-variable update in an epoch.
pub const DUAL_TOLERANCE: f64 = 1e-4;
/// Epoch cap.
pub const MAX_EPOCHS: usize = 1000;

/// Result of one binary training run.
#[derive(Debug, Clone)]
pub struct BinaryOutcome {
    /// Weights with the bias as the last component.
    pub weights: Vec<f64>,
    /// Dual objective value after every epoch.
    pub dual_objectives: Vec<f64>,
    pub epochs: usize,
}

/// Trains a binary machine on rows `x` with labels `y` in {-1, +1}.
pub fn train_binary(x: &[Vec<f64>], y: &[f64], cost: f64) -> Result<BinaryOutcome> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidParameter(
            "training rows and labels must be non-empty and aligned".into(),
        ));
    }
    if !(cost > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cost must be positive, got {cost}"
        )));
    }
    let d = x[0].len();
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidParameter("dimension mismatch".into()));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter("labels must be +1 or -1".into()));
    }

    let n = x.len();
    // Q_ii = ||x_i||^2 + 1 (the 1 accounts for the bias feature)
    let q_diag: Vec<f64> = x
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();

    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; d + 1];
    let mut objectives = Vec::new();
    let mut epochs = 0;

    for _ in 0..MAX_EPOCHS {
        epochs += 1;
        let mut max_update = 0.0f64;
        for i in 0..n {
            // gradient of the dual along alpha_i: y_i * f(x_i) - 1
            let mut fx = w[d];
            for (wj, xj) in w[..d].iter().zip(&x[i]) {
                fx += wj * xj;
            }
            let g = y[i] * fx - 1.0;
            let next = (alpha[i] - g / q_diag[i]).clamp(0.0, cost);
            let delta = next - alpha[i];
            if delta != 0.0 {
                alpha[i] = next;
                let step = delta * y[i];
                for (wj, xj) in w[..d].iter_mut().zip(&x[i]) {
                    *wj += step * xj;
                }
                w[d] += step;
            }
            max_update = max_update.max(delta.abs());
        }
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        objectives.push(alpha.iter().sum::<f64>() - 0.5 * norm_sq);
        if max_update < DUAL_TOLERANCE {
            break;
        }
    }

    Ok(BinaryOutcome {
        weights: w,
        dual_objectives: objectives,
        epochs,
    })
}

/// Signed decision value of a trained weight vector.
pub fn decision(weights: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), x.len() + 1);
    let mut fx = weights[x.len()];
    for (w, v) in weights[..x.len()].iter().zip(x) {
        fx += w * v;
    }
    fx
}
