//! Linear models: L2-penalized logistic regression trained by full-batch
//! gradient descent with backtracking line search, and a linear
//! soft-margin SVM trained by deterministic Pegasos-style subgradient
//! descent. Both expect standardized inputs (handled by the dispatcher).

use ndarray::{Array1, ArrayView2};

const LR_GRAD_TOL: f64 = 1e-6;
const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const PROB_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub(crate) weights: Array1<f64>,
    pub(crate) bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LinearModel {
    pub(crate) fn margins(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        let z = x.dot(&self.weights);
        z.iter().map(|v| v + self.bias).collect()
    }

    pub(crate) fn probabilities(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        self.margins(x).into_iter().map(sigmoid).collect()
    }
}

/// Mean cross-entropy plus (λ/2n)·‖w‖² with λ = 1/c.
fn lr_objective(x: ArrayView2<'_, f64>, y: &[u8], w: &Array1<f64>, b: f64, lambda: f64) -> f64 {
    let n = y.len() as f64;
    let z = x.dot(w);
    let mut loss = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let p = sigmoid(z[i] + b).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        loss -= if yi == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    loss / n + lambda * w.iter().map(|v| v * v).sum::<f64>() / (2.0 * n)
}

/// Full-batch gradient descent with Armijo backtracking from unit step.
/// Stops when the joint gradient norm falls below 1e-6 or at `max_iters`.
/// The bias is not penalized.
pub(crate) fn fit_logistic_regression(
    x: ArrayView2<'_, f64>,
    y: &[u8],
    c: f64,
    max_iters: usize,
) -> LinearModel {
    let (n, d) = (x.nrows(), x.ncols());
    let nf = n as f64;
    let lambda = 1.0 / c;
    let mut w = Array1::<f64>::zeros(d);
    let mut b = 0.0;
    let mut obj = lr_objective(x, y, &w, b, lambda);
    for _ in 0..max_iters {
        let z = x.dot(&w);
        let mut resid = Array1::<f64>::zeros(n);
        for i in 0..n {
            resid[i] = sigmoid(z[i] + b) - f64::from(y[i]);
        }
        let mut gw = x.t().dot(&resid);
        gw.mapv_inplace(|v| v / nf);
        gw.scaled_add(lambda / nf, &w);
        let gb = resid.sum() / nf;
        let gnorm_sq = gw.iter().map(|v| v * v).sum::<f64>() + gb * gb;
        if gnorm_sq.sqrt() < LR_GRAD_TOL {
            break;
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut w_new = w.clone();
            w_new.scaled_add(-step, &gw);
            let b_new = b - step * gb;
            let obj_new = lr_objective(x, y, &w_new, b_new, lambda);
            if obj_new <= obj - ARMIJO_C * step * gnorm_sq {
                w = w_new;
                b = b_new;
                obj = obj_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    LinearModel { weights: w, bias: b }
}

/// Deterministic full-batch Pegasos: λ = 1/(n·c), step 1/(λ·(t+1)),
/// hinge subgradient over all current violators, unregularized bias.
pub(crate) fn fit_linear_svm(
    x: ArrayView2<'_, f64>,
    y: &[u8],
    c: f64,
    steps: usize,
) -> LinearModel {
    let (n, d) = (x.nrows(), x.ncols());
    let nf = n as f64;
    let lambda = 1.0 / (nf * c);
    let mut w = Array1::<f64>::zeros(d);
    let mut b = 0.0;
    for t in 0..steps {
        let eta = 1.0 / (lambda * (t as f64 + 1.0));
        let z = x.dot(&w);
        let mut gw = w.clone();
        gw.mapv_inplace(|v| v * lambda);
        let mut gb = 0.0;
        for i in 0..n {
            let yi = if y[i] == 1 { 1.0 } else { -1.0 };
            if yi * (z[i] + b) < 1.0 {
                gw.scaled_add(-yi / nf, &x.row(i));
                gb -= yi / nf;
            }
        }
        w.scaled_add(-eta, &gw);
        b -= eta * gb;
    }
    LinearModel { weights: w, bias: b }
}
