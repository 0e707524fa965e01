//! One-hidden-layer ReLU network with a two-way softmax output, trained on
//! mini-batches with Adam. The step size starts at `learning_rate_init` and
//! is halved whenever two consecutive epochs fail to improve the best
//! training loss seen so far.
//!
//! Parameters live in one flat vector: `w1` (d x h, row-major), `b1` (h),
//! `w2` (h x 2), `b2` (2).

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{sigmoid, Float};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpParams {
    pub hidden: usize,
    pub batch_size: usize,
    pub max_iter: usize,
    pub learning_rate_init: f64,
    /// L2 penalty on the weights (not biases).
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: 100,
            batch_size: 100,
            max_iter: 100,
            learning_rate_init: 1e-3,
            alpha: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl MlpParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let d = Self::default();
        let mut r = ParamReader::new(spec);
        let hidden = r.count("hidden_layer_size", d.hidden)?;
        let batch_size = r.count("batch_size", d.batch_size)?;
        let max_iter = r.count("max_iter", d.max_iter)?;
        let learning_rate_init = r.positive_float("learning_rate_init", d.learning_rate_init)?;
        let alpha = r.float("alpha", d.alpha)?;
        r.choice("activation", "relu", &["relu"])?;
        r.choice("solver", "adam", &["adam"])?;
        r.choice("learning_rate", "adaptive", &["adaptive"])?;
        r.finish()?;
        if alpha < 0.0 {
            return Err(Error::hyper("mlp", "alpha must be non-negative"));
        }
        Ok(Self { hidden, batch_size, max_iter, learning_rate_init, alpha, ..d })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MlpModel<F: Float> {
    pub n_inputs: usize,
    pub hidden: usize,
    pub params: Vec<F>,
    /// Mean training loss per epoch.
    pub loss_curve: Vec<F>,
}

struct Layout {
    d: usize,
    h: usize,
}

impl Layout {
    fn w1(&self, i: usize, j: usize) -> usize {
        i * self.h + j
    }
    fn b1(&self, j: usize) -> usize {
        self.d * self.h + j
    }
    fn w2(&self, j: usize, k: usize) -> usize {
        self.d * self.h + self.h + j * 2 + k
    }
    fn b2(&self, k: usize) -> usize {
        self.d * self.h + self.h + self.h * 2 + k
    }
    fn len(&self) -> usize {
        self.d * self.h + self.h + self.h * 2 + 2
    }
    fn is_weight(&self, idx: usize) -> bool {
        idx < self.d * self.h || (idx >= self.b1(self.h) && idx < self.b2(0))
    }
}

fn logits<F: Float>(lay: &Layout, theta: &[F], row: &[F], hidden: &mut [F]) -> [F; 2] {
    for (j, a) in hidden.iter_mut().enumerate() {
        let mut s = theta[lay.b1(j)];
        for (i, &x) in row.iter().enumerate() {
            s = s + x * theta[lay.w1(i, j)];
        }
        *a = s.max(F::zero());
    }
    let mut out = [theta[lay.b2(0)], theta[lay.b2(1)]];
    for (j, &a) in hidden.iter().enumerate() {
        out[0] = out[0] + a * theta[lay.w2(j, 0)];
        out[1] = out[1] + a * theta[lay.w2(j, 1)];
    }
    out
}

/// Mean cross-entropy over `rows` plus `alpha / (2 n) * |W|^2`, and its
/// gradient with respect to the flat parameter vector.
pub fn loss_and_gradient<F: Float>(
    n_inputs: usize,
    hidden: usize,
    theta: &[F],
    x: &Matrix<F>,
    y: &[u8],
    rows: &[usize],
    alpha: F,
) -> (F, Vec<F>) {
    let lay = Layout { d: n_inputs, h: hidden };
    let mut grad = vec![F::zero(); lay.len()];
    let mut act = vec![F::zero(); hidden];
    let mut loss = F::zero();
    let n = F::of_usize(rows.len());
    for &r in rows {
        let row = x.row(r);
        let z = logits(&lay, theta, row, &mut act);
        // Two-way softmax: p1 = sigmoid(z1 - z0).
        let p1 = sigmoid(z[1] - z[0]);
        let p = [F::one() - p1, p1];
        let t = y[r] as usize;
        let margin = z[1 - t] - z[t];
        loss = loss + softplus(margin);
        let dz = [p[0] - F::of_usize(usize::from(t == 0)), p[1] - F::of_usize(t)];
        for k in 0..2 {
            grad[lay.b2(k)] = grad[lay.b2(k)] + dz[k] / n;
        }
        for j in 0..hidden {
            if act[j] <= F::zero() {
                // Inactive unit: only the output weights see it (with a zero activation).
                continue;
            }
            grad[lay.w2(j, 0)] = grad[lay.w2(j, 0)] + act[j] * dz[0] / n;
            grad[lay.w2(j, 1)] = grad[lay.w2(j, 1)] + act[j] * dz[1] / n;
            let back = (dz[0] * theta[lay.w2(j, 0)] + dz[1] * theta[lay.w2(j, 1)]) / n;
            grad[lay.b1(j)] = grad[lay.b1(j)] + back;
            for (i, &xi) in row.iter().enumerate() {
                grad[lay.w1(i, j)] = grad[lay.w1(i, j)] + back * xi;
            }
        }
    }
    loss = loss / n;
    let mut sq = F::zero();
    for (idx, (g, &w)) in grad.iter_mut().zip(theta).enumerate() {
        if lay.is_weight(idx) {
            sq = sq + w * w;
            *g = *g + alpha * w / n;
        }
    }
    (loss + alpha * sq / (F::of(2.0) * n), grad)
}

fn softplus<F: Float>(z: F) -> F {
    if z > F::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl<F: Float> MlpModel<F> {
    /// Weights and biases drawn from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn init(n_inputs: usize, hidden: usize, seed: u64) -> Self {
        let lay = Layout { d: n_inputs, h: hidden };
        let mut rng = rng::rng_from_seed(seed);
        let mut params = vec![F::zero(); lay.len()];
        let b_in = 1.0 / (n_inputs.max(1) as f64).sqrt();
        let b_hid = 1.0 / (hidden as f64).sqrt();
        for (idx, p) in params.iter_mut().enumerate() {
            let bound = if idx < lay.b1(hidden) { b_in } else { b_hid };
            *p = F::of(rng.random_range(-bound..bound));
        }
        Self { n_inputs, hidden, params, loss_curve: Vec::new() }
    }

    pub fn fit(p: &MlpParams, x: &Matrix<F>, y: &[u8], seed: u64) -> Result<Self> {
        if y.iter().all(|&l| l == y[0]) {
            return Err(Error::SingleClass("mlp".into()));
        }
        let mut model = Self::init(x.ncols(), p.hidden, rng::derive_seed(seed, 0));
        let mut rng = rng::derived_rng(seed, 1);
        let n_par = model.params.len();
        let (mut m, mut v) = (vec![F::zero(); n_par], vec![F::zero(); n_par]);
        let (b1, b2, eps) = (F::of(p.beta1), F::of(p.beta2), F::of(p.epsilon));
        let alpha = F::of(p.alpha);
        let mut lr = p.learning_rate_init;
        let mut step = 0i32;
        let mut best = F::infinity();
        let mut stalled = 0;
        let mut order: Vec<usize> = (0..y.len()).collect();
        let batch = p.batch_size.min(y.len());
        for _epoch in 0..p.max_iter {
            order.shuffle(&mut rng);
            let mut epoch_loss = F::zero();
            for chunk in order.chunks(batch) {
                let (loss, grad) = loss_and_gradient(model.n_inputs, model.hidden, &model.params, x, y, chunk, alpha);
                epoch_loss = epoch_loss + loss * F::of_usize(chunk.len());
                step += 1;
                let c1 = F::one() - b1.powi(step);
                let c2 = F::one() - b2.powi(step);
                let lr_t = F::of(lr) * c2.sqrt() / c1;
                for i in 0..n_par {
                    m[i] = b1 * m[i] + (F::one() - b1) * grad[i];
                    v[i] = b2 * v[i] + (F::one() - b2) * grad[i] * grad[i];
                    model.params[i] = model.params[i] - lr_t * m[i] / (v[i].sqrt() + eps);
                }
            }
            let epoch_loss = epoch_loss / F::of_usize(y.len());
            model.loss_curve.push(epoch_loss);
            if epoch_loss < best {
                best = epoch_loss;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= 2 {
                    lr /= 2.0;
                    stalled = 0;
                }
            }
        }
        Ok(model)
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        let lay = Layout { d: self.n_inputs, h: self.hidden };
        let mut act = vec![F::zero(); self.hidden];
        x.rows_iter()
            .map(|r| {
                let z = logits(&lay, &self.params, r, &mut act);
                sigmoid(z[1] - z[0])
            })
            .collect()
    }
}
