//! Single-hidden-layer perceptron: ReLU hidden units, sigmoid output,
//! cross-entropy loss, full-batch Adam.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub(crate) n_features: usize,
    pub(crate) w1: Array2<f64>,
    pub(crate) b1: Array1<f64>,
    pub(crate) w2: Array1<f64>,
    pub(crate) b2: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct Adam1 {
    m: Array1<f64>,
    v: Array1<f64>,
}

struct Adam2 {
    m: Array2<f64>,
    v: Array2<f64>,
}

fn adam_update(p: &mut f64, g: f64, m: &mut f64, v: &mut f64, t: f64, lr: f64) {
    *m = BETA1 * *m + (1.0 - BETA1) * g;
    *v = BETA2 * *v + (1.0 - BETA2) * g * g;
    let mhat = *m / (1.0 - BETA1.powf(t));
    let vhat = *v / (1.0 - BETA2.powf(t));
    *p -= lr * mhat / (vhat.sqrt() + ADAM_EPS);
}

impl Adam1 {
    fn new(n: usize) -> Adam1 {
        Adam1 {
            m: Array1::zeros(n),
            v: Array1::zeros(n),
        }
    }
    fn step(&mut self, param: &mut Array1<f64>, grad: &Array1<f64>, t: f64, lr: f64) {
        Zip::from(param)
            .and(grad)
            .and(&mut self.m)
            .and(&mut self.v)
            .for_each(|p, &g, m, v| adam_update(p, g, m, v, t, lr));
    }
}

impl Adam2 {
    fn new(r: usize, c: usize) -> Adam2 {
        Adam2 {
            m: Array2::zeros((r, c)),
            v: Array2::zeros((r, c)),
        }
    }
    fn step(&mut self, param: &mut Array2<f64>, grad: &Array2<f64>, t: f64, lr: f64) {
        Zip::from(param)
            .and(grad)
            .and(&mut self.m)
            .and(&mut self.v)
            .for_each(|p, &g, m, v| adam_update(p, g, m, v, t, lr));
    }
}

impl MlpModel {
    /// Glorot-uniform initialization from a ChaCha8 stream, then
    /// `epochs` full-batch Adam steps at learning rate `lr`.
    pub(crate) fn fit(
        x: ArrayView2<'_, f64>,
        y: &[u8],
        hidden: usize,
        epochs: usize,
        lr: f64,
        seed: u64,
    ) -> MlpModel {
        let (n, d) = (x.nrows(), x.ncols());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lim1 = (6.0 / (d + hidden) as f64).sqrt();
        let w1 = Array2::from_shape_fn((d, hidden), |_| lim1 * (2.0 * rng.random::<f64>() - 1.0));
        let lim2 = (6.0 / (hidden + 1) as f64).sqrt();
        let w2 = Array1::from_shape_fn(hidden, |_| lim2 * (2.0 * rng.random::<f64>() - 1.0));
        let mut model = MlpModel {
            n_features: d,
            w1,
            b1: Array1::zeros(hidden),
            w2,
            b2: 0.0,
        };
        let yf: Array1<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let mut a_w1 = Adam2::new(d, hidden);
        let mut a_b1 = Adam1::new(hidden);
        let mut a_w2 = Adam1::new(hidden);
        let (mut m_b2, mut v_b2) = (0.0, 0.0);
        for epoch in 1..=epochs {
            let t = epoch as f64;
            let z1 = &x.dot(&model.w1) + &model.b1;
            let h = z1.mapv(|v| v.max(0.0));
            let z2 = &h.dot(&model.w2) + model.b2;
            let p = z2.mapv(sigmoid);
            let dz2 = (&p - &yf) / n as f64;
            let g_w2 = h.t().dot(&dz2);
            let g_b2 = dz2.sum();
            let mut dh = dz2
                .view()
                .insert_axis(Axis(1))
                .dot(&model.w2.view().insert_axis(Axis(0)));
            dh.zip_mut_with(&z1, |g, &z| {
                if z <= 0.0 {
                    *g = 0.0;
                }
            });
            let g_w1 = x.t().dot(&dh);
            let g_b1 = dh.sum_axis(Axis(0));
            a_w1.step(&mut model.w1, &g_w1, t, lr);
            a_b1.step(&mut model.b1, &g_b1, t, lr);
            a_w2.step(&mut model.w2, &g_w2, t, lr);
            adam_update(&mut model.b2, g_b2, &mut m_b2, &mut v_b2, t, lr);
        }
        model
    }

    /// Probability of class 1.
    pub(crate) fn scores(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        let z1 = &x.dot(&self.w1) + &self.b1;
        let h = z1.mapv(|v| v.max(0.0));
        let z2 = &h.dot(&self.w2) + self.b2;
        z2.iter().map(|&v| sigmoid(v)).collect()
    }
}
