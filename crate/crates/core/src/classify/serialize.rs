//! Versioned binary container for trained models.
//!
//! Layout: the magic bytes `EHGM1`, a one-byte kind tag, an optional
//! standardizer block, then kind-specific little-endian parameter
//! blocks. Vectors are a u64 length followed by f64 values; matrices
//! add a u64 column count and store row-major.

use crate::classify::boosting::GbModel;
use crate::classify::forest::ForestModel;
use crate::classify::linear::LinearModel;
use crate::classify::mlp::MlpModel;
use crate::classify::model::{ModelKind, ModelParams, TrainedModel};
use crate::classify::qda::QdaModel;
use crate::classify::standardize::Standardizer;
use crate::classify::tree::TreeNode;
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};

const MAGIC: &[u8; 5] = b"EHGM1";

fn kind_tag(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::Qda => 0,
        ModelKind::Lr => 1,
        ModelKind::Svm => 2,
        ModelKind::Dt => 3,
        ModelKind::Rf => 4,
        ModelKind::Gb => 5,
        ModelKind::Mlp => 6,
    }
}

fn kind_of_tag(tag: u8) -> Result<ModelKind> {
    Ok(match tag {
        0 => ModelKind::Qda,
        1 => ModelKind::Lr,
        2 => ModelKind::Svm,
        3 => ModelKind::Dt,
        4 => ModelKind::Rf,
        5 => ModelKind::Gb,
        6 => ModelKind::Mlp,
        other => {
            return Err(Error::Validation(format!(
                "unknown model kind tag {other}"
            )))
        }
    })
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn slice_f64(&mut self, values: &[f64]) {
        self.u64(values.len() as u64);
        for &v in values {
            self.f64(v);
        }
    }
    fn arr1(&mut self, a: &Array1<f64>) {
        self.slice_f64(a.as_slice().expect("contiguous"));
    }
    fn arr2(&mut self, a: &Array2<f64>) {
        self.u64(a.nrows() as u64);
        self.u64(a.ncols() as u64);
        for v in a.iter() {
            self.f64(*v);
        }
    }
    fn tree(&mut self, node: &TreeNode) {
        match node {
            TreeNode::Leaf { value } => {
                self.u8(0);
                self.f64(*value);
            }
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                self.u8(1);
                self.u64(*feature as u64);
                self.f64(*threshold);
                self.tree(left);
                self.tree(right);
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Validation("model container truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Validation("count overflows usize".into()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn vec_f64(&mut self) -> Result<Vec<f64>> {
        let n = self.usize()?;
        if n > self.buf.len() / 8 {
            return Err(Error::Validation("model container truncated".into()));
        }
        (0..n).map(|_| self.f64()).collect()
    }
    fn arr1(&mut self) -> Result<Array1<f64>> {
        Ok(Array1::from_vec(self.vec_f64()?))
    }
    fn arr2(&mut self) -> Result<Array2<f64>> {
        let r = self.usize()?;
        let c = self.usize()?;
        if r.checked_mul(c).is_none_or(|n| n > self.buf.len() / 8) {
            return Err(Error::Validation("model container truncated".into()));
        }
        let mut values = Vec::with_capacity(r * c);
        for _ in 0..r * c {
            values.push(self.f64()?);
        }
        Array2::from_shape_vec((r, c), values)
            .map_err(|e| Error::Validation(format!("bad matrix block: {e}")))
    }
    fn tree(&mut self, depth: usize) -> Result<TreeNode> {
        if depth > 512 {
            return Err(Error::Validation("tree block nests too deeply".into()));
        }
        match self.u8()? {
            0 => Ok(TreeNode::Leaf { value: self.f64()? }),
            1 => {
                let feature = self.usize()?;
                let threshold = self.f64()?;
                let left = Box::new(self.tree(depth + 1)?);
                let right = Box::new(self.tree(depth + 1)?);
                Ok(TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                })
            }
            other => Err(Error::Validation(format!("unknown tree node tag {other}"))),
        }
    }
}

pub fn save_model(model: &TrainedModel) -> Vec<u8> {
    let mut w = Writer {
        buf: Vec::with_capacity(256),
    };
    w.buf.extend_from_slice(MAGIC);
    w.u8(kind_tag(model.kind()));
    w.u64(model.n_features as u64);
    match &model.standardizer {
        Some(s) => {
            w.u8(1);
            w.slice_f64(&s.mean);
            w.slice_f64(&s.std);
        }
        None => w.u8(0),
    }
    match &model.params {
        ModelParams::Qda(m) => {
            for c in 0..2 {
                w.f64(m.log_priors[c]);
                w.arr1(&m.means[c]);
                w.arr2(&m.chol[c]);
                w.f64(m.log_dets[c]);
            }
        }
        ModelParams::Lr(m) | ModelParams::Svm(m) => {
            w.arr1(&m.weights);
            w.f64(m.bias);
        }
        ModelParams::Dt { root } => w.tree(root),
        ModelParams::Rf(m) => {
            w.u64(m.trees.len() as u64);
            for t in &m.trees {
                w.tree(t);
            }
        }
        ModelParams::Gb(m) => {
            w.f64(m.init);
            w.f64(m.shrinkage);
            w.u64(m.trees.len() as u64);
            for t in &m.trees {
                w.tree(t);
            }
            w.slice_f64(&m.train_loss_per_round);
        }
        ModelParams::Mlp(m) => {
            w.arr2(&m.w1);
            w.arr1(&m.b1);
            w.arr1(&m.w2);
            w.f64(m.b2);
        }
    }
    w.buf
}

pub fn load_model(bytes: &[u8]) -> Result<TrainedModel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(5)? != MAGIC {
        return Err(Error::Validation(
            "not a model container (bad magic bytes)".into(),
        ));
    }
    let kind = kind_of_tag(r.u8()?)?;
    let n_features = r.usize()?;
    let standardizer = if r.u8()? == 1 {
        Some(Standardizer {
            mean: r.vec_f64()?,
            std: r.vec_f64()?,
        })
    } else {
        None
    };
    let params = match kind {
        ModelKind::Qda => {
            let mut log_priors = [0.0; 2];
            let mut means = [Array1::zeros(0), Array1::zeros(0)];
            let mut chol = [Array2::zeros((0, 0)), Array2::zeros((0, 0))];
            let mut log_dets = [0.0; 2];
            for c in 0..2 {
                log_priors[c] = r.f64()?;
                means[c] = r.arr1()?;
                chol[c] = r.arr2()?;
                log_dets[c] = r.f64()?;
            }
            ModelParams::Qda(QdaModel {
                n_features,
                log_priors,
                means,
                chol,
                log_dets,
            })
        }
        ModelKind::Lr | ModelKind::Svm => {
            let m = LinearModel {
                weights: r.arr1()?,
                bias: r.f64()?,
            };
            if kind == ModelKind::Lr {
                ModelParams::Lr(m)
            } else {
                ModelParams::Svm(m)
            }
        }
        ModelKind::Dt => ModelParams::Dt { root: r.tree(0)? },
        ModelKind::Rf => {
            let n = r.usize()?;
            let trees = (0..n).map(|_| r.tree(0)).collect::<Result<Vec<_>>>()?;
            ModelParams::Rf(ForestModel { n_features, trees })
        }
        ModelKind::Gb => {
            let init = r.f64()?;
            let shrinkage = r.f64()?;
            let n = r.usize()?;
            let trees = (0..n).map(|_| r.tree(0)).collect::<Result<Vec<_>>>()?;
            let train_loss_per_round = r.vec_f64()?;
            ModelParams::Gb(GbModel {
                n_features,
                init,
                shrinkage,
                trees,
                train_loss_per_round,
            })
        }
        ModelKind::Mlp => ModelParams::Mlp(MlpModel {
            n_features,
            w1: r.arr2()?,
            b1: r.arr1()?,
            w2: r.arr1()?,
            b2: r.f64()?,
        }),
    };
    if r.pos != bytes.len() {
        return Err(Error::Validation(format!(
            "{} trailing bytes after model payload",
            bytes.len() - r.pos
        )));
    }
    Ok(TrainedModel {
        n_features,
        standardizer,
        params,
    })
}
