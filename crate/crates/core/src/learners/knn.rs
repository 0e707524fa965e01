use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::num::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnParams {
    pub n_neighbors: usize,
    /// Minkowski exponent.
    pub p: f64,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { n_neighbors: 5, p: 2.0 }
    }
}

impl KnnParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let mut r = ParamReader::new(spec);
        let n_neighbors = r.count("n_neighbors", 5)?;
        let p = r.float("p", 2.0)?;
        r.choice("weights", "uniform", &["uniform"])?;
        r.choice("metric", "minkowski", &["minkowski"])?;
        r.choice("algorithm", "auto", &["auto", "brute"])?;
        if p < 1.0 {
            return Err(crate::error::Error::hyper("knn", format!("p must be >= 1, got {p}")));
        }
        r.finish()?;
        Ok(Self { n_neighbors, p })
    }
}

/// Exhaustive nearest-neighbour search with uniform votes. Equal distances
/// are ordered by training index. `k` is capped at the training-set size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KnnModel<F: Float> {
    k: usize,
    p: f64,
    x: Matrix<F>,
    y: Vec<u8>,
}

impl<F: Float> KnnModel<F> {
    pub fn fit(params: &KnnParams, x: &Matrix<F>, y: &[u8]) -> Self {
        Self { k: params.n_neighbors.min(y.len()).max(1), p: params.p, x: x.clone(), y: y.to_vec() }
    }

    fn distance(&self, a: &[F], b: &[F]) -> F {
        if self.p == 2.0 {
            a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum::<F>()
        } else if self.p == 1.0 {
            a.iter().zip(b).map(|(&u, &v)| (u - v).abs()).sum::<F>()
        } else {
            let p = F::of(self.p);
            a.iter().zip(b).map(|(&u, &v)| (u - v).abs().powf(p)).sum::<F>()
        }
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        let mut dists: Vec<(F, usize)> = Vec::with_capacity(self.y.len());
        x.rows_iter()
            .map(|q| {
                dists.clear();
                dists.extend(self.x.rows_iter().enumerate().map(|(i, r)| (self.distance(q, r), i)));
                dists.sort_by(|a, b| a.0.total_cmp_f(&b.0).then(a.1.cmp(&b.1)));
                let pos = dists[..self.k].iter().filter(|(_, i)| self.y[*i] == 1).count();
                F::of_usize(pos) / F::of_usize(self.k)
            })
            .collect()
    }
}
