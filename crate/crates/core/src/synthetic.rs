//! Seeded synthetic datasets for tests, demos and sanity checks.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;
use crate::matrix::Matrix;
use crate::num::Float;
use crate::rng;

/// Two isotropic Gaussian clouds in `n_features` dimensions: class 0 centred
/// at `-mean` in every coordinate, class 1 at `+mean`. Classes alternate by
/// row so any prefix is balanced.
pub fn gaussian_clouds<F: Float>(n: usize, n_features: usize, mean: f64, sigma: f64, seed: u64) -> Dataset<F> {
    let mut rng = rng::rng_from_seed(seed);
    let noise = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    let mut data = Vec::with_capacity(n * n_features);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 2) as u8;
        let centre = if label == 1 { mean } else { -mean };
        for _ in 0..n_features {
            data.push(F::of(centre + noise.sample(&mut rng)));
        }
        labels.push(label);
    }
    Dataset::from_xy(Matrix::new(n, n_features, data).expect("sized buffer"), labels).expect("valid labels")
}

/// Standard-normal features where only feature 0 carries signal:
/// `y = 1[x0 + noise * e > 0]`.
pub fn single_informative<F: Float>(n: usize, n_features: usize, noise: f64, seed: u64) -> Dataset<F> {
    let mut rng = rng::rng_from_seed(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let mut data = Vec::with_capacity(n * n_features);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..n_features).map(|_| std.sample(&mut rng)).collect();
        let score = row[0] + noise * std.sample(&mut rng);
        labels.push(u8::from(score > 0.0));
        data.extend(row.into_iter().map(F::of));
    }
    Dataset::from_xy(Matrix::new(n, n_features, data).expect("sized buffer"), labels).expect("valid labels")
}

/// Standard-normal features with labels drawn independently as
/// Bernoulli(`positive_rate`).
pub fn label_noise<F: Float>(n: usize, n_features: usize, positive_rate: f64, seed: u64) -> Dataset<F> {
    let mut rng = rng::rng_from_seed(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let data: Vec<F> = (0..n * n_features).map(|_| F::of(std.sample(&mut rng))).collect();
    let labels = (0..n).map(|_| u8::from(rng.random::<f64>() < positive_rate)).collect();
    Dataset::from_xy(Matrix::new(n, n_features, data).expect("sized buffer"), labels).expect("valid labels")
}
