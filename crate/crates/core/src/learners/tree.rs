//! Greedy binary CART trees over weighted samples.
//!
//! One engine serves the standalone decision tree, both forests, AdaBoost
//! stumps and the gradient-boosting regression trees. Samples go left when
//! `x[feature] <= threshold`. Candidate thresholds are midpoints between
//! consecutive distinct values (best splitter) or a uniform draw between the
//! node's min and max (random splitter). Ties in gain keep the earlier
//! candidate, i.e. the lowest feature index and then the lowest threshold.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::num::Float;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Gini,
    Entropy,
    /// Regression: Friedman's improvement `wl*wr/(wl+wr) * (mean_l - mean_r)^2`.
    FriedmanMse,
}

/// Number of features examined per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    /// `max(1, floor(sqrt(n_features)))`; also what `auto` means.
    Sqrt,
}

impl MaxFeatures {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(MaxFeatures::All),
            "sqrt" | "auto" => Some(MaxFeatures::Sqrt),
            _ => None,
        }
    }

    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().floor() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitter {
    Best,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub splitter: Splitter,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            max_depth: None,
            max_features: MaxFeatures::All,
            splitter: Splitter::Best,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum Node<F: Float> {
    Leaf {
        /// Weighted positive fraction (classification) or mean target (regression).
        value: F,
        n_samples: usize,
    },
    Split {
        feature: usize,
        threshold: F,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Tree<F: Float> {
    nodes: Vec<Node<F>>,
}

struct Builder<'a, F: Float> {
    x: &'a Matrix<F>,
    target: &'a [F],
    weight: &'a [F],
    cfg: TreeConfig,
    nodes: Vec<Node<F>>,
}

struct Candidate<F> {
    gain: F,
    feature: usize,
    threshold: F,
}

/// Running weighted sums for one side of a split.
#[derive(Clone, Copy)]
struct Stats<F> {
    w: F,
    wy: F,
    n: usize,
}

impl<F: Float> Stats<F> {
    fn zero() -> Self {
        Self { w: F::zero(), wy: F::zero(), n: 0 }
    }

    fn add(&mut self, w: F, y: F) {
        self.w = self.w + w;
        self.wy = self.wy + w * y;
        self.n += 1;
    }

    fn minus(self, o: Self) -> Self {
        Self { w: self.w - o.w, wy: self.wy - o.wy, n: self.n - o.n }
    }

    fn mean(&self) -> F {
        if self.w > F::zero() {
            self.wy / self.w
        } else {
            F::zero()
        }
    }
}

fn impurity<F: Float>(criterion: Criterion, p: F) -> F {
    let p = p.max(F::zero()).min(F::one());
    let q = F::one() - p;
    match criterion {
        Criterion::Gini => F::one() - p * p - q * q,
        Criterion::Entropy => {
            let h = |v: F| if v > F::zero() { -v * v.log2() } else { F::zero() };
            h(p) + h(q)
        }
        Criterion::FriedmanMse => F::zero(),
    }
}

impl<'a, F: Float> Builder<'a, F> {
    fn score(&self, parent: Stats<F>, left: Stats<F>) -> F {
        let right = parent.minus(left);
        if left.w <= F::zero() || right.w <= F::zero() {
            return F::neg_infinity();
        }
        match self.cfg.criterion {
            Criterion::FriedmanMse => {
                let d = left.mean() - right.mean();
                left.w * right.w / (left.w + right.w) * d * d
            }
            c => {
                impurity(c, parent.mean())
                    - left.w / parent.w * impurity(c, left.mean())
                    - right.w / parent.w * impurity(c, right.mean())
            }
        }
    }

    fn stats(&self, rows: &[usize]) -> Stats<F> {
        let mut s = Stats::zero();
        for &r in rows {
            s.add(self.weight[r], self.target[r]);
        }
        s
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        let first = self.target[rows[0]];
        rows.iter().all(|&r| self.target[r] == first)
    }

    fn best_split_for(&self, rows: &[usize], parent: Stats<F>, f: usize, buf: &mut Vec<usize>) -> Option<Candidate<F>> {
        buf.clear();
        buf.extend_from_slice(rows);
        buf.sort_by(|&a, &b| self.x.get(a, f).total_cmp_f(&self.x.get(b, f)).then(a.cmp(&b)));
        let mut left = Stats::zero();
        let mut best: Option<Candidate<F>> = None;
        for i in 0..buf.len() - 1 {
            let r = buf[i];
            left.add(self.weight[r], self.target[r]);
            let a = self.x.get(r, f);
            let b = self.x.get(buf[i + 1], f);
            if !(a < b) {
                continue;
            }
            let gain = self.score(parent, left);
            if best.as_ref().is_none_or(|c| gain > c.gain) {
                let mut t = (a + b) / F::of(2.0);
                if !(t < b) {
                    t = a;
                }
                best = Some(Candidate { gain, feature: f, threshold: t });
            }
        }
        best.filter(|c| c.gain.is_finite())
    }

    fn random_split_for(&self, rows: &[usize], parent: Stats<F>, f: usize, rng: &mut Rng) -> Option<Candidate<F>> {
        let (mut lo, mut hi) = (F::infinity(), F::neg_infinity());
        for &r in rows {
            let v = self.x.get(r, f);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(lo < hi) {
            return None;
        }
        let u = F::of(rng.random::<f64>());
        let mut t = lo + (hi - lo) * u;
        if !(t < hi) {
            t = lo;
        }
        let mut left = Stats::zero();
        for &r in rows {
            if self.x.get(r, f) <= t {
                left.add(self.weight[r], self.target[r]);
            }
        }
        let gain = self.score(parent, left);
        gain.is_finite().then_some(Candidate { gain, feature: f, threshold: t })
    }

    fn leaf(&mut self, rows: &[usize], parent: Stats<F>) -> usize {
        self.nodes.push(Node::Leaf { value: parent.mean(), n_samples: rows.len() });
        self.nodes.len() - 1
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize, rng: &mut Rng) -> usize {
        let parent = self.stats(&rows);
        let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if depth_capped || rows.len() < self.cfg.min_samples_split.max(2) || self.is_pure(&rows) {
            return self.leaf(&rows, parent);
        }
        let n_features = self.x.ncols();
        let k = self.cfg.max_features.resolve(n_features).min(n_features);
        let mut features: Vec<usize> =
            if k >= n_features { (0..n_features).collect() } else { sample(rng, n_features, k).into_vec() };
        features.sort_unstable();

        let mut best: Option<Candidate<F>> = None;
        let mut buf = Vec::with_capacity(rows.len());
        for &f in &features {
            let cand = match self.cfg.splitter {
                Splitter::Best => self.best_split_for(&rows, parent, f, &mut buf),
                Splitter::Random => self.random_split_for(&rows, parent, f, rng),
            };
            if let Some(c) = cand {
                if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        let Some(split) = best else {
            return self.leaf(&rows, parent);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x.get(r, split.feature) <= split.threshold);
        let id = self.nodes.len();
        self.nodes.push(Node::Split { feature: split.feature, threshold: split.threshold, left: 0, right: 0 });
        let l = self.build(left_rows, depth + 1, rng);
        let r = self.build(right_rows, depth + 1, rng);
        if let Node::Split { left, right, .. } = &mut self.nodes[id] {
            *left = l;
            *right = r;
        }
        id
    }
}

impl<F: Float> Tree<F> {
    /// Grows a tree on the rows of `x` with positive weight. For
    /// classification `target` holds 0/1 labels as floats.
    pub fn fit(x: &Matrix<F>, target: &[F], weight: &[F], cfg: TreeConfig, rng: &mut Rng) -> Self {
        assert_eq!(x.nrows(), target.len());
        assert_eq!(x.nrows(), weight.len());
        let rows: Vec<usize> = (0..x.nrows()).filter(|&r| weight[r] > F::zero()).collect();
        let mut b = Builder { x, target, weight, cfg, nodes: Vec::new() };
        if rows.is_empty() {
            b.nodes.push(Node::Leaf { value: F::zero(), n_samples: 0 });
        } else {
            b.build(rows, 0, rng);
        }
        Tree { nodes: b.nodes }
    }

    /// Index of the leaf reached by `row`.
    pub fn apply(&self, row: &[F]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict_row(&self, row: &[F]) -> F {
        match &self.nodes[self.apply(row)] {
            Node::Leaf { value, .. } => *value,
            Node::Split { .. } => unreachable!("apply returns a leaf"),
        }
    }

    pub fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    pub(crate) fn set_leaf_value(&mut self, leaf: usize, v: F) {
        if let Node::Leaf { value, .. } = &mut self.nodes[leaf] {
            *value = v;
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk<F: Float>(nodes: &[Node<F>], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn fit(x: &[Vec<f64>], y: &[f64], cfg: TreeConfig) -> Tree<f64> {
        let m = Matrix::from_rows(x).unwrap();
        Tree::fit(&m, y, &vec![1.0; y.len()], cfg, &mut rng_from_seed(0))
    }

    #[test]
    fn midpoint_threshold_and_tie_break() {
        // Both features separate the classes perfectly; feature 0 wins the tie.
        let x = vec![vec![1.0, 10.0], vec![2.0, 20.0], vec![3.0, 30.0], vec![4.0, 40.0]];
        let t = fit(&x, &[0.0, 0.0, 1.0, 1.0], TreeConfig::default());
        match &t.nodes()[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 2.5);
            }
            n => panic!("expected split, got {n:?}"),
        }
        assert_eq!(t.depth(), 1);
        assert_eq!(t.predict_row(&[0.0, 0.0]), 0.0);
        assert_eq!(t.predict_row(&[9.0, 0.0]), 1.0);
    }

    #[test]
    fn constant_features_make_a_single_leaf() {
        let x = vec![vec![1.0]; 5];
        let t = fit(&x, &[1.0, 1.0, 0.0, 1.0, 0.0], TreeConfig::default());
        assert_eq!(t.n_leaves(), 1);
        assert!((t.predict_row(&[1.0]) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn depth_limit_respected() {
        let x: Vec<Vec<f64>> = (0..64).map(|i| vec![f64::from(i)]).collect();
        let y: Vec<f64> = (0..64).map(|i| f64::from(i % 2)).collect();
        let cfg = TreeConfig { max_depth: Some(3), criterion: Criterion::Entropy, ..Default::default() };
        assert!(fit(&x, &y, cfg).depth() <= 3);
        let full = fit(&x, &y, TreeConfig::default());
        for (row, &label) in x.iter().zip(&y) {
            assert_eq!(full.predict_row(row), label);
        }
    }

    #[test]
    fn weights_shift_the_leaf_value() {
        let m = Matrix::from_rows(&[vec![0.0], vec![0.0]]).unwrap();
        let t = Tree::fit(&m, &[1.0, 0.0], &[3.0, 1.0], TreeConfig::default(), &mut rng_from_seed(0));
        assert_eq!(t.predict_row(&[0.0]), 0.75);
    }

    #[test]
    fn regression_tree_fits_step() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i)]).collect();
        let y: Vec<f64> = (0..10).map(|i| if i < 5 { -1.0 } else { 2.0 }).collect();
        let cfg = TreeConfig { criterion: Criterion::FriedmanMse, max_depth: Some(1), ..Default::default() };
        let t = fit(&x, &y, cfg);
        assert_eq!(t.predict_row(&[1.0]), -1.0);
        assert_eq!(t.predict_row(&[8.0]), 2.0);
    }

    #[test]
    fn random_splitter_stays_within_range() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![f64::from(i), f64::from(i % 3)]).collect();
        let y: Vec<f64> = (0..30).map(|i| f64::from(u8::from(i >= 15))).collect();
        let cfg = TreeConfig { splitter: Splitter::Random, max_depth: Some(4), ..Default::default() };
        let t = fit(&x, &y, cfg);
        for n in t.nodes() {
            if let Node::Split { feature, threshold, .. } = n {
                let hi = if *feature == 0 { 29.0 } else { 2.0 };
                assert!(*threshold >= 0.0 && *threshold < hi);
            }
        }
    }
}
