//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Feature matrices, fitted parameters and intermediate statistics are all
//! generic over [`Float`], so the same learners run in `f32` or `f64`.
//! Metrics and GA fitness values are reported as `f64` regardless.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for features and model parameters.
pub trait Float:
    num_traits::Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    /// Converts a count into this scalar.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }

    /// Total order for sorting; NaN sorts last.
    #[inline]
    fn total_cmp_f(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).unwrap_or_else(|| match (self.is_nan(), other.is_nan()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Less,
        })
    }
}

impl Float for f32 {}
impl Float for f64 {}

/// Logistic sigmoid with a branch that avoids overflow for large |x|.
pub fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

pub fn mean<F: Float>(xs: &[F]) -> F {
    if xs.is_empty() {
        return F::zero();
    }
    xs.iter().copied().sum::<F>() / F::of_usize(xs.len())
}

/// Population variance (divides by n).
pub fn variance<F: Float>(xs: &[F]) -> F {
    if xs.is_empty() {
        return F::zero();
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<F>() / F::of_usize(xs.len())
}

/// Median by linear interpolation between the two middle order statistics.
pub fn median<F: Float>(xs: &[F]) -> Option<F> {
    quantile(xs, 0.5)
}

/// Quantile with linear interpolation between order statistics
/// (position `q * (n - 1)` in the sorted sample).
pub fn quantile<F: Float>(xs: &[F], q: f64) -> Option<F> {
    if xs.is_empty() {
        return None;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp_f(b));
    Some(quantile_sorted(&sorted, q))
}

pub(crate) fn quantile_sorted<F: Float>(sorted: &[F], q: f64) -> F {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = F::of(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[2.0, 6.0, 4.0]), Some(4.0));
        assert_eq!(median(&[1.0f32, 2.0, 3.0, 4.0]), Some(2.5));
        assert_eq!(median::<f64>(&[]), None);
    }

    #[test]
    fn quartiles_interpolate() {
        let xs = [1.0, 2.0, 2.0, 3.0, 100.0];
        assert_eq!(quantile(&xs, 0.25), Some(2.0));
        assert_eq!(quantile(&xs, 0.75), Some(3.0));
        let ys = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&ys, 0.25), Some(1.75));
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert!(sigmoid(-800.0f64) >= 0.0);
        assert_eq!(sigmoid(800.0f64), 1.0);
    }
}
