use crate::num::Float;

/// Solves `a * x = b` for a dense row-major `n x n` matrix by Gaussian
/// elimination with partial pivoting. Returns `None` when singular.
pub(crate) fn solve<F: Float>(mut a: Vec<F>, mut b: Vec<F>) -> Option<Vec<F>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp_f(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() <= F::min_positive_value() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                a[row * n + k] = a[row * n + k] - factor * a[col * n + k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![F::zero(); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s = s - a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}
