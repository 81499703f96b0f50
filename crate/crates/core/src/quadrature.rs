//! Trapezoidal integration on possibly non-uniform grids.

use crate::scalar::Scalar;

/// `∫ y dx` by the trapezoidal rule over the sample points `(xs[i], ys[i])`.
/// Fewer than two points integrate to zero.
pub fn trapezoid<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(
        xs.len(),
        ys.len(),
        "abscissae and ordinates differ in length"
    );
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / T::of(2.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_piecewise_linear() {
        let xs = [0.0, 1.0, 3.0, 3.5];
        let ys = [0.0, 2.0, 6.0, 7.0];
        // y = 2x
        assert!((trapezoid(&xs, &ys) - 3.5f64 * 3.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_grids() {
        assert_eq!(trapezoid::<f64>(&[], &[]), 0.0);
        assert_eq!(trapezoid(&[4.0f32], &[9.0]), 0.0);
    }
}
