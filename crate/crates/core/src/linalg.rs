//! Small dense linear algebra: least squares by Householder QR and
//! Cholesky solves for the portfolio subsets. Sizes here are tiny (a few
//! columns), so plain row-major vectors are enough.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[T]) -> T {
        v.iter().zip(self.mul_vec(v)).map(|(&a, b)| a * b).sum()
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len(), idx.len());
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                out.set(i, j, self.get(a, b));
            }
        }
        out
    }
}

/// Solution of an ordinary least-squares problem.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    /// Root-mean-square of the residuals.
    pub rms_residual: T,
}

/// Minimizes `‖A x − b‖₂` with Householder QR. Returns `None` when `A` is
/// rank deficient or has fewer rows than columns.
pub fn least_squares<T: Scalar>(design: &Matrix<T>, target: &[T]) -> Option<LeastSquares<T>> {
    let (m, n) = (design.rows(), design.cols());
    assert_eq!(m, target.len());
    if m < n || n == 0 {
        return None;
    }
    let mut a = design.clone();
    let mut b = target.to_vec();
    let scale = a.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tiny = T::epsilon() * T::of_usize(m.max(n)) * scale.max(T::min_positive_value());

    for k in 0..n {
        let norm = (k..m).map(|i| a.get(i, k) * a.get(i, k)).sum::<T>().sqrt();
        if norm <= tiny {
            return None;
        }
        let alpha = if a.get(k, k) > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a.get(i, k)).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k..n {
            let dot: T = v
                .iter()
                .enumerate()
                .map(|(i, &vi)| vi * a.get(k + i, j))
                .sum();
            let f = (dot + dot) / vnorm2;
            for (i, &vi) in v.iter().enumerate() {
                a.set(k + i, j, a.get(k + i, j) - f * vi);
            }
        }
        let dot: T = v.iter().enumerate().map(|(i, &vi)| vi * b[k + i]).sum();
        let f = (dot + dot) / vnorm2;
        for (i, &vi) in v.iter().enumerate() {
            b[k + i] = b[k + i] - f * vi;
        }
    }

    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let tail: T = (k + 1..n).map(|j| a.get(k, j) * x[j]).sum();
        x[k] = (b[k] - tail) / a.get(k, k);
    }

    let residual_sq: T = (0..m)
        .map(|i| {
            let fitted: T = design.row(i).iter().zip(&x).map(|(&a, &c)| a * c).sum();
            let r = target[i] - fitted;
            r * r
        })
        .sum();
    Some(LeastSquares {
        coefficients: x,
        rms_residual: (residual_sq / T::of_usize(m)).sqrt(),
    })
}

/// Slope and intercept of the ordinary least-squares line through `(x, y)`.
pub fn fit_line<T: Scalar>(x: &[T], y: &[T]) -> Option<(T, T, T)> {
    let rows: Vec<Vec<T>> = x.iter().map(|&xi| vec![T::one(), xi]).collect();
    let fit = least_squares(&Matrix::from_rows(&rows), y)?;
    Some((fit.coefficients[1], fit.coefficients[0], fit.rms_residual))
}

/// Solves `M x = rhs` for symmetric positive definite `M` by Cholesky.
/// Returns `None` when a pivot falls below `rel_tol` times the largest diagonal.
pub fn cholesky_solve<T: Scalar>(m: &Matrix<T>, rhs: &[T], rel_tol: T) -> Option<Vec<T>> {
    let n = m.rows();
    let max_diag = (0..n).fold(T::zero(), |acc, i| acc.max(m.get(i, i)));
    if max_diag <= T::zero() {
        return None;
    }
    let floor = rel_tol * max_diag;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let d = m.get(j, j) - (0..j).map(|k| l.get(j, k) * l.get(j, k)).sum::<T>();
        if d <= floor {
            return None;
        }
        let d = d.sqrt();
        l.set(j, j, d);
        for i in j + 1..n {
            let s = m.get(i, j) - (0..j).map(|k| l.get(i, k) * l.get(j, k)).sum::<T>();
            l.set(i, j, s / d);
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let s: T = (0..i).map(|k| l.get(i, k) * y[k]).sum();
        y[i] = (rhs[i] - s) / l.get(i, i);
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|k| l.get(k, i) * x[k]).sum();
        x[i] = (y[i] - s) / l.get(i, i);
    }
    Some(x)
}
