//! Thomas algorithm for tridiagonal systems, factored once and reusable for
//! many right-hand sides.

use crate::error::{Error, Result};

/// LU factors of a tridiagonal matrix with rows
/// `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`.
#[derive(Debug, Clone)]
pub struct Tridiag {
    lower: Vec<f64>,
    /// Modified super-diagonal `c'`.
    upper: Vec<f64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<f64>,
}

impl Tridiag {
    /// Factors the matrix; `lower[0]` and `upper[n-1]` are ignored.
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() != n || upper.len() != n || n == 0 {
            return Err(Error::Numeric(
                "tridiagonal bands must be non-empty and of equal length".into(),
            ));
        }
        let mut c = vec![0.0; n];
        let mut inv = vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let pivot = diag[i] - if i > 0 { lower[i] * prev_c } else { 0.0 };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Numeric(format!(
                    "singular tridiagonal system at row {i}"
                )));
            }
            inv[i] = 1.0 / pivot;
            c[i] = if i + 1 < n { upper[i] * inv[i] } else { 0.0 };
            prev_c = c[i];
        }
        Ok(Tridiag {
            lower: lower.to_vec(),
            upper: c,
            inv_pivot: inv,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        assert_eq!(rhs.len(), n, "right-hand side length must match the system");
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}

/// One-shot solve.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let t = Tridiag::factor(lower, diag, upper)?;
    let mut x = rhs.to_vec();
    t.solve_in_place(&mut x);
    Ok(x)
}
