//! Least-squares plumbing shared by the regression-based estimators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An ordinary least squares fit.
pub(crate) struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    /// (X'X)^{-1}, kept for standard errors and sandwich covariances.
    pub xtx_inv: DMatrix<f64>,
    pub n: usize,
    pub k: usize,
}

impl OlsFit {
    /// Classical standard error of coefficient `j` with `dof` residual
    /// degrees of freedom.
    pub fn se(&self, j: usize) -> f64 {
        let dof = (self.n - self.k).max(1) as f64;
        (self.rss / dof * self.xtx_inv[(j, j)]).sqrt()
    }

    /// Gaussian log-likelihood with the ML variance estimate `rss / n`.
    pub fn gaussian_loglik(&self) -> f64 {
        let n = self.n as f64;
        let sigma2 = self.rss / n;
        -0.5 * n * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0)
    }
}

/// Solve `y = X beta + e` by OLS via Cholesky on the normal equations.
///
/// Errors when `X'X` is singular (collinear regressors).
pub(crate) fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let n = x.nrows();
    let k = x.ncols();
    if n < k {
        return Err(Error::estimation(format!(
            "too few observations for regression: n={n}, k={k}"
        )));
    }
    let xtx = x.transpose() * x;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::estimation("collinear regressors: X'X is singular"))?;
    let xty = x.transpose() * y;
    let beta = chol.solve(&xty);
    let xtx_inv = chol.inverse();
    let residuals = y - x * &beta;
    let rss = residuals.dot(&residuals);
    Ok(OlsFit {
        beta,
        residuals,
        rss,
        xtx_inv,
        n,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_line() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let fit = ols(&x, &y).unwrap();
        assert_relative_eq!(fit.beta[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.beta[1], 2.0, epsilon = 1e-12);
        assert!(fit.rss < 1e-20);
    }

    #[test]
    fn rejects_collinear_design() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(ols(&x, &y).is_err());
    }
}
