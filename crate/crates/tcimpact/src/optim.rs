//! Derivative-free optimizers and numerical differentiation shared by the
//! likelihood-based estimators.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt(5)) / 2

/// Brent's method for maximizing a smooth univariate function on `[a, b]`.
///
/// Returns `(x_max, f(x_max))`. `tol` is an absolute tolerance on `x`.
pub(crate) fn brent_max<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    let neg = |x: f64| -f(x);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = neg(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs().max(1.0) + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, -fx));
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Parabolic interpolation through (v, w, x).
            let r = (x - w) * (fx - fv);
            let q0 = (x - v) * (fx - fw);
            let mut p = (x - v) * q0 - (x - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = neg(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Err(Error::NonConvergence {
        context: "Brent line search".into(),
        trace: vec![-fx],
    })
}

/// Outcome of a Nelder–Mead search.
pub(crate) struct NmResult {
    pub x: Vec<f64>,
    pub fmax: f64,
    pub iterations: usize,
}

/// Nelder–Mead simplex maximization.
///
/// `init_step` sets the initial simplex edge along each coordinate.
/// Converges when the simplex's objective spread falls below `ftol`.
pub(crate) fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    init_step: &[f64],
    ftol: f64,
    max_iter: usize,
) -> Result<NmResult> {
    let n = x0.len();
    assert!(n > 0 && init_step.len() == n);
    let neg = |x: &[f64]| -f(x);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += init_step[i];
        simplex.push(v);
    }
    let mut fvals: Vec<f64> = simplex.iter().map(|v| neg(v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for iter in 0..max_iter {
        // Order ascending: best (smallest neg) first.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&i, &j| fvals[i].partial_cmp(&fvals[j]).unwrap_or(std::cmp::Ordering::Equal));
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let ordered_f: Vec<f64> = idx.iter().map(|&i| fvals[i]).collect();
        simplex = ordered;
        fvals = ordered_f;

        let spread = (fvals[n] - fvals[0]).abs();
        if spread < ftol * (1.0 + fvals[0].abs()) {
            return Ok(NmResult {
                x: simplex[0].clone(),
                fmax: -fvals[0],
                iterations: iter,
            });
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();

        let reflect: Vec<f64> = (0..n)
            .map(|k| centroid[k] + alpha * (centroid[k] - simplex[n][k]))
            .collect();
        let f_r = neg(&reflect);

        if f_r < fvals[0] {
            let expand: Vec<f64> = (0..n)
                .map(|k| centroid[k] + gamma * (reflect[k] - centroid[k]))
                .collect();
            let f_e = neg(&expand);
            if f_e < f_r {
                simplex[n] = expand;
                fvals[n] = f_e;
            } else {
                simplex[n] = reflect;
                fvals[n] = f_r;
            }
        } else if f_r < fvals[n - 1] {
            simplex[n] = reflect;
            fvals[n] = f_r;
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|k| centroid[k] + rho * (simplex[n][k] - centroid[k]))
                .collect();
            let f_c = neg(&contract);
            if f_c < fvals[n] {
                simplex[n] = contract;
                fvals[n] = f_c;
            } else {
                // Shrink toward the best vertex.
                for i in 1..=n {
                    for k in 0..n {
                        simplex[i][k] = simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k]);
                    }
                    fvals[i] = neg(&simplex[i]);
                }
            }
        }
    }
    Err(Error::NonConvergence {
        context: "Nelder-Mead".into(),
        trace: fvals.iter().map(|v| -v).collect(),
    })
}

/// Central-difference Hessian of `f` at `x`.
///
/// Step sizes scale with each coordinate's magnitude. The result is
/// symmetrized; callers invert it for observed-information covariances.
pub(crate) fn numerical_hessian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let rel = f64::EPSILON.powf(0.25);
    let h: Vec<f64> = x.iter().map(|&xi| rel * xi.abs().max(1e-3)).collect();
    let mut hess = DMatrix::zeros(n, n);
    let f0 = f(x);
    let mut xp = x.to_vec();
    for i in 0..n {
        // Diagonal: (f(x+h) - 2 f(x) + f(x-h)) / h^2
        xp[i] = x[i] + h[i];
        let fp = f(&xp);
        xp[i] = x[i] - h[i];
        let fm = f(&xp);
        xp[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..n {
            xp[i] = x[i] + h[i];
            xp[j] = x[j] + h[j];
            let fpp = f(&xp);
            xp[j] = x[j] - h[j];
            let fpm = f(&xp);
            xp[i] = x[i] - h[i];
            let fmm = f(&xp);
            xp[j] = x[j] + h[j];
            let fmp = f(&xp);
            xp[i] = x[i];
            xp[j] = x[j];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Standard errors from the observed information of a log-likelihood.
///
/// Inverts `-H` where `H` is the Hessian of `loglik` at the MLE and returns
/// the full covariance. Errors when the information matrix is not invertible.
pub(crate) fn observed_information_covariance<F: Fn(&[f64]) -> f64>(
    loglik: F,
    mle: &[f64],
) -> Result<DMatrix<f64>> {
    let hess = numerical_hessian(loglik, mle);
    let info = -hess;
    info.clone()
        .try_inverse()
        .ok_or_else(|| Error::estimation("observed information matrix is singular"))
}
