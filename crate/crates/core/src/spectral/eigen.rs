use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::CsrMatrix;
use crate::error::{Error, Result};

/// Matrices up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 600;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Required `||H v - lambda v||` for unit `v`.
    pub residual_tol: f64,
    pub max_krylov: usize,
    pub cg_tol: f64,
    pub max_cg: usize,
    pub seed: u64,
    /// Shift below the spectrum; Gershgorin's bound when absent.
    pub shift: Option<f64>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            max_krylov: 400,
            cg_tol: 1e-14,
            max_cg: 20_000,
            seed: 0x5eed,
            shift: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// All eigenvalues of a small Hermitian matrix, ascending.
pub fn dense_eigenvalues(h: &CsrMatrix) -> Vec<f64> {
    let m: DMatrix<Complex64> = h.to_dense();
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Conjugate gradients for `(H - shift) x = b`, `H - shift` positive definite.
fn conjugate_gradient(h: &CsrMatrix, shift: f64, b: &[Complex64], opts: &EigenOptions) -> Result<Vec<Complex64>> {
    let n = b.len();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![Complex64::new(0.0, 0.0); n];
    let bnorm = norm(b);
    let mut rr = dot(&r, &r).re;
    for _ in 0..opts.max_cg {
        if rr.sqrt() <= opts.cg_tol * bnorm {
            return Ok(x);
        }
        h.matvec(&p, &mut ap);
        axpy(Complex64::new(-shift, 0.0), &p, &mut ap);
        let curvature = dot(&p, &ap).re;
        if !(curvature > 0.0) {
            return Err(Error::ConvergenceFailure {
                reason: format!("shift {shift} is not below the spectrum"),
            });
        }
        let alpha = rr / curvature;
        axpy(Complex64::new(alpha, 0.0), &p, &mut x);
        axpy(Complex64::new(-alpha, 0.0), &ap, &mut r);
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    Err(Error::ConvergenceFailure {
        reason: format!("inner solve stalled at relative residual {:e}", rr.sqrt() / bnorm),
    })
}

/// Lower bound for the spectrum from Gershgorin discs, used as the shift.
fn gershgorin_lower(h: &CsrMatrix) -> f64 {
    (0..h.dim())
        .map(|i| {
            let (mut center, mut radius) = (0.0, 0.0);
            for (j, v) in h.row(i) {
                if j == i {
                    center = v.re;
                } else {
                    radius += v.norm();
                }
            }
            center - radius
        })
        .fold(f64::INFINITY, f64::min)
}

/// The `count` smallest eigenvalues, by shift-invert Lanczos with full
/// reorthogonalization. The shift sits below the spectrum so that the inner
/// conjugate-gradient solves are positive definite.
pub fn lowest_eigenvalues(h: &CsrMatrix, count: usize, opts: &EigenOptions) -> Result<EigenResult> {
    let n = h.dim();
    if count == 0 {
        return Ok(EigenResult {
            values: vec![],
            residuals: vec![],
        });
    }
    if count > n {
        return Err(Error::InvalidInput(format!("requested {count} eigenvalues of a {n}-dimensional matrix")));
    }
    if n <= DENSE_LIMIT {
        let values: Vec<f64> = dense_eigenvalues(h).into_iter().take(count).collect();
        return Ok(EigenResult {
            residuals: vec![0.0; values.len()],
            values,
        });
    }
    let shift = opts.shift.unwrap_or_else(|| gershgorin_lower(h) - 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|x| *x /= q_norm);

    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let max_krylov = opts.max_krylov.min(n);
    loop {
        let j = basis.len() - 1;
        let mut w = conjugate_gradient(h, shift, &basis[j], opts)?;
        let alpha = dot(&basis[j], &w).re;
        alphas.push(alpha);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        let beta = norm(&w);
        let m = alphas.len();
        let check = m >= count && (m % 5 == 0 || m == max_krylov || beta < 1e-14);
        if check {
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alphas[i];
                if i + 1 < m {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let wanted = &order[..count];
            // residual of (H - shift)^{-1} y = theta y is beta |s_m|
            let converged = wanted.iter().all(|&i| {
                let theta = eig.eigenvalues[i];
                let est = beta * eig.eigenvectors[(m - 1, i)].abs();
                est <= 1e-3 * opts.residual_tol * theta * theta
            });
            if converged || m == max_krylov || beta < 1e-14 {
                let mut values = Vec::with_capacity(count);
                let mut residuals = Vec::with_capacity(count);
                for &i in wanted {
                    let mut y = vec![Complex64::new(0.0, 0.0); n];
                    for (k, v) in basis.iter().enumerate().take(m) {
                        axpy(Complex64::new(eig.eigenvectors[(k, i)], 0.0), v, &mut y);
                    }
                    let yn = norm(&y);
                    y.iter_mut().for_each(|x| *x /= yn);
                    let hy = h.apply(&y);
                    let lambda = dot(&y, &hy).re;
                    let res = hy.iter().zip(&y).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
                    values.push(lambda);
                    residuals.push(res);
                }
                let worst = residuals.iter().copied().fold(0.0, f64::max);
                if worst <= opts.residual_tol {
                    let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(residuals).collect();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let (values, residuals) = pairs.into_iter().unzip();
                    return Ok(EigenResult { values, residuals });
                }
                if m == max_krylov || beta < 1e-14 {
                    return Err(Error::ConvergenceFailure {
                        reason: format!("Lanczos reached {m} vectors with residual {worst:e}"),
                    });
                }
            }
        }
        betas.push(beta);
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
}
