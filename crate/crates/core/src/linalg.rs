//! Reductions and the conjugate-gradient solver shared by every module.
//!
//! Reductions are computed over fixed-size chunks whose partial sums are added
//! in order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};

const CHUNK: usize = 4096;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sum(a: &[f64]) -> f64 {
    if a.len() <= CHUNK {
        return a.iter().sum();
    }
    let partial: Vec<f64> = a.par_chunks(CHUNK).map(|x| x.iter().sum::<f64>()).collect();
    partial.iter().sum()
}

/// `y += alpha * x`
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    if y.len() >= CHUNK * 4 {
        y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi += alpha * xi);
    } else {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    }
}

/// Outcome of a converged CG solve.
#[derive(Debug, Clone, Copy)]
pub struct CgReport {
    pub iterations: usize,
    /// `||b - A x|| / ||b||` of the returned iterate.
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive-definite operator.
///
/// `x` holds the initial guess on entry and the solution on exit. Stops when the
/// true relative residual is at most `tol`; restarts from the current iterate
/// when the recursive residual has drifted from the true one.
pub(crate) fn conjugate_gradient<F>(
    apply: F,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgReport>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgReport {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut iterations = 0;
    let mut true_rel = f64::INFINITY;

    for _restart in 0..4 {
        apply(x, &mut q);
        r.iter_mut().zip(b.iter().zip(&q)).for_each(|(ri, (bi, qi))| *ri = bi - qi);
        true_rel = norm(&r) / b_norm;
        if true_rel <= tol {
            return Ok(CgReport {
                iterations,
                relative_residual: true_rel,
            });
        }
        z.iter_mut().zip(r.iter().zip(inv_diag)).for_each(|(zi, (ri, di))| *zi = ri * di);
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            apply(&p, &mut q);
            let pq = dot(&p, &q);
            if pq <= 0.0 || !pq.is_finite() {
                break;
            }
            let alpha = rz / pq;
            axpy(alpha, &p, x);
            axpy(-alpha, &q, &mut r);
            if norm(&r) <= 0.5 * tol * b_norm {
                break;
            }
            z.iter_mut().zip(r.iter().zip(inv_diag)).for_each(|(zi, (ri, di))| *zi = ri * di);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        if iterations >= max_iter {
            break;
        }
    }
    apply(x, &mut q);
    r.iter_mut().zip(b.iter().zip(&q)).for_each(|(ri, (bi, qi))| *ri = bi - qi);
    let final_rel = norm(&r) / b_norm;
    if final_rel <= tol {
        Ok(CgReport {
            iterations,
            relative_residual: final_rel,
        })
    } else {
        Err(Error::NoConvergence {
            iterations,
            residual: final_rel.min(true_rel),
        })
    }
}
