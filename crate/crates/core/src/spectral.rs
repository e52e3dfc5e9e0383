//! Bottom of the spectrum of `-Delta_h` and `-Delta_h + V`, and the
//! nonlinear Poincare constants `lambda_{2,gamma}`.

use std::sync::Arc;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{apply_laplacian, dirichlet_energy, l2_norm, solve_poisson, GridDomain, ScalarField};
use crate::linalg::{self, conjugate_gradient};

/// Iteration cap of the eigensolvers.
pub const EIGEN_MAX_ITER: usize = 50_000;
/// Iteration cap of the `lambda_{2,gamma}` minimizer.
pub const GAMMA_MAX_ITER: usize = 500;
/// Consecutive small changes required before the `lambda_{2,gamma}` minimizer stops.
pub const GAMMA_STALL_WINDOW: usize = 10;

/// An eigenpair estimate.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalue: f64,
    /// Unit discrete `L^2` norm, positive sum.
    pub eigenfunction: ScalarField,
    /// `||H u - lambda u||_{L^2}` for the returned pair.
    pub residual: f64,
    pub iterations: usize,
    pub tolerance: f64,
}

/// Eigenvalue summary for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSummary {
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl SpectralResult {
    pub fn summary(&self) -> SpectralSummary {
        SpectralSummary {
            eigenvalue: self.eigenvalue,
            residual: self.residual,
            iterations: self.iterations,
        }
    }
}

/// A nonpositive potential on a grid.
#[derive(Debug, Clone)]
pub struct Potential {
    field: ScalarField,
    source: String,
}

impl Potential {
    /// Checks `V <= 0` at every node.
    pub fn new(field: ScalarField, source: impl Into<String>) -> Result<Self> {
        if let Some(i) = field.values().iter().position(|&v| v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "potential must be nonpositive, node {i} has {}",
                field.values()[i]
            )));
        }
        Ok(Potential {
            field,
            source: source.into(),
        })
    }

    pub fn zero(domain: &Arc<GridDomain>) -> Self {
        Potential {
            field: ScalarField::zeros(domain),
            source: "zero".into(),
        }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        self.field.domain()
    }

    /// `c V` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("potential scale must be nonnegative, got {c}")));
        }
        Ok(Potential {
            field: self.field.scaled(c),
            source: format!("{c}*{}", self.source),
        })
    }

    /// `V - s` for a nonnegative shift field `s`.
    pub fn shifted_down(&self, s: &ScalarField) -> Result<Self> {
        if !s.domain().same_as(self.domain()) {
            return Err(Error::DomainMismatch);
        }
        let vals = self.values().iter().zip(s.values()).map(|(v, s)| v - s).collect();
        Potential::new(ScalarField::new(self.domain(), vals)?, format!("{}-shift", self.source))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Smallest eigenvalue of `-Delta_h`.
///
/// Locally optimal block preconditioned CG with block size one, preconditioned
/// by an inexact inverse of `-Delta_h` (a short CG solve); with an exact
/// inverse the update direction is the inverse-power step.
pub fn principal_eigenvalue(domain: &Arc<GridDomain>, tol: f64) -> Result<SpectralResult> {
    check_tol(tol)?;
    let h2 = domain.h() * domain.h();
    let inv_diag: Vec<f64> = domain.diagonal().iter().map(|d| h2 / d).collect();
    let cap = 10 * domain.len();
    let precond = |r: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        // a loose solve is enough for a preconditioner
        let _ = conjugate_gradient(|u, o| domain.apply(u, None, o), &inv_diag, r, out, 1e-3, cap);
    };
    let start = solve_poisson(&ScalarField::constant(domain, 1.0), 1e-6)?;
    lobpcg(domain, None, start.into_values(), precond, tol)
}

/// Smallest eigenvalue of `-Delta_h + V`.
///
/// LOBPCG preconditioned by the inverse diagonal of the shifted operator
/// `-Delta_h + V - sigma`, `sigma = min V - 1`.
pub fn schrodinger_ground_state(domain: &Arc<GridDomain>, v: &Potential, tol: f64) -> Result<SpectralResult> {
    check_tol(tol)?;
    if !v.domain().same_as(domain) {
        return Err(Error::DomainMismatch);
    }
    let h2 = domain.h() * domain.h();
    let sigma = v.field().min().min(0.0) - 1.0;
    let inv_diag: Vec<f64> = domain
        .diagonal()
        .iter()
        .zip(v.values())
        .map(|(d, vi)| 1.0 / (d / h2 + vi - sigma))
        .collect();
    let precond = |r: &[f64], out: &mut [f64]| {
        out.iter_mut().zip(r.iter().zip(&inv_diag)).for_each(|(o, (ri, di))| *o = ri * di);
    };
    let start = solve_poisson(&ScalarField::constant(domain, 1.0), 1e-6)?;
    lobpcg(domain, Some(v.values()), start.into_values(), precond, tol)
}

/// Stops when the relative change of the Rayleigh quotient is at most `tol`
/// and `||H x - lambda x|| <= sqrt(tol) max(|lambda|, 1) ||x||`.
fn lobpcg<P>(
    domain: &Arc<GridDomain>,
    potential: Option<&[f64]>,
    mut x: Vec<f64>,
    mut precond: P,
    tol: f64,
) -> Result<SpectralResult>
where
    P: FnMut(&[f64], &mut [f64]),
{
    let n = domain.len();
    let apply = |u: &[f64], out: &mut [f64]| domain.apply(u, potential, out);
    let scale = |v: &mut [f64], c: f64| v.iter_mut().for_each(|a| *a *= c);

    let nx = linalg::norm(&x);
    if nx == 0.0 {
        x = vec![1.0; n];
    }
    let nx = linalg::norm(&x);
    scale(&mut x, 1.0 / nx);
    let mut hx = vec![0.0; n];
    apply(&x, &mut hx);
    let mut lambda = linalg::dot(&x, &hx);

    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut p: Vec<f64> = Vec::new();
    let mut prev = f64::INFINITY;
    let res_tol = tol.sqrt();

    for it in 1..=EIGEN_MAX_ITER {
        if it % 25 == 0 {
            // refresh the tracked product against drift
            apply(&x, &mut hx);
            lambda = linalg::dot(&x, &hx);
        }
        r.iter_mut()
            .zip(hx.iter().zip(&x))
            .for_each(|(ri, (a, b))| *ri = a - lambda * b);
        let rn = linalg::norm(&r);
        let change = (prev - lambda).abs() / lambda.abs().max(1e-300);
        if change <= tol && rn <= res_tol * lambda.abs().max(1.0) {
            return Ok(finish(domain, x, lambda, rn, it, tol));
        }
        prev = lambda;

        precond(&r, &mut w);
        // orthonormalize [x, w, p]
        let mut basis: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(2);
        let mut cands = vec![std::mem::take(&mut w)];
        if !p.is_empty() {
            cands.push(std::mem::take(&mut p));
        }
        for mut v in cands {
            for _ in 0..2 {
                let c = linalg::dot(&x, &v);
                linalg::axpy(-c, &x, &mut v);
                for (b, _) in &basis {
                    let c = linalg::dot(b, &v);
                    linalg::axpy(-c, b, &mut v);
                }
            }
            let nv = linalg::norm(&v);
            if nv > 1e-12 && nv.is_finite() {
                scale(&mut v, 1.0 / nv);
                let mut hv = vec![0.0; n];
                apply(&v, &mut hv);
                basis.push((v, hv));
            }
        }
        if basis.is_empty() {
            return Ok(finish(domain, x, lambda, rn, it, tol));
        }
        let k = basis.len() + 1;
        let mut g = Matrix3::<f64>::zeros();
        g[(0, 0)] = lambda;
        for (a, (_, hva)) in basis.iter().enumerate() {
            g[(0, a + 1)] = linalg::dot(&x, hva);
            g[(a + 1, 0)] = g[(0, a + 1)];
            for (b, (vb, _)) in basis.iter().enumerate().skip(a) {
                let val = linalg::dot(vb, hva);
                g[(a + 1, b + 1)] = val;
                g[(b + 1, a + 1)] = val;
            }
        }
        let sub = g.view((0, 0), (k, k)).into_owned();
        let eig = SymmetricEigen::new(sub);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let c = eig.eigenvectors.column(imin);
        let mut np = vec![0.0; n];
        let mut nhp = vec![0.0; n];
        for (a, (va, hva)) in basis.iter().enumerate() {
            linalg::axpy(c[a + 1], va, &mut np);
            linalg::axpy(c[a + 1], hva, &mut nhp);
        }
        scale(&mut x, c[0]);
        scale(&mut hx, c[0]);
        linalg::axpy(1.0, &np, &mut x);
        linalg::axpy(1.0, &nhp, &mut hx);
        let nx = linalg::norm(&x);
        scale(&mut x, 1.0 / nx);
        scale(&mut hx, 1.0 / nx);
        lambda = linalg::dot(&x, &hx);
        p = np;
        w = vec![0.0; n];
    }
    Err(Error::NoConvergence {
        iterations: EIGEN_MAX_ITER,
        residual: linalg::norm(&r),
    })
}

fn finish(domain: &Arc<GridDomain>, mut x: Vec<f64>, lambda: f64, rn: f64, it: usize, tol: f64) -> SpectralResult {
    let s = if linalg::sum(&x) < 0.0 { -1.0 } else { 1.0 };
    // unit discrete L2 norm
    let c = s / domain.cell_volume().sqrt();
    x.iter_mut().for_each(|v| *v *= c);
    let f = ScalarField::new(domain, x).expect("eigenvector is finite");
    let nrm = l2_norm(&f);
    let f = f.scaled(1.0 / nrm);
    SpectralResult {
        eigenvalue: lambda,
        eigenfunction: f,
        // Euclidean and discrete L2 residuals agree for a unit vector
        residual: rn,
        iterations: it,
        tolerance: tol,
    }
}

/// `(int |grad u|^2 + int V u^2) / int u^2`.
pub fn rayleigh_quotient(u: &ScalarField, v: Option<&Potential>) -> Result<f64> {
    let mass = l2_norm(u).powi(2);
    if mass == 0.0 {
        return Err(Error::ZeroField);
    }
    let mut num = dirichlet_energy(u);
    if let Some(v) = v {
        if !v.domain().same_as(u.domain()) {
            return Err(Error::DomainMismatch);
        }
        let s: f64 = u.values().iter().zip(v.values()).map(|(a, b)| b * a * a).sum();
        num += u.domain().cell_volume() * s;
    }
    Ok(num / mass)
}

/// Minimizer of `int |grad u|^2 / ||u||_gamma^2` with diagnostics.
#[derive(Debug, Clone)]
pub struct GammaMinimizer {
    pub gamma: f64,
    pub value: f64,
    /// Nonnegative, unit `L^gamma` norm.
    pub minimizer: ScalarField,
    pub iterations: usize,
}

fn check_gamma(dim: usize, gamma: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidExponent {
            value: gamma,
            range: "[1, inf)",
        });
    }
    if dim >= 3 {
        let crit = 2.0 * dim as f64 / (dim as f64 - 2.0);
        if gamma >= crit {
            return Err(Error::InvalidExponent {
                value: gamma,
                range: "[1, 2N/(N-2))",
            });
        }
    }
    Ok(())
}

fn gamma_norm(u: &[f64], gamma: f64, vol: f64) -> f64 {
    (vol * u.iter().map(|v| v.abs().powf(gamma)).sum::<f64>()).powf(1.0 / gamma)
}

/// `lambda_{2,gamma}` of the grid domain.
pub fn lambda_2gamma(domain: &Arc<GridDomain>, gamma: f64, tol: f64) -> Result<f64> {
    Ok(minimize_lambda_2gamma(domain, gamma, tol)?.value)
}

/// Projected gradient descent on the `gamma`-Rayleigh ratio.
///
/// The gradient is taken in the `H^1_0` metric (preconditioned by `(-Delta_h)^{-1}`), so a
/// unit step is one nonlinear inverse-iteration step. Armijo backtracking from
/// 1, then absolute value and `L^gamma` normalization. Starts from the
/// principal eigenfunction.
pub fn minimize_lambda_2gamma(domain: &Arc<GridDomain>, gamma: f64, tol: f64) -> Result<GammaMinimizer> {
    check_gamma(domain.dim(), gamma)?;
    check_tol(tol)?;
    let vol = domain.cell_volume();
    let inner_tol = (tol * 1e-2).clamp(1e-13, 1e-8);
    let ratio = |u: &[f64], au: &[f64]| -> (f64, f64) {
        let e = vol * linalg::dot(u, au);
        let g = gamma_norm(u, gamma, vol);
        (e / (g * g), e)
    };
    let normalize = |u: &mut Vec<f64>| {
        let g = gamma_norm(u, gamma, vol);
        u.iter_mut().for_each(|v| *v = v.abs() / g);
    };

    let mut u = principal_eigenvalue(domain, tol.max(1e-10))?.eigenfunction.into_values();
    normalize(&mut u);
    let mut au = vec![0.0; u.len()];
    domain.apply(&u, None, &mut au);
    let (mut value, _) = ratio(&u, &au);
    let mut stall = 0;
    let mut solve_guess = u.clone();
    for it in 1..=GAMMA_MAX_ITER {
        // u has unit gamma norm, so R(u) = E
        let rhs: Vec<f64> = u
            .iter()
            .map(|v| if gamma == 1.0 { 1.0 } else { v.powf(gamma - 1.0) })
            .collect();
        let rhs_field = ScalarField::new(domain, rhs)?;
        let guess = ScalarField::new(domain, solve_guess.clone())?;
        let z = crate::grid::solve_poisson_from(&rhs_field, inner_tol, Some(&guess))?;
        solve_guess = z.values().to_vec();
        let d: Vec<f64> = u.iter().zip(z.values()).map(|(ui, zi)| value * zi - ui).collect();
        let mut ad = vec![0.0; d.len()];
        domain.apply(&d, None, &mut ad);
        let slope = -2.0 * vol * linalg::dot(&d, &ad);
        let mut tau = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let cand: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + tau * b).collect();
            let acand: Vec<f64> = au.iter().zip(&ad).map(|(a, b)| a + tau * b).collect();
            if gamma_norm(&cand, gamma, vol) > 0.0 {
                let (r, _) = ratio(&cand, &acand);
                if r <= value + 1e-4 * tau * slope {
                    accepted = Some(cand);
                    break;
                }
            }
            tau *= 0.5;
        }
        let Some(mut next) = accepted else {
            // no descent available: stationary to working precision
            return Ok(GammaMinimizer {
                gamma,
                value,
                minimizer: ScalarField::new(domain, u)?,
                iterations: it,
            });
        };
        normalize(&mut next);
        domain.apply(&next, None, &mut au);
        let (new_value, _) = ratio(&next, &au);
        let change = (value - new_value).abs() / new_value.abs();
        u = next;
        value = new_value;
        if change < tol {
            stall += 1;
            if stall >= GAMMA_STALL_WINDOW {
                return Ok(GammaMinimizer {
                    gamma,
                    value,
                    minimizer: ScalarField::new(domain, u)?,
                    iterations: it,
                });
            }
        } else {
            stall = 0;
        }
    }
    Err(Error::NoConvergence {
        iterations: GAMMA_MAX_ITER,
        residual: value,
    })
}

/// `||H u - lambda u||_{L^2}` for an arbitrary pair.
pub fn eigen_residual(u: &ScalarField, lambda: f64, v: Option<&Potential>) -> Result<f64> {
    let mut hu = apply_laplacian(u).into_values();
    if let Some(v) = v {
        if !v.domain().same_as(u.domain()) {
            return Err(Error::DomainMismatch);
        }
        hu.iter_mut()
            .zip(v.values().iter().zip(u.values()))
            .for_each(|(h, (vi, ui))| *h += vi * ui);
    }
    let r: Vec<f64> = hu.iter().zip(u.values()).map(|(a, b)| a - lambda * b).collect();
    Ok((u.domain().cell_volume() * linalg::dot(&r, &r)).sqrt())
}
