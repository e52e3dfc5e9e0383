//! Discrete differential and integral operators on grid fields.

use rayon::prelude::*;

use super::domain::{GridDomain, PAR_THRESHOLD};
use super::field::ScalarField;
use crate::error::Result;
use crate::linalg;

/// `-Delta_h u` with zero Dirichlet extension.
pub fn apply_laplacian(u: &ScalarField) -> ScalarField {
    let mut out = vec![0.0; u.len()];
    u.domain().apply(u.values(), None, &mut out);
    ScalarField::from_vec(u.domain(), out)
}

/// Default CG iteration cap `10 M`.
pub fn default_iteration_cap(domain: &GridDomain) -> usize {
    10 * domain.len()
}

/// Solves `-Delta_h u = f` to relative residual `tol`.
pub fn solve_poisson(f: &ScalarField, tol: f64) -> Result<ScalarField> {
    solve_poisson_from(f, tol, None)
}

/// [`solve_poisson`] with an initial guess.
pub fn solve_poisson_from(f: &ScalarField, tol: f64, guess: Option<&ScalarField>) -> Result<ScalarField> {
    let domain = f.domain();
    let mut x = match guess {
        Some(g) => {
            g.check_same_domain(f)?;
            g.values().to_vec()
        }
        None => vec![0.0; f.len()],
    };
    let h2 = domain.h() * domain.h();
    let inv_diag: Vec<f64> = domain.diagonal().iter().map(|d| h2 / d).collect();
    linalg::conjugate_gradient(
        |u, out| domain.apply(u, None, out),
        &inv_diag,
        f.values(),
        &mut x,
        tol,
        default_iteration_cap(domain),
    )?;
    Ok(ScalarField::from_vec(domain, x))
}

/// Discrete `L^2` inner product `h^N sum u_i v_i`.
pub fn l2_inner(u: &ScalarField, v: &ScalarField) -> Result<f64> {
    u.check_same_domain(v)?;
    Ok(u.domain().cell_volume() * linalg::dot(u.values(), v.values()))
}

/// Discrete `L^2` norm.
pub fn l2_norm(u: &ScalarField) -> f64 {
    (u.domain().cell_volume() * linalg::dot(u.values(), u.values())).sqrt()
}

/// `int |grad u|^2`, computed as `<u, -Delta_h u>`.
pub fn dirichlet_energy(u: &ScalarField) -> f64 {
    let au = apply_laplacian(u);
    u.domain().cell_volume() * linalg::dot(u.values(), au.values())
}

/// Per-node `|grad_h u|^2 / max(u, floor)^2`.
///
/// Central differences where both axis neighbors are interior, one-sided
/// differences against the interior neighbor next to the boundary, and zero
/// along an axis where both neighbors are exterior.
pub fn gradient_norm_squared_field(u: &ScalarField, floor: f64) -> ScalarField {
    let grad2 = gradient_squared(u);
    let vals = grad2
        .iter()
        .zip(u.values())
        .map(|(g, &v)| {
            let d = v.max(floor);
            g / (d * d)
        })
        .collect();
    ScalarField::from_vec(u.domain(), vals)
}

/// Per-node `|grad_h u|^2` with the differencing rule of [`gradient_norm_squared_field`].
pub fn gradient_squared(u: &ScalarField) -> Vec<f64> {
    let domain = u.domain();
    let dim = domain.dim();
    let h = domain.h();
    let vals = u.values();
    let node = |i: usize| -> f64 {
        let mut g2 = 0.0;
        for k in 0..dim {
            let back = domain.neighbor(i, k, false);
            let fwd = domain.neighbor(i, k, true);
            let g = match (back, fwd) {
                (Some(b), Some(f)) => (vals[f] - vals[b]) / (2.0 * h),
                (None, Some(f)) => (vals[f] - vals[i]) / h,
                (Some(b), None) => (vals[i] - vals[b]) / h,
                (None, None) => 0.0,
            };
            g2 += g * g;
        }
        g2
    };
    if vals.len() >= PAR_THRESHOLD {
        (0..vals.len()).into_par_iter().map(node).collect()
    } else {
        (0..vals.len()).map(node).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_domain, ShapeSpec};

    #[test]
    fn laplacian_of_zero_is_zero() {
        let d = build_domain(&ShapeSpec::unit_ball(2), 0.125).unwrap();
        let z = apply_laplacian(&ScalarField::zeros(&d));
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn second_difference_of_quadratic_is_exact() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 0.125).unwrap();
        let u = ScalarField::from_fn(&d, |x| (1.0 - x[0] * x[0]) / 2.0).unwrap();
        let lu = apply_laplacian(&u);
        // boundary values of the quadratic are zero, so every node is exact
        for v in lu.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rectangle_quadratic_away_from_boundary() {
        let d = build_domain(&ShapeSpec::rectangle(vec![-1.0, -1.0], vec![1.0, 1.0]), 0.125).unwrap();
        let u = ScalarField::from_fn(&d, |x| x[0] * x[0]).unwrap();
        let lu = apply_laplacian(&u);
        let depth = d.boundary_depth();
        for i in 0..d.len() {
            if depth[i] > 1 {
                assert!((lu.values()[i] + 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn poisson_on_interval_is_exact() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 2f64.powi(-7)).unwrap();
        let u = solve_poisson(&ScalarField::constant(&d, 1.0), 1e-13).unwrap();
        assert!((u.value_near(&[0.0]).unwrap() - 0.5).abs() < 1e-10);
        let z = solve_poisson(&ScalarField::zeros(&d), 1e-10).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn disk_torsion_center() {
        let d = build_domain(&ShapeSpec::unit_ball(2), 2f64.powi(-7)).unwrap();
        let u = solve_poisson(&ScalarField::constant(&d, 1.0), 1e-10).unwrap();
        assert!((u.value_near(&[0.0, 0.0]).unwrap() - 0.25).abs() < 1e-3);
    }

    #[test]
    fn inner_product_weights() {
        let d = build_domain(&ShapeSpec::unit_ball(2), 0.5).unwrap();
        let mut v = vec![0.0; d.len()];
        v[0] = 1.0;
        let u = ScalarField::new(&d, v).unwrap();
        assert_eq!(l2_inner(&u, &u).unwrap(), 0.25);
        let mut w = vec![0.0; d.len()];
        w[1] = 1.0;
        let w = ScalarField::new(&d, w).unwrap();
        assert_eq!(l2_inner(&u, &w).unwrap(), 0.0);

        let line = build_domain(&ShapeSpec::interval(-1.0, 1.0), 0.25).unwrap();
        let one = ScalarField::constant(&line, 1.0);
        assert_eq!(l2_inner(&one, &one).unwrap(), 1.75);
    }

    #[test]
    fn inner_product_rejects_foreign_fields() {
        let a = build_domain(&ShapeSpec::unit_ball(2), 0.25).unwrap();
        let b = build_domain(&ShapeSpec::unit_ball(2), 0.125).unwrap();
        assert!(l2_inner(&ScalarField::zeros(&a), &ScalarField::zeros(&b)).is_err());
    }

    #[test]
    fn energy_of_single_spike() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 0.5).unwrap();
        let mut v = vec![0.0; d.len()];
        v[d.node_near(&[0.0]).unwrap()] = 1.0;
        let u = ScalarField::new(&d, v).unwrap();
        assert!((dirichlet_energy(&u) - 4.0).abs() < 1e-14);
        assert_eq!(dirichlet_energy(&ScalarField::zeros(&d)), 0.0);
    }

    #[test]
    fn energy_of_sine_mode() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 2f64.powi(-7)).unwrap();
        let u = ScalarField::from_fn(&d, |x| (std::f64::consts::FRAC_PI_2 * x[0]).cos()).unwrap();
        let expected = std::f64::consts::PI.powi(2) / 4.0 * l2_norm(&u).powi(2);
        assert!((dirichlet_energy(&u) / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gradient_field_rules() {
        let d = build_domain(&ShapeSpec::interval(0.0, 4.0), 0.25).unwrap();
        let c = gradient_norm_squared_field(&ScalarField::constant(&d, 2.0), 1e-4);
        assert!(c.values().iter().all(|&v| v == 0.0));

        let lin = ScalarField::from_fn(&d, |x| x[0]).unwrap();
        let g = gradient_norm_squared_field(&lin, 1e-4);
        for i in 0..d.len() {
            let x = d.coords(i)[0];
            assert!((g.values()[i] - 1.0 / (x * x)).abs() < 1e-12 * g.values()[i]);
        }

        let small = ScalarField::from_fn(&d, |x| 1e-6 * x[0]).unwrap();
        let g = gradient_norm_squared_field(&small, 1e-3);
        assert!(g.values().iter().all(|v| v.is_finite() && *v <= 1e-12 / 1e-6 + 1e-18));
    }
}
