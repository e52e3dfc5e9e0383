//! Comparisons against values computed here by independent means.

use std::f64::consts::PI;

use hardy_lane_emden::grid::{apply_laplacian, build_domain, ScalarField, ShapeSpec};
use hardy_lane_emden::hardy::{talenti_constant, unit_ball_volume};
use hardy_lane_emden::lane_emden::solve_lane_emden;
use hardy_lane_emden::spectral::principal_eigenvalue;
use statrs::function::gamma::gamma;

fn bessel_j0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -(x * x) / (4.0 * (k * k) as f64);
        sum += term;
    }
    sum
}

fn first_bessel_zero() -> f64 {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if bessel_j0(a) * bessel_j0(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn ball_volumes_match_gamma_function() {
    for n in 1..=9 {
        let exact = PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0);
        let v = unit_ball_volume(n).unwrap();
        assert!((v - exact).abs() <= 1e-12 * exact, "N={n}: {v} vs {exact}");
    }
}

#[test]
fn talenti_constant_matches_gamma_function() {
    for n in 3..=9 {
        let nf = n as f64;
        let exact = PI * nf * (nf - 2.0) * (gamma(nf / 2.0) / gamma(nf)).powf(2.0 / nf);
        let t = talenti_constant(n).unwrap();
        assert!((t - exact).abs() <= 1e-12 * exact, "N={n}: {t} vs {exact}");
    }
}

#[test]
fn disk_principal_eigenvalue_matches_bessel_zero() {
    let j = first_bessel_zero();
    assert!((j - 2.404825557695773).abs() < 1e-12);
    let domain = build_domain(&ShapeSpec::unit_ball(2), 1.0 / 64.0).unwrap();
    let l = principal_eigenvalue(&domain, 1e-10).unwrap().eigenvalue;
    assert!((l / (j * j) - 1.0).abs() <= 5e-3, "{l} vs {}", j * j);
}

/// Nonlinear successive over-relaxation on the assembled stencil. For `q = 3/2`
/// each nodal equation `a u + s = sqrt(u)` has the closed-form positive root
/// `sqrt(u) = (1 + sqrt(1 - 4 a s)) / (2 a)`.
fn nodal_relaxation(domain: &std::sync::Arc<hardy_lane_emden::grid::GridDomain>) -> Vec<f64> {
    let n = domain.len();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut diag = vec![0.0; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = apply_laplacian(&ScalarField::new(domain, e).unwrap());
        for (i, &a) in col.values().iter().enumerate() {
            if i == j {
                diag[i] = a;
            } else if a != 0.0 {
                rows[i].push((j, a));
            }
        }
    }
    let mut u = vec![0.1; n];
    let omega = 1.9;
    for _ in 0..100_000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let s: f64 = rows[i].iter().map(|&(j, a)| a * u[j]).sum();
            let a = diag[i];
            let t = (1.0 + (1.0 - 4.0 * a * s).sqrt()) / (2.0 * a);
            let next = (1.0 - omega) * u[i] + omega * t * t;
            let next = next.max(0.0);
            change = change.max((next - u[i]).abs());
            u[i] = next;
        }
        if change < 1e-14 {
            break;
        }
    }
    u
}

#[test]
fn disk_density_matches_nodal_relaxation() {
    let domain = build_domain(&ShapeSpec::unit_ball(2), 1.0 / 64.0).unwrap();
    let d = solve_lane_emden(&domain, 1.5, 1e-10, 200, None).unwrap();
    let oracle = nodal_relaxation(&domain);
    let err = d
        .field
        .values()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-5, "max difference {err}");
}
