//! Lane-Emden `q`-densities: the positive solutions of `-Delta w = w^(q-1)`
//! with zero boundary values, `1 <= q < 2`, and the quantities derived from them.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    apply_laplacian, build_domain, dirichlet_energy, l2_norm, solve_poisson, solve_poisson_from, GridDomain,
    ScalarField, ShapeSpec,
};
use crate::linalg;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Tolerance of the nodewise monotonicity check along an exhaustion.
pub const MONOTONE_TOL: f64 = 1e-8;

/// A solved Lane-Emden density together with its solve metadata.
#[derive(Debug, Clone)]
pub struct LaneEmdenDensity {
    pub q: f64,
    pub field: ScalarField,
    /// `||-Delta_h w - w^(q-1)|| / ||w^(q-1)||`.
    pub residual: f64,
    /// Tolerance the solve was run with.
    pub tolerance: f64,
    pub iterations: usize,
    /// Value of the Lane-Emden energy at `field`.
    pub energy: f64,
}

impl LaneEmdenDensity {
    /// Wraps an externally obtained field, e.g. a sampled closed form.
    pub fn from_field(field: ScalarField, q: f64, tolerance: f64) -> Result<Self> {
        check_exponent(q)?;
        let residual = pde_residual(&field, q);
        let energy = lane_emden_energy(&field, q);
        Ok(LaneEmdenDensity {
            q,
            field,
            residual,
            tolerance,
            iterations: 0,
            energy,
        })
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        self.field.domain()
    }

    pub fn sup_norm(&self) -> f64 {
        self.field.sup_norm()
    }
}

pub(crate) fn check_exponent(q: f64) -> Result<()> {
    if (1.0..2.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidExponent {
            value: q,
            range: "[1, 2)",
        })
    }
}

fn positive_power(u: &ScalarField, p: f64) -> ScalarField {
    u.map(|v| if p == 0.0 { 1.0 } else { v.max(0.0).powf(p) })
        .expect("powers of finite values stay finite")
}

/// Relative residual of the Lane-Emden equation.
pub fn pde_residual(w: &ScalarField, q: f64) -> f64 {
    let rhs = positive_power(w, q - 1.0);
    let lw = apply_laplacian(w);
    let diff: Vec<f64> = lw.values().iter().zip(rhs.values()).map(|(a, b)| a - b).collect();
    let denom = linalg::norm(rhs.values());
    if denom == 0.0 {
        linalg::norm(&diff)
    } else {
        linalg::norm(&diff) / denom
    }
}

/// Solves the Lane-Emden equation on `domain` by Picard iteration
/// `u <- (-Delta_h)^(-1) max(u, 0)^(q-1)`, started from `init` or the torsion function.
///
/// A zero (or nonpositive) `init` is a fixed point of the iteration, so it is
/// replaced by the torsion function. Half relaxation switches on once the
/// residual grows between two iterations.
pub fn solve_lane_emden(
    domain: &Arc<GridDomain>,
    q: f64,
    tol: f64,
    max_iter: usize,
    init: Option<&ScalarField>,
) -> Result<LaneEmdenDensity> {
    check_exponent(q)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let inner_tol = (tol * 1e-2).max(1e-14);
    let ones = ScalarField::constant(domain, 1.0);
    if q == 1.0 {
        let w = solve_poisson(&ones, inner_tol)?;
        let residual = pde_residual(&w, q);
        let energy = lane_emden_energy(&w, q);
        return Ok(LaneEmdenDensity {
            q,
            field: w,
            residual,
            tolerance: tol,
            iterations: 1,
            energy,
        });
    }

    let mut u = match init {
        Some(f) if f.max() > 0.0 => {
            if !f.domain().same_as(domain) {
                return Err(Error::DomainMismatch);
            }
            f.map(|v| v.max(0.0))?
        }
        _ => solve_poisson(&ones, inner_tol)?,
    };
    let mut damped = false;
    let mut last = f64::INFINITY;
    for it in 1..=max_iter {
        let rhs = positive_power(&u, q - 1.0);
        let mut next = solve_poisson_from(&rhs, inner_tol, Some(&u))?;
        if damped {
            let vals = next.values().iter().zip(u.values()).map(|(a, b)| 0.5 * (a + b)).collect();
            next = ScalarField::new(domain, vals)?;
        }
        let res = pde_residual(&next, q);
        if res > last {
            damped = true;
        }
        last = res;
        u = next;
        if res <= tol {
            let energy = lane_emden_energy(&u, q);
            return Ok(LaneEmdenDensity {
                q,
                field: u,
                residual: res,
                tolerance: tol,
                iterations: it,
                energy,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: last,
    })
}

/// `1/2 int |grad u|^2 - 1/q int u_+^q`.
pub fn lane_emden_energy(u: &ScalarField, q: f64) -> f64 {
    debug_assert!((1.0..2.0).contains(&q));
    let mass = u.domain().cell_volume() * linalg::sum(positive_power(u, q).values());
    0.5 * dirichlet_energy(u) - mass / q
}

/// `lambda_{2,q}` from the density: `(int w^q)^(-(2-q)/q)`.
pub fn lambda_2q_from_density(d: &LaneEmdenDensity) -> f64 {
    let q = d.q;
    let integral = d.domain().cell_volume() * linalg::sum(positive_power(&d.field, q).values());
    integral.powf(-(2.0 - q) / q)
}

/// Energy value predicted at the minimizer: `(q-2)/(2q) * lambda^(-q/(2-q))`.
pub fn predicted_minimum_energy(lambda_2q: f64, q: f64) -> f64 {
    (q - 2.0) / (2.0 * q) * lambda_2q.powf(-q / (2.0 - q))
}

/// `t^(1/(q-2)) u`: maps a solution of `-Delta u = t u^(q-1)` to one of the unit-coefficient equation.
pub fn scale_solution(u: &ScalarField, t: f64, q: f64) -> Result<ScalarField> {
    check_exponent(q)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {t}")));
    }
    Ok(u.scaled(t.powf(1.0 / (q - 2.0))))
}

/// Outcome of a nested-domain comparison `w1 <= w2`.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    /// `max (w1 - w2)` over the nodes of the smaller domain.
    pub max_violation: f64,
    pub threshold: f64,
    pub shared_nodes: usize,
    pub pass: bool,
}

/// Checks `w_{q,Omega1} <= w_{q,Omega2}` for nested masks on a common lattice.
pub fn comparison_check(d1: &LaneEmdenDensity, d2: &LaneEmdenDensity) -> Result<ComparisonReport> {
    let (g1, g2) = (d1.domain(), d2.domain());
    if !g1.aligned_with(g2) {
        return Err(Error::GridMismatch("different spacing or dimension".into()));
    }
    if d1.q != d2.q {
        return Err(Error::InvalidArgument("densities have different exponents".into()));
    }
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..g1.len() {
        let j = g2
            .node_at(g1.lattice_point(i))
            .ok_or_else(|| Error::GridMismatch(format!("node {i} of the inner domain is outside the outer one")))?;
        max_violation = max_violation.max(d1.field.values()[i] - d2.field.values()[j]);
    }
    let threshold = 10.0 * (d1.tolerance + d2.tolerance);
    Ok(ComparisonReport {
        max_violation,
        threshold,
        shared_nodes: g1.len(),
        pass: max_violation <= threshold,
    })
}

/// Densities on growing truncations of an unbounded set.
#[derive(Debug, Clone)]
pub struct ExhaustionRun {
    pub spec: ShapeSpec,
    pub radii: Vec<f64>,
    pub densities: Vec<LaneEmdenDensity>,
    /// Sup-norm change between consecutive densities on the probe window.
    pub increments: Vec<f64>,
    /// Largest `w_R(x) - w_R'(x)` for `R < R'` over the probe window (negative or tiny when monotone).
    pub max_decrease: f64,
    /// Node count of the probe window (the smallest truncation).
    pub probe_nodes: usize,
}

impl ExhaustionRun {
    pub fn is_monotone(&self) -> bool {
        self.max_decrease <= MONOTONE_TOL
    }

    pub fn final_increment(&self) -> f64 {
        self.increments.last().copied().unwrap_or(0.0)
    }

    pub fn last(&self) -> &LaneEmdenDensity {
        self.densities.last().expect("exhaustion has at least three radii")
    }
}

/// Solves on the truncations of a slab or wave-guide with the given truncation lengths.
pub fn exhaust_density(spec: &ShapeSpec, q: f64, radii: &[f64], tol: f64, h: f64) -> Result<ExhaustionRun> {
    if radii.len() < 3 {
        return Err(Error::InvalidArgument("an exhaustion needs at least three radii".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    let mut densities = Vec::with_capacity(radii.len());
    let mut prev_guess: Option<ScalarField> = None;
    for &r in radii {
        let domain = build_domain(&spec.with_truncation(r)?, h)?;
        // the previous density, zero-extended, is a subsolution and a good start
        let guess = prev_guess.as_ref().map(|p| extend_by_zero(p, &domain));
        let d = solve_lane_emden(&domain, q, tol, DEFAULT_MAX_ITER, guess.as_ref())?;
        prev_guess = Some(d.field.clone());
        densities.push(d);
    }
    let probe = densities[0].domain().clone();
    let mut increments = Vec::new();
    let mut max_decrease = f64::NEG_INFINITY;
    for pair in densities.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let mut inc: f64 = 0.0;
        for i in 0..probe.len() {
            let l = probe.lattice_point(i);
            let ia = a.domain().node_at(l).expect("probe nodes lie in every truncation");
            let ib = b.domain().node_at(l).expect("probe nodes lie in every truncation");
            let diff = b.field.values()[ib] - a.field.values()[ia];
            inc = inc.max(diff.abs());
            max_decrease = max_decrease.max(-diff);
        }
        increments.push(inc);
    }
    Ok(ExhaustionRun {
        spec: spec.clone(),
        radii: radii.to_vec(),
        densities,
        increments,
        max_decrease,
        probe_nodes: probe.len(),
    })
}

/// Copies `f` onto a larger aligned domain, zero on the new nodes.
pub fn extend_by_zero(f: &ScalarField, target: &Arc<GridDomain>) -> ScalarField {
    let src = f.domain();
    let vals = (0..target.len())
        .map(|j| src.node_at(target.lattice_point(j)).map_or(0.0, |i| f.values()[i]))
        .collect();
    ScalarField::new(target, vals).expect("copied values are finite")
}

/// Discrete `L^2` distance, used by tests and reports.
pub fn l2_distance(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    let diff = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x - y)
        .collect::<Vec<_>>();
    if !a.domain().same_as(b.domain()) {
        return Err(Error::DomainMismatch);
    }
    Ok(l2_norm(&ScalarField::new(a.domain(), diff)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(k: i32) -> f64 {
        2f64.powi(-k)
    }

    #[test]
    fn rejects_bad_exponent() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 0.25).unwrap();
        for q in [0.5, 2.0, 2.5, f64::NAN] {
            assert!(matches!(
                solve_lane_emden(&d, q, 1e-8, 10, None),
                Err(Error::InvalidExponent { .. })
            ));
        }
    }

    #[test]
    fn interval_torsion() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), h(7)).unwrap();
        let w = solve_lane_emden(&d, 1.0, 1e-10, DEFAULT_MAX_ITER, None).unwrap();
        assert!((w.field.value_near(&[0.0]).unwrap() - 0.5).abs() < 1e-10);
        assert!(w.residual <= 1e-10);
        assert!((lambda_2q_from_density(&w) - 1.5).abs() < 1e-4);
    }

    #[test]
    fn ball_torsion_in_three_dimensions() {
        let d = build_domain(&ShapeSpec::unit_ball(3), h(6)).unwrap();
        let w = solve_lane_emden(&d, 1.0, 1e-8, DEFAULT_MAX_ITER, None).unwrap();
        assert!((w.field.value_near(&[0.0, 0.0, 0.0]).unwrap() - 1.0 / 6.0).abs() < 2e-3);
    }

    #[test]
    fn energy_basics() {
        let d = build_domain(&ShapeSpec::unit_ball(2), h(5)).unwrap();
        assert_eq!(lane_emden_energy(&ScalarField::zeros(&d), 1.5), 0.0);
        let w = solve_lane_emden(&d, 1.5, 1e-9, DEFAULT_MAX_ITER, None).unwrap();
        assert!(w.energy < 0.0);
        assert!(w.field.min() > 0.0);
    }

    #[test]
    fn scaling_examples() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), h(5)).unwrap();
        let u = ScalarField::from_fn(&d, |x| 1.0 - x[0] * x[0]).unwrap();
        assert_eq!(scale_solution(&u, 1.0, 1.3).unwrap().values(), u.values());
        let half = scale_solution(&u, 2.0, 1.0).unwrap();
        for (a, b) in half.values().iter().zip(u.values()) {
            assert!((a - b / 2.0).abs() < 1e-15);
        }
        let sixteenth = scale_solution(&u, 4.0, 1.5).unwrap();
        for (a, b) in sixteenth.values().iter().zip(u.values()) {
            assert!((a - b / 16.0).abs() < 1e-15);
        }
        assert!(scale_solution(&u, 0.0, 1.5).is_err());
    }

    #[test]
    fn comparison_on_identical_domains_is_exact() {
        let d = build_domain(&ShapeSpec::unit_ball(2), h(4)).unwrap();
        let w = solve_lane_emden(&d, 1.0, 1e-8, DEFAULT_MAX_ITER, None).unwrap();
        let rep = comparison_check(&w, &w).unwrap();
        assert_eq!(rep.max_violation, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn comparison_rejects_misaligned_grids() {
        let a = build_domain(&ShapeSpec::unit_ball(2), h(4)).unwrap();
        let b = build_domain(&ShapeSpec::unit_ball(2), h(5)).unwrap();
        let wa = solve_lane_emden(&a, 1.0, 1e-8, 10, None).unwrap();
        let wb = solve_lane_emden(&b, 1.0, 1e-8, 10, None).unwrap();
        assert!(matches!(comparison_check(&wa, &wb), Err(Error::GridMismatch(_))));
        let big = build_domain(&ShapeSpec::ball(vec![0.0, 0.0], 2.0), h(4)).unwrap();
        let wbig = solve_lane_emden(&big, 1.0, 1e-8, 10, None).unwrap();
        assert!(matches!(comparison_check(&wbig, &wa), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn exhaustion_needs_increasing_radii() {
        let spec = ShapeSpec::slab(2, 1.0, 2.0);
        assert!(exhaust_density(&spec, 1.0, &[2.0, 4.0], 1e-8, h(4)).is_err());
        assert!(exhaust_density(&spec, 1.0, &[2.0, 4.0, 4.0], 1e-8, h(4)).is_err());
        assert!(exhaust_density(&ShapeSpec::unit_ball(2), 1.0, &[2.0, 4.0, 8.0], 1e-8, h(4)).is_err());
    }
}
