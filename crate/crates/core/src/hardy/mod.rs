//! Hardy-Lane-Emden weights and forms, the inequalities built on them, and
//! ground-state energy certificates.

mod certificate;
mod constants;

use serde::Serialize;

pub use certificate::{
    certify, BoundCertificate, CertifyOptions, Certification, FailReason, PotentialChoice, TestChoice, Tolerances,
    Verdict, CERTIFICATE_SCHEMA_VERSION,
};
pub use constants::{
    corollary_bound, dorin_factor, gamma_half_integer, moser_constant, moser_constant_2d, perturbation_margin,
    talenti_constant, unit_ball_volume, unit_disk_lambda_2gamma, DEFAULT_MOSER_GAMMA, MOSER_DISK_SPACING,
};

use crate::corpus::{TestField, SUPPORT_MARGIN};
use crate::error::{Error, Result};
use crate::grid::{apply_laplacian, dirichlet_energy, gradient_norm_squared_field, ScalarField};
use crate::lane_emden::LaneEmdenDensity;
use crate::linalg;
use crate::spectral::{lambda_2gamma, Potential};

/// Relative slack per unit of grid spacing for discrete versions of continuum inequalities.
pub const SLACK_PER_H: f64 = 5.0;
/// Relative slack of the double-sided `lambda_{2,gamma}` estimate.
pub const BILAT_SLACK: f64 = 0.02;
/// Pass threshold of the ground-state representation residual.
pub const GSR_THRESHOLD: f64 = 0.05;
/// The ground-state representation is checked on nodes at least this deep.
pub const GSR_MIN_DEPTH: u32 = 4;
/// Rounding allowance of the admissibility test.
pub const ADMISSIBILITY_EPS: f64 = 1e-12;

/// The two summands of the Hardy-Lane-Emden weight
/// `(1/delta)(1 - 1/delta)|grad w / w|^2 + (1/delta) w^(q-2)`.
#[derive(Debug, Clone)]
pub struct HardyWeight {
    pub delta: f64,
    pub grad_term: ScalarField,
    pub density_term: ScalarField,
    pub floor: f64,
}

impl HardyWeight {
    /// Node-wise sum of both terms.
    pub fn total(&self) -> Vec<f64> {
        self.grad_term
            .values()
            .iter()
            .zip(self.density_term.values())
            .map(|(a, b)| a + b)
            .collect()
    }
}

fn check_positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be positive, got {v}")))
    }
}

pub fn hardy_weight(d: &LaneEmdenDensity, delta: f64, floor: f64) -> Result<HardyWeight> {
    check_positive(delta, "delta")?;
    check_positive(floor, "floor")?;
    let g = gradient_norm_squared_field(&d.field, floor);
    let c = (1.0 / delta) * (1.0 - 1.0 / delta);
    let grad_term = g.scaled(c);
    let density_term = d.field.map(|w| w.max(floor).powf(d.q - 2.0) / delta)?;
    Ok(HardyWeight {
        delta,
        grad_term,
        density_term,
        floor,
    })
}

/// One quadratic-form comparison `int weight phi^2 <= int |grad phi|^2`.
#[derive(Debug, Clone, Serialize)]
pub struct HardyCheck {
    pub delta: f64,
    pub test_id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub pass: bool,
}

/// Evaluates the Hardy-Lane-Emden inequality for each test field with the default gradient floor.
pub fn check_hardy(d: &LaneEmdenDensity, delta: f64, tests: &[TestField]) -> Result<Vec<HardyCheck>> {
    let floor = crate::grid::default_floor(&d.field);
    check_hardy_with_floor(d, delta, tests, floor)
}

pub fn check_hardy_with_floor(
    d: &LaneEmdenDensity,
    delta: f64,
    tests: &[TestField],
    floor: f64,
) -> Result<Vec<HardyCheck>> {
    let weight = hardy_weight(d, delta, floor)?.total();
    let domain = d.domain();
    let depth = domain.boundary_depth();
    let h = domain.h();
    let vol = domain.cell_volume();
    tests
        .iter()
        .map(|t| {
            if !t.field.domain().same_as(domain) {
                return Err(Error::DomainMismatch);
            }
            if let Some(i) = (0..depth.len()).find(|&i| depth[i] <= SUPPORT_MARGIN && t.field.values()[i] != 0.0) {
                return Err(Error::SupportTooClose(format!(
                    "test field `{}` is nonzero at node {i}, {} layer(s) from the boundary",
                    t.id, depth[i]
                )));
            }
            let lhs = vol
                * weight
                    .iter()
                    .zip(t.field.values())
                    .map(|(wt, p)| wt * p * p)
                    .sum::<f64>();
            let rhs = dirichlet_energy(&t.field);
            let margin = rhs - lhs;
            Ok(HardyCheck {
                delta,
                test_id: t.id.clone(),
                lhs,
                rhs,
                margin,
                pass: margin >= -SLACK_PER_H * h * rhs,
            })
        })
        .collect()
}

/// `V = -|grad w / w|^2 / 4`, the largest admissible potential.
pub fn limit_potential(d: &LaneEmdenDensity, floor: f64) -> Result<Potential> {
    check_positive(floor, "floor")?;
    let g = gradient_norm_squared_field(&d.field, floor);
    // -0.0 would be fine but keeps the output tidy
    let v = g.map(|x| if x == 0.0 { 0.0 } else { -0.25 * x })?;
    Potential::new(v, format!("limit_potential(q={})", d.q))
}

/// Share of nodes where `0 >= V >= -|grad w / w|^2 / 4`.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub fraction: f64,
    pub violating_nodes: usize,
    /// Node with the largest violation, if any.
    pub worst_node: Option<usize>,
    pub worst_point: Option<Vec<f64>>,
    pub worst_violation: f64,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violating_nodes == 0
    }
}

pub fn check_admissible(v: &Potential, d: &LaneEmdenDensity, floor: f64) -> Result<AdmissibilityReport> {
    check_positive(floor, "floor")?;
    if !v.domain().same_as(d.domain()) {
        return Err(Error::DomainMismatch);
    }
    let g = gradient_norm_squared_field(&d.field, floor);
    let mut bad = 0;
    let mut worst: Option<(usize, f64)> = None;
    for (i, (&vi, &gi)) in v.values().iter().zip(g.values()).enumerate() {
        let lower = -0.25 * gi - ADMISSIBILITY_EPS;
        let violation = (lower - vi).max(vi);
        if violation > 0.0 {
            bad += 1;
            if worst.is_none_or(|(_, w)| violation > w) {
                worst = Some((i, violation));
            }
        }
    }
    let n = v.values().len();
    let dim = d.domain().dim();
    Ok(AdmissibilityReport {
        fraction: (n - bad) as f64 / n as f64,
        violating_nodes: bad,
        worst_node: worst.map(|(i, _)| i),
        worst_point: worst.map(|(i, _)| d.domain().coords(i)[..dim].to_vec()),
        worst_violation: worst.map_or(0.0, |(_, w)| w),
    })
}

/// `||w||_inf^(q-2) / 2`.
pub fn theorem_bound(d: &LaneEmdenDensity) -> f64 {
    0.5 * d.field.sup_norm().powf(d.q - 2.0)
}

/// Both sides of the local `L^inf` estimate on one ball.
#[derive(Debug, Clone, Serialize)]
pub struct LinftyReport {
    pub center: Vec<f64>,
    pub r0: f64,
    pub alpha: f64,
    pub constant: f64,
    /// `max w` over nodes in `B_{R0/2}`.
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs / lhs`.
    pub looseness: f64,
    pub pass: bool,
}

/// `||w||_{L^inf(B_{R0/2})} <= C [ (mean_{B_R0} w^alpha)^(1/alpha) + (1/4)^(1/(2-q)) R0^(2/(2-q)) ]`.
pub fn check_linfty_estimate(d: &LaneEmdenDensity, center: &[f64], r0: f64, alpha: f64) -> Result<LinftyReport> {
    check_positive(r0, "R0")?;
    if !(alpha >= 2.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be at least 2, got {alpha}")));
    }
    let domain = d.domain();
    let dim = domain.dim();
    if center.len() != dim {
        return Err(Error::InvalidArgument(format!("center must have {dim} coordinates")));
    }
    let not_contained = || Error::BallNotContained {
        center: center.to_vec(),
        radius: r0,
    };
    // every lattice point of the closed ball must be an interior node
    let h = domain.h();
    let lo: Vec<i64> = center.iter().map(|c| ((c - r0) / h).floor() as i64).collect();
    let hi: Vec<i64> = center.iter().map(|c| ((c + r0) / h).ceil() as i64).collect();
    let mut inner_max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut idx = lo.clone();
    loop {
        let x: Vec<f64> = idx.iter().map(|&l| l as f64 * h).collect();
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
        if r2 <= r0 * r0 {
            let i = domain.node_at(&idx).ok_or_else(not_contained)?;
            let w = d.field.values()[i].max(0.0);
            sum += w.powf(alpha);
            count += 1;
            if r2 <= 0.25 * r0 * r0 {
                inner_max = inner_max.max(w);
            }
        }
        let mut k = 0;
        loop {
            if k == dim {
                break;
            }
            idx[k] += 1;
            if idx[k] <= hi[k] {
                break;
            }
            idx[k] = lo[k];
            k += 1;
        }
        if k == dim {
            break;
        }
    }
    if count == 0 || inner_max == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument("ball contains no grid nodes".into()));
    }
    let q = d.q;
    let constant = moser_constant(dim, q, None)?;
    let mean = (sum / count as f64).powf(1.0 / alpha);
    let rhs = constant * (mean + 0.25f64.powf(1.0 / (2.0 - q)) * r0.powf(2.0 / (2.0 - q)));
    Ok(LinftyReport {
        center: center.to_vec(),
        r0,
        alpha,
        constant,
        lhs: inner_max,
        rhs,
        looseness: rhs / inner_max,
        pass: inner_max <= rhs,
    })
}

/// `lambda_1^(1/(q-2)) <= ||w||_inf <= (2^N C^2 ((2C)^(2-q) + 4))^(1/(2-q)) lambda_1^(1/(q-2))`.
#[derive(Debug, Clone, Serialize)]
pub struct DorinReport {
    pub lower: f64,
    pub sup_norm: f64,
    pub upper: f64,
    /// `upper / sup_norm`.
    pub upper_ratio: f64,
    pub lower_pass: bool,
    pub upper_pass: bool,
}

impl DorinReport {
    pub fn pass(&self) -> bool {
        self.lower_pass && self.upper_pass
    }
}

pub fn check_dorin(d: &LaneEmdenDensity, lambda1: f64) -> Result<DorinReport> {
    check_positive(lambda1, "lambda1")?;
    let q = d.q;
    let dim = d.domain().dim();
    let slack = 1.0 + SLACK_PER_H * d.domain().h();
    let base = lambda1.powf(1.0 / (q - 2.0));
    let upper = dorin_factor(dim, q)?.powf(1.0 / (2.0 - q)) * base;
    let s = d.field.sup_norm();
    Ok(DorinReport {
        lower: base,
        sup_norm: s,
        upper,
        upper_ratio: upper / s,
        lower_pass: base <= s * slack,
        upper_pass: s <= upper * slack,
    })
}

/// `1 <= lambda_{2,gamma} (int w^((2-q)gamma/(2-gamma)))^((2-gamma)/gamma) <= (2-gamma)/(gamma-2(q-1)) ((2-q)/(2-gamma))^2`.
#[derive(Debug, Clone, Serialize)]
pub struct BilatReport {
    pub q: f64,
    pub gamma: f64,
    pub lambda_2gamma: f64,
    pub middle: f64,
    pub upper: f64,
    pub lower_pass: bool,
    pub upper_pass: bool,
}

impl BilatReport {
    pub fn pass(&self) -> bool {
        self.lower_pass && self.upper_pass
    }
}

pub fn check_bilat(d: &LaneEmdenDensity, gamma: f64, lambda_2gamma_val: f64) -> Result<BilatReport> {
    let q = d.q;
    if !(gamma >= q && gamma < 2.0) {
        return Err(Error::InvalidExponent {
            value: gamma,
            range: "[q, 2)",
        });
    }
    check_positive(lambda_2gamma_val, "lambda_2gamma")?;
    let p = (2.0 - q) * gamma / (2.0 - gamma);
    let integral = d.domain().cell_volume() * linalg::sum(&d.field.values().iter().map(|w| w.max(0.0).powf(p)).collect::<Vec<_>>());
    let middle = lambda_2gamma_val * integral.powf((2.0 - gamma) / gamma);
    let upper = (2.0 - gamma) / (gamma - 2.0 * (q - 1.0)) * ((2.0 - q) / (2.0 - gamma)).powi(2);
    Ok(BilatReport {
        q,
        gamma,
        lambda_2gamma: lambda_2gamma_val,
        middle,
        upper,
        lower_pass: middle >= 1.0 - BILAT_SLACK,
        upper_pass: middle <= upper * (1.0 + BILAT_SLACK),
    })
}

/// [`check_bilat`] with `lambda_{2,gamma}` computed on the density's grid.
pub fn check_bilat_computed(d: &LaneEmdenDensity, gamma: f64, tol: f64) -> Result<BilatReport> {
    if !(gamma >= d.q && gamma < 2.0) {
        return Err(Error::InvalidExponent {
            value: gamma,
            range: "[q, 2)",
        });
    }
    let l = lambda_2gamma(d.domain(), gamma, tol)?;
    check_bilat(d, gamma, l)
}

/// Residual of `-Delta W = W [(1/delta) w^(q-2) + (1/delta)(1 - 1/delta)|grad w/w|^2]`, `W = w^(1/delta)`.
#[derive(Debug, Clone, Serialize)]
pub struct GroundStateReport {
    pub delta: f64,
    pub relative_residual: f64,
    pub nodes: usize,
    pub pass: bool,
}

pub fn ground_state_representation_check(d: &LaneEmdenDensity, delta: f64) -> Result<GroundStateReport> {
    check_positive(delta, "delta")?;
    let floor = crate::grid::default_floor(&d.field);
    let weight = hardy_weight(d, delta, floor)?.total();
    let big_w = d.field.map(|w| w.max(0.0).powf(1.0 / delta))?;
    let lw = apply_laplacian(&big_w);
    let depth = d.domain().boundary_depth();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut nodes = 0;
    for i in 0..depth.len() {
        if depth[i] >= GSR_MIN_DEPTH {
            let rhs = big_w.values()[i] * weight[i];
            num += (lw.values()[i] - rhs).powi(2);
            den += rhs * rhs;
            nodes += 1;
        }
    }
    if nodes == 0 {
        return Err(Error::InvalidArgument("no nodes deep enough for the check".into()));
    }
    let relative_residual = (num / den).sqrt();
    Ok(GroundStateReport {
        delta,
        relative_residual,
        nodes,
        pass: relative_residual <= GSR_THRESHOLD,
    })
}

/// `(1/delta)(1/delta - 1)`, the coefficient of `|grad w/w|^2` in the potential
/// `-Delta W / W - (1/delta) w^(q-2)`; minimal at `delta = 2`.
pub fn gradient_coefficient(delta: f64) -> f64 {
    (1.0 / delta) * (1.0 / delta - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_domain, ShapeSpec};
    use crate::lane_emden::{solve_lane_emden, DEFAULT_MAX_ITER};

    fn disk_torsion(k: i32) -> LaneEmdenDensity {
        let d = build_domain(&ShapeSpec::unit_ball(2), 2f64.powi(-k)).unwrap();
        solve_lane_emden(&d, 1.0, 1e-10, DEFAULT_MAX_ITER, None).unwrap()
    }

    #[test]
    fn weight_terms_by_delta() {
        let w = disk_torsion(5);
        let floor = crate::grid::default_floor(&w.field);
        let one = hardy_weight(&w, 1.0, floor).unwrap();
        assert!(one.grad_term.values().iter().all(|&v| v == 0.0));
        assert!(one.density_term.values().iter().all(|&v| v > 0.0));
        let two = hardy_weight(&w, 2.0, floor).unwrap();
        let g = gradient_norm_squared_field(&w.field, floor);
        for i in 0..g.len() {
            assert!((two.grad_term.values()[i] - 0.25 * g.values()[i]).abs() <= 1e-12 * g.values()[i]);
            let expected = 0.5 / w.field.values()[i].max(floor);
            assert!((two.density_term.values()[i] - expected).abs() <= 1e-12 * expected);
        }
        let half = hardy_weight(&w, 0.5, floor).unwrap();
        assert!(half.grad_term.values().iter().all(|&v| v <= 0.0));
        assert!(hardy_weight(&w, 0.0, floor).is_err());
        assert!(hardy_weight(&w, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_test_field_is_neutral() {
        let w = disk_torsion(4);
        let t = TestField {
            id: "zero".into(),
            field: ScalarField::zeros(w.domain()),
        };
        let r = check_hardy(&w, 2.0, &[t]).unwrap();
        assert_eq!(r[0].lhs, 0.0);
        assert_eq!(r[0].rhs, 0.0);
        assert!(r[0].pass);
    }

    #[test]
    fn test_fields_must_avoid_the_boundary() {
        let w = disk_torsion(4);
        let t = TestField {
            id: "one".into(),
            field: ScalarField::constant(w.domain(), 1.0),
        };
        assert!(matches!(check_hardy(&w, 1.0, &[t]), Err(Error::SupportTooClose(_))));
    }

    #[test]
    fn admissibility_scaling() {
        let w = disk_torsion(5);
        let floor = crate::grid::default_floor(&w.field);
        let v = limit_potential(&w, floor).unwrap();
        assert!(check_admissible(&v, &w, floor).unwrap().is_admissible());
        assert!(check_admissible(&v.scaled(0.5).unwrap(), &w, floor).unwrap().is_admissible());
        let bad = check_admissible(&v.scaled(2.0).unwrap(), &w, floor).unwrap();
        assert!(bad.fraction < 1.0);
        assert!(bad.worst_node.is_some() && bad.worst_violation > 0.0);
    }

    #[test]
    fn constant_density_gives_zero_potential() {
        let d = build_domain(&ShapeSpec::unit_ball(2), 0.125).unwrap();
        let c = LaneEmdenDensity::from_field(ScalarField::constant(&d, 2.0), 1.0, 1e-8).unwrap();
        // the one-sided rule sees the boundary, so look at deep nodes only
        let v = limit_potential(&c, 1e-3).unwrap();
        let depth = d.boundary_depth();
        for i in 0..d.len() {
            if depth[i] > 1 {
                assert_eq!(v.values()[i], 0.0);
            }
        }
    }

    #[test]
    fn theorem_bound_of_ball_torsion() {
        let w = disk_torsion(6);
        assert!((theorem_bound(&w) - 2.0).abs() < 1e-2);
    }

    #[test]
    fn bilat_rejects_exponents() {
        let w = disk_torsion(4);
        assert!(check_bilat(&w, 2.0, 1.0).is_err());
        let d = build_domain(&ShapeSpec::unit_ball(2), 2f64.powi(-4)).unwrap();
        let w15 = solve_lane_emden(&d, 1.5, 1e-9, DEFAULT_MAX_ITER, None).unwrap();
        assert!(matches!(check_bilat(&w15, 1.25, 1.0), Err(Error::InvalidExponent { .. })));
    }

    #[test]
    fn linfty_needs_contained_ball() {
        let w = disk_torsion(5);
        assert!(matches!(
            check_linfty_estimate(&w, &[0.0, 0.0], 1.5, 2.0),
            Err(Error::BallNotContained { .. })
        ));
        assert!(check_linfty_estimate(&w, &[0.0, 0.0], 0.5, 1.0).is_err());
    }

    #[test]
    fn delta_two_minimizes_the_coefficient() {
        let sweep = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
        let best = sweep
            .iter()
            .copied()
            .min_by(|a, b| gradient_coefficient(*a).total_cmp(&gradient_coefficient(*b)))
            .unwrap();
        assert_eq!(best, 2.0);
        assert_eq!(gradient_coefficient(2.0), -0.25);
    }
}
