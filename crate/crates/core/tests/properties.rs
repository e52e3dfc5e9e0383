//! Structural properties of the solvers, the potentials and the certificate.

use std::sync::Arc;

use hardy_lane_emden::closed_forms::{compare, sample, ClosedForm, Window};
use hardy_lane_emden::corpus::{build_corpus, mask_support, TestField, SUPPORT_MARGIN};
use hardy_lane_emden::grid::{build_domain, default_floor, GridDomain, ScalarField, ShapeSpec};
use hardy_lane_emden::hardy::{
    certify, check_hardy, check_linfty_estimate, limit_potential, CertifyOptions, FailReason, PotentialChoice, Verdict,
};
use hardy_lane_emden::lane_emden::{
    lambda_2q_from_density, lane_emden_energy, pde_residual, predicted_minimum_energy, scale_solution, solve_lane_emden,
    LaneEmdenDensity,
};
use hardy_lane_emden::report::{emit_report, ReportFormat};
use hardy_lane_emden::rng::XorShift64Star;
use hardy_lane_emden::spectral::{principal_eigenvalue, schrodinger_ground_state, Potential};
use hardy_lane_emden::Error;

fn disk(h: f64) -> Arc<GridDomain> {
    build_domain(&ShapeSpec::unit_ball(2), h).unwrap()
}

fn density(domain: &Arc<GridDomain>, q: f64) -> LaneEmdenDensity {
    solve_lane_emden(domain, q, 1e-10, 200, None).unwrap()
}

#[test]
fn scaling_maps_solutions_to_solutions() {
    let domain = disk(1.0 / 32.0);
    let q = 1.5;
    let w = density(&domain, q);
    for t in [0.25f64, 3.0] {
        // u solves -Delta u = t u^(q-1)
        let u = w.field.scaled(t.powf(-1.0 / (q - 2.0)));
        let back = scale_solution(&u, t, q).unwrap();
        let err = back
            .values()
            .iter()
            .zip(w.field.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12 * w.sup_norm(), "t={t}: {err}");
        assert!(pde_residual(&back, q) <= 1e-8);
    }
}

#[test]
fn energy_identity() {
    let domain = disk(1.0 / 32.0);
    for q in [1.0, 1.25, 1.5, 1.75] {
        let w = density(&domain, q);
        let e = lane_emden_energy(&w.field, q);
        let predicted = predicted_minimum_energy(lambda_2q_from_density(&w), q);
        assert!((e / predicted - 1.0).abs() <= 1e-3, "q={q}: {e} vs {predicted}");
    }
}

#[test]
fn density_minimizes_energy() {
    let domain = disk(1.0 / 32.0);
    let mut rng = XorShift64Star::new(11);
    for q in [1.0, 1.5] {
        let w = density(&domain, q);
        let e = lane_emden_energy(&w.field, q);
        for _ in 0..20 {
            let vals = w.field.values().iter().map(|x| x * rng.uniform(0.5, 1.5)).collect();
            let c = ScalarField::new(&domain, vals).unwrap();
            assert!(lane_emden_energy(&c, q) >= e - 1e-12);
            let s = w.field.scaled(rng.uniform(0.5, 1.5));
            assert!(lane_emden_energy(&s, q) >= e - 1e-12);
        }
    }
}

#[test]
fn torsion_converges_at_second_order() {
    let mut errs = Vec::new();
    for k in [4, 5, 6] {
        let domain = disk(2f64.powi(-k));
        let w = density(&domain, 1.0);
        let r = compare(&w.field, &ClosedForm::BallTorsion { dim: 2, radius: 1.0 }, &Window::All).unwrap();
        errs.push(r.max_abs);
    }
    for pair in errs.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!(order >= 1.8, "errors {errs:?}");
    }
}

#[test]
fn slab_truncation_matches_slab_torsion() {
    let spec = ShapeSpec::slab(2, 1.0, 4.0);
    let domain = build_domain(&spec, 1.0 / 32.0).unwrap();
    let w = density(&domain, 1.0);
    let window = Window::Box {
        lo: vec![-1.0, -1.0],
        hi: vec![1.0, 1.0],
    };
    let r = compare(&w.field, &ClosedForm::SlabTorsion { dim: 2 }, &window).unwrap();
    assert!(r.max_abs <= 1e-2, "{r:?}");
    let e = sample(&ClosedForm::EllipsoidTorsion { dim: 2, r: 4.0 }, &domain).unwrap();
    for (a, b) in w.field.values().iter().zip(e.values()) {
        assert!(*a >= b - 1e-6);
    }
}

#[test]
fn limit_potential_matches_closed_form() {
    let domain = disk(1.0 / 128.0);
    let w = density(&domain, 1.0);
    let v = limit_potential(&w, default_floor(&w.field)).unwrap();
    let exact = ClosedForm::BallLimitPotential { dim: 2, radius: 1.0 };
    let mut checked = 0;
    for i in 0..domain.len() {
        let x = domain.coords(i);
        if x[0] * x[0] + x[1] * x[1] > 0.64 {
            continue;
        }
        let e = exact.eval(&x[..2]);
        let got = v.values()[i];
        assert!((got - e).abs() <= 0.02 * e.abs().max(1e-3), "at {x:?}: {got} vs {e}");
        checked += 1;
    }
    assert!(checked > 1000);
}

#[test]
fn eigenvalue_is_monotone_in_the_potential() {
    let domain = disk(1.0 / 32.0);
    let w = density(&domain, 1.0);
    let v = limit_potential(&w, default_floor(&w.field)).unwrap();
    let shift = ScalarField::from_fn(&domain, |x| 1.0 + x[0]).unwrap();
    let lower = v.shifted_down(&shift).unwrap();
    let a = schrodinger_ground_state(&domain, &v, 1e-10).unwrap().eigenvalue;
    let b = schrodinger_ground_state(&domain, &lower, 1e-10).unwrap().eigenvalue;
    let z = schrodinger_ground_state(&domain, &Potential::zero(&domain), 1e-10).unwrap().eigenvalue;
    assert!(b <= a && a <= z, "{b} {a} {z}");
    assert!(b >= a - 2.0 - 1e-6);
}

#[test]
fn eigenvalue_and_density_are_monotone_in_the_domain() {
    let small = build_domain(&ShapeSpec::ball(vec![0.0, 0.0], 0.75), 1.0 / 32.0).unwrap();
    let big = disk(1.0 / 32.0);
    let ls = principal_eigenvalue(&small, 1e-10).unwrap().eigenvalue;
    let lb = principal_eigenvalue(&big, 1e-10).unwrap().eigenvalue;
    assert!(lb < ls);
    let ws = density(&small, 1.5);
    let wb = density(&big, 1.5);
    assert!(lambda_2q_from_density(&wb) < lambda_2q_from_density(&ws));
    assert!(wb.sup_norm() > ws.sup_norm());
}

#[test]
fn corpus_fields_avoid_the_boundary() {
    let domain = disk(1.0 / 32.0);
    let w = density(&domain, 1.0);
    let eig = principal_eigenvalue(&domain, 1e-8).unwrap();
    let corpus = build_corpus(&w, &eig.eigenfunction, 5, 20).unwrap();
    assert_eq!(corpus.len(), 26);
    let depth = domain.boundary_depth();
    for t in &corpus {
        assert!(t.field.sup_norm() > 0.0, "{}", t.id);
        for (v, d) in t.field.values().iter().zip(&depth) {
            if *d <= SUPPORT_MARGIN {
                assert_eq!(*v, 0.0, "{}", t.id);
            }
        }
    }
    let again = build_corpus(&w, &eig.eigenfunction, 5, 20).unwrap();
    assert_eq!(corpus[10].field.values(), again[10].field.values());
}

#[test]
fn hardy_rejects_fields_near_the_boundary() {
    let domain = disk(1.0 / 32.0);
    let w = density(&domain, 1.0);
    let bad = TestField {
        id: "constant".into(),
        field: ScalarField::constant(&domain, 1.0),
    };
    assert!(matches!(check_hardy(&w, 1.0, &[bad]), Err(Error::SupportTooClose(_))));
    let good = TestField {
        id: "masked".into(),
        field: mask_support(&ScalarField::constant(&domain, 1.0)),
    };
    let checks = check_hardy(&w, 1.0, &[good]).unwrap();
    assert!(checks[0].pass);
}

#[test]
fn local_estimate_needs_a_contained_ball() {
    let domain = disk(1.0 / 32.0);
    let w = density(&domain, 1.0);
    assert!(matches!(
        check_linfty_estimate(&w, &[0.5, 0.0], 0.6, 2.0),
        Err(Error::BallNotContained { .. })
    ));
    assert!(check_linfty_estimate(&w, &[0.0, 0.0], 0.5, 1.5).is_err());
    assert!(check_linfty_estimate(&w, &[0.0, 0.0], 0.5, 2.0).unwrap().pass);
}

#[test]
fn certificate_verdicts() {
    let domain = disk(1.0 / 32.0);
    let pass = certify(&domain, &CertifyOptions::new(1.0, 1));
    assert_eq!(pass.certificate.verdict, Verdict::Pass);
    assert!(pass.density.is_some() && pass.ground_state.is_some());

    let mut opts = CertifyOptions::new(1.0, 1);
    opts.potential = PotentialChoice::LimitScaled(1.5);
    let fail = certify(&domain, &opts);
    assert_eq!(
        fail.certificate.verdict,
        Verdict::Fail {
            reasons: vec![FailReason::Admissibility]
        }
    );

    let other = disk(1.0 / 16.0);
    let mut opts = CertifyOptions::new(1.0, 1);
    opts.potential = PotentialChoice::Given(Potential::zero(&other));
    let incomplete = certify(&domain, &opts);
    assert!(matches!(incomplete.certificate.verdict, Verdict::Incomplete { .. }));
    assert!(incomplete.certificate.sup_norm.is_some());

    let dir = tempfile::tempdir().unwrap();
    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text] {
        let path = emit_report(&pass.certificate, format, dir.path()).unwrap();
        assert!(std::fs::metadata(&path).unwrap().len() > 0);
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"]["status"], "PASS");
    assert_eq!(json["schema_version"], "1");
}

#[test]
fn certificates_are_deterministic() {
    let domain = disk(1.0 / 16.0);
    let a = certify(&domain, &CertifyOptions::new(1.5, 3));
    let b = certify(&domain, &CertifyOptions::new(1.5, 3));
    assert_eq!(
        serde_json::to_string(&a.certificate).unwrap(),
        serde_json::to_string(&b.certificate).unwrap()
    );
}
