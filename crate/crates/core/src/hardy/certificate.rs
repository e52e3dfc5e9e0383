use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_admissible, check_hardy_with_floor, corollary_bound, limit_potential, moser_constant, theorem_bound};
use super::{AdmissibilityReport, HardyCheck, SLACK_PER_H};
use crate::corpus::{build_corpus, TestField, RANDOM_FIELDS};
use crate::error::{Error, Result};
use crate::grid::{default_floor, GridDomain, ShapeSpec};
use crate::lane_emden::{solve_lane_emden, LaneEmdenDensity, DEFAULT_MAX_ITER};
use crate::spectral::{principal_eigenvalue, schrodinger_ground_state, Potential, SpectralResult};

pub const CERTIFICATE_SCHEMA_VERSION: &str = "1";

/// Which potential to certify.
#[derive(Debug, Clone)]
pub enum PotentialChoice {
    /// `c` times the limit potential of the computed density.
    LimitScaled(f64),
    Given(Potential),
}

/// Which test fields enter the Hardy sweep.
#[derive(Debug, Clone)]
pub enum TestChoice {
    /// The standard corpus with `random` seeded members.
    Corpus { seed: u64, random: usize },
    Given(Vec<TestField>),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub lane_emden: f64,
    pub eigen: f64,
    pub schrodinger: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lane_emden: 1e-8,
            eigen: 1e-8,
            schrodinger: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub q: f64,
    pub potential: PotentialChoice,
    pub deltas: Vec<f64>,
    pub tests: TestChoice,
    pub tolerances: Tolerances,
}

impl CertifyOptions {
    /// Limit potential, `delta` in `{0.5, 1, 2, 4}`, seeded corpus.
    pub fn new(q: f64, seed: u64) -> Self {
        CertifyOptions {
            q,
            potential: PotentialChoice::LimitScaled(1.0),
            deltas: vec![0.5, 1.0, 2.0, 4.0],
            tests: TestChoice::Corpus {
                seed,
                random: RANDOM_FIELDS,
            },
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FailReason {
    Admissibility,
    Hardy,
    Spectrum,
    Ordering,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail { reasons: Vec<FailReason> },
    Incomplete { error: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail { reasons } => {
                let r: Vec<String> = reasons.iter().map(|r| format!("{r:?}").to_uppercase()).collect();
                write!(f, "FAIL({})", r.join(", "))
            }
            Verdict::Incomplete { error } => write!(f, "INCOMPLETE({error})"),
        }
    }
}

/// Every verified quantity of a ground-state bound run. Missing pieces are `None`
/// when the run stopped early.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub schema_version: String,
    pub q: f64,
    pub dim: usize,
    pub shape: ShapeSpec,
    pub h: f64,
    pub nodes: usize,
    pub potential: String,
    pub floor: Option<f64>,
    pub density_residual: Option<f64>,
    pub lambda1: Option<f64>,
    pub sup_norm: Option<f64>,
    pub hardy_checks: Vec<HardyCheck>,
    pub admissibility: Option<AdmissibilityReport>,
    pub theorem_bound: Option<f64>,
    pub moser_constant: Option<f64>,
    pub corollary_bound: Option<f64>,
    pub schrodinger_eigenvalue: Option<f64>,
    /// Relative slack `5 h` of the one-sided checks.
    pub slack: f64,
    pub verdict: Verdict,
}

/// A certificate and the fields computed on the way.
#[derive(Debug, Clone)]
pub struct Certification {
    pub certificate: BoundCertificate,
    pub density: Option<LaneEmdenDensity>,
    pub principal: Option<SpectralResult>,
    pub potential: Option<Potential>,
    pub ground_state: Option<SpectralResult>,
}

/// Solves, checks and assembles a ground-state bound certificate on `domain`.
///
/// The Schrodinger eigensolve runs concurrently with the principal eigensolve
/// and the Hardy sweep. Any error stops the run with an INCOMPLETE verdict and
/// the pieces obtained so far.
pub fn certify(domain: &Arc<GridDomain>, opts: &CertifyOptions) -> Certification {
    let h = domain.h();
    let mut out = Certification {
        certificate: BoundCertificate {
            schema_version: CERTIFICATE_SCHEMA_VERSION.into(),
            q: opts.q,
            dim: domain.dim(),
            shape: domain.shape().clone(),
            h,
            nodes: domain.len(),
            potential: match &opts.potential {
                PotentialChoice::LimitScaled(c) if *c == 1.0 => "limit".into(),
                PotentialChoice::LimitScaled(c) => format!("{c}*limit"),
                PotentialChoice::Given(v) => v.source().to_string(),
            },
            floor: None,
            density_residual: None,
            lambda1: None,
            sup_norm: None,
            hardy_checks: Vec::new(),
            admissibility: None,
            theorem_bound: None,
            moser_constant: None,
            corollary_bound: None,
            schrodinger_eigenvalue: None,
            slack: SLACK_PER_H * h,
            verdict: Verdict::Incomplete {
                error: "not started".into(),
            },
        },
        density: None,
        principal: None,
        potential: None,
        ground_state: None,
    };
    if let Err(e) = run(domain, opts, &mut out) {
        out.certificate.verdict = Verdict::Incomplete { error: e.to_string() };
    }
    out
}

fn run(domain: &Arc<GridDomain>, opts: &CertifyOptions, out: &mut Certification) -> Result<()> {
    let tol = opts.tolerances;
    if opts.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidArgument("every delta must be positive".into()));
    }
    let density = solve_lane_emden(domain, opts.q, tol.lane_emden, DEFAULT_MAX_ITER, None)?;
    let cert = &mut out.certificate;
    cert.density_residual = Some(density.residual);
    cert.sup_norm = Some(density.sup_norm());
    cert.theorem_bound = Some(theorem_bound(&density));
    let floor = default_floor(&density.field);
    cert.floor = Some(floor);
    let potential = match &opts.potential {
        PotentialChoice::LimitScaled(c) => limit_potential(&density, floor)?.scaled(*c)?,
        PotentialChoice::Given(v) => {
            if !v.domain().same_as(domain) {
                return Err(Error::DomainMismatch);
            }
            v.clone()
        }
    };
    out.density = Some(density.clone());
    out.potential = Some(potential.clone());
    out.certificate.admissibility = Some(check_admissible(&potential, &density, floor)?);

    let (principal_and_sweep, ground) = rayon::join(
        || -> Result<(SpectralResult, Vec<HardyCheck>)> {
            let principal = principal_eigenvalue(domain, tol.eigen)?;
            let tests = match &opts.tests {
                TestChoice::Corpus { seed, random } => {
                    build_corpus(&density, &principal.eigenfunction, *seed, *random)?
                }
                TestChoice::Given(t) => t.clone(),
            };
            let per_delta: Result<Vec<Vec<HardyCheck>>> = opts
                .deltas
                .par_iter()
                .map(|&delta| check_hardy_with_floor(&density, delta, &tests, floor))
                .collect();
            let mut checks: Vec<HardyCheck> = per_delta?.into_iter().flatten().collect();
            checks.sort_by(|a, b| a.delta.total_cmp(&b.delta).then_with(|| a.test_id.cmp(&b.test_id)));
            Ok((principal, checks))
        },
        || schrodinger_ground_state(domain, &potential, tol.schrodinger),
    );
    match principal_and_sweep {
        Ok((principal, checks)) => {
            out.certificate.lambda1 = Some(principal.eigenvalue);
            out.certificate.hardy_checks = checks;
            out.principal = Some(principal);
        }
        Err(e) => {
            if let Ok(g) = &ground {
                out.certificate.schrodinger_eigenvalue = Some(g.eigenvalue);
                out.ground_state = Some(g.clone());
            }
            return Err(e);
        }
    }
    let ground = ground?;
    out.certificate.schrodinger_eigenvalue = Some(ground.eigenvalue);
    out.ground_state = Some(ground);

    let cert = &mut out.certificate;
    let lambda1 = cert.lambda1.expect("set above");
    cert.moser_constant = Some(moser_constant(cert.dim, opts.q, None)?);
    cert.corollary_bound = Some(corollary_bound(lambda1, cert.dim, opts.q)?);

    let bound = cert.theorem_bound.expect("set above");
    let mut reasons = Vec::new();
    let admissible = cert.admissibility.as_ref().is_some_and(|a| a.is_admissible());
    if !admissible {
        reasons.push(FailReason::Admissibility);
    }
    if cert.hardy_checks.iter().any(|c| !c.pass) {
        reasons.push(FailReason::Hardy);
    }
    // the spectral claim is only made for admissible potentials
    if admissible && cert.schrodinger_eigenvalue.expect("set above") < bound * (1.0 - cert.slack) {
        reasons.push(FailReason::Spectrum);
    }
    if cert.corollary_bound.expect("set above") > bound {
        reasons.push(FailReason::Ordering);
    }
    cert.verdict = if reasons.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail { reasons }
    };
    Ok(())
}
