//! `hle`: solve, certify and verify ground-state bounds from the command line.
//!
//! Exit codes: 0 on success or a PASS verdict, 1 on a FAIL verdict or a failed
//! suite criterion, 2 on invalid input, solver errors or an INCOMPLETE verdict.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use hardy_lane_emden::closed_forms::{sample, ClosedForm};
use hardy_lane_emden::config::{Command, PotentialSource, RunConfig};
use hardy_lane_emden::grid::io::{read_field, write_field, FieldSidecar};
use hardy_lane_emden::grid::{build_domain, default_floor, GridDomain, ShapeSpec};
use hardy_lane_emden::hardy::{
    certify, corollary_bound, dorin_factor, limit_potential, moser_constant, talenti_constant, theorem_bound,
    unit_ball_volume, CertifyOptions, PotentialChoice, TestChoice, Verdict,
};
use hardy_lane_emden::lane_emden::{
    exhaust_density, lambda_2q_from_density, lane_emden_energy, solve_lane_emden, LaneEmdenDensity,
};
use hardy_lane_emden::report::{emit_report, ReportFormat};
use hardy_lane_emden::spectral::{lambda_2gamma, principal_eigenvalue, schrodinger_ground_state, Potential};
use hardy_lane_emden::suite::Suite;
use hardy_lane_emden::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hle", version, about = "Lane-Emden densities and ground-state bounds")]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (all files are written inside it)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid spacing
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Exponent in [1, 2)
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for the Lane-Emden density (or an exhaustion when radii are configured)
    Solve,
    /// Principal Dirichlet or Schrodinger eigenpair
    Eigen,
    /// Build and check a ground-state bound certificate
    Certify,
    /// Run the ten verification criteria
    VerifySuite,
    /// Print the dimensional constants
    Constants {
        #[arg(long = "N", value_name = "N")]
        dim: Option<usize>,
        /// Exponent used by the two-dimensional constant
        #[arg(long)]
        gamma: Option<f64>,
    },
}

enum Outcome {
    Success,
    Fail,
    Incomplete,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Ok(Outcome::Incomplete) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let command = match cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Eigen => Command::Eigen,
        Cmd::Certify => Command::Certify,
        Cmd::VerifySuite => Command::VerifySuite,
        Cmd::Constants { .. } => Command::Constants,
    };
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::defaults(command),
    };
    cfg.command = command;
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.h {
        cfg.h = v;
    }
    if let Some(v) = cli.q {
        cfg.q = v;
    }
    cfg.quiet |= cli.quiet;
    if let Cmd::Constants { dim, gamma } = cli.command {
        if let Some(d) = dim {
            cfg.constants_dim = d;
        }
        if let Some(g) = gamma {
            cfg.moser_gamma = g;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = load_config(&cli)?;
    match cfg.command {
        Command::Solve => solve(&cfg),
        Command::Eigen => eigen(&cfg),
        Command::Certify => run_certify(&cfg),
        Command::VerifySuite => verify_suite(&cfg),
        Command::Constants => constants(&cfg),
    }
}

fn say(cfg: &RunConfig, line: impl AsRef<str>) {
    if !cfg.quiet {
        println!("{}", line.as_ref());
    }
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).expect("json values serialize"))?;
    Ok(path)
}

fn save_density(cfg: &RunConfig, stem: &str, d: &LaneEmdenDensity) -> Result<()> {
    let mut sc = FieldSidecar::for_field(&d.field).with_label("lane-emden density");
    sc.q = Some(d.q);
    sc.residual = Some(d.residual);
    sc.iterations = Some(d.iterations);
    write_field(&cfg.out, stem, &d.field, &sc)?;
    Ok(())
}

fn density_summary(d: &LaneEmdenDensity) -> serde_json::Value {
    json!({
        "q": d.q,
        "nodes": d.domain().len(),
        "h": d.domain().h(),
        "sup_norm": d.sup_norm(),
        "residual": d.residual,
        "iterations": d.iterations,
        "energy": lane_emden_energy(&d.field, d.q),
        "lambda_2q": lambda_2q_from_density(d),
        "theorem_bound": theorem_bound(d),
    })
}

fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let (density, exhaustion) = if cfg.radii.is_empty() {
        let domain = build_domain(&cfg.shape, cfg.h)?;
        (solve_lane_emden(&domain, cfg.q, cfg.tolerances.lane_emden, cfg.max_iter, None)?, None)
    } else {
        let run = exhaust_density(&cfg.shape, cfg.q, &cfg.radii, cfg.tolerances.lane_emden, cfg.h)?;
        let summary = json!({
            "radii": run.radii,
            "increments": run.increments,
            "max_decrease": run.max_decrease,
            "monotone": run.is_monotone(),
            "sup_norms": run.densities.iter().map(|d| d.sup_norm()).collect::<Vec<_>>(),
        });
        (run.last().clone(), Some(summary))
    };
    let domain = density.domain().clone();
    let mut gammas = Vec::new();
    for &g in &cfg.gammas {
        gammas.push(json!({ "gamma": g, "lambda_2gamma": lambda_2gamma(&domain, g, cfg.tolerances.eigen)? }));
    }
    let mut summary = density_summary(&density);
    summary["lambda_2gamma"] = json!(gammas);
    if let Some(e) = exhaustion {
        summary["exhaustion"] = e;
    }
    save_density(cfg, "density", &density)?;
    write_json(&cfg.out, "solve.json", &summary)?;
    say(
        cfg,
        format!(
            "sup w = {:.8}  residual = {:.2e}  iterations = {}  theorem bound = {:.6}",
            density.sup_norm(),
            density.residual,
            density.iterations,
            theorem_bound(&density)
        ),
    );
    Ok(Outcome::Success)
}

fn shape_radius(shape: &ShapeSpec) -> f64 {
    match shape {
        ShapeSpec::Ball { radius, .. } => *radius,
        _ => 1.0,
    }
}

fn load_potential(source: &PotentialSource, domain: &Arc<GridDomain>, cfg: &RunConfig) -> Result<Potential> {
    match source {
        PotentialSource::Zero => Ok(Potential::zero(domain)),
        PotentialSource::Limit { scale } => {
            let d = solve_lane_emden(domain, cfg.q, cfg.tolerances.lane_emden, cfg.max_iter, None)?;
            limit_potential(&d, default_floor(&d.field))?.scaled(*scale)
        }
        PotentialSource::ClosedForm { name } => {
            let cf = ClosedForm::from_name(name, domain.dim(), shape_radius(domain.shape()))?;
            Potential::new(sample(&cf, domain)?, name.clone())
        }
        PotentialSource::File { path } => {
            let (field, _) = read_field(path)?;
            if !field.domain().same_as(domain) {
                return Err(Error::DomainMismatch);
            }
            Potential::new(field, path.display().to_string())
        }
    }
}

fn eigen(cfg: &RunConfig) -> Result<Outcome> {
    let domain = build_domain(&cfg.shape, cfg.h)?;
    let result = match &cfg.eigen_potential {
        PotentialSource::Zero => principal_eigenvalue(&domain, cfg.tolerances.eigen)?,
        other => {
            let v = load_potential(other, &domain, cfg)?;
            schrodinger_ground_state(&domain, &v, cfg.tolerances.schrodinger)?
        }
    };
    let sc = FieldSidecar::for_field(&result.eigenfunction).with_label("ground state");
    write_field(&cfg.out, "eigenfunction", &result.eigenfunction, &sc)?;
    write_json(&cfg.out, "eigen.json", &json!(result.summary()))?;
    say(
        cfg,
        format!(
            "lambda1 = {:.10}  residual = {:.2e}  iterations = {}",
            result.eigenvalue, result.residual, result.iterations
        ),
    );
    Ok(Outcome::Success)
}

fn run_certify(cfg: &RunConfig) -> Result<Outcome> {
    let domain = build_domain(&cfg.shape, cfg.h)?;
    let potential = match &cfg.certify_potential {
        PotentialSource::Limit { scale } => PotentialChoice::LimitScaled(*scale),
        other => PotentialChoice::Given(load_potential(other, &domain, cfg)?),
    };
    let opts = CertifyOptions {
        q: cfg.q,
        potential,
        deltas: cfg.deltas.clone(),
        tests: TestChoice::Corpus {
            seed: cfg.seed,
            random: cfg.random_fields,
        },
        tolerances: cfg.tolerances,
    };
    let run = certify(&domain, &opts);
    let cert = &run.certificate;
    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text] {
        emit_report(cert, format, &cfg.out)?;
    }
    if let Some(d) = &run.density {
        save_density(cfg, "density", d)?;
    }
    say(cfg, hardy_lane_emden::report::certificate_text(cert));
    Ok(match cert.verdict {
        Verdict::Pass => Outcome::Success,
        Verdict::Fail { .. } => Outcome::Fail,
        Verdict::Incomplete { .. } => Outcome::Incomplete,
    })
}

fn verify_suite(cfg: &RunConfig) -> Result<Outcome> {
    let suite = Suite::new(cfg.seed);
    let mut outcomes = Vec::new();
    for (id, _) in hardy_lane_emden::suite::CRITERIA {
        let o = suite.run(id);
        say(cfg, o.to_string());
        outcomes.push(o);
    }
    write_json(&cfg.out, "suite.json", &json!({ "seed": cfg.seed, "criteria": outcomes }))?;
    Ok(if outcomes.iter().all(|o| o.pass) {
        Outcome::Success
    } else {
        Outcome::Fail
    })
}

fn constants(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.constants_dim;
    let q = cfg.q;
    let gamma = (n == 2).then_some(cfg.moser_gamma);
    let c = moser_constant(n, q, gamma)?;
    let unit_ball = build_domain(&ShapeSpec::unit_ball(n), 1.0 / 64.0)?;
    let lambda1 = principal_eigenvalue(&unit_ball, cfg.tolerances.eigen)?.eigenvalue;
    let talenti = talenti_constant(n).ok();
    let value = json!({
        "N": n,
        "q": q,
        "gamma": gamma,
        "unit_ball_volume": unit_ball_volume(n)?,
        "talenti_constant": talenti,
        "moser_constant": c,
        "dorin_factor": dorin_factor(n, q)?,
        "unit_ball_lambda1": lambda1,
        "unit_ball_corollary_bound": corollary_bound(lambda1, n, q)?,
    });
    write_json(&cfg.out, "constants.json", &value)?;
    say(cfg, format!("N = {n}, q = {q}"));
    say(cfg, format!("C = {c:.12}"));
    if let Some(t) = talenti {
        say(cfg, format!("T_N = {t:.12}"));
    }
    say(cfg, format!("omega_N = {:.12}", unit_ball_volume(n)?));
    say(cfg, format!("corollary bound on the unit ball = {:.6e}", corollary_bound(lambda1, n, q)?));
    Ok(Outcome::Success)
}
