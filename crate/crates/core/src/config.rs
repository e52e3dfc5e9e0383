//! Run configuration in TOML.
//!
//! ```toml
//! command = "certify"      # solve | eigen | certify | verify-suite | constants
//! h = 0.0078125
//! q = 1.0
//! seed = 1
//! out = "out"
//!
//! [shape]                  # any ShapeSpec, tagged by `kind`
//! kind = "ball"
//! center = [0.0, 0.0]
//! radius = 1.0
//!
//! [tolerances]
//! lane_emden = 1e-8
//! eigen = 1e-8
//! schrodinger = 1e-8
//!
//! [solve]
//! max_iter = 200
//! gammas = [1.5]           # lambda_{2,gamma} values to report
//! radii = [2.0, 4.0, 8.0]  # exhaustion of a slab or wave-guide
//!
//! [eigen]
//! potential = { kind = "closed_form", name = "ball_limit_potential" }
//!
//! [certify]
//! deltas = [0.5, 1.0, 2.0, 4.0]
//! random_fields = 20
//! potential = { kind = "limit", scale = 1.0 }
//!
//! [constants]
//! dim = 2
//! gamma = 4.0
//! ```
//!
//! Potentials are `{ kind = "zero" }`, `{ kind = "limit", scale = c }`,
//! `{ kind = "closed_form", name = "..." }` or `{ kind = "file", path = "v.csv" }`
//! (a field CSV with its JSON sidecar, relative to the config file).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::closed_forms::ClosedForm;
use crate::corpus::RANDOM_FIELDS;
use crate::error::{Error, Result};
use crate::grid::ShapeSpec;
use crate::hardy::{Tolerances, DEFAULT_MOSER_GAMMA};
use crate::lane_emden::DEFAULT_MAX_ITER;

pub const DEFAULT_H: f64 = 1.0 / 64.0;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Eigen,
    Certify,
    VerifySuite,
    Constants,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSource {
    Zero,
    Limit {
        #[serde(default = "one")]
        scale: f64,
    },
    ClosedForm {
        name: String,
    },
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    lane_emden: Option<f64>,
    eigen: Option<f64>,
    schrodinger: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolve {
    max_iter: Option<usize>,
    gammas: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEigen {
    potential: Option<PotentialSource>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertify {
    deltas: Option<Vec<f64>>,
    random_fields: Option<usize>,
    potential: Option<PotentialSource>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstants {
    dim: Option<usize>,
    gamma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<Command>,
    h: Option<f64>,
    q: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    quiet: Option<bool>,
    shape: Option<ShapeSpec>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    solve: RawSolve,
    #[serde(default)]
    eigen: RawEigen,
    #[serde(default)]
    certify: RawCertify,
    #[serde(default)]
    constants: RawConstants,
}

/// A validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub shape: ShapeSpec,
    pub h: f64,
    pub q: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub quiet: bool,
    pub tolerances: Tolerances,
    pub max_iter: usize,
    pub gammas: Vec<f64>,
    pub radii: Vec<f64>,
    pub deltas: Vec<f64>,
    pub random_fields: usize,
    pub eigen_potential: PotentialSource,
    pub certify_potential: PotentialSource,
    pub constants_dim: usize,
    pub moser_gamma: f64,
}

impl RunConfig {
    /// Defaults: certify on the unit disk with `h = 1/64`, `q = 1`.
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            shape: ShapeSpec::unit_ball(2),
            h: DEFAULT_H,
            q: 1.0,
            seed: DEFAULT_SEED,
            out: PathBuf::from("out"),
            quiet: false,
            tolerances: Tolerances::default(),
            max_iter: DEFAULT_MAX_ITER,
            gammas: Vec::new(),
            radii: Vec::new(),
            deltas: vec![0.5, 1.0, 2.0, 4.0],
            random_fields: RANDOM_FIELDS,
            eigen_potential: PotentialSource::Zero,
            certify_potential: PotentialSource::Limit { scale: 1.0 },
            constants_dim: 2,
            moser_gamma: DEFAULT_MOSER_GAMMA,
        }
    }

    /// Parses TOML text. Relative file paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "config".into(),
            };
            Error::Config {
                location,
                message: e.message().to_string(),
            }
        })?;
        let mut cfg = RunConfig::defaults(raw.command.unwrap_or(Command::Certify));
        if let Some(v) = raw.h {
            cfg.h = v;
        }
        if let Some(v) = raw.q {
            cfg.q = v;
        }
        if let Some(v) = raw.seed {
            cfg.seed = v;
        }
        if let Some(v) = raw.out {
            cfg.out = v;
        }
        if let Some(v) = raw.quiet {
            cfg.quiet = v;
        }
        if let Some(v) = raw.shape {
            cfg.shape = v;
        }
        let t = raw.tolerances;
        cfg.tolerances = Tolerances {
            lane_emden: t.lane_emden.unwrap_or(cfg.tolerances.lane_emden),
            eigen: t.eigen.unwrap_or(cfg.tolerances.eigen),
            schrodinger: t.schrodinger.unwrap_or(cfg.tolerances.schrodinger),
        };
        if let Some(v) = raw.solve.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = raw.solve.gammas {
            cfg.gammas = v;
        }
        if let Some(v) = raw.solve.radii {
            cfg.radii = v;
        }
        if let Some(v) = raw.eigen.potential {
            cfg.eigen_potential = v;
        }
        if let Some(v) = raw.certify.deltas {
            cfg.deltas = v;
        }
        if let Some(v) = raw.certify.random_fields {
            cfg.random_fields = v;
        }
        if let Some(v) = raw.certify.potential {
            cfg.certify_potential = v;
        }
        if let Some(v) = raw.constants.dim {
            cfg.constants_dim = v;
        }
        if let Some(v) = raw.constants.gamma {
            cfg.moser_gamma = v;
        }
        if let Some(base) = base {
            for p in [&mut cfg.eigen_potential, &mut cfg.certify_potential] {
                if let PotentialSource::File { path } = p {
                    if path.is_relative() {
                        *path = base.join(&*path);
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            location: path.display().to_string(),
            message: e.to_string(),
        })?;
        RunConfig::parse(&text, path.parent())
    }

    /// Range checks; also run after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        let bad = |location: &str, message: String| {
            Err(Error::Config {
                location: location.into(),
                message,
            })
        };
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad("h", format!("must be positive, got {}", self.h));
        }
        if !(1.0..2.0).contains(&self.q) {
            return bad("q", format!("must lie in [1, 2), got {}", self.q));
        }
        if let Err(e) = self.shape.validate() {
            return bad("shape", e.to_string());
        }
        for (name, v) in [
            ("tolerances.lane_emden", self.tolerances.lane_emden),
            ("tolerances.eigen", self.tolerances.eigen),
            ("tolerances.schrodinger", self.tolerances.schrodinger),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, format!("must be positive, got {v}"));
            }
        }
        if self.max_iter == 0 {
            return bad("solve.max_iter", "must be at least 1".into());
        }
        for g in &self.gammas {
            if !(*g >= self.q && *g < 2.0) {
                return bad("solve.gammas", format!("{g} is outside [q, 2) = [{}, 2)", self.q));
            }
        }
        if !self.radii.is_empty() {
            if self.radii.len() < 3 || self.radii.windows(2).any(|w| !(w[1] > w[0])) || self.radii[0] <= 0.0 {
                return bad("solve.radii", "need at least three positive, strictly increasing radii".into());
            }
            if !matches!(self.shape, ShapeSpec::Slab { .. } | ShapeSpec::Waveguide { .. }) {
                return bad("solve.radii", "exhaustions need a slab or wave-guide shape".into());
            }
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return bad("certify.deltas", "need at least one positive delta".into());
        }
        if !(1..=3).contains(&self.constants_dim) {
            return bad("constants.dim", format!("must be 1, 2 or 3, got {}", self.constants_dim));
        }
        if !(self.moser_gamma > 2.0 && self.moser_gamma.is_finite()) {
            return bad("constants.gamma", format!("must exceed 2, got {}", self.moser_gamma));
        }
        for (name, p) in [
            ("eigen.potential", &self.eigen_potential),
            ("certify.potential", &self.certify_potential),
        ] {
            match p {
                PotentialSource::Limit { scale } if !(*scale >= 0.0 && scale.is_finite()) => {
                    return bad(name, format!("scale must be nonnegative, got {scale}"));
                }
                PotentialSource::ClosedForm { name: form } => {
                    if let Err(e) = ClosedForm::from_name(form, self.shape.dim(), 1.0) {
                        return bad(name, e.to_string());
                    }
                }
                PotentialSource::File { path } => {
                    if !path.is_file() {
                        return bad(name, format!("file {} does not exist", path.display()));
                    }
                    if !path.with_extension("json").is_file() {
                        return bad(name, format!("sidecar for {} does not exist", path.display()));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default() {
        let c = RunConfig::parse("", None).unwrap();
        assert_eq!(c.command, Command::Certify);
        assert_eq!(c.h, DEFAULT_H);
        assert_eq!(c.shape, ShapeSpec::unit_ball(2));
    }

    #[test]
    fn full_config() {
        let text = r#"
command = "solve"
h = 0.03125
q = 1.5
seed = 7

[shape]
kind = "slab"
dim = 2
half_width = 1.0
transverse_extent = 8.0

[solve]
gammas = [1.5, 1.75]
radii = [2.0, 4.0, 8.0]

[certify]
potential = { kind = "limit", scale = 0.5 }
"#;
        let c = RunConfig::parse(text, None).unwrap();
        assert_eq!(c.command, Command::Solve);
        assert_eq!(c.q, 1.5);
        assert_eq!(c.seed, 7);
        assert_eq!(c.radii, vec![2.0, 4.0, 8.0]);
        assert_eq!(c.certify_potential, PotentialSource::Limit { scale: 0.5 });
    }

    #[test]
    fn errors_name_the_place() {
        let e = RunConfig::parse("h = 0.1\nq = 2.5\n", None).unwrap_err();
        assert!(matches!(e, Error::Config { ref location, .. } if location == "q"));
        let e = RunConfig::parse("h = 0.1\nbogus = 1\n", None).unwrap_err();
        assert!(matches!(e, Error::Config { ref location, .. } if location == "line 2"), "{e}");
        let e = RunConfig::parse("[solve]\ngammas = [0.5]\n", None).unwrap_err();
        assert!(matches!(e, Error::Config { ref location, .. } if location == "solve.gammas"));
        let e = RunConfig::parse("[solve]\nradii = [1.0, 2.0, 3.0]\n", None).unwrap_err();
        assert!(matches!(e, Error::Config { ref location, .. } if location == "solve.radii"));
    }

    #[test]
    fn missing_potential_file_is_rejected() {
        let e = RunConfig::parse("[eigen]\npotential = { kind = \"file\", path = \"/nonexistent/v.csv\" }\n", None)
            .unwrap_err();
        assert!(matches!(e, Error::Config { ref location, .. } if location == "eigen.potential"));
    }
}
