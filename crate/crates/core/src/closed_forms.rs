//! Exact torsion functions and limit potentials of balls, slabs, ellipsoids
//! and wave-guides with a unit-disk (or unit-ball) cross-section.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, ScalarField, ShapeSpec};

/// An analytic density or potential. The slab is `|x_1| < 1`; the wave-guide
/// is `{|x'| < 1}` with `x'` the first `N-1` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `(R^2 - |x|^2) / (2N)`.
    BallTorsion { dim: usize, radius: f64 },
    /// `(1 - x_1^2) / 2`.
    SlabTorsion { dim: usize },
    /// Torsion of `x_1^2 + |x'|^2 / R^2 < 1`: `R^2 / (R^2 + N - 1) (1 - x_1^2 - |x'|^2/R^2) / 2`.
    EllipsoidTorsion { dim: usize, r: f64 },
    /// `(1 - |x'|^2) / (2(N-1))`.
    WaveguideDensity { dim: usize },
    /// `-|x|^2 / (R^2 - |x|^2)^2`.
    BallLimitPotential { dim: usize, radius: f64 },
    /// `-x_1^2 / (1 - x_1^2)^2`.
    SlabLimitPotential { dim: usize },
    /// `-|x'|^2 / (1 - |x'|^2)^2`.
    WaveguideLimitPotential { dim: usize },
}

impl ClosedForm {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::BallTorsion { .. } => "ball_torsion",
            ClosedForm::SlabTorsion { .. } => "slab_torsion",
            ClosedForm::EllipsoidTorsion { .. } => "ellipsoid_torsion",
            ClosedForm::WaveguideDensity { .. } => "waveguide_density",
            ClosedForm::BallLimitPotential { .. } => "ball_limit_potential",
            ClosedForm::SlabLimitPotential { .. } => "slab_limit_potential",
            ClosedForm::WaveguideLimitPotential { .. } => "waveguide_limit_potential",
        }
    }

    /// Looks a form up by name with its parameters.
    pub fn from_name(name: &str, dim: usize, radius: f64) -> Result<Self> {
        let cf = match name {
            "ball_torsion" => ClosedForm::BallTorsion { dim, radius },
            "slab_torsion" => ClosedForm::SlabTorsion { dim },
            "ellipsoid_torsion" => ClosedForm::EllipsoidTorsion { dim, r: radius },
            "waveguide_density" => ClosedForm::WaveguideDensity { dim },
            "ball_limit_potential" => ClosedForm::BallLimitPotential { dim, radius },
            "slab_limit_potential" => ClosedForm::SlabLimitPotential { dim },
            "waveguide_limit_potential" => ClosedForm::WaveguideLimitPotential { dim },
            _ => return Err(Error::InvalidArgument(format!("unknown closed form `{name}`"))),
        };
        cf.validate()?;
        Ok(cf)
    }

    pub fn dim(&self) -> usize {
        match *self {
            ClosedForm::BallTorsion { dim, .. }
            | ClosedForm::SlabTorsion { dim }
            | ClosedForm::EllipsoidTorsion { dim, .. }
            | ClosedForm::WaveguideDensity { dim }
            | ClosedForm::BallLimitPotential { dim, .. }
            | ClosedForm::SlabLimitPotential { dim }
            | ClosedForm::WaveguideLimitPotential { dim } => dim,
        }
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let min_dim = match self {
            ClosedForm::WaveguideDensity { .. } | ClosedForm::WaveguideLimitPotential { .. } => 2,
            _ => 1,
        };
        if dim < min_dim || dim > 3 {
            return Err(Error::InvalidDimension(dim));
        }
        let r = match *self {
            ClosedForm::BallTorsion { radius, .. } | ClosedForm::BallLimitPotential { radius, .. } => radius,
            ClosedForm::EllipsoidTorsion { r, .. } => r,
            _ => 1.0,
        };
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        Ok(())
    }

    /// Value at `x` (length `N`), zero outside the support.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let sq = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
        match *self {
            ClosedForm::BallTorsion { dim, radius } => ((radius * radius - sq(x)) / (2.0 * dim as f64)).max(0.0),
            ClosedForm::SlabTorsion { .. } => ((1.0 - x[0] * x[0]) / 2.0).max(0.0),
            ClosedForm::EllipsoidTorsion { dim, r } => {
                let r2 = r * r;
                let inside = 1.0 - x[0] * x[0] - sq(&x[1..]) / r2;
                (r2 / (r2 + dim as f64 - 1.0) * inside / 2.0).max(0.0)
            }
            ClosedForm::WaveguideDensity { dim } => ((1.0 - sq(&x[..n - 1])) / (2.0 * (dim as f64 - 1.0))).max(0.0),
            ClosedForm::BallLimitPotential { radius, .. } => limit(sq(x), radius * radius),
            ClosedForm::SlabLimitPotential { .. } => limit(x[0] * x[0], 1.0),
            ClosedForm::WaveguideLimitPotential { .. } => limit(sq(&x[..n - 1]), 1.0),
        }
    }

    /// Whether this form describes the set `shape` (or a truncation of it).
    fn fits(&self, shape: &ShapeSpec) -> bool {
        let unit_ball = |s: &ShapeSpec, d: usize| match s {
            ShapeSpec::Ball { center, radius } => {
                center.len() == d && center.iter().all(|c| *c == 0.0) && *radius == 1.0
            }
            ShapeSpec::Interval { a, b } => d == 1 && *a == -1.0 && *b == 1.0,
            _ => false,
        };
        let unit_slab = |s: &ShapeSpec, d: usize| match s {
            ShapeSpec::Slab { dim, half_width, .. } => *dim == d && *half_width == 1.0,
            ShapeSpec::Interval { a, b } => d == 1 && *a == -1.0 && *b == 1.0,
            _ => false,
        };
        match *self {
            ClosedForm::BallTorsion { dim, radius } | ClosedForm::BallLimitPotential { dim, radius } => match shape {
                ShapeSpec::Ball { center, radius: r } => {
                    center.len() == dim && center.iter().all(|c| *c == 0.0) && *r == radius
                }
                ShapeSpec::Interval { a, b } => dim == 1 && *a == -radius && *b == radius,
                _ => false,
            },
            ClosedForm::SlabTorsion { dim } | ClosedForm::SlabLimitPotential { dim } => unit_slab(shape, dim),
            ClosedForm::EllipsoidTorsion { dim, .. } => unit_slab(shape, dim) || unit_ball(shape, dim),
            ClosedForm::WaveguideDensity { dim } | ClosedForm::WaveguideLimitPotential { dim } => match shape {
                ShapeSpec::Waveguide { cross_section, .. } => unit_ball(cross_section, dim - 1),
                _ => false,
            },
        }
    }

    fn check_geometry(&self, domain: &GridDomain) -> Result<()> {
        self.validate()?;
        if domain.dim() != self.dim() {
            return Err(Error::GeometryMismatch {
                form: self.name().into(),
                reason: format!("form has dimension {}, grid has {}", self.dim(), domain.dim()),
            });
        }
        if !self.fits(domain.shape()) {
            return Err(Error::GeometryMismatch {
                form: self.name().into(),
                reason: format!("shape {:?} is not the form's geometry", domain.shape()),
            });
        }
        Ok(())
    }
}

fn limit(r2: f64, big_r2: f64) -> f64 {
    if r2 >= big_r2 {
        0.0
    } else {
        -r2 / (big_r2 - r2).powi(2)
    }
}

/// Evaluates `cf` at every node of `domain`.
pub fn sample(cf: &ClosedForm, domain: &Arc<GridDomain>) -> Result<ScalarField> {
    cf.check_geometry(domain)?;
    ScalarField::from_fn(domain, |x| cf.eval(x))
}

/// Node selection for [`compare`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    All,
    /// Nodes with `|x - center| <= radius`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Nodes in the closed box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Nodes whose `axis` coordinate is the lattice value nearest to `value`.
    Slice { axis: usize, value: f64 },
}

impl Window {
    fn contains(&self, x: &[f64], h: f64) -> bool {
        match self {
            Window::All => true,
            Window::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= radius * radius
            }
            Window::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, u))| *l <= *v && *v <= *u),
            Window::Slice { axis, value } => (x[*axis] / h).round() == (value / h).round(),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        let ok = match self {
            Window::All => true,
            Window::Ball { center, radius } => center.len() == dim && *radius >= 0.0,
            Window::Box { lo, hi } => lo.len() == dim && hi.len() == dim,
            Window::Slice { axis, .. } => *axis < dim,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("window {self:?} does not fit dimension {dim}")))
        }
    }
}

/// Errors of a numeric field against an exact one on a window.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub form: String,
    pub nodes: usize,
    pub max_abs: f64,
    /// `max |numeric - exact| / max |exact|` over the window.
    pub max_rel: f64,
    /// `||numeric - exact||_2 / ||exact||_2` over the window.
    pub l2_rel: f64,
}

pub fn compare(numeric: &ScalarField, cf: &ClosedForm, window: &Window) -> Result<ErrorReport> {
    let domain = numeric.domain();
    cf.check_geometry(domain)?;
    window.check(domain.dim())?;
    let dim = domain.dim();
    let h = domain.h();
    let (mut nodes, mut max_abs, mut max_exact, mut e2, mut x2) = (0usize, 0.0f64, 0.0f64, 0.0, 0.0);
    for i in 0..domain.len() {
        let c = domain.coords(i);
        let x = &c[..dim];
        if !window.contains(x, h) {
            continue;
        }
        let exact = cf.eval(x);
        let err = (numeric.values()[i] - exact).abs();
        nodes += 1;
        max_abs = max_abs.max(err);
        max_exact = max_exact.max(exact.abs());
        e2 += err * err;
        x2 += exact * exact;
    }
    if nodes == 0 {
        return Err(Error::InvalidArgument("comparison window holds no grid nodes".into()));
    }
    let rel = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
    Ok(ErrorReport {
        form: cf.name().into(),
        nodes,
        max_abs,
        max_rel: rel(max_abs, max_exact),
        l2_rel: rel(e2.sqrt(), x2.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_domain;

    #[test]
    fn point_values() {
        let b = ClosedForm::BallTorsion { dim: 2, radius: 1.0 };
        assert_eq!(b.eval(&[0.0, 0.0]), 0.25);
        assert_eq!(b.eval(&[1.0, 0.0]), 0.0);
        assert_eq!(b.eval(&[2.0, 0.0]), 0.0);
        let s = ClosedForm::SlabTorsion { dim: 2 };
        assert_eq!(s.eval(&[0.5, 7.0]), 0.375);
        assert_eq!(s.eval(&[1.0, 0.0]), 0.0);
        let v = ClosedForm::WaveguideLimitPotential { dim: 3 };
        assert!((v.eval(&[0.5, 0.0, 3.0]) + 0.25 / 0.5625).abs() < 1e-14);
        assert_eq!(v.eval(&[1.5, 0.0, 0.0]), 0.0);
        let ball3 = ClosedForm::BallTorsion { dim: 3, radius: 2.0 };
        assert!((ball3.eval(&[0.0; 3]) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ellipsoid_tends_to_slab() {
        let slab = ClosedForm::SlabTorsion { dim: 2 };
        let mut last = f64::INFINITY;
        for r in [2.0, 4.0, 8.0, 16.0] {
            let e = ClosedForm::EllipsoidTorsion { dim: 2, r };
            let mut worst: f64 = 0.0;
            for i in 0..=20 {
                for j in 0..=20 {
                    let x = [-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64];
                    worst = worst.max((e.eval(&x) - slab.eval(&x)).abs());
                }
            }
            assert!(worst < last);
            last = worst;
        }
    }

    #[test]
    fn geometry_is_checked() {
        let disk = build_domain(&ShapeSpec::unit_ball(2), 0.125).unwrap();
        assert!(sample(&ClosedForm::BallTorsion { dim: 2, radius: 1.0 }, &disk).is_ok());
        assert!(matches!(
            sample(&ClosedForm::SlabTorsion { dim: 2 }, &disk),
            Err(Error::GeometryMismatch { .. })
        ));
        assert!(matches!(
            sample(&ClosedForm::BallTorsion { dim: 3, radius: 1.0 }, &disk),
            Err(Error::GeometryMismatch { .. })
        ));
        assert!(ClosedForm::from_name("waveguide_density", 1, 1.0).is_err());
        assert!(ClosedForm::from_name("nope", 2, 1.0).is_err());
    }

    #[test]
    fn self_comparison_is_exact() {
        let slab = build_domain(&ShapeSpec::slab(2, 1.0, 2.0), 0.125).unwrap();
        let cf = ClosedForm::SlabTorsion { dim: 2 };
        let f = sample(&cf, &slab).unwrap();
        let r = compare(&f, &cf, &Window::All).unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert_eq!(r.l2_rel, 0.0);
        assert!(compare(&f, &cf, &Window::Ball { center: vec![9.0, 9.0], radius: 0.1 }).is_err());
    }

    #[test]
    fn sampled_torsions_solve_the_poisson_equation() {
        use crate::grid::apply_laplacian;
        for (shape, cf) in [
            (ShapeSpec::unit_ball(2), ClosedForm::BallTorsion { dim: 2, radius: 1.0 }),
            (ShapeSpec::slab(2, 1.0, 2.0), ClosedForm::SlabTorsion { dim: 2 }),
            (ShapeSpec::slab(3, 1.0, 1.0), ClosedForm::EllipsoidTorsion { dim: 3, r: 4.0 }),
        ] {
            let d = build_domain(&shape, 0.125).unwrap();
            let lw = apply_laplacian(&sample(&cf, &d).unwrap());
            let depth = d.boundary_depth();
            for i in 0..d.len() {
                let x = d.coords(i);
                // quadratics are reproduced exactly where the stencil sees no boundary
                if depth[i] > 1 && cf.eval(&x[..d.dim()]) > 0.1 {
                    assert!((lw.values()[i] - 1.0).abs() < 1e-10, "{} at {:?}", cf.name(), x);
                }
            }
        }
    }
}
