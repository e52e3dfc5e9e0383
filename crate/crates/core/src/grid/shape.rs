//! Continuous open sets that can be put on a grid.
//!
//! Unbounded sets (slab, wave-guide) are represented by their box
//! truncation: the transverse or axial extent is a half-length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A ball given by center and radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Open set description. The dimension is implied by the variant data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    /// `(a, b)` in one dimension.
    Interval { a: f64, b: f64 },
    /// Product of open intervals `(lo[k], hi[k])`.
    Rectangle { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    UnionOfBalls { balls: Vec<BallSpec> },
    /// `(-half_width, half_width) x (-transverse_extent, transverse_extent)^(dim-1)`.
    Slab {
        dim: usize,
        half_width: f64,
        transverse_extent: f64,
    },
    /// `cross_section x (-axial_extent, axial_extent)`, the axis being the last coordinate.
    Waveguide {
        cross_section: Box<ShapeSpec>,
        axial_extent: f64,
    },
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!("{what} must be positive and finite, got {v}")))
    }
}

fn finite_all(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!("{what} has non-finite entries")))
    }
}

/// Distance travelled along `x + t * sign * e_axis` before leaving the box `(lo, hi)`.
fn box_exit(x: f64, lo: f64, hi: f64, sign: f64) -> f64 {
    if sign > 0.0 {
        hi - x
    } else {
        x - lo
    }
}

/// Parameter interval `(t_in, t_out)` where the axis ray lies inside the ball.
fn ball_ray_interval(x: &[f64], center: &[f64], radius: f64, axis: usize, sign: f64) -> Option<(f64, f64)> {
    let mut transverse = 0.0;
    for (k, (xi, ci)) in x.iter().zip(center).enumerate() {
        if k != axis {
            transverse += (xi - ci) * (xi - ci);
        }
    }
    let disc = radius * radius - transverse;
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let along = sign * (x[axis] - center[axis]);
    Some((-along - root, -along + root))
}

impl ShapeSpec {
    pub fn interval(a: f64, b: f64) -> Self {
        ShapeSpec::Interval { a, b }
    }

    pub fn rectangle(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        ShapeSpec::Rectangle { lo, hi }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        ShapeSpec::Ball { center, radius }
    }

    /// Unit ball centered at the origin of `R^dim`.
    pub fn unit_ball(dim: usize) -> Self {
        ShapeSpec::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn slab(dim: usize, half_width: f64, transverse_extent: f64) -> Self {
        ShapeSpec::Slab {
            dim,
            half_width,
            transverse_extent,
        }
    }

    pub fn waveguide(cross_section: ShapeSpec, axial_extent: f64) -> Self {
        ShapeSpec::Waveguide {
            cross_section: Box::new(cross_section),
            axial_extent,
        }
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        match self {
            ShapeSpec::Interval { .. } => 1,
            ShapeSpec::Rectangle { lo, .. } => lo.len(),
            ShapeSpec::Ball { center, .. } => center.len(),
            ShapeSpec::UnionOfBalls { balls } => balls.first().map_or(0, |b| b.center.len()),
            ShapeSpec::Slab { dim, .. } => *dim,
            ShapeSpec::Waveguide { cross_section, .. } => cross_section.dim() + 1,
        }
    }

    /// Checks the variant invariants (positive radii and extents, ordered bounds, `1 <= N <= 3`).
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidShape(format!("dimension {dim} not in 1..=3")));
        }
        match self {
            ShapeSpec::Interval { a, b } => {
                finite_all(&[*a, *b], "interval")?;
                if b <= a {
                    return Err(Error::InvalidShape(format!("interval needs b > a, got ({a}, {b})")));
                }
            }
            ShapeSpec::Rectangle { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(Error::InvalidShape("rectangle bounds differ in length".into()));
                }
                finite_all(lo, "rectangle lower bounds")?;
                finite_all(hi, "rectangle upper bounds")?;
                if lo.iter().zip(hi).any(|(l, h)| h <= l) {
                    return Err(Error::InvalidShape("rectangle needs hi > lo on every axis".into()));
                }
            }
            ShapeSpec::Ball { center, radius } => {
                finite_all(center, "ball center")?;
                positive(*radius, "radius")?;
            }
            ShapeSpec::UnionOfBalls { balls } => {
                if balls.is_empty() {
                    return Err(Error::InvalidShape("union of balls is empty".into()));
                }
                for b in balls {
                    if b.center.len() != dim {
                        return Err(Error::InvalidShape("balls of a union must share one dimension".into()));
                    }
                    finite_all(&b.center, "ball center")?;
                    positive(b.radius, "radius")?;
                }
            }
            ShapeSpec::Slab {
                half_width,
                transverse_extent,
                ..
            } => {
                positive(*half_width, "half_width")?;
                positive(*transverse_extent, "transverse_extent")?;
            }
            ShapeSpec::Waveguide {
                cross_section,
                axial_extent,
            } => {
                if dim < 2 {
                    return Err(Error::InvalidShape("wave-guide needs N >= 2".into()));
                }
                cross_section.validate()?;
                positive(*axial_extent, "axial_extent")?;
            }
        }
        Ok(())
    }

    /// Strict membership `x in Omega`.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ShapeSpec::Interval { a, b } => x[0] > *a && x[0] < *b,
            ShapeSpec::Rectangle { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(xi, (l, h))| xi > l && xi < h),
            ShapeSpec::Ball { center, radius } => dist2(x, center) < radius * radius,
            ShapeSpec::UnionOfBalls { balls } => balls.iter().any(|b| dist2(x, &b.center) < b.radius * b.radius),
            ShapeSpec::Slab {
                half_width,
                transverse_extent,
                ..
            } => x[0].abs() < *half_width && x[1..].iter().all(|xi| xi.abs() < *transverse_extent),
            ShapeSpec::Waveguide {
                cross_section,
                axial_extent,
            } => {
                let n = x.len();
                x[n - 1].abs() < *axial_extent && cross_section.contains(&x[..n - 1])
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ShapeSpec::Interval { a, b } => (vec![*a], vec![*b]),
            ShapeSpec::Rectangle { lo, hi } => (lo.clone(), hi.clone()),
            ShapeSpec::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            ShapeSpec::UnionOfBalls { balls } => {
                let dim = self.dim();
                let mut lo = vec![f64::INFINITY; dim];
                let mut hi = vec![f64::NEG_INFINITY; dim];
                for b in balls {
                    for k in 0..dim {
                        lo[k] = lo[k].min(b.center[k] - b.radius);
                        hi[k] = hi[k].max(b.center[k] + b.radius);
                    }
                }
                (lo, hi)
            }
            ShapeSpec::Slab {
                dim,
                half_width,
                transverse_extent,
            } => {
                let mut lo = vec![-transverse_extent; *dim];
                let mut hi = vec![*transverse_extent; *dim];
                lo[0] = -half_width;
                hi[0] = *half_width;
                (lo, hi)
            }
            ShapeSpec::Waveguide {
                cross_section,
                axial_extent,
            } => {
                let (mut lo, mut hi) = cross_section.bounding_box();
                lo.push(-axial_extent);
                hi.push(*axial_extent);
                (lo, hi)
            }
        }
    }

    /// Width of the narrowest feature (smallest diameter or side).
    pub fn min_feature(&self) -> f64 {
        match self {
            ShapeSpec::Interval { a, b } => b - a,
            ShapeSpec::Rectangle { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min),
            ShapeSpec::Ball { radius, .. } => 2.0 * radius,
            ShapeSpec::UnionOfBalls { balls } => balls.iter().map(|b| 2.0 * b.radius).fold(f64::INFINITY, f64::min),
            ShapeSpec::Slab {
                dim,
                half_width,
                transverse_extent,
            } => {
                if *dim == 1 {
                    2.0 * half_width
                } else {
                    2.0 * half_width.min(*transverse_extent)
                }
            }
            ShapeSpec::Waveguide {
                cross_section,
                axial_extent,
            } => cross_section.min_feature().min(2.0 * axial_extent),
        }
    }

    /// Distance from the interior point `x` to the boundary along `sign * e_axis`.
    ///
    /// Used by the grid to close the stencil at the exact boundary crossing.
    pub fn exit_distance(&self, x: &[f64], axis: usize, sign: f64) -> f64 {
        match self {
            ShapeSpec::Interval { a, b } => box_exit(x[0], *a, *b, sign),
            ShapeSpec::Rectangle { lo, hi } => box_exit(x[axis], lo[axis], hi[axis], sign),
            ShapeSpec::Ball { center, radius } => {
                ball_ray_interval(x, center, *radius, axis, sign).map_or(0.0, |(_, t_out)| t_out.max(0.0))
            }
            ShapeSpec::UnionOfBalls { balls } => {
                let spans: Vec<(f64, f64)> = balls
                    .iter()
                    .filter_map(|b| ball_ray_interval(x, &b.center, b.radius, axis, sign))
                    .collect();
                // Walk through overlapping chords starting from t = 0.
                let mut reach = 0.0_f64;
                loop {
                    let next = spans
                        .iter()
                        .filter(|(t_in, t_out)| *t_in < reach && *t_out > reach)
                        .map(|(_, t_out)| *t_out)
                        .fold(reach, f64::max);
                    if next > reach {
                        reach = next;
                    } else {
                        break reach;
                    }
                }
            }
            ShapeSpec::Slab {
                half_width,
                transverse_extent,
                ..
            } => {
                if axis == 0 {
                    box_exit(x[0], -half_width, *half_width, sign)
                } else {
                    box_exit(x[axis], -transverse_extent, *transverse_extent, sign)
                }
            }
            ShapeSpec::Waveguide {
                cross_section,
                axial_extent,
            } => {
                let n = x.len();
                if axis == n - 1 {
                    box_exit(x[axis], -axial_extent, *axial_extent, sign)
                } else {
                    cross_section.exit_distance(&x[..n - 1], axis, sign)
                }
            }
        }
    }

    /// Copy of an unbounded-set truncation with a new truncation length.
    pub fn with_truncation(&self, extent: f64) -> Result<ShapeSpec> {
        match self {
            ShapeSpec::Slab { dim, half_width, .. } => Ok(ShapeSpec::slab(*dim, *half_width, extent)),
            ShapeSpec::Waveguide { cross_section, .. } => Ok(ShapeSpec::waveguide((**cross_section).clone(), extent)),
            _ => Err(Error::InvalidShape("only slabs and wave-guides have a truncation length".into())),
        }
    }
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(ShapeSpec::interval(1.0, 1.0).validate().is_err());
        assert!(ShapeSpec::ball(vec![0.0, 0.0], 0.0).validate().is_err());
        assert!(ShapeSpec::slab(2, 1.0, -1.0).validate().is_err());
        assert!(ShapeSpec::ball(vec![0.0; 4], 1.0).validate().is_err());
        assert!(ShapeSpec::waveguide(ShapeSpec::unit_ball(2), 0.0).validate().is_err());
        assert!(ShapeSpec::UnionOfBalls { balls: vec![] }.validate().is_err());
    }

    #[test]
    fn ball_exit_distance() {
        let b = ShapeSpec::unit_ball(2);
        let d = b.exit_distance(&[0.5, 0.0], 0, 1.0);
        assert!((d - 0.5).abs() < 1e-15);
        let d = b.exit_distance(&[0.0, 0.6], 0, -1.0);
        assert!((d - 0.8).abs() < 1e-15);
    }

    #[test]
    fn union_exit_walks_through_overlaps() {
        let u = ShapeSpec::UnionOfBalls {
            balls: vec![
                BallSpec { center: vec![0.0, 0.0], radius: 1.0 },
                BallSpec { center: vec![1.5, 0.0], radius: 1.0 },
            ],
        };
        let d = u.exit_distance(&[0.0, 0.0], 0, 1.0);
        assert!((d - 2.5).abs() < 1e-15);
        let d = u.exit_distance(&[0.0, 0.0], 0, -1.0);
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn waveguide_membership() {
        let w = ShapeSpec::waveguide(ShapeSpec::unit_ball(2), 3.0);
        assert_eq!(w.dim(), 3);
        assert!(w.contains(&[0.5, 0.0, 2.9]));
        assert!(!w.contains(&[0.5, 0.0, 3.0]));
        assert!(!w.contains(&[0.9, 0.9, 0.0]));
        assert!((w.exit_distance(&[0.0, 0.0, 2.0], 2, 1.0) - 1.0).abs() < 1e-15);
    }
}
