//! Explicit constants of the local `L^inf` estimate and the bounds built on it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::{build_domain, ShapeSpec};
use crate::lane_emden::check_exponent;
use crate::spectral::lambda_2gamma;

/// Exponent used for the two-dimensional constant when none is given.
pub const DEFAULT_MOSER_GAMMA: f64 = 4.0;
/// Grid spacing of the `lambda_{2,gamma}(B_1)` computation behind the two-dimensional constant.
pub const MOSER_DISK_SPACING: f64 = 1.0 / 128.0;
const MOSER_DISK_TOL: f64 = 1e-9;

/// `Gamma(x)` for `x` a positive integer or half-integer, by the recurrence from `Gamma(1)`, `Gamma(1/2)`.
pub fn gamma_half_integer(x: f64) -> Result<f64> {
    let twice = 2.0 * x;
    if !(x > 0.0 && twice.fract() == 0.0 && twice <= 340.0) {
        return Err(Error::InvalidArgument(format!("{x} is not a positive half-integer")));
    }
    let (mut g, mut t) = if (twice as u64).is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while t < x {
        g *= t;
        t += 1.0;
    }
    Ok(g)
}

/// Volume of the unit ball, `pi^(N/2) / Gamma(N/2 + 1)`.
pub fn unit_ball_volume(dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    let n = dim as f64;
    Ok(PI.powf(n / 2.0) / gamma_half_integer(n / 2.0 + 1.0)?)
}

/// Sobolev constant `T_N = pi N (N-2) (Gamma(N/2) / Gamma(N))^(2/N)`, `N >= 3`.
pub fn talenti_constant(dim: usize) -> Result<f64> {
    if dim < 3 {
        return Err(Error::InvalidDimension(dim));
    }
    let n = dim as f64;
    let ratio = gamma_half_integer(n / 2.0)? / gamma_half_integer(n)?;
    Ok(PI * n * (n - 2.0) * ratio.powf(2.0 / n))
}

fn disk_cache() -> &'static Mutex<HashMap<u64, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `lambda_{2,gamma}` of the unit disk on the grid of spacing [`MOSER_DISK_SPACING`], cached per `gamma`.
pub fn unit_disk_lambda_2gamma(gamma: f64) -> Result<f64> {
    let key = gamma.to_bits();
    if let Some(v) = disk_cache().lock().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let disk = build_domain(&ShapeSpec::unit_ball(2), MOSER_DISK_SPACING)?;
    let v = lambda_2gamma(&disk, gamma, MOSER_DISK_TOL)?;
    disk_cache().lock().expect("cache lock").insert(key, v);
    Ok(v)
}

/// The constant `C` of the local `L^inf` estimate for subsolutions of the
/// Lane-Emden equation. Independent of `q`; `gamma > 2` is only used for `N = 2`.
pub fn moser_constant(dim: usize, q: f64, gamma: Option<f64>) -> Result<f64> {
    check_exponent(q)?;
    match dim {
        1 => Ok(8.0 * 5f64.sqrt()),
        2 => {
            let g = gamma.unwrap_or(DEFAULT_MOSER_GAMMA);
            if !(g > 2.0 && g.is_finite()) {
                return Err(Error::InvalidExponent {
                    value: g,
                    range: "(2, inf)",
                });
            }
            let l = unit_disk_lambda_2gamma(g)?;
            Ok(moser_constant_2d(g, l))
        }
        3 => {
            let n = dim as f64;
            Ok(unit_ball_volume(dim)?.sqrt()
                * (4.0 * n / (n - 2.0)).powf(n * (n - 2.0) / 8.0)
                * (640.0 * talenti_constant(dim)?).powf(n / 4.0))
        }
        _ => Err(Error::InvalidDimension(dim)),
    }
}

/// Two-dimensional constant for a given `lambda_{2,gamma}(B_1)`.
pub fn moser_constant_2d(gamma: f64, lambda_disk: f64) -> f64 {
    PI.sqrt()
        * (2.0 * gamma).powf(gamma / (gamma - 2.0).powi(2))
        * (640.0 / lambda_disk).powf(gamma / (2.0 * (gamma - 2.0)))
}

/// `2^N C^2 ((2C)^(2-q) + 4)`.
pub fn dorin_factor(dim: usize, q: f64) -> Result<f64> {
    let c = moser_constant(dim, q, None)?;
    Ok(2f64.powi(dim as i32) * c * c * ((2.0 * c).powf(2.0 - q) + 4.0))
}

/// Explicit lower bound `lambda_1 / (2 * 2^N C^2 ((2C)^(2-q) + 4))` on `lambda_1(Omega; V)`.
pub fn corollary_bound(lambda1: f64, dim: usize, q: f64) -> Result<f64> {
    if !(lambda1 >= 0.0 && lambda1.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda1 must be nonnegative, got {lambda1}")));
    }
    Ok(0.5 * lambda1 / dorin_factor(dim, q)?)
}

/// Largest sup norm of a downward shift of an admissible potential that keeps the spectrum positive.
pub fn perturbation_margin(lambda1: f64, dim: usize, q: f64) -> Result<f64> {
    corollary_bound(lambda1, dim, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_gamma() {
        assert_eq!(gamma_half_integer(1.0).unwrap(), 1.0);
        assert_eq!(gamma_half_integer(4.0).unwrap(), 6.0);
        assert!((gamma_half_integer(1.5).unwrap() - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_half_integer(2.5).unwrap() - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert!(gamma_half_integer(0.0).is_err());
        assert!(gamma_half_integer(1.25).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn talenti_values() {
        assert!((talenti_constant(4).unwrap() - 8.0 * PI / 6f64.sqrt()).abs() < 1e-12);
        let t3 = 3.0 * PI * ((PI.sqrt() / 2.0) / 2.0).powf(2.0 / 3.0);
        assert!((talenti_constant(3).unwrap() - t3).abs() < 1e-12);
        assert!(matches!(talenti_constant(2), Err(Error::InvalidDimension(2))));
    }

    #[test]
    fn one_dimensional_constant_ignores_q() {
        for q in [1.0, 1.25, 1.5, 1.99] {
            assert!((moser_constant(1, q, None).unwrap() - 8.0 * 5f64.sqrt()).abs() < 1e-12);
        }
        assert!(moser_constant(4, 1.0, None).is_err());
        assert!(moser_constant(1, 2.0, None).is_err());
    }

    #[test]
    fn three_dimensional_constant() {
        let expected = (4.0 * PI / 3.0).sqrt() * 12f64.powf(3.0 / 8.0) * (640.0 * talenti_constant(3).unwrap()).powf(0.75);
        assert!((moser_constant(3, 1.0, None).unwrap() / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_dimensional_constant_at_gamma_four_is_linear() {
        // both exponents equal one at gamma = 4
        let c = moser_constant_2d(4.0, 20.0);
        assert!((c - PI.sqrt() * 8.0 * 32.0).abs() < 1e-10);
        assert!(moser_constant(2, 1.0, Some(2.0)).is_err());
    }

    #[test]
    fn corollary_is_linear_in_lambda() {
        assert_eq!(corollary_bound(0.0, 1, 1.0).unwrap(), 0.0);
        let a = corollary_bound(1.0, 1, 1.5).unwrap();
        let b = corollary_bound(3.0, 1, 1.5).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-15 * b);
        assert_eq!(perturbation_margin(2.0, 3, 1.0).unwrap(), corollary_bound(2.0, 3, 1.0).unwrap());
        assert!(corollary_bound(-1.0, 1, 1.0).is_err());
    }
}
