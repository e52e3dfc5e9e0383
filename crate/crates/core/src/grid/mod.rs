//! Grid discretization of open sets and the discrete operators built on it.

mod domain;
mod field;
pub mod io;
mod operators;
mod shape;

pub use domain::{build_domain, GridDomain, MIN_SPACINGS, THETA_MIN};
pub use field::ScalarField;
pub use operators::{
    apply_laplacian, default_iteration_cap, dirichlet_energy, gradient_norm_squared_field, gradient_squared,
    l2_inner, l2_norm, solve_poisson, solve_poisson_from,
};
pub use shape::{BallSpec, ShapeSpec};

/// Default gradient floor for weights and potentials built from a density `w`.
///
/// Half a cell times the largest discrete gradient, i.e. the value of `w` at
/// distance `h/2` from the boundary. Below it `|grad w / w|` is capped at
/// `2/h`, the largest value the grid can resolve.
pub fn default_floor(w: &ScalarField) -> f64 {
    let g = gradient_squared(w).into_iter().fold(0.0, f64::max).sqrt();
    let h = w.domain().h();
    let floor = 0.5 * h * g;
    if floor > 0.0 {
        floor
    } else {
        h * h
    }
}
