//! Lane-Emden densities, Dirichlet and Schrodinger ground states, and
//! Hardy-type lower bounds on the ground-state energy, on uniform grids.

pub mod closed_forms;
pub mod config;
pub mod corpus;
pub mod error;
pub mod grid;
pub mod hardy;
pub mod lane_emden;
mod linalg;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
pub use linalg::CgReport;
