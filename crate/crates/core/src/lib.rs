//! Steady-state dispersive nonlinearity of a cold three-level Rydberg-EIT gas.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod collisional;
pub mod error;
pub mod linalg;
pub mod noninteracting;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod perturbative;
pub mod quadrature;
pub mod scan;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
