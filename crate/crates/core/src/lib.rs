//! Numerical laboratory for the phi^4 model with cutoffs on a truncated
//! boson Fock space.

pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod grid;
pub mod hamiltonian;
pub mod model;
pub mod operator;
pub mod report;
pub mod spectral;
pub mod theory;
pub mod verify;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
