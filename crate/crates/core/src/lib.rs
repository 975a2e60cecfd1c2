//! Electromagnetic Green's function of a layered dispersive cylinder and the
//! collective dynamics of two emitters coupled through it.
//!
//! Units: `c = 1` and the Lorentz resonance frequency `omega_0 = 1`, so
//! lengths are in `c / omega_0` and rates in the free-space single-atom rate
//! `Gamma_0`.

pub mod atom_dynamics;
pub mod entanglement;
pub mod error;
pub mod layered_green;
pub mod medium;
pub mod sommerfeld;
pub mod specfun;

pub use error::{Error, Result};
