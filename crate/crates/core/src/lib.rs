//! Simulation and analysis of biphoton frequency-comb states: state
//! synthesis, entanglement measures, electro-optic quantum walks and
//! simulated two-photon state tomography.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comb;
pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod tomography;
pub mod walk;

pub use error::{Error, Result};
