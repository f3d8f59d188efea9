//! Simulated two-photon state tomography on a d = 2 or d = 3 window:
//! projector quorums, expected and Poisson-sampled coincidence counts, linear
//! inversion and maximum-likelihood reconstruction.

mod basis;
mod counts;
mod projectors;
mod reconstruct;

pub use basis::{b_matrix, gamma_basis, gell_mann, HermitianBasis, CONDITION_FLOOR};
pub use counts::{simulate_counts, CountRecord, Noise};
pub use projectors::{projector_set, Projector, ProjectorSet};
pub use reconstruct::{linear_reconstruct, mle_reconstruct, mle_reconstruct_with, psd_projection, MleOptions, MleReport};
