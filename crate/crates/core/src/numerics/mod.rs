//! Self-contained numerical kernels: Bessel functions, a Hermitian
//! eigensolver and the trace norm. All functions are pure.

mod bessel;
mod eigen;
mod matrix;

pub use bessel::{bessel_j, MAX_ARGUMENT as BESSEL_MAX_ARGUMENT};
pub use eigen::{
    clip, hermitian_eigensystem, singular_values, trace_norm, EigenSystem, CLIP_THRESHOLD, HERMITIAN_TOLERANCE,
    MAX_EIGEN_SIZE,
};
pub use matrix::ComplexMatrix;
