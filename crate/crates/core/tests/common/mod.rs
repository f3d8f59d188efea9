#![allow(dead_code)]

use num_complex::Complex64 as C64;
use qfc_core::comb::BiphotonAmplitude;
use qfc_core::entanglement::DensityMatrix;
use qfc_core::numerics::ComplexMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex(rng: &mut ChaCha8Rng) -> C64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Ginibre-type density matrix of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> DensityMatrix {
    let g = random_matrix(rng, d * d, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part(), d, d).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, ds: usize, di: usize) -> BiphotonAmplitude {
    let a = random_matrix(rng, ds, di);
    BiphotonAmplitude::normalized((1..=ds as i32).collect(), (1..=di as i32).map(|k| -k).collect(), a).unwrap()
}
