mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qfc_core::comb::partially_entangled_qudit;
use qfc_core::entanglement::{
    density_from_pure, depolarize, entropy_report, fidelity, log_negativity, partial_trace, pure_state_entropy,
    purity, Arm,
};
use qfc_core::numerics::hermitian_eigensystem;

use common::{random_density, random_pure, rng};

/// Second-line weights reproducing entropies of 0.489 and 0.361 bits,
/// frozen from a bisection on the closed-form two-level spectrum
/// `λ± = (1 ± √(1 − (1 + c²)⁻²)) / 2`.
const C_FOR_0489: f64 = 0.788_323_664_027_781_4;
const C_FOR_0361: f64 = 0.988_391_176_621_093_4;

fn two_level_entropy(c: f64) -> f64 {
    pure_state_entropy(&partially_entangled_qudit(2, &[C64::new(c, 0.0)]).unwrap()).unwrap().absolute
}

fn bisect_entropy(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if two_level_entropy(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn bisection_recovers_entropy_targets() {
    for (target, frozen) in [(0.489, C_FOR_0489), (0.361, C_FOR_0361)] {
        let c = bisect_entropy(target);
        assert!((c - frozen).abs() < 1e-9, "{c} vs {frozen}");
        assert!((two_level_entropy(c) - target).abs() < 1e-3);
    }
    assert!(bisect_entropy(0.361) > bisect_entropy(0.489));
    assert!((two_level_entropy(0.0) - 1.0).abs() < 1e-12);
}

#[test]
fn entropy_decreases_with_second_line_weight() {
    let grid: Vec<f64> = (0..=60).map(|k| k as f64 * 0.05).collect();
    let values: Vec<f64> = grid.iter().map(|&c| two_level_entropy(c)).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn reduced_spectra_of_random_pure_states_match() {
    let mut r = rng(99);
    for (ds, di) in [(2, 3), (3, 3), (4, 2)] {
        let st = random_pure(&mut r, ds, di);
        let rho = density_from_pure(&st);
        let a = hermitian_eigensystem(&partial_trace(&rho, Arm::Signal)).unwrap().values;
        let b = hermitian_eigensystem(&partial_trace(&rho, Arm::Idler)).unwrap().values;
        let nz = |v: Vec<f64>| -> Vec<f64> { v.into_iter().rev().filter(|x| *x > 1e-10).collect() };
        let (a, b) = (nz(a), nz(b));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn fidelity_is_symmetric_on_random_pairs() {
    let mut r = rng(4);
    for _ in 0..10 {
        let a = random_density(&mut r, 2, 3);
        let b = random_density(&mut r, 2, 2);
        assert!((fidelity(&a, &b).unwrap() - fidelity(&b, &a).unwrap()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arm_entropies_agree_for_pure_states(seed in any::<u64>(), ds in 2usize..5, di in 2usize..5) {
        let st = random_pure(&mut rng(seed), ds, di);
        let rho = density_from_pure(&st);
        let base = ds.min(di).max(2);
        let s = entropy_report(&partial_trace(&rho, Arm::Signal), base).unwrap();
        let i = entropy_report(&partial_trace(&rho, Arm::Idler), base).unwrap();
        prop_assert!((s.absolute - i.absolute).abs() < 1e-9);
        prop_assert!(s.normalized <= 1.0 + 1e-10 && s.normalized >= 0.0);
    }

    #[test]
    fn depolarizing_never_purifies(seed in any::<u64>(), rank in 1usize..5, p in 0.0f64..=1.0) {
        let rho = random_density(&mut rng(seed), 2, rank);
        prop_assert!(purity(&depolarize(&rho, p).unwrap()) <= purity(&rho) + 1e-12);
    }

    #[test]
    fn log_negativity_nonnegative(seed in any::<u64>(), d in 2usize..4, rank in 1usize..10) {
        let rho = random_density(&mut rng(seed), d, rank.min(d * d));
        prop_assert!(log_negativity(&rho).unwrap() >= -1e-12);
    }

    #[test]
    fn product_states_have_zero_log_negativity(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let s = common::random_matrix(&mut r, d, 1);
        let i = common::random_matrix(&mut r, 1, d);
        let a = &s * &i;
        let st = qfc_core::comb::BiphotonAmplitude::normalized(
            (1..=d as i32).collect(), (1..=d as i32).map(|k| -k).collect(), a,
        ).unwrap();
        prop_assert!(log_negativity(&density_from_pure(&st)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn depolarized_fidelity_formula(seed in any::<u64>(), d in 2usize..4, p in 0.0f64..=1.0) {
        let st = random_pure(&mut rng(seed), d, d);
        let pure = density_from_pure(&st);
        let f = fidelity(&depolarize(&pure, p).unwrap(), &pure).unwrap();
        let expected = p + (1.0 - p) / (d * d) as f64;
        prop_assert!((f - expected).abs() < 1e-10);
    }
}
