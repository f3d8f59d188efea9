mod common;

use num_complex::Complex64 as C64;
use qfc_core::comb::partially_entangled_qudit;
use qfc_core::entanglement::{
    density_from_pure, depolarize, entropy_report, fidelity, partial_trace, pure_state_entropy, purity, Arm,
    DensityMatrix,
};
use qfc_core::numerics::hermitian_eigensystem;
use qfc_core::tomography::{
    gamma_basis, linear_reconstruct, mle_reconstruct, projector_set, simulate_counts, CountRecord, Noise,
};

use common::{random_density, rng};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn mle_round_trip_exact_counts() {
    for d in [2usize, 3] {
        let projs = projector_set(d).unwrap();
        let mut r = rng(1000 + d as u64);
        for k in 0..50 {
            let rank = 1 + k % (d * d);
            let rho = random_density(&mut r, d, rank);
            let counts = simulate_counts(&rho, &projs, 1e4, Noise::Exact).unwrap();
            let fit = mle_reconstruct(&counts, &projs, None).unwrap();
            let tr = fit.matrix().trace();
            assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-10);
            assert!(hermitian_eigensystem(fit.matrix()).unwrap().values[0] >= -1e-10);
            let f = fidelity(&fit, &rho).unwrap();
            assert!(f >= 0.9999, "d={d} state {k} (rank {rank}): fidelity {f}");
        }
    }
}

#[test]
fn mle_poisson_median_fidelity() {
    let projs = projector_set(2).unwrap();
    let target = density_from_pure(&partially_entangled_qudit(2, &[C64::new(0.5, 0.0)]).unwrap());
    let fids: Vec<f64> = (0..20)
        .map(|seed| {
            let counts = simulate_counts(&target, &projs, 1e5, Noise::Poisson { seed }).unwrap();
            fidelity(&mle_reconstruct(&counts, &projs, None).unwrap(), &target).unwrap()
        })
        .collect();
    assert!(median(fids) >= 0.99);
}

#[test]
fn linear_inversion_is_scale_invariant() {
    let projs = projector_set(3).unwrap();
    let basis = gamma_basis(3).unwrap();
    let rho = random_density(&mut rng(5), 3, 4);
    let counts = simulate_counts(&rho, &projs, 2500.0, Noise::Exact).unwrap();
    let base = linear_reconstruct(&counts, &projs, &basis).unwrap();
    assert!(base.max_abs_diff(rho.matrix()) < 1e-10);
    for lambda in [1e-3, 0.37, 12.0, 1e6] {
        let scaled: Vec<CountRecord> =
            counts.iter().map(|c| CountRecord { count: c.count * lambda, ..c.clone() }).collect();
        assert!(linear_reconstruct(&scaled, &projs, &basis).unwrap().max_abs_diff(&base) < 1e-10);
    }
}

#[test]
fn poisson_linear_estimate_can_be_unphysical() {
    let projs = projector_set(2).unwrap();
    let basis = gamma_basis(2).unwrap();
    let bell = density_from_pure(&partially_entangled_qudit(2, &[]).unwrap());
    let lowest: Vec<f64> = (0..20)
        .map(|seed| {
            let counts = simulate_counts(&bell, &projs, 1e3, Noise::Poisson { seed }).unwrap();
            let lin = linear_reconstruct(&counts, &projs, &basis).unwrap();
            assert!(lin.hermiticity_defect() < 1e-12);
            assert!((lin.trace().re - 1.0).abs() < 1e-9);
            hermitian_eigensystem(&lin).unwrap().values[0]
        })
        .collect();
    assert!(lowest.iter().any(|&x| x < 0.0));
}

#[test]
fn qutrit_window_state_exact_counts() {
    let projs = projector_set(3).unwrap();
    let pure = partially_entangled_qudit(3, &[C64::from_polar(0.45, 0.4), C64::from_polar(0.2, -1.1)]).unwrap();
    let rho = density_from_pure(&pure);
    let counts = simulate_counts(&rho, &projs, 1e4, Noise::Exact).unwrap();
    let fit = mle_reconstruct(&counts, &projs, None).unwrap();
    assert!(fidelity(&fit, &rho).unwrap() >= 0.9999);
    let s_in = pure_state_entropy(&pure).unwrap().absolute;
    let s_out = entropy_report(&partial_trace(&fit, Arm::Signal), 3).unwrap().absolute;
    assert!((s_in - s_out).abs() < 0.01, "{s_in} vs {s_out}");
}

#[test]
fn reconstructed_entropies_keep_their_order() {
    // second-line weights for entropies 1, 0.489 and 0.361 bits
    let weights = [0.0, 0.788_323_664_027_781_4, 0.988_391_176_621_093_4];
    let projs = projector_set(2).unwrap();
    let entropies: Vec<f64> = weights
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let rho = density_from_pure(&partially_entangled_qudit(2, &[C64::new(c, 0.0)]).unwrap());
            let counts = simulate_counts(&rho, &projs, 1e5, Noise::Poisson { seed: 40 + k as u64 }).unwrap();
            let fit = mle_reconstruct(&counts, &projs, None).unwrap();
            entropy_report(&partial_trace(&fit, Arm::Signal), 2).unwrap().absolute
        })
        .collect();
    assert!(entropies[0] > entropies[1] && entropies[1] > entropies[2], "{entropies:?}");
}

#[test]
fn reconstructed_purity_follows_noise_model() {
    let projs = projector_set(2).unwrap();
    let pure = density_from_pure(&partially_entangled_qudit(2, &[C64::new(0.3, 0.0)]).unwrap());
    for (k, p) in [0.95, 0.9, 0.8, 0.6].into_iter().enumerate() {
        let rho: DensityMatrix = depolarize(&pure, p).unwrap();
        let analytic = p * p + (1.0 - p * p) / 4.0;
        assert!((purity(&rho) - analytic).abs() < 1e-12);
        let counts = simulate_counts(&rho, &projs, 1e6, Noise::Poisson { seed: k as u64 }).unwrap();
        let fit = mle_reconstruct(&counts, &projs, None).unwrap();
        assert!((purity(&fit) - analytic).abs() < 0.01, "p={p}: {} vs {analytic}", purity(&fit));
    }
}
