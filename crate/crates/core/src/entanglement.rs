//! Density matrices over the signal ⊗ idler space and the entanglement and
//! quality measures computed from them.
//!
//! The two-party index is `s_slot · d_i + i_slot`, matching the slot layout
//! of [`BiphotonAmplitude`].

use num_complex::Complex64 as C64;

use crate::comb::BiphotonAmplitude;
use crate::error::{Error, Result};
use crate::numerics::{clip, hermitian_eigensystem, trace_norm, ComplexMatrix};

/// Tolerance for the Hermitian, trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Relative eigenvalue cut used by [`numerical_rank`].
pub const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    Signal,
    Idler,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    signal_dim: usize,
    idler_dim: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(matrix: ComplexMatrix, signal_dim: usize, idler_dim: usize) -> Result<Self> {
        let n = signal_dim * idler_dim;
        if n == 0 || matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Contract(format!(
                "{}x{} matrix does not match subsystem dims {signal_dim}x{idler_dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOLERANCE {
            return Err(Error::Contract(format!("density matrix is not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::Contract(format!("density matrix trace {tr} differs from 1")));
        }
        let matrix = matrix.hermitian_part();
        let lowest = hermitian_eigensystem(&matrix)?.values[0];
        if lowest < -STATE_TOLERANCE {
            return Err(Error::Contract(format!("density matrix has negative eigenvalue {lowest:.3e}")));
        }
        Ok(Self { matrix, signal_dim, idler_dim })
    }

    /// `I / (d_s d_i)`.
    pub fn maximally_mixed(signal_dim: usize, idler_dim: usize) -> Self {
        let n = signal_dim * idler_dim;
        Self { matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64), signal_dim, idler_dim }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    pub fn idler_dim(&self) -> usize {
        self.idler_dim
    }

    pub fn dim(&self) -> usize {
        self.signal_dim * self.idler_dim
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(state: &BiphotonAmplitude) -> DensityMatrix {
    let v = state.to_vector();
    DensityMatrix {
        matrix: ComplexMatrix::outer(&v, &v),
        signal_dim: state.signal_modes().len(),
        idler_dim: state.idler_modes().len(),
    }
}

/// `p ρ + (1 − p) I / (d_s d_i)`.
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("depolarizing weight p = {p} outside [0, 1]")));
    }
    let mixed = DensityMatrix::maximally_mixed(rho.signal_dim, rho.idler_dim);
    let matrix = &rho.matrix.scale_real(p) + &mixed.matrix.scale_real(1.0 - p);
    Ok(DensityMatrix { matrix, signal_dim: rho.signal_dim, idler_dim: rho.idler_dim })
}

/// Reduced state of the kept arm.
pub fn partial_trace(rho: &DensityMatrix, keep: Arm) -> ComplexMatrix {
    let (ds, di) = (rho.signal_dim, rho.idler_dim);
    let m = &rho.matrix;
    match keep {
        Arm::Signal => ComplexMatrix::from_fn(ds, ds, |a, b| (0..di).map(|i| m[(a * di + i, b * di + i)]).sum()),
        Arm::Idler => ComplexMatrix::from_fn(di, di, |a, b| (0..ds).map(|s| m[(s * di + a, s * di + b)]).sum()),
    }
}

/// Reduced signal state `A A†` of a pure state, without forming `|ψ⟩⟨ψ|`.
pub fn reduced_pure(state: &BiphotonAmplitude, keep: Arm) -> ComplexMatrix {
    let a = state.amplitudes();
    match keep {
        Arm::Signal => a * &a.adjoint(),
        Arm::Idler => &a.transpose() * &a.conj(),
    }
}

/// Transposes the given arm's indices.
pub fn partial_transpose(rho: &DensityMatrix, arm: Arm) -> ComplexMatrix {
    let di = rho.idler_dim;
    let n = rho.dim();
    let m = &rho.matrix;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (s, i) = (r / di, r % di);
        let (s2, i2) = (c / di, c % di);
        match arm {
            Arm::Signal => m[(s2 * di + i, s * di + i2)],
            Arm::Idler => m[(s * di + i2, s2 * di + i)],
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Von Neumann entropy in bits.
    pub absolute: f64,
    /// Entropy in log base `base`, in [0, 1].
    pub normalized: f64,
    pub base: usize,
    pub numerical_rank: usize,
}

/// Eigenvalues above `RANK_THRESHOLD · λ_max`.
pub fn numerical_rank(eigenvalues: &[f64]) -> usize {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    eigenvalues.iter().filter(|&&x| x > RANK_THRESHOLD * top).count()
}

/// Entropy of a reduced state with `S_N = S_A / log2(base_dim)`.
pub fn entropy_report(reduced: &ComplexMatrix, base_dim: usize) -> Result<EntropyReport> {
    if base_dim < 2 {
        return Err(Error::Domain(format!("entropy log base must be ≥ 2, got {base_dim}")));
    }
    let mut eigenvalues = hermitian_eigensystem(reduced)?.values;
    eigenvalues.reverse();
    let absolute: f64 = eigenvalues
        .iter()
        .map(|&x| clip(x))
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum();
    Ok(EntropyReport {
        absolute,
        normalized: absolute / (base_dim as f64).log2(),
        base: base_dim,
        numerical_rank: numerical_rank(&eigenvalues),
        eigenvalues,
    })
}

/// Entropy report with the numerical rank as log base.
pub fn entropy_report_by_rank(reduced: &ComplexMatrix) -> Result<EntropyReport> {
    let values = hermitian_eigensystem(reduced)?.values;
    entropy_report(reduced, numerical_rank(&values).max(2))
}

/// Entanglement entropy of a pure state, normalised by the arm dimension.
pub fn pure_state_entropy(state: &BiphotonAmplitude) -> Result<EntropyReport> {
    let reduced = reduced_pure(state, Arm::Signal);
    entropy_report(&reduced, reduced.rows())
}

fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigensystem(m)?.map_values(|x| clip(x).sqrt()))
}

/// `(tr √(√ρ₁ ρ₂ √ρ₁))²`, clamped to [0, 1].
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if (rho1.signal_dim, rho1.idler_dim) != (rho2.signal_dim, rho2.idler_dim) {
        return Err(Error::Contract(format!(
            "fidelity between {}x{} and {}x{} states",
            rho1.signal_dim, rho1.idler_dim, rho2.signal_dim, rho2.idler_dim
        )));
    }
    let s = psd_sqrt(&rho1.matrix)?;
    let inner = (&(&s * &rho2.matrix) * &s).hermitian_part();
    let root: f64 = hermitian_eigensystem(&inner)?.values.iter().map(|&x| clip(x).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.hs_inner(&rho.matrix).re
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Concurrence {
    pub concurrence: f64,
    pub entanglement_of_formation: f64,
}

fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x].iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Two-qubit concurrence and entanglement of formation.
pub fn concurrence_and_eof(rho: &DensityMatrix) -> Result<Concurrence> {
    if rho.signal_dim != 2 || rho.idler_dim != 2 {
        return Err(Error::UnsupportedDimension(format!(
            "concurrence is defined here for 2x2 subsystems only, got {}x{}",
            rho.signal_dim, rho.idler_dim
        )));
    }
    let i = C64::new(0.0, 1.0);
    let y = ComplexMatrix::from_row_major(2, 2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])?;
    let yy = y.kron(&y);
    let flipped = &(&yy * &rho.matrix.conj()) * &yy;
    let s = psd_sqrt(&rho.matrix)?;
    let inner = (&(&s * &flipped) * &s).hermitian_part();
    let mut lambda: Vec<f64> = hermitian_eigensystem(&inner)?.values.iter().map(|&x| clip(x).sqrt()).collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    let c = (lambda[0] - lambda[1] - lambda[2] - lambda[3]).clamp(0.0, 1.0);
    let e = binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0);
    Ok(Concurrence { concurrence: c, entanglement_of_formation: e })
}

/// `log2 ‖ρ^{T_s}‖₁`.
pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok(trace_norm(&partial_transpose(rho, Arm::Signal))?.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::{diagonal_component, partially_entangled_qudit, ModeConvention};

    fn bell() -> DensityMatrix {
        density_from_pure(&partially_entangled_qudit(2, &[]).unwrap())
    }

    fn product() -> DensityMatrix {
        density_from_pure(&BiphotonAmplitude::basis_ket(1, -1))
    }

    #[test]
    fn bell_density_corners() {
        let rho = bell();
        let m = rho.matrix();
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[(r, c)].re - 0.5).abs() < 1e-15);
        }
        assert!((m.trace().re - 1.0).abs() < 1e-12);
        assert_eq!(product().matrix()[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m, 2, 2).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(4), 2, 2).is_err());
        let neg = ComplexMatrix::from_real_diagonal(&[1.2, -0.2, 0.0, 0.0]);
        assert!(DensityMatrix::new(neg, 2, 2).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0), 2, 2).is_err());
        assert!(DensityMatrix::new(bell().into_matrix(), 2, 2).is_ok());
    }

    #[test]
    fn depolarize_limits() {
        let rho = bell();
        assert_eq!(depolarize(&rho, 1.0).unwrap(), rho);
        let mixed = depolarize(&rho, 0.0).unwrap();
        assert!((purity(&mixed) - 0.25).abs() < 1e-15);
        assert!(depolarize(&rho, 1.5).is_err());
        assert!(depolarize(&rho, -0.1).is_err());
        let f = fidelity(&depolarize(&rho, 0.9).unwrap(), &rho).unwrap();
        assert!((f - 0.925).abs() < 1e-10);
    }

    #[test]
    fn partial_traces() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(partial_trace(&bell(), Arm::Signal).max_abs_diff(&half) < 1e-15);
        assert!(partial_trace(&bell(), Arm::Idler).max_abs_diff(&half) < 1e-15);
        let r = partial_trace(&product(), Arm::Idler);
        assert_eq!(r.rows(), 1);
        assert!((r[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_pure_matches_partial_trace() {
        let st = partially_entangled_qudit(3, &[C64::new(0.4, 0.2), C64::new(-0.1, 0.3)]).unwrap();
        let rho = density_from_pure(&st);
        for arm in [Arm::Signal, Arm::Idler] {
            assert!(reduced_pure(&st, arm).max_abs_diff(&partial_trace(&rho, arm)) < 1e-14);
        }
    }

    #[test]
    fn entropy_values() {
        let r = entropy_report(&partial_trace(&bell(), Arm::Signal), 2).unwrap();
        assert!((r.absolute - 1.0).abs() < 1e-12 && (r.normalized - 1.0).abs() < 1e-12);
        let c = ModeConvention::excluding_degenerate(17).unwrap();
        let mes = pure_state_entropy(&diagonal_component(&c, 0).unwrap()).unwrap();
        assert!((mes.absolute - 3.0).abs() < 1e-12);
        assert!((mes.normalized - 1.0).abs() < 1e-12);
        assert_eq!(mes.numerical_rank, 8);
        assert!(entropy_report(&ComplexMatrix::identity(1), 1).is_err());
    }

    #[test]
    fn entropy_by_rank_uses_rank_as_base() {
        let reduced = ComplexMatrix::from_real_diagonal(&[0.5, 0.5, 0.0, 0.0]);
        let r = entropy_report_by_rank(&reduced).unwrap();
        assert_eq!(r.base, 2);
        assert!((r.normalized - 1.0).abs() < 1e-12);
        let by_dim = entropy_report(&reduced, 4).unwrap();
        assert!((by_dim.normalized - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_cases() {
        let rho = bell();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(2, 2);
        assert!((fidelity(&rho, &mixed).unwrap() - 0.25).abs() < 1e-12);
        assert!((fidelity(&mixed, &rho).unwrap() - 0.25).abs() < 1e-12);
        let three = DensityMatrix::maximally_mixed(3, 3);
        assert!(matches!(fidelity(&rho, &three), Err(Error::Contract(_))));
    }

    #[test]
    fn purity_cases() {
        assert!((purity(&bell()) - 1.0).abs() < 1e-12);
        assert!((purity(&DensityMatrix::maximally_mixed(3, 3)) - 1.0 / 9.0).abs() < 1e-15);
        let rho = depolarize(&bell(), 0.9).unwrap();
        let m = rho.matrix();
        let brute = (m * m).trace().re;
        assert!((purity(&rho) - brute).abs() < 1e-14);
    }

    #[test]
    fn concurrence_cases() {
        let b = concurrence_and_eof(&bell()).unwrap();
        assert!((b.concurrence - 1.0).abs() < 1e-9 && (b.entanglement_of_formation - 1.0).abs() < 1e-9);
        let two_qubit_product = density_from_pure(&BiphotonAmplitude::normalized(
            vec![1, 2],
            vec![-1, -2],
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
        )
        .unwrap());
        let p = concurrence_and_eof(&two_qubit_product).unwrap();
        assert!(p.concurrence.abs() < 1e-9 && p.entanglement_of_formation.abs() < 1e-9);
        let three = DensityMatrix::maximally_mixed(3, 3);
        assert!(matches!(concurrence_and_eof(&three), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn depolarized_bell_concurrence() {
        for p in [0.0, 0.5, 1.0, 0.8] {
            let rho = depolarize(&bell(), p).unwrap();
            let c = concurrence_and_eof(&rho).unwrap().concurrence;
            let expected = ((3.0 * p - 1.0) / 2.0f64).max(0.0);
            assert!((c - expected).abs() < 1e-6, "p={p}: {c} vs {expected}");
        }
    }

    #[test]
    fn log_negativity_cases() {
        assert!((log_negativity(&bell()).unwrap() - 1.0).abs() < 1e-12);
        let mes3 = density_from_pure(&partially_entangled_qudit(3, &[]).unwrap());
        assert!((log_negativity(&mes3).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(log_negativity(&product()).unwrap().abs() < 1e-10);
        let rho = depolarize(&mes3, 0.7).unwrap();
        let a = trace_norm(&partial_transpose(&rho, Arm::Signal)).unwrap();
        let b = trace_norm(&partial_transpose(&rho, Arm::Idler)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
