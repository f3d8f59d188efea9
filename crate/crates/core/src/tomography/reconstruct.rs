use std::collections::HashMap;

use num_complex::Complex64 as C64;

use super::basis::{b_matrix, HermitianBasis};
use super::counts::CountRecord;
use super::projectors::ProjectorSet;
use crate::entanglement::DensityMatrix;
use crate::error::{Error, Result};
use crate::numerics::{clip, hermitian_eigensystem, ComplexMatrix};

/// Corrected counts in quorum order.
fn corrected_counts(counts: &[CountRecord], projs: &ProjectorSet) -> Result<Vec<f64>> {
    let by_label: HashMap<&str, &CountRecord> = counts.iter().map(|c| (c.label.as_str(), c)).collect();
    projs
        .projectors()
        .iter()
        .map(|p| {
            let rec = by_label
                .get(p.label.as_str())
                .ok_or_else(|| Error::IncompleteData(format!("no count for projector {}", p.label)))?;
            if !rec.count.is_finite() || rec.count < 0.0 {
                return Err(Error::IncompleteData(format!("count for {} is {}", p.label, rec.count)));
            }
            if rec.correction != p.correction {
                return Err(Error::IncompleteData(format!(
                    "count for {} carries correction {} but the quorum uses {}",
                    p.label, rec.correction, p.correction
                )));
            }
            Ok(rec.corrected())
        })
        .collect()
}

/// `ρ = Σ M_ν n_ν / Σ tr(M_ν) n_ν` with `M_ν = Σ_x Γ_x (B⁻¹)_{x,ν}`.
/// The result is Hermitian with unit trace but need not be positive.
pub fn linear_reconstruct(counts: &[CountRecord], projs: &ProjectorSet, basis: &HermitianBasis) -> Result<ComplexMatrix> {
    let n = corrected_counts(counts, projs)?;
    let b = b_matrix(projs, basis)?;
    let b_inv = b.inverse().map_err(|e| Error::QuorumIncomplete(e.to_string()))?;
    let size = projs.dim() * projs.dim();
    let mut weights = vec![0.0; basis.len()];
    for (x, w) in weights.iter_mut().enumerate() {
        *w = (0..n.len()).map(|nu| b_inv[(x, nu)].re * n[nu]).sum();
    }
    let mut rho = ComplexMatrix::zeros(size, size);
    for (g, &w) in basis.elements().iter().zip(&weights) {
        rho = &rho + &g.scale_real(w);
    }
    let tr = rho.trace().re;
    if !(tr.abs() > 0.0) || !tr.is_finite() {
        return Err(Error::IncompleteData("counts carry no signal".into()));
    }
    Ok(rho.scale_real(1.0 / tr).hermitian_part())
}

/// Clips negative eigenvalues and renormalises the trace.
pub fn psd_projection(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let es = hermitian_eigensystem(&m.hermitian_part())?;
    let kept: f64 = es.values.iter().map(|&x| clip(x)).sum();
    if !(kept > 0.0) {
        return Err(Error::Domain("matrix has no positive part".into()));
    }
    Ok(es.map_values(|x| clip(x) / kept).hermitian_part())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Stop when the relative objective decrease of an iteration is below this.
    pub tolerance: f64,
    /// Weight of the identity mixed into the starting point.
    pub regularization: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { max_iterations: 100_000, tolerance: 1e-10, regularization: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct MleReport {
    pub rho: DensityMatrix,
    pub iterations: usize,
    pub objective: f64,
}

/// Lower-triangular `T` packed as `n²` reals: diagonal real, below-diagonal
/// complex.
fn pack(t: &ComplexMatrix) -> Vec<f64> {
    let n = t.rows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..=i {
            out.push(t[(i, j)].re);
            if i != j {
                out.push(t[(i, j)].im);
            }
        }
    }
    out
}

fn unpack(x: &[f64], n: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            if i == j {
                t[(i, j)] = C64::new(x[k], 0.0);
                k += 1;
            } else {
                t[(i, j)] = C64::new(x[k], x[k + 1]);
                k += 2;
            }
        }
    }
    t
}

/// Lower-triangular `T` with `T†T = ρ` for positive definite `ρ`.
fn reverse_cholesky(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = rho.rows();
    // J ρ J = L L†  ⇒  ρ = (J L J)(J L J)†, and T = (J L J)† is lower.
    let flipped = ComplexMatrix::from_fn(n, n, |i, j| rho[(n - 1 - i, n - 1 - j)]);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = flipped[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > 0.0) {
            return Err(Error::Domain("starting matrix is not positive definite".into()));
        }
        let d = diag.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = flipped[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    let upper = ComplexMatrix::from_fn(n, n, |i, j| l[(n - 1 - i, n - 1 - j)]);
    Ok(upper.adjoint())
}

struct Objective<'a> {
    joints: &'a [Vec<C64>],
    counts: &'a [f64],
    n: usize,
}

impl Objective<'_> {
    /// `Σ (μ − n)² / (2 max(μ, 1))` with `μ_ν = ‖T ψ_ν‖²`, and its gradient.
    fn eval(&self, x: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let t = unpack(x, self.n);
        let mut value = 0.0;
        let mut grad_t = ComplexMatrix::zeros(self.n, self.n);
        for (psi, &obs) in self.joints.iter().zip(self.counts) {
            let v = t.matvec(psi);
            let mu: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let (f, df) = if mu >= 1.0 {
                ((mu - obs).powi(2) / (2.0 * mu), (mu * mu - obs * obs) / (2.0 * mu * mu))
            } else {
                ((mu - obs).powi(2) / 2.0, mu - obs)
            };
            value += f;
            if want_grad {
                for i in 0..self.n {
                    for j in 0..=i {
                        grad_t[(i, j)] += v[i] * psi[j].conj() * df;
                    }
                }
            }
        }
        if !want_grad {
            return (value, Vec::new());
        }
        let mut grad = Vec::with_capacity(x.len());
        for i in 0..self.n {
            for j in 0..=i {
                let g = grad_t[(i, j)];
                grad.push(2.0 * g.re);
                if i != j {
                    grad.push(2.0 * g.im);
                }
            }
        }
        (value, grad)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_density(x: &[f64], dim: usize) -> Result<DensityMatrix> {
    let t = unpack(x, dim * dim);
    let g = (&t.adjoint() * &t).hermitian_part();
    let tr = g.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Domain("fit collapsed to the zero matrix".into()));
    }
    DensityMatrix::new(g.scale_real(1.0 / tr), dim, dim)
}

/// Maximum-likelihood reconstruction with `ρ = T†T / tr(T†T)`; the count
/// scale is absorbed into `T`. Starts from `init`, or from the
/// PSD-projected linear estimate.
pub fn mle_reconstruct_with(
    counts: &[CountRecord],
    projs: &ProjectorSet,
    basis: &HermitianBasis,
    init: Option<&ComplexMatrix>,
    options: &MleOptions,
) -> Result<MleReport> {
    let observed = corrected_counts(counts, projs)?;
    let dim = projs.dim();
    let n = dim * dim;
    let start = match init {
        Some(m) => {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Contract(format!("initial matrix must be {n}x{n}")));
            }
            psd_projection(m)?
        }
        None => psd_projection(&linear_reconstruct(counts, projs, basis)?)?,
    };
    let eta = options.regularization;
    let start = &start.scale_real(1.0 - eta) + &ComplexMatrix::identity(n).scale_real(eta / n as f64);
    let joints: Vec<Vec<C64>> = projs.projectors().iter().map(|p| p.joint()).collect();
    let predicted: f64 = joints.iter().map(|psi| start.expectation(psi).re).sum();
    let total: f64 = observed.iter().sum();
    if !(total > 0.0) {
        return Err(Error::IncompleteData("all counts are zero".into()));
    }
    let t0 = reverse_cholesky(&start)?.scale_real((total / predicted).sqrt());

    let obj = Objective { joints: &joints, counts: &observed, n };
    let mut x = pack(&t0);
    let (mut f, mut g) = obj.eval(&x, true);
    let m = x.len();
    let mut h = identity_rows(m);
    let mut iterations = 0;
    let mut fresh = true;
    loop {
        if iterations >= options.max_iterations {
            let best = to_density(&x, dim)?;
            return Err(Error::Convergence { iterations, best: Box::new(best) });
        }
        iterations += 1;
        if dot(&g, &g).sqrt() <= 1e-14 * (1.0 + f) {
            break;
        }
        let mut dir: Vec<f64> = h.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            h = identity_rows(m);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&g, &dir);
            fresh = true;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let (ft, _) = obj.eval(&trial, false);
            if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            if fresh {
                break;
            }
            h = identity_rows(m);
            fresh = true;
            continue;
        };
        let (_, gn) = obj.eval(&xn, true);
        let decrease = f - fnew;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            bfgs_update(&mut h, &s, &y, sy);
        }
        x = xn;
        f = fnew;
        g = gn;
        fresh = false;
        if decrease <= options.tolerance * f.abs() {
            break;
        }
    }
    Ok(MleReport { rho: to_density(&x, dim)?, iterations, objective: f })
}

fn identity_rows(m: usize) -> Vec<Vec<f64>> {
    (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let m = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = h.iter().map(|row| dot(row, y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..m {
        for j in 0..m {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// [`mle_reconstruct_with`] using default options.
pub fn mle_reconstruct(
    counts: &[CountRecord],
    projs: &ProjectorSet,
    init: Option<&ComplexMatrix>,
) -> Result<DensityMatrix> {
    let basis = super::basis::gamma_basis(projs.dim())?;
    Ok(mle_reconstruct_with(counts, projs, &basis, init, &MleOptions::default())?.rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::partially_entangled_qudit;
    use crate::entanglement::{density_from_pure, depolarize, fidelity};
    use crate::tomography::{gamma_basis, projector_set, simulate_counts, Noise};

    #[test]
    fn reverse_cholesky_factor() {
        let rho = depolarize(&density_from_pure(&partially_entangled_qudit(2, &[C64::new(0.3, 0.2)]).unwrap()), 0.8)
            .unwrap();
        let t = reverse_cholesky(rho.matrix()).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(t[(i, j)], C64::new(0.0, 0.0));
            }
        }
        assert!((&t.adjoint() * &t).max_abs_diff(rho.matrix()) < 1e-14);
        assert_eq!(unpack(&pack(&t), 4), t);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let projs = projector_set(2).unwrap();
        let joints: Vec<Vec<C64>> = projs.projectors().iter().map(|p| p.joint()).collect();
        let counts: Vec<f64> = (0..16).map(|k| 3.0 + k as f64 * 7.5).collect();
        let obj = Objective { joints: &joints, counts: &counts, n: 4 };
        let x: Vec<f64> = (0..16).map(|k| 0.5 + 0.37 * (k as f64).sin()).collect();
        let (_, g) = obj.eval(&x, true);
        for k in 0..16 {
            let h = 1e-6;
            let mut xp = x.clone();
            xp[k] += h;
            let mut xm = x.clone();
            xm[k] -= h;
            let fd = (obj.eval(&xp, false).0 - obj.eval(&xm, false).0) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-5 * (1.0 + g[k].abs()), "k={k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn linear_round_trip_bell() {
        let projs = projector_set(2).unwrap();
        let basis = gamma_basis(2).unwrap();
        let rho = density_from_pure(&partially_entangled_qudit(2, &[]).unwrap());
        let counts = simulate_counts(&rho, &projs, 1000.0, Noise::Exact).unwrap();
        let lin = linear_reconstruct(&counts, &projs, &basis).unwrap();
        assert!(lin.max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn linear_round_trip_depolarized_family() {
        let projs = projector_set(2).unwrap();
        let basis = gamma_basis(2).unwrap();
        let pure = partially_entangled_qudit(2, &[C64::new(0.5, 0.0)]).unwrap();
        let rho = depolarize(&density_from_pure(&pure), 0.9).unwrap();
        let counts = simulate_counts(&rho, &projs, 1000.0, Noise::Exact).unwrap();
        let lin = linear_reconstruct(&counts, &projs, &basis).unwrap();
        assert!(lin.max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn missing_count_is_incomplete() {
        let projs = projector_set(2).unwrap();
        let rho = density_from_pure(&partially_entangled_qudit(2, &[]).unwrap());
        let mut counts = simulate_counts(&rho, &projs, 1000.0, Noise::Exact).unwrap();
        counts.pop();
        let basis = gamma_basis(2).unwrap();
        assert!(matches!(linear_reconstruct(&counts, &projs, &basis), Err(Error::IncompleteData(_))));
        assert!(matches!(mle_reconstruct(&counts, &projs, None), Err(Error::IncompleteData(_))));
    }

    #[test]
    fn mle_bell_exact() {
        let projs = projector_set(2).unwrap();
        let rho = density_from_pure(&partially_entangled_qudit(2, &[]).unwrap());
        let counts = simulate_counts(&rho, &projs, 1000.0, Noise::Exact).unwrap();
        let fit = mle_reconstruct(&counts, &projs, None).unwrap();
        assert!(fidelity(&fit, &rho).unwrap() >= 0.9999);
    }

    #[test]
    fn mle_from_poor_start() {
        let projs = projector_set(2).unwrap();
        let basis = gamma_basis(2).unwrap();
        let rho = depolarize(&density_from_pure(&partially_entangled_qudit(2, &[C64::new(0.4, 0.1)]).unwrap()), 0.85)
            .unwrap();
        let counts = simulate_counts(&rho, &projs, 5000.0, Noise::Exact).unwrap();
        let start = ComplexMatrix::identity(4).scale_real(0.25);
        let report = mle_reconstruct_with(&counts, &projs, &basis, Some(&start), &MleOptions::default()).unwrap();
        assert!(fidelity(&report.rho, &rho).unwrap() >= 0.9999);
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let projs = projector_set(2).unwrap();
        let basis = gamma_basis(2).unwrap();
        let rho = density_from_pure(&partially_entangled_qudit(2, &[C64::new(0.4, 0.0)]).unwrap());
        let counts = simulate_counts(&rho, &projs, 5000.0, Noise::Exact).unwrap();
        let start = ComplexMatrix::identity(4).scale_real(0.25);
        let opts = MleOptions { max_iterations: 2, ..MleOptions::default() };
        match mle_reconstruct_with(&counts, &projs, &basis, Some(&start), &opts) {
            Err(Error::Convergence { iterations, best }) => {
                assert_eq!(iterations, 2);
                assert!((best.matrix().trace().re - 1.0).abs() < 1e-10);
            }
            other => panic!("expected a convergence error, got {other:?}"),
        }
    }
}
