//! Cyclic Jacobi eigensolver for small dense Hermitian matrices, plus the
//! trace norm and a one-sided Jacobi singular-value routine built on the
//! same plane rotation.
//!
//! Columns of the eigenvector matrix inside a degenerate cluster are only
//! defined up to a unitary rotation of that cluster. Callers must depend
//! only on eigenvalues or on the spanned subspaces.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest accepted matrix size.
pub const MAX_EIGEN_SIZE: usize = 512;
/// Allowed `‖H − H†‖max` (scaled by `max(1, ‖H‖max)`).
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Eigenvalues below this are treated as zero before `log`/`sqrt`.
pub const CLIP_THRESHOLD: f64 = 1e-12;

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fv[k]).sum()
        })
    }
}

/// Plane rotation zeroing the (p, q) entry of a Hermitian 2x2 block
/// `[[app, apq], [conj(apq), aqq]]`. Returns `(c, s, phase)` where
/// `J = [[c, s], [-s·conj(phase), c·conj(phase)]]` in the (p, q) plane.
fn rotation(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let r = apq.norm();
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Eigen-decomposition `H = V Λ V†` of a Hermitian matrix.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<EigenSystem> {
    if !h.is_square() {
        return Err(Error::Contract(format!("eigensystem needs a square matrix, got {}x{}", h.rows(), h.cols())));
    }
    let n = h.rows();
    if n > MAX_EIGEN_SIZE {
        return Err(Error::Contract(format!("matrix size {n} exceeds {MAX_EIGEN_SIZE}")));
    }
    let defect = h.hermiticity_defect();
    if !(defect <= HERMITIAN_TOLERANCE * h.max_abs().max(1.0)) {
        return Err(Error::Contract(format!("matrix is not Hermitian (‖H − H†‖max = {defect:.3e})")));
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale > 0.0 {
        let target = OFF_DIAGONAL_TOLERANCE * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) < target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    if a[(p, q)].norm() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) >= target {
            return Err(Error::Contract("Jacobi iteration failed to converge".into()));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows();
    let (c, s, phase) = rotation(a[(p, p)].re, a[(q, q)].re, a[(p, q)]);
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Sum of singular values of a square matrix.
///
/// Hermitian input uses `Σ|λ_i|` directly; anything else goes through the
/// eigenvalues of `M†M`, clipped at zero before the square root.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Contract(format!("trace norm needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if m.hermiticity_defect() <= HERMITIAN_TOLERANCE * m.max_abs().max(1.0) {
        let es = hermitian_eigensystem(m)?;
        return Ok(es.values.iter().map(|x| x.abs()).sum());
    }
    let gram = (&m.adjoint() * m).hermitian_part();
    let es = hermitian_eigensystem(&gram)?;
    Ok(es.values.iter().map(|&x| clip(x).sqrt()).sum())
}

/// Clips roundoff-level negatives (and anything below [`CLIP_THRESHOLD`]) to 0.
pub fn clip(x: f64) -> f64 {
    if x < CLIP_THRESHOLD {
        0.0
    } else {
        x
    }
}

/// Singular values (descending) by one-sided Jacobi orthogonalisation of the
/// columns. Small singular values keep accuracy relative to `ε·σ_max`.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.cols();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = rotation(alpha, beta, gamma);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                let (head, tail) = cols.split_at_mut(j);
                for (x, y) in head[i].iter_mut().zip(tail[0].iter_mut()) {
                    let (ai, aj) = (*x, *y);
                    *x = ai * c + aj * jqp;
                    *y = ai * s + aj * jqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
