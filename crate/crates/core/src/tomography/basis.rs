use num_complex::Complex64 as C64;

use super::projectors::ProjectorSet;
use crate::error::{Error, Result};
use crate::numerics::{singular_values, ComplexMatrix};

/// Smallest accepted `σ_min / σ_max` of the B-matrix.
pub const CONDITION_FLOOR: f64 = 1e-8;

/// Trace-orthogonal Hermitian operator basis of the two-party space.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Identity plus generalised Gell-Mann matrices of size `d`.
pub fn gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(d)];
    let i = C64::new(0.0, 1.0);
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = C64::new(1.0, 0.0);
            sym[(k, j)] = C64::new(1.0, 0.0);
            out.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|m| match m {
                m if m < l => norm,
                m if m == l => -(l as f64) * norm,
                _ => 0.0,
            })
            .collect();
        out.push(ComplexMatrix::from_real_diagonal(&diag));
    }
    out
}

pub fn gamma_basis(dim: usize) -> Result<HermitianBasis> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Domain(format!("tomography basis exists for d = 2 or 3, got {dim}")));
    }
    let single = gell_mann(dim);
    let elements = single.iter().flat_map(|a| single.iter().map(move |b| a.kron(b))).collect();
    Ok(HermitianBasis { dim, elements })
}

/// `B[ν, y] = ⟨ψ_ν|Γ_y|ψ_ν⟩`, with the quorum-completeness check.
pub fn b_matrix(projs: &ProjectorSet, basis: &HermitianBasis) -> Result<ComplexMatrix> {
    if projs.dim() != basis.dim() {
        return Err(Error::Contract(format!(
            "projectors of dimension {} with a basis of dimension {}",
            projs.dim(),
            basis.dim()
        )));
    }
    if projs.len() != basis.len() {
        return Err(Error::QuorumIncomplete(format!(
            "{} projectors for {} unknowns",
            projs.len(),
            basis.len()
        )));
    }
    let joints: Vec<Vec<C64>> = projs.projectors().iter().map(|p| p.joint()).collect();
    let b = ComplexMatrix::from_fn(joints.len(), basis.len(), |nu, y| {
        C64::new(basis.elements[y].expectation(&joints[nu]).re, 0.0)
    });
    let sv = singular_values(&b);
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    if !(min > CONDITION_FLOOR * max) {
        return Err(Error::QuorumIncomplete(format!("B-matrix singular values span [{min:.3e}, {max:.3e}]")));
    }
    Ok(b)
}
