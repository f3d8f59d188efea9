use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// One projection measurement `|ψ_s⟩ ⊗ |ψ_i⟩` on the qudit window.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub label: String,
    pub signal: Vec<C64>,
    pub idler: Vec<C64>,
    /// Factor the raw counts are multiplied by to undo blocked-mode loss.
    pub correction: f64,
}

impl Projector {
    /// Two-party vector, signal index major.
    pub fn joint(&self) -> Vec<C64> {
        self.signal.iter().flat_map(|&a| self.idler.iter().map(move |&b| a * b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSet {
    dim: usize,
    projectors: Vec<Projector>,
}

impl ProjectorSet {
    /// Checks per-arm dimension, unit norms, unique labels and correction
    /// factors in {1, 2, 4}.
    pub fn new(dim: usize, projectors: Vec<Projector>) -> Result<Self> {
        let mut labels = std::collections::HashSet::new();
        for p in &projectors {
            if p.signal.len() != dim || p.idler.len() != dim {
                return Err(Error::Contract(format!("projector {} does not have dimension {dim}", p.label)));
            }
            for arm in [&p.signal, &p.idler] {
                let n: f64 = arm.iter().map(|z| z.norm_sqr()).sum();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::Contract(format!("projector {} is not unit norm", p.label)));
                }
            }
            if ![1.0, 2.0, 4.0].contains(&p.correction) {
                return Err(Error::Contract(format!("projector {} has correction {}", p.label, p.correction)));
            }
            if !labels.insert(p.label.clone()) {
                return Err(Error::Contract(format!("duplicate projector label {}", p.label)));
            }
        }
        Ok(Self { dim, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Projector> {
        self.projectors.iter().find(|p| p.label == label)
    }
}

struct ArmState {
    label: String,
    vector: Vec<C64>,
    single_mode: bool,
}

fn qubit_states() -> Vec<ArmState> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    vec![
        ArmState { label: "1".into(), vector: vec![one, zero], single_mode: true },
        ArmState { label: "2".into(), vector: vec![zero, one], single_mode: true },
        ArmState { label: "P".into(), vector: vec![h, h], single_mode: false },
        ArmState { label: "R".into(), vector: vec![h, h * C64::new(0.0, 1.0)], single_mode: false },
    ]
}

/// `(e^{iα}|a⟩ + e^{−iα}|b⟩)/√2` for each mode pair and `α ∈ {0, ±2π/3}`.
fn qutrit_states() -> Vec<ArmState> {
    let mut out = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        for (k, alpha) in [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0].into_iter().enumerate() {
            let mut v = vec![C64::new(0.0, 0.0); 3];
            v[a] = C64::from_polar(FRAC_1_SQRT_2, alpha);
            v[b] = C64::from_polar(FRAC_1_SQRT_2, -alpha);
            out.push(ArmState { label: format!("{}{}.{k}", a + 1, b + 1), vector: v, single_mode: false });
        }
    }
    out
}

/// Canonical quorum for qubits (16 pairs) or qutrits (81 pairs).
pub fn projector_set(dim: usize) -> Result<ProjectorSet> {
    let states = match dim {
        2 => qubit_states(),
        3 => qutrit_states(),
        _ => return Err(Error::Domain(format!("projector quorums exist for d = 2 or 3, got {dim}"))),
    };
    let mut projectors = Vec::with_capacity(states.len().pow(2));
    for s in &states {
        for i in &states {
            let blocked = usize::from(s.single_mode) + usize::from(i.single_mode);
            projectors.push(Projector {
                label: format!("{}_{}", s.label, i.label),
                signal: s.vector.clone(),
                idler: i.vector.clone(),
                correction: [1.0, 2.0, 4.0][blocked],
            });
        }
    }
    ProjectorSet::new(dim, projectors)
}
