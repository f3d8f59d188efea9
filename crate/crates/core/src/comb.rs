//! Biphoton frequency-comb pure states with configurable anti-diagonal
//! structure.
//!
//! Lattice indices are physical: signal photons sit on positive modes `k`,
//! idler photons on `-k`, with the optional degenerate mode `0`. Both arms
//! of a state generated from a [`ModeConvention`] are listed in order of the
//! comb label `k`, so the signal map is increasing and the idler map is
//! decreasing and slot `j` of either arm is the qudit level `|j+1⟩`.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

pub type Mode = i32;

/// Tolerance on `Σ|A|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeConvention {
    total_modes: usize,
    include_degenerate: bool,
}

impl ModeConvention {
    pub fn new(total_modes: usize, include_degenerate: bool) -> Result<Self> {
        if total_modes < 3 || total_modes.is_multiple_of(2) {
            return Err(Error::Domain(format!("total mode count must be odd and ≥ 3, got {total_modes}")));
        }
        Ok(Self { total_modes, include_degenerate })
    }

    /// Degenerate mode removed, the default for walk and tomography runs.
    pub fn excluding_degenerate(total_modes: usize) -> Result<Self> {
        Self::new(total_modes, false)
    }

    pub fn total_modes(&self) -> usize {
        self.total_modes
    }

    pub fn includes_degenerate(&self) -> bool {
        self.include_degenerate
    }

    /// `d = (N − 1) / 2`.
    pub fn dimension(&self) -> usize {
        (self.total_modes - 1) / 2
    }

    /// Number of slots per arm (`d`, or `d + 1` with the degenerate mode).
    pub fn arm_size(&self) -> usize {
        self.dimension() + usize::from(self.include_degenerate)
    }

    fn first_label(&self) -> Mode {
        if self.include_degenerate {
            0
        } else {
            1
        }
    }

    pub fn signal_modes(&self) -> Vec<Mode> {
        (self.first_label()..=self.dimension() as Mode).collect()
    }

    pub fn idler_modes(&self) -> Vec<Mode> {
        self.signal_modes().into_iter().map(|k| -k).collect()
    }

    /// Largest |q| whose anti-diagonal holds at least one cell.
    pub fn max_order(&self) -> usize {
        if self.include_degenerate {
            self.dimension()
        } else {
            self.dimension() - 1
        }
    }

    /// `(signal, idler)` lattice modes on diagonal `q`.
    fn diagonal_cells(&self, q: i32) -> Vec<(Mode, Mode)> {
        let d = self.dimension() as i32;
        let start = q.abs() + if self.include_degenerate { 0 } else { 1 };
        (start..=d)
            .map(|k| match q {
                q if q < 0 => (k + q, -k),
                0 => (k, -k),
                q => (k, -(k - q)),
            })
            .collect()
    }
}

/// Two-photon pure state over (signal slot, idler slot).
#[derive(Clone, Debug, PartialEq)]
pub struct BiphotonAmplitude {
    signal_modes: Vec<Mode>,
    idler_modes: Vec<Mode>,
    amplitudes: ComplexMatrix,
}

fn check_distinct(modes: &[Mode], arm: &str) -> Result<()> {
    let mut seen = HashSet::new();
    if modes.is_empty() {
        return Err(Error::Domain(format!("{arm} mode list is empty")));
    }
    for m in modes {
        if !seen.insert(*m) {
            return Err(Error::Domain(format!("{arm} mode {m} listed twice")));
        }
    }
    Ok(())
}

impl BiphotonAmplitude {
    /// Wraps an already normalised amplitude matrix.
    pub fn new(signal_modes: Vec<Mode>, idler_modes: Vec<Mode>, amplitudes: ComplexMatrix) -> Result<Self> {
        check_distinct(&signal_modes, "signal")?;
        check_distinct(&idler_modes, "idler")?;
        if amplitudes.rows() != signal_modes.len() || amplitudes.cols() != idler_modes.len() {
            return Err(Error::Contract(format!(
                "amplitude matrix is {}x{} but mode maps have {} and {} entries",
                amplitudes.rows(),
                amplitudes.cols(),
                signal_modes.len(),
                idler_modes.len()
            )));
        }
        let norm: f64 = amplitudes.as_slice().iter().map(|z| z.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::Domain(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { signal_modes, idler_modes, amplitudes })
    }

    /// Normalises `amplitudes`; fails on a zero matrix.
    pub fn normalized(signal_modes: Vec<Mode>, idler_modes: Vec<Mode>, amplitudes: ComplexMatrix) -> Result<Self> {
        let norm = amplitudes.frobenius_norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cannot normalise a zero-amplitude state".into()));
        }
        Self::new(signal_modes, idler_modes, amplitudes.scale_real(1.0 / norm))
    }

    /// Single basis ket `|s⟩_s |i⟩_i`.
    pub fn basis_ket(signal: Mode, idler: Mode) -> Self {
        Self {
            signal_modes: vec![signal],
            idler_modes: vec![idler],
            amplitudes: ComplexMatrix::identity(1),
        }
    }

    pub fn signal_modes(&self) -> &[Mode] {
        &self.signal_modes
    }

    pub fn idler_modes(&self) -> &[Mode] {
        &self.idler_modes
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn signal_slot(&self, mode: Mode) -> Option<usize> {
        self.signal_modes.iter().position(|&m| m == mode)
    }

    pub fn idler_slot(&self, mode: Mode) -> Option<usize> {
        self.idler_modes.iter().position(|&m| m == mode)
    }

    /// Amplitude of `|signal⟩_s |idler⟩_i`; zero for modes outside the maps.
    pub fn amplitude(&self, signal: Mode, idler: Mode) -> C64 {
        match (self.signal_slot(signal), self.idler_slot(idler)) {
            (Some(s), Some(i)) => self.amplitudes[(s, i)],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Flattened state vector, signal slot major.
    pub fn to_vector(&self) -> Vec<C64> {
        self.amplitudes.as_slice().to_vec()
    }

    /// Iterator over `(signal mode, idler mode, amplitude)`.
    pub fn cells(&self) -> impl Iterator<Item = (Mode, Mode, C64)> + '_ {
        self.signal_modes.iter().enumerate().flat_map(move |(s, &ms)| {
            self.idler_modes.iter().enumerate().map(move |(i, &mi)| (ms, mi, self.amplitudes[(s, i)]))
        })
    }

    /// `⟨self|other⟩` over lattice modes.
    pub fn inner(&self, other: &Self) -> C64 {
        self.cells().map(|(s, i, a)| a.conj() * other.amplitude(s, i)).sum()
    }

    fn occupied(&self, signal_arm: bool) -> Vec<Mode> {
        let (modes, n) = if signal_arm {
            (&self.signal_modes, self.idler_modes.len())
        } else {
            (&self.idler_modes, self.signal_modes.len())
        };
        modes
            .iter()
            .enumerate()
            .filter(|(slot, _)| {
                (0..n).any(|other| {
                    let z = if signal_arm { self.amplitudes[(*slot, other)] } else { self.amplitudes[(other, *slot)] };
                    z.norm_sqr() > 0.0
                })
            })
            .map(|(_, &m)| m)
            .collect()
    }

    /// Modes of the signal arm carrying nonzero amplitude.
    pub fn occupied_signal_modes(&self) -> Vec<Mode> {
        self.occupied(true)
    }

    pub fn occupied_idler_modes(&self) -> Vec<Mode> {
        self.occupied(false)
    }
}

/// Normalised equal-amplitude superposition along anti-diagonal `q`.
pub fn diagonal_component(convention: &ModeConvention, q: i32) -> Result<BiphotonAmplitude> {
    if q.unsigned_abs() as usize > convention.max_order() {
        return Err(Error::Domain(format!(
            "diagonal q = {q} does not fit a comb with N = {} (|q| ≤ {})",
            convention.total_modes(),
            convention.max_order()
        )));
    }
    let mut out = DiagonalAccumulator::new(convention);
    out.add(q, C64::new(1.0, 0.0));
    out.finish()
}

struct DiagonalAccumulator<'a> {
    convention: &'a ModeConvention,
    amplitudes: ComplexMatrix,
}

impl<'a> DiagonalAccumulator<'a> {
    fn new(convention: &'a ModeConvention) -> Self {
        let n = convention.arm_size();
        Self { convention, amplitudes: ComplexMatrix::zeros(n, n) }
    }

    fn slot(&self, label: Mode) -> usize {
        (label.abs() - self.convention.first_label()) as usize
    }

    /// Adds `weight · |ψ_q⟩` with `|ψ_q⟩` unit-normalised.
    fn add(&mut self, q: i32, weight: C64) {
        let cells = self.convention.diagonal_cells(q);
        let amp = weight / (cells.len() as f64).sqrt();
        for (s, i) in cells {
            let (rs, ri) = (self.slot(s), self.slot(i));
            self.amplitudes[(rs, ri)] += amp;
        }
    }

    fn finish(self) -> Result<BiphotonAmplitude> {
        BiphotonAmplitude::normalized(self.convention.signal_modes(), self.convention.idler_modes(), self.amplitudes)
    }
}

/// Which Gaussian parameterisation of the diagonal weights is in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussianForm {
    /// `a_q = a₀ exp(−((|q| − μ)/σ)²)`.
    Squared,
    /// `a_q ∝ exp(−q² / (2σ′²))`; converted with `σ = √2 σ′`, `μ = 0`.
    Envelope,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianWeights {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub max_order: u32,
    pub form: GaussianForm,
}

impl GaussianWeights {
    /// Symmetric profile (`a₀ = 1`, `μ = 0`) in the squared form.
    pub fn symmetric(width: f64, max_order: u32) -> Self {
        Self { amplitude: 1.0, center: 0.0, width, max_order, form: GaussianForm::Squared }
    }

    /// Diagonal count `D = 2p + 1`.
    pub fn diagonal_count(&self) -> u32 {
        2 * self.max_order + 1
    }
}

/// Per-diagonal complex weights `a_q`. Phases of the weights carry any
/// relative phase between anti-diagonal lines.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Explicit(BTreeMap<i32, C64>),
    Gaussian(GaussianWeights),
}

impl WeightSpec {
    pub fn explicit<I: IntoIterator<Item = (i32, C64)>>(weights: I) -> Self {
        WeightSpec::Explicit(weights.into_iter().collect())
    }

    /// `D` equal real weights centred on `q = 0`; `D` must be odd.
    pub fn equal(diagonals: u32) -> Result<Self> {
        if diagonals.is_multiple_of(2) {
            return Err(Error::Domain(format!("diagonal count D = {diagonals} must be odd")));
        }
        let p = (diagonals / 2) as i32;
        Ok(Self::explicit((-p..=p).map(|q| (q, C64::new(1.0, 0.0)))))
    }

    /// Resolves to explicit weights.
    pub fn resolve(&self) -> Result<BTreeMap<i32, C64>> {
        match self {
            WeightSpec::Explicit(w) => Ok(w.clone()),
            WeightSpec::Gaussian(g) => gaussian_weights(g),
        }
    }
}

/// Evaluates a Gaussian weight profile for `|q| ≤ p`.
pub fn gaussian_weights(spec: &GaussianWeights) -> Result<BTreeMap<i32, C64>> {
    if !(spec.width > 0.0) || !spec.width.is_finite() {
        return Err(Error::Domain(format!("Gaussian width must be positive, got {}", spec.width)));
    }
    if !spec.amplitude.is_finite() || !spec.center.is_finite() {
        return Err(Error::Domain("Gaussian amplitude and center must be finite".into()));
    }
    let (sigma, mu) = match spec.form {
        GaussianForm::Squared => (spec.width, spec.center),
        GaussianForm::Envelope => {
            if spec.center != 0.0 {
                return Err(Error::Domain("the envelope form has no center offset".into()));
            }
            (SQRT_2 * spec.width, 0.0)
        }
    };
    let p = spec.max_order as i32;
    Ok((-p..=p)
        .map(|q| {
            let z = (q.abs() as f64 - mu) / sigma;
            (q, C64::new(spec.amplitude * (-z * z).exp(), 0.0))
        })
        .collect())
}

/// `|ψ_QFC⟩ ∝ Σ_q a_q |ψ_q⟩`, normalised numerically. Diagonals beyond the
/// comb's largest order are dropped.
pub fn synthesize(convention: &ModeConvention, weights: &WeightSpec) -> Result<BiphotonAmplitude> {
    let resolved = weights.resolve()?;
    let max = convention.max_order() as u32;
    let mut acc = DiagonalAccumulator::new(convention);
    let mut any = false;
    for (&q, &a) in &resolved {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::Domain(format!("weight a_{q} is not finite")));
        }
        if q.unsigned_abs() > max || a.norm_sqr() == 0.0 {
            continue;
        }
        acc.add(q, a);
        any = true;
    }
    if !any {
        return Err(Error::Domain("no nonzero diagonal weight fits inside the comb".into()));
    }
    acc.finish()
}

/// Per-mode phases (radians) applied by the line-by-line shaper.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseMask {
    Explicit(BTreeMap<Mode, f64>),
    /// Phase chosen by the parity of the lattice index.
    Alternating { odd: f64, even: f64 },
}

impl PhaseMask {
    pub fn uniform(phase: f64) -> Self {
        PhaseMask::Alternating { odd: phase, even: phase }
    }

    pub fn phase(&self, mode: Mode) -> Option<f64> {
        match self {
            PhaseMask::Explicit(map) => map.get(&mode).copied(),
            PhaseMask::Alternating { odd, even } => Some(if mode.rem_euclid(2) == 1 { *odd } else { *even }),
        }
    }
}

fn mask_phases(mask: &PhaseMask, modes: &[Mode], occupied: &[Mode], arm: &str) -> Result<Vec<f64>> {
    modes
        .iter()
        .map(|&m| match mask.phase(m) {
            Some(p) if p.is_finite() => Ok(p),
            Some(_) => Err(Error::Domain(format!("{arm} phase for mode {m} is not finite"))),
            None if occupied.contains(&m) => {
                Err(Error::Domain(format!("{arm} mask does not cover occupied mode {m}")))
            }
            None => Ok(0.0),
        })
        .collect()
}

/// `A′[s,i] = e^{i(φ_s + φ_i)} A[s,i]`.
pub fn apply_phase_mask(
    state: &BiphotonAmplitude,
    mask_signal: &PhaseMask,
    mask_idler: &PhaseMask,
) -> Result<BiphotonAmplitude> {
    let ps = mask_phases(mask_signal, &state.signal_modes, &state.occupied_signal_modes(), "signal")?;
    let pi = mask_phases(mask_idler, &state.idler_modes, &state.occupied_idler_modes(), "idler")?;
    let amplitudes = ComplexMatrix::from_fn(state.signal_modes.len(), state.idler_modes.len(), |s, i| {
        state.amplitudes[(s, i)] * C64::from_polar(1.0, ps[s] + pi[i])
    });
    Ok(BiphotonAmplitude { amplitudes, ..state.clone() })
}

/// Joint spectral intensity `|A[s,i]|²` in the state's slot layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Jsi {
    pub signal_modes: Vec<Mode>,
    pub idler_modes: Vec<Mode>,
    /// Row `s`, column `i`.
    pub values: Vec<Vec<f64>>,
}

impl Jsi {
    pub fn total(&self) -> f64 {
        self.values.iter().flatten().sum()
    }
}

pub fn jsi(state: &BiphotonAmplitude) -> Jsi {
    let values = (0..state.signal_modes.len())
        .map(|s| (0..state.idler_modes.len()).map(|i| state.amplitudes[(s, i)].norm_sqr()).collect())
        .collect();
    Jsi { signal_modes: state.signal_modes.clone(), idler_modes: state.idler_modes.clone(), values }
}

/// Restricts the state to the listed modes (kept in the given order) and
/// renormalises.
pub fn subspace_postselect(
    state: &BiphotonAmplitude,
    signal_modes: &[Mode],
    idler_modes: &[Mode],
) -> Result<BiphotonAmplitude> {
    check_distinct(signal_modes, "signal")?;
    check_distinct(idler_modes, "idler")?;
    let s_slots: Vec<usize> = signal_modes
        .iter()
        .map(|&m| state.signal_slot(m).ok_or_else(|| Error::Domain(format!("signal mode {m} is not in the state"))))
        .collect::<Result<_>>()?;
    let i_slots: Vec<usize> = idler_modes
        .iter()
        .map(|&m| state.idler_slot(m).ok_or_else(|| Error::Domain(format!("idler mode {m} is not in the state"))))
        .collect::<Result<_>>()?;
    let restricted =
        ComplexMatrix::from_fn(s_slots.len(), i_slots.len(), |s, i| state.amplitudes[(s_slots[s], i_slots[i])]);
    let norm = restricted.frobenius_norm();
    if !(norm > 0.0) {
        return Err(Error::PostSelection(format!(
            "signal {signal_modes:?} × idler {idler_modes:?} carries no amplitude"
        )));
    }
    BiphotonAmplitude::normalized(signal_modes.to_vec(), idler_modes.to_vec(), restricted)
}

/// `dim`-level state `∝ |Bell_dim⟩ + Σ_q c_q Σ_k |k+q⟩_s |−k⟩_i`, i.e. a
/// maximally entangled core plus upper anti-diagonal lines with complex
/// weights `upper[q−1]`, as seen by a `dim × dim` tomography window.
pub fn partially_entangled_qudit(dim: usize, upper: &[C64]) -> Result<BiphotonAmplitude> {
    if dim < 2 {
        return Err(Error::Domain(format!("qudit dimension must be ≥ 2, got {dim}")));
    }
    if upper.len() >= dim {
        return Err(Error::Domain(format!("a {dim}-level window holds at most {} upper lines", dim - 1)));
    }
    let core = 1.0 / (dim as f64).sqrt();
    let amplitudes = ComplexMatrix::from_fn(dim, dim, |s, i| {
        if s == i {
            C64::new(core, 0.0)
        } else if s > i {
            upper.get(s - i - 1).copied().unwrap_or_default()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let labels: Vec<Mode> = (1..=dim as Mode).collect();
    BiphotonAmplitude::normalized(labels.clone(), labels.iter().map(|k| -k).collect(), amplitudes)
}

/// `(|1,−1⟩ + e^{iφ}|1,−2⟩ + e^{iφ}|2,−1⟩ + |2,−2⟩) / 2`, the minimal state
/// with a nonzero one-step raising expectation.
pub fn phased_two_mode_state(phi: f64) -> BiphotonAmplitude {
    let e = C64::from_polar(0.5, phi);
    let h = C64::new(0.5, 0.0);
    let amplitudes = ComplexMatrix::from_row_major(2, 2, vec![h, e, e, h]).expect("static shape");
    BiphotonAmplitude { signal_modes: vec![1, 2], idler_modes: vec![-1, -2], amplitudes }
}
