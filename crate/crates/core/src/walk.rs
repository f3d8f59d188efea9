//! Electro-optic quantum walk on the frequency lattice.
//!
//! A modulator of depth `δ` and RF phase `φ_RF` maps a single photon as
//! `U[m+n, m] = J_n(δ) e^{in(φ_RF − π/2)}`, i.e. `U = exp(−iδ(gχ + g*χ†))`
//! with the one-step raising operator `χ` and `g = e^{iφ_RF}/2`. The depth
//! therefore plays the role of time with `Ω = 2|g₁| = 1`, and both photons
//! pass the same modulator: `A′ = U A Uᵀ`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::comb::{apply_phase_mask, BiphotonAmplitude, Mode, PhaseMask};
use crate::error::{Error, Result};
use crate::numerics::{bessel_j, ComplexMatrix, BESSEL_MAX_ARGUMENT};

/// RF phase used for steering runs unless overridden.
pub const DEFAULT_PHI_RF: f64 = FRAC_PI_2;
/// `|g₁|` per unit of modulation depth.
pub const DEPTH_COUPLING: f64 = 0.5;
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
pub const LEAKAGE_LIMIT: f64 = 1e-9;
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Outermost guard modes watched for leakage on each side.
pub const LEAKAGE_WATCH: usize = 2;
const MIN_GUARD: usize = 8;
/// Largest single-photon lattice accepted.
pub const MAX_LATTICE: usize = 2048;

/// `max(8, ceil(δ) + 8)`.
pub fn default_guard(delta: f64) -> usize {
    MIN_GUARD.max(delta.ceil() as usize + MIN_GUARD)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EOMConfig {
    pub delta: f64,
    pub phi_rf: f64,
    /// Inclusive interior range of lattice modes.
    pub lattice: (Mode, Mode),
    /// Extra modes on each side of the interior.
    pub guard: usize,
}

impl EOMConfig {
    /// Interior spanning every occupied mode of `state`, default guard.
    pub fn for_state(state: &BiphotonAmplitude, delta: f64, phi_rf: f64) -> Self {
        let modes: Vec<Mode> =
            state.occupied_signal_modes().into_iter().chain(state.occupied_idler_modes()).collect();
        let lo = modes.iter().copied().min().unwrap_or(0);
        let hi = modes.iter().copied().max().unwrap_or(0);
        Self { delta, phi_rf, lattice: (lo, hi), guard: default_guard(delta) }
    }

    pub fn with_guard(mut self, guard: usize) -> Self {
        self.guard = guard;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta < 0.0 {
            return Err(Error::Configuration(format!("modulation depth must be ≥ 0, got {}", self.delta)));
        }
        if self.delta > BESSEL_MAX_ARGUMENT {
            return Err(Error::Configuration(format!(
                "modulation depth {} exceeds the validated Bessel range {BESSEL_MAX_ARGUMENT}",
                self.delta
            )));
        }
        if !self.phi_rf.is_finite() {
            return Err(Error::Configuration("RF phase must be finite".into()));
        }
        if self.lattice.0 > self.lattice.1 {
            return Err(Error::Configuration(format!("empty lattice {:?}", self.lattice)));
        }
        let needed = self.delta.ceil() as usize + MIN_GUARD;
        if self.guard < needed {
            return Err(Error::Configuration(format!(
                "guard of {} modes is too small for δ = {} (need ≥ {needed})",
                self.guard, self.delta
            )));
        }
        if self.size() > MAX_LATTICE {
            return Err(Error::Configuration(format!("lattice of {} modes is too large", self.size())));
        }
        Ok(())
    }

    /// Full lattice including the guard band, inclusive.
    pub fn full_range(&self) -> (Mode, Mode) {
        let g = self.guard as Mode;
        (self.lattice.0 - g, self.lattice.1 + g)
    }

    pub fn size(&self) -> usize {
        (self.lattice.1 - self.lattice.0) as usize + 1 + 2 * self.guard
    }

    pub fn modes(&self) -> Vec<Mode> {
        let (lo, hi) = self.full_range();
        (lo..=hi).collect()
    }
}

/// Single-photon modulator matrix over the full lattice (rows and columns
/// in increasing mode order).
pub fn eom_unitary(cfg: &EOMConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = cfg.size();
    let span = n as i64 - 1;
    let bessel: Vec<f64> = (-span..=span).map(|k| bessel_j(k, cfg.delta)).collect::<Result<_>>()?;
    let u = ComplexMatrix::from_fn(n, n, |r, c| {
        let k = r as i64 - c as i64;
        let j = bessel[(k + span) as usize];
        if j == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::from_polar(j, k as f64 * (cfg.phi_rf - FRAC_PI_2))
        }
    });
    let defect = interior_unitarity_defect(&u, cfg);
    if !(defect < UNITARITY_TOLERANCE) {
        return Err(Error::Configuration(format!(
            "interior unitarity defect {defect:.3e} for δ = {} with guard {}",
            cfg.delta, cfg.guard
        )));
    }
    Ok(u)
}

/// `‖U†U − I‖max` restricted to interior columns.
pub fn interior_unitarity_defect(u: &ComplexMatrix, cfg: &EOMConfig) -> f64 {
    let lo = cfg.guard;
    let hi = cfg.size() - cfg.guard;
    let mut worst = 0.0f64;
    for a in lo..hi {
        for b in a..hi {
            let dot: C64 = (0..u.rows()).map(|r| u[(r, a)].conj() * u[(r, b)]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// Propagates both photons through the modulator. The result lives on the
/// full lattice of `cfg` in both arms.
pub fn evolve(state: &BiphotonAmplitude, cfg: &EOMConfig) -> Result<BiphotonAmplitude> {
    let u = eom_unitary(cfg)?;
    let (lo, hi) = cfg.lattice;
    let outside: Vec<Mode> = state
        .occupied_signal_modes()
        .into_iter()
        .chain(state.occupied_idler_modes())
        .filter(|m| *m < lo || *m > hi)
        .collect();
    if !outside.is_empty() {
        return Err(Error::Configuration(format!("occupied modes {outside:?} lie outside lattice [{lo}, {hi}]")));
    }
    let n = cfg.size();
    let first = cfg.full_range().0;
    let mut a = ComplexMatrix::zeros(n, n);
    for (s, i, z) in state.cells() {
        if z.norm_sqr() > 0.0 {
            a[((s - first) as usize, (i - first) as usize)] = z;
        }
    }
    let evolved = &(&u * &a) * &u.transpose();

    let watch = LEAKAGE_WATCH.min(cfg.guard);
    let edge = |k: usize| k < watch || k >= n - watch;
    let mut leaked = 0.0;
    let mut total = 0.0;
    for s in 0..n {
        for i in 0..n {
            let p = evolved[(s, i)].norm_sqr();
            total += p;
            if edge(s) || edge(i) {
                leaked += p;
            }
        }
    }
    if leaked > LEAKAGE_LIMIT {
        return Err(Error::GuardLeakage { leaked, limit: LEAKAGE_LIMIT });
    }
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Contract(format!("evolved norm {total} differs from 1")));
    }
    let modes = cfg.modes();
    BiphotonAmplitude::normalized(modes.clone(), modes, evolved)
}

/// `Σ (m_s + m_i) |A|²` in units of the mode spacing.
pub fn mean_total_energy(state: &BiphotonAmplitude) -> f64 {
    state.cells().map(|(s, i, a)| (s + i) as f64 * a.norm_sqr()).sum()
}

/// Probability of each total mode index `m_s + m_i`, in increasing order.
pub fn total_energy_distribution(state: &BiphotonAmplitude) -> Vec<(Mode, f64)> {
    let mut dist: BTreeMap<Mode, f64> = BTreeMap::new();
    for (s, i, a) in state.cells() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *dist.entry(s + i).or_default() += p;
        }
    }
    dist.into_iter().collect()
}

/// `⟨ψ|χ|ψ⟩` with `χ|s,i⟩ = |s+1,i⟩ + |s,i+1⟩`.
pub fn chi_expectation(state: &BiphotonAmplitude) -> C64 {
    state
        .cells()
        .filter(|(_, _, a)| a.norm_sqr() > 0.0)
        .map(|(s, i, a)| (state.amplitude(s + 1, i).conj() + state.amplitude(s, i + 1).conj()) * a)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyScale {
    /// Carrier-envelope offset angular frequency (rad/s).
    pub omega_ceo: f64,
    /// Mode spacing, equal to the RF angular frequency (rad/s).
    pub omega_fsr: f64,
    /// `|g₁| e^{iφ_RF}`.
    pub g1: C64,
}

impl EnergyScale {
    pub fn new(omega_ceo: f64, omega_fsr: f64, g1_abs: f64, phi_rf: f64) -> Result<Self> {
        if !(omega_fsr > 0.0) || !omega_fsr.is_finite() {
            return Err(Error::Domain(format!("mode spacing must be positive, got {omega_fsr}")));
        }
        if !(g1_abs >= 0.0) || !g1_abs.is_finite() || !phi_rf.is_finite() || !omega_ceo.is_finite() {
            return Err(Error::Domain("coupling magnitude must be ≥ 0 and all values finite".into()));
        }
        Ok(Self { omega_ceo, omega_fsr, g1: C64::from_polar(g1_abs, phi_rf) })
    }

    /// Units in which one step of modulation depth is one unit of time.
    pub fn depth_units(phi_rf: f64) -> Self {
        Self { omega_ceo: 0.0, omega_fsr: 1.0, g1: C64::from_polar(DEPTH_COUPLING, phi_rf) }
    }

    pub fn with_phase(&self, phi_rf: f64) -> Self {
        Self { g1: C64::from_polar(self.g1.norm(), phi_rf), ..*self }
    }
}

/// `d⟨H⟩/dt = 2 Ω_FSR Im(g₁ ⟨χ⟩)`.
pub fn energy_transfer_rate(state: &BiphotonAmplitude, scale: &EnergyScale) -> f64 {
    2.0 * scale.omega_fsr * (scale.g1 * chi_expectation(state)).im
}

/// Mean transfer rate over `grid` equally spaced RF phases in [0, 2π).
pub fn desync_average(state: &BiphotonAmplitude, scale: &EnergyScale, grid: usize) -> Result<f64> {
    if grid < 4 {
        return Err(Error::Domain(format!("phase grid needs at least 4 points, got {grid}")));
    }
    let chi = chi_expectation(state);
    let sum: f64 = (0..grid)
        .map(|k| {
            let s = scale.with_phase(2.0 * PI * k as f64 / grid as f64);
            2.0 * s.omega_fsr * (s.g1 * chi).im
        })
        .sum();
    Ok(sum / grid as f64)
}

/// Predicted `d⟨E_tot⟩/dδ` in mode-spacing units.
pub fn steering_slope(state: &BiphotonAmplitude, phi_rf: f64) -> f64 {
    energy_transfer_rate(state, &EnergyScale::depth_units(phi_rf))
}

/// Central difference of `⟨E_tot⟩(δ)` about `δ = h`, i.e. the slope just
/// above zero depth.
pub fn finite_difference_slope(state: &BiphotonAmplitude, phi_rf: f64, h: f64) -> Result<f64> {
    let e0 = mean_total_energy(state);
    let e2 = mean_total_energy(&evolve(state, &EOMConfig::for_state(state, 2.0 * h, phi_rf))?);
    Ok((e2 - e0) / (2.0 * h))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkTemplate {
    pub phi_rf: f64,
    /// `None` uses [`default_guard`] at each depth.
    pub guard: Option<usize>,
}

impl Default for WalkTemplate {
    fn default() -> Self {
        Self { phi_rf: DEFAULT_PHI_RF, guard: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub delta: f64,
    /// `⟨E_tot⟩` in mode-spacing units.
    pub mean_energy: f64,
    /// `⟨E_tot⟩(δ) − ⟨E_tot⟩(0)`.
    pub shift: f64,
    pub distribution: Vec<(Mode, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `⟨E_tot⟩` against `δ`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ a + m x`; returns `(m, a, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let m = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - m * mx;
    let rss: f64 = x.iter().zip(y).map(|(a0, b)| (b - a - m * a0).powi(2)).sum();
    (m, a, (rss / n).sqrt())
}

/// Applies the masks, evolves at every depth of `deltas` (ascending, first
/// value 0) and fits the energy slope. Points are evaluated in parallel.
pub fn sweep_and_slope(
    state: &BiphotonAmplitude,
    mask_signal: &PhaseMask,
    mask_idler: &PhaseMask,
    deltas: &[f64],
    template: &WalkTemplate,
) -> Result<SweepResult> {
    if deltas.len() < 2 {
        return Err(Error::Domain("a sweep needs at least two depths".into()));
    }
    if deltas[0] != 0.0 {
        return Err(Error::Domain(format!("depth grid must start at 0, got {}", deltas[0])));
    }
    if deltas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("depth grid must be strictly ascending".into()));
    }
    let masked = apply_phase_mask(state, mask_signal, mask_idler)?;
    let evolved: Vec<BiphotonAmplitude> = deltas
        .par_iter()
        .map(|&delta| {
            let mut cfg = EOMConfig::for_state(&masked, delta, template.phi_rf);
            if let Some(g) = template.guard {
                cfg.guard = g;
            }
            evolve(&masked, &cfg)
        })
        .collect::<Result<_>>()?;
    let e0 = mean_total_energy(&evolved[0]);
    let points: Vec<SweepPoint> = deltas
        .iter()
        .zip(&evolved)
        .map(|(&delta, st)| {
            let mean_energy = mean_total_energy(st);
            SweepPoint { delta, mean_energy, shift: mean_energy - e0, distribution: total_energy_distribution(st) }
        })
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean_energy).collect();
    let (slope, intercept, residual) = linear_fit(deltas, &y);
    Ok(SweepResult { points, slope, intercept, residual })
}
