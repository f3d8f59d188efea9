//! Command implementations behind the `qfc` binary. Every command maps a
//! [`RunConfig`] to one output artifact; numbers in the artifact come
//! straight from library calls.

pub mod config;
pub mod counts_file;
pub mod emit;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use qfc_core::comb::{apply_phase_mask, jsi, subspace_postselect, BiphotonAmplitude};
use qfc_core::entanglement::{
    concurrence_and_eof, density_from_pure, depolarize, entropy_report, entropy_report_by_rank, fidelity,
    log_negativity, partial_trace, pure_state_entropy, purity, reduced_pure, Arm, DensityMatrix, EntropyReport,
};
use qfc_core::numerics::hermitian_eigensystem;
use qfc_core::tomography::{
    gamma_basis, linear_reconstruct, mle_reconstruct_with, projector_set, simulate_counts, MleOptions, Noise,
};
use qfc_core::walk::{
    chi_expectation, desync_average, energy_transfer_rate, evolve, finite_difference_slope, mean_total_energy,
    steering_slope, sweep_and_slope, total_energy_distribution, EOMConfig,
};

use config::{Format, NoiseKind, RunConfig};
use emit::{complex_json, complex_matrix_json, heatmap_csv, heatmap_pgm, real_matrix_json, to_json_text, HeatmapImage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Step used for the finite-difference steering slope.
pub const SLOPE_STEP: f64 = 1e-4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(qfc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_INPUT,
            CliError::Core(e) if e.is_input_error() => EXIT_INPUT,
            CliError::Core(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qfc_core::Error> for CliError {
    fn from(e: qfc_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Synth,
    Entropy,
    Walk,
    Sweep,
    SteeringTheory,
    TomoSim,
    TomoFit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Synth => "synth",
            Command::Entropy => "entropy",
            Command::Walk => "walk",
            Command::Sweep => "sweep",
            Command::SteeringTheory => "steering-theory",
            Command::TomoSim => "tomo-sim",
            Command::TomoFit => "tomo-fit",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    /// Directory that relative paths inside the config resolve against.
    pub base_dir: Option<PathBuf>,
}

fn unsupported(command: Command, format: Format) -> CliError {
    CliError::Config(format!("`{}` cannot emit {format:?} output", command.name()))
}

fn heatmap(rows: &[Vec<f64>], format: Format) -> Result<String, CliError> {
    let img = HeatmapImage::from_rows(rows).map_err(CliError::Config)?;
    Ok(match format {
        Format::Csv => heatmap_csv(&img),
        Format::Pgm => heatmap_pgm(&img),
        Format::Json => unreachable!("JSON output is assembled by the caller"),
    })
}

fn entropy_json(r: &EntropyReport) -> Value {
    json!({
        "absolute": r.absolute,
        "normalized": r.normalized,
        "base": r.base,
        "numerical_rank": r.numerical_rank,
        "eigenvalues": r.eigenvalues,
    })
}

fn distribution_json(dist: &[(i32, f64)]) -> Value {
    Value::Array(dist.iter().map(|(m, p)| json!([m, p])).collect())
}

fn masked_state(cfg: &RunConfig) -> Result<BiphotonAmplitude, CliError> {
    let st = cfg.state()?.synthesize()?;
    let mask = cfg.mask();
    Ok(apply_phase_mask(&st, &mask, &mask)?)
}

/// Runs one command and returns the artifact text.
pub fn run(command: Command, cfg: &RunConfig, opts: &RunOptions) -> Result<String, CliError> {
    let format = opts.format.or(cfg.output.as_ref().and_then(|o| o.format)).unwrap_or(Format::Json);
    match command {
        Command::Synth => synth(cfg, format),
        Command::Entropy => entropy(cfg, format),
        Command::Walk => walk(cfg, format),
        Command::Sweep => sweep(cfg, format),
        Command::SteeringTheory => steering(cfg, format),
        Command::TomoSim => tomo_sim(cfg, format, opts),
        Command::TomoFit => tomo_fit(cfg, format, opts),
    }
}

fn synth(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let sc = cfg.state()?;
    let st = masked_state(cfg)?;
    let intensity = jsi(&st);
    if format != Format::Json {
        return heatmap(&intensity.values, format);
    }
    let report = pure_state_entropy(&st)?;
    Ok(to_json_text(&json!({
        "command": "synth",
        "modes": sc.modes,
        "include_degenerate": sc.include_degenerate,
        "signal_modes": st.signal_modes(),
        "idler_modes": st.idler_modes(),
        "amplitudes": complex_matrix_json(st.amplitudes()),
        "jsi": real_matrix_json(&intensity.values),
        "entropy": entropy_json(&report),
    })))
}

fn entropy(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let st = masked_state(cfg)?;
    let signal = reduced_pure(&st, Arm::Signal);
    let idler = reduced_pure(&st, Arm::Idler);
    let s = entropy_report(&signal, signal.rows())?;
    match format {
        Format::Json => {
            let i = entropy_report(&idler, idler.rows())?;
            let by_rank = entropy_report_by_rank(&signal)?;
            Ok(to_json_text(&json!({
                "command": "entropy",
                "signal": entropy_json(&s),
                "idler": entropy_json(&i),
                "signal_by_rank": entropy_json(&by_rank),
            })))
        }
        Format::Csv => heatmap(&[s.eigenvalues.iter().map(|&x| x.max(0.0)).collect()], Format::Csv),
        Format::Pgm => Err(unsupported(Command::Entropy, format)),
    }
}

fn walk(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let wc = cfg.walk()?;
    let delta = wc.delta.ok_or_else(|| CliError::Config("`walk.delta` is required for `walk`".into()))?;
    let st = masked_state(cfg)?;
    let mut eom = EOMConfig::for_state(&st, delta, wc.phi_rf);
    if let Some(g) = wc.guard {
        eom.guard = g;
    }
    let out = evolve(&st, &eom)?;
    let intensity = jsi(&out);
    if format != Format::Json {
        return heatmap(&intensity.values, format);
    }
    let initial = mean_total_energy(&st);
    let mean = mean_total_energy(&out);
    Ok(to_json_text(&json!({
        "command": "walk",
        "delta": delta,
        "phi_rf": wc.phi_rf,
        "guard": eom.guard,
        "lattice": [eom.full_range().0, eom.full_range().1],
        "initial_mean_energy": initial,
        "mean_energy": mean,
        "distribution": distribution_json(&total_energy_distribution(&out)),
        "jsi": real_matrix_json(&intensity.values),
    })))
}

fn sweep(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let wc = cfg.walk()?;
    let grid = wc
        .delta_grid
        .as_ref()
        .ok_or_else(|| CliError::Config("`walk.delta_grid` is required for `sweep`".into()))?;
    let st = cfg.state()?.synthesize()?;
    let mask = cfg.mask();
    let res = sweep_and_slope(&st, &mask, &mask, grid, &wc.template())?;
    if format != Format::Json {
        let lo = res.points.iter().flat_map(|p| p.distribution.first().map(|d| d.0)).min().unwrap_or(0);
        let hi = res.points.iter().flat_map(|p| p.distribution.last().map(|d| d.0)).max().unwrap_or(0);
        let rows: Vec<Vec<f64>> = res
            .points
            .iter()
            .map(|p| {
                (lo..=hi).map(|m| p.distribution.iter().find(|d| d.0 == m).map_or(0.0, |d| d.1)).collect()
            })
            .collect();
        return heatmap(&rows, format);
    }
    let points: Vec<Value> = res
        .points
        .iter()
        .map(|p| {
            json!({
                "delta": p.delta,
                "mean_energy": p.mean_energy,
                "shift": p.shift,
                "distribution": distribution_json(&p.distribution),
            })
        })
        .collect();
    Ok(to_json_text(&json!({
        "command": "sweep",
        "phi_rf": wc.phi_rf,
        "slope": res.slope,
        "intercept": res.intercept,
        "residual": res.residual,
        "points": points,
    })))
}

fn steering(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    if format != Format::Json {
        return Err(unsupported(Command::SteeringTheory, format));
    }
    let wc = cfg.walk()?;
    let st = masked_state(cfg)?;
    let scale = wc.energy_scale()?;
    Ok(to_json_text(&json!({
        "command": "steering-theory",
        "phi_rf": wc.phi_rf,
        "chi": complex_json(chi_expectation(&st)),
        "energy_transfer_rate": energy_transfer_rate(&st, &scale),
        "desync_grid": wc.desync_grid,
        "desync_average": desync_average(&st, &scale, wc.desync_grid)?,
        "predicted_slope": steering_slope(&st, wc.phi_rf),
        "finite_difference_slope": finite_difference_slope(&st, wc.phi_rf, SLOPE_STEP)?,
    })))
}

/// Target density matrix of the tomography run.
pub fn tomo_target(cfg: &RunConfig) -> Result<Option<DensityMatrix>, CliError> {
    let tc = cfg.tomo()?;
    let Some(target) = &tc.target else { return Ok(None) };
    let pure = match target.upper_weights() {
        Some(upper) => qfc_core::comb::partially_entangled_qudit(tc.dim, &upper)?,
        None => {
            let st = masked_state(cfg)?;
            let signal: Vec<i32> = (1..=tc.dim as i32).collect();
            let idler: Vec<i32> = signal.iter().map(|k| -k).collect();
            subspace_postselect(&st, &signal, &idler)?
        }
    };
    Ok(Some(depolarize(&density_from_pure(&pure), target.depolarize)?))
}

fn tomo_sim(cfg: &RunConfig, format: Format, opts: &RunOptions) -> Result<String, CliError> {
    let tc = cfg.tomo()?;
    let rho = tomo_target(cfg)?.ok_or_else(|| CliError::Config("`tomo.target` is required for `tomo-sim`".into()))?;
    let projs = projector_set(tc.dim)?;
    let noise = match tc.noise {
        NoiseKind::Exact => Noise::Exact,
        NoiseKind::Poisson => Noise::Poisson {
            seed: opts
                .seed
                .or(tc.seed)
                .ok_or_else(|| CliError::Config("Poisson counts need an explicit seed".into()))?,
        },
    };
    let counts = simulate_counts(&rho, &projs, tc.scale, noise)?;
    match format {
        Format::Csv => Ok(counts_file::write_counts(&counts)),
        Format::Pgm => Err(unsupported(Command::TomoSim, format)),
        Format::Json => {
            let seed = match noise {
                Noise::Poisson { seed } => Some(seed),
                Noise::Exact => None,
            };
            let records: Vec<Value> = counts
                .iter()
                .map(|c| json!({ "label": c.label, "count": c.count, "correction": c.correction }))
                .collect();
            Ok(to_json_text(&json!({
                "command": "tomo-sim",
                "dim": tc.dim,
                "scale": tc.scale,
                "noise": if seed.is_some() { "poisson" } else { "exact" },
                "seed": seed,
                "fsr_label": tc.fsr_label,
                "target": complex_matrix_json(rho.matrix()),
                "counts": records,
            })))
        }
    }
}

pub fn resolve(path: &Path, base: Option<&Path>) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn tomo_fit(cfg: &RunConfig, format: Format, opts: &RunOptions) -> Result<String, CliError> {
    let tc = cfg.tomo()?;
    let path = tc.counts.as_ref().ok_or_else(|| CliError::Config("`tomo.counts` is required for `tomo-fit`".into()))?;
    let path = resolve(path, opts.base_dir.as_deref());
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read counts {}: {e}", path.display())))?;
    let counts = counts_file::read_counts(&text)?;
    let projs = projector_set(tc.dim)?;
    let basis = gamma_basis(tc.dim)?;
    let report = mle_reconstruct_with(&counts, &projs, &basis, None, &MleOptions::default())?;
    let rho = &report.rho;
    if format != Format::Json {
        let n = rho.dim();
        let rows: Vec<Vec<f64>> = (0..n).map(|r| rho.matrix().row(r).iter().map(|z| z.norm()).collect()).collect();
        return heatmap(&rows, format);
    }
    let linear = linear_reconstruct(&counts, &projs, &basis)?;
    let linear_min = hermitian_eigensystem(&linear)?.values[0];
    let concurrence = if tc.dim == 2 {
        let c = concurrence_and_eof(rho)?;
        json!({ "concurrence": c.concurrence, "entanglement_of_formation": c.entanglement_of_formation })
    } else {
        Value::Null
    };
    let fid = match tomo_target(cfg)? {
        Some(target) => json!(fidelity(rho, &target)?),
        None => Value::Null,
    };
    Ok(to_json_text(&json!({
        "command": "tomo-fit",
        "dim": tc.dim,
        "fsr_label": tc.fsr_label,
        "rho": complex_matrix_json(rho.matrix()),
        "iterations": report.iterations,
        "objective": report.objective,
        "fidelity": fid,
        "purity": purity(rho),
        "entropy_signal": entropy_json(&entropy_report(&partial_trace(rho, Arm::Signal), tc.dim)?),
        "entropy_idler": entropy_json(&entropy_report(&partial_trace(rho, Arm::Idler), tc.dim)?),
        "log_negativity": log_negativity(rho)?,
        "two_qubit": concurrence,
        "linear_min_eigenvalue": linear_min,
    })))
}
