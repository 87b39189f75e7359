//! Simulation orchestration: a flat configuration, a single run producing
//! every requested trace, and parallel parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Evolution;
use crate::error::{Error, Result};
use crate::measures::{
    fidelity_nm, gaussian_fidelity_1mode, log_negativity, mode_energy, nmbq, EntanglementTrace, FidelityTrace,
    OccupancyGrid, TimeGrid,
};
use crate::models::{build_w, AuxiliaryMode, BathStructure, ModelSpec};
use crate::phase_space::QuadratureOrdering;
use crate::spectral::{discretize, SpectralDensity, SpectralFamily};
use crate::states::{assemble_initial_state, ProbeState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    SingleMode,
    TwoBathModes,
    Model1,
    Model2,
    Model3,
}

impl ModelKind {
    pub fn uses_bath(self) -> bool {
        matches!(self, ModelKind::Model1 | ModelKind::Model2 | ModelKind::Model3)
    }
}

/// Which outputs a run should produce beyond the entanglement trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub entanglement: bool,
    pub nmbq: bool,
    pub occupancy: bool,
    pub fidelity: bool,
    pub energy: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { entanglement: true, nmbq: true, occupancy: false, fidelity: false, energy: false }
    }
}

/// The pair of single-mode squeezed probes compared by the fidelity pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FidelityPair {
    pub r1: f64,
    pub phase1: f64,
    pub r2: f64,
    pub phase2: f64,
}

impl Default for FidelityPair {
    fn default() -> Self {
        Self { r1: 4.0, phase1: 0.0, r2: 0.1, phase2: 0.0 }
    }
}

/// Every knob of a run. Defaults are the full-resolution reference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub model: ModelKind,
    pub omega_a: f64,
    pub omega_s: f64,
    pub spectral_family: SpectralFamily,
    pub alpha: f64,
    /// Defaults to the family's cutoff (15 Ohmic, 3 super-Ohmic).
    pub omega_c: Option<f64>,
    pub n_bath_modes: usize,
    pub omega_bmax: f64,
    /// Extra (Model 2) or buffer (Model 3) mode frequency; defaults to `omega_s`.
    pub aux_omega: Option<f64>,
    pub aux_coupling: f64,
    /// Single-mode toy: bath frequency and coupling.
    pub omega_r: f64,
    pub g: f64,
    /// Two-bath-mode toy: detuning of `r` and its coupling (`g` couples `b`).
    pub delta: f64,
    pub h: f64,
    pub zeta: f64,
    pub temperature: f64,
    pub t0: f64,
    pub tf: f64,
    pub dt: f64,
    /// Sampling interval of the occupancy map.
    pub occupancy_dt: f64,
    pub outputs: Outputs,
    pub fidelity: FidelityPair,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Model1,
            omega_a: 10.0,
            omega_s: 10.0,
            spectral_family: SpectralFamily::Ohmic,
            alpha: 1.0,
            omega_c: None,
            n_bath_modes: 350,
            omega_bmax: 50.0,
            aux_omega: None,
            aux_coupling: 1.0,
            omega_r: 15.0,
            g: 1.0,
            delta: 5.0,
            h: 0.5,
            zeta: 4.0,
            temperature: 1.0,
            t0: 0.0,
            tf: 20.0,
            dt: 0.001,
            occupancy_dt: 0.01,
            outputs: Outputs::default(),
            fidelity: FidelityPair::default(),
        }
    }
}

/// Named presets: `paper` is the full reference resolution, `desk` a
/// sub-minute smoke run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Paper,
    Desk,
}

impl SimulationConfig {
    pub fn apply_preset(&mut self, preset: Preset) {
        let reference = SimulationConfig::default();
        match preset {
            Preset::Paper => {
                self.n_bath_modes = reference.n_bath_modes;
                self.dt = reference.dt;
                self.tf = reference.tf;
            }
            Preset::Desk => {
                self.n_bath_modes = 100;
                self.dt = 0.005;
                self.tf = 10.0;
            }
        }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t0, self.tf, self.dt)
    }

    pub fn spectral_density(&self) -> Result<SpectralDensity> {
        let cutoff = self.omega_c.unwrap_or_else(|| self.spectral_family.default_cutoff());
        SpectralDensity::new(self.spectral_family, self.alpha, cutoff)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::param("temperature", format!("must be >= 0, got {}", self.temperature)));
        }
        if !self.zeta.is_finite() {
            return Err(Error::param("zeta", "must be finite"));
        }
        if !(self.occupancy_dt.is_finite() && self.occupancy_dt > 0.0) {
            return Err(Error::param("occupancy_dt", format!("must be > 0, got {}", self.occupancy_dt)));
        }
        if self.model.uses_bath() {
            if self.n_bath_modes == 0 {
                return Err(Error::param("n_bath_modes", "must be at least 1"));
            }
            self.spectral_density()?;
        }
        self.model_spec(ProbeState::TwoModeSqueezed { zeta: self.zeta })?.validate()
    }

    /// Physical model for a given probe state.
    pub fn model_spec(&self, probe: ProbeState) -> Result<ModelSpec> {
        let aux = AuxiliaryMode { omega: self.aux_omega.unwrap_or(self.omega_s), coupling: self.aux_coupling };
        let structure = match self.model {
            ModelKind::SingleMode => BathStructure::SingleMode { omega_r: self.omega_r, g: self.g },
            ModelKind::TwoBathModes => BathStructure::TwoBathModes { delta: self.delta, g: self.g, h: self.h },
            kind => {
                let bath = discretize(&self.spectral_density()?, self.n_bath_modes, self.omega_bmax)?.modes();
                match kind {
                    ModelKind::Model1 => BathStructure::Model1 { bath },
                    ModelKind::Model2 => BathStructure::Model2 { bath, extra: aux },
                    _ => BathStructure::Model3 { bath, buffer: aux },
                }
            }
        };
        Ok(ModelSpec { omega_a: self.omega_a, omega_s: self.omega_s, structure, probe, temperature: self.temperature })
    }
}

/// Fidelity-pipeline outputs: the fidelity trace, its quantifier, and the
/// system energy under each probe.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityOutcome {
    pub trace: FidelityTrace,
    pub quantifier: f64,
    pub energy_1: Vec<f64>,
    pub energy_2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub grid: TimeGrid,
    pub entanglement: EntanglementTrace,
    pub nmbq: f64,
    /// Smallest ancilla–system symplectic eigenvalue seen along the trace.
    pub min_symplectic_eigenvalue: f64,
    pub energy: Option<Vec<f64>>,
    pub occupancy: Option<OccupancyGrid>,
    pub fidelity: Option<FidelityOutcome>,
}

pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationResult> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let times = grid.times();
    let spec = cfg.model_spec(ProbeState::TwoModeSqueezed { zeta: cfg.zeta })?;
    let w = build_w(&spec)?;
    let evolution = Evolution::new(&w, assemble_initial_state(&spec)?)?;

    let modes = [QuadratureOrdering::ANCILLA, QuadratureOrdering::SYSTEM];
    let mut values = Vec::with_capacity(times.len());
    let mut energy = cfg.outputs.energy.then(|| Vec::with_capacity(times.len()));
    let mut min_nu = f64::INFINITY;
    let mut failure = None;
    evolution.for_each_reduced(&modes, &times, |_, block| {
        if failure.is_some() {
            return;
        }
        match crate::measures::two_mode_min_symplectic_eigenvalue(&block).and_then(|nu| {
            min_nu = min_nu.min(nu);
            log_negativity(&block)
        }) {
            Ok(e) => values.push(e),
            Err(err) => failure = Some(err),
        }
        if let Some(energy) = energy.as_mut() {
            // system is mode 1 of the reduced block
            energy.push(mode_energy(&block, 1, cfg.omega_s).expect("two-mode block"));
        }
    })?;
    if let Some(err) = failure {
        return Err(err);
    }
    let entanglement = EntanglementTrace::new(grid, values)?;
    let quantifier = nmbq(&entanglement);

    let occupancy = if cfg.outputs.occupancy { Some(occupancy_map(cfg, &spec, &evolution)?) } else { None };
    let fidelity = if cfg.outputs.fidelity { Some(run_fidelity(cfg)?) } else { None };

    Ok(SimulationResult {
        grid,
        entanglement,
        nmbq: quantifier,
        min_symplectic_eigenvalue: min_nu,
        energy,
        occupancy,
        fidelity,
    })
}

fn occupancy_map(cfg: &SimulationConfig, spec: &ModelSpec, evolution: &Evolution) -> Result<OccupancyGrid> {
    let grid = TimeGrid::new(cfg.t0, cfg.tf, cfg.occupancy_dt)?;
    let omegas = spec.environment_frequencies();
    let initial = evolution.quadrature_sums(cfg.t0)?;
    let times = grid.times();
    let values = times
        .iter()
        .map(|&t| {
            let sums = evolution.quadrature_sums(t)?;
            Ok((2..sums.len()).map(|m| sums[m] - initial[m]).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(OccupancyGrid { times, omegas, values })
}

/// Evolves the two single-mode squeezed probes under the configured bath and
/// tracks their fidelity and the system energy.
pub fn run_fidelity(cfg: &SimulationConfig) -> Result<FidelityOutcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let times = grid.times();
    let pair = cfg.fidelity;
    let mut states = Vec::with_capacity(2);
    for (r, phase) in [(pair.r1, pair.phase1), (pair.r2, pair.phase2)] {
        let spec = cfg.model_spec(ProbeState::SingleModeSqueezed { r, phase })?;
        let evolution = Evolution::new(&build_w(&spec)?, assemble_initial_state(&spec)?)?;
        states.push(evolution.reduced_trace(&[QuadratureOrdering::SYSTEM], &times)?);
    }
    let fidelity =
        states[0].iter().zip(&states[1]).map(|(a, b)| gaussian_fidelity_1mode(a, b)).collect::<Result<Vec<f64>>>()?;
    let energy = |trace: &[crate::phase_space::CovarianceMatrix]| {
        trace.iter().map(|cm| mode_energy(cm, 0, cfg.omega_s)).collect::<Result<Vec<f64>>>()
    };
    let energy_1 = energy(&states[0])?;
    let energy_2 = energy(&states[1])?;
    let trace = FidelityTrace::new(grid, fidelity)?;
    let quantifier = fidelity_nm(&trace);
    Ok(FidelityOutcome { trace, quantifier, energy_1, energy_2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Alpha,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub base: SimulationConfig,
}

impl SweepSpec {
    pub fn alpha(base: SimulationConfig, values: Vec<f64>) -> Self {
        Self { parameter: SweepParameter::Alpha, values, base }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::param("values", "sweep needs at least one value"));
        }
        if let Some(bad) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param("values", format!("alpha values must be finite and >= 0, found {bad}")));
        }
        Ok(())
    }

    /// Configuration of a single cell.
    pub fn cell(&self, value: f64) -> SimulationConfig {
        let mut cfg = self.base.clone();
        match self.parameter {
            SweepParameter::Alpha => cfg.alpha = value,
        }
        cfg.outputs = Outputs { entanglement: false, nmbq: true, occupancy: false, fidelity: false, energy: false };
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub nmbq: Result<f64>,
}

/// One row per value, in input order. Cells run concurrently on up to
/// `workers` threads (all available cores when `None`); a failing cell is
/// reported in its row without stopping the others.
pub fn run_sweep(sweep: &SweepSpec, workers: Option<usize>) -> Result<Vec<SweepRow>> {
    sweep.validate()?;
    let eval = || -> Vec<SweepRow> {
        sweep
            .values
            .par_iter()
            .map(|&value| SweepRow { value, nmbq: run_simulation(&sweep.cell(value)).map(|r| r.nmbq) })
            .collect()
    };
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?;
            Ok(pool.install(eval))
        }
        None => Ok(eval()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(model: ModelKind, alpha: f64) -> SimulationConfig {
        SimulationConfig { model, alpha, n_bath_modes: 40, dt: 0.01, tf: 5.0, ..Default::default() }
    }

    #[test]
    fn defaults_match_reference_parameters() {
        let c = SimulationConfig::default();
        assert_eq!((c.omega_a, c.omega_s, c.omega_bmax), (10.0, 10.0, 50.0));
        assert_eq!((c.zeta, c.temperature, c.n_bath_modes), (4.0, 1.0, 350));
        assert_eq!((c.t0, c.tf, c.dt), (0.0, 20.0, 0.001));
        assert_eq!(c.spectral_density().unwrap().omega_c(), 15.0);
        let so = SimulationConfig { spectral_family: SpectralFamily::SuperOhmic, ..c };
        assert_eq!(so.spectral_density().unwrap().omega_c(), 3.0);
    }

    #[test]
    fn presets() {
        let mut c = SimulationConfig::default();
        c.apply_preset(Preset::Desk);
        assert_eq!((c.n_bath_modes, c.dt, c.tf), (100, 0.005, 10.0));
        c.apply_preset(Preset::Paper);
        assert_eq!((c.n_bath_modes, c.dt, c.tf), (350, 0.001, 20.0));
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = quick(ModelKind::Model1, 0.5);
        for bad in [
            SimulationConfig { temperature: -1.0, ..base.clone() },
            SimulationConfig { dt: 0.0, ..base.clone() },
            SimulationConfig { alpha: -0.1, ..base.clone() },
            SimulationConfig { n_bath_modes: 0, ..base.clone() },
            SimulationConfig { tf: -1.0, ..base.clone() },
        ] {
            assert!(run_simulation(&bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn zero_coupling_gives_constant_entanglement() {
        let r = run_simulation(&quick(ModelKind::Model1, 0.0)).unwrap();
        assert!(r.nmbq < 1e-8, "{}", r.nmbq);
        let e0 = r.entanglement.values()[0];
        for e in r.entanglement.values() {
            assert!((e - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_preserves_order_and_matches_single_runs() {
        let base = quick(ModelKind::Model2, 0.0);
        let sweep = SweepSpec::alpha(base.clone(), vec![0.3, 0.01, 0.1]);
        let rows = run_sweep(&sweep, Some(2)).unwrap();
        assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), vec![0.3, 0.01, 0.1]);
        let direct = run_simulation(&SimulationConfig { alpha: 0.01, ..base }).unwrap().nmbq;
        assert_eq!(rows[1].nmbq.as_ref().unwrap(), &direct);
        assert!(run_sweep(&SweepSpec::alpha(quick(ModelKind::Model1, 0.0), vec![]), None).is_err());
    }

    #[test]
    fn failing_cell_does_not_abort_sweep() {
        // a zero-frequency bath is rejected per cell, not for the whole sweep
        let base = SimulationConfig { omega_c: Some(15.0), ..quick(ModelKind::Model1, 0.0) };
        let mut sweep = SweepSpec::alpha(base, vec![0.1, 0.2]);
        sweep.base.omega_bmax = -1.0;
        let rows = run_sweep(&sweep, Some(1)).unwrap();
        assert!(rows.iter().all(|r| r.nmbq.is_err()));
    }

    #[test]
    fn optional_outputs() {
        let cfg = SimulationConfig {
            outputs: Outputs { occupancy: true, energy: true, fidelity: true, ..Outputs::default() },
            occupancy_dt: 0.5,
            ..quick(ModelKind::Model1, 0.5)
        };
        let r = run_simulation(&cfg).unwrap();
        let occ = r.occupancy.unwrap();
        assert_eq!(occ.times.len(), 11);
        assert_eq!(occ.omegas.len(), 40);
        assert!(occ.values[0].iter().all(|&v| v == 0.0));
        assert_eq!(r.energy.unwrap().len(), r.grid.len());
        let fid = r.fidelity.unwrap();
        assert!(
            (fid.trace.values()[0]
                - gaussian_fidelity_1mode(
                    &crate::states::single_mode_squeezed_cm(4.0, 0.0).unwrap(),
                    &crate::states::single_mode_squeezed_cm(0.1, 0.0).unwrap(),
                )
                .unwrap())
            .abs()
                < 1e-9
        );
    }
}
