//! Coupling blocks `W` (so that `K = diag(W, W)`) for the bath structures.
//!
//! Mode layout, shared by every structure:
//!
//! | index           | mode                                             |
//! |-----------------|--------------------------------------------------|
//! | 0               | ancilla (free evolution only)                    |
//! | 1               | system                                           |
//! | 2 ..= N+1       | bath modes, in the order given (ascending ω)     |
//! | N+2 (if any)    | extra mode E (Model 2) or buffer B (Model 3)     |
//!
//! The two-bath-mode toy puts the resonant mode `b` at index 2 and the
//! detuned mode `r` at index 3.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::ProbeState;

/// One bath oscillator: its frequency and the strength of its beam-splitter
/// coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub omega: f64,
    pub coupling: f64,
}

/// A single strongly coupled resonant oscillator added to the bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryMode {
    pub omega: f64,
    pub coupling: f64,
}

impl AuxiliaryMode {
    /// Resonant with the system, unit coupling.
    pub fn resonant(omega_s: f64) -> Self {
        Self { omega: omega_s, coupling: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathStructure {
    /// One bath oscillator at `omega_r` with coupling `g`.
    SingleMode { omega_r: f64, g: f64 },
    /// A resonant mode `b` (coupling `g`) and a mode `r` detuned by `delta`
    /// (coupling `h`).
    TwoBathModes { delta: f64, g: f64, h: f64 },
    /// System coupled directly to every bath mode.
    Model1 { bath: Vec<BathMode> },
    /// Model 1 plus an extra mode coupled to the system only.
    Model2 { bath: Vec<BathMode>, extra: AuxiliaryMode },
    /// System coupled only to a buffer, which couples to every bath mode.
    Model3 { bath: Vec<BathMode>, buffer: AuxiliaryMode },
}

impl BathStructure {
    fn bath(&self) -> &[BathMode] {
        match self {
            BathStructure::Model1 { bath }
            | BathStructure::Model2 { bath, .. }
            | BathStructure::Model3 { bath, .. } => bath,
            _ => &[],
        }
    }

    fn auxiliary(&self) -> Option<AuxiliaryMode> {
        match self {
            BathStructure::Model2 { extra, .. } => Some(*extra),
            BathStructure::Model3 { buffer, .. } => Some(*buffer),
            _ => None,
        }
    }
}

/// Everything needed to build `W` and the initial covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub omega_a: f64,
    pub omega_s: f64,
    pub structure: BathStructure,
    pub probe: ProbeState,
    /// Temperature shared by every bath/auxiliary mode. Zero means vacuum.
    pub temperature: f64,
}

impl ModelSpec {
    pub fn new(structure: BathStructure, probe: ProbeState, temperature: f64) -> Self {
        Self { omega_a: 10.0, omega_s: 10.0, structure, probe, temperature }
    }

    pub fn n_modes(&self) -> usize {
        2 + self.environment_frequencies().len()
    }

    /// Frequencies of the modes after the ancilla and system, in index order.
    pub fn environment_frequencies(&self) -> Vec<f64> {
        match &self.structure {
            BathStructure::SingleMode { omega_r, .. } => vec![*omega_r],
            BathStructure::TwoBathModes { delta, .. } => vec![self.omega_s, self.omega_s + delta],
            s => s.bath().iter().map(|m| m.omega).chain(s.auxiliary().map(|a| a.omega)).collect(),
        }
    }

    pub fn mode_frequencies(&self) -> Vec<f64> {
        let mut freqs = vec![self.omega_a, self.omega_s];
        freqs.extend(self.environment_frequencies());
        freqs
    }

    /// Index of the extra/buffer mode, when the structure has one.
    pub fn auxiliary_index(&self) -> Option<usize> {
        self.structure.auxiliary().map(|_| self.n_modes() - 1)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        finite_positive("omega_a", self.omega_a)?;
        finite_positive("omega_s", self.omega_s)?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::param("temperature", format!("must be finite and >= 0, got {}", self.temperature)));
        }
        let check_coupling = |name: &'static str, g: f64| {
            if g.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("coupling must be finite, got {g}")))
            }
        };
        match &self.structure {
            BathStructure::SingleMode { g, .. } => check_coupling("g", *g)?,
            BathStructure::TwoBathModes { g, h, delta } => {
                check_coupling("g", *g)?;
                check_coupling("h", *h)?;
                if !delta.is_finite() {
                    return Err(Error::param("delta", "detuning must be finite"));
                }
            }
            s => {
                if s.bath().is_empty() {
                    return Err(Error::InconsistentModel("bath has no modes".into()));
                }
                for m in s.bath() {
                    check_coupling("bath coupling", m.coupling)?;
                }
                if let Some(aux) = s.auxiliary() {
                    check_coupling("auxiliary coupling", aux.coupling)?;
                }
            }
        }
        for w in self.environment_frequencies() {
            finite_positive("environment frequency", w)?;
        }
        Ok(())
    }
}

pub fn build_w(model: &ModelSpec) -> Result<DMatrix<f64>> {
    model.validate()?;
    let n = model.n_modes();
    let mut w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(model.mode_frequencies()));
    let sys = 1;
    let mut couple = |i: usize, j: usize, g: f64| {
        w[(i, j)] = g;
        w[(j, i)] = g;
    };
    match &model.structure {
        BathStructure::SingleMode { g, .. } => couple(sys, 2, *g),
        BathStructure::TwoBathModes { g, h, .. } => {
            couple(sys, 2, *g);
            couple(sys, 3, *h);
        }
        BathStructure::Model1 { bath } => {
            for (i, m) in bath.iter().enumerate() {
                couple(sys, 2 + i, m.coupling);
            }
        }
        BathStructure::Model2 { bath, extra } => {
            for (i, m) in bath.iter().enumerate() {
                couple(sys, 2 + i, m.coupling);
            }
            couple(sys, n - 1, extra.coupling);
        }
        BathStructure::Model3 { bath, buffer } => {
            let b = n - 1;
            couple(sys, b, buffer.coupling);
            for (i, m) in bath.iter().enumerate() {
                couple(b, 2 + i, m.coupling);
            }
        }
    }
    Ok(w)
}

/// Interaction-picture coupling block for the two-bath-mode toy when the
/// detuned mode is far off resonance: the detuned mode decouples and the
/// system picks up a shift `h²/Δ`. Frequencies are relative to `ω_s`; the
/// ancilla occupies index 0 (at zero frequency) so the result plugs into the
/// same `(a, s, b, r)` layout as the full model.
pub fn effective_w_large_detuning(g: f64, h: f64, delta: f64) -> Result<DMatrix<f64>> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::param("delta", format!("detuning must be finite and non-zero, got {delta}")));
    }
    let shift = h * h / delta;
    let mut w = DMatrix::zeros(4, 4);
    w[(1, 1)] = shift;
    w[(3, 3)] = delta - shift;
    w[(1, 2)] = g;
    w[(2, 1)] = g;
    Ok(w)
}

/// Interaction-picture coupling block for the two-bath-mode toy at small
/// detuning: shifts on all three modes and an induced `b`–`r` coupling.
/// Layout as in [`effective_w_large_detuning`].
pub fn effective_w_small_detuning(g: f64, h: f64, delta: f64) -> Result<DMatrix<f64>> {
    let s = g * g + h * h;
    if s == 0.0 {
        return Err(Error::param("g, h", "at least one coupling must be non-zero"));
    }
    let mut w = DMatrix::zeros(4, 4);
    w[(1, 1)] = delta * h * h / (2.0 * s);
    w[(2, 2)] = 3.0 * delta * g * g * h * h / (2.0 * s * s);
    w[(3, 3)] = delta * (2.0 * g.powi(4) + h.powi(4)) / (2.0 * s * s);
    let induced = delta * g * h * (h * h - 2.0 * g * g) / (2.0 * s * s);
    for (i, j, v) in [(1, 2, g), (1, 3, h), (2, 3, induced)] {
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    Ok(w)
}

/// Coupling of the single bright normal mode of a degenerate manifold:
/// `g′ = √(Σ g_i²)`.
pub fn effective_resonant_coupling(couplings: &[f64]) -> f64 {
    couplings.iter().map(|g| g * g).sum::<f64>().sqrt()
}
