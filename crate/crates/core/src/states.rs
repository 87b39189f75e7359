//! Initial covariance matrices: the two-mode squeezed ancilla–system probe,
//! single-mode squeezed probes, and thermal bath modes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::phase_space::CovarianceMatrix;

/// Initial state of the ancilla (mode 0) and system (mode 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ProbeState {
    /// Two-mode squeezed vacuum with squeezing `ζ` (entries `cosh ζ`, `sinh ζ`).
    TwoModeSqueezed { zeta: f64 },
    /// System in a single-mode squeezed vacuum; ancilla in vacuum.
    SingleModeSqueezed { r: f64, phase: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub omega: f64,
    pub temperature: f64,
}

/// `v(ω, T) = 1 + 2/(e^{ω/T} − 1) = coth(ω/2T)`.
pub fn thermal_variance(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::param("omega", format!("must be finite and > 0, got {omega}")));
    }
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::param("temperature", format!("must be finite and > 0, got {temperature}")));
    }
    Ok(1.0 + 2.0 / (omega / temperature).exp_m1())
}

pub fn thermal_cm(spec: ThermalSpec) -> Result<CovarianceMatrix> {
    let v = thermal_variance(spec.omega, spec.temperature)?;
    Ok(CovarianceMatrix::from_matrix_unchecked(DMatrix::identity(2, 2) * v))
}

/// Two-mode squeezed vacuum in `(x_a, x_s, p_a, p_s)` order.
pub fn two_mode_squeezed_cm(zeta: f64) -> Result<CovarianceMatrix> {
    if !zeta.is_finite() {
        return Err(Error::param("zeta", "squeezing must be finite"));
    }
    let (c, s) = (zeta.cosh(), zeta.sinh());
    #[rustfmt::skip]
    let gamma = DMatrix::from_row_slice(4, 4, &[
        c, s, 0.0, 0.0,
        s, c, 0.0, 0.0,
        0.0, 0.0, c, -s,
        0.0, 0.0, -s, c,
    ]);
    Ok(CovarianceMatrix::from_matrix_unchecked(gamma))
}

/// `R(φ) diag(e^{2r}, e^{−2r}) R(φ)ᵀ`: at zero phase the anti-squeezed
/// quadrature is `x`.
pub fn single_mode_squeezed_cm(r: f64, phase: f64) -> Result<CovarianceMatrix> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::param("r", format!("squeezing must be finite and >= 0, got {r}")));
    }
    if !phase.is_finite() {
        return Err(Error::param("phase", "must be finite"));
    }
    let (c, s) = (phase.cos(), phase.sin());
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[(2.0 * r).exp(), (-2.0 * r).exp()]));
    Ok(CovarianceMatrix::from_matrix_unchecked(&rot * diag * rot.transpose()))
}

/// Direct sum of the probe state and thermal environment modes, in the
/// global ordering of [`crate::models`].
pub fn assemble_initial_state(model: &ModelSpec) -> Result<CovarianceMatrix> {
    model.validate()?;
    let n = model.n_modes();
    let env = model.environment_frequencies();
    if env.len() + 2 != n {
        return Err(Error::InconsistentModel(format!("{} environment modes for {n} total", env.len())));
    }
    let mut gamma = DMatrix::zeros(2 * n, 2 * n);
    let probe = match model.probe {
        ProbeState::TwoModeSqueezed { zeta } => two_mode_squeezed_cm(zeta)?,
        ProbeState::SingleModeSqueezed { r, phase } => {
            let sq = single_mode_squeezed_cm(r, phase)?;
            let m = sq.matrix();
            #[rustfmt::skip]
            let pair = DMatrix::from_row_slice(4, 4, &[
                1.0, 0.0, 0.0, 0.0,
                0.0, m[(0, 0)], 0.0, m[(0, 1)],
                0.0, 0.0, 1.0, 0.0,
                0.0, m[(1, 0)], 0.0, m[(1, 1)],
            ]);
            CovarianceMatrix::from_matrix_unchecked(pair)
        }
    };
    // probe occupies modes 0 and 1: rows (x_0, x_1, p_0, p_1) map to (0, 1, n, n+1)
    let index = [0, 1, n, n + 1];
    for (i, &gi) in index.iter().enumerate() {
        for (j, &gj) in index.iter().enumerate() {
            gamma[(gi, gj)] = probe.matrix()[(i, j)];
        }
    }
    for (k, &omega) in env.iter().enumerate() {
        let v = if model.temperature == 0.0 { 1.0 } else { thermal_variance(omega, model.temperature)? };
        let mode = 2 + k;
        gamma[(mode, mode)] = v;
        gamma[(n + mode, n + mode)] = v;
    }
    Ok(CovarianceMatrix::from_matrix_unchecked(gamma))
}
