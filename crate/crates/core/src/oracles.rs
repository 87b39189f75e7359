//! Closed-form results for one system mode coupled to one bath mode, used as
//! independent checks of the numerical pipeline.
//!
//! Both expressions live in the frame rotating at `ω_s` with `ω_a = ω_s`, so
//! numerical states must be passed through [`to_rotating_frame`] before an
//! elementwise comparison. The bath mode is thermal at `T = 1`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::phase_space::CovarianceMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeAnalyticParams {
    pub zeta: f64,
    pub g: f64,
    /// `Δ = ω_r − ω_s`
    pub delta: f64,
    pub omega_r: f64,
    pub t: f64,
}

impl TwoModeAnalyticParams {
    /// `E_p = √(Δ² + 4g²)`
    pub fn normal_mode_splitting(&self) -> f64 {
        (self.delta * self.delta + 4.0 * self.g * self.g).sqrt()
    }
}

/// Ancilla–system covariance matrix in `(x_a, x_s, p_a, p_s)` order, with the
/// overall factor ½ of the closed form kept:
///
/// ```text
/// γ = ½ [[V₁₊, V₂], [V₂, V₁₋]]
/// V₁± = [[cosh ζ, ±Ξ sinh ζ], [±Ξ sinh ζ, cosh ζ + Φ]],  V₂ = Π sinh ζ [[0, 1], [1, 0]]
/// Ξ = cos(E_p t/2) cos(Δt/2) + (Δ/E_p) sin(E_p t/2) sin(Δt/2)
/// Π = −cos(E_p t/2) sin(Δt/2) + (Δ/E_p) sin(E_p t/2) cos(Δt/2)
/// Φ = 2g² (cos(E_p t) − 1)/E_p² · (cosh ζ − coth(ω_r/2))
/// ```
///
/// The `Δt/2` arguments of Ξ and Π follow from the `e^{−iΔt/2}` phase of the
/// mode solutions; with `Δt` instead the expression disagrees with exact
/// evolution at `O(1)`.
pub fn analytic_as_cm(p: &TwoModeAnalyticParams) -> Result<CovarianceMatrix> {
    let finite = [p.zeta, p.g, p.delta, p.omega_r, p.t].iter().all(|v| v.is_finite());
    if !finite {
        return Err(Error::param("params", "all parameters must be finite"));
    }
    let ep = p.normal_mode_splitting();
    let (ch, sh) = (p.zeta.cosh(), p.zeta.sinh());
    let half_ep = 0.5 * ep * p.t;
    let half_delta = 0.5 * p.delta * p.t;
    // Δ/E_p → 0 smoothly as E_p → 0 (g = 0 and Δ = 0)
    let ratio = if ep == 0.0 { 0.0 } else { p.delta / ep };
    let xi = half_ep.cos() * half_delta.cos() + ratio * half_ep.sin() * half_delta.sin();
    let pi = -half_ep.cos() * half_delta.sin() + ratio * half_ep.sin() * half_delta.cos();
    let phi = if ep == 0.0 {
        0.0
    } else {
        2.0 * p.g * p.g * ((ep * p.t).cos() - 1.0) / (ep * ep) * (ch - 1.0 / (0.5 * p.omega_r).tanh())
    };
    #[rustfmt::skip]
    let v = DMatrix::from_row_slice(4, 4, &[
        ch,          xi * sh,        0.0,       pi * sh,
        xi * sh,     ch + phi,       pi * sh,   0.0,
        0.0,         pi * sh,        ch,        -xi * sh,
        pi * sh,     0.0,            -xi * sh,  ch + phi,
    ]);
    Ok(CovarianceMatrix::from_matrix_unchecked(v * 0.5))
}

/// Large-detuning entanglement-oscillation formula, evaluated as printed:
///
/// `𝔼 = log₂[(Δ² e^{−ζ} + 2g² (coth(ω_r/2) − e^{−ζ}) sin(Δt/2)) / (2Δ²)]`
///
/// Its argument is below one, so `𝔼` is negative; it tracks the oscillating
/// partially-transposed symplectic eigenvalue rather than the log-negativity
/// itself.
pub fn large_detuning_eo(p: &TwoModeAnalyticParams) -> Result<f64> {
    if p.delta == 0.0 || !p.delta.is_finite() {
        return Err(Error::param("delta", "large-detuning formula needs a finite non-zero detuning"));
    }
    let d2 = p.delta * p.delta;
    let em = (-p.zeta).exp();
    let coth = 1.0 / (0.5 * p.omega_r).tanh();
    let arg = (d2 * em + 2.0 * p.g * p.g * (coth - em) * (0.5 * p.delta * p.t).sin()) / (2.0 * d2);
    if !(arg > 0.0) {
        return Err(Error::param("g", format!("coupling too strong for the expansion (argument {arg})")));
    }
    Ok(arg.log2())
}

/// Removes a common free rotation at `omega` from every mode, mapping a
/// lab-frame state at time `t` into the frame rotating at `omega`.
pub fn to_rotating_frame(gamma: &CovarianceMatrix, omega: f64, t: f64) -> CovarianceMatrix {
    let n = gamma.n_modes();
    let (c, s) = ((omega * t).cos(), (omega * t).sin());
    let mut undo = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        undo[(i, i)] = c;
        undo[(i, n + i)] = -s;
        undo[(n + i, i)] = s;
        undo[(n + i, n + i)] = c;
    }
    CovarianceMatrix::from_matrix_unchecked(&undo * gamma.matrix() * undo.transpose())
}
