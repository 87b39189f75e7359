//! Ohmic and super-Ohmic spectral densities and their uniform discretisation
//! into bath-mode frequencies and couplings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::BathMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFamily {
    /// `J(ω) = α ω e^{−ω/ω_c}`
    Ohmic,
    /// `J(ω) = α ω³ e^{−ω/ω_c}`
    SuperOhmic,
}

impl SpectralFamily {
    /// Default cutoff: 15 for Ohmic, 3 for super-Ohmic baths.
    pub fn default_cutoff(self) -> f64 {
        match self {
            SpectralFamily::Ohmic => 15.0,
            SpectralFamily::SuperOhmic => 3.0,
        }
    }

    fn power(self) -> i32 {
        match self {
            SpectralFamily::Ohmic => 1,
            SpectralFamily::SuperOhmic => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    family: SpectralFamily,
    alpha: f64,
    omega_c: f64,
}

impl SpectralDensity {
    pub fn new(family: SpectralFamily, alpha: f64, omega_c: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::param("alpha", format!("damping must be finite and >= 0, got {alpha}")));
        }
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::param("omega_c", format!("cutoff must be finite and > 0, got {omega_c}")));
        }
        Ok(Self { family, alpha, omega_c })
    }

    /// Density with the family's default cutoff.
    pub fn with_default_cutoff(family: SpectralFamily, alpha: f64) -> Result<Self> {
        Self::new(family, alpha, family.default_cutoff())
    }

    pub fn family(&self) -> SpectralFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    /// Frequency at which `J` peaks: `p·ω_c` for `J ∝ ω^p e^{−ω/ω_c}`.
    pub fn peak_frequency(&self) -> f64 {
        f64::from(self.family.power()) * self.omega_c
    }
}

pub fn eval_j(sd: &SpectralDensity, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::param("omega", format!("frequency must be >= 0, got {omega}")));
    }
    Ok(sd.alpha * omega.powi(sd.family.power()) * (-omega / sd.omega_c).exp())
}

/// Evenly spaced bath modes `ω_i = iΔω`, `i = 1..=N`, with `g_i² = J(ω_i) Δω`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath {
    freqs: Vec<f64>,
    couplings: Vec<f64>,
    delta_omega: f64,
}

impl DiscretizedBath {
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn modes(&self) -> Vec<BathMode> {
        self.freqs.iter().zip(&self.couplings).map(|(&omega, &coupling)| BathMode { omega, coupling }).collect()
    }
}

/// The grid excludes `ω = 0` (a zero-frequency thermal mode has infinite
/// variance) and ends exactly at `ω_bmax`.
pub fn discretize(sd: &SpectralDensity, n_modes: usize, omega_bmax: f64) -> Result<DiscretizedBath> {
    if n_modes == 0 {
        return Err(Error::param("n_modes", "bath needs at least one mode"));
    }
    if !(omega_bmax.is_finite() && omega_bmax > 0.0) {
        return Err(Error::param("omega_bmax", format!("must be finite and > 0, got {omega_bmax}")));
    }
    let delta_omega = omega_bmax / n_modes as f64;
    let freqs: Vec<f64> = (1..=n_modes).map(|i| i as f64 * delta_omega).collect();
    let couplings =
        freqs.iter().map(|&w| eval_j(sd, w).map(|j| (j * delta_omega).sqrt())).collect::<Result<Vec<_>>>()?;
    Ok(DiscretizedBath { freqs, couplings, delta_omega })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ohmic(alpha: f64) -> SpectralDensity {
        SpectralDensity::with_default_cutoff(SpectralFamily::Ohmic, alpha).unwrap()
    }

    /// Adaptive Simpson quadrature, independent of the discretisation path.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
        }
        fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, m, left, tol / 2.0, depth - 1) + recurse(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        recurse(f, a, b, simpson(f, a, b), tol, 40)
    }

    #[test]
    fn formula_values() {
        let sd = ohmic(1.0);
        assert_eq!(eval_j(&sd, 0.0).unwrap(), 0.0);
        let j10 = eval_j(&sd, 10.0).unwrap();
        assert!((j10 - 10.0 * (-2.0f64 / 3.0).exp()).abs() < 1e-12);
        assert!((j10 - 5.1342).abs() < 1e-4);

        let so = SpectralDensity::with_default_cutoff(SpectralFamily::SuperOhmic, 1.0).unwrap();
        let j = eval_j(&so, 10.0).unwrap();
        assert!((j - 1000.0 * (-10.0f64 / 3.0).exp()).abs() < 1e-10);
        assert!((j - 35.674).abs() < 1e-3);

        assert!(eval_j(&sd, -1.0).is_err());
        assert!(eval_j(&sd, f64::NAN).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpectralDensity::new(SpectralFamily::Ohmic, -0.1, 15.0).is_err());
        assert!(SpectralDensity::new(SpectralFamily::Ohmic, 1.0, 0.0).is_err());
        assert!(discretize(&ohmic(1.0), 0, 50.0).is_err());
        assert!(discretize(&ohmic(1.0), 10, -1.0).is_err());
    }

    #[test]
    fn reference_grid() {
        let bath = discretize(&ohmic(0.5), 350, 50.0).unwrap();
        assert_eq!(bath.len(), 350);
        assert!((bath.delta_omega() - 1.0 / 7.0).abs() < 1e-15);
        assert!((bath.freqs()[0] - 1.0 / 7.0).abs() < 1e-15);
        assert!((bath.freqs()[349] - 50.0).abs() < 1e-12);
        for pair in bath.freqs().windows(2) {
            assert!((pair[1] - pair[0] - bath.delta_omega()).abs() <= 1e-12);
        }
        let sd = ohmic(0.5);
        for (&w, &g) in bath.freqs().iter().zip(bath.couplings()) {
            let expected = eval_j(&sd, w).unwrap() * bath.delta_omega();
            assert!((g * g - expected).abs() <= 1e-12 * expected.max(f64::MIN_POSITIVE));
        }

        let single = discretize(&sd, 1, 10.0).unwrap();
        assert_eq!(single.freqs(), &[10.0]);
    }

    #[test]
    fn riemann_sum_matches_quadrature() {
        let sd = ohmic(1.0);
        let bath = discretize(&sd, 350, 50.0).unwrap();
        let sum: f64 = bath.couplings().iter().map(|g| g * g).sum();
        let integral = adaptive_simpson(&|w| eval_j(&sd, w).unwrap(), 0.0, 50.0, 1e-10);
        assert!((sum - integral).abs() / integral < 0.02, "{sum} vs {integral}");
    }

    #[test]
    fn doubling_alpha_scales_couplings_by_sqrt2() {
        let a = discretize(&ohmic(0.3), 50, 50.0).unwrap();
        let b = discretize(&ohmic(0.6), 50, 50.0).unwrap();
        for (ga, gb) in a.couplings().iter().zip(b.couplings()) {
            assert!((gb - ga * std::f64::consts::SQRT_2).abs() <= 1e-14 * gb.max(1.0));
        }
    }

    #[test]
    fn peaks_sit_at_p_times_cutoff() {
        for family in [SpectralFamily::Ohmic, SpectralFamily::SuperOhmic] {
            let sd = SpectralDensity::with_default_cutoff(family, 1.0).unwrap();
            let (argmax, _) = (1..=100_000)
                .map(|i| i as f64 * 1e-3)
                .map(|w| (w, eval_j(&sd, w).unwrap()))
                .fold((0.0, f64::MIN), |best, cur| if cur.1 > best.1 { cur } else { best });
            assert!((argmax - sd.peak_frequency()).abs() < 2e-3, "{family:?}: {argmax}");
        }
    }
}
