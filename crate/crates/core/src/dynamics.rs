//! Batched evaluation of reduced covariance matrices along a time grid.
//!
//! The entanglement trace only needs the ancilla–system block of `γ(t)`. Row
//! `m` of `C(t) = O cos(Dt) Oᵀ` is `O (O[m,:] ∘ cos(Dt))`, so a chunk of time
//! points becomes one dense matrix product per selected mode. The reduced
//! block is then a set of quadratic forms of those rows with the (sparse)
//! initial covariance matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::phase_space::{build_propagator, reduce_to_modes, CovarianceMatrix, SpectralFactorization};

const CHUNK: usize = 512;

/// Nonzero entries of a symmetric matrix, grouped by row.
#[derive(Debug, Clone)]
struct SparseRows {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    fn from_dense(m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|i| (0..m.ncols()).filter(|&j| m[(i, j)] != 0.0).map(|j| (j, m[(i, j)])).collect())
            .collect();
        Self { rows }
    }

    /// `uᵀ M v`.
    fn quad_form(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            if u[i] == 0.0 {
                continue;
            }
            let dot: f64 = row.iter().map(|&(j, x)| x * v[j]).sum();
            acc += u[i] * dot;
        }
        acc
    }
}

/// Exact evolution of a fixed initial state under a fixed coupling block.
#[derive(Debug, Clone)]
pub struct Evolution {
    fact: SpectralFactorization,
    gamma0: CovarianceMatrix,
    sparse0: SparseRows,
}

impl Evolution {
    pub fn new(w: &DMatrix<f64>, gamma0: CovarianceMatrix) -> Result<Self> {
        if gamma0.n_modes() != w.nrows() {
            return Err(Error::DimensionMismatch { expected: w.nrows(), found: gamma0.n_modes() });
        }
        let fact = SpectralFactorization::new(w)?;
        let sparse0 = SparseRows::from_dense(gamma0.matrix());
        Ok(Self { fact, gamma0, sparse0 })
    }

    pub fn n_modes(&self) -> usize {
        self.fact.n_modes()
    }

    pub fn initial_state(&self) -> &CovarianceMatrix {
        &self.gamma0
    }

    pub fn factorization(&self) -> &SpectralFactorization {
        &self.fact
    }

    /// Full `γ(t)`; `O(n³)`, intended for small systems and spot checks.
    pub fn full_state(&self, t: f64) -> Result<CovarianceMatrix> {
        let s = build_propagator(&self.fact, t)?;
        crate::phase_space::evolve_cm(&self.gamma0, &s)
    }

    /// Reduced state of `modes` at time `t`.
    pub fn reduced_state(&self, modes: &[usize], t: f64) -> Result<CovarianceMatrix> {
        let mut out = None;
        self.for_each_reduced(modes, &[t], |_, cm| out = Some(cm))?;
        out.ok_or_else(|| Error::param("t", "no sample produced"))
    }

    /// Reduced states of `modes` at every time in `times`.
    pub fn reduced_trace(&self, modes: &[usize], times: &[f64]) -> Result<Vec<CovarianceMatrix>> {
        let mut out = Vec::with_capacity(times.len());
        self.for_each_reduced(modes, times, |_, cm| out.push(cm))?;
        Ok(out)
    }

    /// Calls `visit(k, γ_modes(t_k))` for every time point, in order.
    pub fn for_each_reduced(
        &self,
        modes: &[usize],
        times: &[f64],
        mut visit: impl FnMut(usize, CovarianceMatrix),
    ) -> Result<()> {
        let n = self.n_modes();
        // validates indices
        reduce_to_modes(&self.gamma0, modes)?;
        if let Some(bad) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::param("t", format!("time must be finite, got {bad}")));
        }
        let k = modes.len();
        let o = self.fact.eigvecs();
        let d = self.fact.eigvals();

        let mut quad_rows: Vec<Vec<f64>> = vec![vec![0.0; 2 * n]; 2 * k];
        let mut projected = vec![vec![0.0; 2 * n]; 2 * k];
        for (chunk_idx, chunk) in times.chunks(CHUNK).enumerate() {
            let width = chunk.len();
            // rows of C and of the sine block for each selected mode
            let phases_c = DMatrix::from_fn(n, width, |kk, tau| (d[kk] * chunk[tau]).cos());
            let phases_s = DMatrix::from_fn(n, width, |kk, tau| (d[kk] * chunk[tau]).sin());
            let mut cos_rows = Vec::with_capacity(k);
            let mut sin_rows = Vec::with_capacity(k);
            for &m in modes {
                let weights_c = DMatrix::from_fn(n, width, |kk, tau| o[(m, kk)] * phases_c[(kk, tau)]);
                let weights_s = DMatrix::from_fn(n, width, |kk, tau| o[(m, kk)] * phases_s[(kk, tau)]);
                cos_rows.push(o * weights_c);
                sin_rows.push(o * weights_s);
            }
            for tau in 0..width {
                for (a, _) in modes.iter().enumerate() {
                    let c = cos_rows[a].column(tau);
                    let s = sin_rows[a].column(tau);
                    // x_m(t) = C[m,:] x + S[m,:] p ;  p_m(t) = −S[m,:] x + C[m,:] p
                    let (xr, pr) = quad_rows.split_at_mut(k);
                    let (xrow, prow) = (&mut xr[a], &mut pr[a]);
                    for j in 0..n {
                        xrow[j] = c[j];
                        xrow[n + j] = s[j];
                        prow[j] = -s[j];
                        prow[n + j] = c[j];
                    }
                }
                // γ0 · row, reused for every pair
                for (row, proj) in quad_rows.iter().zip(projected.iter_mut()) {
                    for (i, sparse_row) in self.sparse0.rows.iter().enumerate() {
                        proj[i] = sparse_row.iter().map(|&(j, x)| x * row[j]).sum();
                    }
                }
                let mut block = DMatrix::zeros(2 * k, 2 * k);
                for a in 0..2 * k {
                    for b in a..2 * k {
                        let v: f64 = quad_rows[a].iter().zip(&projected[b]).map(|(x, y)| x * y).sum();
                        block[(a, b)] = v;
                        block[(b, a)] = v;
                    }
                }
                visit(chunk_idx * CHUNK + tau, CovarianceMatrix::from_matrix_unchecked(block));
            }
        }
        Ok(())
    }

    /// `⟨x_m²⟩ + ⟨p_m²⟩` for every mode at time `t`, without forming `γ(t)`.
    pub fn quadrature_sums(&self, t: f64) -> Result<Vec<f64>> {
        let s = build_propagator(&self.fact, t)?;
        let m = s.matrix();
        let n = self.n_modes();
        let mut out = Vec::with_capacity(n);
        for mode in 0..n {
            let xrow: Vec<f64> = m.row(mode).iter().copied().collect();
            let prow: Vec<f64> = m.row(n + mode).iter().copied().collect();
            out.push(self.sparse0.quad_form(&xrow, &xrow) + self.sparse0.quad_form(&prow, &prow));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_w, BathMode, BathStructure, ModelSpec};
    use crate::phase_space::{build_propagator_expm, evolve_cm, hamiltonian_matrix};
    use crate::states::{assemble_initial_state, ProbeState};

    fn small_model() -> ModelSpec {
        let bath = (1..=6).map(|i| BathMode { omega: 2.0 * i as f64, coupling: 0.3 + 0.05 * i as f64 }).collect();
        ModelSpec::new(BathStructure::Model1 { bath }, ProbeState::TwoModeSqueezed { zeta: 2.0 }, 1.0)
    }

    #[test]
    fn batched_blocks_match_dense_evolution() {
        let spec = small_model();
        let w = build_w(&spec).unwrap();
        let g0 = assemble_initial_state(&spec).unwrap();
        let evo = Evolution::new(&w, g0.clone()).unwrap();
        let times: Vec<f64> = (0..1100).map(|k| k as f64 * 0.0173).collect();
        let blocks = evo.reduced_trace(&[0, 1], &times).unwrap();
        let k = hamiltonian_matrix(&w);
        for &idx in &[0usize, 1, 511, 512, 513, 1099] {
            let s = build_propagator_expm(&k, times[idx]).unwrap();
            let full = evolve_cm(&g0, &s).unwrap();
            let reference = reduce_to_modes(&full, &[0, 1]).unwrap();
            let diff = (blocks[idx].matrix() - reference.matrix()).amax();
            assert!(diff < 1e-9, "t={}: {diff}", times[idx]);
        }
    }

    #[test]
    fn quadrature_sums_match_full_state() {
        let spec = small_model();
        let evo = Evolution::new(&build_w(&spec).unwrap(), assemble_initial_state(&spec).unwrap()).unwrap();
        let t = 1.7;
        let full = evo.full_state(t).unwrap();
        let sums = evo.quadrature_sums(t).unwrap();
        for (mode, s) in sums.iter().enumerate() {
            assert!((s - full.quadrature_sum(mode).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = small_model();
        let w = build_w(&spec).unwrap();
        let evo = Evolution::new(&w, assemble_initial_state(&spec).unwrap()).unwrap();
        assert!(evo.reduced_trace(&[0, 8], &[0.0]).is_err());
        assert!(evo.reduced_trace(&[0, 1], &[f64::NAN]).is_err());
        assert!(Evolution::new(&w, CovarianceMatrix::vacuum(2)).is_err());
    }
}
