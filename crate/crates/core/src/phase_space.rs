//! Phase-space representation of Gaussian states and their exact evolution
//! under beam-splitter (number-conserving) quadratic Hamiltonians.
//!
//! Quadratures are stored as `(x_0, …, x_{n-1}, p_0, …, p_{n-1})`. Mode 0 is
//! the ancilla and mode 1 the system; bath and auxiliary modes follow (see
//! [`crate::models`]). Units have ħ = 1 and the vacuum covariance matrix is the
//! identity, i.e. `γ_jk = 2 Re Tr[ρ R_j R_k]` for zero-mean states.
//!
//! With `H = ½ Rᵀ K R` and `K = diag(W, W)` the Heisenberg solution is
//! `R(t) = e^{σKt} R(0)` and `γ(t) = S γ(0) Sᵀ`. Diagonalising `W = O D Oᵀ`
//! gives the propagator in closed form,
//!
//! ```text
//! S(t) = [[ O cos(Dt) Oᵀ,  O sin(Dt) Oᵀ],
//!         [-O sin(Dt) Oᵀ,  O cos(Dt) Oᵀ]]
//! ```
//!
//! which is what every production path uses. [`build_propagator_expm`] keeps a
//! generic matrix exponential around as a cross-check.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance used when accepting user-supplied symmetric matrices.
const SYMMETRY_TOL: f64 = 1e-9;
/// Relative tolerance for matching the `±iν` eigenvalue pairs.
const PAIRING_TOL: f64 = 1e-8;

/// Index map for the global quadrature vector of an `n`-mode system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrdering {
    n_modes: usize,
}

impl QuadratureOrdering {
    pub const ANCILLA: usize = 0;
    pub const SYSTEM: usize = 1;

    pub fn new(n_modes: usize) -> Self {
        Self { n_modes }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Phase-space dimension, `2 · n_modes`.
    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn x(&self, mode: usize) -> usize {
        mode
    }

    pub fn p(&self, mode: usize) -> usize {
        self.n_modes + mode
    }
}

/// The matrix `σ = [[0, I], [-I, 0]]` of the canonical commutators.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm(DMatrix<f64>);

impl SymplecticForm {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn symplectic_form(n_modes: usize) -> Result<SymplecticForm> {
    if n_modes == 0 {
        return Err(Error::param("n_modes", "must be at least 1"));
    }
    let dim = 2 * n_modes;
    let mut sigma = DMatrix::zeros(dim, dim);
    for i in 0..n_modes {
        sigma[(i, n_modes + i)] = 1.0;
        sigma[(n_modes + i, i)] = -1.0;
    }
    Ok(SymplecticForm(sigma))
}

/// A real symmetric covariance matrix in the global quadrature ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    gamma: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps `gamma`, checking shape and symmetry. The stored matrix is
    /// exactly symmetrised.
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = gamma.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 || rows % 2 != 0 {
            return Err(Error::OddDimension(rows));
        }
        let scale = gamma.amax().max(1.0);
        let asym = max_asymmetry(&gamma);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::from_matrix_unchecked(gamma))
    }

    /// Symmetrises without validating; for matrices that are symmetric by
    /// construction up to roundoff.
    pub(crate) fn from_matrix_unchecked(mut gamma: DMatrix<f64>) -> Self {
        symmetrize(&mut gamma);
        Self { gamma }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { gamma: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.gamma
    }

    pub fn n_modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn ordering(&self) -> QuadratureOrdering {
        QuadratureOrdering::new(self.n_modes())
    }

    /// `⟨x_m²⟩ + ⟨p_m²⟩` in this convention (vacuum gives 2).
    pub fn quadrature_sum(&self, mode: usize) -> Result<f64> {
        let n = self.n_modes();
        if mode >= n {
            return Err(Error::ModeOutOfRange { index: mode, n_modes: n });
        }
        Ok(self.gamma[(mode, mode)] + self.gamma[(n + mode, n + mode)])
    }

    pub fn determinant(&self) -> f64 {
        self.gamma.determinant()
    }
}

/// Eigendecomposition `W = O D Oᵀ` of the coupling block.
#[derive(Debug, Clone)]
pub struct SpectralFactorization {
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
}

impl SpectralFactorization {
    pub fn new(w: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = w.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let asym = max_asymmetry(w);
        if asym > SYMMETRY_TOL * w.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let mut sym = w.clone();
        symmetrize(&mut sym);
        let eig = SymmetricEigen::new(sym);
        Ok(Self { eigvecs: eig.eigenvectors, eigvals: eig.eigenvalues })
    }

    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn eigvals(&self) -> &DVector<f64> {
        &self.eigvals
    }

    pub fn n_modes(&self) -> usize {
        self.eigvals.len()
    }

    /// `O f(D) Oᵀ` for a scalar function applied to the eigenvalues.
    pub(crate) fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.eigvecs.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigvals[k]);
        }
        scaled * self.eigvecs.transpose()
    }

    /// `O D Oᵀ`, for checking the factorisation.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply(|d| d)
    }
}

/// The symplectic matrix `S(t) = e^{σKt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    s: DMatrix<f64>,
    t: f64,
}

impl Propagator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `max |S σ Sᵀ − σ|`.
    pub fn symplectic_defect(&self) -> f64 {
        let n = self.s.nrows() / 2;
        let sigma = symplectic_form(n).expect("propagator has at least one mode").into_matrix();
        (&self.s * &sigma * self.s.transpose() - sigma).amax()
    }
}

/// `K = diag(W, W)`.
pub fn hamiltonian_matrix(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let mut k = DMatrix::zeros(2 * n, 2 * n);
    k.view_mut((0, 0), (n, n)).copy_from(w);
    k.view_mut((n, n), (n, n)).copy_from(w);
    k
}

pub fn build_propagator(fact: &SpectralFactorization, t: f64) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::param("t", format!("time must be finite, got {t}")));
    }
    let n = fact.n_modes();
    let c = fact.apply(|d| (d * t).cos());
    let s = fact.apply(|d| (d * t).sin());
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&c);
    m.view_mut((0, n), (n, n)).copy_from(&s);
    m.view_mut((n, 0), (n, n)).copy_from(&(-s));
    m.view_mut((n, n), (n, n)).copy_from(&c);
    Ok(Propagator { s: m, t })
}

/// Reference propagator from a generic scaling-and-squaring matrix
/// exponential of `σKt`. Only used to cross-validate [`build_propagator`].
pub fn build_propagator_expm(k: &DMatrix<f64>, t: f64) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::param("t", format!("time must be finite, got {t}")));
    }
    let (rows, cols) = k.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    let sigma = symplectic_form(rows / 2)?.into_matrix();
    let generator = sigma * k * t;
    Ok(Propagator { s: generator.exp(), t })
}

/// `γ(t) = S γ(0) Sᵀ`, re-symmetrised.
pub fn evolve_cm(gamma0: &CovarianceMatrix, s: &Propagator) -> Result<CovarianceMatrix> {
    let dim = gamma0.gamma.nrows();
    if s.s.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: s.s.nrows() });
    }
    let evolved = &s.s * &gamma0.gamma * s.s.transpose();
    Ok(CovarianceMatrix::from_matrix_unchecked(evolved))
}

/// Partial trace: keeps the listed modes, in the listed order.
pub fn reduce_to_modes(gamma: &CovarianceMatrix, modes: &[usize]) -> Result<CovarianceMatrix> {
    let n = gamma.n_modes();
    let mut seen = vec![false; n];
    for &m in modes {
        if m >= n {
            return Err(Error::ModeOutOfRange { index: m, n_modes: n });
        }
        if seen[m] {
            return Err(Error::DuplicateMode(m));
        }
        seen[m] = true;
    }
    if modes.is_empty() {
        return Err(Error::param("modes", "at least one mode must be selected"));
    }
    let k = modes.len();
    let index: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|&m| n + m)).collect();
    let reduced = DMatrix::from_fn(2 * k, 2 * k, |i, j| gamma.gamma[(index[i], index[j])]);
    Ok(CovarianceMatrix { gamma: reduced })
}

/// Symplectic spectrum `ν_1 ≤ … ≤ ν_n`: the moduli of the eigenvalues of `iσγ`.
///
/// Uses the Cholesky factor `γ = LLᵀ`: `σγ` is similar to the antisymmetric
/// `A = Lᵀσ L`, so `AᵀA` is symmetric with eigenvalues `ν_i²`, each twice.
pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = gamma.n_modes();
    let chol = gamma.gamma.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let sigma = symplectic_form(n)?.into_matrix();
    let a = l.transpose() * sigma * &l;
    let mut ata = a.transpose() * &a;
    symmetrize(&mut ata);
    let mut squares: Vec<f64> = SymmetricEigen::new(ata).eigenvalues.iter().copied().collect();
    squares.sort_by(f64::total_cmp);
    let mut nus = Vec::with_capacity(n);
    for pair in squares.chunks_exact(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let gap = (hi - lo).abs() / hi.abs().max(f64::MIN_POSITIVE);
        if gap > PAIRING_TOL {
            return Err(Error::UnpairedEigenvalues(gap));
        }
        nus.push((0.5 * (lo + hi)).max(0.0).sqrt());
    }
    Ok(nus)
}

/// True iff every symplectic eigenvalue is at least `1 − tol`.
pub fn check_physical(gamma: &CovarianceMatrix, tol: f64) -> bool {
    match symplectic_eigenvalues(gamma) {
        Ok(nus) => nus.first().is_some_and(|&nu| nu >= 1.0 - tol),
        Err(_) => false,
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}
