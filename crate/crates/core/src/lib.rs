//! Gaussian open-system dynamics: a two-mode squeezed ancilla–system probe
//! coupled to a discretized harmonic bath, evolved exactly in phase space.
//!
//! Covariance matrices use vacuum = identity and quadrature ordering
//! `(x_0, …, x_{n−1}, p_0, …, p_{n−1})`. Mode 0 is the ancilla, mode 1 the
//! system, then bath modes, then any extra or buffer mode.

pub mod dynamics;
pub mod error;
pub mod measures;
pub mod models;
pub mod oracles;
pub mod phase_space;
pub mod simulate;
pub mod spectral;
pub mod states;

pub use dynamics::Evolution;
pub use error::{Error, Result};
pub use measures::{
    fidelity_nm, gaussian_fidelity_1mode, log_negativity, nmbq, EntanglementTrace, FidelityTrace, OccupancyGrid,
    TimeGrid,
};
pub use models::{build_w, AuxiliaryMode, BathMode, BathStructure, ModelSpec};
pub use phase_space::{CovarianceMatrix, Propagator, QuadratureOrdering};
pub use simulate::{run_simulation, run_sweep, ModelKind, Preset, SimulationConfig, SimulationResult, SweepSpec};
pub use spectral::{discretize, SpectralDensity, SpectralFamily};
pub use states::ProbeState;
