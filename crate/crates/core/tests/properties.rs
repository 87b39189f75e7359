use nalgebra::DMatrix;
use oscbath::dynamics::Evolution;
use oscbath::measures::{
    fidelity_nm, gaussian_fidelity_1mode, log_negativity, nmbq, total_energy, two_mode_min_symplectic_eigenvalue,
    EntanglementTrace, FidelityTrace, TimeGrid,
};
use oscbath::models::{build_w, AuxiliaryMode, BathMode, BathStructure, ModelSpec};
use oscbath::phase_space::{
    build_propagator, build_propagator_expm, hamiltonian_matrix, CovarianceMatrix, SpectralFactorization,
};
use oscbath::states::{assemble_initial_state, single_mode_squeezed_cm, thermal_cm, ProbeState, ThermalSpec};
use proptest::prelude::*;

/// Symmetric coupling block: frequencies on the diagonal, weak couplings off it.
fn coupling_block(max_modes: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (2..=max_modes).prop_flat_map(|n| {
        (prop::collection::vec(0.5..12.0f64, n), prop::collection::vec(-1.0..1.0f64, n * (n - 1) / 2)).prop_map(
            move |(diag, off)| {
                let mut w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        w[(i, j)] = off[k];
                        w[(j, i)] = off[k];
                        k += 1;
                    }
                }
                w
            },
        )
    })
}

fn bath_strategy() -> impl Strategy<Value = Vec<BathMode>> {
    prop::collection::vec((0.5..30.0f64, 0.0..1.5f64), 1..8)
        .prop_map(|v| v.into_iter().map(|(omega, coupling)| BathMode { omega, coupling }).collect())
}

fn model_strategy() -> impl Strategy<Value = ModelSpec> {
    (bath_strategy(), 0..3usize, 0.0..4.0f64, 0.2..3.0f64).prop_map(|(bath, kind, zeta, temperature)| {
        let aux = AuxiliaryMode::resonant(10.0);
        let structure = match kind {
            0 => BathStructure::Model1 { bath },
            1 => BathStructure::Model2 { bath, extra: aux },
            _ => BathStructure::Model3 { bath, buffer: aux },
        };
        ModelSpec::new(structure, ProbeState::TwoModeSqueezed { zeta }, temperature)
    })
}

fn sigma_defect(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let sigma = oscbath::phase_space::symplectic_form(n).unwrap().into_matrix();
    (s * &sigma * s.transpose() - sigma).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagators_are_symplectic(w in coupling_block(7), t in -20.0..20.0f64) {
        let s = build_propagator(&SpectralFactorization::new(&w).unwrap(), t).unwrap();
        prop_assert!(sigma_defect(s.matrix()) <= 1e-10);
        prop_assert!(s.symplectic_defect() <= 1e-10);
    }

    #[test]
    fn propagators_form_a_one_parameter_group(w in coupling_block(5), t1 in -5.0..5.0f64, t2 in -5.0..5.0f64) {
        let f = SpectralFactorization::new(&w).unwrap();
        let s1 = build_propagator(&f, t1).unwrap();
        let s2 = build_propagator(&f, t2).unwrap();
        let s12 = build_propagator(&f, t1 + t2).unwrap();
        prop_assert!((s1.matrix() * s2.matrix() - s12.matrix()).amax() <= 1e-9);
        let back = build_propagator(&f, -t1).unwrap();
        prop_assert!((s1.matrix() * back.matrix() - DMatrix::identity(w.nrows() * 2, w.nrows() * 2)).amax() <= 1e-10);
    }

    #[test]
    fn spectral_path_matches_matrix_exponential(w in coupling_block(5), t in 0.0..3.0f64) {
        let fast = build_propagator(&SpectralFactorization::new(&w).unwrap(), t).unwrap();
        let slow = build_propagator_expm(&hamiltonian_matrix(&w), t).unwrap();
        prop_assert!((fast.matrix() - slow.matrix()).amax() <= 1e-8);
    }

    #[test]
    fn evolved_states_stay_physical_and_conserve_energy(spec in model_strategy(), t in 0.0..20.0f64) {
        let w = build_w(&spec).unwrap();
        let g0 = assemble_initial_state(&spec).unwrap();
        let e0 = total_energy(&g0, &w).unwrap();
        let evo = Evolution::new(&w, g0).unwrap();
        let full = evo.full_state(t).unwrap();
        let e = total_energy(&full, &w).unwrap();
        prop_assert!(((e - e0) / e0).abs() <= 1e-8);
        let nus = oscbath::phase_space::symplectic_eigenvalues(&full).unwrap();
        prop_assert!(nus[0] >= 1.0 - 1e-9, "{:?}", nus);
        let block = evo.reduced_state(&[0, 1], t).unwrap();
        prop_assert!(two_mode_min_symplectic_eigenvalue(&block).unwrap() >= 1.0 - 1e-9);
        prop_assert!(log_negativity(&block).unwrap() >= 0.0);
    }

    #[test]
    fn zero_coupling_keeps_entanglement_constant(freqs in prop::collection::vec(0.5..30.0f64, 1..6), zeta in 0.0..4.0f64) {
        let bath = freqs.into_iter().map(|omega| BathMode { omega, coupling: 0.0 }).collect();
        let spec = ModelSpec::new(BathStructure::Model1 { bath }, ProbeState::TwoModeSqueezed { zeta }, 1.0);
        let evo = Evolution::new(&build_w(&spec).unwrap(), assemble_initial_state(&spec).unwrap()).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 0.01).unwrap();
        let values: Vec<f64> = evo
            .reduced_trace(&[0, 1], &grid.times())
            .unwrap()
            .iter()
            .map(|b| log_negativity(b).unwrap())
            .collect();
        for v in &values {
            prop_assert!((v - values[0]).abs() <= 1e-10);
        }
        let trace = EntanglementTrace::new(grid, values).unwrap();
        prop_assert!(nmbq(&trace) <= 1e-6);
    }

    #[test]
    fn nmbq_equals_the_telescoped_form(values in prop::collection::vec(0.0..6.0f64, 2..200)) {
        let grid = TimeGrid::new(0.0, (values.len() - 1) as f64, 1.0).unwrap();
        let direct = values[values.len() - 1] - values[0]
            + values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
        let q = nmbq(&EntanglementTrace::new(grid, values).unwrap());
        prop_assert!(q >= 0.0);
        prop_assert!((q - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn nmbq_vanishes_on_non_increasing_traces(mut values in prop::collection::vec(0.0..6.0f64, 1..100)) {
        values.sort_by(|a, b| b.total_cmp(a));
        let grid = TimeGrid::new(0.0, (values.len() - 1) as f64, 1.0).unwrap();
        prop_assert_eq!(nmbq(&EntanglementTrace::new(grid, values).unwrap()), 0.0);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(
        r1 in 0.0..3.0f64, p1 in 0.0..6.3f64, r2 in 0.0..3.0f64, p2 in 0.0..6.3f64, w in 0.2..20.0f64,
    ) {
        let a = single_mode_squeezed_cm(r1, p1).unwrap();
        let b = single_mode_squeezed_cm(r2, p2).unwrap();
        let th = thermal_cm(ThermalSpec { omega: w, temperature: 1.0 }).unwrap();
        for (x, y) in [(&a, &b), (&a, &th), (&th, &b)] {
            let f = gaussian_fidelity_1mode(x, y).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!((f - gaussian_fidelity_1mode(y, x).unwrap()).abs() <= 1e-12);
        }
        for x in [&a, &b, &th] {
            prop_assert!((gaussian_fidelity_1mode(x, x).unwrap() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn uncoupled_fidelity_is_constant(r1 in 0.0..3.0f64, r2 in 0.0..3.0f64, p in 0.0..3.0f64) {
        let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.037).collect();
        let evolve = |r: f64, phase: f64| -> Vec<CovarianceMatrix> {
            let spec = ModelSpec::new(
                BathStructure::SingleMode { omega_r: 15.0, g: 0.0 },
                ProbeState::SingleModeSqueezed { r, phase },
                1.0,
            );
            Evolution::new(&build_w(&spec).unwrap(), assemble_initial_state(&spec).unwrap())
                .unwrap()
                .reduced_trace(&[1], &times)
                .unwrap()
        };
        let (a, b) = (evolve(r1, 0.0), evolve(r2, p));
        let f0 = gaussian_fidelity_1mode(&a[0], &b[0]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((gaussian_fidelity_1mode(x, y).unwrap() - f0).abs() <= 1e-10);
        }
    }

    #[test]
    fn fidelity_nm_counts_decreases(values in prop::collection::vec(0.0..1.0f64, 2..100)) {
        let grid = TimeGrid::new(0.0, (values.len() - 1) as f64, 1.0).unwrap();
        let expected: f64 = values.windows(2).map(|w| (w[0] - w[1]).max(0.0)).sum();
        let trace = FidelityTrace::new(grid, values).unwrap();
        prop_assert!((fidelity_nm(&trace) - expected).abs() <= 1e-12);
    }
}
