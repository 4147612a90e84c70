//! Invariants of the piecewise-constant passage for the 291311 instance.

use aqc_core::adiabatic::{
    flip_leakage, flip_sector_weight, ground_subspace_fidelity, initial_state, interpolate,
    linear_grid, run, sector_gaps, spectrum, Passage, Schedule, STANDARD_STEPS, STANDARD_TAU,
};
use aqc_core::factoring::{clauses_291311, compile, substitute_complements};
use aqc_core::pauli::{eigendecompose, to_matrix};
use aqc_core::{PauliAxis, PauliSum, StateVector};
use nalgebra::DVector;
use num_complex::Complex64;

fn problem() -> PauliSum {
    compile(
        &substitute_complements(&clauses_291311()).unwrap(),
        &[1.2, 4.9, 4.0],
    )
    .unwrap()
    .hamiltonian
}

fn driver() -> PauliSum {
    PauliSum::transverse_field(3, 1.0).unwrap()
}

fn basis_pair(sign: f64) -> StateVector {
    let mut v = DVector::zeros(8);
    v[3] = Complex64::new(1.0, 0.0);
    v[4] = Complex64::new(sign, 0.0);
    StateVector::normalized(v).unwrap()
}

#[test]
fn interpolation_endpoints_and_midpoint() {
    let (h0, hp) = (driver(), problem());
    assert_eq!(interpolate(0.0, &h0, &hp).unwrap(), h0);
    assert_eq!(interpolate(1.0, &h0, &hp).unwrap(), hp);
    let mid = interpolate(0.5, &h0, &hp).unwrap();
    for q in 0..3 {
        assert_eq!(mid.coefficient(&[(q, PauliAxis::X)]), 0.5);
    }
    let zz = |i, j| mid.coefficient(&[(i, PauliAxis::Z), (j, PauliAxis::Z)]);
    assert!((zz(0, 1) - 0.3).abs() < 1e-15);
    assert!((zz(1, 2) + 1.225).abs() < 1e-15);
    assert!((zz(0, 2) - 1.0).abs() < 1e-15);
    assert!(interpolate(1.5, &h0, &hp).is_err());
}

#[test]
fn initial_state_is_uniform_driver_ground_state() {
    let one = initial_state(1).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((one.amplitudes()[0].re - r).abs() < 1e-15);
    assert!((one.amplitudes()[1].re + r).abs() < 1e-15);
    let psi = initial_state(3).unwrap();
    assert!(psi.populations().iter().all(|p| (p - 0.125).abs() < 1e-15));
    let e = to_matrix(&driver()).unwrap().expectation(&psi).unwrap();
    assert!((e + 3.0).abs() < 1e-12);
}

#[test]
fn subspace_fidelity_edge_cases() {
    let hp = problem();
    assert!((ground_subspace_fidelity(&basis_pair(1.0), &hp, 1e-9).unwrap() - 1.0).abs() < 1e-12);
    assert!((ground_subspace_fidelity(&basis_pair(-1.0), &hp, 1e-9).unwrap() - 1.0).abs() < 1e-12);
    let off = StateVector::basis(3, 0).unwrap();
    assert!(ground_subspace_fidelity(&off, &hp, 1e-9).unwrap() < 1e-24);
    let psi = initial_state(3).unwrap();
    assert!((ground_subspace_fidelity(&psi, &driver(), 1e-9).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn standard_passage_norm_symmetry_and_early_fidelity() {
    let traj = run(&Schedule::standard(), &driver(), &problem()).unwrap();
    assert_eq!(traj.records.len(), STANDARD_STEPS + 1);
    for r in &traj.records {
        assert!((r.state.norm() - 1.0).abs() < 1e-9);
        assert!((r.populations.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (p, a) in r.populations.iter().zip(r.state.amplitudes().iter()) {
            assert!((p - a.norm_sqr()).abs() < 1e-12);
        }
        assert!(
            flip_leakage(&r.state) <= 1e-9,
            "step {} leaks {}",
            r.step,
            flip_leakage(&r.state)
        );
    }
    assert!((traj.initial().ground_fidelity - 1.0).abs() < 1e-12);
    assert!(traj.records[1].ground_fidelity > 0.99);
    let last = &traj.last().populations;
    assert!((last[3] - last[4]).abs() <= 1e-9);
    assert!(last[3] > 0.45 && last[4] > 0.45);
    for (i, p) in last.iter().enumerate() {
        if i != 3 && i != 4 {
            assert!(*p <= 0.02, "population {i} = {p}");
        }
    }
    // For three qubits the evolving state sits in the −1 flip sector.
    assert!((flip_sector_weight(&traj.last().state, -1.0) - 1.0).abs() < 1e-9);
}

#[test]
fn minimum_fidelity_regression_pin() {
    let traj = run(&Schedule::standard(), &driver(), &problem()).unwrap();
    assert!((traj.min_fidelity() - 0.974535402406).abs() < 1e-9);
}

#[test]
fn sudden_quench_leaves_uniform_populations() {
    // One step at s = 1 only dephases, so the ground weight stays at 2/8.
    let traj = run(
        &Schedule::linear(1, STANDARD_TAU).unwrap(),
        &driver(),
        &problem(),
    )
    .unwrap();
    assert!((traj.last().ground_fidelity - 0.25).abs() < 1e-12);
    assert!(traj.min_fidelity() < 0.5);
}

#[test]
fn longer_steps_never_lower_minimum_fidelity() {
    let mins: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&tau| {
            run(&Schedule::linear(100, tau).unwrap(), &driver(), &problem())
                .unwrap()
                .min_fidelity()
        })
        .collect();
    assert!(mins.windows(2).all(|w| w[0] <= w[1]), "{mins:?}");
    let pins = [0.974535402406, 0.991183045231, 0.997783962356];
    for (got, want) in mins.iter().zip(pins) {
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn stage_subsample_hits_tenths() {
    let traj = run(&Schedule::standard(), &driver(), &problem()).unwrap();
    let stages = traj.stages(11);
    assert_eq!(stages.len(), 11);
    for (k, r) in stages.iter().enumerate() {
        assert!((r.s - k as f64 / 10.0).abs() < 1e-12);
        assert_eq!(r.step, 10 * k);
    }
    assert_eq!(traj.stage_table().rows.len(), 11);
}

#[test]
fn spectrum_endpoints_match_oracles() {
    let grid = linear_grid(101).unwrap();
    let curve = spectrum(&driver(), &problem(), &grid).unwrap();
    let mut start: Vec<f64> = (0..8u32)
        .map(|b| 3.0 - 2.0 * b.count_ones() as f64)
        .collect();
    start.sort_by(f64::total_cmp);
    let hp = problem();
    let mut end: Vec<f64> = (0..8).map(|i| hp.diagonal_energy(i).unwrap()).collect();
    end.sort_by(f64::total_cmp);
    for (got, want) in curve.levels[0].iter().zip(&start) {
        assert!((got - want).abs() < 1e-10);
    }
    for (got, want) in curve.levels[100].iter().zip(&end) {
        assert!((got - want).abs() < 1e-10);
    }
    assert_eq!(linear_grid(2).unwrap(), [0.0, 1.0]);
    assert!(linear_grid(1).is_err());
}

#[test]
fn spectrum_levels_are_lipschitz_in_s() {
    let (h0, hp) = (driver(), problem());
    let grid = linear_grid(101).unwrap();
    let curve = spectrum(&h0, &hp, &grid).unwrap();
    // Weyl: |λ_k(s) − λ_k(s')| ≤ |s − s'|·‖Hp − H0‖₂.
    let diff = to_matrix(&hp.plus(&h0.scaled(-1.0)).unwrap()).unwrap();
    let es = eigendecompose(&diff).unwrap();
    let bound = es.eigenvalues().iter().map(|e| e.abs()).fold(0.0, f64::max);
    for w in 0..grid.len() - 1 {
        let ds = grid[w + 1] - grid[w];
        for k in 0..8 {
            assert!((curve.levels[w + 1][k] - curve.levels[w][k]).abs() <= ds * bound + 1e-12);
        }
    }
}

#[test]
fn sector_gap_stays_open() {
    let gaps = sector_gaps(&driver(), &problem(), &linear_grid(101).unwrap()).unwrap();
    let (at, min) =
        gaps.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &g)| if g < acc.1 { (i, g) } else { acc },
        );
    assert!(min > 0.0);
    assert_eq!(at, 36);
    assert!((min - 2.375902733986).abs() < 1e-9);
}

#[test]
fn passage_is_deterministic() {
    let a = run(&Schedule::standard(), &driver(), &problem()).unwrap();
    let b = run(&Schedule::standard(), &driver(), &problem()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unit_scaling_reproduces_ideal_passage() {
    let passage = Passage::new(&Schedule::standard(), &driver(), &problem()).unwrap();
    assert_eq!(
        passage.run_scaled(&[1.0; STANDARD_STEPS]).unwrap(),
        passage.run().unwrap()
    );
    assert!(passage.run_scaled(&[1.0; 3]).is_err());
}

#[test]
fn invalid_schedules_are_rejected() {
    assert!(Schedule::linear(0, 0.05).is_err());
    assert!(Schedule::linear(10, 0.0).is_err());
    assert!(Schedule::linear(10, f64::NAN).is_err());
    let s = Schedule::linear(4, 0.5).unwrap();
    assert_eq!(s.s_values(), &[0.25, 0.5, 0.75, 1.0]);
    assert_eq!(s.total_time(), 2.0);
}

#[test]
fn mismatched_hamiltonians_are_rejected() {
    assert!(Passage::new(
        &Schedule::standard(),
        &PauliSum::transverse_field(2, 1.0).unwrap(),
        &problem()
    )
    .is_err());
}
