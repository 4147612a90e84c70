//! Pulse program, pseudo-pure model and noise analysis.

use std::f64::consts::PI;

use aqc_core::adiabatic::{run, Passage, Schedule, STANDARD_STEPS};
use aqc_core::factoring::{clauses_291311, compile, substitute_complements};
use aqc_core::nmr::{
    physical_hamiltonian, pseudo_pure_populations, pulse_program, pulse_program_from_grid,
    run_physical, verify_step_equivalence, PhysicalCouplings, PseudoPureState,
};
use aqc_core::noise::{
    monte_carlo, perturb_program, transverse_scales, trotter_run, EvolutionMode, NoiseModel,
    DEFAULT_SEED,
};
use aqc_core::pauli::to_matrix;
use aqc_core::{Error, PauliAxis, PauliSum, StateVector};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn problem() -> PauliSum {
    compile(
        &substitute_complements(&clauses_291311()).unwrap(),
        &[1.2, 4.9, 4.0],
    )
    .unwrap()
    .hamiltonian
}

fn passage() -> Passage {
    Passage::new(
        &Schedule::standard(),
        &PauliSum::transverse_field(3, 1.0).unwrap(),
        &problem(),
    )
    .unwrap()
}

fn program() -> aqc_core::nmr::PulseProgram {
    pulse_program(&Schedule::standard(), &PhysicalCouplings::default()).unwrap()
}

#[test]
fn slice_formulas() {
    let p = pulse_program_from_grid(&[0.5, 1.0], 0.05, &PhysicalCouplings::default()).unwrap();
    assert!((p.slices[0].amplitude_hz - 40.0).abs() < 1e-12);
    assert_eq!(p.slices[1].amplitude_hz, 0.0);
    assert!((p.slices[1].duration_s - 0.05 / (40.0 * PI)).abs() < 1e-18);
    assert!((p.slices[1].duration_s - 3.978873577e-4).abs() < 1e-12);
}

#[test]
fn standard_program_duration() {
    let p = program();
    assert_eq!(p.slices.len(), STANDARD_STEPS);
    let expected = 0.05 / (40.0 * PI) * 50.5;
    assert!((p.total_duration_s - expected).abs() <= 1e-12 * expected);
    assert!((p.total_duration_s - 0.0201).abs() < 0.05e-3);
    let sum: f64 = p.slices.iter().map(|s| s.duration_s).sum();
    assert!((p.total_duration_s - sum).abs() <= 1e-12 * sum);
}

#[test]
fn ten_slice_duration() {
    let p = pulse_program(
        &Schedule::linear(10, 0.05).unwrap(),
        &PhysicalCouplings::default(),
    )
    .unwrap();
    assert_eq!(p.slices.len(), 10);
    let expected = 0.05 / (40.0 * PI) * 5.5;
    assert!((p.total_duration_s - expected).abs() <= 1e-12 * expected);
}

#[test]
fn amplitudes_fall_and_durations_grow() {
    let p = program();
    for w in p.slices.windows(2) {
        assert!(w[1].amplitude_hz < w[0].amplitude_hz);
        assert!(w[1].duration_s > w[0].duration_s);
    }
    assert!(p.slices[..STANDARD_STEPS - 1]
        .iter()
        .all(|s| s.amplitude_hz > 0.0));
}

#[test]
fn zero_interpolation_is_refused() {
    let err =
        pulse_program_from_grid(&[0.0, 0.5], 0.05, &PhysicalCouplings::default()).unwrap_err();
    assert!(matches!(err, Error::ZeroInterpolation { index: 1 }));
    assert!(err.to_string().contains("state preparation"));
}

#[test]
fn physical_hamiltonian_terms() {
    let c = PhysicalCouplings::default();
    assert_eq!(
        physical_hamiltonian(0.0, &c).unwrap(),
        c.intrinsic_hamiltonian()
    );
    let h = physical_hamiltonian(40.0, &c).unwrap();
    for q in 0..3 {
        assert!((h.coefficient(&[(q, PauliAxis::X)]) - 40.0 * PI).abs() < 1e-12);
    }
    let zz = h.coefficient(&[(0, PauliAxis::Z), (1, PauliAxis::Z)]);
    assert!((zz - 20.0 * PI * 1.2).abs() < 1e-12);
    assert!(physical_hamiltonian(-1.0, &c).is_err());
}

#[test]
fn step_equivalence_is_exact_and_discriminating() {
    let hp = problem();
    assert!(verify_step_equivalence(&program(), &hp).unwrap() <= 1e-12);
    let single = pulse_program_from_grid(&[1.0], 0.05, &PhysicalCouplings::default()).unwrap();
    assert!(verify_step_equivalence(&single, &hp).unwrap() <= 1e-12);
    let mut nu = program().amplitudes();
    nu[49] += 1.0;
    let broken = program().with_amplitudes(&nu).unwrap();
    assert!(verify_step_equivalence(&broken, &hp).unwrap() > 1e-6);
}

#[test]
fn physical_units_reproduce_dimensionless_passage() {
    let engine = run(
        &Schedule::standard(),
        &PauliSum::transverse_field(3, 1.0).unwrap(),
        &problem(),
    )
    .unwrap();
    let physical = run_physical(&program()).unwrap();
    let target = &engine.last().state;
    // Align the global phase on the largest component, then compare amplitudes.
    let k = (0..8)
        .max_by(|&a, &b| {
            target.amplitudes()[a]
                .norm()
                .total_cmp(&target.amplitudes()[b].norm())
        })
        .unwrap();
    let phase = target.amplitudes()[k] / physical.amplitudes()[k];
    let phase = phase / phase.norm();
    for (a, b) in physical.amplitudes().iter().zip(target.amplitudes().iter()) {
        assert!((a * phase - b).norm() <= 1e-9);
    }
}

fn pair_state() -> StateVector {
    let mut v = DVector::zeros(8);
    v[3] = Complex64::new(1.0, 0.0);
    v[4] = Complex64::new(1.0, 0.0);
    StateVector::normalized(v).unwrap()
}

#[test]
fn pseudo_pure_population_model() {
    let pure = pseudo_pure_populations(&PseudoPureState::new(1.0, pair_state()).unwrap());
    assert_eq!(pure, pair_state().populations());
    let mixed = pseudo_pure_populations(&PseudoPureState::new(0.0, pair_state()).unwrap());
    assert!(mixed.iter().all(|p| (p - 0.125).abs() < 1e-15));
    let eps = 1e-5;
    let pp = pseudo_pure_populations(&PseudoPureState::new(eps, pair_state()).unwrap());
    for (i, p) in pp.iter().enumerate() {
        let want = (1.0 - eps) / 8.0 + if i == 3 || i == 4 { eps / 2.0 } else { 0.0 };
        assert!((p - want).abs() < 1e-15);
    }
    assert!((pp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(PseudoPureState::new(1.5, pair_state()).is_err());
}

#[test]
fn pseudo_pure_evolution_matches_density_matrix() {
    let eps = 0.3;
    let psi = aqc_core::adiabatic::initial_state(3).unwrap();
    let h = physical_hamiltonian(17.0, &PhysicalCouplings::default()).unwrap();
    let t = 1.3e-3;
    let model = pseudo_pure_populations(
        &PseudoPureState::new(eps, psi.clone())
            .unwrap()
            .evolve(&h, t)
            .unwrap(),
    );
    // ρ(t) = U ρ U† with U built column by column from basis-state propagation.
    let mut u = DMatrix::<Complex64>::zeros(8, 8);
    for j in 0..8 {
        let col = aqc_core::pauli::propagate(&StateVector::basis(3, j).unwrap(), &h, t).unwrap();
        u.set_column(j, col.amplitudes());
    }
    let a = psi.amplitudes();
    let rho = DMatrix::<Complex64>::identity(8, 8) * Complex64::new((1.0 - eps) / 8.0, 0.0)
        + a * a.adjoint() * Complex64::new(eps, 0.0);
    let evolved = &u * rho * u.adjoint();
    for i in 0..8 {
        assert!((evolved[(i, i)].re - model[i]).abs() < 1e-12);
    }
    assert!(to_matrix(&h).is_ok());
}

#[test]
fn zero_noise_leaves_program_unchanged() {
    let nm = NoiseModel::new(0.0, 7).unwrap();
    let out = perturb_program(&program(), &nm, 3);
    assert_eq!(out.program, program());
    assert_eq!(out.clamped, 0);
    assert!(transverse_scales(&program(), &out.program)
        .iter()
        .all(|&s| s == 1.0));
    assert!(NoiseModel::new(-0.1, 0).is_err());
}

#[test]
fn perturbation_is_keyed_by_seed_and_sample() {
    let nm = NoiseModel::new(0.05, 11).unwrap();
    assert_eq!(
        perturb_program(&program(), &nm, 4),
        perturb_program(&program(), &nm, 4)
    );
    assert_ne!(
        perturb_program(&program(), &nm, 4),
        perturb_program(&program(), &nm, 5)
    );
    let other = NoiseModel::new(0.05, 12).unwrap();
    assert_ne!(
        perturb_program(&program(), &nm, 4),
        perturb_program(&program(), &other, 4)
    );
}

#[test]
fn perturbation_spread_matches_sigma() {
    let nm = NoiseModel::new(0.05, DEFAULT_SEED).unwrap();
    let p = program();
    let l = 9;
    let nominal = p.slices[l].amplitude_hz;
    let draws: Vec<f64> = (0..10_000u64)
        .map(|k| perturb_program(&p, &nm, k).program.slices[l].amplitude_hz)
        .collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    let ratio = var.sqrt() / (0.05 * nominal);
    assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn large_noise_clamps_negative_amplitudes() {
    let nm = NoiseModel::new(2.0, 1).unwrap();
    let out = perturb_program(&program(), &nm, 0);
    assert!(out.clamped > 0);
    assert!(out.program.slices.iter().all(|s| s.amplitude_hz >= 0.0));
}

#[test]
fn noiseless_monte_carlo_is_the_ideal_curve() {
    let p = passage();
    let ideal = p.run().unwrap().fidelities();
    let nm = NoiseModel::new(0.0, DEFAULT_SEED).unwrap();
    for mode in [EvolutionMode::Intrinsic, EvolutionMode::Trotter] {
        let r = monte_carlo(&p, &program(), &nm, 4, mode).unwrap();
        assert!(r.std.iter().all(|&d| d == 0.0), "{:?}", mode);
        assert_eq!(r.final_std, 0.0);
        if mode == EvolutionMode::Intrinsic {
            assert_eq!(r.mean, ideal);
        }
    }
    assert!(monte_carlo(&p, &program(), &nm, 1, EvolutionMode::Intrinsic).is_err());
}

#[test]
fn monte_carlo_is_deterministic() {
    let p = passage();
    let nm = NoiseModel::new(0.05, 5).unwrap();
    let a = monte_carlo(&p, &program(), &nm, 40, EvolutionMode::Intrinsic).unwrap();
    let b = monte_carlo(&p, &program(), &nm, 40, EvolutionMode::Intrinsic).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.table().render(), b.table().render());
}

#[test]
fn final_spread_grows_with_sigma() {
    let p = passage();
    let stds: Vec<f64> = [0.01, 0.05, 0.1]
        .iter()
        .map(|&sigma| {
            let nm = NoiseModel::new(sigma, DEFAULT_SEED).unwrap();
            monte_carlo(&p, &program(), &nm, 500, EvolutionMode::Intrinsic)
                .unwrap()
                .final_std
        })
        .collect();
    assert!(stds.windows(2).all(|w| w[0] <= w[1]), "{stds:?}");
}

#[test]
fn noise_band_covers_ideal_curve() {
    let p = passage();
    let ideal = p.run().unwrap().fidelities();
    let nm = NoiseModel::new(0.05, DEFAULT_SEED).unwrap();
    let r = monte_carlo(&p, &program(), &nm, 500, EvolutionMode::Intrinsic).unwrap();
    assert_eq!(r.mean.len(), STANDARD_STEPS + 1);
    let covered = (0..ideal.len())
        .filter(|&l| (ideal[l] - r.mean[l]).abs() <= r.std[l])
        .count();
    assert!(covered * 10 >= ideal.len() * 9, "{covered}/{}", ideal.len());
    assert!(r.mean.iter().all(|f| (0.0..=1.0).contains(f)));
}

#[test]
fn noiseless_trotter_tracks_the_exact_passage() {
    let p = passage();
    let exact = p.run().unwrap();
    let trace = trotter_run(&p, None).unwrap();
    assert_eq!(trace.records.len(), STANDARD_STEPS);
    for (a, b) in trace
        .final_state
        .populations()
        .iter()
        .zip(&exact.last().populations)
    {
        assert!((a - b).abs() <= 0.01);
    }
    let overlap = trace.final_state.overlap(&exact.last().state).unwrap();
    assert!(overlap >= 0.99, "overlap {overlap}");
    assert!((trace.initial_fidelity - 1.0).abs() < 1e-12);
    assert_eq!(trace.table().rows.len(), 2 * STANDARD_STEPS);
}
