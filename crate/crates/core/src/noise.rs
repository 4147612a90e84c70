//! Robustness of the passage under rf amplitude noise, and the split-propagator
//! (average-Hamiltonian) baseline it is compared against.
//!
//! Each slice amplitude is perturbed independently, `ν' = ν + g` with
//! `g ~ N(0, (σ_rel·ν)²)`. The rf field only drives the `σ_x` terms, so the
//! perturbed slice evolves under `(ν'/ν)(1 − s)·H0 + s·Hp` for `τ`.
//! Random streams are keyed by `(seed, sample index)` and consumed in slice
//! order, so every draw is a fixed function of `(seed, sample, l)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::adiabatic::{initial_state, Passage};
use crate::error::{Error, Result};
use crate::format::{sig12, Table};
use crate::nmr::PulseProgram;
use crate::pauli::{eigendecompose, to_matrix, EigenSystem};
use crate::state::StateVector;

pub const DEFAULT_RELATIVE_SIGMA: f64 = 0.05;
pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SEED: u64 = 291_311;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    relative_sigma: f64,
    seed: u64,
}

impl NoiseModel {
    pub fn new(relative_sigma: f64, seed: u64) -> Result<Self> {
        if !(relative_sigma.is_finite() && relative_sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "relative sigma {relative_sigma} must be non-negative"
            )));
        }
        Ok(Self {
            relative_sigma,
            seed,
        })
    }

    pub fn relative_sigma(&self) -> f64 {
        self.relative_sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// A perturbed program and how many amplitudes had to be clamped at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedProgram {
    pub program: PulseProgram,
    pub clamped: usize,
}

pub fn perturb_program(
    program: &PulseProgram,
    noise: &NoiseModel,
    sample: u64,
) -> PerturbedProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(sample);
    let mut out = program.clone();
    let mut clamped = 0;
    for slice in &mut out.slices {
        let g: f64 = StandardNormal.sample(&mut rng);
        let nu = slice.amplitude_hz + noise.relative_sigma * slice.amplitude_hz * g;
        slice.amplitude_hz = if nu < 0.0 {
            clamped += 1;
            0.0
        } else {
            nu
        };
    }
    PerturbedProgram {
        program: out,
        clamped,
    }
}

/// `ν'_l / ν_l`, or 1 where the nominal amplitude is zero.
pub fn transverse_scales(nominal: &PulseProgram, perturbed: &PulseProgram) -> Vec<f64> {
    nominal
        .slices
        .iter()
        .zip(&perturbed.slices)
        .map(|(a, b)| {
            if a.amplitude_hz == 0.0 {
                1.0
            } else {
                b.amplitude_hz / a.amplitude_hz
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMode {
    /// One exact propagator per slice under the full step Hamiltonian.
    Intrinsic,
    /// Transverse factor then coupling factor per slice.
    Trotter,
}

impl EvolutionMode {
    pub fn label(self) -> &'static str {
        match self {
            EvolutionMode::Intrinsic => "intrinsic",
            EvolutionMode::Trotter => "trotter",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub mode: EvolutionMode,
    pub samples: usize,
    pub seed: u64,
    pub relative_sigma: f64,
    /// `0, s_1, …, s_L`.
    pub s_values: Vec<f64>,
    /// Mean ground-subspace fidelity `F_l` for `l = 0..=L`.
    pub mean: Vec<f64>,
    /// Sample standard deviation `Δ_l` for `l = 0..=L`.
    pub std: Vec<f64>,
    pub final_std: f64,
    pub clamp_count: usize,
}

impl MonteCarloReport {
    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("non-empty report")
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["l", "s", "mean_fidelity", "std_fidelity"]).comment(format!(
            "{} passage under Gaussian rf amplitude noise; fidelity against the ideal instantaneous ground subspace",
            self.mode.label()
        ));
        for (l, ((s, m), d)) in self
            .s_values
            .iter()
            .zip(&self.mean)
            .zip(&self.std)
            .enumerate()
        {
            t.push(vec![l.to_string(), sig12(*s), sig12(*m), sig12(*d)]);
        }
        t.summary("mode", self.mode.label());
        t.summary("final_std", sig12(self.final_std));
        t.summary("final_mean", sig12(self.final_mean()));
        t.summary("clamp_count", self.clamp_count.to_string());
        t.summary("seed", self.seed.to_string());
        t.summary("samples", self.samples.to_string());
        t.summary("relative_sigma", sig12(self.relative_sigma));
        t
    }
}

/// Welford's update in slice order; identical inputs give an exact mean and zero spread.
fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    (mean, (m2 / (values.len() - 1) as f64).sqrt())
}

/// Per-step fidelity statistics over `samples` perturbed programs.
pub fn monte_carlo(
    passage: &Passage,
    program: &PulseProgram,
    noise: &NoiseModel,
    samples: usize,
    mode: EvolutionMode,
) -> Result<MonteCarloReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "at least 2 samples are required".into(),
        ));
    }
    if program.slices.len() != passage.schedule().steps() {
        return Err(Error::DimensionMismatch {
            expected: passage.schedule().steps(),
            found: program.slices.len(),
        });
    }
    let splitter = match mode {
        EvolutionMode::Trotter => Some(Splitter::new(passage)?),
        EvolutionMode::Intrinsic => None,
    };
    let runs = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let perturbed = perturb_program(program, noise, k);
            let scales = transverse_scales(program, &perturbed.program);
            let fidelities = match &splitter {
                None => passage.run_scaled(&scales)?.fidelities(),
                Some(sp) => {
                    let trace = sp.run(passage, Some(&scales))?;
                    std::iter::once(trace.initial_fidelity)
                        .chain(trace.records.iter().map(|r| r.after_coupling))
                        .collect()
                }
            };
            Ok((fidelities, perturbed.clamped))
        })
        .collect::<Result<Vec<_>>>()?;

    let steps = passage.schedule().steps() + 1;
    let mut mean = Vec::with_capacity(steps);
    let mut std = Vec::with_capacity(steps);
    let mut column = vec![0.0; samples];
    for l in 0..steps {
        for (slot, (f, _)) in column.iter_mut().zip(&runs) {
            *slot = f[l];
        }
        let (m, d) = mean_and_std(&column);
        mean.push(m);
        std.push(d);
    }
    Ok(MonteCarloReport {
        mode,
        samples,
        seed: noise.seed,
        relative_sigma: noise.relative_sigma,
        s_values: std::iter::once(0.0)
            .chain(passage.schedule().s_values().iter().copied())
            .collect(),
        final_std: *std.last().expect("at least one step"),
        mean,
        std,
        clamp_count: runs.iter().map(|(_, c)| c).sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterRecord {
    pub step: usize,
    pub s: f64,
    /// Fidelity with the ground subspace of `H(s_l)` after the transverse factor.
    pub after_transverse: f64,
    /// Same, after the coupling factor completes the step.
    pub after_coupling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterTrace {
    pub initial_fidelity: f64,
    pub records: Vec<TrotterRecord>,
    pub final_state: StateVector,
}

impl TrotterTrace {
    /// Smallest fidelity over all sub-step records.
    pub fn min_fidelity(&self) -> f64 {
        self.records
            .iter()
            .flat_map(|r| [r.after_transverse, r.after_coupling])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["l", "s", "substep", "fidelity"]).comment(
            "first-order split passage; fidelity against the ground subspace of H(s_l) after each factor",
        );
        for r in &self.records {
            t.push(vec![
                r.step.to_string(),
                sig12(r.s),
                "transverse".into(),
                sig12(r.after_transverse),
            ]);
            t.push(vec![
                r.step.to_string(),
                sig12(r.s),
                "coupling".into(),
                sig12(r.after_coupling),
            ]);
        }
        t.summary("min_fidelity", sig12(self.min_fidelity()));
        t
    }
}

/// Cached eigensystems of `H0` and `Hp` for split propagation.
struct Splitter {
    h0: EigenSystem,
    hp: EigenSystem,
}

impl Splitter {
    fn new(passage: &Passage) -> Result<Self> {
        Ok(Self {
            h0: eigendecompose(&to_matrix(passage.h0())?)?,
            hp: eigendecompose(&to_matrix(passage.hp())?)?,
        })
    }

    fn run(&self, passage: &Passage, scales: Option<&[f64]>) -> Result<TrotterTrace> {
        let schedule = passage.schedule();
        if let Some(sc) = scales {
            if sc.len() != schedule.steps() {
                return Err(Error::DimensionMismatch {
                    expected: schedule.steps(),
                    found: sc.len(),
                });
            }
        }
        let tau = schedule.tau();
        let mut state = initial_state(passage.qubit_count())?;
        let initial_fidelity = passage.measure(0, &state)?.0;
        let mut records = Vec::with_capacity(schedule.steps());
        for (i, &s) in schedule.s_values().iter().enumerate() {
            let l = i + 1;
            let r = scales.map_or(1.0, |sc| sc[i]);
            state = self.h0.propagate(&state, (1.0 - s) * r * tau)?;
            let after_transverse = passage.measure(l, &state)?.0;
            state = self.hp.propagate(&state, s * tau)?;
            let after_coupling = passage.measure(l, &state)?.0;
            records.push(TrotterRecord {
                step: l,
                s,
                after_transverse,
                after_coupling,
            });
        }
        Ok(TrotterTrace {
            initial_fidelity,
            records,
            final_state: state,
        })
    }
}

/// Step `l` applies `exp(−i·s_l·Hp·τ) · exp(−i·r_l·(1 − s_l)·H0·τ)` with `r_l = 1` when `scales` is `None`.
pub fn trotter_run(passage: &Passage, scales: Option<&[f64]>) -> Result<TrotterTrace> {
    Splitter::new(passage)?.run(passage, scales)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::Schedule;
    use crate::nmr::{pulse_program, PhysicalCouplings};
    use crate::pauli::{PauliAxis, PauliSum, PauliTerm};

    fn passage(steps: usize) -> Passage {
        let zz = |a, b, c| PauliTerm::new(c, [(a, PauliAxis::Z), (b, PauliAxis::Z)], 3).unwrap();
        let hp = PauliSum::from_terms(3, [zz(0, 1, 0.6), zz(1, 2, -2.45), zz(0, 2, 2.0)]).unwrap();
        let h0 = PauliSum::transverse_field(3, 1.0).unwrap();
        Passage::new(&Schedule::linear(steps, 0.05).unwrap(), &h0, &hp).unwrap()
    }

    #[test]
    fn zero_noise_is_identity() {
        let program = pulse_program(&Schedule::standard(), &PhysicalCouplings::default()).unwrap();
        let noise = NoiseModel::new(0.0, 7).unwrap();
        assert_eq!(perturb_program(&program, &noise, 3).program, program);
    }

    #[test]
    fn perturbation_is_keyed_by_seed_and_sample() {
        let program = pulse_program(&Schedule::standard(), &PhysicalCouplings::default()).unwrap();
        let noise = NoiseModel::new(0.05, 7).unwrap();
        let a = perturb_program(&program, &noise, 3);
        assert_eq!(a, perturb_program(&program, &noise, 3));
        assert_ne!(a.program, perturb_program(&program, &noise, 4).program);
        let other_seed = NoiseModel::new(0.05, 8).unwrap();
        assert_ne!(a.program, perturb_program(&program, &other_seed, 3).program);
    }

    #[test]
    fn large_noise_clamps() {
        let program = pulse_program(&Schedule::standard(), &PhysicalCouplings::default()).unwrap();
        let noise = NoiseModel::new(2.0, 1).unwrap();
        let p = perturb_program(&program, &noise, 0);
        assert!(p.clamped > 0);
        assert!(p.program.slices.iter().all(|s| s.amplitude_hz >= 0.0));
        assert!(NoiseModel::new(-0.1, 0).is_err());
    }

    #[test]
    fn zero_sigma_report_has_no_spread() {
        let pas = passage(20);
        let program = pulse_program(pas.schedule(), &PhysicalCouplings::default()).unwrap();
        let noise = NoiseModel::new(0.0, 1).unwrap();
        let ideal = pas.run().unwrap().fidelities();
        for mode in [EvolutionMode::Intrinsic, EvolutionMode::Trotter] {
            let r = monte_carlo(&pas, &program, &noise, 4, mode).unwrap();
            assert!(r.std.iter().all(|d| *d == 0.0));
            assert_eq!(r.final_std, 0.0);
            if mode == EvolutionMode::Intrinsic {
                assert_eq!(r.mean, ideal);
            }
        }
    }

    #[test]
    fn sample_count_guard() {
        let pas = passage(5);
        let program = pulse_program(pas.schedule(), &PhysicalCouplings::default()).unwrap();
        let noise = NoiseModel::new(0.05, 1).unwrap();
        assert!(monte_carlo(&pas, &program, &noise, 1, EvolutionMode::Intrinsic).is_err());
    }

    #[test]
    fn trotter_trace_shape() {
        let pas = passage(10);
        let t = trotter_run(&pas, None).unwrap();
        assert_eq!(t.records.len(), 10);
        assert_eq!(t.table().rows.len(), 20);
        assert!(trotter_run(&pas, Some(&[1.0; 3])).is_err());
    }
}
