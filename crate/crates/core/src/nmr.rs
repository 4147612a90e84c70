//! Mapping of the dimensionless passage onto a three-spin NMR processor.
//!
//! On resonance, with the same rf amplitude `ν` (Hz) on all three spins, the
//! spins evolve under
//!
//!   H_phys(ν) = π·ν·Σ_j σ_x^j + Σ_{j<k} (π/2)·J_jk·σ_z^j σ_z^k      [rad/s].
//!
//! With `J = 40 Hz × (α, −β, γ)` this equals `(40π/s)·H(s)` whenever
//! `ν = 40·(1 − s)/s`, so holding it for `t = τ·s/(40π)` seconds reproduces
//! one dimensionless step `exp(−i·τ·H(s))` exactly.

use std::f64::consts::PI;

use serde::Serialize;

use crate::adiabatic::{initial_state, interpolate, Schedule};
use crate::error::{Error, Result};
use crate::format::{sig12, Table};
use crate::pauli::{eigendecompose, propagate, to_matrix, PauliAxis, PauliSum, PauliTerm};
use crate::state::StateVector;

/// Coupling unit relating the molecule's J table to the ELM weights.
pub const COUPLING_SCALE_HZ: f64 = 40.0;

/// Default pseudo-pure polarization.
pub const DEFAULT_POLARIZATION: f64 = 1e-5;

const SPINS: usize = 3;

/// Scalar couplings in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalCouplings {
    pub j12: f64,
    pub j23: f64,
    pub j13: f64,
}

impl Default for PhysicalCouplings {
    /// 40 Hz × (1.2, −4.9, 4).
    fn default() -> Self {
        Self {
            j12: 48.0,
            j23: -196.0,
            j13: 160.0,
        }
    }
}

impl PhysicalCouplings {
    /// Σ (π/2)·J_jk·σ_z^j σ_z^k in rad/s.
    pub fn intrinsic_hamiltonian(&self) -> PauliSum {
        let zz = |a: usize, b: usize, j: f64| {
            PauliTerm::new(PI / 2.0 * j, [(a, PauliAxis::Z), (b, PauliAxis::Z)], SPINS)
                .expect("valid term")
        };
        PauliSum::from_terms(
            SPINS,
            [zz(0, 1, self.j12), zz(1, 2, self.j23), zz(0, 2, self.j13)],
        )
        .expect("three-qubit sum")
    }
}

/// `π·ν·Σ σ_x + intrinsic couplings`, in rad/s.
pub fn physical_hamiltonian(nu_hz: f64, couplings: &PhysicalCouplings) -> Result<PauliSum> {
    if !(nu_hz.is_finite() && nu_hz >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rf amplitude {nu_hz} Hz must be non-negative"
        )));
    }
    PauliSum::transverse_field(SPINS, PI * nu_hz)?.plus(&couplings.intrinsic_hamiltonian())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSlice {
    pub index: usize,
    pub s: f64,
    pub amplitude_hz: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseProgram {
    pub tau: f64,
    pub slices: Vec<PulseSlice>,
    pub couplings: PhysicalCouplings,
    pub total_duration_s: f64,
}

impl PulseProgram {
    pub fn amplitudes(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.amplitude_hz).collect()
    }

    /// Same program with new amplitudes; durations are unchanged.
    pub fn with_amplitudes(&self, amplitudes: &[f64]) -> Result<Self> {
        if amplitudes.len() != self.slices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.slices.len(),
                found: amplitudes.len(),
            });
        }
        let mut out = self.clone();
        for (slice, &a) in out.slices.iter_mut().zip(amplitudes) {
            slice.amplitude_hz = a;
        }
        Ok(out)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["l", "s", "nu_hz", "t_s"])
            .comment("rf pulse program: amplitude nu in Hz applied to all three spins, duration t in seconds");
        for s in &self.slices {
            t.push(vec![
                s.index.to_string(),
                sig12(s.s),
                sig12(s.amplitude_hz),
                sig12(s.duration_s),
            ]);
        }
        t.summary("total_duration_s", sig12(self.total_duration_s));
        t
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Slices `ν_l = 40·(1 − s_l)/s_l` Hz, `t_l = τ·s_l/(40π)` s.
pub fn pulse_program(schedule: &Schedule, couplings: &PhysicalCouplings) -> Result<PulseProgram> {
    pulse_program_from_grid(schedule.s_values(), schedule.tau(), couplings)
}

/// As [`pulse_program`] for an explicit grid of interpolation values.
pub fn pulse_program_from_grid(
    s_values: &[f64],
    tau: f64,
    couplings: &PhysicalCouplings,
) -> Result<PulseProgram> {
    let slices = s_values
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            if s == 0.0 {
                return Err(Error::ZeroInterpolation { index: i + 1 });
            }
            if !(s > 0.0 && s <= 1.0) {
                return Err(Error::InvalidArgument(format!("s = {s} outside (0, 1]")));
            }
            Ok(PulseSlice {
                index: i + 1,
                s,
                amplitude_hz: COUPLING_SCALE_HZ * (1.0 - s) / s,
                duration_s: tau * s / (COUPLING_SCALE_HZ * PI),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total_duration_s = slices.iter().map(|s| s.duration_s).sum();
    Ok(PulseProgram {
        tau,
        slices,
        couplings: *couplings,
        total_duration_s,
    })
}

/// Largest entrywise gap between `H_phys(ν_l)·t_l` and `τ·H(s_l)` over all slices.
///
/// `problem` is the dimensionless problem Hamiltonian; the driver is `Σ σ_x`.
pub fn verify_step_equivalence(program: &PulseProgram, problem: &PauliSum) -> Result<f64> {
    let h0 = PauliSum::transverse_field(problem.qubit_count(), 1.0)?;
    let mut worst: f64 = 0.0;
    for slice in &program.slices {
        let phys = to_matrix(&physical_hamiltonian(
            slice.amplitude_hz,
            &program.couplings,
        )?)?;
        let ideal = to_matrix(&interpolate(slice.s, &h0, problem)?)?;
        let diff = phys.matrix() * nalgebra::Complex::new(slice.duration_s, 0.0)
            - ideal.matrix() * nalgebra::Complex::new(program.tau, 0.0);
        worst = diff.iter().map(|c| c.norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

/// Evolves the prepared ground state through every slice in physical units.
pub fn run_physical(program: &PulseProgram) -> Result<StateVector> {
    let mut state = initial_state(SPINS)?;
    for slice in &program.slices {
        let h = physical_hamiltonian(slice.amplitude_hz, &program.couplings)?;
        state = eigendecompose(&to_matrix(&h)?)?.propagate(&state, slice.duration_s)?;
    }
    Ok(state)
}

/// `(1 − ε)/2ⁿ · I + ε·|ψ⟩⟨ψ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoPureState {
    epsilon: f64,
    pure_part: StateVector,
}

impl PseudoPureState {
    pub fn new(epsilon: f64, pure_part: StateVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!(
                "polarization {epsilon} outside [0, 1]"
            )));
        }
        Ok(Self { epsilon, pure_part })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn pure_part(&self) -> &StateVector {
        &self.pure_part
    }

    /// Unitary evolution only touches the pure part.
    pub fn evolve(&self, h: &PauliSum, duration: f64) -> Result<Self> {
        Self::new(self.epsilon, propagate(&self.pure_part, h, duration)?)
    }
}

/// Diagonal of the pseudo-pure density matrix.
pub fn pseudo_pure_populations(pps: &PseudoPureState) -> Vec<f64> {
    let dim = pps.pure_part.dimension() as f64;
    let mixed = (1.0 - pps.epsilon) / dim;
    pps.pure_part
        .populations()
        .into_iter()
        .map(|p| mixed + pps.epsilon * p)
        .collect()
}
