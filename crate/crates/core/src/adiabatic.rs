//! Piecewise-constant adiabatic passage from `H0` to `Hp`.
//!
//! The interpolated Hamiltonian `H(s) = (1 − s)·H0 + s·Hp` is held constant
//! for a dimensionless time `tau` at each of `L` grid points `s_l = l/L`.
//! Fidelity is measured against the whole ground eigenspace of `H(s_l)` so
//! that degenerate final ground states are handled without picking a basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::{sig12, Table};
use crate::pauli::{eigendecompose, to_matrix, EigenSystem, PauliSum};
use crate::state::StateVector;

/// Eigenvalues within this absolute distance of the minimum count as ground.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Step count used for the 291311 passage.
pub const STANDARD_STEPS: usize = 100;
/// Dimensionless step duration used for the 291311 passage.
pub const STANDARD_TAU: f64 = 0.05;

/// Linear interpolation grid `s_l = l/L` for `l = 1..=L`, each held for `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    steps: usize,
    tau: f64,
    s_values: Vec<f64>,
}

impl Schedule {
    pub fn linear(steps: usize, tau: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("step count must be positive".into()));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tau {tau} must be positive"
            )));
        }
        let s_values = (1..=steps).map(|l| l as f64 / steps as f64).collect();
        Ok(Self {
            steps,
            tau,
            s_values,
        })
    }

    /// L = 100, τ = 0.05.
    pub fn standard() -> Self {
        Self::linear(STANDARD_STEPS, STANDARD_TAU).expect("valid constants")
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `s_1 … s_L`.
    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }

    pub fn total_time(&self) -> f64 {
        self.tau * self.steps as f64
    }
}

/// `(1 − s)·h0 + s·hp`.
pub fn interpolate(s: f64, h0: &PauliSum, hp: &PauliSum) -> Result<PauliSum> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
    }
    h0.scaled(1.0 - s).plus(&hp.scaled(s))
}

/// `(1 − s)·scale·h0 + s·hp`: the step Hamiltonian with the transverse part rescaled.
pub fn interpolate_scaled(
    s: f64,
    transverse_scale: f64,
    h0: &PauliSum,
    hp: &PauliSum,
) -> Result<PauliSum> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")));
    }
    h0.scaled((1.0 - s) * transverse_scale).plus(&hp.scaled(s))
}

/// `((|0⟩ − |1⟩)/√2)^⊗n`, the ground state of `Σ σ_x`.
pub fn initial_state(qubit_count: usize) -> Result<StateVector> {
    if qubit_count == 0 {
        return Err(Error::InvalidArgument(
            "qubit_count must be positive".into(),
        ));
    }
    let dim = 1usize << qubit_count;
    let amp = 1.0 / (dim as f64).sqrt();
    let v = (0..dim)
        .map(|i| {
            let sign = if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * amp, 0.0)
        })
        .collect::<Vec<_>>();
    StateVector::new(nalgebra::DVector::from_vec(v))
}

/// Weight of `state` in the ground eigenspace of `h`.
pub fn ground_subspace_fidelity(
    state: &StateVector,
    h: &PauliSum,
    degeneracy_tol: f64,
) -> Result<f64> {
    eigendecompose(&to_matrix(h)?)?.ground_subspace_weight(state, degeneracy_tol)
}

/// Eigenvalue of the global flip `X⊗…⊗X` on the initial state: `(−1)^n`.
pub fn initial_flip_sign(qubit_count: usize) -> f64 {
    if qubit_count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Weight of `state` in the eigenspace of `X⊗…⊗X` with eigenvalue `sign` (±1).
pub fn flip_sector_weight(state: &StateVector, sign: f64) -> f64 {
    let v = state.amplitudes();
    let mask = v.len() - 1;
    (0..v.len())
        .map(|i| ((v[i] + v[i ^ mask] * sign) * 0.5).norm_sqr())
        .sum()
}

/// Weight of `state` outside the flip sector that contains the initial state.
pub fn flip_leakage(state: &StateVector) -> f64 {
    flip_sector_weight(state, -initial_flip_sign(state.qubit_count()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 0 for the initial record, then 1..=L.
    pub step: usize,
    pub s: f64,
    pub state: StateVector,
    pub populations: Vec<f64>,
    pub ground_fidelity: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn initial(&self) -> &StepRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &StepRecord {
        self.records
            .last()
            .expect("trajectory has an initial record")
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ground_fidelity).collect()
    }

    pub fn min_fidelity(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.ground_fidelity)
            .fold(f64::INFINITY, f64::min)
    }

    /// Records closest to `s = 0, 1/(count−1), …, 1`.
    pub fn stages(&self, count: usize) -> Vec<&StepRecord> {
        let count = count.max(2);
        (0..count)
            .map(|k| {
                let target = k as f64 / (count - 1) as f64;
                self.records
                    .iter()
                    .min_by(|a, b| {
                        (a.s - target)
                            .abs()
                            .partial_cmp(&(b.s - target).abs())
                            .expect("finite s")
                    })
                    .expect("non-empty trajectory")
            })
            .collect()
    }

    pub fn table(&self) -> Table {
        stage_table(self.records.iter())
    }

    /// The 11 evenly spaced measurement stages `s = 0, 0.1, …, 1`.
    pub fn stage_table(&self) -> Table {
        stage_table(self.stages(11).into_iter())
    }
}

fn basis_label(index: usize, qubits: usize) -> String {
    (0..qubits)
        .map(|q| {
            if (index >> (qubits - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn stage_table<'a>(records: impl Iterator<Item = &'a StepRecord>) -> Table {
    let records: Vec<_> = records.collect();
    let n = records.first().map(|r| r.state.qubit_count()).unwrap_or(0);
    let mut columns = vec![
        "l".to_string(),
        "s".into(),
        "ground_fidelity".into(),
        "energy".into(),
    ];
    columns.extend((0..1usize << n).map(|i| format!("p_{}", basis_label(i, n))));
    let mut table = Table::new(columns)
        .comment("adiabatic trajectory; s and energy dimensionless; p_b is the population of basis state |b>");
    for r in records {
        let mut row = vec![
            r.step.to_string(),
            sig12(r.s),
            sig12(r.ground_fidelity),
            sig12(r.energy),
        ];
        row.extend(r.populations.iter().map(|p| sig12(*p)));
        table.push(row);
    }
    table
}

/// Passage data shared between the ideal run and perturbed runs.
#[derive(Debug, Clone)]
pub struct Passage {
    schedule: Schedule,
    h0: PauliSum,
    hp: PauliSum,
    /// Eigensystems of `H(s_l)` for `l = 0..=L`.
    ideal: Vec<EigenSystem>,
    degeneracy_tol: f64,
}

impl Passage {
    pub fn new(schedule: &Schedule, h0: &PauliSum, hp: &PauliSum) -> Result<Self> {
        if h0.qubit_count() != hp.qubit_count() {
            return Err(Error::DimensionMismatch {
                expected: h0.qubit_count(),
                found: hp.qubit_count(),
            });
        }
        let ideal = std::iter::once(0.0)
            .chain(schedule.s_values().iter().copied())
            .map(|s| eigendecompose(&to_matrix(&interpolate(s, h0, hp)?)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schedule: schedule.clone(),
            h0: h0.clone(),
            hp: hp.clone(),
            ideal,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn h0(&self) -> &PauliSum {
        &self.h0
    }

    pub fn hp(&self) -> &PauliSum {
        &self.hp
    }

    pub fn qubit_count(&self) -> usize {
        self.h0.qubit_count()
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// Eigensystem of the ideal `H(s_l)`; `l = 0` is `H0`.
    pub fn ideal_system(&self, l: usize) -> &EigenSystem {
        &self.ideal[l]
    }

    /// Ground-subspace fidelity and energy of `state` against the ideal `H(s_l)`.
    pub fn measure(&self, l: usize, state: &StateVector) -> Result<(f64, f64)> {
        let eig = &self.ideal[l];
        let fidelity = eig.ground_subspace_weight(state, self.degeneracy_tol)?;
        let coeffs = eig.eigenvectors().ad_mul(state.amplitudes());
        let energy = coeffs
            .iter()
            .zip(eig.eigenvalues())
            .map(|(c, e)| c.norm_sqr() * e)
            .sum();
        Ok((fidelity, energy))
    }

    fn record(&self, l: usize, state: StateVector) -> Result<StepRecord> {
        let (ground_fidelity, energy) = self.measure(l, &state)?;
        Ok(StepRecord {
            step: l,
            s: if l == 0 {
                0.0
            } else {
                self.schedule.s_values()[l - 1]
            },
            populations: state.populations(),
            state,
            ground_fidelity,
            energy,
        })
    }

    /// Ideal passage from the transverse-field ground state.
    pub fn run(&self) -> Result<Trajectory> {
        let mut state = initial_state(self.qubit_count())?;
        let mut records = Vec::with_capacity(self.schedule.steps() + 1);
        records.push(self.record(0, state.clone())?);
        for l in 1..=self.schedule.steps() {
            state = self.ideal[l].propagate(&state, self.schedule.tau())?;
            records.push(self.record(l, state.clone())?);
        }
        Ok(Trajectory { records })
    }

    /// Passage whose step `l` evolves under `(1 − s_l)·scales[l−1]·H0 + s_l·Hp`.
    ///
    /// Fidelities and energies are still measured against the ideal `H(s_l)`.
    pub fn run_scaled(&self, scales: &[f64]) -> Result<Trajectory> {
        if scales.len() != self.schedule.steps() {
            return Err(Error::DimensionMismatch {
                expected: self.schedule.steps(),
                found: scales.len(),
            });
        }
        let mut state = initial_state(self.qubit_count())?;
        let mut records = Vec::with_capacity(self.schedule.steps() + 1);
        records.push(self.record(0, state.clone())?);
        for (l, (&s, &scale)) in self.schedule.s_values().iter().zip(scales).enumerate() {
            let l = l + 1;
            state = if scale == 1.0 {
                self.ideal[l].propagate(&state, self.schedule.tau())?
            } else {
                let h = interpolate_scaled(s, scale, &self.h0, &self.hp)?;
                eigendecompose(&to_matrix(&h)?)?.propagate(&state, self.schedule.tau())?
            };
            records.push(self.record(l, state.clone())?);
        }
        Ok(Trajectory { records })
    }
}

/// Runs the piecewise-constant passage for `schedule`.
pub fn run(schedule: &Schedule, h0: &PauliSum, hp: &PauliSum) -> Result<Trajectory> {
    Passage::new(schedule, h0, hp)?.run()
}

/// Ascending eigenvalues of `H(s)` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub grid: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
}

impl SpectrumCurve {
    pub fn table(&self) -> Table {
        let width = self.levels.first().map(Vec::len).unwrap_or(0);
        let mut columns = vec!["s".to_string()];
        columns.extend((1..=width).map(|k| format!("lambda_{k}")));
        let mut table =
            Table::new(columns).comment("energy levels of H(s), dimensionless, ascending");
        for (s, levels) in self.grid.iter().zip(&self.levels) {
            let mut row = vec![sig12(*s)];
            row.extend(levels.iter().map(|e| sig12(*e)));
            table.push(row);
        }
        table
    }
}

/// `points` evenly spaced values from 0 to 1 inclusive.
pub fn linear_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points".into(),
        ));
    }
    Ok((0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect())
}

pub fn spectrum(h0: &PauliSum, hp: &PauliSum, grid: &[f64]) -> Result<SpectrumCurve> {
    let levels = grid
        .iter()
        .map(|&s| {
            Ok(eigendecompose(&to_matrix(&interpolate(s, h0, hp)?)?)?
                .eigenvalues()
                .to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumCurve {
        grid: grid.to_vec(),
        levels,
    })
}

/// Gap between the two lowest levels of `H(s)` inside the flip sector of the initial state.
///
/// Only meaningful when both Hamiltonians commute with `X⊗…⊗X`.
pub fn sector_gaps(h0: &PauliSum, hp: &PauliSum, grid: &[f64]) -> Result<Vec<f64>> {
    let n = h0.qubit_count();
    let dim = 1usize << n;
    let half = dim / 2;
    let mask = dim - 1;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sign = initial_flip_sign(n);
    // Columns (|k⟩ + sign·|~k⟩)/√2 for k with the leading qubit 0.
    let mut iso = DMatrix::<Complex64>::zeros(dim, half);
    for k in 0..half {
        iso[(k, k)] = Complex64::new(r, 0.0);
        iso[(k ^ mask, k)] = Complex64::new(sign * r, 0.0);
    }
    grid.iter()
        .map(|&s| {
            let m = to_matrix(&interpolate(s, h0, hp)?)?;
            let reduced = iso.adjoint() * m.matrix() * &iso;
            let reduced = crate::pauli::DenseHermitian::new(reduced)?;
            let eig = eigendecompose(&reduced)?;
            let e = eig.eigenvalues();
            Ok(if e.len() > 1 {
                e[1] - e[0]
            } else {
                f64::INFINITY
            })
        })
        .collect()
}
