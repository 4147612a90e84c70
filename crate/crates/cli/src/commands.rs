//! Subcommand implementations.

use std::collections::BTreeSet;

use aqc_core::adiabatic::{
    linear_grid, sector_gaps, spectrum as spectrum_curve, Passage, Schedule, StepRecord,
};
use aqc_core::factoring::{
    brute_force_ground, build_bit_equations, clauses_291311, compile as compile_clauses,
    decode_factors, substitute_complements, CompiledProblem, FactorLayout, ENUMERATION_CAP,
};
use aqc_core::format::{sig12, Table};
use aqc_core::nmr::{pulse_program, verify_step_equivalence, PhysicalCouplings, PulseProgram};
use aqc_core::noise::{monte_carlo, trotter_run, EvolutionMode, MonteCarloReport, NoiseModel};
use aqc_core::PauliSum;
use serde_json::{json, Value};

use crate::config::{Instance, OutputFormat, RunConfig, DEFAULT_WEIGHTS};
use crate::output::{num, nums, Writer};
use crate::{CliError, NoiseMode, Outcome};

/// Dominant final states carry at least this fraction of the largest population.
pub const DOMINANT_FRACTION: f64 = 0.2;
/// Below this minimum fidelity the run summary flags an adiabaticity violation.
pub const ADIABATIC_FLOOR: f64 = 0.5;
/// Largest acceptable gap in the pulse step-equivalence check.
pub const EQUIVALENCE_TOL: f64 = 1e-12;

/// A compiled instance together with the layout that turns assignments into factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub compiled: CompiledProblem,
    pub layout: FactorLayout,
}

impl Problem {
    pub fn qubit_count(&self) -> usize {
        self.compiled.qubit_count()
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.compiled.hamiltonian
    }
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem, CliError> {
    let (clauses, layout, default_weights) = match cfg.instance {
        Instance::Builtin291311 => (
            substitute_complements(&clauses_291311())?,
            FactorLayout::Reduced291311,
            DEFAULT_WEIGHTS.to_vec(),
        ),
        Instance::Generic(inst) => (
            build_bit_equations(&inst),
            FactorLayout::Generic(inst),
            vec![1.0],
        ),
    };
    let weights = cfg.weights.clone().unwrap_or(default_weights);
    Ok(Problem {
        compiled: compile_clauses(&clauses, &weights)?,
        layout,
    })
}

/// Factors encoded by a computational basis state of the compiled problem.
pub fn decode_basis(problem: &Problem, index: usize) -> aqc_core::Result<(u64, u64)> {
    let partial = problem.compiled.assignment_for_basis(index);
    let full = problem
        .compiled
        .clause_set
        .complete_assignment(&partial)
        .unwrap_or(partial);
    decode_factors(&full, &problem.layout)
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

fn assignment_label(problem: &Problem, index: usize) -> String {
    problem
        .compiled
        .assignment_for_basis(index)
        .iter()
        .map(|(v, b)| format!("{v}={}", u8::from(*b)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn zero_tolerance(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

fn driver(problem: &Problem) -> Result<PauliSum, CliError> {
    Ok(PauliSum::transverse_field(problem.qubit_count(), 1.0)?)
}

fn passage(cfg: &RunConfig, problem: &Problem) -> Result<Passage, CliError> {
    let schedule = Schedule::linear(cfg.steps, cfg.tau)?;
    Ok(Passage::new(
        &schedule,
        &driver(problem)?,
        problem.hamiltonian(),
    )?)
}

fn finish(mut outcome: Outcome, writer: Writer<'_>) -> Outcome {
    outcome.files = writer.written;
    outcome
}

fn instance_label(cfg: &RunConfig, problem: &Problem) -> String {
    match cfg.instance {
        Instance::Builtin291311 => format!("builtin-{}", problem.layout.modulus()),
        Instance::Generic(i) => format!("N={} m={} n={}", i.modulus, i.p_bits, i.q_bits),
    }
}

pub fn compile(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    let c = &problem.compiled;
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;
    out.push("instance", instance_label(cfg, &problem));
    out.push("qubits", c.qubit_count());
    out.push("clauses", c.clause_set.len());
    out.push(
        "weights",
        c.elm_weights
            .iter()
            .map(|x| sig12(*x))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push("hamiltonian", &c.hamiltonian);
    out.push("dropped_constant", sig12(c.dropped_constant));

    let ising = c.to_ising().ok();
    match w.format() {
        OutputFormat::Rows => {
            let mut t = Table::new(["coefficient", "factors"])
                .comment("penalty Hamiltonian as Pauli-Z products; dimensionless; qubit 0 is the most significant bit");
            for (k, (clause, weight)) in c.clause_set.clauses.iter().zip(&c.elm_weights).enumerate()
            {
                t = t.comment(format!(
                    "clause {}: {clause} (weight {})",
                    k + 1,
                    sig12(*weight)
                ));
            }
            for (q, v) in c.variable_map.iter().enumerate() {
                t = t.comment(format!("qubit {q}: {v}"));
            }
            t = t.comment(format!("penalty: {}", c.penalty));
            for term in c.hamiltonian.terms() {
                let factors: Vec<String> = term
                    .factors()
                    .iter()
                    .map(|(q, a)| format!("{}{q}", a.letter()))
                    .collect();
                t.push(vec![sig12(term.coefficient()), factors.join(" ")]);
            }
            t.summary("dropped_constant", sig12(c.dropped_constant));
            w.table("compile", &t)?;
            if let Some(ising) = &ising {
                let mut t = Table::new(["i", "j", "coefficient"]).comment(
                    "Ising form: linear rows leave j empty; offset is the dropped constant",
                );
                for (i, h) in &ising.linear {
                    t.push(vec![i.to_string(), String::new(), sig12(*h)]);
                }
                for (i, j, jij) in &ising.quadratic {
                    t.push(vec![i.to_string(), j.to_string(), sig12(*jij)]);
                }
                t.summary("offset", sig12(ising.offset));
                w.table("ising", &t)?;
            }
        }
        OutputFormat::Structured => {
            let mut doc: Value =
                serde_json::from_str(&c.to_json()?).map_err(|e| CliError::Other(e.to_string()))?;
            doc["ising"] =
                serde_json::to_value(&ising).map_err(|e| CliError::Other(e.to_string()))?;
            w.json("compile", doc)?;
        }
    }

    if c.penalty.variables().len() <= ENUMERATION_CAP {
        let gs = brute_force_ground(&c.penalty)?;
        let scale =
            c.penalty.terms().map(|(_, x)| x.abs()).sum::<f64>() + c.penalty.constant_term().abs();
        out.push("ground_minimum", sig12(gs.minimum));
        if gs.minimum.abs() > zero_tolerance(scale) {
            out.failure = Some(CliError::Unsatisfiable(format!(
                "penalty minimum {} is not zero; no assignment satisfies every clause",
                sig12(gs.minimum)
            )));
        } else {
            for a in gs.assignment_maps() {
                let label = a
                    .iter()
                    .map(|(v, b)| format!("{v}={}", u8::from(*b)))
                    .collect::<Vec<_>>()
                    .join(" ");
                let full = c.clause_set.complete_assignment(&a).unwrap_or(a);
                let decoded = match decode_factors(&full, &problem.layout) {
                    Ok((p, q)) => format!("p={p} q={q}"),
                    Err(e) => e.to_string(),
                };
                out.push("ground", format!("{label} -> {decoded}"));
            }
        }
    }
    Ok(finish(out, w))
}

fn trajectory_json(records: &[&StepRecord]) -> Value {
    Value::Array(
        records
            .iter()
            .map(|r| {
                json!({
                    "l": r.step,
                    "s": num(r.s),
                    "ground_fidelity": num(r.ground_fidelity),
                    "energy": num(r.energy),
                    "populations": nums(&r.populations),
                })
            })
            .collect(),
    )
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    let n = problem.qubit_count();
    let traj = passage(cfg, &problem)?.run()?;
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;

    let (min_step, min_fid) = traj
        .records
        .iter()
        .map(|r| (r.step, r.ground_fidelity))
        .fold(
            (0, f64::INFINITY),
            |acc, x| if x.1 < acc.1 { x } else { acc },
        );
    let last = traj.last();
    let peak = last.populations.iter().copied().fold(0.0, f64::max);
    let dominant: Vec<usize> = (0..last.populations.len())
        .filter(|&i| last.populations[i] >= DOMINANT_FRACTION * peak)
        .collect();

    let mut factors = BTreeSet::new();
    let mut decode_errors = Vec::new();
    for &i in &dominant {
        match decode_basis(&problem, i) {
            Ok((p, q)) => {
                factors.insert(p);
                factors.insert(q);
            }
            Err(e) => decode_errors.push(format!("|{}>: {e}", basis_label(i, n))),
        }
    }

    out.push("instance", instance_label(cfg, &problem));
    out.push("steps", cfg.steps);
    out.push("tau", sig12(cfg.tau));
    out.push("min_fidelity", sig12(min_fid));
    out.push("min_fidelity_step", min_step);
    out.push("final_fidelity", sig12(last.ground_fidelity));
    out.push(
        "dominant_states",
        dominant
            .iter()
            .map(|&i| format!("{}:{}", basis_label(i, n), sig12(last.populations[i])))
            .collect::<Vec<_>>()
            .join(" "),
    );
    out.push(
        "factors",
        factors
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    );
    out.push(
        "adiabaticity",
        if min_fid < ADIABATIC_FLOOR {
            "violated (minimum fidelity below 0.5)"
        } else {
            "ok"
        },
    );
    if !decode_errors.is_empty() {
        out.failure = Some(CliError::Verification(decode_errors.join("; ")));
    }

    match w.format() {
        OutputFormat::Rows => {
            let mut full = traj.table();
            for (k, v) in &out.summary {
                full.summary(k.clone(), v.clone());
            }
            w.table("trajectory", &full)?;
            w.table("stages", &traj.stage_table())?;
        }
        OutputFormat::Structured => {
            let all: Vec<_> = traj.records.iter().collect();
            let summary: serde_json::Map<String, Value> = out
                .summary
                .iter()
                .map(|(k, v)| (k.clone(), Value::from(v.clone())))
                .collect();
            w.json(
                "trajectory",
                json!({
                    "summary": summary,
                    "basis": (0..1usize << n).map(|i| basis_label(i, n)).collect::<Vec<_>>(),
                    "records": trajectory_json(&all),
                    "stages": trajectory_json(&traj.stages(11)),
                }),
            )?;
        }
    }
    Ok(finish(out, w))
}

fn program(cfg: &RunConfig) -> Result<PulseProgram, CliError> {
    Ok(pulse_program(
        &Schedule::linear(cfg.steps, cfg.tau)?,
        &PhysicalCouplings::default(),
    )?)
}

pub fn pulses(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    if problem.qubit_count() != 3 {
        return Err(CliError::Config(format!(
            "the pulse program drives a three-spin molecule; this instance needs {} qubits",
            problem.qubit_count()
        )));
    }
    let program = program(cfg)?;
    let deviation = verify_step_equivalence(&program, problem.hamiltonian())?;
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;
    out.push("slices", program.slices.len());
    out.push("total_duration_s", sig12(program.total_duration_s));
    out.push("total_duration_ms", sig12(program.total_duration_s * 1e3));
    out.push("max_step_deviation", sig12(deviation));
    if deviation > EQUIVALENCE_TOL {
        out.failure = Some(CliError::Verification(format!(
            "couplings ({}, {}, {}) Hz do not realize the compiled problem; step deviation {}",
            program.couplings.j12,
            program.couplings.j23,
            program.couplings.j13,
            sig12(deviation)
        )));
    }
    match w.format() {
        OutputFormat::Rows => {
            let mut t = program.table();
            t.summary("max_step_deviation", sig12(deviation));
            w.table("pulses", &t)?;
        }
        OutputFormat::Structured => {
            let c = &program.couplings;
            w.json(
                "pulses",
                json!({
                    "tau": num(program.tau),
                    "steps": program.slices.len(),
                    "couplings_hz": { "j12": num(c.j12), "j23": num(c.j23), "j13": num(c.j13) },
                    "total_duration_s": num(program.total_duration_s),
                    "max_step_deviation": num(deviation),
                    "slices": program.slices.iter().map(|s| json!({
                        "l": s.index,
                        "s": num(s.s),
                        "nu_hz": num(s.amplitude_hz),
                        "t_s": num(s.duration_s),
                    })).collect::<Vec<_>>(),
                }),
            )?;
        }
    }
    Ok(finish(out, w))
}

/// True when every term has an even number of Z factors, so `X⊗…⊗X` commutes with it.
fn flip_symmetric(h: &PauliSum) -> bool {
    h.terms().all(|t| {
        t.locality() % 2 == 0 && t.factors().values().all(|a| *a == aqc_core::PauliAxis::Z)
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    let h0 = driver(&problem)?;
    let grid = linear_grid(cfg.grid)?;
    let curve = spectrum_curve(&h0, problem.hamiltonian(), &grid)?;
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;
    out.push("grid_points", grid.len());
    out.push("levels", curve.levels.first().map(Vec::len).unwrap_or(0));
    let mut table = curve.table();
    if flip_symmetric(problem.hamiltonian()) {
        let gaps = sector_gaps(&h0, problem.hamiltonian(), &grid)?;
        let (at, gap) =
            gaps.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &g)| if g < acc.1 { (i, g) } else { acc },
            );
        out.push("min_sector_gap", sig12(gap));
        out.push("min_sector_gap_s", sig12(grid[at]));
        table.summary("min_sector_gap", sig12(gap));
        table.summary("min_sector_gap_s", sig12(grid[at]));
    }
    match w.format() {
        OutputFormat::Rows => w.table("spectrum", &table)?,
        OutputFormat::Structured => w.json(
            "spectrum",
            json!({
                "grid": nums(&curve.grid),
                "levels": curve.levels.iter().map(|l| nums(l)).collect::<Vec<_>>(),
                "summary": out.summary.iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect::<serde_json::Map<_, _>>(),
            }),
        )?,
    }
    Ok(finish(out, w))
}

fn report_json(r: &MonteCarloReport) -> Value {
    json!({
        "mode": r.mode.label(),
        "samples": r.samples,
        "seed": r.seed,
        "relative_sigma": num(r.relative_sigma),
        "s": nums(&r.s_values),
        "mean_fidelity": nums(&r.mean),
        "std_fidelity": nums(&r.std),
        "final_mean": num(r.final_mean()),
        "final_std": num(r.final_std),
        "clamp_count": r.clamp_count,
    })
}

pub fn noise(cfg: &RunConfig, mode: NoiseMode) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    let passage = passage(cfg, &problem)?;
    let program = program(cfg)?;
    let model = NoiseModel::new(cfg.relative_sigma, cfg.seed)?;
    let modes: &[EvolutionMode] = match mode {
        NoiseMode::Intrinsic => &[EvolutionMode::Intrinsic],
        NoiseMode::Trotter => &[EvolutionMode::Trotter],
        NoiseMode::Both => &[EvolutionMode::Intrinsic, EvolutionMode::Trotter],
    };
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;
    out.push("samples", cfg.samples);
    out.push("seed", cfg.seed);
    out.push("relative_sigma", sig12(cfg.relative_sigma));
    let mut stds = Vec::new();
    for &m in modes {
        let report = monte_carlo(&passage, &program, &model, cfg.samples, m)?;
        let label = m.label();
        out.push(format!("{label}_final_mean"), sig12(report.final_mean()));
        out.push(format!("{label}_final_std"), sig12(report.final_std));
        out.push(format!("{label}_clamp_count"), report.clamp_count);
        stds.push(report.final_std);
        match w.format() {
            OutputFormat::Rows => w.table(&format!("noise_{label}"), &report.table())?,
            OutputFormat::Structured => w.json(&format!("noise_{label}"), report_json(&report))?,
        }
    }
    if let [intrinsic, trotter] = stds[..] {
        out.push("trotter_std_exceeds_intrinsic", trotter > intrinsic);
        out.push(
            "std_ratio_trotter_over_intrinsic",
            if intrinsic > 0.0 {
                sig12(trotter / intrinsic)
            } else {
                "undefined".into()
            },
        );
    }
    Ok(finish(out, w))
}

pub fn trotter(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    let passage = passage(cfg, &problem)?;
    let trace = trotter_run(&passage, None)?;
    let exact = passage.run()?;
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;
    let (at, sub, min) = trace
        .records
        .iter()
        .flat_map(|r| {
            [
                (r.step, "transverse", r.after_transverse),
                (r.step, "coupling", r.after_coupling),
            ]
        })
        .fold(
            (0, "", f64::INFINITY),
            |acc, x| if x.2 < acc.2 { x } else { acc },
        );
    let pop_gap = trace
        .final_state
        .populations()
        .iter()
        .zip(&exact.last().populations)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push("min_substep_fidelity", sig12(min));
    out.push("min_substep_at", format!("l={at} after {sub}"));
    out.push(
        "final_fidelity",
        sig12(
            trace
                .records
                .last()
                .map(|r| r.after_coupling)
                .unwrap_or(trace.initial_fidelity),
        ),
    );
    out.push(
        "final_overlap_with_exact",
        sig12(trace.final_state.overlap(&exact.last().state)?),
    );
    out.push("max_population_gap_vs_exact", sig12(pop_gap));
    match w.format() {
        OutputFormat::Rows => w.table("trotter", &trace.table())?,
        OutputFormat::Structured => w.json(
            "trotter",
            json!({
                "initial_fidelity": num(trace.initial_fidelity),
                "records": trace.records.iter().map(|r| json!({
                    "l": r.step,
                    "s": num(r.s),
                    "after_transverse": num(r.after_transverse),
                    "after_coupling": num(r.after_coupling),
                })).collect::<Vec<_>>(),
                "final_populations": nums(&trace.final_state.populations()),
            }),
        )?,
    }
    Ok(finish(out, w))
}

/// Brute-force polynomial minimum against the compiled Hamiltonian's diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub polynomial_minimum: f64,
    /// Minimum of diagonal energy plus dropped constant.
    pub diagonal_minimum: f64,
    /// Basis indices of polynomial minimizers, ascending.
    pub polynomial_argmin: Vec<usize>,
    pub diagonal_argmin: Vec<usize>,
    /// Factors decoded from each polynomial minimizer.
    pub decoded: Vec<aqc_core::Result<(u64, u64)>>,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn minima_agree(&self) -> bool {
        (self.polynomial_minimum - self.diagonal_minimum).abs() <= self.tolerance
            && self.polynomial_argmin == self.diagonal_argmin
    }

    pub fn satisfiable(&self) -> bool {
        self.polynomial_minimum.abs() <= self.tolerance
    }

    pub fn all_decode(&self) -> bool {
        self.decoded.iter().all(Result::is_ok)
    }
}

pub fn oracle_check(problem: &Problem) -> Result<OracleReport, CliError> {
    let c = &problem.compiled;
    let k = c.qubit_count();
    if k > ENUMERATION_CAP {
        return Err(aqc_core::Error::EnumerationLimit {
            variables: k,
            cap: ENUMERATION_CAP,
        }
        .into());
    }
    let scale =
        c.penalty.terms().map(|(_, x)| x.abs()).sum::<f64>() + c.penalty.constant_term().abs();
    let tolerance = zero_tolerance(scale);

    let gs = brute_force_ground(&c.penalty)?;
    let mut polynomial_argmin = Vec::new();
    for a in gs.assignment_maps() {
        // Variables the penalty does not mention are free.
        let free: Vec<usize> = (0..k)
            .filter(|&q| !a.contains_key(&c.variable_map[q]))
            .collect();
        for bits in 0..1usize << free.len() {
            let mut full = a.clone();
            for (j, &q) in free.iter().enumerate() {
                full.insert(c.variable_map[q].clone(), bits >> j & 1 == 1);
            }
            polynomial_argmin.push(
                c.basis_for_assignment(&full)
                    .expect("every variable assigned"),
            );
        }
    }
    polynomial_argmin.sort_unstable();

    let diag = (0..1usize << k)
        .map(|i| Ok(c.hamiltonian.diagonal_energy(i)? + c.dropped_constant))
        .collect::<aqc_core::Result<Vec<f64>>>()?;
    let diagonal_minimum = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let diagonal_argmin = (0..diag.len())
        .filter(|&i| diag[i] - diagonal_minimum <= tolerance)
        .collect();
    let decoded = polynomial_argmin
        .iter()
        .map(|&i| decode_basis(problem, i))
        .collect();
    Ok(OracleReport {
        polynomial_minimum: gs.minimum,
        diagonal_minimum,
        polynomial_argmin,
        diagonal_argmin,
        decoded,
        tolerance,
    })
}

pub fn oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let problem = build_problem(cfg)?;
    let report = oracle_check(&problem)?;
    let mut out = Outcome::default();
    let mut w = Writer::new(cfg)?;
    out.push("instance", instance_label(cfg, &problem));
    out.push("polynomial_minimum", sig12(report.polynomial_minimum));
    out.push("diagonal_minimum", sig12(report.diagonal_minimum));
    out.push("argmin_count", report.polynomial_argmin.len());
    out.push("minima_agree", report.minima_agree());
    out.push("all_decode_to_n", report.all_decode());

    let n = problem.qubit_count();
    let mut t = Table::new(["basis", "assignment", "penalty", "p", "q"])
        .comment("minimizers of the penalty polynomial; penalty dimensionless");
    let mut rows = Vec::new();
    for (&i, d) in report.polynomial_argmin.iter().zip(&report.decoded) {
        let a = problem.compiled.assignment_for_basis(i);
        let value = problem.compiled.penalty.evaluate(&a).unwrap_or(f64::NAN);
        let (p, q) = match d {
            Ok((p, q)) => (p.to_string(), q.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        t.push(vec![
            basis_label(i, n),
            assignment_label(&problem, i),
            sig12(value),
            p.clone(),
            q.clone(),
        ]);
        rows.push(json!({
            "basis": basis_label(i, n),
            "assignment": assignment_label(&problem, i),
            "penalty": num(value),
            "p": p,
            "q": q,
        }));
    }
    for (k, v) in &out.summary {
        t.summary(k.clone(), v.clone());
    }
    match w.format() {
        OutputFormat::Rows => w.table("oracle", &t)?,
        OutputFormat::Structured => w.json(
            "oracle",
            json!({
                "polynomial_minimum": num(report.polynomial_minimum),
                "diagonal_minimum": num(report.diagonal_minimum),
                "minima_agree": report.minima_agree(),
                "all_decode_to_n": report.all_decode(),
                "minimizers": rows,
            }),
        )?,
    }
    if !report.satisfiable() {
        out.failure = Some(CliError::Unsatisfiable(format!(
            "penalty minimum {} is not zero",
            sig12(report.polynomial_minimum)
        )));
    } else if !report.minima_agree() {
        out.failure = Some(CliError::Verification(
            "compiled diagonal and polynomial minima differ".into(),
        ));
    } else if let Some(Err(e)) = report.decoded.iter().find(|d| d.is_err()) {
        out.failure = Some(CliError::Verification(e.to_string()));
    }
    Ok(finish(out, w))
}
