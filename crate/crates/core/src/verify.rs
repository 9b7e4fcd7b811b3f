//! Seeded self-check suites behind the command-line `verify` subcommand.
//!
//! Each suite re-runs one of the crate's core identities at desk scale with
//! randomized inputs and reports a pass/fail table. The suites are small on
//! purpose: they are smoke checks for an installed binary, not the full
//! test suite.
//!
//! Suite names are part of the CLI contract: `zak` (transform round trip
//! and norm preservation), `povm` (weight-pair completeness), `circuit11`
//! (single-ancilla branch identity), `circuit13` (two-ancilla branch
//! identity), `backends` (exact vs ancilla agreement), and `all`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ancilla::{run_single_qubit_circuit, run_two_qubit_circuit, BranchState, ControlledOp};
use crate::codec::{encode_logical, logical_fidelity, make_envelope, EnvelopeFamily};
use crate::compiler::{compare_backends, compile, execute, parse_circuit, Backend};
use crate::dense::{compare, materialize, zak_matrix, DenseOperator};
use crate::error::{Error, Result};
use crate::gamma::{make_weight, povm_pair, Axis, GammaOperator, WeightFamily};
use crate::grid::{
    apply_gaussian_gate, CvState, GaussianGate, GridSpec, Representation, TwoModeState,
};
use crate::zak::{zak_forward, zak_inverse};

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// A suite's full pass/fail table.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    /// True when every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The accepted suite names, in the order `all` runs them.
pub const SUITE_NAMES: &[&str] = &["zak", "povm", "circuit11", "circuit13", "backends"];

fn check(name: &str, err: f64, tol: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass: err <= tol,
        detail: format!("max error {err:.3e} (tolerance {tol:.0e})"),
    }
}

fn random_state(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<CvState> {
    let amps: Vec<Complex64> = (0..grid.dim())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let state = CvState::new(grid, Representation::Position, amps)?;
    let n = state.norm();
    Ok(state.scaled(Complex64::new(1.0 / n, 0.0)))
}

fn random_joint_state(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<TwoModeState> {
    let dim = grid.dim() * grid.dim();
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let state = TwoModeState::from_amplitudes(grid, grid, amps)?;
    let n = state.norm();
    Ok(state.scaled(Complex64::new(1.0 / n, 0.0)))
}

fn random_gate(rng: &mut ChaCha8Rng) -> Result<GaussianGate> {
    let gate = match rng.gen_range(0..4) {
        0 => GaussianGate::shift(rng.gen::<f64>() * TAU - PI),
        1 => GaussianGate::boost(rng.gen::<f64>() * 2.0 - 1.0),
        2 => GaussianGate::pos_shear(rng.gen::<f64>() - 0.5),
        _ => GaussianGate::mom_shear(rng.gen::<f64>() - 0.5),
    };
    gate.with_phase(rng.gen::<f64>() * TAU)
}

fn zak_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::new(32, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round_trip = 0.0f64;
    let mut norm_drift = 0.0f64;
    for _ in 0..20 {
        let state = random_state(grid, &mut rng)?;
        let field = zak_forward(&state)?;
        norm_drift = norm_drift.max((field.norm() - state.norm()).abs());
        let back = zak_inverse(&field)?;
        round_trip = round_trip.max(state.sub(&back)?.norm());
    }
    let fibers = zak_matrix(GridSpec::new(8, 4)?)?;
    Ok(vec![
        check("round trip", round_trip, 1e-12),
        check("norm preservation", norm_drift, 1e-12),
        check("fiber matrix unitarity", fibers.unitarity_defect(), 1e-12),
    ])
}

fn povm_suite(_seed: u64) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::new(16, 8)?;
    let mut checks = Vec::new();
    let families = [
        ("cos(theta) completeness", WeightFamily::CosTheta),
        ("sin(theta) completeness", WeightFamily::SinTheta),
        ("cos(pi k) completeness", WeightFamily::CosPiK),
    ];
    for (name, family) in families {
        let weight = make_weight(grid, family)?;
        let gamma = GammaOperator::new(grid, Axis::X, weight)?;
        let (a, b) = povm_pair(&gamma)?;
        let mut defect = 0.0f64;
        for (za, zb) in a.weight().table().iter().zip(b.weight().table()) {
            defect = defect.max((za * za + zb * zb - 1.0).abs());
        }
        checks.push(check(name, defect, 1e-12));
    }
    let small = GridSpec::new(8, 4)?;
    let weight = make_weight(small, WeightFamily::CosTheta)?;
    let gamma = GammaOperator::new(small, Axis::Y, weight)?;
    let (a, b) = povm_pair(&gamma)?;
    let (op_a, op_b) = (a.fiber_op()?, b.fiber_op()?);
    let dense_a = materialize(small, |st| op_a.apply_state(st))?;
    let dense_b = materialize(small, |st| op_b.apply_state(st))?;
    let total = dense_a
        .adjoint()
        .mul(&dense_a)?
        .add(&dense_b.adjoint().mul(&dense_b)?)?;
    let identity = DenseOperator::identity(small.dim());
    checks.push(check(
        "dense effect sum",
        compare(&total, &identity)?,
        1e-12,
    ));
    Ok(checks)
}

fn single_ancilla_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::new(8, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut branch_err = 0.0f64;
    let mut prob_err = 0.0f64;
    for _ in 0..20 {
        let psi = random_state(grid, &mut rng)?;
        let (g1, g2) = (random_gate(&mut rng)?, random_gate(&mut rng)?);
        let run = run_single_qubit_circuit(
            &psi,
            &ControlledOp::Gaussian(g1.clone()),
            &ControlledOp::Gaussian(g2.clone()),
        )?;
        let half = Complex64::new(0.5, 0.0);
        let u1 = apply_gaussian_gate(&psi, &g1)?;
        let u2 = apply_gaussian_gate(&psi, &g2)?;
        let expected = [
            u1.add(&u2)?.scaled(half),
            u1.sub(&u2)?.scaled(half),
        ];
        for (record, want) in run.records.iter().zip(expected.iter()) {
            let got = record
                .state
                .as_single()
                .ok_or(Error::GridMismatch)?;
            branch_err = branch_err.max(got.sub(want)?.norm());
        }
        prob_err = prob_err.max((run.total_probability - 1.0).abs());
    }
    Ok(vec![
        check("branch identity", branch_err, 1e-12),
        check("probability sum", prob_err, 1e-12),
    ])
}

fn two_ancilla_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::new(8, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = Complex64::new(1.0 / (2.0 * 2.0f64.sqrt()), 0.0);
    let mut branch_err = 0.0f64;
    let mut prob_err = 0.0f64;
    for _ in 0..5 {
        let psi = random_joint_state(grid, &mut rng)?;
        let gates: Vec<GaussianGate> = (0..4)
            .map(|_| random_gate(&mut rng))
            .collect::<Result<_>>()?;
        let ops: Vec<ControlledOp> = gates
            .iter()
            .map(|g| ControlledOp::Gaussian(g.clone()))
            .collect();
        let run = run_two_qubit_circuit(&psi, &ops[0], &ops[1], &ops[2], &ops[3])?;
        let low = psi
            .apply_gaussian_on_mode(0, &gates[2])?
            .apply_gaussian_on_mode(1, &gates[3])?;
        let high = psi
            .apply_gaussian_on_mode(0, &gates[0])?
            .apply_gaussian_on_mode(1, &gates[1])?;
        for record in &run.records {
            let parity = record.parity();
            let sum = if parity == 0 {
                low.add(&high)?
            } else {
                low.sub(&high)?
            };
            let want = sum.scaled(scale);
            let got = record.state.as_two().ok_or(Error::GridMismatch)?;
            branch_err = branch_err.max(got.sub(&want)?.norm());
        }
        prob_err = prob_err.max((run.total_probability - 1.0).abs());
    }
    Ok(vec![
        check("branch identity", branch_err, 1e-10),
        check("probability sum", prob_err, 1e-12),
    ])
}

fn backend_suite(_seed: u64) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::new(8, 4)?;
    let env = make_envelope(grid, EnvelopeFamily::default_gaussian())?;
    let ones = make_weight(grid, WeightFamily::Constant(1.0))?;

    let mut agreement = 0.0f64;
    for text in ["qubits 1\nX 0\n", "qubits 1\nH 0\n", "qubits 1\nRX(0.7) 0\n"] {
        let psi = encode_logical(0.9, -0.6, &env)?;
        let ir = parse_circuit(text)?;
        let cmp = compare_backends(&ir, &BranchState::Single(psi), &ones)?;
        agreement = agreement.max((cmp.total_probability - 1.0).abs());
        for row in &cmp.outcomes {
            if row.probability > 1e-20 {
                if let Some(overlap) = row.cv_overlap {
                    agreement = agreement.max(1.0 - overlap);
                }
            }
        }
    }

    let wide = GridSpec::new(16, 4)?;
    let wide_env = make_envelope(wide, EnvelopeFamily::default_gaussian())?;
    let weight = make_weight(wide, WeightFamily::CosTheta)?;
    let psi = encode_logical(0.0, 0.0, &wide_env)?;
    let ir = parse_circuit("qubits 1\nX 0\n")?;
    let cmp = compare_backends(&ir, &BranchState::Single(psi), &weight)?;
    let mut p0 = 0.0;
    for s in 0..wide.samples_per_period() / 2 {
        for m in 0..wide.period_count() {
            let z = weight.value(s, m);
            p0 += wide_env.value(s, m).norm_sqr() * z * z;
        }
    }
    let weighted = (cmp.outcomes[0].probability - p0).abs();

    let bell_env = make_envelope(grid, EnvelopeFamily::default_gaussian())?;
    let zero = encode_logical(0.0, 0.0, &bell_env)?;
    let dim = grid.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (ja, va) in zero.amplitudes().iter().enumerate() {
        for (jb, vb) in zero.amplitudes().iter().enumerate() {
            amps[ja * dim + jb] = va * vb;
        }
    }
    let joint = TwoModeState::from_amplitudes(grid, grid, amps)?;
    let ir = parse_circuit("qubits 2\nH 0\nCNOT 0 1\n")?;
    let schedule = compile(&ir, Backend::Exact, &ones)?;
    let run = execute(&schedule, &BranchState::Two(joint))?;
    let readout = run.outcomes[0]
        .readout
        .as_ref()
        .ok_or(Error::ZeroNormState)?;
    let mut bell = nalgebra::DMatrix::<Complex64>::zeros(4, 4);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell[(r, c)] = Complex64::new(0.5, 0.0);
    }
    let fid = logical_fidelity(readout.rho(), &bell)?;

    Ok(vec![
        check("unit-weight agreement", agreement, 1e-12),
        check("weighted outcome probability", weighted, 1e-12),
        check("bell fidelity", 1.0 - fid, 1e-10),
    ])
}

/// Runs one named suite (or `all`) with the given seed.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let checks = match name {
        "zak" => zak_suite(seed)?,
        "povm" => povm_suite(seed)?,
        "circuit11" => single_ancilla_suite(seed)?,
        "circuit13" => two_ancilla_suite(seed)?,
        "backends" => backend_suite(seed)?,
        "all" => {
            let mut all = Vec::new();
            for suite in SUITE_NAMES {
                for mut c in run_suite(suite, seed)?.checks {
                    c.name = format!("{suite}: {}", c.name);
                    all.push(c);
                }
            }
            all
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}
