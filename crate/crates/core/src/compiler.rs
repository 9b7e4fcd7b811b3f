//! Compiles one- and two-qubit logical circuits onto modular-variable modes
//! and runs them on either of two interchangeable backends.
//!
//! The input is a small line-oriented circuit text: a `qubits <n>` header
//! (n of 1 or 2) followed by one gate per line. Single-qubit gates are
//! `X q`, `Y q`, `Z q`, `H q` and the rotations `RX(beta) q`, `RY(beta) q`,
//! `RZ(beta) q`, `RN(nx,ny,nz,beta) q`; the two-qubit gates are `CNOT c t`
//! and `CZ a b`. Angles are decimal literals, `#` starts a comment, and
//! blank lines are skipped. Parse errors carry 1-based line and column
//! positions.
//!
//! [`compile`] lowers the circuit to a [`CompiledSchedule`] for a chosen
//! [`Backend`]:
//!
//! * `Exact` realizes every gate as a unit-weight fiberwise operator. A
//!   rotation becomes e^{iβ n̂·σ} on its mode, the Paulis and H are the
//!   β = π/2 cases (H rotates about (x̂ + ẑ)/√2), and CNOT and CZ act as
//!   constant 4×4 fiber matrices on the joint Zak field. The schedule is
//!   deterministic: one branch in, one branch out.
//! * `Ancilla` realizes every single-qubit gate as a measured two-outcome
//!   rotation pair built from the supplied weight ζ and its complement ζ′,
//!   rescaled so each controlled operator is unitary fiberwise. CZ becomes
//!   a four-outcome quad of constant phase gates with a Z⊗Z frame fix on
//!   odd parity, and CNOT is the usual H-conjugated CZ on the target.
//!   Execution branches over ancilla outcomes, applying the frame
//!   correction attached to each step as it goes.
//!
//! [`execute`] runs a schedule on an input branch and returns every outcome
//! with its bit string, probability, post-measurement state and logical
//! readout. [`compare_backends`] runs both backends on the same input and
//! scores each ancilla outcome against the exact branch by plain state
//! overlap and by decoded logical fidelity.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

use num_complex::Complex64;

use crate::ancilla::{
    apply_frame_correction, defect_report, make_rotation_pair, run_two_qubit_circuit, BranchState,
    CompositeState, ControlledOp, FramePolicy,
};
use crate::codec::{decode_logical, decode_logical_two, logical_fidelity, LogicalReadout};
use crate::error::{Error, Result};
use crate::gamma::{make_weight, rotation_fiber_op, Axis, FiberOp, WeightFamily, WeightSpec};
use crate::grid::GridSpec;
use crate::zak::{apply_fiberwise_two, zak_forward_two, zak_inverse_two, Mat2, Mat4};

/// Hard cap on the number of measurement branches a single execution may
/// hold at any point.
pub const MAX_OUTCOMES: usize = 4096;

/// Branches lighter than this norm squared are kept for bookkeeping but not
/// decoded.
const READOUT_FLOOR: f64 = 1e-24;

/// One logical gate, with qubit indices below the declared count.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    RX(usize, f64),
    RY(usize, f64),
    RZ(usize, f64),
    RN(usize, [f64; 3], f64),
    CNOT(usize, usize),
    CZ(usize, usize),
}

/// A parsed circuit: the declared qubit count and the gate sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIr {
    pub qubits: usize,
    pub gates: Vec<GateOp>,
}

/// Which realization of the circuit to lower to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Ancilla,
}

/// One lowered step of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleStep {
    /// A deterministic fiberwise operator on one mode.
    ExactFiber {
        mode: usize,
        op: FiberOp,
        label: String,
    },
    /// A deterministic constant 4×4 operator on the joint fibers.
    ExactJoint { mat: Mat4, label: String },
    /// A measured single-ancilla pair on one mode, with its frame policy.
    AncillaPair {
        mode: usize,
        u1: FiberOp,
        u2: FiberOp,
        policy: FramePolicy,
        label: String,
    },
    /// A measured two-ancilla quad on a mode pair, with its frame policy.
    AncillaQuad {
        u1: FiberOp,
        u2: FiberOp,
        u3: FiberOp,
        u4: FiberOp,
        policy: FramePolicy,
        label: String,
    },
}

/// The lowered form of a circuit for one backend.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledSchedule {
    pub backend: Backend,
    pub qubits: usize,
    pub steps: Vec<ScheduleStep>,
}

/// One measurement branch after running a schedule.
#[derive(Debug, Clone)]
pub struct ExecutedOutcome {
    /// Ancilla bits in chronological order; empty for exact schedules.
    pub bits: Vec<u8>,
    /// Final norm squared of the branch.
    pub probability: f64,
    /// Unnormalized post-measurement state, frame corrections applied.
    pub state: BranchState,
    /// Logical density matrix of the branch, absent below the decode floor.
    pub readout: Option<LogicalReadout>,
}

/// Everything an execution produced.
#[derive(Debug, Clone)]
pub struct Execution {
    pub qubits: usize,
    pub outcomes: Vec<ExecutedOutcome>,
    /// Sum of outcome probabilities; 1 when every step is trace preserving.
    pub total_probability: f64,
    /// Non-unitarity warnings from measured steps, labeled by gate.
    pub warnings: Vec<String>,
}

/// Score of one ancilla outcome against the exact branch.
#[derive(Debug, Clone)]
pub struct OutcomeComparison {
    pub bits: Vec<u8>,
    pub probability: f64,
    /// Normalized overlap between the branch state and the exact state.
    pub cv_overlap: Option<f64>,
    /// Fidelity between the decoded logical states.
    pub decode_fidelity: Option<f64>,
}

/// Side-by-side run of the two backends on one input.
#[derive(Debug, Clone)]
pub struct BackendComparison {
    /// The single branch the exact backend produces.
    pub exact: ExecutedOutcome,
    /// One row per ancilla outcome, in measurement order.
    pub outcomes: Vec<OutcomeComparison>,
    /// Total probability over the ancilla outcomes.
    pub total_probability: f64,
    pub warnings: Vec<String>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokens_with_cols(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_number(line: usize, column: usize, text: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| parse_err(line, column, format!("invalid number '{text}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, column, "number must be finite"));
    }
    Ok(v)
}

fn parse_qubit(line: usize, tok: (usize, &str), count: usize) -> Result<usize> {
    let (col, text) = tok;
    let q: usize = text
        .parse()
        .map_err(|_| parse_err(line, col, format!("invalid qubit index '{text}'")))?;
    if q >= count {
        return Err(Error::QubitOutOfRange { index: q, count });
    }
    Ok(q)
}

fn expect_args(line: usize, head: (usize, &str), rest: &[(usize, &str)], k: usize) -> Result<()> {
    if rest.len() == k {
        return Ok(());
    }
    let col = rest.get(k).map_or(head.0, |t| t.0);
    Err(parse_err(
        line,
        col,
        format!("gate {} takes {} argument(s), got {}", head.1, k, rest.len()),
    ))
}

fn parse_gate(line: usize, toks: &[(usize, &str)], count: usize) -> Result<GateOp> {
    let head = toks[0];
    let rest = &toks[1..];
    match head.1 {
        "X" | "Y" | "Z" | "H" => {
            expect_args(line, head, rest, 1)?;
            let q = parse_qubit(line, rest[0], count)?;
            Ok(match head.1 {
                "X" => GateOp::X(q),
                "Y" => GateOp::Y(q),
                "Z" => GateOp::Z(q),
                _ => GateOp::H(q),
            })
        }
        "CNOT" | "CZ" => {
            expect_args(line, head, rest, 2)?;
            let a = parse_qubit(line, rest[0], count)?;
            let b = parse_qubit(line, rest[1], count)?;
            if a == b {
                return Err(parse_err(
                    line,
                    rest[1].0,
                    format!("gate {} needs two distinct qubits", head.1),
                ));
            }
            Ok(if head.1 == "CNOT" {
                GateOp::CNOT(a, b)
            } else {
                GateOp::CZ(a, b)
            })
        }
        _ => {
            // A rotation head may have been split at spaces inside its
            // parentheses; rejoin it up to the closing one.
            let mut head_text = String::from(head.1);
            let mut used = 0;
            if head_text.contains('(') {
                while !head_text.contains(')') && used < rest.len() {
                    head_text.push_str(rest[used].1);
                    used += 1;
                }
            }
            parse_rotation(line, (head.0, &head_text), &rest[used..], count)
        }
    }
}

fn parse_rotation(
    line: usize,
    head: (usize, &str),
    rest: &[(usize, &str)],
    count: usize,
) -> Result<GateOp> {
    let (col, text) = head;
    let (name, tail) = match text.split_once('(') {
        Some(split) => split,
        None => return Err(parse_err(line, col, format!("unknown gate '{text}'"))),
    };
    if !matches!(name, "RX" | "RY" | "RZ" | "RN") {
        return Err(parse_err(line, col, format!("unknown gate '{text}'")));
    }
    let inner = tail.strip_suffix(')').ok_or_else(|| {
        parse_err(
            line,
            col,
            format!("malformed rotation '{text}': missing closing parenthesis"),
        )
    })?;
    let args: Vec<f64> = inner
        .split(',')
        .map(|piece| parse_number(line, col, piece.trim()))
        .collect::<Result<_>>()?;
    expect_args(line, head, rest, 1)?;
    let q = parse_qubit(line, rest[0], count)?;
    match (name, args.as_slice()) {
        ("RX", [beta]) => Ok(GateOp::RX(q, *beta)),
        ("RY", [beta]) => Ok(GateOp::RY(q, *beta)),
        ("RZ", [beta]) => Ok(GateOp::RZ(q, *beta)),
        ("RN", [nx, ny, nz, beta]) => {
            if nx * nx + ny * ny + nz * nz == 0.0 {
                return Err(parse_err(line, col, "rotation axis must be nonzero"));
            }
            Ok(GateOp::RN(q, [*nx, *ny, *nz], *beta))
        }
        ("RN", _) => Err(parse_err(
            line,
            col,
            format!("RN takes 4 parameters (nx,ny,nz,beta), got {}", args.len()),
        )),
        _ => Err(parse_err(
            line,
            col,
            format!("{name} takes 1 parameter, got {}", args.len()),
        )),
    }
}

/// Parses circuit text into its intermediate form.
pub fn parse_circuit(text: &str) -> Result<CircuitIr> {
    let mut qubits: Option<usize> = None;
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks = tokens_with_cols(body);
        if toks.is_empty() {
            continue;
        }
        match qubits {
            None => {
                let head = toks[0];
                if head.1 != "qubits" {
                    return Err(parse_err(
                        line_no,
                        head.0,
                        format!("expected 'qubits <n>' header, got '{}'", head.1),
                    ));
                }
                expect_args(line_no, head, &toks[1..], 1)?;
                let (col, text) = toks[1];
                let n: usize = text.parse().map_err(|_| {
                    parse_err(line_no, col, format!("invalid qubit count '{text}'"))
                })?;
                if n == 0 || n > 2 {
                    return Err(parse_err(line_no, col, "qubit count must be 1 or 2"));
                }
                qubits = Some(n);
            }
            Some(n) => gates.push(parse_gate(line_no, &toks, n)?),
        }
    }
    let qubits = qubits.ok_or_else(|| parse_err(1, 1, "missing 'qubits <n>' header"))?;
    Ok(CircuitIr { qubits, gates })
}

fn gate_label(gate: &GateOp) -> String {
    match gate {
        GateOp::X(q) => format!("X {q}"),
        GateOp::Y(q) => format!("Y {q}"),
        GateOp::Z(q) => format!("Z {q}"),
        GateOp::H(q) => format!("H {q}"),
        GateOp::RX(q, b) => format!("RX({b}) {q}"),
        GateOp::RY(q, b) => format!("RY({b}) {q}"),
        GateOp::RZ(q, b) => format!("RZ({b}) {q}"),
        GateOp::RN(q, [x, y, z], b) => format!("RN({x},{y},{z},{b}) {q}"),
        GateOp::CNOT(c, t) => format!("CNOT {c} {t}"),
        GateOp::CZ(a, b) => format!("CZ {a} {b}"),
    }
}

/// Mode, axis, angle and fixed phase of a single-qubit gate, where the gate
/// acts as phase · e^{iα n̂·σ} on each fiber.
fn gate_rotation(gate: &GateOp) -> Option<(usize, Axis, f64, Complex64)> {
    let minus_i = -Complex64::I;
    match gate {
        GateOp::X(q) => Some((*q, Axis::X, FRAC_PI_2, minus_i)),
        GateOp::Y(q) => Some((*q, Axis::Y, FRAC_PI_2, minus_i)),
        GateOp::Z(q) => Some((*q, Axis::Z, FRAC_PI_2, minus_i)),
        GateOp::H(q) => Some((
            *q,
            Axis::Custom(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2),
            FRAC_PI_2,
            minus_i,
        )),
        GateOp::RX(q, b) => Some((*q, Axis::X, *b, Complex64::ONE)),
        GateOp::RY(q, b) => Some((*q, Axis::Y, *b, Complex64::ONE)),
        GateOp::RZ(q, b) => Some((*q, Axis::Z, *b, Complex64::ONE)),
        GateOp::RN(q, [x, y, z], b) => Some((*q, Axis::Custom(*x, *y, *z), *b, Complex64::ONE)),
        GateOp::CNOT(_, _) | GateOp::CZ(_, _) => None,
    }
}

#[allow(clippy::needless_range_loop)] // column index doubles as the basis label
fn cnot_mat(control: usize, target: usize) -> Mat4 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::ONE;
    let mut m = [[zero; 4]; 4];
    for j in 0..4 {
        let cbit = (j >> (1 - control)) & 1;
        let out = if cbit == 1 { j ^ (1 << (1 - target)) } else { j };
        m[out][j] = one;
    }
    m
}

fn cz_mat() -> Mat4 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::ONE;
    let mut m = [[zero; 4]; 4];
    for (j, row) in m.iter_mut().enumerate() {
        row[j] = if j == 3 { -one } else { one };
    }
    m
}

fn compile_exact(grid: GridSpec, gate: &GateOp, steps: &mut Vec<ScheduleStep>) -> Result<()> {
    if let Some((mode, axis, alpha, phase)) = gate_rotation(gate) {
        let ones = make_weight(grid, WeightFamily::Constant(1.0))?;
        let op = rotation_fiber_op(grid, axis, alpha, &ones)?.scaled(phase);
        steps.push(ScheduleStep::ExactFiber {
            mode,
            op,
            label: gate_label(gate),
        });
        return Ok(());
    }
    let mat = match gate {
        GateOp::CNOT(c, t) => cnot_mat(*c, *t),
        GateOp::CZ(_, _) => cz_mat(),
        _ => unreachable!(),
    };
    steps.push(ScheduleStep::ExactJoint {
        mat,
        label: gate_label(gate),
    });
    Ok(())
}

fn rotation_pair_step(
    grid: GridSpec,
    weight: &WeightSpec,
    mode: usize,
    axis: Axis,
    alpha: f64,
    phase: Complex64,
    label: String,
) -> Result<ScheduleStep> {
    let zeta_prime = weight.completed()?;
    let (u1, u2, _) = make_rotation_pair(grid, axis, alpha, weight, &zeta_prime, axis)?;
    let scale = phase * Complex64::new(SQRT_2, 0.0);
    Ok(ScheduleStep::AncillaPair {
        mode,
        u1: u1.scaled(scale),
        u2: u2.scaled(scale),
        policy: FramePolicy::FlipOnOdd(axis),
        label,
    })
}

fn cz_quad_step(grid: GridSpec, label: String) -> ScheduleStep {
    let zero = Complex64::new(0.0, 0.0);
    let s_gate: Mat2 = [[Complex64::ONE, zero], [zero, Complex64::I]];
    let eighth = Complex64::from_polar(1.0, FRAC_PI_4);
    let t_gate: Mat2 = [[eighth, zero], [zero, eighth.conj()]];
    ScheduleStep::AncillaQuad {
        u1: FiberOp::constant(grid, s_gate),
        u2: FiberOp::constant(grid, s_gate),
        u3: FiberOp::constant(grid, t_gate),
        u4: FiberOp::constant(grid, t_gate),
        policy: FramePolicy::ZBothOnOdd,
        label,
    }
}

fn compile_ancilla(
    grid: GridSpec,
    weight: &WeightSpec,
    gate: &GateOp,
    steps: &mut Vec<ScheduleStep>,
) -> Result<()> {
    if let Some((mode, axis, alpha, phase)) = gate_rotation(gate) {
        steps.push(rotation_pair_step(
            grid,
            weight,
            mode,
            axis,
            alpha,
            phase,
            gate_label(gate),
        )?);
        return Ok(());
    }
    match gate {
        GateOp::CZ(_, _) => steps.push(cz_quad_step(grid, gate_label(gate))),
        GateOp::CNOT(_, t) => {
            let base = gate_label(gate);
            let h_axis = Axis::Custom(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
            let minus_i = -Complex64::I;
            steps.push(rotation_pair_step(
                grid,
                weight,
                *t,
                h_axis,
                FRAC_PI_2,
                minus_i,
                format!("{base} [H {t} pre]"),
            )?);
            steps.push(cz_quad_step(grid, format!("{base} [CZ]")));
            steps.push(rotation_pair_step(
                grid,
                weight,
                *t,
                h_axis,
                FRAC_PI_2,
                minus_i,
                format!("{base} [H {t} post]"),
            )?);
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Lowers a circuit to a schedule for one backend.
///
/// The weight fixes both the grid and, for the ancilla backend, the ζ
/// profile of every rotation pair; the exact backend only uses its grid.
/// Both modes of a two-qubit circuit live on that grid.
pub fn compile(ir: &CircuitIr, backend: Backend, weight: &WeightSpec) -> Result<CompiledSchedule> {
    let grid = weight.grid();
    let mut steps = Vec::new();
    for gate in &ir.gates {
        match backend {
            Backend::Exact => compile_exact(grid, gate, &mut steps)?,
            Backend::Ancilla => compile_ancilla(grid, weight, gate, &mut steps)?,
        }
    }
    Ok(CompiledSchedule {
        backend,
        qubits: ir.qubits,
        steps,
    })
}

fn composite_from_branch(state: &BranchState, n_ancilla: usize) -> CompositeState {
    match state {
        BranchState::Single(s) => CompositeState::new_single(s.clone(), n_ancilla),
        BranchState::Two(t) => CompositeState::new_two(t.clone(), n_ancilla),
    }
}

fn apply_joint_mat(state: &BranchState, mat: &Mat4) -> Result<BranchState> {
    let two = state.as_two().ok_or(Error::GridMismatch)?;
    let field = zak_forward_two(two)?;
    let mat = *mat;
    let out = apply_fiberwise_two(&field, move |_, _, _, _| mat);
    Ok(BranchState::Two(zak_inverse_two(&out)?))
}

fn decode_branch(state: &BranchState) -> Result<LogicalReadout> {
    match state {
        BranchState::Single(s) => decode_logical(s),
        BranchState::Two(t) => decode_logical_two(t),
    }
}

fn branch_overlap(a: &BranchState, b: &BranchState) -> Result<f64> {
    match (a, b) {
        (BranchState::Single(x), BranchState::Single(y)) => x.overlap(y),
        (BranchState::Two(x), BranchState::Two(y)) => x.overlap(y),
        _ => Err(Error::GridMismatch),
    }
}

type Frontier = Vec<(Vec<u8>, BranchState)>;

fn apply_step(step: &ScheduleStep, frontier: Frontier, warnings: &mut Vec<String>) -> Result<Frontier> {
    match step {
        ScheduleStep::ExactFiber { mode, op, .. } => {
            let op = ControlledOp::Fiber(op.clone());
            frontier
                .into_iter()
                .map(|(bits, st)| Ok((bits, st.apply(&op, *mode)?)))
                .collect()
        }
        ScheduleStep::ExactJoint { mat, .. } => frontier
            .into_iter()
            .map(|(bits, st)| Ok((bits, apply_joint_mat(&st, mat)?)))
            .collect(),
        ScheduleStep::AncillaPair {
            mode,
            u1,
            u2,
            policy,
            label,
        } => {
            let op1 = ControlledOp::Fiber(u1.clone());
            let op2 = ControlledOp::Fiber(u2.clone());
            let (_, step_warnings) = defect_report(&[("U1", &op1), ("U2", &op2)]);
            warnings.extend(step_warnings.into_iter().map(|w| format!("{label}: {w}")));
            let mut out = Vec::with_capacity(frontier.len() * 2);
            for (bits, st) in frontier {
                let mut comp = composite_from_branch(&st, 1);
                comp.hadamard(0)?;
                comp.controlled(0, 0, &op1, *mode)?;
                comp.controlled(0, 1, &op2, *mode)?;
                comp.hadamard(0)?;
                for rec in comp.measure() {
                    let rec = apply_frame_correction(&rec, policy)?;
                    let mut b = bits.clone();
                    b.extend_from_slice(&rec.bits);
                    out.push((b, rec.state));
                }
            }
            Ok(out)
        }
        ScheduleStep::AncillaQuad {
            u1,
            u2,
            u3,
            u4,
            policy,
            label,
        } => {
            let ops = [
                ControlledOp::Fiber(u1.clone()),
                ControlledOp::Fiber(u2.clone()),
                ControlledOp::Fiber(u3.clone()),
                ControlledOp::Fiber(u4.clone()),
            ];
            let named = [
                ("U1", &ops[0]),
                ("U2", &ops[1]),
                ("U3", &ops[2]),
                ("U4", &ops[3]),
            ];
            let (_, step_warnings) = defect_report(&named);
            warnings.extend(step_warnings.into_iter().map(|w| format!("{label}: {w}")));
            let mut out = Vec::with_capacity(frontier.len() * 4);
            for (bits, st) in frontier {
                let two = st.as_two().ok_or(Error::GridMismatch)?;
                let run = run_two_qubit_circuit(two, &ops[0], &ops[1], &ops[2], &ops[3])?;
                for rec in run.records {
                    let rec = apply_frame_correction(&rec, policy)?;
                    let mut b = bits.clone();
                    b.extend_from_slice(&rec.bits);
                    out.push((b, rec.state));
                }
            }
            Ok(out)
        }
    }
}

/// Runs a schedule on an input branch. The input arity must match the
/// schedule: a single mode for one qubit, a mode pair for two.
pub fn execute(schedule: &CompiledSchedule, input: &BranchState) -> Result<Execution> {
    let modes = match input {
        BranchState::Single(_) => 1,
        BranchState::Two(_) => 2,
    };
    if modes != schedule.qubits {
        return Err(Error::DimensionMismatch {
            a: schedule.qubits,
            b: modes,
        });
    }
    let mut warnings = Vec::new();
    let mut frontier: Frontier = vec![(Vec::new(), input.clone())];
    for step in &schedule.steps {
        frontier = apply_step(step, frontier, &mut warnings)?;
        if frontier.len() > MAX_OUTCOMES {
            return Err(Error::BudgetExceeded {
                dim: frontier.len(),
                max: MAX_OUTCOMES,
            });
        }
    }
    let mut outcomes = Vec::with_capacity(frontier.len());
    let mut total = 0.0;
    for (bits, state) in frontier {
        let probability = state.norm().powi(2);
        total += probability;
        let readout = if probability > READOUT_FLOOR {
            Some(decode_branch(&state)?)
        } else {
            None
        };
        outcomes.push(ExecutedOutcome {
            bits,
            probability,
            state,
            readout,
        });
    }
    Ok(Execution {
        qubits: schedule.qubits,
        outcomes,
        total_probability: total,
        warnings,
    })
}

/// Runs the same circuit through both backends and scores every ancilla
/// outcome against the exact branch.
pub fn compare_backends(
    ir: &CircuitIr,
    input: &BranchState,
    weight: &WeightSpec,
) -> Result<BackendComparison> {
    let exact_exec = execute(&compile(ir, Backend::Exact, weight)?, input)?;
    let exact = exact_exec
        .outcomes
        .into_iter()
        .next()
        .expect("exact schedules keep a single branch");
    let ancilla = execute(&compile(ir, Backend::Ancilla, weight)?, input)?;
    let mut outcomes = Vec::with_capacity(ancilla.outcomes.len());
    for out in &ancilla.outcomes {
        let cv_overlap = if out.probability > READOUT_FLOOR {
            Some(branch_overlap(&out.state, &exact.state)?)
        } else {
            None
        };
        let decode_fidelity = match (&out.readout, &exact.readout) {
            (Some(a), Some(b)) => Some(logical_fidelity(a.rho(), b.rho())?),
            _ => None,
        };
        outcomes.push(OutcomeComparison {
            bits: out.bits.clone(),
            probability: out.probability,
            cv_overlap,
            decode_fidelity,
        });
    }
    Ok(BackendComparison {
        exact,
        outcomes,
        total_probability: ancilla.total_probability,
        warnings: ancilla.warnings,
    })
}
