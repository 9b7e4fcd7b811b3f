//! Ancilla-driven circuits: a two-level ancilla is put in superposition,
//! steers controlled operations on the mode, and is read out in the X
//! basis, leaving one outcome branch per ancilla label.
//!
//! The engine keeps every branch amplitude (no sampling). A composite
//! state is a map from ancilla bit strings to unnormalized mode states;
//! ancilla Hadamards and CNOTs reshuffle the map, controlled operations
//! act inside single branches, and measurement just reads the map out as
//! outcome records. With one ancilla carrying U1 on the |0⟩ branch and U2
//! on the |1⟩ branch, the interferometer yields
//! branch_i = ½(U1 + (−1)^i U2)ψ, so sums and differences of operators
//! that are individually easy to control become measurable maps. The
//! rotation pairs built here make that concrete: U_{1,2} ∝ R ± R′ with
//! complementary weights, whose branches recover weighted rotations and,
//! after an outcome-conditioned frame flip, agree on the decoded qubit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{
    make_weight, rotation_fiber_op, Axis, FiberOp, GammaOperator, WeightFamily, WeightSpec,
};
use crate::grid::{apply_gaussian_gate, CvState, GaussianGate, GridSpec, TwoModeState};
use crate::zak::{apply_fiberwise_two, mat4_kron, zak_forward_two, zak_inverse_two, Mat2};

/// Threshold above which a controlled operator is flagged as non-unitary.
pub const UNITARITY_WARN_TOLERANCE: f64 = 1e-10;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// An operation the ancilla can condition on: either an exact Gaussian
/// gate or a fiberwise 2×2 operator.
#[derive(Debug, Clone)]
pub enum ControlledOp {
    Gaussian(GaussianGate),
    Fiber(FiberOp),
}

impl ControlledOp {
    /// Measured deviation from norm preservation. Gaussian gates are pure
    /// spectral phases, so their defect is identically zero.
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            ControlledOp::Gaussian(_) => 0.0,
            ControlledOp::Fiber(op) => op.unitarity_defect(),
        }
    }

    fn apply_single(&self, state: &CvState) -> Result<CvState> {
        match self {
            ControlledOp::Gaussian(gate) => apply_gaussian_gate(state, gate),
            ControlledOp::Fiber(op) => op.apply_state(state),
        }
    }

    fn apply_on_mode(&self, state: &TwoModeState, mode: usize) -> Result<TwoModeState> {
        match self {
            ControlledOp::Gaussian(gate) => state.apply_gaussian_on_mode(mode, gate),
            ControlledOp::Fiber(op) => apply_fiber_on_mode(state, op, mode),
        }
    }
}

/// Applies a fiberwise operator to one mode of a joint state, leaving the
/// other mode untouched.
pub fn apply_fiber_on_mode(state: &TwoModeState, op: &FiberOp, mode: usize) -> Result<TwoModeState> {
    if state.grid(mode) != op.grid() {
        return Err(Error::GridMismatch);
    }
    let eye: Mat2 = [
        [Complex64::ONE, Complex64::ZERO],
        [Complex64::ZERO, Complex64::ONE],
    ];
    let field = zak_forward_two(state)?;
    let out = apply_fiberwise_two(&field, |sa, ma, sb, mb| {
        if mode == 0 {
            mat4_kron(&op.matrix(sa, ma), &eye)
        } else {
            mat4_kron(&eye, &op.matrix(sb, mb))
        }
    });
    zak_inverse_two(&out)
}

/// One unnormalized branch of a composite state: a single mode or a pair.
#[derive(Debug, Clone)]
pub enum BranchState {
    Single(CvState),
    Two(TwoModeState),
}

impl BranchState {
    pub fn norm(&self) -> f64 {
        match self {
            BranchState::Single(s) => s.norm(),
            BranchState::Two(s) => s.norm(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> BranchState {
        match self {
            BranchState::Single(s) => BranchState::Single(s.scaled(c)),
            BranchState::Two(s) => BranchState::Two(s.scaled(c)),
        }
    }

    pub fn add(&self, other: &BranchState) -> Result<BranchState> {
        match (self, other) {
            (BranchState::Single(a), BranchState::Single(b)) => {
                Ok(BranchState::Single(a.add(b)?))
            }
            (BranchState::Two(a), BranchState::Two(b)) => Ok(BranchState::Two(a.add(b)?)),
            _ => Err(Error::GridMismatch),
        }
    }

    pub fn sub(&self, other: &BranchState) -> Result<BranchState> {
        self.add(&other.scaled(-Complex64::ONE))
    }

    pub fn as_single(&self) -> Option<&CvState> {
        match self {
            BranchState::Single(s) => Some(s),
            BranchState::Two(_) => None,
        }
    }

    pub fn as_two(&self) -> Option<&TwoModeState> {
        match self {
            BranchState::Single(_) => None,
            BranchState::Two(s) => Some(s),
        }
    }

    pub fn apply(&self, op: &ControlledOp, mode: usize) -> Result<BranchState> {
        match self {
            BranchState::Single(s) => Ok(BranchState::Single(op.apply_single(s)?)),
            BranchState::Two(s) => Ok(BranchState::Two(op.apply_on_mode(s, mode)?)),
        }
    }

    fn zero_like(&self) -> BranchState {
        match self {
            BranchState::Single(s) => BranchState::Single(CvState::zero(s.grid())),
            BranchState::Two(s) => BranchState::Two(TwoModeState::zero(s.grid(0), s.grid(1))),
        }
    }
}

/// Ancilla qubits joined to mode amplitudes: one unnormalized branch per
/// ancilla bit string (ancilla 0 is the high bit).
#[derive(Debug, Clone)]
pub struct CompositeState {
    n_ancilla: usize,
    branches: Vec<BranchState>,
}

impl CompositeState {
    /// All amplitude starts in the all-zeros ancilla branch.
    pub fn new_single(state: CvState, n_ancilla: usize) -> CompositeState {
        CompositeState::start(BranchState::Single(state), n_ancilla)
    }

    pub fn new_two(state: TwoModeState, n_ancilla: usize) -> CompositeState {
        CompositeState::start(BranchState::Two(state), n_ancilla)
    }

    fn start(state: BranchState, n_ancilla: usize) -> CompositeState {
        let mut branches = vec![state.zero_like(); 1 << n_ancilla];
        branches[0] = state;
        CompositeState {
            n_ancilla,
            branches,
        }
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn branch(&self, bits: usize) -> &BranchState {
        &self.branches[bits]
    }

    pub fn total_norm_sqr(&self) -> f64 {
        self.branches.iter().map(|b| b.norm().powi(2)).sum()
    }

    fn bit_mask(&self, anc: usize) -> usize {
        1 << (self.n_ancilla - 1 - anc)
    }

    /// Hadamard on one ancilla: |0⟩ → (|0⟩+|1⟩)/√2, |1⟩ → (|0⟩−|1⟩)/√2.
    pub fn hadamard(&mut self, anc: usize) -> Result<()> {
        let mask = self.bit_mask(anc);
        let scale = Complex64::new(FRAC_1_SQRT_2, 0.0);
        for lo in 0..self.branches.len() {
            if lo & mask != 0 {
                continue;
            }
            let hi = lo | mask;
            let a = self.branches[lo].clone();
            let b = self.branches[hi].clone();
            self.branches[lo] = a.add(&b)?.scaled(scale);
            self.branches[hi] = a.sub(&b)?.scaled(scale);
        }
        Ok(())
    }

    /// CNOT between two ancillas (branch relabeling).
    pub fn cnot_ancilla(&mut self, control: usize, target: usize) {
        let cm = self.bit_mask(control);
        let tm = self.bit_mask(target);
        for i in 0..self.branches.len() {
            if i & cm != 0 && i & tm == 0 {
                self.branches.swap(i, i | tm);
            }
        }
    }

    /// Applies `op` to mode `mode` inside every branch whose ancilla `anc`
    /// reads `bit`.
    pub fn controlled(&mut self, anc: usize, bit: u8, op: &ControlledOp, mode: usize) -> Result<()> {
        let mask = self.bit_mask(anc);
        for i in 0..self.branches.len() {
            let set = (i & mask != 0) as u8;
            if set == bit {
                self.branches[i] = self.branches[i].apply(op, mode)?;
            }
        }
        Ok(())
    }

    /// Reads the ancillas out in the computational basis: one record per
    /// bit string, carrying the unnormalized branch.
    pub fn measure(self) -> Vec<OutcomeRecord> {
        let n = self.n_ancilla;
        self.branches
            .into_iter()
            .enumerate()
            .map(|(i, state)| {
                let bits: Vec<u8> = (0..n).map(|a| ((i >> (n - 1 - a)) & 1) as u8).collect();
                OutcomeRecord {
                    probability: state.norm().powi(2),
                    bits,
                    state,
                    frame: FrameTag::Identity,
                }
            })
            .collect()
    }
}

/// Frame relabeling applied to a branch after the ancilla readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameTag {
    Identity,
    AxisFlip(Axis),
    ZBoth,
}

/// Rule mapping outcome bits to the frame relabeling they require.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FramePolicy {
    /// No correction for any outcome.
    None,
    /// Apply the unit-weight flip about `axis` when the bit parity is odd.
    FlipOnOdd(Axis),
    /// Apply Z to both modes when the bit parity is odd.
    ZBothOnOdd,
}

/// One ancilla readout: the bits, the branch norm² (its probability when
/// the controlled operators preserve norm), the unnormalized branch state,
/// and the frame tag already applied to it.
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub bits: Vec<u8>,
    pub probability: f64,
    pub state: BranchState,
    pub frame: FrameTag,
}

impl OutcomeRecord {
    pub fn parity(&self) -> u8 {
        self.bits.iter().fold(0, |acc, b| acc ^ b)
    }
}

fn unit_flip(grid: GridSpec, axis: Axis) -> Result<FiberOp> {
    let ones = make_weight(grid, WeightFamily::Constant(1.0))?;
    GammaOperator::new(grid, axis, ones)?.fiber_op()
}

/// Applies the outcome-conditioned relabeling to a record and tags it.
/// Even-parity outcomes pass through untouched under every policy.
pub fn apply_frame_correction(record: &OutcomeRecord, policy: &FramePolicy) -> Result<OutcomeRecord> {
    let mut out = record.clone();
    if record.parity() == 0 {
        return Ok(out);
    }
    match policy {
        FramePolicy::None => {}
        FramePolicy::FlipOnOdd(axis) => {
            out.state = match &record.state {
                BranchState::Single(s) => {
                    BranchState::Single(unit_flip(s.grid(), *axis)?.apply_state(s)?)
                }
                BranchState::Two(s) => {
                    let fa = unit_flip(s.grid(0), *axis)?;
                    let fb = unit_flip(s.grid(1), *axis)?;
                    BranchState::Two(apply_fiber_on_mode(
                        &apply_fiber_on_mode(s, &fa, 0)?,
                        &fb,
                        1,
                    )?)
                }
            };
            out.frame = FrameTag::AxisFlip(*axis);
        }
        FramePolicy::ZBothOnOdd => {
            out.state = match &record.state {
                BranchState::Single(s) => {
                    BranchState::Single(unit_flip(s.grid(), Axis::Z)?.apply_state(s)?)
                }
                BranchState::Two(s) => {
                    let fz0 = unit_flip(s.grid(0), Axis::Z)?;
                    let fz1 = unit_flip(s.grid(1), Axis::Z)?;
                    BranchState::Two(apply_fiber_on_mode(
                        &apply_fiber_on_mode(s, &fz0, 0)?,
                        &fz1,
                        1,
                    )?)
                }
            };
            out.frame = FrameTag::ZBoth;
        }
    }
    Ok(out)
}

/// Everything one circuit run reports: the outcome records in bit order,
/// the measured defect of each controlled operator, warnings for operators
/// that are not norm-preserving, and the total outcome probability (1 up
/// to roundoff when all operators are unitary).
#[derive(Debug, Clone)]
pub struct CircuitRun {
    pub records: Vec<OutcomeRecord>,
    pub unitarity_defects: Vec<f64>,
    pub warnings: Vec<String>,
    pub total_probability: f64,
}

pub(crate) fn defect_report(ops: &[(&str, &ControlledOp)]) -> (Vec<f64>, Vec<String>) {
    let mut defects = Vec::with_capacity(ops.len());
    let mut warnings = Vec::new();
    for (name, op) in ops {
        let d = op.unitarity_defect();
        if d > UNITARITY_WARN_TOLERANCE {
            warnings.push(format!(
                "controlled operator {name} is not norm-preserving (defect {d:.3e}); \
                 outcome probabilities will not sum to 1"
            ));
        }
        defects.push(d);
    }
    (defects, warnings)
}

fn check_finite_single(state: &CvState) -> Result<()> {
    for a in state.amplitudes() {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::NonFinite(if a.re.is_finite() { a.im } else { a.re }));
        }
    }
    Ok(())
}

/// Runs the one-ancilla interferometer: H, then U1 on the ancilla-|0⟩
/// branch and U2 on the ancilla-|1⟩ branch, then the final H and readout.
/// The branches satisfy branch_i = ½(U1 + (−1)^i U2)ψ exactly.
pub fn run_single_qubit_circuit(
    psi: &CvState,
    u1: &ControlledOp,
    u2: &ControlledOp,
) -> Result<CircuitRun> {
    check_finite_single(psi)?;
    let (unitarity_defects, warnings) = defect_report(&[("U1", u1), ("U2", u2)]);
    let mut composite = CompositeState::new_single(psi.clone(), 1);
    composite.hadamard(0)?;
    composite.controlled(0, 0, u1, 0)?;
    composite.controlled(0, 1, u2, 0)?;
    composite.hadamard(0)?;
    let records = composite.measure();
    let total_probability = records.iter().map(|r| r.probability).sum();
    Ok(CircuitRun {
        records,
        unitarity_defects,
        warnings,
        total_probability,
    })
}

/// Runs the two-ancilla, two-mode interferometer: the ancillas are
/// entangled into (|00⟩+|11⟩)/√2, U3⊗U4 acts on the |00⟩ branch and
/// U1⊗U2 on the |11⟩ branch, then H⊗H and readout. The branches satisfy
/// branch_(i,j) = (1/(2√2)) (U3⊗U4 + (−1)^{i⊕j} U1⊗U2) ψ exactly.
pub fn run_two_qubit_circuit(
    psi: &TwoModeState,
    u1: &ControlledOp,
    u2: &ControlledOp,
    u3: &ControlledOp,
    u4: &ControlledOp,
) -> Result<CircuitRun> {
    let (unitarity_defects, warnings) =
        defect_report(&[("U1", u1), ("U2", u2), ("U3", u3), ("U4", u4)]);
    let mut composite = CompositeState::new_two(psi.clone(), 2);
    composite.hadamard(0)?;
    composite.cnot_ancilla(0, 1);
    composite.controlled(0, 0, u3, 0)?;
    composite.controlled(1, 0, u4, 1)?;
    composite.controlled(0, 1, u1, 0)?;
    composite.controlled(1, 1, u2, 1)?;
    composite.hadamard(0)?;
    composite.hadamard(1)?;
    let records = composite.measure();
    let total_probability = records.iter().map(|r| r.probability).sum();
    Ok(CircuitRun {
        records,
        unitarity_defects,
        warnings,
        total_probability,
    })
}

/// Builds the interferometric rotation pair
/// U_{1,2} = (1/√2)(R ± R′) with R = ζ e^{iα n̂·σ} about `axis` and
/// R′ = ζ′ e^{i(α−π/2) n̂′·σ} about `axis_prime`, fiberwise. Requires the
/// weights to be complementary (ζ² + ζ′² = 1 on every fiber). Returns the
/// pair and the measured defect max‖U_k†U_k − 1‖; for a shared axis the
/// defect is exactly ½ — the pair wastes half the amplitude, which is why
/// schedules that need unitarity rescale by √2.
pub fn make_rotation_pair(
    grid: GridSpec,
    axis: Axis,
    alpha: f64,
    zeta: &WeightSpec,
    zeta_prime: &WeightSpec,
    axis_prime: Axis,
) -> Result<(FiberOp, FiberOp, f64)> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite(alpha));
    }
    let mut worst: f64 = 0.0;
    for s in 0..grid.half_sectors() {
        for m in 0..grid.period_count() {
            let z = zeta.value(s, m);
            let zp = zeta_prime.value(s, m);
            worst = worst.max((z * z + zp * zp - 1.0).abs());
        }
    }
    if worst > 1e-12 {
        return Err(Error::WeightsNotComplementary(worst));
    }
    let r = rotation_fiber_op(grid, axis, alpha, zeta)?;
    let rp = rotation_fiber_op(grid, axis_prime, alpha - std::f64::consts::FRAC_PI_2, zeta_prime)?;
    let scale = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let u1 = r.add(&rp)?.scaled(scale);
    let u2 = r.sub(&rp)?.scaled(scale);
    let defect = u1.unitarity_defect().max(u2.unitarity_defect());
    Ok((u1, u2, defect))
}
