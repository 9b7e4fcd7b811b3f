//! Desk-scale simulator for quantum information carried by a single
//! continuous variable, organized around modular coordinates.
//!
//! A periodic variable θ splits into an integer winding number and a
//! modular remainder, θ = 2πN + θ̄; its conjugate splits as k = M + k̄.
//! On a finite grid this pairing turns one mode into a stack of
//! two-level "fibers", and a qubit can be stored coherently across the
//! stack. The crate provides:
//!
//! - [`grid`]: the discretized phase space, position/momentum transforms,
//!   and the exact algebra of Gaussian gates (shifts, boosts, shears);
//! - [`zak`]: the discrete Zak transform, fiber views, and per-fiber
//!   qubit parameters;
//! - [`gamma`]: weighted Pauli-like fiber operators Γ, their rotations,
//!   and the complementary pairs that complete a measurement;
//! - [`codec`]: logical encode/decode between qubit states and mode
//!   states, envelopes, fidelities, and Bloch readout;
//! - [`ancilla`]: interferometric circuits that enact those operators with
//!   an ancilla qubit and postselection, including two-mode variants;
//! - [`compiler`]: a tiny text circuit format compiled either to exact
//!   fiber operations or to ancilla schedules with frame corrections;
//! - [`dense`]: dense-matrix probes used to cross-check every structured
//!   operator against brute force;
//! - [`verify`]: the self-check suites exposed by the command line tool.

pub mod ancilla;
pub mod codec;
pub mod compiler;
pub mod dense;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod verify;
pub mod zak;

pub use error::{Error, Result};
pub use grid::{
    apply_gaussian_gate, modular_decompose_k, modular_decompose_theta, CvState, GateFactor,
    GaussianGate, GridSpec, Representation, TwoModeState,
};
pub use zak::{
    apply_fiberwise, apply_fiberwise_two, extract_qubit_params, rebuild_field, zak_forward,
    zak_forward_two, zak_inverse, zak_inverse_two, FiberQubit, JointField, Mat2, Mat4,
    ModularField, QubitParams,
};
pub use gamma::{
    apply_gamma, apply_modulated_identity, apply_rotation, apply_two_mode_gamma, make_weight,
    povm_pair, rotation_fiber_op, Axis, FiberOp, GammaOperator, TwoModeTerm, WeightFamily,
    WeightSpec,
};
pub use codec::{
    bloch_readout, decode_logical, decode_logical_two, encode_logical, logical_fidelity,
    make_envelope, Envelope, EnvelopeFamily, LogicalReadout,
};
pub use dense::{compare, materialize, materialize_two, zak_matrix, DenseOperator};
pub use ancilla::{
    apply_frame_correction, make_rotation_pair, run_single_qubit_circuit, run_two_qubit_circuit,
    BranchState, CircuitRun, CompositeState, ControlledOp, FramePolicy, FrameTag, OutcomeRecord,
};
pub use compiler::{
    compare_backends, compile, execute, parse_circuit, Backend, BackendComparison, CircuitIr,
    CompiledSchedule, ExecutedOutcome, Execution, GateOp, OutcomeComparison, ScheduleStep,
};
