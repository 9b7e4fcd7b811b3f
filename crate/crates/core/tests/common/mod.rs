//! Shared helpers for integration tests: a plain 2ⁿ statevector simulator
//! used as the ideal-circuit reference, plus encoded-input builders.

#![allow(dead_code)]

use modvar::{encode_logical, CircuitIr, Envelope, GateOp, TwoModeState};
use nalgebra::DMatrix;
use num_complex::Complex64;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// e^{iβ n̂·σ} = cos β · 1 + i sin β · n̂·σ for a unit axis.
fn rotation_matrix(axis: [f64; 3], beta: f64) -> Mat2 {
    let [nx, ny, nz] = axis;
    let (cb, sb) = (beta.cos(), beta.sin());
    let is = c(0.0, sb);
    [
        [c(cb, 0.0) + is * c(nz, 0.0), is * c(nx, -ny)],
        [is * c(nx, ny), c(cb, 0.0) - is * c(nz, 0.0)],
    ]
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn single_matrix(gate: &GateOp) -> Option<(usize, Mat2)> {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match gate {
        GateOp::X(q) => Some((*q, [[zero, one], [one, zero]])),
        GateOp::Y(q) => Some((*q, [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]])),
        GateOp::Z(q) => Some((*q, [[one, zero], [zero, -one]])),
        GateOp::H(q) => Some((*q, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])),
        GateOp::RX(q, b) => Some((*q, rotation_matrix([1.0, 0.0, 0.0], *b))),
        GateOp::RY(q, b) => Some((*q, rotation_matrix([0.0, 1.0, 0.0], *b))),
        GateOp::RZ(q, b) => Some((*q, rotation_matrix([0.0, 0.0, 1.0], *b))),
        GateOp::RN(q, axis, b) => Some((*q, rotation_matrix(unit(*axis), *b))),
        GateOp::CNOT(_, _) | GateOp::CZ(_, _) => None,
    }
}

fn apply_single(v: &mut [Complex64], n: usize, q: usize, m: &Mat2) {
    let mask = 1usize << (n - 1 - q);
    for i in 0..v.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (v[i], v[j]);
            v[i] = m[0][0] * a + m[0][1] * b;
            v[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Runs a parsed circuit on a 2ⁿ input vector with the textbook gate
/// semantics (qubit 0 is the high bit; rotations mean e^{iβ n̂·σ}).
pub fn ideal_output(ir: &CircuitIr, input: &[Complex64]) -> Vec<Complex64> {
    let n = ir.qubits;
    assert_eq!(input.len(), 1 << n);
    let mut v = input.to_vec();
    for gate in &ir.gates {
        if let Some((q, m)) = single_matrix(gate) {
            apply_single(&mut v, n, q, &m);
            continue;
        }
        match gate {
            GateOp::CNOT(cq, tq) => {
                let cmask = 1usize << (n - 1 - cq);
                let tmask = 1usize << (n - 1 - tq);
                for i in 0..v.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        v.swap(i, i | tmask);
                    }
                }
            }
            GateOp::CZ(aq, bq) => {
                let amask = 1usize << (n - 1 - aq);
                let bmask = 1usize << (n - 1 - bq);
                for (i, x) in v.iter_mut().enumerate() {
                    if i & amask != 0 && i & bmask != 0 {
                        *x = -*x;
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    v
}

/// The logical qubit vector (cos(χ/2), e^{iφ} sin(χ/2)).
pub fn qubit_vec(chi: f64, phi: f64) -> Vec<Complex64> {
    vec![
        c((chi / 2.0).cos(), 0.0),
        Complex64::from_polar((chi / 2.0).sin(), phi),
    ]
}

/// Kronecker product with the first factor on the high bit.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// The pure density matrix v v† of a state vector.
pub fn pure_density(v: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.len(), v.len(), |r, col| v[r] * v[col].conj())
}

/// Encodes a product two-mode state from per-mode logical angles.
pub fn product_state(env: &Envelope, a: (f64, f64), b: (f64, f64)) -> TwoModeState {
    let sa = encode_logical(a.0, a.1, env).unwrap();
    let sb = encode_logical(b.0, b.1, env).unwrap();
    let g = env.grid();
    let dim = g.dim();
    let mut amps = vec![c(0.0, 0.0); dim * dim];
    for (ja, va) in sa.amplitudes().iter().enumerate() {
        for (jb, vb) in sb.amplitudes().iter().enumerate() {
            amps[ja * dim + jb] = va * vb;
        }
    }
    TwoModeState::from_amplitudes(g, g, amps).unwrap()
}

/// Largest entry-wise distance between two square matrices.
pub fn matrix_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..a.nrows() {
        for col in 0..a.ncols() {
            worst = worst.max((a[(r, col)] - b[(r, col)]).norm());
        }
    }
    worst
}
