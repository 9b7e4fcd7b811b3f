//! Weighted Pauli-like operators on the fiber stack.
//!
//! A Γ-operator acts on each fiber (s, m) as ζ(s, m)·(n̂·σ), a hermitian
//! 2×2 block scaled by a real weight. With |ζ| ≤ 1 the pair (Γ, Γ′) with
//! ζ′ = √(1−ζ²) completes a measurement: Γ†Γ + Γ′†Γ′ = 1. The same fiber
//! algebra gives the modulated identity 1_ζ and the rotation-like maps
//! ζ·e^{iβ n̂·σ} = cos β·1_ζ + i sin β·Γ, which compose by adding angles
//! and multiplying weights even though none of them is unitary for
//! non-constant ζ.
//!
//! An optional phase twist τ(s, m) replaces σ_± by e^{±iτ}σ_± inside the
//! block. It exists because a half-period shift acts on a fiber as σ_x only
//! up to a k̄-dependent phase: ½(e^{iπk̂} + e^{−iπk̂}) equals the Γ_x with
//! ζ = cos(πk̄) and τ = −πk̄, and the twist lets that operator be written
//! down exactly.
//!
//! Applications never renormalize; every apply returns the output norm and
//! leaves the caller to decide what a shrinking branch means.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{CvState, GridSpec, TwoModeState};
use crate::zak::{
    apply_fiberwise, apply_fiberwise_two, mat2_mul, mat4_kron, zak_forward, zak_forward_two,
    zak_inverse, zak_inverse_two, Mat2, ModularField,
};

/// Rotation axis on the fiber Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    X,
    Y,
    Z,
    Custom(f64, f64, f64),
}

impl Axis {
    /// The unit 3-vector, normalizing custom axes.
    pub fn unit(&self) -> Result<[f64; 3]> {
        let v = match *self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
            Axis::Custom(x, y, z) => [x, y, z],
        };
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::BadAxis);
        }
        Ok([v[0] / norm, v[1] / norm, v[2] / norm])
    }
}

/// Named weight profiles ζ(s, m) over the half-grid.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// ζ ≡ c.
    Constant(f64),
    /// ζ = cos θ̄_s.
    CosTheta,
    /// ζ = sin θ̄_s.
    SinTheta,
    /// ζ = cos(π k̄_m).
    CosPiK,
    /// ζ = cos(θ̄_s − π k̄_m).
    CosThetaMinusPiK,
    /// Explicit half-grid table, s-major.
    Custom(Vec<f64>),
}

/// A tabulated weight: the family it came from plus its values on the
/// half-grid, s-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    grid: GridSpec,
    family: WeightFamily,
    table: Vec<f64>,
}

/// Tabulates a weight family on the half-grid of `grid`.
pub fn make_weight(grid: GridSpec, family: WeightFamily) -> Result<WeightSpec> {
    let half = grid.half_len();
    let table = match &family {
        WeightFamily::Constant(c) => {
            if !c.is_finite() {
                return Err(Error::WeightNotReal);
            }
            vec![*c; half]
        }
        WeightFamily::Custom(values) => {
            if values.len() != half {
                return Err(Error::DimensionMismatch {
                    a: values.len(),
                    b: half,
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::WeightNotReal);
            }
            values.clone()
        }
        closed_form => {
            let mut table = Vec::with_capacity(half);
            for s in 0..grid.half_sectors() {
                for m in 0..grid.period_count() {
                    let theta = grid.modular_theta(s);
                    let kbar = grid.modular_k(m);
                    table.push(match closed_form {
                        WeightFamily::CosTheta => theta.cos(),
                        WeightFamily::SinTheta => theta.sin(),
                        WeightFamily::CosPiK => (PI * kbar).cos(),
                        WeightFamily::CosThetaMinusPiK => (theta - PI * kbar).cos(),
                        _ => unreachable!(),
                    });
                }
            }
            table
        }
    };
    Ok(WeightSpec {
        grid,
        family,
        table,
    })
}

impl WeightSpec {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, s: usize, m: usize) -> f64 {
        self.table[self.grid.half_index(s, m)]
    }

    /// The complementary weight ζ′ = √(1 − ζ²), defined when |ζ| ≤ 1.
    pub fn completed(&self) -> Result<WeightSpec> {
        let max = self.table.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if max > 1.0 + 1e-12 {
            return Err(Error::NotCompletable(max));
        }
        let table: Vec<f64> = self
            .table
            .iter()
            .map(|v| (1.0 - v * v).max(0.0).sqrt())
            .collect();
        Ok(WeightSpec {
            grid: self.grid,
            family: WeightFamily::Custom(table.clone()),
            table,
        })
    }
}

/// A per-fiber 2×2 operator table, s-major over the half-grid. This is the
/// common currency for everything that acts fiberwise: Γ-operators and
/// rotations lower to it, the ancilla engine branches over it, and the
/// dense probes materialize it.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberOp {
    grid: GridSpec,
    mats: Vec<Mat2>,
}

impl FiberOp {
    pub fn from_mats(grid: GridSpec, mats: Vec<Mat2>) -> Result<Self> {
        if mats.len() != grid.half_len() {
            return Err(Error::DimensionMismatch {
                a: mats.len(),
                b: grid.half_len(),
            });
        }
        Ok(FiberOp { grid, mats })
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(usize, usize) -> Mat2,
    {
        let mut mats = Vec::with_capacity(grid.half_len());
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                mats.push(f(s, m));
            }
        }
        FiberOp { grid, mats }
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self::constant(
            grid,
            [
                [Complex64::ONE, Complex64::ZERO],
                [Complex64::ZERO, Complex64::ONE],
            ],
        )
    }

    /// The same matrix on every fiber.
    pub fn constant(grid: GridSpec, mat: Mat2) -> Self {
        FiberOp {
            grid,
            mats: vec![mat; grid.half_len()],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn matrix(&self, s: usize, m: usize) -> Mat2 {
        self.mats[self.grid.half_index(s, m)]
    }

    /// Applies the table to a modular field.
    pub fn apply(&self, field: &ModularField) -> Result<ModularField> {
        if field.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(apply_fiberwise(field, |s, m| self.matrix(s, m)))
    }

    /// Applies the table to a position/momentum state via the Zak domain.
    pub fn apply_state(&self, state: &CvState) -> Result<CvState> {
        if state.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let field = zak_forward(state)?;
        zak_inverse(&self.apply(&field)?)
    }

    /// Operator product `self ∘ rhs` (rhs acts first).
    pub fn compose(&self, rhs: &FiberOp) -> Result<FiberOp> {
        if self.grid != rhs.grid {
            return Err(Error::GridMismatch);
        }
        Ok(FiberOp {
            grid: self.grid,
            mats: self
                .mats
                .iter()
                .zip(rhs.mats.iter())
                .map(|(a, b)| mat2_mul(a, b))
                .collect(),
        })
    }

    pub fn adjoint(&self) -> FiberOp {
        FiberOp {
            grid: self.grid,
            mats: self
                .mats
                .iter()
                .map(|m| {
                    [
                        [m[0][0].conj(), m[1][0].conj()],
                        [m[0][1].conj(), m[1][1].conj()],
                    ]
                })
                .collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> FiberOp {
        FiberOp {
            grid: self.grid,
            mats: self
                .mats
                .iter()
                .map(|m| {
                    [
                        [m[0][0] * c, m[0][1] * c],
                        [m[1][0] * c, m[1][1] * c],
                    ]
                })
                .collect(),
        }
    }

    pub fn add(&self, rhs: &FiberOp) -> Result<FiberOp> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &FiberOp) -> Result<FiberOp> {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &FiberOp, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<FiberOp> {
        if self.grid != rhs.grid {
            return Err(Error::GridMismatch);
        }
        Ok(FiberOp {
            grid: self.grid,
            mats: self
                .mats
                .iter()
                .zip(rhs.mats.iter())
                .map(|(a, b)| {
                    [
                        [f(a[0][0], b[0][0]), f(a[0][1], b[0][1])],
                        [f(a[1][0], b[1][0]), f(a[1][1], b[1][1])],
                    ]
                })
                .collect(),
        })
    }

    /// max entry of |M − M†| over all fibers.
    pub fn hermiticity_defect(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| {
                let d1 = (m[0][0] - m[0][0].conj()).norm();
                let d2 = (m[1][1] - m[1][1].conj()).norm();
                let d3 = (m[0][1] - m[1][0].conj()).norm();
                d1.max(d2).max(d3)
            })
            .fold(0.0, f64::max)
    }

    /// max entry of |M†M − 1| over all fibers.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().compose(self).expect("same grid");
        gram.mats
            .iter()
            .map(|m| {
                let d1 = (m[0][0] - Complex64::ONE).norm();
                let d2 = (m[1][1] - Complex64::ONE).norm();
                let d3 = m[0][1].norm().max(m[1][0].norm());
                d1.max(d2).max(d3)
            })
            .fold(0.0, f64::max)
    }
}

fn twisted_pauli(n: [f64; 3], tau: f64) -> Mat2 {
    let raise = Complex64::new(n[0], -n[1]) * Complex64::from_polar(1.0, tau);
    let lower = Complex64::new(n[0], n[1]) * Complex64::from_polar(1.0, -tau);
    [
        [Complex64::new(n[2], 0.0), raise],
        [lower, Complex64::new(-n[2], 0.0)],
    ]
}

/// Hermitian fiberwise operator ζ(s, m)·(n̂·σ), optionally phase-twisted.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaOperator {
    grid: GridSpec,
    axis: Axis,
    weight: WeightSpec,
    twist: Option<Vec<f64>>,
}

impl GammaOperator {
    pub fn new(grid: GridSpec, axis: Axis, weight: WeightSpec) -> Result<Self> {
        if weight.grid() != grid {
            return Err(Error::GridMismatch);
        }
        axis.unit()?;
        Ok(GammaOperator {
            grid,
            axis,
            weight,
            twist: None,
        })
    }

    /// Attaches an explicit per-fiber twist table τ(s, m), s-major.
    pub fn with_twist(mut self, table: Vec<f64>) -> Result<Self> {
        if table.len() != self.grid.half_len() {
            return Err(Error::DimensionMismatch {
                a: table.len(),
                b: self.grid.half_len(),
            });
        }
        if table.iter().any(|t| !t.is_finite()) {
            return Err(Error::WeightNotReal);
        }
        self.twist = Some(table);
        Ok(self)
    }

    /// Attaches the twist τ(s, m) = c·k̄_m.
    pub fn with_kbar_twist(self, c: f64) -> Result<Self> {
        let grid = self.grid;
        let mut table = Vec::with_capacity(grid.half_len());
        for _s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                table.push(c * grid.modular_k(m));
            }
        }
        self.with_twist(table)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn twist(&self) -> Option<&[f64]> {
        self.twist.as_deref()
    }

    /// Lowers to the per-fiber matrix table.
    pub fn fiber_op(&self) -> Result<FiberOp> {
        let n = self.axis.unit()?;
        let grid = self.grid;
        let mut mats = Vec::with_capacity(grid.half_len());
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                let idx = grid.half_index(s, m);
                let tau = self.twist.as_ref().map_or(0.0, |t| t[idx]);
                let zeta = Complex64::new(self.weight.table()[idx], 0.0);
                let base = twisted_pauli(n, tau);
                mats.push([
                    [base[0][0] * zeta, base[0][1] * zeta],
                    [base[1][0] * zeta, base[1][1] * zeta],
                ]);
            }
        }
        FiberOp::from_mats(grid, mats)
    }
}

/// Applies a Γ-operator; returns the output state and its norm. The output
/// is not renormalized.
pub fn apply_gamma(state: &CvState, op: &GammaOperator) -> Result<(CvState, f64)> {
    let out = op.fiber_op()?.apply_state(state)?;
    let norm = out.norm();
    Ok((out, norm))
}

/// Applies the modulated identity 1_ζ: each fiber scaled by ζ(s, m).
pub fn apply_modulated_identity(state: &CvState, weight: &WeightSpec) -> Result<(CvState, f64)> {
    if state.grid() != weight.grid() {
        return Err(Error::GridMismatch);
    }
    let op = FiberOp::from_fn(weight.grid(), |s, m| {
        let z = Complex64::new(weight.value(s, m), 0.0);
        [[z, Complex64::ZERO], [Complex64::ZERO, z]]
    });
    let out = op.apply_state(state)?;
    let norm = out.norm();
    Ok((out, norm))
}

/// The fiberwise rotation table ζ(s, m)·e^{iβ n̂·σ}.
pub fn rotation_fiber_op(
    grid: GridSpec,
    axis: Axis,
    beta: f64,
    weight: &WeightSpec,
) -> Result<FiberOp> {
    if weight.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if !beta.is_finite() {
        return Err(Error::NonFinite(beta));
    }
    let n = axis.unit()?;
    let cos = Complex64::new(beta.cos(), 0.0);
    let isin = Complex64::new(0.0, beta.sin());
    let pauli = twisted_pauli(n, 0.0);
    Ok(FiberOp::from_fn(grid, |s, m| {
        let z = Complex64::new(weight.value(s, m), 0.0);
        let mut out = [[Complex64::ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let id = if i == j { Complex64::ONE } else { Complex64::ZERO };
                *entry = z * (cos * id + isin * pauli[i][j]);
            }
        }
        out
    }))
}

/// Applies ζ·e^{iβ n̂·σ} = cos β·1_ζ + i sin β·Γ; returns state and norm.
pub fn apply_rotation(
    state: &CvState,
    axis: Axis,
    beta: f64,
    weight: &WeightSpec,
) -> Result<(CvState, f64)> {
    let op = rotation_fiber_op(state.grid(), axis, beta, weight)?;
    let out = op.apply_state(state)?;
    let norm = out.norm();
    Ok((out, norm))
}

/// Completes Γ into a measurement pair (Γ, Γ′) with ζ′ = √(1 − ζ²) on the
/// same axis and twist, so that Γ†Γ + Γ′†Γ′ = 1.
pub fn povm_pair(op: &GammaOperator) -> Result<(GammaOperator, GammaOperator)> {
    let completed = op.weight.completed()?;
    let partner = GammaOperator {
        grid: op.grid,
        axis: op.axis,
        weight: completed,
        twist: op.twist.clone(),
    };
    Ok((op.clone(), partner))
}

/// One tensor factor pair of a two-mode operator Σ_t Γ_a^{(t)} ⊗ Γ_b^{(t)}.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeTerm {
    pub axis_a: Axis,
    pub weight_a: WeightSpec,
    pub axis_b: Axis,
    pub weight_b: WeightSpec,
}

/// Largest accepted tensor-term count.
pub const MAX_TWO_MODE_TERMS: usize = 4;

/// Applies Σ_t Γ_a^{(t)} ⊗ Γ_b^{(t)} to a two-mode state via joint fibers;
/// returns the output state and its norm.
pub fn apply_two_mode_gamma(
    state: &TwoModeState,
    terms: &[TwoModeTerm],
) -> Result<(TwoModeState, f64)> {
    if terms.is_empty() || terms.len() > MAX_TWO_MODE_TERMS {
        return Err(Error::BadTermCount {
            got: terms.len(),
            max: MAX_TWO_MODE_TERMS,
        });
    }
    let ga = state.grid(0);
    let gb = state.grid(1);
    let mut pairs = Vec::with_capacity(terms.len());
    for term in terms {
        if term.weight_a.grid() != ga || term.weight_b.grid() != gb {
            return Err(Error::GridMismatch);
        }
        let na = term.axis_a.unit()?;
        let nb = term.axis_b.unit()?;
        pairs.push((twisted_pauli(na, 0.0), twisted_pauli(nb, 0.0), term));
    }
    let field = zak_forward_two(state)?;
    let out = apply_fiberwise_two(&field, |sa, ma, sb, mb| {
        let mut total = [[Complex64::ZERO; 4]; 4];
        for (pa, pb, term) in &pairs {
            let za = term.weight_a.value(sa, ma);
            let zb = term.weight_b.value(sb, mb);
            let scale = Complex64::new(za * zb, 0.0);
            let kron = mat4_kron(pa, pb);
            for i in 0..4 {
                for j in 0..4 {
                    total[i][j] += scale * kron[i][j];
                }
            }
        }
        total
    });
    let back = zak_inverse_two(&out)?;
    let norm = back.norm();
    Ok((back, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{apply_gaussian_gate, GaussianGate, Representation};
    use crate::zak::{zak_forward, zak_inverse};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn random_state(grid: GridSpec, rng: &mut ChaCha8Rng) -> CvState {
        let mut amps: Vec<Complex64> = (0..grid.dim())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        CvState::new(grid, Representation::Position, amps).unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn unit_weight(grid: GridSpec) -> WeightSpec {
        make_weight(grid, WeightFamily::Constant(1.0)).unwrap()
    }

    #[test]
    fn weight_families_match_hand_values() {
        let grid = GridSpec::new(8, 2).unwrap();
        let cos = make_weight(grid, WeightFamily::CosTheta).unwrap();
        assert!((cos.value(0, 0) - 1.0).abs() < 1e-15);
        assert!(cos.value(2, 0).abs() < 1e-15);
        let ones = make_weight(grid, WeightFamily::Constant(1.0)).unwrap();
        assert!(ones.table().iter().all(|&v| v == 1.0));
        let mixed = make_weight(grid, WeightFamily::CosThetaMinusPiK).unwrap();
        assert!((mixed.value(0, 0) - 1.0).abs() < 1e-15);
        // θ̄ = π/2 at s = 2, k̄ = 1/2 at m = 1: cos(π/2 − π/2) = 1.
        assert!((mixed.value(2, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn custom_weights_must_be_finite() {
        let grid = GridSpec::new(4, 2).unwrap();
        let bad = make_weight(grid, WeightFamily::Custom(vec![0.0, f64::NAN, 0.0, 0.0]));
        assert!(bad.unwrap_err().to_string().contains("weight must be real"));
        let short = make_weight(grid, WeightFamily::Custom(vec![1.0]));
        assert!(short.is_err());
    }

    #[test]
    fn gamma_x_flips_sectors_exactly() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut field = ModularField::zero(grid);
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                let f = Complex64::new(((s + 2 * m) as f64).cos() * 0.2, 0.1);
                field.set_fiber(s, m, f, Complex64::ZERO).unwrap();
            }
        }
        let state = zak_inverse(&field).unwrap();
        let op = GammaOperator::new(grid, Axis::X, unit_weight(grid)).unwrap();
        let (out, norm) = apply_gamma(&state, &op).unwrap();
        assert!((norm - state.norm()).abs() < 1e-12);
        let out_field = zak_forward(&out).unwrap();
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                let before = field.fiber(s, m).unwrap();
                let after = out_field.fiber(s, m).unwrap();
                assert!((after.v0).norm() < 1e-12);
                assert!((after.v1 - before.v0).norm() < 1e-12);
            }
        }
        assert!(state.inner(&out).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gamma_z_with_cosine_weight_is_position_diagonal() {
        let grid = GridSpec::new(16, 8).unwrap();
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let op = GammaOperator::new(grid, Axis::Z, weight).unwrap();
        for j in 0..grid.dim() {
            let basis = CvState::position_basis(grid, j);
            let (out, _) = apply_gamma(&basis, &op).unwrap();
            let expect = basis.scaled(Complex64::new(grid.theta(j).cos(), 0.0));
            assert!(max_diff(out.amplitudes(), expect.amplitudes()) < 1e-12, "j={j}");
        }
    }

    #[test]
    fn gamma_y_squares_to_identity() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let state = random_state(grid, &mut rng);
        let op = GammaOperator::new(grid, Axis::Y, unit_weight(grid)).unwrap();
        let (once, _) = apply_gamma(&state, &op).unwrap();
        let (twice, norm) = apply_gamma(&once, &op).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(max_diff(twice.amplitudes(), state.amplitudes()) < 1e-12);
    }

    #[test]
    fn gamma_operators_are_hermitian_and_fiber_local() {
        let grid = GridSpec::new(8, 4).unwrap();
        for family in [
            WeightFamily::CosTheta,
            WeightFamily::SinTheta,
            WeightFamily::CosPiK,
            WeightFamily::CosThetaMinusPiK,
        ] {
            let weight = make_weight(grid, family).unwrap();
            for axis in [Axis::X, Axis::Y, Axis::Z, Axis::Custom(1.0, -2.0, 0.5)] {
                let op = GammaOperator::new(grid, axis, weight.clone()).unwrap();
                assert!(op.fiber_op().unwrap().hermiticity_defect() < 1e-12);
            }
        }
        // A twisted Γ stays hermitian.
        let weight = make_weight(grid, WeightFamily::CosPiK).unwrap();
        let op = GammaOperator::new(grid, Axis::X, weight)
            .unwrap()
            .with_kbar_twist(-PI)
            .unwrap();
        assert!(op.fiber_op().unwrap().hermiticity_defect() < 1e-12);
    }

    #[test]
    fn shift_pair_average_equals_twisted_gamma_x() {
        let grid = GridSpec::new(8, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let state = random_state(grid, &mut rng);
        let plus = apply_gaussian_gate(&state, &GaussianGate::shift(PI)).unwrap();
        let minus = apply_gaussian_gate(&state, &GaussianGate::shift(-PI)).unwrap();
        let average = plus.add(&minus).unwrap().scaled(Complex64::new(0.5, 0.0));

        let weight = make_weight(grid, WeightFamily::CosPiK).unwrap();
        let op = GammaOperator::new(grid, Axis::X, weight)
            .unwrap()
            .with_kbar_twist(-PI)
            .unwrap();
        let (gamma_out, _) = apply_gamma(&state, &op).unwrap();
        assert!(max_diff(average.amplitudes(), gamma_out.amplitudes()) < 1e-12);
    }

    #[test]
    fn modulated_identity_norm_is_weighted_sum() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let state = random_state(grid, &mut rng);
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let (_, norm) = apply_modulated_identity(&state, &weight).unwrap();
        let field = zak_forward(&state).unwrap();
        let mut expect = 0.0;
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                let fiber = field.fiber(s, m).unwrap();
                let z = weight.value(s, m);
                expect += z * z * (fiber.v0.norm_sqr() + fiber.v1.norm_sqr());
            }
        }
        assert!((norm * norm - expect).abs() < 1e-12);

        let ones = unit_weight(grid);
        let (same, n1) = apply_modulated_identity(&state, &ones).unwrap();
        assert!((n1 - 1.0).abs() < 1e-12);
        assert!(max_diff(same.amplitudes(), state.amplitudes()) < 1e-12);
    }

    #[test]
    fn rotation_equals_cos_plus_isin_decomposition() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for axis in [Axis::X, Axis::Y, Axis::Z, Axis::Custom(0.3, -0.4, 1.1)] {
            let state = random_state(grid, &mut rng);
            let beta = rng.gen::<f64>() * 4.0 - 2.0;
            let weight = make_weight(grid, WeightFamily::CosThetaMinusPiK).unwrap();
            let (rotated, _) = apply_rotation(&state, axis, beta, &weight).unwrap();

            let (ident, _) = apply_modulated_identity(&state, &weight).unwrap();
            let op = GammaOperator::new(grid, axis, weight).unwrap();
            let (flipped, _) = apply_gamma(&state, &op).unwrap();
            let expect = ident
                .scaled(Complex64::new(beta.cos(), 0.0))
                .add(&flipped.scaled(Complex64::new(0.0, beta.sin())))
                .unwrap();
            assert!(max_diff(rotated.amplitudes(), expect.amplitudes()) < 1e-12);
        }
    }

    #[test]
    fn rotations_compose_by_adding_angles_and_multiplying_weights() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let state = random_state(grid, &mut rng);
        let w1 = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let w2 = make_weight(grid, WeightFamily::CosPiK).unwrap();
        let product = make_weight(
            grid,
            WeightFamily::Custom(
                w1.table()
                    .iter()
                    .zip(w2.table())
                    .map(|(a, b)| a * b)
                    .collect(),
            ),
        )
        .unwrap();
        let (b1, b2) = (0.83, -1.27);
        let (step, _) = apply_rotation(&state, Axis::Y, b1, &w1).unwrap();
        let (two_step, _) = apply_rotation(&step, Axis::Y, b2, &w2).unwrap();
        let (direct, _) = apply_rotation(&state, Axis::Y, b1 + b2, &product).unwrap();
        assert!(max_diff(two_step.amplitudes(), direct.amplitudes()) < 1e-12);
    }

    #[test]
    fn rotation_on_north_pole_matches_bloch_prediction() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut field = ModularField::zero(grid);
        let f = 1.0 / (grid.half_len() as f64).sqrt();
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                field
                    .set_fiber(s, m, Complex64::new(f, 0.0), Complex64::ZERO)
                    .unwrap();
            }
        }
        let state = zak_inverse(&field).unwrap();
        let (out, norm) = apply_rotation(&state, Axis::X, FRAC_PI_2, &unit_weight(grid)).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
        let out_field = zak_forward(&out).unwrap();
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                let fiber = out_field.fiber(s, m).unwrap();
                assert!(fiber.v0.norm() < 1e-12);
                assert!((fiber.v1 - Complex64::new(0.0, f)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn povm_pair_completes_to_identity() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let mut families = vec![
            WeightFamily::CosTheta,
            WeightFamily::CosPiK,
            WeightFamily::CosThetaMinusPiK,
        ];
        families.push(WeightFamily::Custom(
            (0..grid.half_len())
                .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
                .collect(),
        ));
        for family in families {
            let weight = make_weight(grid, family).unwrap();
            let op = GammaOperator::new(grid, Axis::Z, weight).unwrap();
            let (a, b) = povm_pair(&op).unwrap();
            let fa = a.fiber_op().unwrap();
            let fb = b.fiber_op().unwrap();
            let total = fa
                .adjoint()
                .compose(&fa)
                .unwrap()
                .add(&fb.adjoint().compose(&fb).unwrap())
                .unwrap();
            let defect = total.sub(&FiberOp::identity(grid)).unwrap();
            let max = defect
                .mats
                .iter()
                .flat_map(|m| m.iter().flatten())
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            assert!(max < 1e-12);
        }
    }

    #[test]
    fn cosine_weight_completes_to_sine() {
        let grid = GridSpec::new(8, 4).unwrap();
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let sine = make_weight(grid, WeightFamily::SinTheta).unwrap();
        let completed = weight.completed().unwrap();
        for (a, b) in completed.table().iter().zip(sine.table()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn overweight_profile_is_not_completable() {
        let grid = GridSpec::new(4, 2).unwrap();
        let weight = make_weight(grid, WeightFamily::Constant(1.2)).unwrap();
        let err = weight.completed().unwrap_err();
        assert!(err.to_string().contains("not completable"));
    }

    #[test]
    fn unit_weight_gammas_are_unitary_but_cosine_is_not() {
        let grid = GridSpec::new(32, 8).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let op = GammaOperator::new(grid, axis, unit_weight(grid)).unwrap();
            assert!(op.fiber_op().unwrap().unitarity_defect() < 1e-12);
        }
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let op = GammaOperator::new(grid, Axis::Z, weight).unwrap();
        assert!(op.fiber_op().unwrap().unitarity_defect() >= 0.5);
    }

    #[test]
    fn two_mode_zz_measures_sector_parity() {
        let ga = GridSpec::new(4, 2).unwrap();
        let gb = GridSpec::new(4, 2).unwrap();
        // Mode 0 in the base sector, mode 1 in the shifted sector.
        let mut fa = ModularField::zero(ga);
        let mut fb = ModularField::zero(gb);
        let f = 0.5;
        for s in 0..2 {
            for m in 0..2 {
                fa.set_fiber(s, m, Complex64::new(f, 0.0), Complex64::ZERO)
                    .unwrap();
                fb.set_fiber(s, m, Complex64::ZERO, Complex64::new(f, 0.0))
                    .unwrap();
            }
        }
        let state = TwoModeState::product(
            &zak_inverse(&fa).unwrap(),
            &zak_inverse(&fb).unwrap(),
        );
        let term = TwoModeTerm {
            axis_a: Axis::Z,
            weight_a: unit_weight(ga),
            axis_b: Axis::Z,
            weight_b: unit_weight(gb),
        };
        let (out, norm) = apply_two_mode_gamma(&state, &[term]).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
        let flipped = state.scaled(Complex64::new(-1.0, 0.0));
        assert!(max_diff(out.amplitudes(), flipped.amplitudes()) < 1e-12);
    }

    #[test]
    fn xx_plus_yy_annihilates_even_parity_bell() {
        let ga = GridSpec::new(4, 2).unwrap();
        let gb = GridSpec::new(4, 2).unwrap();
        let mut phi = crate::zak::JointField::zero(ga, gb);
        let mut psi = crate::zak::JointField::zero(ga, gb);
        let f = Complex64::new(1.0 / 32.0_f64.sqrt(), 0.0);
        for sa in 0..2 {
            for ma in 0..2 {
                for sb in 0..2 {
                    for mb in 0..2 {
                        phi.set_fiber(sa, ma, sb, mb, [f, Complex64::ZERO, Complex64::ZERO, f])
                            .unwrap();
                        psi.set_fiber(sa, ma, sb, mb, [Complex64::ZERO, f, f, Complex64::ZERO])
                            .unwrap();
                    }
                }
            }
        }
        let terms = [
            TwoModeTerm {
                axis_a: Axis::X,
                weight_a: unit_weight(ga),
                axis_b: Axis::X,
                weight_b: unit_weight(gb),
            },
            TwoModeTerm {
                axis_a: Axis::Y,
                weight_a: unit_weight(ga),
                axis_b: Axis::Y,
                weight_b: unit_weight(gb),
            },
        ];
        let phi_state = crate::zak::zak_inverse_two(&phi).unwrap();
        let (out, norm) = apply_two_mode_gamma(&phi_state, &terms).unwrap();
        assert!(norm < 1e-12);
        assert!(out.norm() < 1e-12);

        let psi_state = crate::zak::zak_inverse_two(&psi).unwrap();
        let (out, norm) = apply_two_mode_gamma(&psi_state, &terms).unwrap();
        assert!((norm - 2.0).abs() < 1e-12);
        let expect = psi_state.scaled(Complex64::new(2.0, 0.0));
        assert!(max_diff(out.amplitudes(), expect.amplitudes()) < 1e-12);
    }

    #[test]
    fn two_mode_term_count_is_bounded() {
        let ga = GridSpec::new(4, 2).unwrap();
        let gb = GridSpec::new(4, 2).unwrap();
        let state = TwoModeState::zero(ga, gb);
        let err = apply_two_mode_gamma(&state, &[]).unwrap_err();
        assert!(err.to_string().contains("tensor terms"));
        let term = TwoModeTerm {
            axis_a: Axis::X,
            weight_a: unit_weight(ga),
            axis_b: Axis::X,
            weight_b: unit_weight(gb),
        };
        let five = vec![term; 5];
        assert!(apply_two_mode_gamma(&state, &five).is_err());
    }

    #[test]
    fn separable_weights_factor_the_output_norm() {
        let ga = GridSpec::new(8, 2).unwrap();
        let gb = GridSpec::new(8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = random_state(ga, &mut rng);
        let b = random_state(gb, &mut rng);
        let state = TwoModeState::product(&a, &b);
        let wa = make_weight(ga, WeightFamily::CosTheta).unwrap();
        let wb = make_weight(gb, WeightFamily::CosTheta).unwrap();
        let term = TwoModeTerm {
            axis_a: Axis::Z,
            weight_a: wa.clone(),
            axis_b: Axis::Z,
            weight_b: wb.clone(),
        };
        let (_, norm) = apply_two_mode_gamma(&state, &[term]).unwrap();
        let (_, na) = apply_modulated_identity(&a, &wa).unwrap();
        let (_, nb) = apply_modulated_identity(&b, &wb).unwrap();
        assert!((norm - na * nb).abs() < 1e-12);
    }
}
