//! Discrete Zak transform and the fiber view of a mode.
//!
//! A position amplitude table ψ(θ_j) with θ_j = θ̄_s + 2πn reshapes into a
//! sector/winding array; Fourier transforming the winding index n gives the
//! modular field
//!
//!   g[s, m] = nn^{−1/2} Σ_n ψ(θ̄_s + 2πn) e^{−2πi n m / nn},
//!
//! a unitary change of basis. Pairing each base sector s < ns/2 with its
//! antipode s + ns/2 at fixed m turns the field into D/2 independent
//! two-component fibers, and everything downstream (logical encoding, the
//! weighted Pauli operators, the ancilla circuits) acts fiber by fiber.
//! Storage is s-major: index s·nn + m.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{CvState, GridSpec, Representation, TwoModeState};

/// 2×2 complex matrix acting on one fiber, row major.
pub type Mat2 = [[Complex64; 2]; 2];

/// 4×4 complex matrix acting on a joint fiber, row major, component order
/// [00, 01, 10, 11] with the first mode as the high bit.
pub type Mat4 = [[Complex64; 4]; 4];

pub fn mat2_apply(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat4_apply(m: &Mat4, v: [Complex64; 4]) -> [Complex64; 4] {
    let mut out = [Complex64::ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, &x) in v.iter().enumerate() {
            *o += m[i][j] * x;
        }
    }
    out
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[Complex64::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for (k, brow) in b.iter().enumerate() {
                out[i][j] += a[i][k] * brow[j];
            }
        }
    }
    out
}

/// Kronecker product a ⊗ b with a on the high bit.
pub fn mat4_kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[Complex64::ZERO; 4]; 4];
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    out[ia * 2 + ib][ja * 2 + jb] = a[ia][ja] * b[ib][jb];
                }
            }
        }
    }
    out
}

/// One fiber of a modular field: the pair of amplitudes sharing (θ̄ mod π, k̄).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberQubit {
    pub s: usize,
    pub m: usize,
    pub v0: Complex64,
    pub v1: Complex64,
}

impl FiberQubit {
    pub fn params(&self) -> QubitParams {
        QubitParams::from_components(self.v0, self.v1)
    }
}

/// Polar form of one fiber: v0 = f·cos(α/2)·e^{iδ}, v1 = f·sin(α/2)·e^{i(δ+φ)}
/// with f ≥ 0, α ∈ [0, π], φ ∈ [0, 2π). A fiber with no weight is flagged
/// rather than given arbitrary angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    pub f: f64,
    pub alpha: f64,
    pub phi: f64,
    pub delta: f64,
    pub zero: bool,
}

impl QubitParams {
    pub fn from_components(v0: Complex64, v1: Complex64) -> QubitParams {
        let f = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        if f == 0.0 {
            return QubitParams {
                f: 0.0,
                alpha: 0.0,
                phi: 0.0,
                delta: 0.0,
                zero: true,
            };
        }
        let alpha = 2.0 * v1.norm().atan2(v0.norm());
        let delta = if v0.norm() == 0.0 { 0.0 } else { v0.arg() };
        let mut phi = if v1.norm() == 0.0 {
            0.0
        } else {
            v1.arg() - delta
        };
        phi = phi.rem_euclid(std::f64::consts::TAU);
        QubitParams {
            f,
            alpha,
            phi,
            delta,
            zero: false,
        }
    }

    /// Inverse of [`QubitParams::from_components`].
    pub fn components(&self) -> (Complex64, Complex64) {
        if self.zero {
            return (Complex64::ZERO, Complex64::ZERO);
        }
        let half = self.alpha / 2.0;
        let v0 = Complex64::from_polar(self.f * half.cos(), self.delta);
        let v1 = Complex64::from_polar(self.f * half.sin(), self.delta + self.phi);
        (v0, v1)
    }
}

/// Zak-space amplitudes of one mode, indexed s·nn + m.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl ModularField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                a: values.len(),
                b: grid.dim(),
            });
        }
        Ok(ModularField { grid, values })
    }

    pub fn zero(grid: GridSpec) -> Self {
        ModularField {
            grid,
            values: vec![Complex64::ZERO; grid.dim()],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, s: usize, m: usize) -> Complex64 {
        self.values[self.grid.field_index(s, m)]
    }

    pub fn set_value(&mut self, s: usize, m: usize, v: Complex64) {
        let idx = self.grid.field_index(s, m);
        self.values[idx] = v;
    }

    /// The fiber at base sector s < ns/2 and modular momentum index m.
    pub fn fiber(&self, s: usize, m: usize) -> Result<FiberQubit> {
        let partner = self.grid.sector_partner(s)?;
        if m >= self.grid.period_count() {
            return Err(Error::FiberIndexOutOfRange { s, m });
        }
        Ok(FiberQubit {
            s,
            m,
            v0: self.value(s, m),
            v1: self.value(partner, m),
        })
    }

    pub fn set_fiber(&mut self, s: usize, m: usize, v0: Complex64, v1: Complex64) -> Result<()> {
        let partner = self.grid.sector_partner(s)?;
        if m >= self.grid.period_count() {
            return Err(Error::FiberIndexOutOfRange { s, m });
        }
        self.set_value(s, m, v0);
        self.set_value(partner, m, v1);
        Ok(())
    }

    /// All fibers in half-grid order (s-major, s < ns/2).
    pub fn fibers(&self) -> Vec<FiberQubit> {
        let mut out = Vec::with_capacity(self.grid.half_len());
        for s in 0..self.grid.half_sectors() {
            for m in 0..self.grid.period_count() {
                out.push(self.fiber(s, m).expect("base sector in range"));
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &ModularField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn overlap(&self, other: &ModularField) -> Result<f64> {
        let na = self.norm();
        let nb = other.norm();
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok(self.inner(other)?.norm() / (na * nb))
    }

    pub fn scaled(&self, c: Complex64) -> ModularField {
        ModularField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &ModularField) -> Result<ModularField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(ModularField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ModularField) -> Result<ModularField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(ModularField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

fn zak_buf(buf: &mut [Complex64], grid: GridSpec, inverse: bool, planner: &mut FftPlanner<f64>) {
    let ns = grid.samples_per_period();
    let nn = grid.period_count();
    let fft = if inverse {
        planner.plan_fft_inverse(nn)
    } else {
        planner.plan_fft_forward(nn)
    };
    let scale = 1.0 / (nn as f64).sqrt();
    let mut tmp = vec![Complex64::ZERO; nn];
    let mut out = vec![Complex64::ZERO; buf.len()];
    for s in 0..ns {
        if inverse {
            tmp.copy_from_slice(&buf[s * nn..(s + 1) * nn]);
            fft.process(&mut tmp);
            for n in 0..nn {
                out[grid.position_index(s, n)] = tmp[n] * scale;
            }
        } else {
            for (n, t) in tmp.iter_mut().enumerate() {
                *t = buf[grid.position_index(s, n)];
            }
            fft.process(&mut tmp);
            for m in 0..nn {
                out[grid.field_index(s, m)] = tmp[m] * scale;
            }
        }
    }
    buf.copy_from_slice(&out);
}

/// Zak transform of a single-mode state.
pub fn zak_forward(state: &CvState) -> Result<ModularField> {
    let state = state.clone().into_position();
    let grid = state.grid();
    let mut buf = state.amplitudes().to_vec();
    let mut planner = FftPlanner::new();
    zak_buf(&mut buf, grid, false, &mut planner);
    ModularField::new(grid, buf)
}

/// Inverse Zak transform; the result is in position representation.
pub fn zak_inverse(field: &ModularField) -> Result<CvState> {
    let grid = field.grid();
    let mut buf = field.values().to_vec();
    let mut planner = FftPlanner::new();
    zak_buf(&mut buf, grid, true, &mut planner);
    CvState::new(grid, Representation::Position, buf)
}

/// Applies a 2×2 matrix to every fiber; the matrix may depend on (s, m).
pub fn apply_fiberwise<F>(field: &ModularField, op: F) -> ModularField
where
    F: Fn(usize, usize) -> Mat2,
{
    let grid = field.grid();
    let mut out = field.clone();
    for s in 0..grid.half_sectors() {
        for m in 0..grid.period_count() {
            let fiber = field.fiber(s, m).expect("base sector in range");
            let v = mat2_apply(&op(s, m), [fiber.v0, fiber.v1]);
            out.set_fiber(s, m, v[0], v[1]).expect("base sector in range");
        }
    }
    out
}

/// Per-fiber qubit parameters in half-grid order.
pub fn extract_qubit_params(field: &ModularField) -> Vec<QubitParams> {
    field.fibers().iter().map(|f| f.params()).collect()
}

/// Rebuilds a modular field from per-fiber parameters in half-grid order.
pub fn rebuild_field(grid: GridSpec, params: &[QubitParams]) -> Result<ModularField> {
    if params.len() != grid.half_len() {
        return Err(Error::DimensionMismatch {
            a: params.len(),
            b: grid.half_len(),
        });
    }
    let mut field = ModularField::zero(grid);
    for s in 0..grid.half_sectors() {
        for m in 0..grid.period_count() {
            let (v0, v1) = params[grid.half_index(s, m)].components();
            field.set_fiber(s, m, v0, v1)?;
        }
    }
    Ok(field)
}

/// Zak-space amplitudes of two modes, indexed fa·D_b + fb where fa and fb
/// are the single-mode field indices.
#[derive(Debug, Clone, PartialEq)]
pub struct JointField {
    grid_a: GridSpec,
    grid_b: GridSpec,
    values: Vec<Complex64>,
}

impl JointField {
    pub fn new(grid_a: GridSpec, grid_b: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid_a.dim() * grid_b.dim() {
            return Err(Error::DimensionMismatch {
                a: values.len(),
                b: grid_a.dim() * grid_b.dim(),
            });
        }
        Ok(JointField {
            grid_a,
            grid_b,
            values,
        })
    }

    pub fn zero(grid_a: GridSpec, grid_b: GridSpec) -> Self {
        JointField {
            grid_a,
            grid_b,
            values: vec![Complex64::ZERO; grid_a.dim() * grid_b.dim()],
        }
    }

    pub fn grid(&self, mode: usize) -> GridSpec {
        if mode == 0 {
            self.grid_a
        } else {
            self.grid_b
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn flat(&self, sa: usize, ma: usize, sb: usize, mb: usize) -> usize {
        self.grid_a.field_index(sa, ma) * self.grid_b.dim() + self.grid_b.field_index(sb, mb)
    }

    /// Joint fiber components [v00, v01, v10, v11]; the first bit selects
    /// the sector half of mode 0, the second of mode 1.
    pub fn fiber(&self, sa: usize, ma: usize, sb: usize, mb: usize) -> Result<[Complex64; 4]> {
        let pa = self.grid_a.sector_partner(sa)?;
        let pb = self.grid_b.sector_partner(sb)?;
        if ma >= self.grid_a.period_count() {
            return Err(Error::FiberIndexOutOfRange { s: sa, m: ma });
        }
        if mb >= self.grid_b.period_count() {
            return Err(Error::FiberIndexOutOfRange { s: sb, m: mb });
        }
        Ok([
            self.values[self.flat(sa, ma, sb, mb)],
            self.values[self.flat(sa, ma, pb, mb)],
            self.values[self.flat(pa, ma, sb, mb)],
            self.values[self.flat(pa, ma, pb, mb)],
        ])
    }

    pub fn set_fiber(
        &mut self,
        sa: usize,
        ma: usize,
        sb: usize,
        mb: usize,
        v: [Complex64; 4],
    ) -> Result<()> {
        let pa = self.grid_a.sector_partner(sa)?;
        let pb = self.grid_b.sector_partner(sb)?;
        if ma >= self.grid_a.period_count() {
            return Err(Error::FiberIndexOutOfRange { s: sa, m: ma });
        }
        if mb >= self.grid_b.period_count() {
            return Err(Error::FiberIndexOutOfRange { s: sb, m: mb });
        }
        let idx = [
            self.flat(sa, ma, sb, mb),
            self.flat(sa, ma, pb, mb),
            self.flat(pa, ma, sb, mb),
            self.flat(pa, ma, pb, mb),
        ];
        for (slot, val) in idx.into_iter().zip(v) {
            self.values[slot] = val;
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &JointField) -> Result<Complex64> {
        if self.grid_a != other.grid_a || self.grid_b != other.grid_b {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn overlap(&self, other: &JointField) -> Result<f64> {
        let na = self.norm();
        let nb = other.norm();
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok(self.inner(other)?.norm() / (na * nb))
    }

    pub fn scaled(&self, c: Complex64) -> JointField {
        JointField {
            grid_a: self.grid_a,
            grid_b: self.grid_b,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &JointField) -> Result<JointField> {
        if self.grid_a != other.grid_a || self.grid_b != other.grid_b {
            return Err(Error::GridMismatch);
        }
        Ok(JointField {
            grid_a: self.grid_a,
            grid_b: self.grid_b,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &JointField) -> Result<JointField> {
        if self.grid_a != other.grid_a || self.grid_b != other.grid_b {
            return Err(Error::GridMismatch);
        }
        Ok(JointField {
            grid_a: self.grid_a,
            grid_b: self.grid_b,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// Zak transform along both axes of a two-mode state.
pub fn zak_forward_two(state: &TwoModeState) -> Result<JointField> {
    let ga = state.grid(0);
    let gb = state.grid(1);
    let (da, db) = (ga.dim(), gb.dim());
    let mut vals = state.amplitudes().to_vec();
    let mut planner = FftPlanner::new();
    for ja in 0..da {
        zak_buf(&mut vals[ja * db..(ja + 1) * db], gb, false, &mut planner);
    }
    let mut col = vec![Complex64::ZERO; da];
    for ib in 0..db {
        for ja in 0..da {
            col[ja] = vals[ja * db + ib];
        }
        zak_buf(&mut col, ga, false, &mut planner);
        for ja in 0..da {
            vals[ja * db + ib] = col[ja];
        }
    }
    JointField::new(ga, gb, vals)
}

/// Inverse of [`zak_forward_two`]; the result is in position representation.
pub fn zak_inverse_two(field: &JointField) -> Result<TwoModeState> {
    let ga = field.grid(0);
    let gb = field.grid(1);
    let (da, db) = (ga.dim(), gb.dim());
    let mut vals = field.values().to_vec();
    let mut planner = FftPlanner::new();
    let mut col = vec![Complex64::ZERO; da];
    for ib in 0..db {
        for ja in 0..da {
            col[ja] = vals[ja * db + ib];
        }
        zak_buf(&mut col, ga, true, &mut planner);
        for ja in 0..da {
            vals[ja * db + ib] = col[ja];
        }
    }
    for ja in 0..da {
        zak_buf(&mut vals[ja * db..(ja + 1) * db], gb, true, &mut planner);
    }
    TwoModeState::from_amplitudes(ga, gb, vals)
}

/// Applies a 4×4 matrix to every joint fiber; the matrix may depend on the
/// fiber labels of both modes.
pub fn apply_fiberwise_two<F>(field: &JointField, op: F) -> JointField
where
    F: Fn(usize, usize, usize, usize) -> Mat4,
{
    let ga = field.grid(0);
    let gb = field.grid(1);
    let mut out = field.clone();
    for sa in 0..ga.half_sectors() {
        for ma in 0..ga.period_count() {
            for sb in 0..gb.half_sectors() {
                for mb in 0..gb.period_count() {
                    let v = field.fiber(sa, ma, sb, mb).expect("base fibers in range");
                    let w = mat4_apply(&op(sa, ma, sb, mb), v);
                    out.set_fiber(sa, ma, sb, mb, w)
                        .expect("base fibers in range");
                }
            }
        }
    }
    out
}
