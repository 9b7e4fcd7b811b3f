//! Discretized phase space for one periodic mode, and the exact algebra of
//! Gaussian gates on it.
//!
//! The position variable lives on θ_j = j·Δθ for j = 0..D−1 with
//! Δθ = 2π/N_s, covering [0, 2πN_n) cyclically; D = N_s·N_n. Conjugate
//! momentum takes the values k_u = ((u + D/2 mod D) − D/2)·Δk with
//! Δk = 1/N_n, i.e. the centered range [−N_s/2, N_s/2) in standard DFT
//! ordering. The choices satisfy Δθ·Δk·D = 2π exactly, so the transform
//! φ_u = D^{−1/2} Σ_j ψ_j e^{−i k_u θ_j} is unitary and reduces to a plain
//! DFT: k_u·θ_j ≡ 2π·u·j/D (mod 2π).
//!
//! Momentum here is dimensionless with [θ̂, k̂] = i, so plane waves are
//! e^{ikθ} and k̂ = −i d/dθ. A shift e^{iak̂} therefore multiplies momentum
//! amplitudes by e^{iak} and carries a position delta from θ_j to θ_j − a.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Default ceiling on the total number of grid points.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Grid geometry: `ns` samples per 2π period, `nn` periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    ns: usize,
    nn: usize,
}

impl GridSpec {
    /// Builds a grid with the default size ceiling.
    ///
    /// `ns` must be even (each period splits into two sectors) and at
    /// least 2; `nn` must be at least 1.
    pub fn new(ns: usize, nn: usize) -> Result<Self> {
        Self::with_max_dim(ns, nn, DEFAULT_MAX_DIM)
    }

    /// Same as [`GridSpec::new`] with an explicit ceiling on D = ns·nn.
    pub fn with_max_dim(ns: usize, nn: usize, max_dim: usize) -> Result<Self> {
        if ns < 2 || !ns.is_multiple_of(2) {
            return Err(Error::SectorPairingImpossible(ns));
        }
        if nn < 1 {
            return Err(Error::GridTooLarge { dim: 0, max: max_dim });
        }
        let dim = ns.checked_mul(nn).ok_or(Error::GridTooLarge {
            dim: usize::MAX,
            max: max_dim,
        })?;
        if dim > max_dim {
            return Err(Error::GridTooLarge { dim, max: max_dim });
        }
        Ok(GridSpec { ns, nn })
    }

    pub fn samples_per_period(&self) -> usize {
        self.ns
    }

    pub fn period_count(&self) -> usize {
        self.nn
    }

    /// Total number of points D = ns·nn.
    pub fn dim(&self) -> usize {
        self.ns * self.nn
    }

    /// Position step Δθ = 2π/ns.
    pub fn dtheta(&self) -> f64 {
        TAU / self.ns as f64
    }

    /// Momentum step Δk = 1/nn.
    pub fn dk(&self) -> f64 {
        1.0 / self.nn as f64
    }

    /// Position value θ_j = j·Δθ.
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    /// Momentum value at storage index `u`, centered on [−ns/2, ns/2).
    pub fn momentum(&self, u: usize) -> f64 {
        let d = self.dim();
        let centered = ((u + d / 2) % d) as i64 - (d / 2) as i64;
        centered as f64 * self.dk()
    }

    pub fn momentum_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|u| self.momentum(u)).collect()
    }

    /// Number of base sectors per period, ns/2.
    pub fn half_sectors(&self) -> usize {
        self.ns / 2
    }

    /// Number of two-level fibers, D/2.
    pub fn fiber_count(&self) -> usize {
        self.dim() / 2
    }

    /// Partner sector of a base sector: θ̄_s + π lives at s + ns/2.
    pub fn sector_partner(&self, s: usize) -> Result<usize> {
        if s >= self.half_sectors() {
            return Err(Error::NotBaseSector {
                s,
                half: self.half_sectors(),
            });
        }
        Ok(s + self.half_sectors())
    }

    /// Flat position index of θ = θ̄_s + 2πn.
    pub fn position_index(&self, s: usize, n: usize) -> usize {
        s + n * self.ns
    }

    /// Modular position θ̄_s = s·Δθ for a sector index s < ns.
    pub fn modular_theta(&self, s: usize) -> f64 {
        s as f64 * self.dtheta()
    }

    /// Modular momentum k̄_m = m/nn for m < nn.
    pub fn modular_k(&self, m: usize) -> f64 {
        m as f64 / self.nn as f64
    }

    /// Flat index into full-field arrays, s-major: s·nn + m.
    pub fn field_index(&self, s: usize, m: usize) -> usize {
        s * self.nn + m
    }

    /// Flat index into half-grid arrays (s < ns/2), s-major.
    pub fn half_index(&self, s: usize, m: usize) -> usize {
        s * self.nn + m
    }

    /// Number of entries in a half-grid table, ns/2 · nn.
    pub fn half_len(&self) -> usize {
        self.half_sectors() * self.nn
    }
}

/// Splits θ = 2πN + θ̄ with θ̄ ∈ [0, 2π).
pub fn modular_decompose_theta(theta: f64) -> Result<(i64, f64)> {
    decompose(theta, TAU)
}

/// Splits k = M + k̄ with k̄ ∈ [0, 1).
pub fn modular_decompose_k(k: f64) -> Result<(i64, f64)> {
    decompose(k, 1.0)
}

fn decompose(x: f64, period: f64) -> Result<(i64, f64)> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    let mut n = (x / period).floor();
    let mut frac = x - period * n;
    // Guard the seam: rounding can land frac exactly on the period.
    if frac >= period {
        frac -= period;
        n += 1.0;
    }
    if frac < 0.0 {
        frac += period;
        n -= 1.0;
    }
    Ok((n as i64, frac))
}

/// Which basis a state's amplitudes are tabulated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// State of one mode: D complex amplitudes over the position or momentum
/// grid. Amplitudes carry the quadrature weight (a_j = ψ(θ_j)·√Δθ), so the
/// l2 norm is the state norm independent of grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct CvState {
    grid: GridSpec,
    representation: Representation,
    amplitudes: Vec<Complex64>,
}

impl CvState {
    pub fn new(
        grid: GridSpec,
        representation: Representation,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if amplitudes.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                a: amplitudes.len(),
                b: grid.dim(),
            });
        }
        Ok(CvState {
            grid,
            representation,
            amplitudes,
        })
    }

    pub fn zero(grid: GridSpec) -> Self {
        CvState {
            grid,
            representation: Representation::Position,
            amplitudes: vec![Complex64::ZERO; grid.dim()],
        }
    }

    /// Unit amplitude on one position point.
    pub fn position_basis(grid: GridSpec, j: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; grid.dim()];
        amplitudes[j] = Complex64::ONE;
        CvState {
            grid,
            representation: Representation::Position,
            amplitudes,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩ after bringing `other` to this state's representation.
    pub fn inner(&self, other: &CvState) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let other = if other.representation == self.representation {
            other.clone()
        } else {
            other.converted()
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩| over both norms; 0 for a zero operand.
    pub fn overlap(&self, other: &CvState) -> Result<f64> {
        let na = self.norm();
        let nb = other.norm();
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok(self.inner(other)?.norm() / (na * nb))
    }

    /// Unitary map to momentum amplitudes, φ_u = D^{−1/2} Σ_j ψ_j e^{−i k_u θ_j}.
    pub fn to_momentum(&self) -> Result<CvState> {
        if self.representation == Representation::Momentum {
            return Err(Error::RepresentationMismatch("momentum"));
        }
        let mut buf = self.amplitudes.clone();
        fft_in_place(&mut buf, false);
        let scale = 1.0 / (self.grid.dim() as f64).sqrt();
        for a in buf.iter_mut() {
            *a *= scale;
        }
        Ok(CvState {
            grid: self.grid,
            representation: Representation::Momentum,
            amplitudes: buf,
        })
    }

    /// Exact inverse of [`CvState::to_momentum`].
    pub fn to_position(&self) -> Result<CvState> {
        if self.representation == Representation::Position {
            return Err(Error::RepresentationMismatch("position"));
        }
        let mut buf = self.amplitudes.clone();
        fft_in_place(&mut buf, true);
        let scale = 1.0 / (self.grid.dim() as f64).sqrt();
        for a in buf.iter_mut() {
            *a *= scale;
        }
        Ok(CvState {
            grid: self.grid,
            representation: Representation::Position,
            amplitudes: buf,
        })
    }

    /// The state in position representation, converting if needed.
    pub fn into_position(self) -> CvState {
        match self.representation {
            Representation::Position => self,
            Representation::Momentum => self.to_position().expect("momentum state converts"),
        }
    }

    /// The state in momentum representation, converting if needed.
    pub fn into_momentum(self) -> CvState {
        match self.representation {
            Representation::Momentum => self,
            Representation::Position => self.to_momentum().expect("position state converts"),
        }
    }

    fn converted(&self) -> CvState {
        match self.representation {
            Representation::Position => self.to_momentum().expect("position state converts"),
            Representation::Momentum => self.to_position().expect("momentum state converts"),
        }
    }

    pub fn scaled(&self, c: Complex64) -> CvState {
        CvState {
            grid: self.grid,
            representation: self.representation,
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &CvState) -> Result<CvState> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CvState) -> Result<CvState> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &CvState, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<CvState> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let other = if other.representation == self.representation {
            other.clone()
        } else {
            other.converted()
        };
        Ok(CvState {
            grid: self.grid,
            representation: self.representation,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(other.amplitudes.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// One factor of a Gaussian gate. Each is diagonal in position or momentum
/// and is applied spectrally, so all factors are exactly unitary on the
/// cyclic grid for any real parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateFactor {
    /// e^{iak̂}: multiplies momentum amplitudes by e^{iak}.
    Shift(f64),
    /// e^{ibθ̂}: multiplies position amplitudes by e^{ibθ}.
    Boost(f64),
    /// e^{icθ̂²}.
    PosShear(f64),
    /// e^{idk̂²}.
    MomShear(f64),
}

impl GateFactor {
    fn param(&self) -> f64 {
        match *self {
            GateFactor::Shift(a) => a,
            GateFactor::Boost(b) => b,
            GateFactor::PosShear(c) => c,
            GateFactor::MomShear(d) => d,
        }
    }
}

/// Product of [`GateFactor`]s and a unit-magnitude global phase.
///
/// Factors are stored in product order: `factors[0]` acts last, matching
/// the usual operator notation U = F_0 F_1 ⋯ F_{n−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianGate {
    factors: Vec<GateFactor>,
    phase: Complex64,
}

impl GaussianGate {
    pub fn identity() -> Self {
        GaussianGate {
            factors: Vec::new(),
            phase: Complex64::ONE,
        }
    }

    pub fn shift(a: f64) -> Self {
        Self::from_factors(vec![GateFactor::Shift(a)]).expect("finite parameter")
    }

    pub fn boost(b: f64) -> Self {
        Self::from_factors(vec![GateFactor::Boost(b)]).expect("finite parameter")
    }

    pub fn pos_shear(c: f64) -> Self {
        Self::from_factors(vec![GateFactor::PosShear(c)]).expect("finite parameter")
    }

    pub fn mom_shear(d: f64) -> Self {
        Self::from_factors(vec![GateFactor::MomShear(d)]).expect("finite parameter")
    }

    pub fn from_factors(factors: Vec<GateFactor>) -> Result<Self> {
        for f in &factors {
            if !f.param().is_finite() {
                return Err(Error::NonFinite(f.param()));
            }
        }
        Ok(GaussianGate {
            factors,
            phase: Complex64::ONE,
        })
    }

    /// Attaches the global phase e^{iφ}.
    pub fn with_phase(mut self, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFinite(phi));
        }
        self.phase *= Complex64::from_polar(1.0, phi);
        Ok(self)
    }

    /// Operator product `self ∘ rhs` (rhs applied first).
    pub fn compose(&self, rhs: &GaussianGate) -> GaussianGate {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&rhs.factors);
        GaussianGate {
            factors,
            phase: self.phase * rhs.phase,
        }
    }

    /// A momentum shift conjugated by a position shear,
    /// e^{icθ̂²} e^{iak̂} e^{−icθ̂²}.
    pub fn sheared_shift(a: f64, c: f64) -> Self {
        GaussianGate::pos_shear(c)
            .compose(&GaussianGate::shift(a))
            .compose(&GaussianGate::pos_shear(-c))
    }

    /// A momentum shift conjugated by a momentum shear,
    /// e^{idk̂²} e^{iak̂} e^{−idk̂²}. The conjugation commutes through, so
    /// this collapses to e^{iak̂} identically; it is kept as a regression
    /// guard for that collapse.
    pub fn momentum_conjugated_shift(a: f64, d: f64) -> Self {
        GaussianGate::mom_shear(d)
            .compose(&GaussianGate::shift(a))
            .compose(&GaussianGate::mom_shear(-d))
    }

    pub fn factors(&self) -> &[GateFactor] {
        &self.factors
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn inverse(&self) -> GaussianGate {
        let factors = self
            .factors
            .iter()
            .rev()
            .map(|f| match *f {
                GateFactor::Shift(a) => GateFactor::Shift(-a),
                GateFactor::Boost(b) => GateFactor::Boost(-b),
                GateFactor::PosShear(c) => GateFactor::PosShear(-c),
                GateFactor::MomShear(d) => GateFactor::MomShear(-d),
            })
            .collect();
        GaussianGate {
            factors,
            phase: self.phase.conj(),
        }
    }
}

/// Applies a Gaussian gate, factor by factor from the right, converting
/// between representations as each factor requires. The output is returned
/// in the input's representation.
pub fn apply_gaussian_gate(state: &CvState, gate: &GaussianGate) -> Result<CvState> {
    let original = state.representation();
    let mut work = state.clone();
    for factor in gate.factors.iter().rev() {
        work = apply_factor(work, *factor);
    }
    if gate.phase != Complex64::ONE {
        work = work.scaled(gate.phase);
    }
    Ok(match original {
        Representation::Position => work.into_position(),
        Representation::Momentum => work.into_momentum(),
    })
}

fn apply_factor(state: CvState, factor: GateFactor) -> CvState {
    let grid = state.grid();
    match factor {
        GateFactor::Shift(a) => {
            let mut s = state.into_momentum();
            for (u, amp) in s.amplitudes.iter_mut().enumerate() {
                *amp *= Complex64::from_polar(1.0, a * grid.momentum(u));
            }
            s
        }
        GateFactor::MomShear(d) => {
            let mut s = state.into_momentum();
            for (u, amp) in s.amplitudes.iter_mut().enumerate() {
                let k = grid.momentum(u);
                *amp *= Complex64::from_polar(1.0, d * k * k);
            }
            s
        }
        GateFactor::Boost(b) => {
            let mut s = state.into_position();
            for (j, amp) in s.amplitudes.iter_mut().enumerate() {
                *amp *= Complex64::from_polar(1.0, b * grid.theta(j));
            }
            s
        }
        GateFactor::PosShear(c) => {
            let mut s = state.into_position();
            for (j, amp) in s.amplitudes.iter_mut().enumerate() {
                let t = grid.theta(j);
                *amp *= Complex64::from_polar(1.0, c * t * t);
            }
            s
        }
    }
}

/// Position-representation state of two modes; amplitudes are stored
/// row-major with the first mode outermost: index = j_a·D_b + j_b.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    grid_a: GridSpec,
    grid_b: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl TwoModeState {
    pub fn from_amplitudes(
        grid_a: GridSpec,
        grid_b: GridSpec,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if amplitudes.len() != grid_a.dim() * grid_b.dim() {
            return Err(Error::DimensionMismatch {
                a: amplitudes.len(),
                b: grid_a.dim() * grid_b.dim(),
            });
        }
        Ok(TwoModeState {
            grid_a,
            grid_b,
            amplitudes,
        })
    }

    /// Tensor product of two single-mode states.
    pub fn product(a: &CvState, b: &CvState) -> TwoModeState {
        let a = a.clone().into_position();
        let b = b.clone().into_position();
        let db = b.grid().dim();
        let mut amplitudes = vec![Complex64::ZERO; a.grid().dim() * db];
        for (ja, &aa) in a.amplitudes().iter().enumerate() {
            for (jb, &bb) in b.amplitudes().iter().enumerate() {
                amplitudes[ja * db + jb] = aa * bb;
            }
        }
        TwoModeState {
            grid_a: a.grid(),
            grid_b: b.grid(),
            amplitudes,
        }
    }

    pub fn zero(grid_a: GridSpec, grid_b: GridSpec) -> Self {
        TwoModeState {
            grid_a,
            grid_b,
            amplitudes: vec![Complex64::ZERO; grid_a.dim() * grid_b.dim()],
        }
    }

    pub fn grid(&self, mode: usize) -> GridSpec {
        if mode == 0 {
            self.grid_a
        } else {
            self.grid_b
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &TwoModeState) -> Result<Complex64> {
        if self.grid_a != other.grid_a || self.grid_b != other.grid_b {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn overlap(&self, other: &TwoModeState) -> Result<f64> {
        let na = self.norm();
        let nb = other.norm();
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok(self.inner(other)?.norm() / (na * nb))
    }

    pub fn scaled(&self, c: Complex64) -> TwoModeState {
        TwoModeState {
            grid_a: self.grid_a,
            grid_b: self.grid_b,
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &TwoModeState) -> Result<TwoModeState> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TwoModeState) -> Result<TwoModeState> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &TwoModeState,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<TwoModeState> {
        if self.grid_a != other.grid_a || self.grid_b != other.grid_b {
            return Err(Error::GridMismatch);
        }
        Ok(TwoModeState {
            grid_a: self.grid_a,
            grid_b: self.grid_b,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(other.amplitudes.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Applies a Gaussian gate to one mode, transforming along that mode's
    /// axis only.
    pub fn apply_gaussian_on_mode(&self, mode: usize, gate: &GaussianGate) -> Result<TwoModeState> {
        let mut amplitudes = self.amplitudes.clone();
        let grid = self.grid(mode);
        // Track which representation the worked axis currently sits in.
        let mut in_momentum = false;
        for factor in gate.factors.iter().rev() {
            match factor {
                GateFactor::Shift(a) => {
                    self.axis_to_momentum(&mut amplitudes, mode, &mut in_momentum);
                    self.scale_axis(&mut amplitudes, mode, |u| {
                        Complex64::from_polar(1.0, a * grid.momentum(u))
                    });
                }
                GateFactor::MomShear(d) => {
                    self.axis_to_momentum(&mut amplitudes, mode, &mut in_momentum);
                    self.scale_axis(&mut amplitudes, mode, |u| {
                        let k = grid.momentum(u);
                        Complex64::from_polar(1.0, d * k * k)
                    });
                }
                GateFactor::Boost(b) => {
                    self.axis_to_position(&mut amplitudes, mode, &mut in_momentum);
                    self.scale_axis(&mut amplitudes, mode, |j| {
                        Complex64::from_polar(1.0, b * grid.theta(j))
                    });
                }
                GateFactor::PosShear(c) => {
                    self.axis_to_position(&mut amplitudes, mode, &mut in_momentum);
                    self.scale_axis(&mut amplitudes, mode, |j| {
                        let t = grid.theta(j);
                        Complex64::from_polar(1.0, c * t * t)
                    });
                }
            }
        }
        let mut dummy = in_momentum;
        self.axis_to_position(&mut amplitudes, mode, &mut dummy);
        if gate.phase != Complex64::ONE {
            for a in amplitudes.iter_mut() {
                *a *= gate.phase;
            }
        }
        Ok(TwoModeState {
            grid_a: self.grid_a,
            grid_b: self.grid_b,
            amplitudes,
        })
    }

    fn axis_to_momentum(&self, amps: &mut [Complex64], mode: usize, in_momentum: &mut bool) {
        if !*in_momentum {
            self.axis_fft(amps, mode, false);
            *in_momentum = true;
        }
    }

    fn axis_to_position(&self, amps: &mut [Complex64], mode: usize, in_momentum: &mut bool) {
        if *in_momentum {
            self.axis_fft(amps, mode, true);
            *in_momentum = false;
        }
    }

    fn axis_fft(&self, amps: &mut [Complex64], mode: usize, inverse: bool) {
        let (da, db) = (self.grid_a.dim(), self.grid_b.dim());
        let len = if mode == 0 { da } else { db };
        let scale = 1.0 / (len as f64).sqrt();
        let mut planner = FftPlanner::<f64>::new();
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let mut buf = vec![Complex64::ZERO; len];
        if mode == 0 {
            for jb in 0..db {
                for ja in 0..da {
                    buf[ja] = amps[ja * db + jb];
                }
                fft.process(&mut buf);
                for ja in 0..da {
                    amps[ja * db + jb] = buf[ja] * scale;
                }
            }
        } else {
            for ja in 0..da {
                let row = &mut amps[ja * db..(ja + 1) * db];
                fft.process(row);
                for v in row.iter_mut() {
                    *v *= scale;
                }
            }
        }
    }

    fn scale_axis(&self, amps: &mut [Complex64], mode: usize, phase: impl Fn(usize) -> Complex64) {
        let (da, db) = (self.grid_a.dim(), self.grid_b.dim());
        if mode == 0 {
            for ja in 0..da {
                let p = phase(ja);
                for jb in 0..db {
                    amps[ja * db + jb] *= p;
                }
            }
        } else {
            let phases: Vec<Complex64> = (0..db).map(phase).collect();
            for ja in 0..da {
                for jb in 0..db {
                    amps[ja * db + jb] *= phases[jb];
                }
            }
        }
    }
}
