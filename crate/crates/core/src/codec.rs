//! Logical qubits carried by the fiber stack: encoding, decoding, and
//! figures of merit.
//!
//! An envelope f(s, m) distributes amplitude over the base fibers; the
//! logical basis states put f in the base sector (|0̄⟩) or its π-shifted
//! partner (|1̄⟩), so a general encoded state is
//! cos(χ/2)|0̄⟩ + e^{iφ}·sin(χ/2)|1̄⟩ with both terms sharing the envelope.
//! Decoding is the partial trace over the fiber label: every fiber
//! contributes its two-component amplitude v as a rank-one term, and
//! ρ = Σ v v† / Σ v†v. This is the unique decode map under which any
//! fiberwise-identical 2×2 operation acts as that same single-qubit
//! channel on ρ, and it extends to two modes with 4-component joint-fiber
//! amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gamma::WeightSpec;
use crate::grid::{CvState, GridSpec, TwoModeState};
use crate::zak::{zak_forward, zak_forward_two, zak_inverse, ModularField};

/// Envelope profiles over the half-grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeFamily {
    /// Equal weight on every fiber.
    Uniform,
    /// Separable wrapped gaussian, periods π in θ̄ and 1 in k̄; widths are
    /// amplitude widths, f ∝ e^{−Δ²/(4σ²)}.
    Gaussian {
        theta_center: f64,
        theta_width: f64,
        k_center: f64,
        k_width: f64,
    },
    /// All weight on a single fiber.
    SingleFiber { s: usize, m: usize },
}

impl EnvelopeFamily {
    /// The library default: a gaussian centered mid-domain, narrow enough
    /// that the closed-form weight families vary slowly over its support.
    pub fn default_gaussian() -> EnvelopeFamily {
        EnvelopeFamily::Gaussian {
            theta_center: PI / 2.0,
            theta_width: PI / 8.0,
            k_center: 0.5,
            k_width: 0.125,
        }
    }
}

/// Normalized fiber-amplitude profile, s-major over the half-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    grid: GridSpec,
    family: EnvelopeFamily,
    values: Vec<Complex64>,
}

impl Envelope {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn family(&self) -> EnvelopeFamily {
        self.family
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, s: usize, m: usize) -> Complex64 {
        self.values[self.grid.half_index(s, m)]
    }
}

fn wrapped_gaussian(x: f64, center: f64, width: f64, period: f64) -> f64 {
    let mut acc = 0.0;
    for w in -64i64..=64 {
        let d = x - center + w as f64 * period;
        acc += (-d * d / (4.0 * width * width)).exp();
    }
    acc
}

/// Tabulates and normalizes an envelope on the half-grid of `grid`.
pub fn make_envelope(grid: GridSpec, family: EnvelopeFamily) -> Result<Envelope> {
    let half = grid.half_len();
    let mut values = vec![Complex64::ZERO; half];
    match family {
        EnvelopeFamily::Uniform => {
            let v = Complex64::new(1.0 / (half as f64).sqrt(), 0.0);
            values.fill(v);
        }
        EnvelopeFamily::SingleFiber { s, m } => {
            if s >= grid.half_sectors() || m >= grid.period_count() {
                return Err(Error::FiberIndexOutOfRange { s, m });
            }
            values[grid.half_index(s, m)] = Complex64::ONE;
        }
        EnvelopeFamily::Gaussian {
            theta_center,
            theta_width,
            k_center,
            k_width,
        } => {
            for p in [theta_center, k_center, theta_width, k_width] {
                if !p.is_finite() {
                    return Err(Error::NonFinite(p));
                }
            }
            if theta_width <= 0.0 || k_width <= 0.0 {
                return Err(Error::BadEnvelopeWidth);
            }
            for s in 0..grid.half_sectors() {
                let ft = wrapped_gaussian(grid.modular_theta(s), theta_center, theta_width, PI);
                for m in 0..grid.period_count() {
                    let fk = wrapped_gaussian(grid.modular_k(m), k_center, k_width, 1.0);
                    values[grid.half_index(s, m)] = Complex64::new(ft * fk, 0.0);
                }
            }
        }
    }
    let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateEnvelope);
    }
    for v in values.iter_mut() {
        *v /= norm;
    }
    Ok(Envelope {
        grid,
        family,
        values,
    })
}

/// Builds the encoded state cos(χ/2)|0̄⟩ + e^{iφ} sin(χ/2)|1̄⟩ in position
/// representation. The output is exactly normalized because the two sectors
/// are disjoint and share the envelope.
pub fn encode_logical(chi: f64, phi: f64, env: &Envelope) -> Result<CvState> {
    if !chi.is_finite() {
        return Err(Error::NonFinite(chi));
    }
    if !phi.is_finite() {
        return Err(Error::NonFinite(phi));
    }
    let grid = env.grid();
    let c0 = Complex64::new((chi / 2.0).cos(), 0.0);
    let c1 = Complex64::from_polar((chi / 2.0).sin(), phi);
    let mut field = ModularField::zero(grid);
    for s in 0..grid.half_sectors() {
        for m in 0..grid.period_count() {
            let f = env.value(s, m);
            field.set_fiber(s, m, c0 * f, c1 * f)?;
        }
    }
    zak_inverse(&field)
}

/// Logical density matrix recovered from a CV state, with the figures of
/// merit the harness reports.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalReadout {
    rho: DMatrix<Complex64>,
    input_norm: f64,
}

impl LogicalReadout {
    fn from_parts(rho: DMatrix<Complex64>, input_norm: f64) -> LogicalReadout {
        LogicalReadout { rho, input_norm }
    }

    /// The normalized density matrix (2×2 for one mode, 4×4 for two).
    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Norm of the CV state that was decoded (decode renormalizes; this is
    /// what it discarded).
    pub fn input_norm(&self) -> f64 {
        self.input_norm
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) for single-qubit readouts.
    pub fn bloch(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let r01 = self.rho[(0, 1)];
        Some([
            2.0 * r01.re,
            -2.0 * r01.im,
            self.rho[(0, 0)].re - self.rho[(1, 1)].re,
        ])
    }

    /// Von Neumann entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        let eig = self.rho.clone().symmetric_eigen();
        let mut h = 0.0;
        for lam in eig.eigenvalues.iter() {
            let l = lam.max(0.0);
            if l > 0.0 {
                h -= l * l.log2();
            }
        }
        h
    }

    /// Partial trace of a two-qubit readout down to one qubit
    /// (mode 0 keeps the high bit).
    pub fn marginal(&self, mode: usize) -> Result<LogicalReadout> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch {
                a: self.dim(),
                b: 4,
            });
        }
        let mut rho = DMatrix::<Complex64>::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::ZERO;
                for t in 0..2 {
                    let (r, c) = if mode == 0 {
                        (i * 2 + t, j * 2 + t)
                    } else {
                        (t * 2 + i, t * 2 + j)
                    };
                    acc += self.rho[(r, c)];
                }
                rho[(i, j)] = acc;
            }
        }
        Ok(LogicalReadout::from_parts(rho, self.input_norm))
    }
}

/// Decodes a single-mode state: ρ = Σ_fibers v v† / Σ v†v.
pub fn decode_logical(state: &CvState) -> Result<LogicalReadout> {
    let field = zak_forward(state)?;
    let grid = field.grid();
    let mut rho = DMatrix::<Complex64>::zeros(2, 2);
    let mut total = 0.0;
    for s in 0..grid.half_sectors() {
        for m in 0..grid.period_count() {
            let fiber = field.fiber(s, m)?;
            let v = [fiber.v0, fiber.v1];
            total += v[0].norm_sqr() + v[1].norm_sqr();
            for i in 0..2 {
                for j in 0..2 {
                    rho[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroNormState);
    }
    rho /= Complex64::new(total, 0.0);
    Ok(LogicalReadout::from_parts(rho, total.sqrt()))
}

/// Decodes a two-mode state through joint fibers into a 4×4 density matrix
/// (component order 00, 01, 10, 11; mode 0 is the high bit).
pub fn decode_logical_two(state: &TwoModeState) -> Result<LogicalReadout> {
    let field = zak_forward_two(state)?;
    let ga = field.grid(0);
    let gb = field.grid(1);
    let mut rho = DMatrix::<Complex64>::zeros(4, 4);
    let mut total = 0.0;
    for sa in 0..ga.half_sectors() {
        for ma in 0..ga.period_count() {
            for sb in 0..gb.half_sectors() {
                for mb in 0..gb.period_count() {
                    let v = field.fiber(sa, ma, sb, mb)?;
                    total += v.iter().map(|c| c.norm_sqr()).sum::<f64>();
                    for i in 0..4 {
                        for j in 0..4 {
                            rho[(i, j)] += v[i] * v[j].conj();
                        }
                    }
                }
            }
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroNormState);
    }
    rho /= Complex64::new(total, 0.0);
    Ok(LogicalReadout::from_parts(rho, total.sqrt()))
}

fn psd_sqrt(rho: &DMatrix<Complex64>, label: f64) -> Result<DMatrix<Complex64>> {
    let eig = rho.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-9 {
        return Err(Error::NotPositive(min.min(label)));
    }
    let n = rho.nrows();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (idx, lam) in eig.eigenvalues.iter().enumerate() {
        let root = lam.max(0.0).sqrt();
        let col = eig.eigenvectors.column(idx);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * Complex64::new(root, 0.0);
            }
        }
    }
    Ok(out)
}

/// Fidelity F(ρ, σ) = [Tr √(√ρ σ √ρ)]², symmetric, 1 iff the states agree
/// when either is pure.
pub fn logical_fidelity(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> Result<f64> {
    if rho.nrows() != sigma.nrows() || rho.ncols() != sigma.ncols() || rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch {
            a: rho.nrows() * rho.ncols(),
            b: sigma.nrows() * sigma.ncols(),
        });
    }
    let sr = psd_sqrt(rho, 0.0)?;
    let inner = &sr * sigma * &sr;
    let root = psd_sqrt(&inner, 0.0)?;
    let f = root.trace().re;
    Ok((f * f).clamp(0.0, 1.0 + 1e-9).min(1.0))
}

/// Expectation values (⟨Γx⟩, ⟨Γy⟩, ⟨Γz⟩, ⟨1_ζ⟩) for one weight, computed
/// fiberwise on a normalized state.
pub fn bloch_readout(state: &CvState, weight: &WeightSpec) -> Result<[f64; 4]> {
    if state.grid() != weight.grid() {
        return Err(Error::GridMismatch);
    }
    let field = zak_forward(state)?;
    let grid = field.grid();
    let mut out = [0.0; 4];
    for s in 0..grid.half_sectors() {
        for m in 0..grid.period_count() {
            let fiber = field.fiber(s, m)?;
            let z = weight.value(s, m);
            let (v0, v1) = (fiber.v0, fiber.v1);
            let cross = v0.conj() * v1;
            out[0] += z * 2.0 * cross.re;
            out[1] += z * 2.0 * cross.im;
            out[2] += z * (v0.norm_sqr() - v1.norm_sqr());
            out[3] += z * (v0.norm_sqr() + v1.norm_sqr());
        }
    }
    Ok(out)
}
