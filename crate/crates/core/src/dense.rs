//! Brute-force reference engine.
//!
//! Any map on states can be materialized as a dense matrix in the position
//! basis, column by column, and compared entrywise against a structured
//! implementation or an analytic prediction. Everything here favors
//! readable exactness over speed: max-entry norms, explicit loops, and
//! hard budgets that keep the matrices desk-sized.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CvState, GridSpec, TwoModeState};

/// Largest single-mode dimension a dense probe will materialize.
pub const MAX_DENSE_DIM: usize = 4096;
/// Largest joint (two-mode) dimension a dense probe will materialize.
pub const MAX_JOINT_DENSE_DIM: usize = 1024;

/// Dense matrix over position-basis amplitudes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<DenseOperator> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                a: data.len(),
                b: rows * cols,
            });
        }
        Ok(DenseOperator { rows, cols, data })
    }

    pub fn identity(dim: usize) -> DenseOperator {
        let mut data = vec![Complex64::ZERO; dim * dim];
        for j in 0..dim {
            data[j * dim + j] = Complex64::ONE;
        }
        DenseOperator {
            rows: dim,
            cols: dim,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> DenseOperator {
        let mut data = vec![Complex64::ZERO; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.at(r, c).conj();
            }
        }
        DenseOperator {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                a: self.cols,
                b: rhs.rows,
            });
        }
        let mut data = vec![Complex64::ZERO; self.rows * rhs.cols];
        data.par_chunks_mut(rhs.cols).enumerate().for_each(|(r, row)| {
            for t in 0..self.cols {
                let a = self.at(r, t);
                if a == Complex64::ZERO {
                    continue;
                }
                let base = t * rhs.cols;
                for (c, slot) in row.iter_mut().enumerate() {
                    *slot += a * rhs.data[base + c];
                }
            }
        });
        Ok(DenseOperator {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    pub fn scaled(&self, c: Complex64) -> DenseOperator {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                a: self.rows * self.cols,
                b: rhs.rows * rhs.cols,
            });
        }
        Ok(DenseOperator {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Max-entry norm of A − A†.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols.min(self.rows) {
                worst = worst.max((self.at(r, c) - self.at(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Max-entry norm of A†A − 1.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("adjoint dims agree");
        let mut worst: f64 = 0.0;
        for r in 0..gram.rows {
            for c in 0..gram.cols {
                let expect = if r == c { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((gram.at(r, c) - expect).norm());
            }
        }
        worst
    }
}

/// Max-entry difference between two equally sized matrices.
pub fn compare(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::DimensionMismatch {
            a: a.rows * a.cols,
            b: b.rows * b.cols,
        });
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

fn assemble_columns(dim: usize, columns: Vec<Vec<Complex64>>) -> DenseOperator {
    let mut data = vec![Complex64::ZERO; dim * dim];
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            data[i * dim + j] = *v;
        }
    }
    DenseOperator {
        rows: dim,
        cols: dim,
        data,
    }
}

/// Materializes a single-mode map: column j is the image of position basis
/// state j. Columns are built in parallel; the result does not depend on
/// the thread count.
pub fn materialize<F>(grid: GridSpec, op: F) -> Result<DenseOperator>
where
    F: Fn(&CvState) -> Result<CvState> + Sync,
{
    let dim = grid.dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::BudgetExceeded {
            dim,
            max: MAX_DENSE_DIM,
        });
    }
    let columns = (0..dim)
        .into_par_iter()
        .map(|j| {
            let out = op(&CvState::position_basis(grid, j))?.into_position();
            Ok(out.amplitudes().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_columns(dim, columns))
}

/// Materializes a two-mode map over the joint position basis
/// (index j_a · D_b + j_b).
pub fn materialize_two<F>(grid_a: GridSpec, grid_b: GridSpec, op: F) -> Result<DenseOperator>
where
    F: Fn(&TwoModeState) -> Result<TwoModeState> + Sync,
{
    let dim = grid_a.dim() * grid_b.dim();
    if dim > MAX_JOINT_DENSE_DIM {
        return Err(Error::BudgetExceeded {
            dim,
            max: MAX_JOINT_DENSE_DIM,
        });
    }
    let columns = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut amps = vec![Complex64::ZERO; dim];
            amps[j] = Complex64::ONE;
            let basis = TwoModeState::from_amplitudes(grid_a, grid_b, amps)?;
            Ok(op(&basis)?.amplitudes().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_columns(dim, columns))
}

/// The Zak transform as an explicit unitary matrix, rows ordered by fiber:
/// row 2·(s·N_n + m) carries the base-sector component of fiber (s, m) and
/// row 2·(s·N_n + m) + 1 its shifted partner. Conjugating a fiberwise
/// operator by this matrix exposes its 2×2 block structure.
pub fn zak_matrix(grid: GridSpec) -> Result<DenseOperator> {
    let dim = grid.dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::BudgetExceeded {
            dim,
            max: MAX_DENSE_DIM,
        });
    }
    let nn = grid.period_count();
    let scale = 1.0 / (nn as f64).sqrt();
    let mut data = vec![Complex64::ZERO; dim * dim];
    for s in 0..grid.half_sectors() {
        for m in 0..nn {
            for (half, sector) in [(0, s), (1, s + grid.half_sectors())] {
                let row = 2 * grid.half_index(s, m) + half;
                for n in 0..nn {
                    let col = grid.position_index(sector, n);
                    let phase = -std::f64::consts::TAU * (n as f64) * (m as f64) / (nn as f64);
                    data[row * dim + col] = Complex64::from_polar(scale, phase);
                }
            }
        }
    }
    Ok(DenseOperator {
        rows: dim,
        cols: dim,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{apply_gamma, make_weight, Axis, GammaOperator, WeightFamily};
    use crate::grid::{apply_gaussian_gate, GaussianGate};
    use crate::zak::{zak_forward, zak_inverse};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn shift_matrix(grid: GridSpec, a: f64) -> DenseOperator {
        materialize(grid, |psi| {
            apply_gaussian_gate(psi, &GaussianGate::shift(a))
        })
        .unwrap()
    }

    #[test]
    fn shift_by_one_step_is_a_cyclic_permutation() {
        let grid = GridSpec::new(8, 4).unwrap();
        let dim = grid.dim();
        let m = shift_matrix(grid, grid.dtheta());
        let mut expect = vec![Complex64::ZERO; dim * dim];
        for c in 0..dim {
            let r = (c + dim - 1) % dim;
            expect[r * dim + c] = Complex64::ONE;
        }
        let expect = DenseOperator::from_rows(dim, dim, expect).unwrap();
        assert!(compare(&m, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn identity_map_materializes_to_identity() {
        let grid = GridSpec::new(8, 4).unwrap();
        let m = materialize(grid, |psi| Ok(psi.clone())).unwrap();
        assert!(compare(&m, &DenseOperator::identity(grid.dim())).unwrap() == 0.0);
    }

    #[test]
    fn weighted_z_flip_is_position_diagonal() {
        let grid = GridSpec::new(16, 8).unwrap();
        let weight = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let op = GammaOperator::new(grid, Axis::Z, weight).unwrap();
        let m = materialize(grid, |psi| Ok(apply_gamma(psi, &op)?.0)).unwrap();
        let dim = grid.dim();
        let mut expect = vec![Complex64::ZERO; dim * dim];
        for j in 0..dim {
            expect[j * dim + j] = Complex64::new(grid.theta(j).cos(), 0.0);
        }
        let expect = DenseOperator::from_rows(dim, dim, expect).unwrap();
        assert!(compare(&m, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn fiber_transform_round_trip_is_identity() {
        let grid = GridSpec::new(16, 8).unwrap();
        let m = materialize(grid, |psi| zak_inverse(&zak_forward(psi)?)).unwrap();
        assert!(compare(&m, &DenseOperator::identity(grid.dim())).unwrap() < 1e-12);
    }

    #[test]
    fn modular_unitaries_commute() {
        let grid = GridSpec::new(16, 8).unwrap();
        // e^{iθ̂} is diagonal in position; e^{i2πk̂} is Shift(2π).
        let phase = materialize(grid, |psi| {
            let mut amps = psi.clone().into_position().amplitudes().to_vec();
            for (j, a) in amps.iter_mut().enumerate() {
                *a *= Complex64::from_polar(1.0, grid.theta(j));
            }
            CvState::new(grid, crate::grid::Representation::Position, amps)
        })
        .unwrap();
        let winding = shift_matrix(grid, TAU);
        let ab = phase.mul(&winding).unwrap();
        let ba = winding.mul(&phase).unwrap();
        assert!(compare(&ab, &ba).unwrap() < 1e-12);
    }

    #[test]
    fn materialization_is_linear() {
        let grid = GridSpec::new(8, 2).unwrap();
        let ca = Complex64::new(0.3, -0.8);
        let cb = Complex64::new(-1.1, 0.2);
        let f = GaussianGate::shift(0.7);
        let g = GaussianGate::boost(0.4);
        let mf = materialize(grid, |psi| apply_gaussian_gate(psi, &f)).unwrap();
        let mg = materialize(grid, |psi| apply_gaussian_gate(psi, &g)).unwrap();
        let combo = materialize(grid, |psi| {
            let a = apply_gaussian_gate(psi, &f)?.into_position().scaled(ca);
            let b = apply_gaussian_gate(psi, &g)?.into_position().scaled(cb);
            a.add(&b)
        })
        .unwrap();
        let expect = mf.scaled(ca).add(&mg.scaled(cb)).unwrap();
        assert!(compare(&combo, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn defect_reference_values() {
        let grid = GridSpec::new(32, 8).unwrap();
        let shift = shift_matrix(grid, 0.3);
        assert!(shift.unitarity_defect() < 1e-12);
        assert!(shift.hermiticity_defect() > 1e-3);

        let ones = make_weight(grid, WeightFamily::Constant(1.0)).unwrap();
        let gy = GammaOperator::new(grid, Axis::Y, ones).unwrap();
        let my = materialize(grid, |psi| Ok(apply_gamma(psi, &gy)?.0)).unwrap();
        assert!(my.hermiticity_defect() < 1e-12);
        assert!(my.unitarity_defect() < 1e-12);

        let cos = make_weight(grid, WeightFamily::CosTheta).unwrap();
        let gz = GammaOperator::new(grid, Axis::Z, cos).unwrap();
        let mz = materialize(grid, |psi| Ok(apply_gamma(psi, &gz)?.0)).unwrap();
        assert!(mz.hermiticity_defect() < 1e-12);
        // max |cos²θ_j − 1| = 1 − cos²(Δθ/... ) reaches 1 where cos θ_j = 0.
        assert!(mz.unitarity_defect() >= 0.5);
    }

    #[test]
    fn fiber_operators_are_block_diagonal_in_the_zak_basis() {
        let grid = GridSpec::new(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let table: Vec<f64> = (0..grid.half_len())
            .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
            .collect();
        let weight = make_weight(grid, WeightFamily::Custom(table)).unwrap();
        let op = GammaOperator::new(grid, Axis::Custom(0.3, -0.5, 0.8), weight).unwrap();
        let m = materialize(grid, |psi| Ok(apply_gamma(psi, &op)?.0)).unwrap();
        let z = zak_matrix(grid).unwrap();
        assert!(z.unitarity_defect() < 1e-12);
        let blocked = z.mul(&m).unwrap().mul(&z.adjoint()).unwrap();
        let mut off_block: f64 = 0.0;
        for r in 0..blocked.rows() {
            for c in 0..blocked.cols() {
                if r / 2 != c / 2 {
                    off_block = off_block.max(blocked.at(r, c).norm());
                }
            }
        }
        assert!(off_block < 1e-12);
    }

    #[test]
    fn zak_matrix_rows_match_fiber_ordering() {
        let grid = GridSpec::new(8, 4).unwrap();
        let z = zak_matrix(grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let amps: Vec<Complex64> = (0..grid.dim())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let state = CvState::new(grid, crate::grid::Representation::Position, amps.clone()).unwrap();
        let field = zak_forward(&state).unwrap();
        for s in 0..grid.half_sectors() {
            for m in 0..grid.period_count() {
                let fiber = field.fiber(s, m).unwrap();
                for (half, expect) in [(0, fiber.v0), (1, fiber.v1)] {
                    let row = 2 * grid.half_index(s, m) + half;
                    let mut acc = Complex64::ZERO;
                    for (c, amp) in amps.iter().enumerate() {
                        acc += z.at(row, c) * amp;
                    }
                    assert!((acc - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn budgets_are_enforced() {
        let big = GridSpec::with_max_dim(2, 4096, 8192).unwrap();
        let err = materialize(big, |psi| Ok(psi.clone())).unwrap_err();
        assert!(err.to_string().contains("dense budget exceeded"));

        let per_mode = GridSpec::new(16, 4).unwrap();
        let err = materialize_two(per_mode, per_mode, |psi| Ok(psi.clone())).unwrap_err();
        assert!(err.to_string().contains("dense budget exceeded"));

        let small = GridSpec::new(8, 4).unwrap();
        let id = materialize_two(small, small, |psi| Ok(psi.clone())).unwrap();
        assert!(compare(&id, &DenseOperator::identity(1024)).unwrap() == 0.0);
    }

    #[test]
    fn compare_rejects_mismatched_shapes() {
        let a = DenseOperator::identity(4);
        let b = DenseOperator::identity(5);
        assert!(compare(&a, &b).is_err());
        assert!(compare(&a, &a).unwrap() == 0.0);
    }
}
