//! Complex symmetric pair matrices and unitaries.
//!
//! A [`PairMatrix`] holds pair-creation amplitudes between modes: the same
//! container serves for the source amplitudes before the circuit, the target
//! amplitudes after it, and the disentangled-exponential weights, which all
//! coincide in the low-gain regime. A [`UnitaryMatrix`] is a validated linear
//! circuit.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMat = DMatrix<C64>;

/// Default unitarity tolerance, scaled by `sqrt(dim)` on use.
pub const TOL_UNITARY: f64 = 1e-12;

fn check_finite(m: &CMat) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry(i, j));
            }
        }
    }
    Ok(())
}

/// An `M x M` complex symmetric matrix of pair amplitudes.
///
/// Symmetry holds exactly; constructors either mirror an upper triangle or
/// average `(A + A^T) / 2`, which removes a class of silent input errors.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    entries: CMat,
}

impl PairMatrix {
    /// Build from a full matrix, symmetrizing via `(A + A^T) / 2`.
    pub fn from_matrix(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        check_finite(&m)?;
        let n = m.nrows();
        let mut sym = m.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)]) * C64::new(0.5, 0.0);
                sym[(i, j)] = avg;
                sym[(j, i)] = avg;
            }
        }
        Ok(Self { entries: sym })
    }

    /// Build from upper-triangle entries `(row, col, value)` with `row <= col`;
    /// the lower triangle is mirrored.
    pub fn from_upper_triangle(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut m = CMat::zeros(dim, dim);
        for (i, j, z) in entries {
            if i > j || j >= dim {
                return Err(Error::InvalidInput(format!(
                    "upper-triangle entry ({i}, {j}) out of range for dim {dim}"
                )));
            }
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
        check_finite(&m)?;
        Ok(Self { entries: m })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: CMat::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, m: usize, m2: usize) -> C64 {
        self.entries[(m, m2)]
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    /// `sum |entries|^2` over all ordered index pairs; the low-gain guard
    /// quantity.
    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Multiply every entry by a real scalar.
    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: self.entries.map(|z| z * c) }
    }

    /// Congruence transform `U A U^T`, re-symmetrized against rounding.
    pub fn congruence(&self, u: &UnitaryMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        let m = u.matrix() * &self.entries * u.matrix().transpose();
        Self::from_matrix(m)
    }

    /// Nonzero entries of the upper triangle (diagonal included), row-major.
    pub fn upper_triangle_nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let z = self.entries[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    out.push((i, j, z));
                }
            }
        }
        out
    }
}

/// An `M x M` unitary, validated to `|U^H U - 1|_F <= tol * sqrt(M)` on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMat,
}

impl UnitaryMatrix {
    pub fn from_matrix(m: CMat) -> Result<Self> {
        Self::from_matrix_with_tol(m, TOL_UNITARY)
    }

    pub fn from_matrix_with_tol(m: CMat, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        check_finite(&m)?;
        let n = m.nrows();
        let residual = unitarity_residual(&m);
        let bound = tol * (n as f64).sqrt();
        if residual > bound {
            return Err(Error::NotUnitary { residual, tol: bound });
        }
        Ok(Self { entries: m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMat::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    /// `|U^H U - 1|_F`, unscaled.
    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.entries)
    }
}

/// `|U^H U - 1|_F` for a raw matrix.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - CMat::identity(n, n)).norm()
}
