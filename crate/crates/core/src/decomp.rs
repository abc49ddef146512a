//! Matrix factorizations and the solvers for `beta = U beta_bar U^T`.
//!
//! [`takagi`] factors a complex symmetric matrix as `U diag(s) U^T`;
//! [`solve_global`] applies it to the whole pair matrix, and
//! [`solve_block_constrained`] solves the blockwise condition
//! `beta_ij = U_ii beta_bar_ij U_jj^T` for a block-diagonal circuit,
//! resolving each block by Takagi, polar, or singular value decomposition
//! depending on which block unitaries are already pinned.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, OverConstraintReport, Result};
use crate::matrix::{CMat, PairMatrix, UnitaryMatrix};
use crate::partition::{block, write_block, Partition};

/// Singular values below `SINGULAR_FLOOR * max_singular` are treated as zero.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// Relative reconstruction residual above which a constrained solve is
/// reported as over-constrained instead of returned.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-8;

/// Result of the Takagi (Autonne) factorization `A = U diag(s) U^T`.
///
/// The representative is one valid gauge; under degenerate singular values
/// and sign choices the factor is not unique, so correctness is always the
/// reconstruction identity, never elementwise equality.
#[derive(Debug, Clone)]
pub struct TakagiResult {
    pub unitary: UnitaryMatrix,
    /// Nonnegative, descending.
    pub singulars: Vec<f64>,
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Works through the real symmetric embedding
/// `B = [[Re A, Im A], [Im A, -Re A]]`: eigenvectors `(x; y)` of `B` with
/// eigenvalue `s >= 0` are exactly the con-eigenvectors `u = x + i y`
/// satisfying `A conj(u) = s u`, and the spectrum comes in `+-s` pairs. The
/// eigensolver keeps degenerate clusters orthonormal, so no gap-dependent
/// post-processing is needed; columns for singular values at or below the
/// floor are replaced by an orthonormal completion, which the zero singular
/// values erase from the reconstruction.
pub fn takagi(a: &PairMatrix) -> Result<TakagiResult> {
    let n = a.dim();
    if n == 0 {
        return Ok(TakagiResult { unitary: UnitaryMatrix::identity(0), singulars: Vec::new() });
    }
    let m = a.matrix();
    let mut b = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            b[(i, j)] = z.re;
            b[(i, j + n)] = z.im;
            b[(i + n, j)] = z.im;
            b[(i + n, j + n)] = -z.re;
        }
    }
    let eig = b.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&p, &q| {
        eig.eigenvalues[q]
            .partial_cmp(&eig.eigenvalues[p])
            .expect("symmetric eigenvalues are finite")
    });

    let s_max = eig.eigenvalues[order[0]].max(0.0);
    let floor = SINGULAR_FLOOR * s_max;
    let mut unitary = CMat::zeros(n, n);
    let mut singulars = vec![0.0; n];
    let mut kept = 0;
    for &k in order.iter().take(n) {
        let s = eig.eigenvalues[k];
        if s <= floor {
            break;
        }
        let col = eig.eigenvectors.column(k);
        for r in 0..n {
            unitary[(r, kept)] = C64::new(col[r], col[r + n]);
        }
        singulars[kept] = s;
        kept += 1;
    }
    complete_unitary(&mut unitary, kept);
    Ok(TakagiResult { unitary: UnitaryMatrix::from_matrix(unitary)?, singulars })
}

/// Fill columns `kept..n` with an orthonormal completion of the leading
/// columns, chosen deterministically from the standard basis.
///
/// Each round orthogonalizes every basis vector against the placed columns
/// and keeps the largest residual; pigeonhole guarantees its norm is at
/// least `1/sqrt(n)`, so the completion never stalls.
fn complete_unitary(u: &mut CMat, kept: usize) {
    let n = u.nrows();
    let orthogonalized = |u: &CMat, filled: usize, candidate: usize| -> Vec<C64> {
        let mut v: Vec<C64> = vec![C64::new(0.0, 0.0); n];
        v[candidate] = C64::new(1.0, 0.0);
        // re-orthogonalize twice against everything already placed
        for _ in 0..2 {
            for c in 0..filled {
                let proj: C64 = (0..n).map(|r| u[(r, c)].conj() * v[r]).sum();
                for (r, vr) in v.iter_mut().enumerate() {
                    *vr -= proj * u[(r, c)];
                }
            }
        }
        v
    };
    for filled in kept..n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for candidate in 0..n {
            let v = orthogonalized(u, filled, candidate);
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("n > 0");
        for (r, vr) in v.iter().enumerate() {
            u[(r, filled)] = vr / norm;
        }
    }
}

/// Singular value decomposition `A = U diag(s) V^H` with `s` descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMat,
    /// Nonnegative, descending.
    pub singulars: Vec<f64>,
    pub v: CMat,
}

/// SVD of a square complex matrix, singular values sorted descending.
pub fn svd(a: &CMat) -> Result<SvdResult> {
    for z in a.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFiniteEntry(0, 0));
        }
    }
    let f = a.clone().svd(true, true);
    let u = f.u.expect("requested");
    let v_t = f.v_t.expect("requested");
    let mut order: Vec<usize> = (0..f.singular_values.len()).collect();
    order.sort_by(|&p, &q| {
        f.singular_values[q]
            .partial_cmp(&f.singular_values[p])
            .expect("singular values are finite")
    });
    let singulars: Vec<f64> = order.iter().map(|&k| f.singular_values[k]).collect();
    let u_sorted = CMat::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = v_t.adjoint();
    let v_sorted = CMat::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    Ok(SvdResult { u: u_sorted, singulars, v: v_sorted })
}

/// Polar factors of a square matrix.
#[derive(Debug, Clone)]
pub struct PolarResult {
    pub unitary: CMat,
    /// Hermitian positive semidefinite.
    pub positive: CMat,
}

/// Left polar decomposition `A = P W`, with `P` the Hermitian psd factor.
pub fn polar_left(a: &CMat) -> Result<PolarResult> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    let f = svd(a)?;
    let s = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        f.singulars.len(),
        f.singulars.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let positive = &f.u * &s * f.u.adjoint();
    let unitary = &f.u * f.v.adjoint();
    Ok(PolarResult { unitary, positive })
}

/// Right polar decomposition `A = W P`, with `P` the Hermitian psd factor.
pub fn polar_right(a: &CMat) -> Result<PolarResult> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    let f = svd(a)?;
    let s = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        f.singulars.len(),
        f.singulars.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let positive = &f.v * &s * f.v.adjoint();
    let unitary = &f.u * f.v.adjoint();
    Ok(PolarResult { unitary, positive })
}

/// How a block of the constrained solve was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Zero target block: source block taken zero, unitaries untouched.
    Zero,
    /// Nonzero diagonal block: Takagi fixes the group unitary.
    DiagTakagi,
    /// Both unitaries already fixed: source block by matrix multiplication.
    OffdiagMult,
    /// One unitary fixed: polar decomposition of the one-sided product.
    OffdiagPolar,
    /// Neither fixed: singular value decomposition (or the identity gauge
    /// when the block is already diagonal).
    OffdiagSvd,
    /// Group never constrained: unitary defaults to the identity.
    FreeIdentity,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Zero => "zero",
            CaseTag::DiagTakagi => "diag-takagi",
            CaseTag::OffdiagMult => "offdiag-mult",
            CaseTag::OffdiagPolar => "offdiag-polar",
            CaseTag::OffdiagSvd => "offdiag-svd",
            CaseTag::FreeIdentity => "free-identity",
        };
        f.write_str(s)
    }
}

/// One record of the deterministic resolution order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionRecord {
    pub block: (String, String),
    pub case: CaseTag,
}

/// A solved source configuration: symmetric `beta_bar`, one unitary per
/// partition group, and the residual of `beta - U beta_bar U^T` relative to
/// `|beta|_F`.
#[derive(Debug, Clone)]
pub struct BlockSolution {
    partition: Partition,
    beta_bar: PairMatrix,
    block_unitaries: Vec<UnitaryMatrix>,
    residual: f64,
    resolution_log: Vec<ResolutionRecord>,
}

impl BlockSolution {
    /// Assemble a solution by hand from per-group unitaries and a full
    /// `beta_bar`; the residual is computed against `target`.
    pub fn from_parts(
        partition: Partition,
        beta_bar: PairMatrix,
        block_unitaries: Vec<UnitaryMatrix>,
        target: &PairMatrix,
    ) -> Result<Self> {
        if beta_bar.dim() != partition.dim() || target.dim() != partition.dim() {
            return Err(Error::DimensionMismatch {
                expected: partition.dim(),
                got: beta_bar.dim(),
            });
        }
        if block_unitaries.len() != partition.n_groups() {
            return Err(Error::DimensionMismatch {
                expected: partition.n_groups(),
                got: block_unitaries.len(),
            });
        }
        for (g, u) in block_unitaries.iter().enumerate() {
            if u.dim() != partition.members(g).len() {
                return Err(Error::DimensionMismatch {
                    expected: partition.members(g).len(),
                    got: u.dim(),
                });
            }
        }
        let mut sol = Self {
            partition,
            beta_bar,
            block_unitaries,
            residual: 0.0,
            resolution_log: Vec::new(),
        };
        sol.residual = residual_between(target.matrix(), sol.reconstruct().matrix());
        Ok(sol)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn beta_bar(&self) -> &PairMatrix {
        &self.beta_bar
    }

    pub fn block_unitaries(&self) -> &[UnitaryMatrix] {
        &self.block_unitaries
    }

    pub fn block_unitary(&self, group: &str) -> Result<&UnitaryMatrix> {
        Ok(&self.block_unitaries[self.partition.group_index(group)?])
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn resolution_log(&self) -> &[ResolutionRecord] {
        &self.resolution_log
    }

    /// The full circuit: block unitaries placed on their groups, exact zeros
    /// everywhere else.
    pub fn assembled_unitary(&self) -> UnitaryMatrix {
        let n = self.partition.dim();
        let mut u = CMat::zeros(n, n);
        for (g, ug) in self.block_unitaries.iter().enumerate() {
            write_block(&mut u, &self.partition, g, g, ug.matrix());
        }
        UnitaryMatrix::from_matrix(u).expect("block-diagonal of unitaries is unitary")
    }

    /// `U beta_bar U^T` from the assembled block-diagonal circuit.
    pub fn reconstruct(&self) -> PairMatrix {
        let u = self.assembled_unitary();
        self.beta_bar.congruence(&u).expect("dimensions match")
    }

    /// Nonzero upper-triangle entries of `beta_bar`: the photon-pair sources
    /// that realize the solution.
    pub fn sources(&self) -> Vec<(usize, usize, C64)> {
        self.beta_bar.upper_triangle_nonzeros()
    }
}

fn residual_between(target: &CMat, rec: &CMat) -> f64 {
    let diff = target - rec;
    let norm = target.norm();
    if norm > 0.0 {
        diff.norm() / norm
    } else {
        diff.norm()
    }
}

/// Options for the constrained solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Require every `beta_bar` block to be diagonal, so each source couples
    /// a single mode pair. Inputs that admit no such solution are reported
    /// as over-constrained.
    pub diagonal_sources: bool,
}

/// Unconstrained solve: global Takagi of `beta`, giving a diagonal
/// `beta_bar` (one independent degenerate-pair source per mode) under a
/// single trivial group.
pub fn solve_global(beta: &PairMatrix) -> Result<BlockSolution> {
    solve_block_constrained(beta, &Partition::single_group(beta.dim()))
}

/// Solve `beta_ij = U_ii beta_bar_ij U_jj^T` for a block-diagonal circuit.
pub fn solve_block_constrained(beta: &PairMatrix, partition: &Partition) -> Result<BlockSolution> {
    solve_block_constrained_with(beta, partition, SolveOptions::default())
}

/// [`solve_block_constrained`] with explicit [`SolveOptions`].
///
/// Resolution order: zero blocks, then nonzero diagonal blocks (Takagi),
/// then nonzero off-diagonal blocks picked dynamically so blocks with more
/// already-fixed unitaries go first (ties lexicographic), then identity for
/// any group never constrained. Every case writes a source block that
/// reproduces its target block exactly, except under `diagonal_sources`
/// where an off-diagonal-heavy source block is projected onto its diagonal
/// and the final residual check reports the inconsistency.
pub fn solve_block_constrained_with(
    beta: &PairMatrix,
    partition: &Partition,
    options: SolveOptions,
) -> Result<BlockSolution> {
    if beta.dim() != partition.dim() {
        return Err(Error::DimensionMismatch { expected: partition.dim(), got: beta.dim() });
    }
    let ng = partition.n_groups();
    let ids = partition.group_ids();
    let b = beta.matrix();
    let mut unitaries: Vec<Option<CMat>> = vec![None; ng];
    let mut beta_bar = CMat::zeros(beta.dim(), beta.dim());
    let mut log: Vec<ResolutionRecord> = Vec::new();

    let is_zero = |i: usize, j: usize| block(b, partition, i, j).iter().all(|z| *z == C64::new(0.0, 0.0));

    // zero blocks (upper triangle)
    for i in 0..ng {
        for j in i..ng {
            if is_zero(i, j) {
                log.push(ResolutionRecord {
                    block: (ids[i].clone(), ids[j].clone()),
                    case: CaseTag::Zero,
                });
            }
        }
    }

    // nonzero diagonal blocks: Takagi
    for g in 0..ng {
        if is_zero(g, g) {
            continue;
        }
        let bg = PairMatrix::from_matrix(block(b, partition, g, g))?;
        let t = takagi(&bg)?;
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            t.singulars.len(),
            t.singulars.iter().map(|&s| C64::new(s, 0.0)),
        ));
        write_block(&mut beta_bar, partition, g, g, &diag);
        unitaries[g] = Some(t.unitary.matrix().clone());
        log.push(ResolutionRecord { block: (ids[g].clone(), ids[g].clone()), case: CaseTag::DiagTakagi });
    }

    // nonzero off-diagonal blocks, most-constrained first
    let mut pending: Vec<(usize, usize)> = (0..ng)
        .flat_map(|i| ((i + 1)..ng).map(move |j| (i, j)))
        .filter(|&(i, j)| !is_zero(i, j))
        .collect();
    while !pending.is_empty() {
        let mut best = 0;
        let mut best_fixed = fixed_count(&unitaries, pending[0]);
        for (idx, &p) in pending.iter().enumerate().skip(1) {
            let f = fixed_count(&unitaries, p);
            if f > best_fixed {
                best = idx;
                best_fixed = f;
            }
        }
        let (i, j) = pending.remove(best);
        let bij = block(b, partition, i, j);
        let case = resolve_offdiag(&bij, i, j, &mut unitaries, options)?;
        let bb = case.source_block;
        write_block(&mut beta_bar, partition, i, j, &bb);
        write_block(&mut beta_bar, partition, j, i, &bb.transpose());
        log.push(ResolutionRecord { block: (ids[i].clone(), ids[j].clone()), case: case.tag });
    }

    // unconstrained groups default to the identity
    for g in 0..ng {
        if unitaries[g].is_none() {
            let n = partition.members(g).len();
            unitaries[g] = Some(CMat::identity(n, n));
            log.push(ResolutionRecord {
                block: (ids[g].clone(), ids[g].clone()),
                case: CaseTag::FreeIdentity,
            });
        }
    }

    let block_unitaries: Vec<UnitaryMatrix> = unitaries
        .into_iter()
        .map(|u| UnitaryMatrix::from_matrix(u.expect("all groups resolved")))
        .collect::<Result<_>>()?;
    let mut sol = BlockSolution {
        partition: partition.clone(),
        beta_bar: PairMatrix::from_matrix(beta_bar)?,
        block_unitaries,
        residual: 0.0,
        resolution_log: log,
    };
    let rec = sol.reconstruct();
    sol.residual = residual_between(b, rec.matrix());
    if sol.residual > SOLVE_RESIDUAL_TOL {
        let mut block_residuals = Vec::new();
        let beta_norm = b.norm().max(f64::MIN_POSITIVE);
        for i in 0..ng {
            for j in i..ng {
                let d = block(b, partition, i, j) - block(rec.matrix(), partition, i, j);
                let r = d.norm() / beta_norm;
                if r > SOLVE_RESIDUAL_TOL {
                    block_residuals.push(((ids[i].clone(), ids[j].clone()), r));
                }
            }
        }
        block_residuals
            .sort_by(|a, b| b.1.partial_cmp(&a.1).expect("residuals are finite"));
        return Err(Error::OverConstrained(OverConstraintReport {
            residual: sol.residual,
            block_residuals,
        }));
    }
    Ok(sol)
}

fn fixed_count(unitaries: &[Option<CMat>], (i, j): (usize, usize)) -> u8 {
    unitaries[i].is_some() as u8 + unitaries[j].is_some() as u8
}

struct OffdiagResolution {
    source_block: CMat,
    tag: CaseTag,
}

fn resolve_offdiag(
    bij: &CMat,
    i: usize,
    j: usize,
    unitaries: &mut [Option<CMat>],
    options: SolveOptions,
) -> Result<OffdiagResolution> {
    let square = bij.nrows() == bij.ncols();
    let resolution = match (unitaries[i].clone(), unitaries[j].clone()) {
        (Some(ui), Some(uj)) => {
            let bb = ui.adjoint() * bij * uj.map(|z| z.conj());
            OffdiagResolution { source_block: bb, tag: CaseTag::OffdiagMult }
        }
        (Some(ui), None) => {
            let x = ui.adjoint() * bij;
            if square {
                // x = beta_bar U_jj^T with beta_bar the psd left factor
                let p = polar_left(&x)?;
                unitaries[j] = Some(p.unitary.transpose());
                OffdiagResolution { source_block: p.positive, tag: CaseTag::OffdiagPolar }
            } else {
                // rectangular block: free unitary defaults to the identity
                unitaries[j] = Some(CMat::identity(bij.ncols(), bij.ncols()));
                OffdiagResolution { source_block: x, tag: CaseTag::OffdiagMult }
            }
        }
        (None, Some(uj)) => {
            let y = bij * uj.map(|z| z.conj());
            if square {
                // y = U_ii beta_bar with beta_bar the psd right factor
                let p = polar_right(&y)?;
                unitaries[i] = Some(p.unitary);
                OffdiagResolution { source_block: p.positive, tag: CaseTag::OffdiagPolar }
            } else {
                unitaries[i] = Some(CMat::identity(bij.nrows(), bij.nrows()));
                OffdiagResolution { source_block: y, tag: CaseTag::OffdiagMult }
            }
        }
        (None, None) => {
            if is_diagonal(bij) {
                // already diagonal: take the identity gauge on both groups
                unitaries[i] = Some(CMat::identity(bij.nrows(), bij.nrows()));
                unitaries[j] = Some(CMat::identity(bij.ncols(), bij.ncols()));
                OffdiagResolution { source_block: bij.clone(), tag: CaseTag::OffdiagSvd }
            } else if square {
                let f = svd(bij)?;
                let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                    f.singulars.len(),
                    f.singulars.iter().map(|&s| C64::new(s, 0.0)),
                ));
                unitaries[i] = Some(f.u);
                unitaries[j] = Some(f.v.map(|z| z.conj()));
                OffdiagResolution { source_block: diag, tag: CaseTag::OffdiagSvd }
            } else {
                unitaries[i] = Some(CMat::identity(bij.nrows(), bij.nrows()));
                unitaries[j] = Some(CMat::identity(bij.ncols(), bij.ncols()));
                OffdiagResolution { source_block: bij.clone(), tag: CaseTag::OffdiagMult }
            }
        }
    };
    if options.diagonal_sources && !is_diagonal(&resolution.source_block) {
        // keep only the diagonal; the final residual check reports the miss
        let projected = CMat::from_fn(
            resolution.source_block.nrows(),
            resolution.source_block.ncols(),
            |r, c| {
                if r == c {
                    resolution.source_block[(r, c)]
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        );
        return Ok(OffdiagResolution { source_block: projected, tag: resolution.tag });
    }
    Ok(resolution)
}

fn is_diagonal(m: &CMat) -> bool {
    let max = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if max == 0.0 {
        return true;
    }
    let tol = 1e-12 * max;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r != c && m[(r, c)].norm() > tol {
                return false;
            }
        }
    }
    true
}

/// `U beta_bar U^T` for a solution; the reconstruction used by every
/// residual check.
pub fn reconstruct(sol: &BlockSolution) -> PairMatrix {
    sol.reconstruct()
}
