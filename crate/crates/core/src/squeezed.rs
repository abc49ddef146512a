//! Brute-force expansion of the weakly squeezed state and coincidence
//! postselection.
//!
//! This is the verification side of the crate: expand
//! `exp(sum beta_mm' a+_m a+_m') |vac>` in powers of the pair matrix, convert
//! to Fock amplitudes, keep terms with at least one photon in every external
//! group, and read off the discrete-variable state. Work happens at the
//! operator-monomial level so coefficients can be compared term-for-term
//! against reference expansions; Fock normalization enters only at the
//! boundary.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::graph::DVState;
use crate::matrix::PairMatrix;
use crate::space::{Encoding, ModeSpace};

/// Squared-norm level above which the low-gain reading of the pair matrix
/// becomes questionable. Advisory only; the expansion itself is exact at any
/// gain.
pub const LOW_GAIN_WARN: f64 = 0.1;

/// One monomial of the expansion: a multiset of unordered mode pairs with a
/// complex coefficient. Pair order `k` is the multiset size.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    /// Sorted pairs, each `(m, m')` with `m <= m'`; repeats mark
    /// multiplicity.
    pub pairs: Vec<(usize, usize)>,
    pub coefficient: C64,
}

impl OperatorTerm {
    pub fn order(&self) -> usize {
        self.pairs.len()
    }
}

/// One Fock configuration with its amplitude, `sqrt(n!)` factors included.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTerm {
    /// Occupied modes only, ascending.
    pub occupations: Vec<(usize, u32)>,
    pub amplitude: C64,
}

impl FockTerm {
    pub fn total_photons(&self) -> u32 {
        self.occupations.iter().map(|&(_, n)| n).sum()
    }

    pub fn occupation(&self, mode: usize) -> u32 {
        self.occupations
            .iter()
            .find(|&&(m, _)| m == mode)
            .map_or(0, |&(_, n)| n)
    }
}

/// Exact truncated expansion of the squeezed exponential through `max_pairs`
/// pair insertions.
///
/// For a multiset of unordered pairs with multiplicities `mu`, the
/// coefficient is `prod_p W_p^mu_p / mu_p!` with `W_p = 2 beta_mm'` for
/// distinct modes and `beta_mm` on the diagonal. Only nonzero unordered
/// pairs are iterated, so sparse pair matrices stay cheap at order 3.
pub fn expand_squeezed_state(beta: &PairMatrix, max_pairs: usize) -> Vec<OperatorTerm> {
    let n = beta.dim();
    let mut pairs: Vec<((usize, usize), C64)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let z = beta.entry(i, j);
            if z != C64::new(0.0, 0.0) {
                let w = if i == j { z } else { z * 2.0 };
                pairs.push(((i, j), w));
            }
        }
    }

    let mut terms = Vec::new();
    let mut multiset: Vec<usize> = Vec::new();
    build_multisets(&pairs, max_pairs, 0, &mut multiset, &mut terms);
    terms
}

fn build_multisets(
    pairs: &[((usize, usize), C64)],
    remaining: usize,
    start: usize,
    multiset: &mut Vec<usize>,
    out: &mut Vec<OperatorTerm>,
) {
    // emit the current multiset at every order <= max_pairs
    let mut coefficient = C64::new(1.0, 0.0);
    let mut run = 0usize;
    for (pos, &idx) in multiset.iter().enumerate() {
        coefficient *= pairs[idx].1;
        run = if pos > 0 && multiset[pos - 1] == idx { run + 1 } else { 1 };
        coefficient /= run as f64;
    }
    out.push(OperatorTerm {
        pairs: multiset.iter().map(|&i| pairs[i].0).collect(),
        coefficient,
    });
    if remaining == 0 {
        return;
    }
    for idx in start..pairs.len() {
        multiset.push(idx);
        build_multisets(pairs, remaining - 1, idx, multiset, out);
        multiset.pop();
    }
}

/// Convert operator monomials to Fock amplitudes, merging configurations
/// that several monomials reach; merged-to-zero configurations are dropped.
pub fn to_fock(terms: &[OperatorTerm]) -> Vec<FockTerm> {
    let mut merged: BTreeMap<Vec<(usize, u32)>, C64> = BTreeMap::new();
    for t in terms {
        let mut occ: BTreeMap<usize, u32> = BTreeMap::new();
        for &(a, b) in &t.pairs {
            *occ.entry(a).or_insert(0) += 1;
            *occ.entry(b).or_insert(0) += 1;
        }
        let occupations: Vec<(usize, u32)> = occ.into_iter().collect();
        let fock_factor: f64 = occupations
            .iter()
            .map(|&(_, n)| factorial(n).sqrt())
            .product();
        *merged.entry(occupations).or_insert(C64::new(0.0, 0.0)) += t.coefficient * fock_factor;
    }
    merged
        .into_iter()
        .filter(|(_, a)| *a != C64::new(0.0, 0.0))
        .map(|(occupations, amplitude)| FockTerm { occupations, amplitude })
        .collect()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Keep terms with at least one photon in every external group: the
/// coincidence condition of one detector group per external label.
pub fn postselect_coincidence(terms: &[FockTerm], space: &ModeSpace) -> Vec<FockTerm> {
    terms
        .iter()
        .filter(|t| {
            let mut hit = vec![false; space.n_externals()];
            for &(m, n) in &t.occupations {
                if n > 0 {
                    hit[space.external_of(m)] = true;
                }
            }
            hit.iter().all(|&h| h)
        })
        .cloned()
        .collect()
}

/// Postselected DV state at the lowest contributing order `k = N_ext / 2`.
///
/// At that order every surviving term has exactly one photon per external
/// group and single occupancy per mode, so each maps to a ket through the
/// encoding; amplitudes accumulate coherently and the result is normalized.
pub fn postselected_dv_state(
    beta: &PairMatrix,
    space: &ModeSpace,
    enc: &Encoding,
) -> Result<DVState> {
    let (state, _) = postselected_state_inner(beta, space, enc, false)?;
    Ok(state)
}

/// Same as [`postselected_dv_state`] but also reports the contamination
/// ratio: postselected weight at order `k + 1` over postselected weight at
/// order `k`. Surviving-but-multiply-occupied weight at order `k` is zero by
/// counting (2k photons over 2k external groups, each occupied), so the
/// next order is the leading correction.
pub fn postselected_dv_state_with_contamination(
    beta: &PairMatrix,
    space: &ModeSpace,
    enc: &Encoding,
) -> Result<(DVState, f64)> {
    let (state, contamination) = postselected_state_inner(beta, space, enc, true)?;
    Ok((state, contamination.expect("requested")))
}

fn postselected_state_inner(
    beta: &PairMatrix,
    space: &ModeSpace,
    enc: &Encoding,
    next_order: bool,
) -> Result<(DVState, Option<f64>)> {
    if beta.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: beta.dim() });
    }
    let n_ext = space.n_externals();
    if !n_ext.is_multiple_of(2) {
        return Err(Error::OddExternalCount(n_ext));
    }
    let k = n_ext / 2;
    let order = if next_order { k + 1 } else { k };

    let terms = expand_squeezed_state(beta, order);
    let fock = to_fock(&terms);
    let kept = postselect_coincidence(&fock, space);

    let weight_at = |photons: u32| -> f64 {
        kept.iter()
            .filter(|t| t.total_photons() == photons)
            .map(|t| t.amplitude.norm_sqr())
            .sum()
    };

    let mut kets: Vec<(Vec<u8>, C64)> = Vec::new();
    for t in &kept {
        if t.total_photons() as usize != n_ext {
            continue;
        }
        if t.occupations.iter().any(|&(_, n)| n != 1) {
            continue;
        }
        let mut ket = vec![0u8; enc.n_qudits()];
        for &(m, _) in &t.occupations {
            let (ext, int) = space.labels_of(m);
            ket[enc.qudit(ext)?] = enc.logical(int)?;
        }
        kets.push((ket, t.amplitude));
    }
    if kets.is_empty() {
        return Err(Error::EmptyPostselection);
    }
    let state = DVState::new(enc.dimension(), enc.n_qudits(), kets)?;

    let contamination = if next_order {
        let base = weight_at(n_ext as u32);
        let next = weight_at(n_ext as u32 + 2);
        Some(if base > 0.0 { next / base } else { f64::INFINITY })
    } else {
        None
    };
    Ok((state, contamination))
}

/// `|<a|b>|^2` for two normalized states of matching shape.
pub fn fidelity(a: &DVState, b: &DVState) -> Result<f64> {
    if a.dimension() != b.dimension() || a.n_qudits() != b.n_qudits() {
        return Err(Error::StateShapeMismatch(
            a.n_qudits(),
            a.dimension() as usize,
            b.n_qudits(),
            b.dimension() as usize,
        ));
    }
    let overlap: C64 = a
        .amplitudes()
        .map(|(ket, amp)| amp.conj() * b.amplitude(ket))
        .sum();
    // rounding can push the square a hair past 1 for identical states
    Ok(overlap.norm_sqr().min(1.0))
}
