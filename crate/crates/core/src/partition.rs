//! Partitions of the mode space into blocks.
//!
//! A [`Partition`] assigns every mode to exactly one named group. Blocks of a
//! matrix under a partition are submatrices in within-group order, which is
//! inherited from the [`ModeSpace`] flattening.

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::space::ModeSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    dim: usize,
    groups: Vec<String>,
    members: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl Partition {
    /// Build from `(group id, member modes)` pairs. Every mode in `0..dim`
    /// must occur exactly once, groups must be non-empty, and member order
    /// within a group follows the mode-space flat order.
    pub fn new(dim: usize, groups: impl IntoIterator<Item = (String, Vec<usize>)>) -> Result<Self> {
        let mut ids = Vec::new();
        let mut members = Vec::new();
        let mut group_of = vec![usize::MAX; dim];
        for (id, mut modes) in groups {
            if ids.contains(&id) {
                return Err(Error::DuplicateLabel(id));
            }
            if modes.is_empty() {
                return Err(Error::EmptyGroup(id));
            }
            modes.sort_unstable();
            for &m in &modes {
                if m >= dim || group_of[m] != usize::MAX {
                    return Err(Error::UncoveredMode(m.min(dim)));
                }
                group_of[m] = ids.len();
            }
            ids.push(id);
            members.push(modes);
        }
        if let Some(m) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::UncoveredMode(m));
        }
        Ok(Self { dim, groups: ids, members, group_of })
    }

    /// One group holding every mode; the unconstrained case.
    pub fn single_group(dim: usize) -> Self {
        Self::new(dim, [("all".to_string(), (0..dim).collect())]).expect("trivially valid")
    }

    /// One group per internal label: the adjacency-matrix block grid, where
    /// the outer grid runs over internal labels and inner indices are
    /// external.
    pub fn by_internal_label(space: &ModeSpace) -> Self {
        let groups = space
            .internals()
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let modes = (0..space.n_externals()).map(|e| space.mode_at(e, i)).collect();
                (label.clone(), modes)
            })
            .collect::<Vec<_>>();
        Self::new(space.dim(), groups).expect("internal-label partition is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_ids(&self) -> &[String] {
        &self.groups
    }

    pub fn group_index(&self, id: &str) -> Result<usize> {
        self.groups
            .iter()
            .position(|g| g == id)
            .ok_or_else(|| Error::UnknownGroup(id.to_string()))
    }

    pub fn members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    pub fn group_of(&self, mode: usize) -> usize {
        self.group_of[mode]
    }
}

/// Extract the `(i, j)` block of `m` under `partition`, in within-group order.
pub fn block(m: &CMat, partition: &Partition, i: usize, j: usize) -> CMat {
    let rows = partition.members(i);
    let cols = partition.members(j);
    CMat::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// Write `b` back into the `(i, j)` block of `m`; inverse of [`block`].
pub fn write_block(m: &mut CMat, partition: &Partition, i: usize, j: usize, b: &CMat) {
    let rows = partition.members(i);
    let cols = partition.members(j);
    assert_eq!((b.nrows(), b.ncols()), (rows.len(), cols.len()));
    for (r, &row) in rows.iter().enumerate() {
        for (c, &col) in cols.iter().enumerate() {
            m[(row, col)] = b[(r, c)];
        }
    }
}

/// Look up a block by group id on a [`PairMatrix`](crate::matrix::PairMatrix)
/// or any raw matrix.
pub fn block_by_id(m: &CMat, partition: &Partition, i: &str, j: &str) -> Result<CMat> {
    Ok(block(m, partition, partition.group_index(i)?, partition.group_index(j)?))
}
