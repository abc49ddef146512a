//! Mode indexing and logical encodings.
//!
//! Every photonic mode carries two labels: an *external* label identifying
//! which qudit a detected photon belongs to, and an *internal* label encoding
//! the qudit's logical value. [`ModeSpace`] fixes the flattening of label
//! pairs onto contiguous indices; [`Encoding`] maps labels onto qudit
//! positions and logical values.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// The ordered set of `M = |externals| * |internals|` modes.
///
/// Flat index convention: mode `(external e, internal i)` sits at
/// `index(e) * n_internals + index(i)`. Block structure is always expressed
/// through a [`Partition`](crate::partition::Partition) on top of this fixed
/// order, never through index arithmetic elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpace {
    externals: Vec<String>,
    internals: Vec<String>,
}

impl ModeSpace {
    pub fn new<S: Into<String>>(
        externals: impl IntoIterator<Item = S>,
        internals: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let externals: Vec<String> = externals.into_iter().map(Into::into).collect();
        let internals: Vec<String> = internals.into_iter().map(Into::into).collect();
        check_unique(&externals)?;
        check_unique(&internals)?;
        if externals.is_empty() || internals.is_empty() {
            return Err(Error::InvalidInput(
                "mode space needs at least one external and one internal label".into(),
            ));
        }
        Ok(Self { externals, internals })
    }

    pub fn dim(&self) -> usize {
        self.externals.len() * self.internals.len()
    }

    pub fn n_externals(&self) -> usize {
        self.externals.len()
    }

    pub fn n_internals(&self) -> usize {
        self.internals.len()
    }

    pub fn externals(&self) -> &[String] {
        &self.externals
    }

    pub fn internals(&self) -> &[String] {
        &self.internals
    }

    /// Flat index of the mode `(external, internal)` given by label.
    pub fn mode(&self, external: &str, internal: &str) -> Result<usize> {
        let e = self
            .externals
            .iter()
            .position(|x| x == external)
            .ok_or_else(|| Error::UnknownLabel { kind: "external", label: external.into() })?;
        let i = self
            .internals
            .iter()
            .position(|x| x == internal)
            .ok_or_else(|| Error::UnknownLabel { kind: "internal", label: internal.into() })?;
        Ok(self.mode_at(e, i))
    }

    /// Flat index from label positions.
    pub fn mode_at(&self, external_idx: usize, internal_idx: usize) -> usize {
        external_idx * self.internals.len() + internal_idx
    }

    /// Index of the external label of mode `m`.
    pub fn external_of(&self, m: usize) -> usize {
        m / self.internals.len()
    }

    /// Index of the internal label of mode `m`.
    pub fn internal_of(&self, m: usize) -> usize {
        m % self.internals.len()
    }

    /// `(external, internal)` labels of mode `m`.
    pub fn labels_of(&self, m: usize) -> (&str, &str) {
        (&self.externals[self.external_of(m)], &self.internals[self.internal_of(m)])
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = BTreeMap::new();
    for l in labels {
        if seen.insert(l.clone(), ()).is_some() {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Map from mode labels to qudit positions and logical values.
///
/// `qudit_of` is a bijection from external labels onto `0..n_qudits`;
/// `logical_of` injectively maps internal labels to logical values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    qudit_of: BTreeMap<String, usize>,
    logical_of: BTreeMap<String, u8>,
}

impl Encoding {
    pub fn new(
        qudit_of: impl IntoIterator<Item = (String, usize)>,
        logical_of: impl IntoIterator<Item = (String, u8)>,
    ) -> Result<Self> {
        let qudit_of: BTreeMap<String, usize> = qudit_of.into_iter().collect();
        let logical_of: BTreeMap<String, u8> = logical_of.into_iter().collect();

        let n = qudit_of.len();
        let mut seen = vec![false; n];
        for (label, &q) in &qudit_of {
            if q >= n || seen[q] {
                return Err(Error::InvalidInput(format!(
                    "qudit_of is not a bijection onto 0..{n} (label `{label}` -> {q})"
                )));
            }
            seen[q] = true;
        }

        let mut values: Vec<u8> = logical_of.values().copied().collect();
        values.sort_unstable();
        values.dedup();
        if values.len() != logical_of.len() {
            return Err(Error::InvalidInput("logical_of is not injective".into()));
        }
        Ok(Self { qudit_of, logical_of })
    }

    pub fn n_qudits(&self) -> usize {
        self.qudit_of.len()
    }

    /// Qudit dimension: one past the largest logical value in use.
    pub fn dimension(&self) -> u8 {
        self.logical_of.values().copied().max().map_or(0, |v| v + 1)
    }

    pub fn qudit(&self, external: &str) -> Result<usize> {
        self.qudit_of
            .get(external)
            .copied()
            .ok_or_else(|| Error::EncodingGap { kind: "external", label: external.into() })
    }

    pub fn logical(&self, internal: &str) -> Result<u8> {
        self.logical_of
            .get(internal)
            .copied()
            .ok_or_else(|| Error::EncodingGap { kind: "internal", label: internal.into() })
    }

    pub fn qudit_map(&self) -> &BTreeMap<String, usize> {
        &self.qudit_of
    }

    pub fn logical_map(&self) -> &BTreeMap<String, u8> {
        &self.logical_of
    }
}
