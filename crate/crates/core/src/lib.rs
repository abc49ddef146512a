//! Synthesis and verification of photon-pair-source configurations for
//! postselected multipartite states.
//!
//! A target state is specified as a colored weighted graph: vertices label
//! the qudits (external modes), edge colors encode logical values (internal
//! modes), and edge weights are pair-creation amplitudes. The crate turns
//! such a graph into a source configuration `beta_bar` plus a linear circuit
//! `U` solving `beta = U beta_bar U^T` (optionally with `U` block-diagonal
//! over a partition of the modes), and independently verifies the design by
//! brute-force expansion of the squeezed state and simulated coincidence
//! postselection.
//!
//! Module map:
//! - [`space`], [`matrix`], [`partition`]: mode indexing, complex symmetric
//!   pair matrices, unitaries, and block partitions.
//! - [`graph`]: colored graphs, perfect matchings, and the matching-derived
//!   postselected state.
//! - [`squeezed`]: the independent oracle, expanding the squeezed
//!   exponential and postselecting on coincidences.
//! - [`decomp`]: Takagi/SVD/polar factorization and the two solvers for
//!   `beta = U beta_bar U^T`.
//! - [`synth`]: the end-to-end pipeline, built-in reference fixtures, and
//!   design diagnostics.

pub mod decomp;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod partition;
pub mod space;
pub mod squeezed;
pub mod synth;

pub use error::{Error, OverConstraintReport, Result};
pub use graph::{ColoredGraph, DVState, Edge, Matching};
pub use matrix::{CMat, PairMatrix, UnitaryMatrix};
pub use partition::Partition;
pub use space::{Encoding, ModeSpace};
pub use synth::{DeviceDesign, Diagnostics, Fixture, SourceEntry, SynthOptions};

pub use num_complex::Complex64;
