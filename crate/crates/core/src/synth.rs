//! End-to-end synthesis: graph in, source configuration and block circuit
//! out, with the squeezed-state simulator closing the verification loop.
//!
//! The built-in fixtures pin the reference designs down to their vertex,
//! color, and partition layouts, so assembled matrices can be compared
//! block-for-block against the reference solutions.

use num_complex::Complex64 as C64;

use crate::decomp::{
    solve_block_constrained_with, solve_global, BlockSolution, SolveOptions,
};
use crate::error::{Error, Result};
use crate::graph::{
    graph_to_adjacency, state_from_matchings, ColoredGraph, DVState, Edge,
};
use crate::matrix::PairMatrix;
use crate::partition::Partition;
use crate::space::{Encoding, ModeSpace};
use crate::squeezed::{
    fidelity, postselected_dv_state, postselected_dv_state_with_contamination,
};

/// A reference design: graph, encoding, constraint partition, and target
/// state (which equals the matching-derived state of the graph).
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub graph: ColoredGraph,
    pub encoding: Encoding,
    pub partition: Partition,
    pub target: DVState,
}

impl Fixture {
    pub fn space(&self) -> ModeSpace {
        self.graph.mode_space()
    }
}

/// Options for [`synthesize`].
#[derive(Debug, Clone, Copy)]
pub struct SynthOptions {
    /// Rescale the adjacency so `sum |beta|^2` equals this value before
    /// solving; `None` keeps the graph weights as-is. The default 0.01 sits
    /// comfortably in the low-gain regime.
    pub target_gain: Option<f64>,
    /// Require diagonal source blocks (each pair source couples one mode
    /// pair); see [`SolveOptions`].
    pub diagonal_sources: bool,
    /// Also estimate the next-order contamination ratio.
    pub contamination: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { target_gain: Some(0.01), diagonal_sources: false, contamination: false }
    }
}

/// One photon-pair source: a nonzero upper-triangle entry of `beta_bar`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceEntry {
    pub modes: (usize, usize),
    pub amplitude: C64,
}

/// Verification measurements attached to a design.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `|U^H U - 1|_F / sqrt(M)` of the assembled circuit.
    pub unitarity_residual: f64,
    /// `|beta - U beta_bar U^T|_F / |beta|_F` against the target pair
    /// matrix.
    pub reconstruction_residual: f64,
    /// `sum |beta|^2` of the reconstructed pair matrix.
    pub gain: f64,
    /// Fidelity of the simulated postselected state against the target
    /// state; 0 when postselection leaves nothing.
    pub fidelity: f64,
    /// Postselected weight at order `N/2 + 1` over order `N/2`, when
    /// requested.
    pub contamination: Option<f64>,
}

/// A synthesized device: pair-source list plus block circuit plus
/// diagnostics.
#[derive(Debug, Clone)]
pub struct DeviceDesign {
    pub space: ModeSpace,
    pub encoding: Encoding,
    pub solution: BlockSolution,
    pub source_list: Vec<SourceEntry>,
    pub diagnostics: Diagnostics,
    /// The pair matrix the solve targeted (graph adjacency after gain
    /// rescale).
    pub target_beta: PairMatrix,
}

impl DeviceDesign {
    pub fn partition(&self) -> &Partition {
        self.solution.partition()
    }
}

/// Full pipeline: adjacency from the graph, optional gain rescale,
/// constrained or global solve, and simulator-backed diagnostics.
///
/// Graphs without a perfect matching are rejected up front; they have no
/// postselected target to verify against.
///
/// ```
/// use pairsynth_core::synth::{builtin_ghz_qutrit, synthesize, SynthOptions};
///
/// let fixture = builtin_ghz_qutrit();
/// let design = synthesize(
///     &fixture.graph,
///     &fixture.encoding,
///     Some(&fixture.partition),
///     &SynthOptions::default(),
/// )?;
/// assert!(design.diagnostics.fidelity > 1.0 - 1e-9);
/// assert_eq!(design.partition().n_groups(), 6);
/// # Ok::<(), pairsynth_core::Error>(())
/// ```
pub fn synthesize(
    graph: &ColoredGraph,
    encoding: &Encoding,
    partition: Option<&Partition>,
    options: &SynthOptions,
) -> Result<DeviceDesign> {
    let space = graph.mode_space();
    let target_state = state_from_matchings(graph, encoding)?;
    let adjacency = graph_to_adjacency(graph, &space)?;
    let beta = match options.target_gain {
        Some(gain) => {
            if gain <= 0.0 {
                return Err(Error::InvalidInput(format!("target gain must be positive, got {gain}")));
            }
            let norm = adjacency.squared_norm();
            adjacency.scaled((gain / norm).sqrt())
        }
        None => adjacency,
    };
    let solution = match partition {
        Some(p) => solve_block_constrained_with(
            &beta,
            p,
            SolveOptions { diagonal_sources: options.diagonal_sources },
        )?,
        None => solve_global(&beta)?,
    };
    let source_list = solution
        .sources()
        .into_iter()
        .map(|(a, b, amplitude)| SourceEntry { modes: (a, b), amplitude })
        .collect();
    let mut design = DeviceDesign {
        space,
        encoding: encoding.clone(),
        solution,
        source_list,
        diagnostics: Diagnostics {
            unitarity_residual: 0.0,
            reconstruction_residual: 0.0,
            gain: 0.0,
            fidelity: 0.0,
            contamination: None,
        },
        target_beta: beta,
    };
    design.diagnostics = verify_design(&design, &target_state, options.contamination);
    Ok(design)
}

/// Re-derive every diagnostic from scratch: reconstruct the pair matrix from
/// the solution, rerun the squeezed-state simulation, and compare against
/// `target`. Failures surface as magnitudes (fidelity 0, large residuals),
/// not errors.
pub fn verify_design(design: &DeviceDesign, target: &DVState, contamination: bool) -> Diagnostics {
    let u = design.solution.assembled_unitary();
    let m = u.dim().max(1) as f64;
    let unitarity_residual = u.residual() / m.sqrt();

    let reconstructed = design.solution.reconstruct();
    let diff = (reconstructed.matrix() - design.target_beta.matrix()).norm();
    let norm = design.target_beta.matrix().norm();
    let reconstruction_residual = if norm > 0.0 { diff / norm } else { diff };
    let gain = reconstructed.squared_norm();

    let (fid, contamination) = if contamination {
        match postselected_dv_state_with_contamination(&reconstructed, &design.space, &design.encoding)
        {
            Ok((state, ratio)) => (fidelity(&state, target).unwrap_or(0.0), Some(ratio)),
            Err(_) => (0.0, None),
        }
    } else {
        match postselected_dv_state(&reconstructed, &design.space, &design.encoding) {
            Ok(state) => (fidelity(&state, target).unwrap_or(0.0), None),
            Err(_) => (0.0, None),
        }
    };
    Diagnostics {
        unitarity_residual,
        reconstruction_residual,
        gain,
        fidelity: fid,
        contamination,
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Partition grouping modes by `(frequency range, bin)`, ranges first in the
/// given order, bins within a range in color order; each group holds the two
/// path modes.
fn frequency_partition(
    space: &ModeSpace,
    ranges: &[(&str, &[&str])],
    bins: &[&str],
) -> Partition {
    let mut groups = Vec::new();
    for (range, externals) in ranges {
        for bin in bins {
            let id = format!("{range}{bin}");
            let modes = externals
                .iter()
                .map(|e| space.mode(e, bin).expect("fixture labels are valid"))
                .collect();
            groups.push((id, modes));
        }
    }
    Partition::new(space.dim(), groups).expect("fixture partition is valid")
}

fn ghz_encoding(colors: &[&str]) -> Encoding {
    Encoding::new(
        [
            ("aS".to_string(), 0),
            ("aI".to_string(), 1),
            ("bS".to_string(), 2),
            ("bI".to_string(), 3),
        ],
        colors
            .iter()
            .enumerate()
            .map(|(v, c)| (c.to_string(), v as u8))
            .collect::<Vec<_>>(),
    )
    .expect("fixture encoding is valid")
}

/// Four-photon qutrit GHZ fixture: four vertices, three colors, six unit
/// weights; three perfect matchings giving
/// `(|0000> + |1111> + |2222>) / sqrt(3)`. Vertices 1..4 map to the
/// path-and-range labels aS, aI, bS, bI; the partition groups the two path
/// modes of every `(range, bin)` pair.
pub fn builtin_ghz_qutrit() -> Fixture {
    let graph = ColoredGraph::new(
        ["aS", "aI", "bS", "bI"],
        ["0", "1", "2"],
        [
            Edge::new("aS", "0", "aI", "0", c(1.0)),
            Edge::new("bS", "0", "bI", "0", c(1.0)),
            Edge::new("aS", "1", "bI", "1", c(1.0)),
            Edge::new("aI", "1", "bS", "1", c(1.0)),
            Edge::new("aS", "2", "bS", "2", c(1.0)),
            Edge::new("aI", "2", "bI", "2", c(1.0)),
        ],
    )
    .expect("fixture graph is valid");
    let encoding = ghz_encoding(&["0", "1", "2"]);
    let space = graph.mode_space();
    let partition = frequency_partition(
        &space,
        &[("S", &["aS", "bS"]), ("I", &["aI", "bI"])],
        &["0", "1", "2"],
    );
    let amp = c(1.0);
    let target = DVState::new(
        3,
        4,
        [
            (vec![0, 0, 0, 0], amp),
            (vec![1, 1, 1, 1], amp),
            (vec![2, 2, 2, 2], amp),
        ],
    )
    .expect("GHZ target is valid");
    Fixture { name: "ghz-qutrit".into(), graph, encoding, partition, target }
}

/// Qubit GHZ fixture: the qutrit graph with the third-color edges removed,
/// leaving two perfect matchings and `(|0000> + |1111>) / sqrt(2)`.
pub fn builtin_ghz_qubit() -> Fixture {
    let graph = ColoredGraph::new(
        ["aS", "aI", "bS", "bI"],
        ["0", "1"],
        [
            Edge::new("aS", "0", "aI", "0", c(1.0)),
            Edge::new("bS", "0", "bI", "0", c(1.0)),
            Edge::new("aS", "1", "bI", "1", c(1.0)),
            Edge::new("aI", "1", "bS", "1", c(1.0)),
        ],
    )
    .expect("fixture graph is valid");
    let encoding = ghz_encoding(&["0", "1"]);
    let space = graph.mode_space();
    let partition = frequency_partition(
        &space,
        &[("S", &["aS", "bS"]), ("I", &["aI", "bI"])],
        &["0", "1"],
    );
    let target = DVState::new(2, 4, [(vec![0, 0, 0, 0], c(1.0)), (vec![1, 1, 1, 1], c(1.0))])
        .expect("GHZ target is valid");
    Fixture { name: "ghz-qubit".into(), graph, encoding, partition, target }
}

/// Four-qubit `L` state fixture:
/// `alpha_1 |0001> + alpha_2 |0110> + alpha_3 |1000>` with
/// `sum |alpha|^2 = 1`. Vertices 1..4 map to aS, bI, bS, aI; two edge
/// weights are gauge-fixed to the common magnitude scale
/// `sqrt(mean |alpha|) / 2` and the rest solve the `alpha = 4 w w'` product
/// relations, so the unnormalized matching amplitudes reproduce the alphas
/// exactly and equal amplitudes give an all-equal-weight graph. Zero alphas
/// drop the edges that only feed their matching.
pub fn builtin_l_a4(alphas: [C64; 3]) -> Result<Fixture> {
    let norm: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "alphas must satisfy sum |alpha|^2 = 1, got {norm}"
        )));
    }
    let [a1, a2, a3] = alphas;
    let zero = C64::new(0.0, 0.0);
    let mean: f64 = alphas.iter().map(|a| a.norm()).sum::<f64>() / 3.0;
    let t = mean.sqrt() / 2.0;
    // (edge, alphas of the matchings it appears in)
    let candidates: [(Edge, [C64; 2]); 5] = [
        (Edge::new("bI", "0", "bS", "0", c(t)), [a1, a3]),
        (Edge::new("aS", "0", "bI", "1", a2 / (4.0 * t)), [a2, zero]),
        (Edge::new("aS", "0", "aI", "1", a1 / (4.0 * t)), [a1, zero]),
        (Edge::new("aI", "0", "aS", "1", a3 / (4.0 * t)), [a3, zero]),
        (Edge::new("aI", "0", "bS", "1", c(t)), [a2, zero]),
    ];
    let edges: Vec<Edge> = candidates
        .into_iter()
        .filter(|(_, users)| users.iter().any(|a| *a != zero))
        .map(|(e, _)| e)
        .collect();
    let graph = ColoredGraph::new(vec!["aS", "aI", "bS", "bI"], vec!["0", "1"], edges)?;
    let encoding = Encoding::new(
        [
            ("aS".to_string(), 0),
            ("bI".to_string(), 1),
            ("bS".to_string(), 2),
            ("aI".to_string(), 3),
        ],
        [("0".to_string(), 0), ("1".to_string(), 1)],
    )
    .expect("fixture encoding is valid");
    let space = graph.mode_space();
    let partition = frequency_partition(
        &space,
        &[("S", &["aS", "bS"]), ("I", &["aI", "bI"])],
        &["0", "1"],
    );
    let target = DVState::new(
        2,
        4,
        [
            (vec![0, 0, 0, 1], a1),
            (vec![0, 1, 1, 0], a2),
            (vec![1, 0, 0, 0], a3),
        ]
        .into_iter()
        .filter(|(_, a)| *a != zero),
    )?;
    Ok(Fixture { name: "l-a4".into(), graph, encoding, partition, target })
}
