//! The four subcommands and their exit-code contract.
//!
//! Exit codes: 0 success, 1 input error, 2 empty result, 3 over-constrained
//! solve, 4 verification failure. Reports go to stdout, diagnostics and
//! warnings to stderr; identical inputs produce byte-identical stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Serialize;

use pairsynth_core::decomp::SOLVE_RESIDUAL_TOL;
use pairsynth_core::graph::{
    enumerate_perfect_matchings, graph_to_adjacency, state_from_matchings, ColoredGraph, DVState,
};
use pairsynth_core::space::Encoding;
use pairsynth_core::squeezed::{
    expand_squeezed_state, postselect_coincidence, to_fock, LOW_GAIN_WARN,
};
use pairsynth_core::synth::{synthesize, verify_design, DeviceDesign, SynthOptions};
use pairsynth_core::{Error, OverConstraintReport};

use crate::formats::{ComplexJson, DesignFile, EdgeJson, GraphFile, PartitionFile};

/// Verification thresholds for `verify`: fidelity within `1 - VERIFY_TOL`
/// and residuals at most `VERIFY_TOL`.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum CmdError {
    /// Exit 1: unreadable, unparsable, or inconsistent input.
    Input(String),
    /// Exit 2: structurally valid input with nothing to report.
    Empty(String),
    /// Exit 3: no exact solution under the requested constraints.
    OverConstrained(OverConstraintReport),
    /// Exit 4: design fails re-verification.
    Verification(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Input(_) => 1,
            CmdError::Empty(_) => 2,
            CmdError::OverConstrained(_) => 3,
            CmdError::Verification(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CmdError::Input(m) | CmdError::Empty(m) | CmdError::Verification(m) => m.clone(),
            CmdError::OverConstrained(r) => format!(
                "over-constrained: residual {} across {} block(s)",
                r.residual,
                r.block_residuals.len()
            ),
        }
    }
}

pub type CmdResult = Result<(), CmdError>;

fn input_err(e: impl std::fmt::Display) -> CmdError {
    CmdError::Input(e.to_string())
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CmdError::Input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<(ColoredGraph, Encoding), CmdError> {
    let file: GraphFile = load_json(path)?;
    file.to_graph().map_err(input_err)
}

fn fmt_complex(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn fmt_ket(ket: &[u8], dimension: u8) -> String {
    if dimension <= 10 {
        ket.iter().map(|v| v.to_string()).collect()
    } else {
        ket.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn print_state(state: &DVState, indent: &str) {
    for (ket, amp) in state.amplitudes() {
        println!("{indent}|{}>  {}", fmt_ket(ket, state.dimension()), fmt_complex(amp));
    }
}

#[derive(Serialize)]
struct AmplitudeJson {
    ket: Vec<u8>,
    amplitude: ComplexJson,
}

#[derive(Serialize)]
struct StateJson {
    dimension: u8,
    n_qudits: usize,
    amplitudes: Vec<AmplitudeJson>,
}

impl StateJson {
    fn from_state(s: &DVState) -> Self {
        Self {
            dimension: s.dimension(),
            n_qudits: s.n_qudits(),
            amplitudes: s
                .amplitudes()
                .map(|(ket, amp)| AmplitudeJson { ket: ket.to_vec(), amplitude: amp.into() })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct MatchingsReport {
    matchings: Vec<Vec<EdgeJson>>,
    state: StateJson,
}

/// `matchings`: list perfect matchings and the induced postselected state.
pub fn cmd_matchings(graph_path: &Path) -> CmdResult {
    let (graph, encoding) = load_graph(graph_path)?;
    let matchings = enumerate_perfect_matchings(&graph);
    if matchings.is_empty() {
        println!("no perfect matchings: the graph induces no postselected state");
        return Err(CmdError::Empty("graph has no perfect matching".into()));
    }
    let state = state_from_matchings(&graph, &encoding).map_err(input_err)?;

    println!("perfect matchings: {}", matchings.len());
    for (i, m) in matchings.iter().enumerate() {
        let desc: Vec<String> = m
            .edges(&graph)
            .map(|e| format!("({},{})-({},{})", e.u, e.color_u, e.v, e.color_v))
            .collect();
        println!("  {}: {}", i + 1, desc.join("  "));
    }
    println!("postselected state ({} terms):", state.n_terms());
    print_state(&state, "  ");

    let report = MatchingsReport {
        matchings: matchings
            .iter()
            .map(|m| {
                m.edges(&graph)
                    .map(|e| EdgeJson {
                        u: e.u.clone(),
                        color_u: e.color_u.clone(),
                        v: e.v.clone(),
                        color_v: e.color_v.clone(),
                        weight: e.weight.into(),
                    })
                    .collect()
            })
            .collect(),
        state: StateJson::from_state(&state),
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

/// `simulate`: expand the squeezed state, postselect, report the DV state.
pub fn cmd_simulate(graph_path: &Path, order: Option<usize>, contamination: bool) -> CmdResult {
    let (graph, encoding) = load_graph(graph_path)?;
    let space = graph.mode_space();
    let beta = graph_to_adjacency(&graph, &space).map_err(input_err)?;
    let n_ext = space.n_externals();
    if n_ext % 2 != 0 {
        return Err(input_err(Error::OddExternalCount(n_ext)));
    }
    let lowest = n_ext / 2;
    let order = order.unwrap_or(lowest);

    let gain = beta.squared_norm();
    if gain > LOW_GAIN_WARN {
        eprintln!(
            "warning: |beta|^2 = {gain} exceeds {LOW_GAIN_WARN}; the low-gain truncation is unreliable"
        );
    }
    println!(
        "modes: {} ({} external x {} internal)",
        space.dim(),
        n_ext,
        space.n_internals()
    );
    println!("|beta|^2 = {gain}");
    println!("expansion order: {order}");

    let expand_to = if contamination { order.max(lowest + 1) } else { order };
    let fock = to_fock(&expand_squeezed_state(&beta, expand_to));
    let kept = postselect_coincidence(&fock, &space);
    let weight = |k: usize| -> (f64, usize) {
        let terms: Vec<_> = kept.iter().filter(|t| t.total_photons() as usize == 2 * k).collect();
        (terms.iter().map(|t| t.amplitude.norm_sqr()).sum(), terms.len())
    };
    for k in lowest..=order {
        let (w, n) = weight(k);
        println!("postselected weight at order {k}: {w:e} ({n} terms)");
    }
    if order < lowest || weight(lowest).1 == 0 {
        return Err(CmdError::Empty(format!(
            "nothing survives coincidence postselection at order {order} (lowest contributing order is {lowest})"
        )));
    }

    if contamination {
        let (state, ratio) =
            pairsynth_core::squeezed::postselected_dv_state_with_contamination(
                &beta, &space, &encoding,
            )
            .map_err(|e| CmdError::Empty(e.to_string()))?;
        println!("postselected state ({} terms):", state.n_terms());
        print_state(&state, "  ");
        println!("contamination ratio (order {} / order {}): {ratio}", lowest + 1, lowest);
    } else {
        let state = pairsynth_core::squeezed::postselected_dv_state(&beta, &space, &encoding)
            .map_err(|e| CmdError::Empty(e.to_string()))?;
        println!("postselected state ({} terms):", state.n_terms());
        print_state(&state, "  ");
    }
    Ok(())
}

fn print_diagnostics(design: &DeviceDesign) {
    let d = &design.diagnostics;
    println!("diagnostics:");
    println!("  unitarity residual      = {:e}", d.unitarity_residual);
    println!("  reconstruction residual = {:e}", d.reconstruction_residual);
    println!("  |beta|^2                = {}", d.gain);
    println!("  fidelity vs target      = {}", d.fidelity);
    if let Some(c) = d.contamination {
        println!("  contamination ratio     = {c}");
    }
}

/// `synth`: solve for sources and a block circuit, write the design file.
#[allow(clippy::too_many_arguments)]
pub fn cmd_synth(
    graph_path: &Path,
    partition_path: Option<&Path>,
    unconstrained: bool,
    gain: f64,
    diag_sources: bool,
    contamination: bool,
    output: &Path,
) -> CmdResult {
    if partition_path.is_none() && !unconstrained {
        return Err(CmdError::Input(
            "pass --partition <file> or --unconstrained".into(),
        ));
    }
    let (graph, encoding) = load_graph(graph_path)?;
    let space = graph.mode_space();
    let partition = match partition_path {
        Some(p) => {
            let file: PartitionFile = load_json(p)?;
            Some(file.to_partition(&space).map_err(input_err)?)
        }
        None => None,
    };
    let options = SynthOptions {
        target_gain: Some(gain),
        diagonal_sources: diag_sources,
        contamination,
    };
    let design = match synthesize(&graph, &encoding, partition.as_ref(), &options) {
        Ok(d) => d,
        Err(Error::NoPerfectMatching) => {
            return Err(CmdError::Empty(
                "graph has no perfect matching; nothing to synthesize".into(),
            ))
        }
        Err(Error::OverConstrained(report)) => {
            println!("over-constrained: no exact solution under the requested restrictions");
            println!("residual: {}", report.residual);
            println!("inconsistent blocks:");
            for ((i, j), r) in &report.block_residuals {
                println!("  ({i}, {j})  residual {r}");
            }
            return Err(CmdError::OverConstrained(report));
        }
        Err(e) => return Err(input_err(e)),
    };

    let file = DesignFile::from_design(&design);
    let json = serde_json::to_string_pretty(&file).expect("design serializes");
    fs::write(output, json + "\n")
        .map_err(|e| CmdError::Input(format!("{}: {e}", output.display())))?;

    println!("design written to {}", output.display());
    println!(
        "sources: {} nonzero pair amplitudes; circuit blocks: {}",
        design.source_list.len(),
        design.partition().n_groups()
    );
    let mut log = String::new();
    for r in design.solution.resolution_log() {
        let _ = write!(log, " ({},{})={}", r.block.0, r.block.1, r.case);
    }
    println!("resolution:{log}");
    print_diagnostics(&design);
    if design.diagnostics.reconstruction_residual > SOLVE_RESIDUAL_TOL {
        return Err(CmdError::Verification("reconstruction residual above tolerance".into()));
    }
    Ok(())
}

/// `verify`: recompute every diagnostic of a design file from scratch.
pub fn cmd_verify(design_path: &Path, graph_path: &Path) -> CmdResult {
    let file: DesignFile = load_json(design_path)?;
    let (graph, encoding) = load_graph(graph_path)?;
    let space = graph.mode_space();
    if space.externals() != file.modes.externals.as_slice()
        || space.internals() != file.modes.internals.as_slice()
    {
        return Err(CmdError::Input(
            "design and graph mode spaces disagree".into(),
        ));
    }
    let target_state = match state_from_matchings(&graph, &encoding) {
        Ok(s) => s,
        Err(Error::NoPerfectMatching) => {
            return Err(CmdError::Empty("graph has no perfect matching".into()))
        }
        Err(e) => return Err(input_err(e)),
    };

    // target pair matrix: the graph adjacency at the design's actual gain,
    // taken from the reconstructed matrix rather than the recorded number
    let adjacency = graph_to_adjacency(&graph, &space).map_err(input_err)?;
    let (_, probe) = file
        .to_solution(&pairsynth_core::PairMatrix::zeros(space.dim()))
        .map_err(input_err)?;
    let gain = probe.reconstruct().squared_norm();
    let scale = (gain / adjacency.squared_norm()).sqrt();
    let target_beta = adjacency.scaled(scale);
    let (_, solution) = file.to_solution(&target_beta).map_err(input_err)?;

    let design = DeviceDesign {
        space,
        encoding,
        source_list: solution
            .sources()
            .into_iter()
            .map(|(a, b, amplitude)| pairsynth_core::SourceEntry { modes: (a, b), amplitude })
            .collect(),
        solution,
        diagnostics: pairsynth_core::Diagnostics {
            unitarity_residual: 0.0,
            reconstruction_residual: 0.0,
            gain: 0.0,
            fidelity: 0.0,
            contamination: None,
        },
        target_beta,
    };
    let mut verified = design.clone();
    verified.diagnostics = verify_design(&design, &target_state, false);

    print_diagnostics(&verified);
    let d = &verified.diagnostics;
    let ok = d.fidelity >= 1.0 - VERIFY_TOL
        && d.reconstruction_residual <= VERIFY_TOL
        && d.unitarity_residual <= VERIFY_TOL;
    if ok {
        println!("verification: PASS");
        Ok(())
    } else {
        println!("verification: FAIL");
        Err(CmdError::Verification(format!(
            "fidelity {} / reconstruction residual {} / unitarity residual {}",
            d.fidelity, d.reconstruction_residual, d.unitarity_residual
        )))
    }
}
