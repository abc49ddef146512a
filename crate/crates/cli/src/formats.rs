//! On-disk JSON schemas: graphs, partitions, and designs.
//!
//! All files are strict (unknown fields rejected) and serialize
//! deterministically: structs keep field order, collections are ordered
//! vectors or sorted maps, and floats print in shortest round-trip form, so
//! identical inputs produce byte-identical outputs.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use pairsynth_core::decomp::BlockSolution;
use pairsynth_core::graph::{ColoredGraph, Edge};
use pairsynth_core::matrix::{CMat, PairMatrix, UnitaryMatrix};
use pairsynth_core::partition::Partition;
use pairsynth_core::space::{Encoding, ModeSpace};
use pairsynth_core::synth::{DeviceDesign, Diagnostics};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for C64 {
    fn from(z: ComplexJson) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub u: String,
    pub color_u: String,
    pub v: String,
    pub color_v: String,
    pub weight: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingJson {
    pub qudit_of: BTreeMap<String, usize>,
    pub logical_of: BTreeMap<String, u8>,
}

/// A colored weighted graph plus its logical encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub colors: Vec<String>,
    pub edges: Vec<EdgeJson>,
    pub encoding: EncodingJson,
}

impl GraphFile {
    pub fn to_graph(&self) -> pairsynth_core::Result<(ColoredGraph, Encoding)> {
        let graph = ColoredGraph::new(
            self.vertices.clone(),
            self.colors.clone(),
            self.edges.iter().map(|e| {
                Edge::new(
                    e.u.clone(),
                    e.color_u.clone(),
                    e.v.clone(),
                    e.color_v.clone(),
                    e.weight.into(),
                )
            }),
        )?;
        let encoding = Encoding::new(
            self.encoding.qudit_of.clone(),
            self.encoding.logical_of.clone(),
        )?;
        for v in graph.vertices() {
            encoding.qudit(v)?;
        }
        for c in graph.colors() {
            encoding.logical(c)?;
        }
        Ok((graph, encoding))
    }

    pub fn from_graph(graph: &ColoredGraph, encoding: &Encoding) -> Self {
        Self {
            vertices: graph.vertices().to_vec(),
            colors: graph.colors().to_vec(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    u: e.u.clone(),
                    color_u: e.color_u.clone(),
                    v: e.v.clone(),
                    color_v: e.color_v.clone(),
                    weight: e.weight.into(),
                })
                .collect(),
            encoding: EncodingJson {
                qudit_of: encoding.qudit_map().clone(),
                logical_of: encoding.logical_map().clone(),
            },
        }
    }
}

/// One partition group: `(external, internal)` label pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub id: String,
    pub modes: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub groups: Vec<GroupJson>,
}

impl PartitionFile {
    pub fn to_partition(&self, space: &ModeSpace) -> pairsynth_core::Result<Partition> {
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let modes = g
                    .modes
                    .iter()
                    .map(|(e, i)| space.mode(e, i))
                    .collect::<pairsynth_core::Result<Vec<_>>>()?;
                Ok((g.id.clone(), modes))
            })
            .collect::<pairsynth_core::Result<Vec<_>>>()?;
        Partition::new(space.dim(), groups)
    }

    pub fn from_partition(partition: &Partition, space: &ModeSpace) -> Self {
        Self {
            groups: partition
                .group_ids()
                .iter()
                .enumerate()
                .map(|(g, id)| GroupJson {
                    id: id.clone(),
                    modes: partition
                        .members(g)
                        .iter()
                        .map(|&m| {
                            let (e, i) = space.labels_of(m);
                            (e.to_string(), i.to_string())
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesJson {
    pub externals: Vec<String>,
    pub internals: Vec<String>,
}

/// A `beta_bar` entry, upper triangle only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceJson {
    pub row: (String, String),
    pub col: (String, String),
    pub amplitude: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockJson {
    pub group: String,
    pub matrix: Vec<Vec<ComplexJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsJson {
    pub unitarity_residual: f64,
    pub reconstruction_residual: f64,
    pub gain: f64,
    pub fidelity: f64,
    pub contamination: Option<f64>,
}

impl From<&Diagnostics> for DiagnosticsJson {
    fn from(d: &Diagnostics) -> Self {
        Self {
            unitarity_residual: d.unitarity_residual,
            reconstruction_residual: d.reconstruction_residual,
            gain: d.gain,
            fidelity: d.fidelity,
            contamination: d.contamination,
        }
    }
}

/// A synthesized design: sparse sources, per-group circuit blocks, and the
/// diagnostics recorded at synthesis time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub modes: ModesJson,
    pub partition: Vec<GroupJson>,
    pub beta_bar: Vec<SourceJson>,
    pub unitary_blocks: Vec<BlockJson>,
    pub diagnostics: DiagnosticsJson,
}

impl DesignFile {
    pub fn from_design(design: &DeviceDesign) -> Self {
        let space = &design.space;
        let partition = design.partition();
        let label_pair = |m: usize| {
            let (e, i) = space.labels_of(m);
            (e.to_string(), i.to_string())
        };
        Self {
            modes: ModesJson {
                externals: space.externals().to_vec(),
                internals: space.internals().to_vec(),
            },
            partition: PartitionFile::from_partition(partition, space).groups,
            beta_bar: design
                .solution
                .sources()
                .into_iter()
                .map(|(a, b, z)| SourceJson {
                    row: label_pair(a),
                    col: label_pair(b),
                    amplitude: z.into(),
                })
                .collect(),
            unitary_blocks: partition
                .group_ids()
                .iter()
                .zip(design.solution.block_unitaries())
                .map(|(id, u)| BlockJson {
                    group: id.clone(),
                    matrix: (0..u.dim())
                        .map(|r| (0..u.dim()).map(|c| u.matrix()[(r, c)].into()).collect())
                        .collect(),
                })
                .collect(),
            diagnostics: (&design.diagnostics).into(),
        }
    }

    /// Rebuild the solution against a target pair matrix (for residuals).
    pub fn to_solution(
        &self,
        target: &PairMatrix,
    ) -> pairsynth_core::Result<(ModeSpace, BlockSolution)> {
        let space = ModeSpace::new(self.modes.externals.clone(), self.modes.internals.clone())?;
        let partition = PartitionFile { groups: self.partition.clone() }.to_partition(&space)?;
        let mut bb = CMat::zeros(space.dim(), space.dim());
        for s in &self.beta_bar {
            let r = space.mode(&s.row.0, &s.row.1)?;
            let c = space.mode(&s.col.0, &s.col.1)?;
            if r > c {
                return Err(pairsynth_core::Error::InvalidInput(format!(
                    "beta_bar entry ({:?}, {:?}) is not upper-triangle",
                    s.row, s.col
                )));
            }
            bb[(r, c)] = s.amplitude.into();
            bb[(c, r)] = s.amplitude.into();
        }
        let beta_bar = PairMatrix::from_matrix(bb)?;
        let mut unitaries: Vec<Option<UnitaryMatrix>> = vec![None; partition.n_groups()];
        for blk in &self.unitary_blocks {
            let g = partition.group_index(&blk.group)?;
            let n = blk.matrix.len();
            if blk.matrix.iter().any(|row| row.len() != n) {
                return Err(pairsynth_core::Error::InvalidInput(format!(
                    "unitary block `{}` is not square",
                    blk.group
                )));
            }
            let m = CMat::from_fn(n, n, |r, c| blk.matrix[r][c].into());
            unitaries[g] = Some(UnitaryMatrix::from_matrix(m)?);
        }
        let unitaries = unitaries
            .into_iter()
            .zip(partition.group_ids())
            .map(|(u, id)| {
                u.ok_or_else(|| {
                    pairsynth_core::Error::InvalidInput(format!("missing unitary block `{id}`"))
                })
            })
            .collect::<pairsynth_core::Result<Vec<_>>>()?;
        let solution = BlockSolution::from_parts(partition, beta_bar, unitaries, target)?;
        Ok((space, solution))
    }
}
