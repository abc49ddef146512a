//! Colored weighted graphs and their postselected states.
//!
//! A graph's vertices are external labels, its edge colors are internal
//! labels, and each edge carries one color per endpoint plus a complex
//! weight. Edges map one-to-one onto adjacency-matrix entries, and the
//! graph's perfect matchings give the lowest-order terms of the postselected
//! state.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::{CMat, PairMatrix};
use crate::space::{Encoding, ModeSpace};

/// One edge: endpoints `u`, `v` with per-endpoint colors and a weight.
///
/// Bicolored edges (`color_u != color_v`) are first-class; a monochromatic
/// edge is the special case of equal endpoint colors.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: String,
    pub color_u: String,
    pub v: String,
    pub color_v: String,
    pub weight: C64,
}

impl Edge {
    pub fn new(
        u: impl Into<String>,
        color_u: impl Into<String>,
        v: impl Into<String>,
        color_v: impl Into<String>,
        weight: C64,
    ) -> Self {
        Self {
            u: u.into(),
            color_u: color_u.into(),
            v: v.into(),
            color_v: color_v.into(),
            weight,
        }
    }
}

/// A colored weighted graph with validated structure: no self-loops, no
/// duplicate edge keys up to endpoint swap, finite nonzero weights. Parallel
/// edges between the same vertex pair must differ in at least one endpoint
/// color; merge weights upstream instead of repeating a key.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredGraph {
    vertices: Vec<String>,
    colors: Vec<String>,
    edges: Vec<Edge>,
}

/// Canonical edge key: endpoint `(vertex idx, color idx)` pairs, lesser first.
type EdgeKey = ((usize, usize), (usize, usize));

impl ColoredGraph {
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        colors: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let colors: Vec<String> = colors.into_iter().map(Into::into).collect();
        // ModeSpace::new performs the duplicate-label checks.
        ModeSpace::new(vertices.clone(), colors.clone())?;

        let mut graph = Self { vertices, colors, edges: Vec::new() };
        let mut seen: BTreeMap<EdgeKey, ()> = BTreeMap::new();
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &mut edges {
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u.clone()));
            }
            if !e.weight.re.is_finite()
                || !e.weight.im.is_finite()
                || e.weight == C64::new(0.0, 0.0)
            {
                return Err(Error::BadEdgeWeight {
                    u: e.u.clone(),
                    color_u: e.color_u.clone(),
                    v: e.v.clone(),
                    color_v: e.color_v.clone(),
                });
            }
            // canonical orientation: lesser (vertex, color) endpoint first
            let a = (graph.vertex_index(&e.u)?, graph.color_index(&e.color_u)?);
            let b = (graph.vertex_index(&e.v)?, graph.color_index(&e.color_v)?);
            if a > b {
                std::mem::swap(&mut e.u, &mut e.v);
                std::mem::swap(&mut e.color_u, &mut e.color_v);
            }
            if seen.insert((a.min(b), a.max(b)), ()).is_some() {
                return Err(Error::DuplicateEdge {
                    u: e.u.clone(),
                    color_u: e.color_u.clone(),
                    v: e.v.clone(),
                    color_v: e.color_v.clone(),
                });
            }
        }
        // Deterministic edge order: lexicographic in canonical keys.
        edges.sort_by_cached_key(|e| graph.edge_key(e).expect("validated above"));
        graph.edges = edges;
        Ok(graph)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Mode space spanned by this graph: externals are the vertices,
    /// internals the colors, in graph order.
    pub fn mode_space(&self) -> ModeSpace {
        ModeSpace::new(self.vertices.clone(), self.colors.clone())
            .expect("graph labels validated at construction")
    }

    pub fn vertex_index(&self, v: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|x| x == v)
            .ok_or_else(|| Error::UnknownLabel { kind: "vertex", label: v.into() })
    }

    pub fn color_index(&self, c: &str) -> Result<usize> {
        self.colors
            .iter()
            .position(|x| x == c)
            .ok_or_else(|| Error::UnknownLabel { kind: "color", label: c.into() })
    }

    fn edge_key(&self, e: &Edge) -> Result<EdgeKey> {
        let a = (self.vertex_index(&e.u)?, self.color_index(&e.color_u)?);
        let b = (self.vertex_index(&e.v)?, self.color_index(&e.color_v)?);
        Ok(if a <= b { (a, b) } else { (b, a) })
    }
}

/// A perfect matching: indices into the graph's edge list covering every
/// vertex exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edge_indices: Vec<usize>,
}

impl Matching {
    pub fn edge_indices(&self) -> &[usize] {
        &self.edge_indices
    }

    pub fn edges<'g>(&'g self, g: &'g ColoredGraph) -> impl Iterator<Item = &'g Edge> + 'g {
        self.edge_indices.iter().map(move |&i| &g.edges()[i])
    }
}

/// A normalized discrete-variable state over `n_qudits` qudits of dimension
/// `d`, stored sparsely; zero amplitudes are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct DVState {
    dimension: u8,
    n_qudits: usize,
    amplitudes: BTreeMap<Vec<u8>, C64>,
}

impl DVState {
    /// Normalize raw ket amplitudes into a state. Zero entries are dropped;
    /// a fully cancelled state is an error.
    pub fn new(
        dimension: u8,
        n_qudits: usize,
        amplitudes: impl IntoIterator<Item = (Vec<u8>, C64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
        for (ket, amp) in amplitudes {
            if ket.len() != n_qudits {
                return Err(Error::DimensionMismatch { expected: n_qudits, got: ket.len() });
            }
            if ket.iter().any(|&v| v >= dimension) {
                return Err(Error::InvalidInput(format!(
                    "ket {ket:?} out of range for dimension {dimension}"
                )));
            }
            *map.entry(ket).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, a| *a != C64::new(0.0, 0.0));
        let norm: f64 = map.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        for a in map.values_mut() {
            *a /= norm;
        }
        Ok(Self { dimension, n_qudits, amplitudes: map })
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn n_qudits(&self) -> usize {
        self.n_qudits
    }

    /// Kets and amplitudes in lexicographic ket order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (&[u8], C64)> {
        self.amplitudes.iter().map(|(k, &a)| (k.as_slice(), a))
    }

    pub fn amplitude(&self, ket: &[u8]) -> C64 {
        self.amplitudes.get(ket).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn n_terms(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Lay a graph out as its adjacency matrix over `space`: the edge
/// `(u, c_u)--(v, c_v)` with weight `w` sets the entries at modes
/// `(u, c_u), (v, c_v)` and its transpose to `w`.
pub fn graph_to_adjacency(g: &ColoredGraph, space: &ModeSpace) -> Result<PairMatrix> {
    let mut m = CMat::zeros(space.dim(), space.dim());
    for e in g.edges() {
        let a = space.mode(&e.u, &e.color_u)?;
        let b = space.mode(&e.v, &e.color_v)?;
        if m[(a, b)] != C64::new(0.0, 0.0) {
            return Err(Error::DuplicateEdge {
                u: e.u.clone(),
                color_u: e.color_u.clone(),
                v: e.v.clone(),
                color_v: e.color_v.clone(),
            });
        }
        m[(a, b)] = e.weight;
        m[(b, a)] = e.weight;
    }
    PairMatrix::from_matrix(m)
}

/// Inverse of [`graph_to_adjacency`] on supported matrices. Entries linking
/// two modes of the same external label would be self-loops and are
/// rejected; zero entries produce no edge.
pub fn adjacency_to_graph(m: &PairMatrix, space: &ModeSpace) -> Result<ColoredGraph> {
    if m.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: m.dim() });
    }
    let mut edges = Vec::new();
    for a in 0..m.dim() {
        for b in a..m.dim() {
            let w = m.entry(a, b);
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let (ua, ca) = space.labels_of(a);
            let (ub, cb) = space.labels_of(b);
            if ua == ub {
                return Err(Error::AdjacencySelfLoop(ua.to_string()));
            }
            edges.push(Edge::new(ua, ca, ub, cb, w));
        }
    }
    ColoredGraph::new(space.externals().to_vec(), space.internals().to_vec(), edges)
}

/// Enumerate every perfect matching, exhaustively and duplicate-free, in
/// lexicographic order of sorted canonical edge keys.
///
/// Recursive branching on the lowest uncovered vertex; exact and exponential
/// in the worst case, which is fine at the graph sizes this crate targets
/// (validated against subset brute force in the test suite). An odd vertex
/// count yields no matchings.
pub fn enumerate_perfect_matchings(g: &ColoredGraph) -> Vec<Matching> {
    let n = g.vertices().len();
    if !n.is_multiple_of(2) {
        return Vec::new();
    }
    // incidence[v] = edges touching vertex v, in canonical edge order
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); n];
    let endpoints: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            let u = g.vertex_index(&e.u).expect("validated");
            let v = g.vertex_index(&e.v).expect("validated");
            (u, v)
        })
        .collect();
    for (idx, &(u, v)) in endpoints.iter().enumerate() {
        incidence[u].push(idx);
        incidence[v].push(idx);
    }

    let mut covered = vec![false; n];
    let mut chosen: Vec<usize> = Vec::new();
    let mut out: Vec<Matching> = Vec::new();
    recurse(&endpoints, &incidence, &mut covered, &mut chosen, &mut out);
    // Edges are stored in canonical-key order, so sorted index lists compare
    // like sorted key lists.
    out.sort_by(|a, b| a.edge_indices.cmp(&b.edge_indices));
    out
}

fn recurse(
    endpoints: &[(usize, usize)],
    incidence: &[Vec<usize>],
    covered: &mut Vec<bool>,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Matching>,
) {
    let Some(next) = covered.iter().position(|&c| !c) else {
        let mut edge_indices = chosen.clone();
        edge_indices.sort_unstable();
        out.push(Matching { edge_indices });
        return;
    };
    for &idx in &incidence[next] {
        let (u, v) = endpoints[idx];
        let other = if u == next { v } else { u };
        if covered[other] {
            continue;
        }
        covered[next] = true;
        covered[other] = true;
        chosen.push(idx);
        recurse(endpoints, incidence, covered, chosen, out);
        chosen.pop();
        covered[next] = false;
        covered[other] = false;
    }
}

/// Postselected state read off the perfect matchings: each matching assigns
/// every vertex the logical value of its edge-endpoint color and contributes
/// the product of its edge weights; matching contributions to the same ket
/// add coherently. The shared combinatorial prefactor cancels under
/// normalization because every matching of an `N`-vertex graph has `N/2`
/// edges.
pub fn state_from_matchings(g: &ColoredGraph, enc: &Encoding) -> Result<DVState> {
    let matchings = enumerate_perfect_matchings(g);
    if matchings.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    let n_qudits = enc.n_qudits();
    let mut terms: Vec<(Vec<u8>, C64)> = Vec::with_capacity(matchings.len());
    for m in &matchings {
        let mut ket = vec![0u8; n_qudits];
        let mut amp = C64::new(1.0, 0.0);
        for e in m.edges(g) {
            ket[enc.qudit(&e.u)?] = enc.logical(&e.color_u)?;
            ket[enc.qudit(&e.v)?] = enc.logical(&e.color_v)?;
            amp *= e.weight;
        }
        terms.push((ket, amp));
    }
    DVState::new(enc.dimension(), n_qudits, terms)
}
