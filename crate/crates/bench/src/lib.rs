//! Deterministic input generators shared by the benchmark targets.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairsynth_core::graph::{ColoredGraph, Edge};
use pairsynth_core::matrix::{CMat, PairMatrix};

pub fn random_symmetric(seed: u64, n: usize) -> PairMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    PairMatrix::from_matrix(m).expect("finite by construction")
}

/// Dense-ish random graph with a planted perfect matching.
pub fn random_graph(seed: u64, n_vertices: usize, n_colors: usize, extra: usize) -> ColoredGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
    let colors: Vec<String> = (0..n_colors).map(|i| format!("c{i}")).collect();
    let mut keys = Vec::new();
    let mut edges = Vec::new();
    let add = |keys: &mut Vec<(usize, usize, usize, usize)>,
                   edges: &mut Vec<Edge>,
                   u: usize,
                   cu: usize,
                   v: usize,
                   cv: usize,
                   w: C64| {
        let key = if (u, cu) <= (v, cv) { (u, cu, v, cv) } else { (v, cv, u, cu) };
        if u != v && !keys.contains(&key) {
            keys.push(key);
            edges.push(Edge::new(
                format!("v{u}"),
                format!("c{cu}"),
                format!("v{v}"),
                format!("c{cv}"),
                w,
            ));
        }
    };
    let mut order: Vec<usize> = (0..n_vertices).collect();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for pair in order.chunks(2) {
        let cu = rng.random_range(0..n_colors);
        let cv = rng.random_range(0..n_colors);
        add(&mut keys, &mut edges, pair[0], cu, pair[1], cv, C64::new(0.1, 0.0));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n_vertices);
        let v = rng.random_range(0..n_vertices);
        let cu = rng.random_range(0..n_colors);
        let cv = rng.random_range(0..n_colors);
        add(&mut keys, &mut edges, u, cu, v, cv, C64::new(0.1, 0.0));
    }
    ColoredGraph::new(vertices, colors, edges).expect("generator avoids invalid edges")
}
