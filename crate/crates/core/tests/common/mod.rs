//! Seeded generators shared by the integration suites.
#![allow(dead_code)] // each test target uses a different subset

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairsynth_core::graph::{ColoredGraph, Edge};
use pairsynth_core::matrix::{CMat, PairMatrix};
use pairsynth_core::partition::Partition;
use pairsynth_core::space::Encoding;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_weight(rng: &mut ChaCha8Rng) -> C64 {
    // magnitude bounded away from zero so matchings never cancel by accident
    let mag = 0.3 + 0.7 * rng.random::<f64>();
    let phase = std::f64::consts::TAU * rng.random::<f64>();
    C64::from_polar(mag, phase)
}

/// Random graph on `n_vertices`/`n_colors`. With `plant_matching`, a random
/// perfect pairing of the vertices is inserted first so the graph always has
/// at least one perfect matching; `extra_edges` attempts add further random
/// edges (duplicates skipped).
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n_vertices: usize,
    n_colors: usize,
    extra_edges: usize,
    plant_matching: bool,
) -> ColoredGraph {
    let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{i}")).collect();
    let colors: Vec<String> = (0..n_colors).map(|i| format!("c{i}")).collect();
    let mut edges: Vec<Edge> = Vec::new();
    let mut keys: Vec<(usize, usize, usize, usize)> = Vec::new();
    let try_push = |edges: &mut Vec<Edge>,
                        keys: &mut Vec<(usize, usize, usize, usize)>,
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

    if plant_matching && n_vertices.is_multiple_of(2) {
        let mut order: Vec<usize> = (0..n_vertices).collect();
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        for pair in order.chunks(2) {
            let w = random_weight(rng);
            try_push(
                &mut edges,
                &mut keys,
                pair[0],
                rng.random_range(0..n_colors),
                pair[1],
                rng.random_range(0..n_colors),
                w,
            );
        }
    }
    for _ in 0..extra_edges {
        let u = rng.random_range(0..n_vertices);
        let v = rng.random_range(0..n_vertices);
        let w = random_weight(rng);
        try_push(
            &mut edges,
            &mut keys,
            u,
            rng.random_range(0..n_colors),
            v,
            rng.random_range(0..n_colors),
            w,
        );
    }
    ColoredGraph::new(vertices, colors, edges).expect("generator avoids invalid edges")
}

/// Qudit per vertex in vertex order, logical value per color in color order.
pub fn natural_encoding(g: &ColoredGraph) -> Encoding {
    Encoding::new(
        g.vertices().iter().enumerate().map(|(i, v)| (v.clone(), i)),
        g.colors().iter().enumerate().map(|(i, c)| (c.clone(), i as u8)),
    )
    .expect("graph labels are unique")
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> PairMatrix {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    PairMatrix::from_matrix(m).expect("finite by construction")
}

/// Random partition of `dim` modes into `n_groups` non-empty groups.
pub fn random_partition(rng: &mut ChaCha8Rng, dim: usize, n_groups: usize) -> Partition {
    assert!(n_groups <= dim);
    loop {
        let assignment: Vec<usize> = (0..dim).map(|_| rng.random_range(0..n_groups)).collect();
        if (0..n_groups).all(|g| assignment.contains(&g)) {
            let groups = (0..n_groups).map(|g| {
                (
                    format!("g{g}"),
                    assignment
                        .iter()
                        .enumerate()
                        .filter(|&(_, a)| *a == g)
                        .map(|(m, _)| m)
                        .collect::<Vec<_>>(),
                )
            });
            return Partition::new(dim, groups).expect("valid by construction");
        }
    }
}

/// All `k`-subsets of `0..n`, for the brute-force matching oracle.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
