//! Seeded instance generators. Every generator is a pure function of its
//! arguments (ChaCha8 stream seeded from a `u64`).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Color, ColoredBipartiteGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly random r-coloring of the complete `K_{n1,n2}`.
pub fn random_coloring(n1: usize, n2: usize, r: usize, seed: u64) -> ColoredBipartiteGraph {
    let mut rng = rng(seed);
    let m = (0..n1 * n2).map(|_| rng.gen_range(1..=r) as Color).collect();
    ColoredBipartiteGraph::from_matrix(n1, n2, r, m).expect("valid dimensions")
}

/// Single-color random bipartite graph with edge probability `p`.
pub fn random_bipartite(n1: usize, n2: usize, p: f64, seed: u64) -> ColoredBipartiteGraph {
    let mut rng = rng(seed);
    let m = (0..n1 * n2).map(|_| rng.gen_bool(p) as Color).collect();
    ColoredBipartiteGraph::from_matrix(n1, n2, 1, m).expect("valid dimensions")
}

/// Random r-coloring of `K_{n,n}` minus a circulant band: `x_i` loses its edges
/// to `y_{(i + s) mod n}` for `s < n - delta`, so every vertex has degree
/// exactly `delta`. The removed band is the same for every seed.
pub fn random_min_degree_coloring(n: usize, delta: usize, r: usize, seed: u64) -> ColoredBipartiteGraph {
    assert!(delta <= n, "degree {delta} exceeds side {n}");
    let mut rng = rng(seed);
    let missing = n - delta;
    let mut m = vec![0 as Color; n * n];
    for x in 0..n {
        for y in 0..n {
            let offset = (y + n - x) % n;
            let c = rng.gen_range(1..=r) as Color;
            if offset >= missing {
                m[x * n + y] = c;
            }
        }
    }
    ColoredBipartiteGraph::from_matrix(n, n, r, m).expect("valid dimensions")
}

/// A seeded permutation of `0..n`.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}
