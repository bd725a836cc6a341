//! The two explicit extremal colorings: the column-window lower-bound coloring
//! of `K_{N,N}` and the four-block minimum-degree graph `H~`.

use crate::graph::{Color, ColoredBipartiteGraph};
use crate::{Error, Result};

pub const RED: Color = 1;
pub const BLUE: Color = 2;

/// Inclusive 1-based column windows `[lo_k, hi_k]` of the lower-bound coloring,
/// `lo_k = sum_{i<k} n_i - k + 2` and `hi_k = sum_{i<=k} n_i - k`.
pub fn lower_bound_windows(half_lengths: &[usize]) -> Vec<(usize, usize)> {
    let mut prefix = 0;
    half_lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let k = i + 1;
            let lo = prefix + 2 - k;
            prefix += n;
            (lo, prefix - k)
        })
        .collect()
}

/// Coloring of `K_{N,N}`, `N = sum n_i - r`, where color `k` occupies a block of
/// `n_k - 1` consecutive columns. Color class `k` is `K_{N, n_k - 1}` and so has
/// no cycle of length `2 n_k`.
///
/// Takes the half-lengths `n_i` (the forbidden cycles are `C_{2 n_i}`).
pub fn lower_bound_coloring(half_lengths: &[usize]) -> Result<ColoredBipartiteGraph> {
    let r = half_lengths.len();
    if r == 0 {
        return Err(Error::invalid("at least one color is required"));
    }
    if let Some(&bad) = half_lengths.iter().find(|&&n| n < 2) {
        return Err(Error::invalid(format!("every half-length must be at least 2, got {bad}")));
    }
    let total: usize = half_lengths.iter().sum();
    if total <= r {
        return Err(Error::invalid("lower-bound host would have no vertices"));
    }
    let n = total - r;
    let windows = lower_bound_windows(half_lengths);
    let mut column_color = vec![0 as Color; n];
    for (k, &(lo, hi)) in windows.iter().enumerate() {
        for t in lo..=hi {
            debug_assert_eq!(column_color[t - 1], 0, "windows overlap");
            column_color[t - 1] = (k + 1) as Color;
        }
    }
    debug_assert!(column_color.iter().all(|&c| c != 0), "windows do not tile");
    let matrix = (0..n).flat_map(|_| column_color.iter().copied()).collect();
    ColoredBipartiteGraph::from_matrix(n, n, r, matrix)
}

/// The red/blue graph `H~` on `U = U_1..U_4`, `V = V_1..V_4` with blocks of size
/// `n`. Red is color 1 and blue is color 2. The exceptional vertices are the
/// first vertex `u` of `U_3` and the first vertex `v` of `V_1`:
///
/// ```text
/// U_1: blue to V_1, V_2          red to V_4
/// U_2: red to V_1, V_3           blue to V_2
/// U_3: red to V_2                blue to V_3
///      U_3 - {u} blue to V_4     u red to V_4
/// U_4: red to V_3, V_1 - {v}     blue to V_4, v
/// ```
///
/// Every other block pair is absent, so each vertex has degree exactly `3n`.
pub fn h_tilde(n: usize) -> Result<ColoredBipartiteGraph> {
    if n == 0 {
        return Err(Error::invalid("block size must be at least 1"));
    }
    let size = 4 * n;
    let block = |i: usize| i / n;
    let u = 2 * n;
    let v = 0;
    let mut m = vec![0 as Color; size * size];
    for x in 0..size {
        for y in 0..size {
            let c = match (block(x), block(y)) {
                (0, 0 | 1) => BLUE,
                (0, 3) => RED,
                (1, 0 | 2) => RED,
                (1, 1) => BLUE,
                (2, 1) => RED,
                (2, 2) => BLUE,
                (2, 3) if x == u => RED,
                (2, 3) => BLUE,
                (3, 0) if y == v => BLUE,
                (3, 0 | 2) => RED,
                (3, 3) => BLUE,
                _ => 0,
            };
            m[x * size + y] = c;
        }
    }
    ColoredBipartiteGraph::from_matrix(size, size, 2, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;

    #[test]
    fn windows_tile_the_columns() {
        for lengths in [vec![2, 2], vec![2, 2, 2], vec![4, 2], vec![6, 3, 5], vec![2]] {
            let n: usize = lengths.iter().sum::<usize>() - lengths.len();
            let w = lower_bound_windows(&lengths);
            assert_eq!(w[0].0, 1);
            assert_eq!(w.last().unwrap().1, n);
            for pair in w.windows(2) {
                assert_eq!(pair[0].1 + 1, pair[1].0);
            }
            for (k, &(lo, hi)) in w.iter().enumerate() {
                assert_eq!(hi + 1 - lo, lengths[k] - 1);
            }
        }
    }

    #[test]
    fn lower_bound_small_cases() {
        let g = lower_bound_coloring(&[2, 2]).unwrap();
        assert_eq!(g.to_rows(), vec![vec![1, 2], vec![1, 2]]);
        let g = lower_bound_coloring(&[2, 2, 2]).unwrap();
        assert_eq!(g.to_rows()[2], vec![1, 2, 3]);
        let g = lower_bound_coloring(&[4, 2]).unwrap();
        assert_eq!(g.n1(), 4);
        assert_eq!(g.to_rows()[0], vec![1, 1, 1, 2]);
        assert!(g.is_complete());
    }

    #[test]
    fn lower_bound_rejects_bad_lengths() {
        assert!(lower_bound_coloring(&[]).is_err());
        assert!(lower_bound_coloring(&[1, 3]).is_err());
    }

    #[test]
    fn h_tilde_degrees_are_three_n() {
        for n in 1..=5 {
            let g = h_tilde(n).unwrap();
            let v = g.view();
            for w in v.vertices() {
                assert_eq!(v.degree(w), 3 * n, "vertex {w} at n={n}");
            }
        }
    }

    #[test]
    fn h_tilde_exceptional_vertex_degrees() {
        let g = h_tilde(1).unwrap();
        let u = Vertex::x(2);
        assert_eq!(g.color_view(RED).neighbors(u), vec![Vertex::y(1), Vertex::y(3)]);
        assert_eq!(g.color_view(BLUE).neighbors(u), vec![Vertex::y(2)]);
        assert_eq!(g.min_degree(), 3);
    }

    #[test]
    fn h_tilde_blocks_are_monochromatic_away_from_exceptions() {
        let n = 3;
        let g = h_tilde(n).unwrap();
        for bx in 0..4 {
            for by in 0..4 {
                let mut seen = std::collections::BTreeSet::new();
                for x in bx * n..(bx + 1) * n {
                    for y in by * n..(by + 1) * n {
                        if x != 2 * n && y != 0 {
                            seen.insert(g.color(x, y));
                        }
                    }
                }
                assert_eq!(seen.len(), 1, "block ({bx},{by})");
            }
        }
    }
}
