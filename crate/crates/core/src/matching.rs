//! Maximum and connected matchings of bipartite views.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{Color, ColoredBipartiteGraph, GraphView, Side, Vertex};
use crate::Exec;

/// Pairwise vertex-disjoint edges `(x, y)`, sorted by `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Number of saturated vertices.
    pub fn saturated(&self) -> usize {
        2 * self.edges.len()
    }

    /// Checks disjointness and that every edge belongs to the view.
    pub fn is_valid_in(&self, view: &GraphView<'_>) -> bool {
        let mut xs: Vec<usize> = self.edges.iter().map(|e| e.0).collect();
        let mut ys: Vec<usize> = self.edges.iter().map(|e| e.1).collect();
        xs.sort_unstable();
        ys.sort_unstable();
        let disjoint = xs.windows(2).all(|w| w[0] != w[1]) && ys.windows(2).all(|w| w[0] != w[1]);
        disjoint && self.edges.iter().all(|&(x, y)| view.has_edge(x, y))
    }
}

/// Layered augmenting-path matching over adjacency lists of the X side.
pub(crate) struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    mate_x: Vec<Option<usize>>,
    mate_y: Vec<Option<usize>>,
    layer: Vec<usize>,
}

const FREE: usize = usize::MAX;

impl<'a> HopcroftKarp<'a> {
    pub fn run(adj: &'a [Vec<usize>], n2: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let n1 = adj.len();
        let mut hk = HopcroftKarp { adj, mate_x: vec![None; n1], mate_y: vec![None; n2], layer: vec![FREE; n1] };
        while hk.bfs() {
            for x in 0..n1 {
                if hk.mate_x[x].is_none() {
                    hk.dfs(x);
                }
            }
        }
        (hk.mate_x, hk.mate_y)
    }

    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for x in 0..self.adj.len() {
            if self.mate_x[x].is_none() && !self.adj[x].is_empty() {
                self.layer[x] = 0;
                queue.push_back(x);
            } else {
                self.layer[x] = FREE;
            }
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                match self.mate_y[y] {
                    None => found = true,
                    Some(x2) if self.layer[x2] == FREE => {
                        self.layer[x2] = self.layer[x] + 1;
                        queue.push_back(x2);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, x: usize) -> bool {
        for i in 0..self.adj[x].len() {
            let y = self.adj[x][i];
            let ok = match self.mate_y[y] {
                None => true,
                Some(x2) => self.layer[x2] == self.layer[x] + 1 && self.dfs(x2),
            };
            if ok {
                self.mate_x[x] = Some(y);
                self.mate_y[y] = Some(x);
                return true;
            }
        }
        self.layer[x] = FREE;
        false
    }
}

/// Maximum-cardinality matching of the view (Hopcroft-Karp, ascending vertex order).
pub fn max_matching(view: &GraphView<'_>) -> Matching {
    let adj = view.x_adjacency();
    let (mate_x, _) = HopcroftKarp::run(&adj, view.graph().n2());
    let edges = mate_x.iter().enumerate().filter_map(|(x, m)| m.map(|y| (x, y))).collect();
    Matching { edges }
}

/// A matching inside one connected component of a color class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectedMatchingCertificate {
    /// Color of the class; 0 for multi-color views.
    pub color: Color,
    pub component: Vec<Vertex>,
    pub matching: Matching,
    pub saturated: usize,
}

/// For every component the maximum matching restricted to it; returns the
/// component with the most saturated vertices (earliest component on ties).
pub fn largest_connected_matching(view: &GraphView<'_>) -> ConnectedMatchingCertificate {
    let color = view.colors().as_single().unwrap_or(0);
    let components = view.components();
    let global = max_matching(view);
    let n1 = view.graph().n1();
    let mut comp_of = vec![usize::MAX; n1];
    for (i, comp) in components.iter().enumerate() {
        for v in comp.iter().filter(|v| v.side == Side::X) {
            comp_of[v.index] = i;
        }
    }
    // A maximum matching restricts to a maximum matching on every component.
    let mut per_comp: Vec<Vec<(usize, usize)>> = vec![Vec::new(); components.len()];
    for &(x, y) in &global.edges {
        per_comp[comp_of[x]].push((x, y));
    }
    let best = (0..components.len()).fold(None::<usize>, |best, i| match best {
        Some(b) if per_comp[b].len() >= per_comp[i].len() => Some(b),
        _ => Some(i),
    });
    match best {
        None => ConnectedMatchingCertificate { color, component: Vec::new(), matching: Matching::default(), saturated: 0 },
        Some(i) => {
            let edges = std::mem::take(&mut per_comp[i]);
            let saturated = 2 * edges.len();
            ConnectedMatchingCertificate {
                color,
                component: components[i].clone(),
                matching: Matching { edges },
                saturated,
            }
        }
    }
}

/// Largest connected matching of every color class `1..=r`.
pub fn best_connected_matchings(g: &ColoredBipartiteGraph) -> Vec<ConnectedMatchingCertificate> {
    best_connected_matchings_with(g, Exec::default())
}

pub fn best_connected_matchings_with(g: &ColoredBipartiteGraph, exec: Exec) -> Vec<ConnectedMatchingCertificate> {
    let colors: Vec<Color> = (1..=g.r() as Color).collect();
    exec.map(&colors, |&c| largest_connected_matching(&g.color_view(c)))
}

/// Re-checks a connected-matching certificate against `g`.
pub fn verify_connected_matching(g: &ColoredBipartiteGraph, cert: &ConnectedMatchingCertificate) -> bool {
    if cert.saturated != cert.matching.saturated() || cert.color as usize > g.r() {
        return false;
    }
    let base = if cert.color == 0 { g.view() } else { g.color_view(cert.color) };
    if !cert.matching.is_valid_in(&base) {
        return false;
    }
    if cert.component.is_empty() {
        return cert.matching.edges.is_empty();
    }
    let inside = |v: Vertex| cert.component.binary_search(&v).is_ok();
    if !cert.component.windows(2).all(|w| w[0] < w[1])
        || !cert.matching.edges.iter().all(|&(x, y)| inside(Vertex::x(x)) && inside(Vertex::y(y)))
    {
        return false;
    }
    let sub = base.restrict_to(&cert.component);
    let comps = sub.components();
    comps.len() == 1 && comps[0].len() == cert.component.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{h_tilde, lower_bound_coloring, BLUE, RED};
    use crate::random::{random_bipartite, random_coloring};
    use proptest::prelude::*;

    /// Kuhn's single-path augmentation; independent of the layered search.
    fn kuhn_size(g: &ColoredBipartiteGraph, c: Color) -> usize {
        fn try_kuhn(g: &ColoredBipartiteGraph, c: Color, x: usize, seen: &mut [bool], mate_y: &mut [Option<usize>]) -> bool {
            for y in 0..g.n2() {
                if g.color(x, y) == c && !seen[y] {
                    seen[y] = true;
                    if mate_y[y].is_none() || try_kuhn(g, c, mate_y[y].unwrap(), seen, mate_y) {
                        mate_y[y] = Some(x);
                        return true;
                    }
                }
            }
            false
        }
        let mut mate_y = vec![None; g.n2()];
        (0..g.n1()).filter(|&x| try_kuhn(g, c, x, &mut vec![false; g.n2()], &mut mate_y)).count()
    }

    /// Minimum vertex cover from a maximum matching (König construction).
    fn konig_cover(view: &GraphView<'_>, m: &Matching) -> Vec<Vertex> {
        let g = view.graph();
        let mut mate_x = vec![None; g.n1()];
        let mut mate_y = vec![None; g.n2()];
        for &(x, y) in &m.edges {
            mate_x[x] = Some(y);
            mate_y[y] = Some(x);
        }
        let mut zx = vec![false; g.n1()];
        let mut zy = vec![false; g.n2()];
        let mut queue: VecDeque<usize> = view.xs().filter(|&x| mate_x[x].is_none()).collect();
        for &x in &queue {
            zx[x] = true;
        }
        while let Some(x) = queue.pop_front() {
            for y in view.x_neighbors(x).ones() {
                if !zy[y] {
                    zy[y] = true;
                    if let Some(x2) = mate_y[y] {
                        if !zx[x2] {
                            zx[x2] = true;
                            queue.push_back(x2);
                        }
                    }
                }
            }
        }
        let mut cover: Vec<Vertex> = view.xs().filter(|&x| !zx[x]).map(Vertex::x).collect();
        cover.extend(view.ys().filter(|&y| zy[y]).map(Vertex::y));
        cover
    }

    #[test]
    fn max_matching_examples() {
        let k33 = ColoredBipartiteGraph::from_matrix(3, 3, 1, vec![1; 9]).unwrap();
        assert_eq!(max_matching(&k33.view()).size(), 3);
        let star = ColoredBipartiteGraph::from_matrix(1, 3, 1, vec![1; 3]).unwrap();
        assert_eq!(max_matching(&star.view()).size(), 1);
        let lb = lower_bound_coloring(&[4, 2]).unwrap();
        assert_eq!(max_matching(&lb.color_view(1)).size(), 3);
    }

    #[test]
    fn largest_connected_matching_examples() {
        let two_blocks = ColoredBipartiteGraph::from_rows(
            1,
            &[vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 1, 1]],
        )
        .unwrap();
        let cert = largest_connected_matching(&two_blocks.color_view(1));
        assert_eq!(cert.saturated, 4);
        assert!(cert.component.contains(&Vertex::x(0)));
        assert!(verify_connected_matching(&two_blocks, &cert));

        let k33 = ColoredBipartiteGraph::from_matrix(3, 3, 1, vec![1; 9]).unwrap();
        assert_eq!(largest_connected_matching(&k33.view()).saturated, 6);
    }

    #[test]
    fn h_tilde_one_connected_matchings() {
        // Red splits into two 3-edge paths; blue has a 5-edge path plus a pendant edge.
        let g = h_tilde(1).unwrap();
        let red = largest_connected_matching(&g.color_view(RED));
        assert_eq!(red.saturated, 4);
        assert_eq!(red.component.len(), 4);
        let blue = largest_connected_matching(&g.color_view(BLUE));
        assert_eq!(blue.saturated, 6);
        assert!(verify_connected_matching(&g, &red) && verify_connected_matching(&g, &blue));
    }

    #[test]
    fn best_connected_matchings_examples() {
        let mono = ColoredBipartiteGraph::from_matrix(4, 4, 2, vec![1; 16]).unwrap();
        let certs = best_connected_matchings(&mono);
        assert_eq!((certs[0].saturated, certs[1].saturated), (8, 0));

        let lb = lower_bound_coloring(&[3, 3]).unwrap();
        for cert in best_connected_matchings(&lb) {
            assert_eq!(cert.saturated, 4);
        }

        let g = random_coloring(10, 10, 2, 42);
        let certs = best_connected_matchings(&g);
        for (cert, c) in certs.iter().zip([1, 2]) {
            assert!(cert.saturated >= 8);
            assert!(verify_connected_matching(&g, cert));
            // Complete random colorings at this size have a connected color class.
            assert_eq!(cert.matching.size(), kuhn_size(&g, c));
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = random_coloring(30, 30, 3, 1);
        assert_eq!(best_connected_matchings_with(&g, Exec::Sequential), best_connected_matchings_with(&g, Exec::Parallel));
    }

    #[test]
    fn tampered_certificates_fail() {
        let g = random_coloring(6, 6, 2, 3);
        let mut cert = largest_connected_matching(&g.color_view(1));
        cert.saturated += 2;
        assert!(!verify_connected_matching(&g, &cert));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn matching_is_maximum(n1 in 1usize..30, n2 in 1usize..30, p in 0.02f64..0.5, seed in 0u64..1000) {
            let g = random_bipartite(n1, n2, p, seed);
            let view = g.color_view(1);
            let m = max_matching(&view);
            prop_assert!(m.is_valid_in(&view));
            prop_assert_eq!(m.size(), kuhn_size(&g, 1));
            let cover = konig_cover(&view, &m);
            prop_assert_eq!(cover.len(), m.size());
            for x in 0..n1 {
                for y in view.x_neighbors(x).ones() {
                    prop_assert!(cover.contains(&Vertex::x(x)) || cover.contains(&Vertex::y(y)));
                }
            }
        }

        #[test]
        fn dense_half_degree_graphs_are_connected_with_perfect_matching(n in 2usize..=40, p in 0.8f64..0.98, seed in 0u64..500) {
            // Both sides of size n with every degree above n/2.
            let g = random_bipartite(n, n, p, seed);
            let view = g.view();
            prop_assume!(view.min_degree() * 2 > n);
            prop_assert_eq!(view.components().len(), 1);
            prop_assert_eq!(max_matching(&view).size(), n);
        }
    }
}
