//! Closed walks in the reduced graph covering a connected matching.

use serde::{Deserialize, Serialize};

use crate::graph::{Color, Side, Vertex};
use crate::matching::ConnectedMatchingCertificate;
use crate::regularity::ReducedColoredGraph;
use crate::{Error, Result};

/// A closed walk `walk[0] walk[1] ... walk[t-1] walk[0]` over cluster vertices
/// of the reduced graph (`x_i` is cluster `X_{i+1}`). Step `s` goes from
/// `walk[s]` to `walk[(s + 1) % t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPlan {
    pub color: Color,
    pub walk: Vec<Vertex>,
    /// Steps (0-based, ascending) that are the first traversal of a matching edge.
    pub matched: Vec<usize>,
    pub t: usize,
}

impl WalkPlan {
    pub fn is_matched(&self, step: usize) -> bool {
        self.matched.binary_search(&step).is_ok()
    }
}

fn key(v: Vertex, k: usize) -> usize {
    if v.side == Side::X {
        v.index
    } else {
        k + v.index
    }
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Euler tour of a doubled tree containing the matching. The tree is grown
/// from the matching edges by adding reduced edges of the component in
/// ascending order, then pruned of leaves not covered by the matching; the
/// tour starts at the X end of the first matching edge and visits children in
/// ascending order.
pub fn walk_plan(h: &ReducedColoredGraph, color: Color, mstar: &ConnectedMatchingCertificate) -> Result<WalkPlan> {
    let k = h.k;
    let edges = &mstar.matching.edges;
    if edges.is_empty() {
        return Err(Error::invalid("empty matching"));
    }
    for &(x, y) in edges {
        if x >= k || y >= k || h.color(x, y) != color {
            return Err(Error::invalid(format!("matching edge x{x}-y{y} is not a color-{color} reduced edge")));
        }
    }
    let hg = h.as_graph();
    let view = hg.color_view(color);
    let comp = view
        .components()
        .into_iter()
        .find(|c| c.contains(&Vertex::x(edges[0].0)))
        .expect("matching edge lies in some component");
    if !edges.iter().all(|&(x, y)| comp.contains(&Vertex::x(x)) && comp.contains(&Vertex::y(y))) {
        return Err(Error::invalid("matching is not connected in the reduced color class"));
    }

    let mut in_m = vec![vec![false; k]; k];
    for &(x, y) in edges {
        in_m[x][y] = true;
    }
    let mut parent: Vec<usize> = (0..2 * k).collect();
    let mut tree: Vec<(usize, usize)> = Vec::new();
    for &(x, y) in edges {
        let (a, b) = (find(&mut parent, x), find(&mut parent, k + y));
        parent[a] = b;
        tree.push((x, y));
    }
    for x in comp.iter().filter(|v| v.side == Side::X).map(|v| v.index) {
        for y in view.x_neighbors(x).ones() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, k + y));
            if a != b {
                parent[a] = b;
                tree.push((x, y));
            }
        }
    }
    // Prune leaves whose only tree edge is outside the matching.
    loop {
        let mut deg = vec![0usize; 2 * k];
        for &(x, y) in &tree {
            deg[x] += 1;
            deg[k + y] += 1;
        }
        let before = tree.len();
        tree.retain(|&(x, y)| in_m[x][y] || (deg[x] > 1 && deg[k + y] > 1));
        if tree.len() == before {
            break;
        }
    }

    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); 2 * k];
    for &(x, y) in &tree {
        adj[x].push(Vertex::y(y));
        adj[k + y].push(Vertex::x(x));
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let root = Vertex::x(edges.iter().map(|e| e.0).min().unwrap());
    let mut walk = Vec::new();
    let mut matched = Vec::new();
    let mut seen_m = vec![vec![false; k]; k];
    // Iterative DFS emitting a step on each descent and each return.
    let mut stack: Vec<(Vertex, Option<Vertex>, usize)> = vec![(root, None, 0)];
    while let Some((v, from, next)) = stack.pop() {
        let children = &adj[key(v, k)];
        let mut i = next;
        while i < children.len() && Some(children[i]) == from {
            i += 1;
        }
        if i < children.len() {
            let c = children[i];
            stack.push((v, from, i + 1));
            let (x, y) = if v.side == Side::X { (v.index, c.index) } else { (c.index, v.index) };
            if in_m[x][y] && !seen_m[x][y] {
                seen_m[x][y] = true;
                matched.push(walk.len());
            }
            walk.push(v);
            stack.push((c, Some(v), 0));
        } else if from.is_some() {
            walk.push(v);
        }
    }
    let t = walk.len();
    Ok(WalkPlan { color, walk, matched, t })
}

/// Checks parity, that every step is a reduced edge of the walk's color, and
/// that the flagged steps are exactly the first traversals of the matching.
pub fn verify_walk(h: &ReducedColoredGraph, plan: &WalkPlan, mstar: &ConnectedMatchingCertificate) -> std::result::Result<(), String> {
    let t = plan.walk.len();
    if t != plan.t || t == 0 || t % 2 == 1 {
        return Err(format!("walk length {t} (stated {}) must be positive and even", plan.t));
    }
    let mut first = std::collections::HashMap::new();
    for s in 0..t {
        let (a, b) = (plan.walk[s], plan.walk[(s + 1) % t]);
        let (x, y) = match (a.side, b.side) {
            (Side::X, Side::Y) => (a.index, b.index),
            (Side::Y, Side::X) => (b.index, a.index),
            _ => return Err(format!("step {s} stays on one side")),
        };
        if x >= h.k || y >= h.k || h.color(x, y) != plan.color {
            return Err(format!("step {s} ({a}-{b}) is not a color-{} reduced edge", plan.color));
        }
        first.entry((x, y)).or_insert(s);
    }
    let mut expected: Vec<usize> = Vec::new();
    for e in &mstar.matching.edges {
        match first.get(e) {
            Some(&s) => expected.push(s),
            None => return Err(format!("matching edge x{}-y{} is never traversed", e.0, e.1)),
        }
    }
    expected.sort_unstable();
    if expected != plan.matched {
        return Err(format!("matched steps {:?}, expected {expected:?}", plan.matched));
    }
    Ok(())
}
