//! `{S, T, U}` decompositions certifying the absence of large matchings.
//!
//! For a graph on vertex set `V` without a matching saturating `alpha`
//! vertices, a valid decomposition satisfies:
//!
//! 1. the subgraph induced on `T` has maximum degree `< sqrt|V| - 1`;
//! 2. there are no edges between `T` and `U`;
//! 3. `|U| + 2|S| < alpha + sqrt|V|`.
//!
//! The construction takes `S` to be the Gallai-Edmonds separator `A(G)` (the
//! neighbors of the vertices missed by some maximum matching), then files each
//! component of `G - S` under `T` when it has fewer than `sqrt|V|` vertices and
//! under `U` otherwise. All square-root comparisons are done on integers.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphView, Side, Vertex};
use crate::matching::{max_matching, Matching};
use crate::{Error, Result};

/// Largest vertex count for the exhaustive separator fallback.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TutteDecomposition {
    pub s: Vec<Vertex>,
    pub t: Vec<Vertex>,
    pub u: Vec<Vertex>,
    pub alpha: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TutteOutcome {
    /// A matching saturating at least `alpha` vertices.
    Matching { matching: Matching },
    Decomposition { decomposition: TutteDecomposition },
    /// Neither shape could be produced (only possible above the exhaustive limit).
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TutteDefect {
    NotAPartition(String),
    /// Property 1: `vertex` has `degree` neighbors inside `T`.
    DenseT { vertex: Vertex, degree: usize },
    /// Property 2.
    EdgeTU { t: Vertex, u: Vertex },
    /// Property 3: `|U| + 2|S|` is too large.
    TooHeavy { weight: usize, alpha: usize, vertices: usize },
}

impl fmt::Display for TutteDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TutteDefect::NotAPartition(msg) => write!(f, "not a partition: {msg}"),
            TutteDefect::DenseT { vertex, degree } => {
                write!(f, "{vertex} has degree {degree} inside T (property 1)")
            }
            TutteDefect::EdgeTU { t, u } => write!(f, "edge {t}-{u} joins T and U (property 2)"),
            TutteDefect::TooHeavy { weight, alpha, vertices } => {
                write!(f, "|U|+2|S| = {weight} is not below {alpha} + sqrt({vertices}) (property 3)")
            }
        }
    }
}

/// `a < sqrt(n)` for non-negative integers.
fn below_sqrt(a: usize, n: usize) -> bool {
    (a as u128) * (a as u128) < n as u128
}

/// Checks the three decomposition properties against the view.
pub fn verify_tutte(view: &GraphView<'_>, d: &TutteDecomposition) -> std::result::Result<(), TutteDefect> {
    let mut all: Vec<Vertex> = d.s.iter().chain(&d.t).chain(&d.u).copied().collect();
    let total = all.len();
    all.sort_unstable();
    all.dedup();
    if all.len() != total {
        return Err(TutteDefect::NotAPartition("parts overlap".into()));
    }
    if all != view.vertices() {
        return Err(TutteDefect::NotAPartition("parts do not cover the vertex set".into()));
    }
    let n = total;
    let t_view = view.restrict_to(&d.t);
    for &v in &d.t {
        let deg = t_view.degree(v);
        // deg < sqrt(n) - 1  <=>  deg + 1 < sqrt(n)
        if !below_sqrt(deg + 1, n) {
            return Err(TutteDefect::DenseT { vertex: v, degree: deg });
        }
    }
    let mut in_u = vec![false; view.graph().n1() + view.graph().n2()];
    let key = |v: Vertex| if v.side == Side::X { v.index } else { view.graph().n1() + v.index };
    for &v in &d.u {
        in_u[key(v)] = true;
    }
    for &v in &d.t {
        if let Some(w) = view.neighbors(v).into_iter().find(|&w| in_u[key(w)]) {
            return Err(TutteDefect::EdgeTU { t: v, u: w });
        }
    }
    let weight = d.u.len() + 2 * d.s.len();
    // weight < alpha + sqrt(n)  <=>  weight <= alpha  or  (weight - alpha) < sqrt(n)
    if weight >= d.alpha && !below_sqrt(weight - d.alpha, n) {
        return Err(TutteDefect::TooHeavy { weight, alpha: d.alpha, vertices: n });
    }
    Ok(())
}

/// Either a matching saturating at least `alpha` vertices or a verified
/// decomposition.
pub fn tutte_partition(view: &GraphView<'_>, alpha: usize) -> Result<TutteOutcome> {
    if alpha == 0 {
        return Err(Error::invalid("alpha must be at least 1"));
    }
    let matching = max_matching(view);
    if matching.saturated() >= alpha {
        return Ok(TutteOutcome::Matching { matching });
    }
    let s = gallai_edmonds_separator(view, &matching);
    let d = split_components(view, s, alpha);
    if verify_tutte(view, &d).is_ok() {
        return Ok(TutteOutcome::Decomposition { decomposition: d });
    }
    if view.vertex_count() <= EXHAUSTIVE_LIMIT {
        if let Some(d) = exhaustive_decomposition(view, alpha) {
            return Ok(TutteOutcome::Decomposition { decomposition: d });
        }
    }
    Ok(TutteOutcome::NotFound)
}

/// `A(G)`: vertices outside `D(G)` adjacent to it, where `D(G)` is the set of
/// vertices reachable from an exposed vertex by an even alternating path.
fn gallai_edmonds_separator(view: &GraphView<'_>, m: &Matching) -> Vec<Vertex> {
    let g = view.graph();
    let n1 = g.n1();
    let key = |v: Vertex| if v.side == Side::X { v.index } else { n1 + v.index };
    let mut mate = vec![None; n1 + g.n2()];
    for &(x, y) in &m.edges {
        mate[x] = Some(Vertex::y(y));
        mate[n1 + y] = Some(Vertex::x(x));
    }
    let mut even = vec![false; n1 + g.n2()];
    let mut queue = VecDeque::new();
    for v in view.vertices() {
        if mate[key(v)].is_none() {
            even[key(v)] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in view.neighbors(v) {
            if let Some(next) = mate[key(w)] {
                if !even[key(next)] {
                    even[key(next)] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    view.vertices()
        .into_iter()
        .filter(|&v| !even[key(v)] && view.neighbors(v).iter().any(|&w| even[key(w)]))
        .collect()
}

/// Components of `G - S`, small ones (`|C| < sqrt|V|`) into `T`, the rest into `U`.
fn split_components(view: &GraphView<'_>, s: Vec<Vertex>, alpha: usize) -> TutteDecomposition {
    let n = view.vertex_count();
    let rest: Vec<Vertex> = view.vertices().into_iter().filter(|v| s.binary_search(v).is_err()).collect();
    let sub = view.restrict_to(&rest);
    let mut t = Vec::new();
    let mut u = Vec::new();
    let mut placed: Vec<Vertex> = Vec::new();
    for comp in sub.components() {
        placed.extend(&comp);
        if below_sqrt(comp.len(), n) {
            t.extend(comp);
        } else {
            u.extend(comp);
        }
    }
    // Isolated vertices of G - S are singleton components.
    placed.sort_unstable();
    for v in rest {
        if placed.binary_search(&v).is_err() {
            if below_sqrt(1, n) {
                t.push(v);
            } else {
                u.push(v);
            }
        }
    }
    t.sort_unstable();
    u.sort_unstable();
    TutteDecomposition { s, t, u, alpha }
}

/// Tries every separator `S` in order of size; for each, puts a component of
/// `G - S` into `T` whenever its internal degrees allow it.
fn exhaustive_decomposition(view: &GraphView<'_>, alpha: usize) -> Option<TutteDecomposition> {
    let vertices = view.vertices();
    let n = vertices.len();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let s: Vec<Vertex> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| vertices[i]).collect();
        let rest: Vec<Vertex> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| vertices[i]).collect();
        let sub = view.restrict_to(&rest);
        let mut comps = sub.components();
        let mut covered: Vec<Vertex> = comps.concat();
        covered.sort_unstable();
        comps.extend(rest.iter().filter(|v| covered.binary_search(v).is_err()).map(|&v| vec![v]));
        let (mut t, mut u) = (Vec::new(), Vec::new());
        for comp in comps {
            let cv = view.restrict_to(&comp);
            if comp.iter().all(|&v| below_sqrt(cv.degree(v) + 1, n)) {
                t.extend(comp);
            } else {
                u.extend(comp);
            }
        }
        t.sort_unstable();
        u.sort_unstable();
        let d = TutteDecomposition { s, t, u, alpha };
        if verify_tutte(view, &d).is_ok() {
            return Some(d);
        }
    }
    None
}
