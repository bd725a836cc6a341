//! Paths of a prescribed odd length between two fixed vertices of a dense pair.
//!
//! The search grows a path from `start` by rotation-extension: extend the free
//! end to an unused neighbor when possible, otherwise rotate the path around an
//! on-path neighbor of the end so that a new vertex becomes the end. Rotations
//! are chosen with a one-step lookahead and random tie-breaking; exhausted
//! attempts restart with a fresh seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphView, Side, Vertex};
use crate::random::rng;
use crate::regularity::{ratio_serde, Ratio};
use crate::{Error, Result};

const ATTEMPTS: u64 = 12;
/// Rotations allowed per attempt, per path vertex.
const ROTATIONS_PER_VERTEX: usize = 60;

/// Pair parameters: cluster size `m`, density parameter `beta`, regularity `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairParams {
    pub m: usize,
    #[serde(with = "ratio_serde")]
    pub beta: Ratio,
    #[serde(with = "ratio_serde")]
    pub eps: Ratio,
}

impl PairParams {
    /// Largest admissible `l`: `floor(m - 5 eps m / beta)`.
    pub fn max_l(&self) -> usize {
        let m = Ratio::from_integer(self.m as i64);
        let v = (m - Ratio::from_integer(5) * self.eps * m / self.beta).floor().to_integer();
        v.max(0) as usize
    }

    /// `beta m / 5`, the degree floor for path endpoints.
    pub fn degree_floor(&self) -> Ratio {
        self.beta * Ratio::from_integer(self.m as i64) / Ratio::from_integer(5)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathHypotheses {
    #[serde(with = "ratio_serde")]
    pub density: Ratio,
    /// Density at least `beta / 4`.
    pub density_ok: bool,
    pub start_degree: usize,
    pub end_degree: usize,
    /// Both endpoint degrees at least `beta m / 5`.
    pub degrees_ok: bool,
    /// `eps < beta / 100`.
    pub eps_ok: bool,
}

impl PathHypotheses {
    /// Regularity of the pair is not checked here.
    pub fn all_hold(&self) -> bool {
        self.density_ok && self.degrees_ok && self.eps_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PathOutcome {
    Found { path: Vec<Vertex> },
    Failure { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathReport {
    pub hypotheses: PathHypotheses,
    pub outcome: PathOutcome,
    pub rotations: u64,
}

impl PathReport {
    pub fn path(&self) -> Option<&[Vertex]> {
        match &self.outcome {
            PathOutcome::Found { path } => Some(path),
            PathOutcome::Failure { .. } => None,
        }
    }
}

/// Finds a path with exactly `2l + 1` edges from `start` to `end` inside the
/// view, which should already be restricted to one color and to the usable
/// vertices of the two clusters. Every returned path has passed
/// [`verify_path`].
pub fn connect_in_pair(pair: &GraphView<'_>, start: Vertex, end: Vertex, l: usize, params: &PairParams, seed: u64) -> Result<PathReport> {
    if start.side == end.side {
        return Err(Error::invalid(format!("endpoints {start} and {end} are on the same side")));
    }
    if !pair.contains(start) || !pair.contains(end) {
        return Err(Error::invalid("endpoints must belong to the pair"));
    }
    let max_l = params.max_l();
    if l == 0 || l > max_l {
        return Err(Error::invalid(format!("path parameter l = {l} outside [1, {max_l}]")));
    }
    let nx = pair.x_filter().count_ones(..);
    let ny = pair.y_filter().count_ones(..);
    if l + 1 > nx.min(ny) {
        return Err(Error::invalid(format!("l = {l} needs {} vertices per side, pair has {}", l + 1, nx.min(ny))));
    }
    let hypotheses = hypotheses(pair, start, end, params);
    let local = Local::new(pair);
    let s = local.id(start);
    let e = local.id(end);
    let mut rotations = 0;
    for attempt in 0..ATTEMPTS {
        let mut rng = rng(seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (found, used) = local.grow(s, e, 2 * l + 1, &mut rng);
        rotations += used as u64;
        if let Some(p) = found {
            let path: Vec<Vertex> = p.iter().map(|&v| local.verts[v as usize]).collect();
            verify_path(pair, &path, start, end, 2 * l + 1).map_err(|msg| Error::invalid(format!("internal: produced invalid path: {msg}")))?;
            return Ok(PathReport { hypotheses, outcome: PathOutcome::Found { path }, rotations });
        }
    }
    Ok(PathReport {
        hypotheses,
        outcome: PathOutcome::Failure { reason: format!("no path after {ATTEMPTS} attempts ({rotations} rotations)") },
        rotations,
    })
}

fn hypotheses(pair: &GraphView<'_>, start: Vertex, end: Vertex, params: &PairParams) -> PathHypotheses {
    let nx = pair.x_filter().count_ones(..).max(1);
    let ny = pair.y_filter().count_ones(..).max(1);
    let density = Ratio::new(pair.edge_count() as i64, (nx * ny) as i64);
    let start_degree = pair.degree(start);
    let end_degree = pair.degree(end);
    let floor = params.degree_floor();
    PathHypotheses {
        density,
        density_ok: density >= params.beta / Ratio::from_integer(4),
        start_degree,
        end_degree,
        degrees_ok: Ratio::from_integer(start_degree as i64) >= floor && Ratio::from_integer(end_degree as i64) >= floor,
        eps_ok: params.eps < params.beta / Ratio::from_integer(100),
    }
}

/// The pair relabeled `0..n` with adjacency lists.
struct Local {
    verts: Vec<Vertex>,
    adj: Vec<Vec<u32>>,
}

impl Local {
    fn new(pair: &GraphView<'_>) -> Self {
        let verts = pair.vertices();
        let nx = verts.iter().take_while(|v| v.side == Side::X).count();
        let mut yid = vec![u32::MAX; pair.graph().n2()];
        for (i, v) in verts[nx..].iter().enumerate() {
            yid[v.index] = (nx + i) as u32;
        }
        let mut adj = vec![Vec::new(); verts.len()];
        for (i, v) in verts[..nx].iter().enumerate() {
            for y in pair.x_neighbors(v.index).ones() {
                let j = yid[y];
                adj[i].push(j);
                adj[j as usize].push(i as u32);
            }
        }
        Local { verts, adj }
    }

    fn id(&self, v: Vertex) -> u32 {
        self.verts.binary_search(&v).expect("vertex in pair") as u32
    }

    /// One randomized attempt. Returns the path (with `e` appended) and the
    /// number of rotations spent.
    fn grow(&self, s: u32, e: u32, edges: usize, rng: &mut ChaCha8Rng) -> (Option<Vec<u32>>, usize) {
        let n = self.verts.len();
        let want = edges; // vertices before `e`
        let mut near_end = vec![false; n];
        for &w in &self.adj[e as usize] {
            near_end[w as usize] = true;
        }
        let mut pos = vec![usize::MAX; n];
        pos[e as usize] = usize::MAX - 1; // reserved
        let mut path = vec![s];
        pos[s as usize] = 0;
        let budget = ROTATIONS_PER_VERTEX * (edges + 1);
        let mut rotations = 0;
        let free = |pos: &[usize], v: u32| pos[v as usize] == usize::MAX;

        loop {
            let end = *path.last().unwrap();
            if path.len() == want {
                if near_end[end as usize] {
                    path.push(e);
                    return (Some(path), rotations);
                }
            } else {
                let last_step = path.len() + 1 == want;
                let cands: Vec<u32> = self.adj[end as usize].iter().copied().filter(|&w| free(&pos, w)).collect();
                let pick = if last_step {
                    let good: Vec<u32> = cands.iter().copied().filter(|&w| near_end[w as usize]).collect();
                    good.choose(rng).copied().or_else(|| cands.choose(rng).copied())
                } else {
                    // Prefer the candidate with the fewest free neighbors.
                    let score = |w: u32| self.adj[w as usize].iter().filter(|&&z| free(&pos, z)).count();
                    let best = cands.iter().map(|&w| score(w)).min();
                    let tied: Vec<u32> = cands.iter().copied().filter(|&w| Some(score(w)) == best).collect();
                    tied.choose(rng).copied()
                };
                if let Some(w) = pick {
                    pos[w as usize] = path.len();
                    path.push(w);
                    continue;
                }
            }

            // Rotate: pick an on-path neighbor w of the end (not its predecessor);
            // the vertex after w becomes the new end.
            if rotations >= budget {
                return (None, rotations);
            }
            let len = path.len();
            let pivots: Vec<usize> = self.adj[end as usize]
                .iter()
                .map(|&w| pos[w as usize])
                .filter(|&p| p < len && p + 2 < len)
                .collect();
            if pivots.is_empty() {
                // Dead end: drop it and try elsewhere.
                if len == 1 {
                    return (None, rotations);
                }
                let v = path.pop().unwrap();
                pos[v as usize] = usize::MAX;
                rotations += 1;
                continue;
            }
            let full = len == want;
            let useful: Vec<usize> = pivots
                .iter()
                .copied()
                .filter(|&p| {
                    let new_end = path[p + 1];
                    if full {
                        near_end[new_end as usize]
                    } else {
                        self.adj[new_end as usize].iter().any(|&z| free(&pos, z))
                    }
                })
                .collect();
            let p = if !useful.is_empty() && rng.gen_bool(0.9) { *useful.choose(rng).unwrap() } else { *pivots.choose(rng).unwrap() };
            path[p + 1..].reverse();
            for (i, &v) in path.iter().enumerate().skip(p + 1) {
                pos[v as usize] = i;
            }
            rotations += 1;
        }
    }
}

/// Independent path check: `edges + 1` distinct vertices alternating sides,
/// from `start` to `end`, consecutive pairs adjacent in the view.
pub fn verify_path(view: &GraphView<'_>, path: &[Vertex], start: Vertex, end: Vertex, edges: usize) -> std::result::Result<(), String> {
    if path.len() != edges + 1 {
        return Err(format!("{} vertices for {edges} edges", path.len()));
    }
    if path.first() != Some(&start) || path.last() != Some(&end) {
        return Err("wrong endpoints".into());
    }
    let mut seen = std::collections::HashSet::new();
    for &v in path {
        if !view.contains(v) {
            return Err(format!("{v} is outside the pair"));
        }
        if !seen.insert(v) {
            return Err(format!("{v} repeats"));
        }
    }
    for w in path.windows(2) {
        let (x, y) = match (w[0].side, w[1].side) {
            (Side::X, Side::Y) => (w[0].index, w[1].index),
            (Side::Y, Side::X) => (w[1].index, w[0].index),
            _ => return Err(format!("{} and {} are on the same side", w[0], w[1])),
        };
        if !view.has_edge(x, y) {
            return Err(format!("{}-{} is not an edge", w[0], w[1]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ColoredBipartiteGraph;
    use crate::random::random_bipartite;

    fn params(m: usize) -> PairParams {
        PairParams { m, beta: Ratio::from_integer(1), eps: Ratio::new(1, 200) }
    }

    #[test]
    fn max_l_formula() {
        assert_eq!(params(100).max_l(), 97);
        let p = PairParams { m: 66, beta: Ratio::from_integer(1), eps: Ratio::new(1, 200) };
        assert_eq!(p.max_l(), 64);
    }

    #[test]
    fn complete_pair_paths() {
        let g = ColoredBipartiteGraph::from_matrix(10, 10, 1, vec![1; 100]).unwrap();
        let view = g.view();
        for l in [1, 3, 9] {
            let r = connect_in_pair(&view, Vertex::x(0), Vertex::y(9), l, &params(10), 1).unwrap();
            let path = r.path().expect("complete pair always succeeds");
            assert_eq!(path.len(), 2 * l + 2);
            assert!(r.hypotheses.all_hold());
            assert_eq!(verify_path(&view, path, Vertex::x(0), Vertex::y(9), 2 * l + 1), Ok(()));
        }
        // Reversed orientation.
        let r = connect_in_pair(&view, Vertex::y(2), Vertex::x(5), 4, &params(10), 3).unwrap();
        assert_eq!(r.path().unwrap().len(), 10);
    }

    #[test]
    fn rejections() {
        let g = ColoredBipartiteGraph::from_matrix(4, 4, 1, vec![1; 16]).unwrap();
        let view = g.view();
        assert!(connect_in_pair(&view, Vertex::x(0), Vertex::x(1), 1, &params(4), 0).is_err());
        assert!(connect_in_pair(&view, Vertex::x(0), Vertex::y(1), 0, &params(4), 0).is_err());
        assert!(connect_in_pair(&view, Vertex::x(0), Vertex::y(1), 4, &params(4), 0).is_err());
    }

    #[test]
    fn infeasible_is_failure_not_error() {
        // Two disjoint blocks: no path from block 1 to block 2.
        let mut edges = Vec::new();
        for x in 0..6 {
            for y in 0..6 {
                if (x < 3) == (y < 3) {
                    edges.push((x, y, 1));
                }
            }
        }
        let g = ColoredBipartiteGraph::build(6, 6, 1, &edges).unwrap();
        let r = connect_in_pair(&g.view(), Vertex::x(0), Vertex::y(5), 2, &params(6), 0).unwrap();
        assert!(matches!(r.outcome, PathOutcome::Failure { .. }));
    }

    #[test]
    fn verifier_catches_defects() {
        let g = ColoredBipartiteGraph::from_matrix(3, 3, 1, vec![1, 1, 0, 1, 1, 1, 0, 1, 1]).unwrap();
        let v = g.view();
        let ok = [Vertex::x(0), Vertex::y(0), Vertex::x(1), Vertex::y(2)];
        assert_eq!(verify_path(&v, &ok, Vertex::x(0), Vertex::y(2), 3), Ok(()));
        assert!(verify_path(&v, &ok, Vertex::x(0), Vertex::y(2), 5).is_err());
        let rep = [Vertex::x(0), Vertex::y(0), Vertex::x(0), Vertex::y(1)];
        assert!(verify_path(&v, &rep, Vertex::x(0), Vertex::y(1), 3).is_err());
        let non_edge = [Vertex::x(0), Vertex::y(2), Vertex::x(1), Vertex::y(1)];
        assert!(verify_path(&v, &non_edge, Vertex::x(0), Vertex::y(1), 3).is_err());
    }

    #[test]
    fn random_pair_long_paths() {
        for seed in 0..10 {
            let g = random_bipartite(100, 100, 0.5, seed);
            let view = g.view();
            let (s, e) = (Vertex::x(0), Vertex::y(0));
            let r = connect_in_pair(&view, s, e, 90, &params(100), seed).unwrap();
            assert!(r.path().is_some(), "seed {seed}: {:?}", r.outcome);
        }
    }
}
