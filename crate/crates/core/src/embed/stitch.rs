//! Turning a closed walk over the reduced graph into a cycle of exact length.
//!
//! One anchor vertex is pinned in the cluster of every walk position. An
//! unmatched step becomes the single edge between consecutive anchors; a
//! matched step `j` becomes a path with `2 l_j + 1` edges inside its cluster
//! pair. The cycle length is therefore `t + sum 2 l_j`.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::path::{connect_in_pair, PairParams, PathReport};
use super::walk::WalkPlan;
use crate::cycle::{verify_cycle, CycleCertificate};
use crate::graph::{ColoredBipartiteGraph, GraphView, Side, Vertex};
use crate::regularity::{ClusterPartition, Ratio, ReducedColoredGraph};
use crate::Exec;

/// Anchor search nodes before giving up.
const ANCHOR_BUDGET: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum StitchError {
    #[error("invalid input: {reason}")]
    Invalid { reason: String },
    #[error("target {target} outside the stitchable range [{lo}, {hi}]")]
    Infeasible { target: usize, lo: usize, hi: usize },
    #[error("anchor selection failed: {reason}")]
    Anchors { reason: String },
    #[error("embedding failed at step {step}: {reason}")]
    Embedding { step: usize, reason: String },
    #[error("assembled cycle does not verify: {reason}")]
    Verification { reason: String },
}

/// Split of the target length over the matched steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StitchPlan {
    /// `l_j` per matched step, in walk order.
    pub lengths: Vec<usize>,
    /// Upper bound used for each `l_j`.
    pub caps: Vec<usize>,
    pub t: usize,
    pub target: usize,
}

impl StitchPlan {
    /// `t + sum 2 l_j`.
    pub fn total(&self) -> usize {
        self.t + 2 * self.lengths.iter().sum::<usize>()
    }

    /// Longest stitchable length with these caps.
    pub fn max_length(&self) -> usize {
        self.t + 2 * self.caps.iter().sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StitchOptions {
    pub beta: Ratio,
    pub eps: Ratio,
    pub seed: u64,
    pub exec: Exec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StitchResult {
    pub plan: StitchPlan,
    /// One vertex per walk position.
    pub anchors: Vec<Vertex>,
    pub paths: Vec<PathReport>,
    pub certificate: CycleCertificate,
}

/// Greedy largest-first split of `target - t` into `sum 2 l_j` with
/// `1 <= l_j <= caps[j]`; the remainder lands on the later steps.
pub fn split_lengths(target: usize, t: usize, caps: &[usize]) -> Result<Vec<usize>, StitchError> {
    let a = caps.len();
    let lo = t + 2 * a;
    let hi = t + 2 * caps.iter().sum::<usize>();
    if target % 2 == 1 || target < lo || target > hi || caps.contains(&0) {
        return Err(StitchError::Infeasible { target, lo, hi });
    }
    let mut rest = (target - t) / 2;
    let mut out = Vec::with_capacity(a);
    for (j, &cap) in caps.iter().enumerate() {
        let later = a - j - 1;
        let l = cap.min(rest - later);
        out.push(l);
        rest -= l;
    }
    debug_assert_eq!(rest, 0);
    Ok(out)
}

fn cluster_of(p: &ClusterPartition, v: Vertex) -> &[usize] {
    match v.side {
        Side::X => &p.x_clusters[v.index],
        Side::Y => &p.y_clusters[v.index],
    }
}

/// Degree of `v` (a graph vertex) into a cluster of the opposite side.
fn degree_into(view: &GraphView<'_>, v: Vertex, mask: &FixedBitSet) -> usize {
    view.neighbors(v).iter().filter(|w| mask.contains(w.index)).count()
}

struct AnchorSearch<'a> {
    view: &'a GraphView<'a>,
    plan: &'a WalkPlan,
    candidates: Vec<Vec<Vertex>>,
    chosen: Vec<Vertex>,
    used: std::collections::HashSet<Vertex>,
    nodes: u64,
}

impl AnchorSearch<'_> {
    fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        let (x, y) = if a.side == Side::X { (a.index, b.index) } else { (b.index, a.index) };
        self.view.has_edge(x, y)
    }

    fn run(&mut self, s: usize) -> bool {
        let t = self.plan.t;
        if s == t {
            return true;
        }
        for i in 0..self.candidates[s].len() {
            let v = self.candidates[s][i];
            self.nodes += 1;
            if self.nodes > ANCHOR_BUDGET {
                return false;
            }
            if self.used.contains(&v) {
                continue;
            }
            if s > 0 && !self.plan.is_matched(s - 1) && !self.adjacent(self.chosen[s - 1], v) {
                continue;
            }
            if s == t - 1 && !self.plan.is_matched(t - 1) && !self.adjacent(v, self.chosen[0]) {
                continue;
            }
            self.used.insert(v);
            self.chosen.push(v);
            if self.run(s + 1) {
                return true;
            }
            self.chosen.pop();
            self.used.remove(&v);
        }
        false
    }
}

/// Embeds a cycle of exactly `target` edges in color `plan.color` following
/// the walk, and verifies it.
pub fn stitch_long_cycle(
    g: &ColoredBipartiteGraph,
    p: &ClusterPartition,
    h: &ReducedColoredGraph,
    plan: &WalkPlan,
    target: usize,
    opts: &StitchOptions,
) -> Result<StitchResult, StitchError> {
    let invalid = |reason: String| StitchError::Invalid { reason };
    p.validate(g.n1(), g.n2()).map_err(|e| invalid(e.to_string()))?;
    if p.k() != h.k {
        return Err(invalid(format!("partition has {} clusters, reduced graph {}", p.k(), h.k)));
    }
    let t = plan.t;
    if t == 0 || t % 2 == 1 || plan.walk.len() != t {
        return Err(invalid(format!("walk length {t} must be positive and even")));
    }
    if target % 2 == 1 {
        return Err(StitchError::Infeasible { target, lo: t + 2 * plan.matched.len(), hi: 0 });
    }
    for s in 0..t {
        let (a, b) = (plan.walk[s], plan.walk[(s + 1) % t]);
        let (x, y) = if a.side == Side::X { (a.index, b.index) } else { (b.index, a.index) };
        if a.side == b.side || h.color(x, y) != plan.color {
            return Err(invalid(format!("walk step {s} is not a reduced edge of color {}", plan.color)));
        }
    }
    let m = p.m();
    let view = g.color_view(plan.color);
    let params = PairParams { m, beta: opts.beta, eps: opts.eps };
    let floor = params.degree_floor();

    // Anchors: degree floor into both neighboring clusters.
    let masks: Vec<FixedBitSet> = plan
        .walk
        .iter()
        .map(|&c| {
            let n = if c.side == Side::X { g.n1() } else { g.n2() };
            let mut mask = FixedBitSet::with_capacity(n);
            cluster_of(p, c).iter().for_each(|&v| mask.insert(v));
            mask
        })
        .collect();
    let candidates: Vec<Vec<Vertex>> = (0..t)
        .map(|s| {
            let c = plan.walk[s];
            let prev = &masks[(s + t - 1) % t];
            let next = &masks[(s + 1) % t];
            let mk = if c.side == Side::X { Vertex::x } else { Vertex::y };
            cluster_of(p, c)
                .iter()
                .map(|&i| mk(i))
                .filter(|&v| {
                    Ratio::from_integer(degree_into(&view, v, prev) as i64) >= floor
                        && Ratio::from_integer(degree_into(&view, v, next) as i64) >= floor
                })
                .collect()
        })
        .collect();
    if let Some(s) = candidates.iter().position(Vec::is_empty) {
        return Err(StitchError::Anchors { reason: format!("no vertex of cluster {} meets the degree floor", plan.walk[s]) });
    }
    let mut search = AnchorSearch { view: &view, plan, candidates, chosen: Vec::new(), used: Default::default(), nodes: 0 };
    if !search.run(0) {
        return Err(StitchError::Anchors { reason: format!("no consistent anchor sequence within {} nodes", search.nodes.min(ANCHOR_BUDGET)) });
    }
    let anchors = search.chosen;

    // Caps and split.
    let pinned_in = |c: Vertex| plan.walk.iter().filter(|&&w| w == c).count();
    let max_l = params.max_l();
    let caps: Vec<usize> = plan
        .matched
        .iter()
        .map(|&s| {
            let (pc, qc) = (plan.walk[s], plan.walk[(s + 1) % t]);
            let free_p = m - (pinned_in(pc) - 1);
            let free_q = m - (pinned_in(qc) - 1);
            max_l.min(free_p - 1).min(free_q - 1)
        })
        .collect();
    let lengths = split_lengths(target, t, &caps)?;
    let stitch_plan = StitchPlan { lengths, caps, t, target };

    // Per matched step: the pair minus every other anchor.
    let jobs: Vec<(usize, usize)> = plan.matched.iter().copied().zip(stitch_plan.lengths.iter().copied()).collect();
    let reports = opts.exec.map(&jobs, |&(s, l)| {
        let s2 = (s + 1) % t;
        let (pc, qc) = (plan.walk[s], plan.walk[s2]);
        let keep = |c: Vertex, own: Vertex| -> Vec<Vertex> {
            let mk = if c.side == Side::X { Vertex::x } else { Vertex::y };
            cluster_of(p, c)
                .iter()
                .map(|&i| mk(i))
                .filter(|v| *v == own || !anchors.contains(v))
                .collect()
        };
        let mut verts = keep(pc, anchors[s]);
        verts.extend(keep(qc, anchors[s2]));
        let pair = view.restrict_to(&verts);
        let seed = opts.seed ^ (s as u64).wrapping_mul(0xD134_2543_DE82_EF95);
        connect_in_pair(&pair, anchors[s], anchors[s2], l, &params, seed)
    });
    let mut paths = Vec::with_capacity(reports.len());
    for (&(s, _), r) in jobs.iter().zip(reports) {
        let r = r.map_err(|e| StitchError::Embedding { step: s, reason: e.to_string() })?;
        if r.path().is_none() {
            let reason = match &r.outcome {
                super::path::PathOutcome::Failure { reason } => reason.clone(),
                _ => unreachable!(),
            };
            return Err(StitchError::Embedding { step: s, reason });
        }
        paths.push(r);
    }

    // Assemble.
    let mut cycle = Vec::with_capacity(target);
    let mut next_path = paths.iter();
    for (s, &anchor) in anchors.iter().enumerate().take(t) {
        if plan.is_matched(s) {
            let path = next_path.next().unwrap().path().unwrap();
            cycle.extend_from_slice(&path[..path.len() - 1]);
        } else {
            cycle.push(anchor);
        }
    }
    if let Some(first_x) = cycle.iter().position(|v| v.side == Side::X) {
        cycle.rotate_left(first_x);
    }
    let certificate = CycleCertificate { color: plan.color, length: cycle.len(), vertices: cycle };
    if certificate.length != target {
        return Err(StitchError::Verification { reason: format!("assembled {} edges, wanted {target}", certificate.length) });
    }
    verify_cycle(g, &certificate).map_err(|d| StitchError::Verification { reason: d.to_string() })?;
    Ok(StitchResult { plan: stitch_plan, anchors, paths, certificate })
}
