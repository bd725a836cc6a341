//! Exact-length cycle search and certificate verification.
//!
//! The search works on a compacted copy of the view in which each side has at
//! most 64 non-isolated vertices, so vertex sets are single `u64` words. A cycle
//! is reported in canonical form: it starts at its smallest X vertex and takes
//! the direction with the smaller first Y vertex. Anchors are tried in
//! ascending order and neighbors in ascending order, so the first cycle found
//! is the lexicographically least certificate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter, Ticker};
use crate::graph::{Color, ColoredBipartiteGraph, GraphView, Side, Vertex};
use crate::{Error, Exec, Result};

/// Largest side (after dropping isolated vertices) the exact search accepts.
pub const EXACT_SIDE_LIMIT: usize = 64;
/// Largest side for which [`circumference`] is offered.
pub const CIRCUMFERENCE_SIDE_LIMIT: usize = 32;

/// A cycle `x_1 y_1 x_2 y_2 ... x_l y_l` (closing edge `y_l x_1`).
///
/// `color == 0` means "any present edge"; it is used for views spanning
/// several colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub color: Color,
    pub vertices: Vec<Vertex>,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleOutcome {
    Found(CycleCertificate),
    Absent,
    /// The budget ran out before the search could decide.
    Unknown { nodes: u64 },
}

impl CycleOutcome {
    pub fn certificate(&self) -> Option<&CycleCertificate> {
        match self {
            CycleOutcome::Found(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, CycleOutcome::Absent)
    }
}

/// Why a certificate was rejected; the first failing check wins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleDefect {
    BadLength { stated: usize, actual: usize },
    TooShort(usize),
    WrongSide { position: usize, vertex: Vertex },
    OutOfRange(Vertex),
    Repeated(Vertex),
    EdgeColor { from: Vertex, to: Vertex, expected: Color, found: Color },
}

impl fmt::Display for CycleDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleDefect::BadLength { stated, actual } => {
                write!(f, "stated length {stated} but {actual} vertices listed")
            }
            CycleDefect::TooShort(n) => write!(f, "cycle of length {n} is shorter than 4"),
            CycleDefect::WrongSide { position, vertex } => {
                write!(f, "vertex {vertex} at position {position} is on the wrong side")
            }
            CycleDefect::OutOfRange(v) => write!(f, "vertex {v} is out of range"),
            CycleDefect::Repeated(v) => write!(f, "vertex {v} repeats"),
            CycleDefect::EdgeColor { from, to, expected, found } => {
                write!(f, "edge {from}-{to} has color {found}, expected {expected}")
            }
        }
    }
}

/// Checks a certificate against `g` without trusting its producer.
pub fn verify_cycle(g: &ColoredBipartiteGraph, cert: &CycleCertificate) -> std::result::Result<(), CycleDefect> {
    let vs = &cert.vertices;
    if cert.length != vs.len() {
        return Err(CycleDefect::BadLength { stated: cert.length, actual: vs.len() });
    }
    if vs.len() < 4 {
        return Err(CycleDefect::TooShort(vs.len()));
    }
    if vs.len() % 2 == 1 {
        return Err(CycleDefect::BadLength { stated: cert.length, actual: vs.len() });
    }
    for (i, &v) in vs.iter().enumerate() {
        let want = if i % 2 == 0 { Side::X } else { Side::Y };
        if v.side != want {
            return Err(CycleDefect::WrongSide { position: i, vertex: v });
        }
        let bound = if v.side == Side::X { g.n1() } else { g.n2() };
        if v.index >= bound {
            return Err(CycleDefect::OutOfRange(v));
        }
    }
    let mut sorted = vs.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(CycleDefect::Repeated(w[0]));
    }
    for i in 0..vs.len() {
        let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
        let (x, y) = if a.side == Side::X { (a.index, b.index) } else { (b.index, a.index) };
        let found = g.color(x, y);
        let ok = if cert.color == 0 { found != 0 } else { found == cert.color };
        if !ok {
            return Err(CycleDefect::EdgeColor { from: a, to: b, expected: cert.color, found });
        }
    }
    Ok(())
}

/// Compacted view: only non-isolated vertices, relabeled in ascending order.
struct Compact {
    xs: Vec<usize>,
    ys: Vec<usize>,
    adj_x: Vec<u64>,
    adj_y: Vec<u64>,
}

impl Compact {
    fn new(view: &GraphView<'_>, limit: usize) -> Result<Self> {
        let xs: Vec<usize> = view.xs().filter(|&x| view.degree(Vertex::x(x)) > 0).collect();
        let ys: Vec<usize> = view.ys().filter(|&y| view.degree(Vertex::y(y)) > 0).collect();
        let size = xs.len().max(ys.len());
        if size > limit {
            return Err(Error::TooLarge { size, limit });
        }
        let mut adj_x = vec![0u64; xs.len()];
        let mut adj_y = vec![0u64; ys.len()];
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                if view.has_edge(x, y) {
                    adj_x[i] |= 1 << j;
                    adj_y[j] |= 1 << i;
                }
            }
        }
        Ok(Compact { xs, ys, adj_x, adj_y })
    }
}

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

enum AnchorResult {
    Found(Vec<usize>),
    Exhausted,
}

/// DFS for a cycle of `half` X and `half` Y vertices whose smallest X vertex is `anchor`.
struct AnchorSearch<'a> {
    c: &'a Compact,
    half: usize,
    anchor: usize,
    core_x: u64,
    core_y: u64,
    path: Vec<usize>,
    used_x: u64,
    used_y: u64,
}

impl<'a> AnchorSearch<'a> {
    fn run(c: &'a Compact, half: usize, anchor: usize, ticker: &mut Ticker<'_>) -> Option<AnchorResult> {
        // 2-core of the subgraph on X vertices >= anchor.
        let mut core_x = low_mask(c.xs.len()) & !low_mask(anchor);
        let mut core_y = low_mask(c.ys.len());
        loop {
            let mut changed = false;
            for x in bits(core_x) {
                if (c.adj_x[x] & core_y).count_ones() < 2 {
                    core_x &= !(1 << x);
                    changed = true;
                }
            }
            for y in bits(core_y) {
                if (c.adj_y[y] & core_x).count_ones() < 2 {
                    core_y &= !(1 << y);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if core_x & (1 << anchor) == 0
            || (core_x.count_ones() as usize) < half
            || (core_y.count_ones() as usize) < half
        {
            return None;
        }
        let mut s = AnchorSearch {
            c,
            half,
            anchor,
            core_x,
            core_y,
            path: vec![anchor],
            used_x: 1 << anchor,
            used_y: 0,
        };
        match s.extend_from_x(anchor, ticker) {
            Step::Found => Some(AnchorResult::Found(s.path)),
            Step::Exhausted => Some(AnchorResult::Exhausted),
            Step::Done => None,
        }
    }

    /// Is the anchor still reachable from `from` (a Y vertex when `from_y`)
    /// inside the unused core within `budget` edges, with enough unused
    /// vertices in that region to complete the cycle?
    fn feasible(&self, from: usize, from_y: bool, edges_left: usize, need_x: usize, need_y: usize) -> bool {
        let free_x = self.core_x & !self.used_x;
        let free_y = self.core_y & !self.used_y;
        let anchor_bit = 1u64 << self.anchor;
        let (mut fx, mut fy) = if from_y { (0u64, 1u64 << from) } else { (1u64 << from, 0u64) };
        let (mut seen_x, mut seen_y) = (fx, fy);
        let mut dist_to_anchor = None;
        let mut depth = 0;
        while fx != 0 || fy != 0 {
            let mut nx = 0u64;
            let mut ny = 0u64;
            for y in bits(fy) {
                nx |= self.c.adj_y[y];
            }
            for x in bits(fx) {
                ny |= self.c.adj_x[x];
            }
            depth += 1;
            if dist_to_anchor.is_none() && nx & anchor_bit != 0 {
                dist_to_anchor = Some(depth);
            }
            nx &= free_x & !seen_x;
            ny &= free_y & !seen_y;
            seen_x |= nx;
            seen_y |= ny;
            fx = nx;
            fy = ny;
        }
        let Some(d) = dist_to_anchor else { return false };
        if d > edges_left {
            return false;
        }
        let reach_x = (seen_x & free_x).count_ones() as usize;
        let reach_y = (seen_y & free_y).count_ones() as usize;
        reach_x >= need_x && reach_y >= need_y
    }

    fn extend_from_x(&mut self, x: usize, ticker: &mut Ticker<'_>) -> Step {
        // Path currently ends at X vertex `x`; choose the next Y vertex.
        let placed_y = self.used_y.count_ones() as usize;
        let mut cand = self.c.adj_x[x] & self.core_y & !self.used_y;
        let closing = placed_y + 1 == self.half;
        if closing {
            // Last Y vertex: adjacent to the anchor and larger than y_1 (reflection).
            cand &= self.c.adj_x[self.anchor];
            if self.path.len() > 1 {
                cand &= !low_mask(self.path[1] + 1);
            }
        }
        for y in bits(cand) {
            if !ticker.tick() {
                return Step::Exhausted;
            }
            if closing {
                self.path.push(y);
                return Step::Found;
            }
            self.used_y |= 1 << y;
            let need_x = self.half - self.used_x.count_ones() as usize;
            let need_y = self.half - self.used_y.count_ones() as usize;
            let edges_left = 2 * self.half - self.path.len();
            if self.feasible(y, true, edges_left, need_x, need_y) && self.closable() {
                self.path.push(y);
                match self.extend_from_y(y, ticker) {
                    Step::Done => {}
                    other => return other,
                }
                self.path.pop();
            }
            self.used_y &= !(1 << y);
        }
        Step::Done
    }

    /// The anchor must keep an unused neighbor above y_1 for the closing edge.
    fn closable(&self) -> bool {
        let mut m = self.c.adj_x[self.anchor] & self.core_y & !self.used_y;
        if self.path.len() > 1 {
            m &= !low_mask(self.path[1] + 1);
        } else {
            // y_1 is being placed right now; it is the lowest bit of used_y.
            let y1 = self.used_y.trailing_zeros() as usize;
            m &= !low_mask(y1 + 1);
        }
        m != 0
    }

    fn extend_from_y(&mut self, y: usize, ticker: &mut Ticker<'_>) -> Step {
        let cand = self.c.adj_y[y] & self.core_x & !self.used_x;
        for x in bits(cand) {
            if !ticker.tick() {
                return Step::Exhausted;
            }
            self.used_x |= 1 << x;
            let need_x = self.half - self.used_x.count_ones() as usize;
            let need_y = self.half - self.used_y.count_ones() as usize;
            let edges_left = 2 * self.half - self.path.len();
            if self.feasible(x, false, edges_left, need_x, need_y) && self.closable() {
                self.path.push(x);
                match self.extend_from_x(x, ticker) {
                    Step::Done => {}
                    other => return other,
                }
                self.path.pop();
            }
            self.used_x &= !(1 << x);
        }
        Step::Done
    }
}

enum Step {
    Found,
    Exhausted,
    Done,
}

/// Options for [`find_cycle_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    pub budget: Budget,
    pub exec: Exec,
}

/// Finds a cycle of exactly `target` edges in the view (unbounded budget).
pub fn find_cycle_of_length(view: &GraphView<'_>, target: usize) -> Result<CycleOutcome> {
    find_cycle_with(view, target, SearchOptions::default())
}

/// Finds a cycle of exactly `target` edges, or proves there is none.
///
/// `Absent` is only returned after an exhaustive search; a spent budget yields
/// `Unknown`. Errors on an odd or out-of-range target and on views with more
/// than [`EXACT_SIDE_LIMIT`] non-isolated vertices on a side.
pub fn find_cycle_with(view: &GraphView<'_>, target: usize, opts: SearchOptions) -> Result<CycleOutcome> {
    let nx = view.x_filter().count_ones(..);
    let ny = view.y_filter().count_ones(..);
    if target % 2 == 1 || target < 4 || target > 2 * nx.min(ny) {
        return Err(Error::invalid(format!(
            "cycle length {target} must be even and within [4, {}]",
            2 * nx.min(ny)
        )));
    }
    let compact = Compact::new(view, EXACT_SIDE_LIMIT)?;
    let color = view.colors().as_single().unwrap_or(0);
    let meter = Meter::new(opts.budget);
    let outcome = search_compact(&compact, target / 2, &meter, opts.exec);
    Ok(match outcome {
        Some(AnchorResult::Found(path)) => {
            let vertices = path
                .iter()
                .enumerate()
                .map(|(i, &v)| if i % 2 == 0 { Vertex::x(compact.xs[v]) } else { Vertex::y(compact.ys[v]) })
                .collect();
            CycleOutcome::Found(CycleCertificate { color, vertices, length: target })
        }
        Some(AnchorResult::Exhausted) => CycleOutcome::Unknown { nodes: meter.nodes() },
        None => CycleOutcome::Absent,
    })
}

fn search_compact(c: &Compact, half: usize, meter: &Meter, exec: Exec) -> Option<AnchorResult> {
    if c.xs.len() < half || c.ys.len() < half {
        return None;
    }
    let anchors: Vec<usize> = (0..=c.xs.len() - half).collect();
    exec.find_map_first(&anchors, |&a| {
        let mut ticker = Ticker::new(meter);
        AnchorSearch::run(c, half, a, &mut ticker)
    })
}

/// Length of a longest cycle (0 for forests). Sides of at most
/// [`CIRCUMFERENCE_SIDE_LIMIT`] non-isolated vertices.
pub fn circumference(view: &GraphView<'_>) -> Result<usize> {
    circumference_with(view, Exec::default())
}

pub fn circumference_with(view: &GraphView<'_>, exec: Exec) -> Result<usize> {
    let compact = Compact::new(view, CIRCUMFERENCE_SIDE_LIMIT)?;
    let meter = Meter::new(Budget::unlimited());
    let max_half = compact.xs.len().min(compact.ys.len());
    for half in (2..=max_half).rev() {
        if let Some(AnchorResult::Found(_)) = search_compact(&compact, half, &meter, exec) {
            return Ok(2 * half);
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{h_tilde, lower_bound_coloring, BLUE, RED};
    use proptest::prelude::*;

    fn complete(n1: usize, n2: usize) -> ColoredBipartiteGraph {
        ColoredBipartiteGraph::from_matrix(n1, n2, 1, vec![1; n1 * n2]).unwrap()
    }

    /// Unpruned DFS over all simple paths; shares nothing with the search above.
    fn naive_has_cycle(g: &ColoredBipartiteGraph, color: Color, target: usize) -> bool {
        fn walk(g: &ColoredBipartiteGraph, c: Color, path: &mut Vec<Vertex>, target: usize) -> bool {
            let last = *path.last().unwrap();
            if path.len() == target {
                let first = path[0];
                return g.color(first.index, last.index) == c;
            }
            let next: Vec<Vertex> = match last.side {
                Side::X => (0..g.n2()).filter(|&y| g.color(last.index, y) == c).map(Vertex::y).collect(),
                Side::Y => (0..g.n1()).filter(|&x| g.color(x, last.index) == c).map(Vertex::x).collect(),
            };
            for v in next {
                if !path.contains(&v) {
                    path.push(v);
                    if walk(g, c, path, target) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        (0..g.n1()).any(|x| walk(g, color, &mut vec![Vertex::x(x)], target))
    }

    #[test]
    fn k22_certificate() {
        let g = complete(2, 2);
        let out = find_cycle_of_length(&g.color_view(1), 4).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.vertices, vec![Vertex::x(0), Vertex::y(0), Vertex::x(1), Vertex::y(1)]);
        assert_eq!(verify_cycle(&g, cert), Ok(()));
    }

    #[test]
    fn h_tilde_one_has_no_monochromatic_c4() {
        let g = h_tilde(1).unwrap();
        for c in [RED, BLUE] {
            assert!(find_cycle_of_length(&g.color_view(c), 4).unwrap().is_absent());
        }
    }

    #[test]
    fn lower_bound_four_two() {
        let g = lower_bound_coloring(&[4, 2]).unwrap();
        let red = g.color_view(1);
        assert!(find_cycle_of_length(&red, 8).unwrap().is_absent());
        let six = find_cycle_of_length(&red, 6).unwrap();
        assert_eq!(verify_cycle(&g, six.certificate().unwrap()), Ok(()));
        assert!(find_cycle_of_length(&g.color_view(2), 4).unwrap().is_absent());
    }

    #[test]
    fn rejects_bad_targets() {
        let g = complete(3, 3);
        assert!(find_cycle_of_length(&g.view(), 5).is_err());
        assert!(find_cycle_of_length(&g.view(), 2).is_err());
        assert!(find_cycle_of_length(&g.view(), 8).is_err());
    }

    #[test]
    fn verify_reports_defects() {
        let g = ColoredBipartiteGraph::from_rows(2, &[vec![1, 1], vec![1, 2]]).unwrap();
        let good = CycleCertificate { color: 0, vertices: vec![Vertex::x(0), Vertex::y(0), Vertex::x(1), Vertex::y(1)], length: 4 };
        assert_eq!(verify_cycle(&g, &good), Ok(()));
        let repeated = CycleCertificate {
            color: 1,
            vertices: vec![Vertex::x(0), Vertex::y(0), Vertex::x(0), Vertex::y(1)],
            length: 4,
        };
        assert_eq!(verify_cycle(&g, &repeated), Err(CycleDefect::Repeated(Vertex::x(0))));
        let wrong_color = CycleCertificate { color: 1, ..good.clone() };
        assert!(matches!(verify_cycle(&g, &wrong_color), Err(CycleDefect::EdgeColor { found: 2, .. })));
        let bad_len = CycleCertificate { length: 6, ..good.clone() };
        assert!(matches!(verify_cycle(&g, &bad_len), Err(CycleDefect::BadLength { .. })));
        let sides = CycleCertificate { color: 0, vertices: vec![Vertex::y(0), Vertex::x(0), Vertex::y(1), Vertex::x(1)], length: 4 };
        assert!(matches!(verify_cycle(&g, &sides), Err(CycleDefect::WrongSide { position: 0, .. })));
    }

    #[test]
    fn circumference_examples() {
        assert_eq!(circumference(&complete(3, 3).view()).unwrap(), 6);
        assert_eq!(circumference(&complete(1, 1).view()).unwrap(), 0);
        assert_eq!(circumference(&complete(4, 3).view()).unwrap(), 6);
        assert!(circumference(&complete(33, 2).view()).is_err());
    }

    #[test]
    fn budget_yields_unknown() {
        let g = h_tilde(3).unwrap();
        let opts = SearchOptions { budget: Budget::nodes(5), exec: Exec::Sequential };
        let out = find_cycle_with(&g.color_view(BLUE), 24, opts).unwrap();
        assert!(matches!(out, CycleOutcome::Unknown { .. }));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = crate::random::random_coloring(12, 12, 2, 5);
        for target in [4, 8, 12, 16, 20, 24] {
            let a = find_cycle_with(&g.color_view(1), target, SearchOptions { exec: Exec::Sequential, ..Default::default() });
            let b = find_cycle_with(&g.color_view(1), target, SearchOptions { exec: Exec::Parallel, ..Default::default() });
            assert_eq!(a.unwrap(), b.unwrap());
        }
    }

    fn arb_sparse() -> impl Strategy<Value = ColoredBipartiteGraph> {
        (2usize..=7, 2usize..=7).prop_flat_map(|(n1, n2)| {
            proptest::collection::vec(prop_oneof![2 => Just(0u8), 1 => Just(1u8)], n1 * n2)
                .prop_map(move |m| ColoredBipartiteGraph::from_matrix(n1, n2, 1, m).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn agrees_with_naive_enumeration(g in arb_sparse()) {
            let view = g.color_view(1);
            for target in (4..=2 * g.n1().min(g.n2())).step_by(2) {
                let out = find_cycle_of_length(&view, target).unwrap();
                prop_assert_eq!(out.certificate().is_some(), naive_has_cycle(&g, 1, target), "target {}", target);
                if let Some(cert) = out.certificate() {
                    prop_assert_eq!(verify_cycle(&g, cert), Ok(()));
                }
            }
        }
    }

    #[test]
    fn agrees_with_naive_on_twelve_per_side() {
        for seed in 0..6 {
            let g = crate::random::random_bipartite(12, 12, 0.22, seed);
            let view = g.color_view(1);
            for target in (4..=24).step_by(2) {
                let ours = find_cycle_of_length(&view, target).unwrap();
                assert_eq!(ours.certificate().is_some(), naive_has_cycle(&g, 1, target), "seed {seed} target {target}");
            }
        }
    }
}
