//! Exhaustive decision of small bipartite Ramsey statements for even cycles.
//!
//! The search fills the `N x N` color matrix cell by cell in row-major order.
//! Every assignment is checked only for forbidden cycles through the new edge,
//! and partial matrices that are not lex-leaders for the row transpositions,
//! column transpositions and swaps of equal-length colors are cut off. Those
//! constraints share the row-major order, so each orbit keeps its lex-least
//! member and pruning never hides a good coloring.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::budget::{Meter, Ticker};
use crate::graph::{Color, ColoredBipartiteGraph};
use crate::{Budget, Error, Exec, Result};

/// Largest side size accepted by the search (one `u64` word per row).
pub const MAX_SIDE: usize = 16;

/// Subtrees handed to workers when the search fans out.
const FRONTIER_TARGET: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RamseyOutcome {
    /// Every coloring of `K_{N,N}` contains a forbidden cycle.
    AllColoringsHit,
    /// A coloring avoiding every forbidden cycle; the lex-least one found.
    GoodColoring { graph: ColoredBipartiteGraph },
    BudgetExhausted { checkpoint: Checkpoint },
}

/// Resumable search state: the unexplored subtrees in exploration order, each
/// given by its row-major prefix of colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub lengths: Vec<usize>,
    pub nodes: u64,
    pub pending: Vec<Vec<Color>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyVerdict {
    #[serde(rename = "N")]
    pub n: usize,
    pub lengths: Vec<usize>,
    #[serde(flatten)]
    pub outcome: RamseyOutcome,
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl RamseyVerdict {
    pub fn good_coloring(&self) -> Option<&ColoredBipartiteGraph> {
        match &self.outcome {
            RamseyOutcome::GoodColoring { graph } => Some(graph),
            _ => None,
        }
    }

    pub fn all_hit(&self) -> bool {
        self.outcome == RamseyOutcome::AllColoringsHit
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RamseyOptions {
    pub budget: Budget,
    pub exec: Exec,
    /// Record wall time in the verdict.
    pub timing: bool,
}

/// Decides whether every coloring of `K_{N,N}` with colors `1..=r` has a
/// color-`i` cycle of length `lengths[i-1]` for some `i`.
pub fn decide_arrowing(n: usize, lengths: &[usize], budget: Budget) -> Result<RamseyVerdict> {
    decide_arrowing_with(n, lengths, &RamseyOptions { budget, ..RamseyOptions::default() }, None)
}

pub fn decide_arrowing_with(n: usize, lengths: &[usize], opts: &RamseyOptions, resume: Option<&Checkpoint>) -> Result<RamseyVerdict> {
    validate(n, lengths)?;
    let start = Instant::now();
    let problem = Problem::new(n, lengths);
    let (mut frontier, prior) = match resume {
        Some(cp) => {
            if cp.n != n || cp.lengths != lengths {
                return Err(Error::invalid("checkpoint belongs to a different instance"));
            }
            if let Some(p) = cp.pending.iter().find(|p| p.len() > n * n || p.iter().any(|&c| c == 0 || c as usize > lengths.len())) {
                return Err(Error::invalid(format!("malformed checkpoint prefix {p:?}")));
            }
            (cp.pending.clone(), cp.nodes)
        }
        None => (vec![Vec::new()], 0),
    };
    let meter = Meter::new(opts.budget);

    // Breadth-first expansion keeps the frontier in lex order.
    {
        let mut ticker = Ticker::new(&meter);
        while frontier.len() < FRONTIER_TARGET && frontier.iter().any(|p| p.len() < n * n) {
            let mut next = Vec::with_capacity(frontier.len() * lengths.len());
            let mut out_of_budget = false;
            for (i, p) in frontier.iter().enumerate() {
                if out_of_budget {
                    next.extend(frontier[i..].iter().cloned());
                    break;
                }
                if p.len() == n * n {
                    next.push(p.clone());
                    continue;
                }
                if !ticker.tick() {
                    out_of_budget = true;
                    next.push(p.clone());
                    continue;
                }
                next.extend(problem.children(p));
            }
            frontier = next;
            if out_of_budget {
                break;
            }
        }
    }

    let found_at = AtomicUsize::new(usize::MAX);
    let indexed: Vec<(usize, &Vec<Color>)> = frontier.iter().enumerate().collect();
    let results = opts.exec.map(&indexed, |&(i, prefix)| {
        if found_at.load(Ordering::Relaxed) < i {
            return Subtree::Skipped;
        }
        let res = problem.explore(prefix, &meter);
        if matches!(res, Subtree::Found(_)) {
            found_at.fetch_min(i, Ordering::Relaxed);
        }
        res
    });

    let nodes = prior + meter.nodes();
    let mut pending = Vec::new();
    let mut outcome = None;
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Subtree::Found(colors) => {
                let graph = ColoredBipartiteGraph::from_matrix(n, n, lengths.len(), colors)?;
                outcome = Some(RamseyOutcome::GoodColoring { graph });
                break;
            }
            Subtree::Closed => {}
            Subtree::Exhausted(rest) => pending.extend(rest),
            Subtree::Skipped => pending.push(frontier[i].clone()),
        }
    }
    let outcome = match outcome {
        Some(o) => o,
        None if pending.is_empty() => RamseyOutcome::AllColoringsHit,
        None => RamseyOutcome::BudgetExhausted { checkpoint: Checkpoint { n, lengths: lengths.to_vec(), nodes, pending } },
    };
    let millis = opts.timing.then(|| start.elapsed().as_millis() as u64);
    Ok(RamseyVerdict { n, lengths: lengths.to_vec(), outcome, nodes, millis })
}

fn validate(n: usize, lengths: &[usize]) -> Result<()> {
    if lengths.is_empty() || lengths.len() > 3 {
        return Err(Error::invalid(format!("{} colors requested; supported are 1 to 3", lengths.len())));
    }
    if let Some(&l) = lengths.iter().find(|&&l| l < 4 || l % 2 == 1) {
        return Err(Error::invalid(format!("cycle length {l} must be even and at least 4")));
    }
    if n == 0 || n > MAX_SIDE {
        return Err(Error::invalid(format!("side size {n} outside [1, {MAX_SIDE}]")));
    }
    Ok(())
}

/// `sum n_i - r + 1` for cycle lengths `2 n_i`: below this a good coloring
/// always exists.
pub fn lower_bound(lengths: &[usize]) -> usize {
    let s: usize = lengths.iter().map(|l| l / 2).sum();
    (s + 1).saturating_sub(lengths.len()).max(1)
}

enum Subtree {
    Found(Vec<Color>),
    Closed,
    Exhausted(Vec<Vec<Color>>),
    Skipped,
}

struct Problem {
    n: usize,
    lengths: Vec<usize>,
    /// `(a, b)` with `a < b` and equal lengths.
    swaps: Vec<(Color, Color)>,
}

/// Per-color adjacency of a partial matrix.
struct Masks {
    rows: Vec<u64>,
    cols: Vec<u64>,
    n: usize,
}

impl Masks {
    fn build(n: usize, r: usize, prefix: &[Color]) -> Self {
        let mut m = Masks { rows: vec![0; r * n], cols: vec![0; r * n], n };
        for (cell, &c) in prefix.iter().enumerate() {
            m.set(cell / n, cell % n, c);
        }
        m
    }

    fn set(&mut self, x: usize, y: usize, c: Color) {
        let k = (c as usize - 1) * self.n;
        self.rows[k + x] |= 1 << y;
        self.cols[k + y] |= 1 << x;
    }

    fn unset(&mut self, x: usize, y: usize, c: Color) {
        let k = (c as usize - 1) * self.n;
        self.rows[k + x] &= !(1 << y);
        self.cols[k + y] &= !(1 << x);
    }

    /// Is there a color-`c` cycle with `len` edges through the edge `xy`?
    fn cycle_through(&self, x: usize, y: usize, c: Color, len: usize) -> bool {
        let k = (c as usize - 1) * self.n;
        // A path y = v_0, x_1, y_1, ..., x_{h}, ... ending at x with len - 1 edges.
        let rows = &self.rows[k..k + self.n];
        let cols = &self.cols[k..k + self.n];
        fn from_y(rows: &[u64], cols: &[u64], y: usize, target: usize, left: usize, vx: u64, vy: u64) -> bool {
            // Step from Y vertex `y` to an X vertex; `left` edges remain.
            if left == 1 {
                return cols[y] >> target & 1 == 1;
            }
            let mut cand = cols[y] & !vx & !(1 << target);
            while cand != 0 {
                let x = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                let mut ys = rows[x] & !vy;
                while ys != 0 {
                    let y2 = ys.trailing_zeros() as usize;
                    ys &= ys - 1;
                    // Cheap cutoff: the last Y vertex must see the target.
                    if left == 3 && cols[y2] >> target & 1 == 0 {
                        continue;
                    }
                    if from_y(rows, cols, y2, target, left - 2, vx | 1 << x, vy | 1 << y2) {
                        return true;
                    }
                }
            }
            false
        }
        if len > 2 * self.n {
            return false;
        }
        from_y(rows, cols, y, x, len - 1, 1 << x, 1 << y)
    }
}

impl Problem {
    fn new(n: usize, lengths: &[usize]) -> Self {
        let r = lengths.len();
        let mut swaps = Vec::new();
        for a in 0..r {
            for b in a + 1..r {
                if lengths[a] == lengths[b] {
                    swaps.push((a as Color + 1, b as Color + 1));
                }
            }
        }
        Problem { n, lengths: lengths.to_vec(), swaps }
    }

    fn r(&self) -> usize {
        self.lengths.len()
    }

    /// Lex-leader test for assigning `c` at the next cell of `prefix`.
    fn symmetric_ok(&self, prefix: &[Color], c: Color) -> bool {
        let n = self.n;
        let cell = prefix.len();
        let (i, j) = (cell / n, cell % n);
        let at = |x: usize, y: usize| prefix[x * n + y];
        // Rows non-decreasing.
        if i > 0 && (0..j).all(|y| at(i, y) == at(i - 1, y)) && c < at(i - 1, j) {
            return false;
        }
        // Columns non-decreasing, read top-down.
        if j > 0 && (0..i).all(|x| at(x, j) == at(x, j - 1)) && c < at(i, j - 1) {
            return false;
        }
        // Among equal-length colors the smaller appears first.
        self.swaps.iter().all(|&(a, b)| c != b || prefix.iter().any(|&p| p == a || p == b))
    }

    fn children(&self, prefix: &[Color]) -> Vec<Vec<Color>> {
        let mut masks = Masks::build(self.n, self.r(), prefix);
        self.valid_colors(prefix, &mut masks)
            .into_iter()
            .map(|c| {
                let mut p = prefix.to_vec();
                p.push(c);
                p
            })
            .collect()
    }

    /// Colors that may go in the next cell, ascending.
    fn valid_colors(&self, prefix: &[Color], masks: &mut Masks) -> Vec<Color> {
        let cell = prefix.len();
        let (x, y) = (cell / self.n, cell % self.n);
        (1..=self.r() as Color)
            .filter(|&c| {
                if !self.symmetric_ok(prefix, c) {
                    return false;
                }
                masks.set(x, y, c);
                let hit = masks.cycle_through(x, y, c, self.lengths[c as usize - 1]);
                masks.unset(x, y, c);
                !hit
            })
            .collect()
    }

    /// Depth-first search of one subtree, ascending colors first.
    fn explore(&self, root: &[Color], meter: &Meter) -> Subtree {
        let total = self.n * self.n;
        let base = root.len();
        let mut ticker = Ticker::new(meter);
        let mut prefix = root.to_vec();
        let mut masks = Masks::build(self.n, self.r(), &prefix);
        // stack[d] holds the untried colors of cell base + d, last one next.
        let mut stack: Vec<Vec<Color>> = Vec::new();
        loop {
            if prefix.len() == total {
                return Subtree::Found(prefix);
            }
            if !ticker.tick() {
                let mut rest = vec![prefix.clone()];
                for (d, alts) in stack.iter().enumerate().rev() {
                    for &c in alts.iter().rev() {
                        let mut q = prefix[..base + d].to_vec();
                        q.push(c);
                        rest.push(q);
                    }
                }
                return Subtree::Exhausted(rest);
            }
            let mut alts = self.valid_colors(&prefix, &mut masks);
            alts.reverse();
            stack.push(alts);
            loop {
                let level = stack.last_mut().expect("stack is non-empty here");
                if let Some(c) = level.pop() {
                    let cell = prefix.len();
                    masks.set(cell / self.n, cell % self.n, c);
                    prefix.push(c);
                    break;
                }
                stack.pop();
                if stack.is_empty() {
                    return Subtree::Closed;
                }
                let cell = prefix.len() - 1;
                let old = prefix.pop().expect("assigned cell");
                masks.unset(cell / self.n, cell % self.n, old);
            }
        }
    }
}

/// Result of scanning `N` upward from the lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyValue {
    pub lengths: Vec<usize>,
    /// The Ramsey number when the scan closed.
    pub value: Option<usize>,
    /// The number is at least `lower` and, when known, at most `upper`.
    pub lower: usize,
    pub upper: Option<usize>,
    /// Good coloring at `lower - 1`.
    pub certificate: Option<ColoredBipartiteGraph>,
    pub verdicts: Vec<RamseyVerdict>,
}

/// Smallest `N <= n_max` for which every coloring of `K_{N,N}` is hit. The
/// budget applies to each `N` separately.
pub fn bramsey(lengths: &[usize], n_max: usize, opts: &RamseyOptions) -> Result<RamseyValue> {
    let start = lower_bound(lengths);
    validate(start.max(1), lengths)?;
    if n_max > MAX_SIDE {
        return Err(Error::invalid(format!("n_max {n_max} exceeds {MAX_SIDE}")));
    }
    let mut verdicts = Vec::new();
    let mut certificate = None;
    let mut lower = start;
    if start > 1 {
        let v = decide_arrowing_with(start - 1, lengths, opts, None)?;
        certificate = v.good_coloring().cloned();
        verdicts.push(v);
    }
    for n in start..=n_max {
        let v = decide_arrowing_with(n, lengths, opts, None)?;
        let outcome = v.outcome.clone();
        verdicts.push(v);
        match outcome {
            RamseyOutcome::AllColoringsHit => {
                return Ok(RamseyValue { lengths: lengths.to_vec(), value: Some(n), lower: n, upper: Some(n), certificate, verdicts });
            }
            RamseyOutcome::GoodColoring { graph } => {
                certificate = Some(graph);
                lower = n + 1;
            }
            RamseyOutcome::BudgetExhausted { .. } => break,
        }
    }
    Ok(RamseyValue { lengths: lengths.to_vec(), value: None, lower, upper: None, certificate, verdicts })
}
