//! Edge densities, ε-regularity of pairs, typical vertices and reduced graphs
//! over a supplied cluster partition.
//!
//! All thresholds are compared in exact rational arithmetic.

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Color, ColoredBipartiteGraph, GraphView};
use crate::random::rng;
use crate::{Error, Exec, Result};

pub type Ratio = num_rational::Ratio<i64>;

/// Largest side accepted by [`RegularityMode::Exact`].
pub const EXACT_PAIR_LIMIT: usize = 14;

/// Parses `"3/4"`, `"0.25"` or `"1"` into an exact ratio.
pub fn parse_ratio(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a ratio: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || frac.len() > 15 {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().map_err(|_| bad())?;
    let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Decimal rendering used in tables.
pub fn ratio_to_f64(r: Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Serializes ratios as `"p/q"` strings.
pub mod ratio_serde {
    use super::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

mod ratio_vec_serde {
    use super::Ratio;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Ratio], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format!("{}/{}", r.numer(), r.denom()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Ratio>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| super::parse_ratio(s).map_err(serde::de::Error::custom)).collect()
    }
}

fn mask_of(len: usize, items: &[usize]) -> FixedBitSet {
    let mut m = FixedBitSet::with_capacity(len);
    for &i in items {
        if i < len {
            m.insert(i);
        }
    }
    m
}

fn edges_between(view: &GraphView<'_>, a: &[usize], b: &FixedBitSet) -> usize {
    a.iter().map(|&x| view.x_neighbors(x).intersection_count(b)).sum()
}

/// `e(A, B) / (|A| |B|)` for `A` on side X and `B` on side Y.
pub fn density(view: &GraphView<'_>, a: &[usize], b: &[usize]) -> Result<Ratio> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("density needs nonempty vertex sets"));
    }
    let bm = mask_of(view.graph().n2(), b);
    let e = edges_between(view, a, &bm);
    Ok(Ratio::new(e as i64, (a.len() * b.len()) as i64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RegularityMode {
    /// Full enumeration of `A'`; sides up to [`EXACT_PAIR_LIMIT`].
    Exact,
    /// Seeded probes; can only prove irregularity.
    Witness { seed: u64, probes: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularWitness {
    pub a_sub: Vec<usize>,
    pub b_sub: Vec<usize>,
    #[serde(with = "ratio_serde")]
    pub pair_density: Ratio,
    #[serde(with = "ratio_serde")]
    pub sub_density: Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RegularityOutcome {
    Regular,
    Irregular { witness: IrregularWitness },
    Unknown,
}

impl RegularityOutcome {
    pub fn witness(&self) -> Option<&IrregularWitness> {
        match self {
            RegularityOutcome::Irregular { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Smallest subset size `s` with `s > eps * n`.
pub fn min_subset_size(eps: Ratio, n: usize) -> usize {
    let bound = (eps * Ratio::from_integer(n as i64)).floor().to_integer();
    (bound.max(-1) + 1) as usize
}

/// Pair statistics shared by the exact and heuristic searches.
struct PairCtx<'v, 'a> {
    view: &'v GraphView<'a>,
    a: Vec<usize>,
    b: Vec<usize>,
    e: i128,
    eps: Ratio,
    sa: usize,
    sb: usize,
}

impl PairCtx<'_, '_> {
    fn pair_density(&self) -> Ratio {
        Ratio::new(self.e as i64, (self.a.len() * self.b.len()) as i64)
    }

    /// `|e'/(s t) - d| > eps`.
    fn deviates(&self, e_sub: usize, s: usize, t: usize) -> bool {
        let ab = (self.a.len() * self.b.len()) as i128;
        let st = (s * t) as i128;
        let diff = (e_sub as i128 * ab - self.e * st).abs();
        diff * *self.eps.denom() as i128 > *self.eps.numer() as i128 * st * ab
    }

    /// Given a fixed subset on one side and the counts `|N(w) ∩ fixed|` for the
    /// other side's candidates, the densest and sparsest `t`-subsets are the
    /// extremes of the sorted counts. Deviation is convex in the edge count, so
    /// checking both extremes for every `t` is exhaustive for this fixed set.
    fn best_response(&self, fixed_len: usize, counts: &[(usize, usize)], t_min: usize) -> Option<(Vec<usize>, usize, usize)> {
        let mut asc: Vec<(usize, usize)> = counts.to_vec();
        asc.sort_by_key(|&(c, i)| (c, i));
        let mut desc: Vec<(usize, usize)> = counts.to_vec();
        desc.sort_by_key(|&(c, i)| (std::cmp::Reverse(c), i));
        let mut lo = 0;
        let mut hi = 0;
        for t in 1..=counts.len() {
            lo += asc[t - 1].0;
            hi += desc[t - 1].0;
            if t < t_min {
                continue;
            }
            if self.deviates(lo, fixed_len, t) {
                return Some((asc[..t].iter().map(|p| p.1).collect(), lo, t));
            }
            if self.deviates(hi, fixed_len, t) {
                return Some((desc[..t].iter().map(|p| p.1).collect(), hi, t));
            }
        }
        None
    }

    fn witness(&self, mut a_sub: Vec<usize>, mut b_sub: Vec<usize>, e_sub: usize) -> IrregularWitness {
        a_sub.sort_unstable();
        b_sub.sort_unstable();
        let sub_density = Ratio::new(e_sub as i64, (a_sub.len() * b_sub.len()) as i64);
        IrregularWitness { a_sub, b_sub, pair_density: self.pair_density(), sub_density }
    }

    /// Best `B'` for a fixed `A'`.
    fn probe_a(&self, a_sub: &[usize]) -> Option<IrregularWitness> {
        if a_sub.len() < self.sa {
            return None;
        }
        let am = mask_of(self.view.graph().n1(), a_sub);
        let counts: Vec<(usize, usize)> = self.b.iter().map(|&y| (self.view.y_neighbors(y).intersection_count(&am), y)).collect();
        self.best_response(a_sub.len(), &counts, self.sb).map(|(b_sub, e, _)| self.witness(a_sub.to_vec(), b_sub, e))
    }

    /// Best `A'` for a fixed `B'`.
    fn probe_b(&self, b_sub: &[usize]) -> Option<IrregularWitness> {
        if b_sub.len() < self.sb {
            return None;
        }
        let bm = mask_of(self.view.graph().n2(), b_sub);
        let counts: Vec<(usize, usize)> = self.a.iter().map(|&x| (self.view.x_neighbors(x).intersection_count(&bm), x)).collect();
        self.best_response(b_sub.len(), &counts, self.sa).map(|(a_sub, e, _)| self.witness(a_sub, b_sub.to_vec(), e))
    }
}

fn normalized(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Decides whether `(A, B)` is ε-regular.
pub fn is_eps_regular(view: &GraphView<'_>, a: &[usize], b: &[usize], eps: Ratio, mode: &RegularityMode) -> Result<RegularityOutcome> {
    is_eps_regular_with(view, a, b, eps, mode, Exec::default())
}

pub fn is_eps_regular_with(
    view: &GraphView<'_>,
    a: &[usize],
    b: &[usize],
    eps: Ratio,
    mode: &RegularityMode,
    exec: Exec,
) -> Result<RegularityOutcome> {
    if !eps.is_positive() {
        return Err(Error::invalid("eps must be positive"));
    }
    let a = normalized(a);
    let b = normalized(b);
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("regularity needs nonempty vertex sets"));
    }
    if a.iter().any(|&x| x >= view.graph().n1()) || b.iter().any(|&y| y >= view.graph().n2()) {
        return Err(Error::invalid("pair vertex out of range"));
    }
    let bm = mask_of(view.graph().n2(), &b);
    let ctx = PairCtx {
        view,
        e: edges_between(view, &a, &bm) as i128,
        sa: min_subset_size(eps, a.len()),
        sb: min_subset_size(eps, b.len()),
        a,
        b,
        eps,
    };
    if ctx.sa > ctx.a.len() || ctx.sb > ctx.b.len() {
        // No admissible subsets at all.
        return Ok(RegularityOutcome::Regular);
    }
    match mode {
        RegularityMode::Exact => exact(&ctx, exec),
        RegularityMode::Witness { seed, probes } => Ok(heuristic(&ctx, *seed, *probes)),
    }
}

/// Canonical order: `A'` by bitmask over the sorted `A`, then `|B'|`
/// ascending, sparsest before densest.
fn exact(ctx: &PairCtx<'_, '_>, exec: Exec) -> Result<RegularityOutcome> {
    let na = ctx.a.len();
    let size = na.max(ctx.b.len());
    if size > EXACT_PAIR_LIMIT {
        return Err(Error::TooLarge { size, limit: EXACT_PAIR_LIMIT });
    }
    let masks: Vec<u32> = (1u32..1 << na).filter(|m| m.count_ones() as usize >= ctx.sa).collect();
    let found = exec.find_map_first(&masks, |&mask| {
        let a_sub: Vec<usize> = (0..na).filter(|i| mask & (1 << i) != 0).map(|i| ctx.a[i]).collect();
        ctx.probe_a(&a_sub)
    });
    Ok(match found {
        Some(witness) => RegularityOutcome::Irregular { witness },
        None => RegularityOutcome::Regular,
    })
}

/// Probe order: degree extremes on both sides, then neighborhoods and
/// non-neighborhoods of single vertices, then seeded random subsets. Each
/// probe fixes one side and solves the other exactly.
fn heuristic(ctx: &PairCtx<'_, '_>, seed: u64, probes: usize) -> RegularityOutcome {
    let am = mask_of(ctx.view.graph().n1(), &ctx.a);
    let bm = mask_of(ctx.view.graph().n2(), &ctx.b);
    let deg_a: Vec<(usize, usize)> = ctx.a.iter().map(|&x| (ctx.view.x_neighbors(x).intersection_count(&bm), x)).collect();
    let deg_b: Vec<(usize, usize)> = ctx.b.iter().map(|&y| (ctx.view.y_neighbors(y).intersection_count(&am), y)).collect();

    let found = ctx.probe_a(&ctx.a).or_else(|| ctx.probe_b(&ctx.b));
    if let Some(w) = found {
        return RegularityOutcome::Irregular { witness: w };
    }
    let extremes = |degs: &[(usize, usize)], s: usize| -> [Vec<usize>; 2] {
        let mut asc = degs.to_vec();
        asc.sort_by_key(|&(d, i)| (d, i));
        let low = asc[..s].iter().map(|p| p.1).collect();
        let high = asc[asc.len() - s..].iter().map(|p| p.1).collect();
        [low, high]
    };
    for s in [ctx.sa, (ctx.a.len() / 2).max(ctx.sa)] {
        for a_sub in extremes(&deg_a, s) {
            if let Some(w) = ctx.probe_a(&a_sub) {
                return RegularityOutcome::Irregular { witness: w };
            }
        }
    }
    for s in [ctx.sb, (ctx.b.len() / 2).max(ctx.sb)] {
        for b_sub in extremes(&deg_b, s) {
            if let Some(w) = ctx.probe_b(&b_sub) {
                return RegularityOutcome::Irregular { witness: w };
            }
        }
    }

    let mut rng = rng(seed);
    let mut ys = ctx.b.clone();
    ys.shuffle(&mut rng);
    for &y in ys.iter().take(probes) {
        let n = ctx.view.y_neighbors(y);
        let (inside, outside): (Vec<usize>, Vec<usize>) = ctx.a.iter().partition(|&&x| n.contains(x));
        for a_sub in [inside, outside] {
            if let Some(w) = ctx.probe_a(&a_sub) {
                return RegularityOutcome::Irregular { witness: w };
            }
        }
    }
    let mut xs = ctx.a.clone();
    xs.shuffle(&mut rng);
    for &x in xs.iter().take(probes) {
        let n = ctx.view.x_neighbors(x);
        let (inside, outside): (Vec<usize>, Vec<usize>) = ctx.b.iter().partition(|&&y| n.contains(y));
        for b_sub in [inside, outside] {
            if let Some(w) = ctx.probe_b(&b_sub) {
                return RegularityOutcome::Irregular { witness: w };
            }
        }
    }
    for _ in 0..probes {
        let s = rng.gen_range(ctx.sa..=ctx.a.len());
        let a_sub: Vec<usize> = ctx.a.choose_multiple(&mut rng, s).copied().collect();
        if let Some(w) = ctx.probe_a(&a_sub) {
            return RegularityOutcome::Irregular { witness: w };
        }
    }
    RegularityOutcome::Unknown
}

/// Independent check of an irregularity witness: subset containment, size
/// floors and the density gap, all recomputed through [`density`].
pub fn verify_witness(view: &GraphView<'_>, a: &[usize], b: &[usize], eps: Ratio, w: &IrregularWitness) -> bool {
    let a = normalized(a);
    let b = normalized(b);
    let sa = normalized(&w.a_sub);
    let sb = normalized(&w.b_sub);
    if sa.len() != w.a_sub.len() || sb.len() != w.b_sub.len() {
        return false;
    }
    if !sa.iter().all(|x| a.binary_search(x).is_ok()) || !sb.iter().all(|y| b.binary_search(y).is_ok()) {
        return false;
    }
    let big = |s: usize, n: usize| Ratio::from_integer(s as i64) > eps * Ratio::from_integer(n as i64);
    if !big(sa.len(), a.len()) || !big(sb.len(), b.len()) {
        return false;
    }
    match (density(view, &a, &b), density(view, &sa, &sb)) {
        (Ok(d), Ok(ds)) => (d - ds).abs() > eps,
        _ => false,
    }
}

/// Vertices `v` of `A` with `|N(v) ∩ B'| > (d - eps) |B'|`.
pub fn typical_vertices(view: &GraphView<'_>, a: &[usize], b_sub: &[usize], eps: Ratio, d: Ratio) -> Vec<usize> {
    let bm = mask_of(view.graph().n2(), b_sub);
    let floor = (d - eps) * Ratio::from_integer(bm.count_ones(..) as i64);
    let mut out: Vec<usize> = a
        .iter()
        .copied()
        .filter(|&x| Ratio::from_integer(view.x_neighbors(x).intersection_count(&bm) as i64) > floor)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Clusters `X_1..X_k`, `Y_1..Y_k` of a common size `m`, plus exceptional
/// sets `X_0`, `Y_0` of equal size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPartition {
    pub x_clusters: Vec<Vec<usize>>,
    pub y_clusters: Vec<Vec<usize>>,
    pub x0: Vec<usize>,
    pub y0: Vec<usize>,
}

impl ClusterPartition {
    pub fn k(&self) -> usize {
        self.x_clusters.len()
    }

    pub fn m(&self) -> usize {
        self.x_clusters.first().map_or(0, Vec::len)
    }

    /// Consecutive blocks of `floor(n / k)` vertices; the remainder is exceptional.
    pub fn uniform(n1: usize, n2: usize, k: usize) -> Result<Self> {
        Self::chop(n1, n2, k, |n| (0..n).collect())
    }

    /// Like [`uniform`](Self::uniform) after a seeded shuffle of each side.
    pub fn random(n1: usize, n2: usize, k: usize, seed: u64) -> Result<Self> {
        let mut r = rng(seed);
        Self::chop(n1, n2, k, |n| {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(&mut r);
            v
        })
    }

    fn chop(n1: usize, n2: usize, k: usize, mut order: impl FnMut(usize) -> Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Partition("k must be at least 1".into()));
        }
        if n1 != n2 {
            return Err(Error::Partition(format!("sides differ ({n1} vs {n2}); exceptional sets would differ in size")));
        }
        let m = n1 / k;
        if m == 0 {
            return Err(Error::Partition(format!("{k} clusters do not fit in {n1} vertices")));
        }
        let mut split = |n: usize| {
            let v = order(n);
            let clusters: Vec<Vec<usize>> = (0..k).map(|i| sorted(v[i * m..(i + 1) * m].to_vec())).collect();
            (clusters, sorted(v[k * m..].to_vec()))
        };
        let (x_clusters, x0) = split(n1);
        let (y_clusters, y0) = split(n2);
        Ok(ClusterPartition { x_clusters, y_clusters, x0, y0 })
    }

    pub fn validate(&self, n1: usize, n2: usize) -> Result<()> {
        let k = self.k();
        if k == 0 || self.y_clusters.len() != k {
            return Err(Error::Partition("need the same positive cluster count on both sides".into()));
        }
        let m = self.m();
        if m == 0 {
            return Err(Error::Partition("clusters must be nonempty".into()));
        }
        if self.x0.len() != self.y0.len() {
            return Err(Error::Partition(format!("|X0| = {} differs from |Y0| = {}", self.x0.len(), self.y0.len())));
        }
        for (name, clusters, extra, n) in [("X", &self.x_clusters, &self.x0, n1), ("Y", &self.y_clusters, &self.y0, n2)] {
            let mut seen = vec![false; n];
            for (i, c) in clusters.iter().enumerate() {
                if c.len() != m {
                    return Err(Error::Partition(format!("{name}{} has {} vertices, expected {m}", i + 1, c.len())));
                }
            }
            for &v in clusters.iter().flatten().chain(extra.iter()) {
                if v >= n {
                    return Err(Error::Partition(format!("{name} vertex {v} out of range")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Partition(format!("{name} vertex {v} listed twice")));
                }
            }
            if let Some(v) = seen.iter().position(|s| !s) {
                return Err(Error::Partition(format!("{name} vertex {v} not covered")));
            }
        }
        Ok(())
    }

    /// `clusters k m`, then one line per cluster tagged `X1..Xk`, `Y1..Yk`,
    /// `X0`, `Y0`, each followed by its vertex indices.
    pub fn to_text(&self) -> String {
        let mut s = format!("clusters {} {}\n", self.k(), self.m());
        let mut line = |tag: String, vs: &[usize]| {
            s.push_str(&tag);
            for v in vs {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        };
        for (i, c) in self.x_clusters.iter().enumerate() {
            line(format!("X{}", i + 1), c);
        }
        for (i, c) in self.y_clusters.iter().enumerate() {
            line(format!("Y{}", i + 1), c);
        }
        line("X0".into(), &self.x0);
        line("Y0".into(), &self.y0);
        s
    }

    /// Parses [`to_text`](Self::to_text) output. Missing `X0`/`Y0` lines mean empty.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty partition file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (k, m) = match h.as_slice() {
            ["clusters", k, m] => (
                k.parse::<usize>().map_err(|_| Error::parse(hl + 1, "bad k"))?,
                m.parse::<usize>().map_err(|_| Error::parse(hl + 1, "bad m"))?,
            ),
            _ => return Err(Error::parse(hl + 1, "expected `clusters <k> <m>`")),
        };
        let mut xs: Vec<Option<Vec<usize>>> = vec![None; k + 1];
        let mut ys: Vec<Option<Vec<usize>>> = vec![None; k + 1];
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let tag = it.next().unwrap_or_default();
            let (side, idx) = tag.split_at(1.min(tag.len()));
            let idx: usize = idx.parse().map_err(|_| Error::parse(ln + 1, format!("bad cluster tag {tag:?}")))?;
            let slot = match side {
                "X" if idx <= k => &mut xs[idx],
                "Y" if idx <= k => &mut ys[idx],
                _ => return Err(Error::parse(ln + 1, format!("bad cluster tag {tag:?}"))),
            };
            if slot.is_some() {
                return Err(Error::parse(ln + 1, format!("cluster {tag} repeated")));
            }
            let vs: std::result::Result<Vec<usize>, _> = it.map(str::parse).collect();
            *slot = Some(vs.map_err(|_| Error::parse(ln + 1, "bad vertex index"))?);
        }
        let take = |v: &mut Vec<Option<Vec<usize>>>, side: &str| -> Result<Vec<Vec<usize>>> {
            (1..=k)
                .map(|i| v[i].take().ok_or_else(|| Error::Partition(format!("missing cluster {side}{i}"))))
                .collect()
        };
        let p = ClusterPartition {
            x_clusters: take(&mut xs, "X")?,
            y_clusters: take(&mut ys, "Y")?,
            x0: xs[0].take().unwrap_or_default(),
            y0: ys[0].take().unwrap_or_default(),
        };
        if p.m() != m {
            return Err(Error::Partition(format!("header says m = {m} but X1 has {} vertices", p.m())));
        }
        Ok(p)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// How a cluster pair becomes a colored reduced edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ReductionRule {
    /// Blue (color 2) when the blue density is at least `d`; otherwise red
    /// when the red density is at least `d`.
    DegreeForm {
        #[serde(with = "ratio_serde")]
        d: Ratio,
    },
    /// The first color `f` (1 before 2) with `e_f >= (1/2 - eps) |X_i| |Y_j|`.
    MajorityHalfEps {
        #[serde(with = "ratio_serde")]
        eps: Ratio,
    },
}

impl ReductionRule {
    /// Color chosen from the red and blue densities of a pair, 0 for none.
    pub fn decide(&self, red: Ratio, blue: Ratio) -> Color {
        match *self {
            ReductionRule::DegreeForm { d } => {
                if blue >= d {
                    2
                } else if red >= d {
                    1
                } else {
                    0
                }
            }
            ReductionRule::MajorityHalfEps { eps } => {
                let floor = Ratio::new(1, 2) - eps;
                if red >= floor {
                    1
                } else if blue >= floor {
                    2
                } else {
                    0
                }
            }
        }
    }
}

/// Reduced graph on `k + k` cluster vertices; `x_i` stands for `X_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedColoredGraph {
    pub k: usize,
    pub rule: ReductionRule,
    /// Row-major `k x k` colors, 0 for no edge.
    pub colors: Vec<Color>,
    /// Row-major red densities.
    #[serde(with = "ratio_vec_serde")]
    pub red: Vec<Ratio>,
    /// Row-major blue densities.
    #[serde(with = "ratio_vec_serde")]
    pub blue: Vec<Ratio>,
}

impl ReducedColoredGraph {
    pub fn color(&self, i: usize, j: usize) -> Color {
        self.colors[i * self.k + j]
    }

    /// Recomputes every edge color from the stored densities.
    pub fn audit(&self) -> bool {
        (0..self.k * self.k).all(|p| self.rule.decide(self.red[p], self.blue[p]) == self.colors[p])
    }

    /// The reduced graph as a 2-colored `k x k` bipartite graph.
    pub fn as_graph(&self) -> ColoredBipartiteGraph {
        ColoredBipartiteGraph::from_matrix(self.k, self.k, 2, self.colors.clone()).expect("reduced colors are in range")
    }
}

/// Builds the reduced graph of a 2-colored graph over a validated partition.
pub fn reduced_graph(g: &ColoredBipartiteGraph, p: &ClusterPartition, rule: ReductionRule) -> Result<ReducedColoredGraph> {
    reduced_graph_with(g, p, rule, Exec::default())
}

pub fn reduced_graph_with(g: &ColoredBipartiteGraph, p: &ClusterPartition, rule: ReductionRule, exec: Exec) -> Result<ReducedColoredGraph> {
    if g.r() != 2 {
        return Err(Error::invalid(format!("reduced graphs need a 2-colored graph, got r = {}", g.r())));
    }
    p.validate(g.n1(), g.n2())?;
    let k = p.k();
    let m = p.m() as i64;
    let ymasks: Vec<FixedBitSet> = p.y_clusters.iter().map(|c| mask_of(g.n2(), c)).collect();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let counts = exec.map(&pairs, |&(i, j)| {
        let mut red = 0usize;
        let mut blue = 0usize;
        for &x in &p.x_clusters[i] {
            red += g.row(1, x).intersection_count(&ymasks[j]);
            blue += g.row(2, x).intersection_count(&ymasks[j]);
        }
        (red, blue)
    });
    let red: Vec<Ratio> = counts.iter().map(|c| Ratio::new(c.0 as i64, m * m)).collect();
    let blue: Vec<Ratio> = counts.iter().map(|c| Ratio::new(c.1 as i64, m * m)).collect();
    let colors = red.iter().zip(&blue).map(|(&r, &b)| rule.decide(r, b)).collect();
    Ok(ReducedColoredGraph { k, rule, colors, red, blue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_bipartite;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Ratio {
        Ratio::new(p, q)
    }

    fn diagonal_blocks() -> ColoredBipartiteGraph {
        let mut edges = Vec::new();
        for x in 0..10 {
            for y in 0..10 {
                if (x < 5) == (y < 5) {
                    edges.push((x, y, 1));
                }
            }
        }
        ColoredBipartiteGraph::build(10, 10, 1, &edges).unwrap()
    }

    /// Independent oracle: every pair of admissible subsets.
    fn naive_regular(view: &GraphView<'_>, a: &[usize], b: &[usize], eps: Ratio) -> bool {
        let d = density(view, a, b).unwrap();
        let sa = min_subset_size(eps, a.len());
        let sb = min_subset_size(eps, b.len());
        for ma in 1u32..1 << a.len() {
            if (ma.count_ones() as usize) < sa {
                continue;
            }
            let aa: Vec<usize> = (0..a.len()).filter(|i| ma & (1 << i) != 0).map(|i| a[i]).collect();
            for mb in 1u32..1 << b.len() {
                if (mb.count_ones() as usize) < sb {
                    continue;
                }
                let bb: Vec<usize> = (0..b.len()).filter(|i| mb & (1 << i) != 0).map(|i| b[i]).collect();
                if (density(view, &aa, &bb).unwrap() - d).abs() > eps {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn parse_ratios() {
        assert_eq!(parse_ratio("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_ratio("0.05").unwrap(), r(1, 20));
        assert_eq!(parse_ratio("1").unwrap(), r(1, 1));
        assert_eq!(parse_ratio(".5").unwrap(), r(1, 2));
        assert_eq!(parse_ratio("-0.25").unwrap(), r(-1, 4));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("").is_err());
    }

    #[test]
    fn density_examples() {
        let full = ColoredBipartiteGraph::from_matrix(2, 2, 1, vec![1; 4]).unwrap();
        assert_eq!(density(&full.view(), &[0, 1], &[0, 1]).unwrap(), r(1, 1));
        let empty = ColoredBipartiteGraph::from_matrix(2, 2, 1, vec![0; 4]).unwrap();
        assert_eq!(density(&empty.view(), &[0, 1], &[0, 1]).unwrap(), r(0, 1));
        let missing = ColoredBipartiteGraph::from_matrix(2, 2, 1, vec![1, 1, 1, 0]).unwrap();
        assert_eq!(density(&missing.view(), &[0, 1], &[0, 1]).unwrap(), r(3, 4));
        assert!(density(&missing.view(), &[], &[0]).is_err());
    }

    #[test]
    fn complete_and_empty_pairs_are_regular() {
        for fill in [0, 1] {
            let g = ColoredBipartiteGraph::from_matrix(6, 6, 1, vec![fill; 36]).unwrap();
            let all: Vec<usize> = (0..6).collect();
            for eps in [r(1, 10), r(1, 4), r(1, 2)] {
                let out = is_eps_regular(&g.view(), &all, &all, eps, &RegularityMode::Exact).unwrap();
                assert_eq!(out, RegularityOutcome::Regular);
            }
        }
    }

    #[test]
    fn diagonal_blocks_are_irregular() {
        let g = diagonal_blocks();
        let view = g.view();
        let all: Vec<usize> = (0..10).collect();
        let eps = r(1, 4);
        let out = is_eps_regular(&view, &all, &all, eps, &RegularityMode::Exact).unwrap();
        let w = out.witness().expect("irregular");
        assert!(verify_witness(&view, &all, &all, eps, w));
        // First in canonical order: the three smallest X vertices against the three sparsest columns.
        assert_eq!(w.a_sub, vec![0, 1, 2]);
        assert_eq!(w.b_sub, vec![5, 6, 7]);
        assert_eq!(w.sub_density, r(0, 1));
        // The block witness itself.
        let block = IrregularWitness { a_sub: (0..5).collect(), b_sub: (5..10).collect(), pair_density: r(1, 2), sub_density: r(0, 1) };
        assert!(verify_witness(&view, &all, &all, eps, &block));
        // Heuristic finds one too.
        let out = is_eps_regular(&view, &all, &all, eps, &RegularityMode::Witness { seed: 1, probes: 8 }).unwrap();
        assert!(verify_witness(&view, &all, &all, eps, out.witness().unwrap()));
    }

    #[test]
    fn exact_mode_size_limit() {
        let g = ColoredBipartiteGraph::from_matrix(15, 15, 1, vec![1; 225]).unwrap();
        let all: Vec<usize> = (0..15).collect();
        let err = is_eps_regular(&g.view(), &all, &all, r(1, 10), &RegularityMode::Exact);
        assert!(matches!(err, Err(Error::TooLarge { .. })));
    }

    #[test]
    fn typical_vertex_examples() {
        let full = ColoredBipartiteGraph::from_matrix(4, 4, 1, vec![1; 16]).unwrap();
        assert_eq!(typical_vertices(&full.view(), &[0, 1, 2, 3], &[1, 2], r(1, 10), r(1, 1)), vec![0, 1, 2, 3]);
        let empty = ColoredBipartiteGraph::from_matrix(4, 4, 1, vec![0; 16]).unwrap();
        assert!(typical_vertices(&empty.view(), &[0, 1, 2, 3], &[0, 1], r(1, 10), r(1, 2)).is_empty());
        let g = diagonal_blocks();
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(typical_vertices(&g.view(), &all, &[0, 1, 2, 3, 4], r(1, 4), r(1, 2)), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn partition_round_trip_and_validation() {
        let p = ClusterPartition::uniform(14, 14, 3).unwrap();
        assert_eq!((p.k(), p.m()), (3, 4));
        assert_eq!(p.x0, vec![12, 13]);
        p.validate(14, 14).unwrap();
        assert_eq!(ClusterPartition::from_text(&p.to_text()).unwrap(), p);
        let q = ClusterPartition::random(14, 14, 3, 9).unwrap();
        q.validate(14, 14).unwrap();
        assert_eq!(ClusterPartition::from_text(&q.to_text()).unwrap(), q);

        let mut bad = p.clone();
        bad.x_clusters[0][0] = 5;
        assert!(bad.validate(14, 14).is_err());
        let mut bad = p.clone();
        bad.y0.pop();
        assert!(bad.validate(14, 14).is_err());
        assert!(ClusterPartition::uniform(10, 12, 2).is_err());
        assert!(ClusterPartition::from_text("clusters 1 2\nX1 0 1\n").is_err());
        assert!(ClusterPartition::from_text("clusters 1 2\nX1 0 1\nY1 0 1\nZ1 3\n").is_err());
    }

    #[test]
    fn reduced_graph_examples() {
        let p = ClusterPartition::uniform(4, 4, 2).unwrap();
        let half = ReductionRule::DegreeForm { d: r(1, 2) };
        let blue = ColoredBipartiteGraph::from_matrix(4, 4, 2, vec![2; 16]).unwrap();
        let h = reduced_graph(&blue, &p, half).unwrap();
        assert_eq!(h.colors, vec![2; 4]);
        assert!(h.audit());
        let red = ColoredBipartiteGraph::from_matrix(4, 4, 2, vec![1; 16]).unwrap();
        let h = reduced_graph(&red, &p, half).unwrap();
        assert_eq!(h.colors, vec![1; 4]);
        assert_eq!(h.blue, vec![r(0, 1); 4]);

        // Each 2x2 pair half red, half blue: the majority rule takes color 1.
        let mixed = ColoredBipartiteGraph::from_rows(2, &[vec![1, 1, 1, 1], vec![2, 2, 2, 2], vec![1, 1, 1, 1], vec![2, 2, 2, 2]]).unwrap();
        let h = reduced_graph(&mixed, &p, ReductionRule::MajorityHalfEps { eps: r(1, 100) }).unwrap();
        assert_eq!(h.colors, vec![1; 4]);
        assert_eq!(h.red, vec![r(1, 2); 4]);
        // Degree form prefers blue on the same input.
        assert_eq!(reduced_graph(&mixed, &p, half).unwrap().colors, vec![2; 4]);
        assert_eq!(h.as_graph().n1(), 2);

        let three = ColoredBipartiteGraph::from_matrix(4, 4, 3, vec![3; 16]).unwrap();
        assert!(reduced_graph(&three, &p, half).is_err());
        let wrong = ClusterPartition::uniform(6, 6, 2).unwrap();
        assert!(reduced_graph(&red, &wrong, half).is_err());
    }

    #[test]
    fn reduced_graph_serde_round_trip() {
        let p = ClusterPartition::uniform(6, 6, 3).unwrap();
        let g = crate::random::random_coloring(6, 6, 2, 4);
        let h = reduced_graph(&g, &p, ReductionRule::MajorityHalfEps { eps: r(1, 20) }).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<ReducedColoredGraph>(&json).unwrap(), h);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]
        #[test]
        fn exact_matches_naive(na in 1usize..7, nb in 1usize..7, p in 0.0f64..1.0, seed in 0u64..1000, e in 0usize..3) {
            let eps = [r(1, 10), r(1, 4), r(1, 2)][e];
            let g = random_bipartite(na, nb, p, seed);
            let view = g.view();
            let a: Vec<usize> = (0..na).collect();
            let b: Vec<usize> = (0..nb).collect();
            let out = is_eps_regular_with(&view, &a, &b, eps, &RegularityMode::Exact, Exec::Sequential).unwrap();
            prop_assert_eq!(out == RegularityOutcome::Regular, naive_regular(&view, &a, &b, eps));
            if let Some(w) = out.witness() {
                prop_assert!(verify_witness(&view, &a, &b, eps, w));
            }
            let par = is_eps_regular_with(&view, &a, &b, eps, &RegularityMode::Exact, Exec::Parallel).unwrap();
            prop_assert_eq!(par, out);
        }

        #[test]
        fn witness_mode_never_lies(n in 2usize..30, p in 0.0f64..1.0, seed in 0u64..1000) {
            let g = random_bipartite(n, n, p, seed);
            let view = g.view();
            let all: Vec<usize> = (0..n).collect();
            let eps = r(1, 10);
            let out = is_eps_regular(&view, &all, &all, eps, &RegularityMode::Witness { seed, probes: 16 }).unwrap();
            prop_assert!(out != RegularityOutcome::Regular);
            if let Some(w) = out.witness() {
                prop_assert!(verify_witness(&view, &all, &all, eps, w));
            }
        }

        #[test]
        fn density_is_additive_over_b_splits(n in 2usize..20, p in 0.0f64..1.0, seed in 0u64..1000, cut in 1usize..19) {
            let cut = cut.min(n - 1);
            let g = random_bipartite(n, n, p, seed);
            let view = g.view();
            let a: Vec<usize> = (0..n).collect();
            let b1: Vec<usize> = (0..cut).collect();
            let b2: Vec<usize> = (cut..n).collect();
            let whole = density(&view, &a, &a).unwrap();
            let parts = density(&view, &a, &b1).unwrap() * Ratio::new(cut as i64, n as i64)
                + density(&view, &a, &b2).unwrap() * Ratio::new((n - cut) as i64, n as i64);
            prop_assert_eq!(whole, parts);
        }

        #[test]
        fn typical_vertices_on_regular_pairs(n in 4usize..9, p in 0.3f64..1.0, seed in 0u64..1000) {
            let g = random_bipartite(n, n, p, seed);
            let view = g.view();
            let all: Vec<usize> = (0..n).collect();
            let eps = r(1, 4);
            if is_eps_regular(&view, &all, &all, eps, &RegularityMode::Exact).unwrap() == RegularityOutcome::Regular {
                let d = density(&view, &all, &all).unwrap();
                let sb = min_subset_size(eps, n);
                for b_sub in [all[..sb].to_vec(), all[n - sb..].to_vec(), all.clone()] {
                    let typical = typical_vertices(&view, &all, &b_sub, eps, d);
                    let rest: Vec<usize> = all.iter().copied().filter(|v| !typical.contains(v)).collect();
                    if Ratio::from_integer(rest.len() as i64) > eps * Ratio::from_integer(n as i64) {
                        // Regularity tolerates a gap of exactly eps, which is the only way out.
                        prop_assert_eq!(density(&view, &rest, &b_sub).unwrap(), d - eps);
                    }
                }
            }
        }
    }
}
