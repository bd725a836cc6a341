//! Dense r-edge-colored bipartite graphs and read-only filtered views.
//!
//! A graph stores one color id per pair `(x, y)`, with `0` meaning the pair is
//! absent, plus per-color row and column bitsets so that neighborhood queries
//! are word-parallel intersections.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Edge color; `0` is reserved for "no edge".
pub type Color = u8;

/// Largest supported color count (colors are tracked in a `u64` mask).
pub const MAX_COLORS: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

/// A vertex named by its side and 0-based index; rendered as `x3` / `y0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub side: Side,
    pub index: usize,
}

impl Vertex {
    pub const fn x(index: usize) -> Self {
        Vertex { side: Side::X, index }
    }

    pub const fn y(index: usize) -> Self {
        Vertex { side: Side::Y, index }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::X => write!(f, "x{}", self.index),
            Side::Y => write!(f, "y{}", self.index),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad vertex name {s:?}"));
        let (side, rest) = match s.as_bytes().first() {
            Some(b'x') => (Side::X, &s[1..]),
            Some(b'y') => (Side::Y, &s[1..]),
            _ => return Err(bad()),
        };
        let index = rest.parse().map_err(|_| bad())?;
        Ok(Vertex { side, index })
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Set of colors `1..=63` as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ColorSet(u64);

impl ColorSet {
    pub fn single(c: Color) -> Self {
        debug_assert!(c >= 1 && (c as usize) <= MAX_COLORS);
        ColorSet(1 << c)
    }

    pub fn all(r: usize) -> Self {
        ColorSet(((1u128 << (r + 1)) - 2) as u64)
    }

    pub fn contains(self, c: Color) -> bool {
        c != 0 && (c as usize) <= MAX_COLORS && self.0 & (1 << c) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        (1..=MAX_COLORS as Color).filter(move |&c| self.contains(c))
    }

    /// The color when exactly one is selected.
    pub fn as_single(self) -> Option<Color> {
        (self.0.count_ones() == 1).then(|| self.0.trailing_zeros() as Color)
    }
}

/// Complete or partial bipartite graph `X x Y` with an r-coloring of its edges.
///
/// Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct ColoredBipartiteGraph {
    n1: usize,
    n2: usize,
    r: usize,
    colors: Vec<Color>,
    /// `rows[(c - 1) * n1 + x]`: the Y-neighbors of `x` in color `c`.
    rows: Vec<FixedBitSet>,
    /// `cols[(c - 1) * n2 + y]`: the X-neighbors of `y` in color `c`.
    cols: Vec<FixedBitSet>,
    complete: bool,
}

impl fmt::Debug for ColoredBipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl ColoredBipartiteGraph {
    /// Builds a graph from an explicit edge-color list; unlisted pairs are absent.
    pub fn build(n1: usize, n2: usize, r: usize, assignment: &[(usize, usize, Color)]) -> Result<Self> {
        check_dims(n1, n2, r)?;
        let mut colors = vec![0; n1 * n2];
        let mut seen = FixedBitSet::with_capacity(n1 * n2);
        for &(x, y, c) in assignment {
            if x >= n1 || y >= n2 {
                return Err(Error::VertexOutOfRange { x, y, n1, n2 });
            }
            if c as usize > r {
                return Err(Error::ColorOutOfRange { x, y, color: c as usize, r });
            }
            if seen.put(x * n2 + y) {
                return Err(Error::DuplicatePair { x, y });
            }
            colors[x * n2 + y] = c;
        }
        Ok(Self::from_parts(n1, n2, r, colors))
    }

    /// Builds a graph from a row-major color matrix.
    pub fn from_matrix(n1: usize, n2: usize, r: usize, colors: Vec<Color>) -> Result<Self> {
        check_dims(n1, n2, r)?;
        if colors.len() != n1 * n2 {
            return Err(Error::invalid(format!("matrix has {} entries, expected {}", colors.len(), n1 * n2)));
        }
        if let Some(pos) = colors.iter().position(|&c| c as usize > r) {
            return Err(Error::ColorOutOfRange { x: pos / n2, y: pos % n2, color: colors[pos] as usize, r });
        }
        Ok(Self::from_parts(n1, n2, r, colors))
    }

    /// Builds a graph from a list of rows.
    pub fn from_rows(r: usize, rows: &[Vec<Color>]) -> Result<Self> {
        let n1 = rows.len();
        let n2 = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|row| row.len() != n2) {
            return Err(Error::invalid(format!("row {i} has {} entries, expected {n2}", rows[i].len())));
        }
        Self::from_matrix(n1, n2, r, rows.concat())
    }

    fn from_parts(n1: usize, n2: usize, r: usize, colors: Vec<Color>) -> Self {
        let mut rows = vec![FixedBitSet::with_capacity(n2); r * n1];
        let mut cols = vec![FixedBitSet::with_capacity(n1); r * n2];
        for x in 0..n1 {
            for y in 0..n2 {
                let c = colors[x * n2 + y] as usize;
                if c > 0 {
                    rows[(c - 1) * n1 + x].insert(y);
                    cols[(c - 1) * n2 + y].insert(x);
                }
            }
        }
        let complete = colors.iter().all(|&c| c != 0);
        Self { n1, n2, r, colors, rows, cols, complete }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Number of colors.
    pub fn r(&self) -> usize {
        self.r
    }

    /// True when every pair carries a color.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    #[inline]
    pub fn color(&self, x: usize, y: usize) -> Color {
        self.colors[x * self.n2 + y]
    }

    pub fn matrix(&self) -> &[Color] {
        &self.colors
    }

    pub fn to_rows(&self) -> Vec<Vec<Color>> {
        self.colors.chunks(self.n2).map(<[Color]>::to_vec).collect()
    }

    /// Y-neighbors of `x` in color `c`.
    pub fn row(&self, c: Color, x: usize) -> &FixedBitSet {
        &self.rows[(c as usize - 1) * self.n1 + x]
    }

    /// X-neighbors of `y` in color `c`.
    pub fn col(&self, c: Color, y: usize) -> &FixedBitSet {
        &self.cols[(c as usize - 1) * self.n2 + y]
    }

    pub fn color_edge_count(&self, c: Color) -> usize {
        (0..self.n1).map(|x| self.row(c, x).count_ones(..)).sum()
    }

    pub fn view(&self) -> GraphView<'_> {
        GraphView::new(self, ColorSet::all(self.r))
    }

    /// The spanning subgraph of a single color class.
    pub fn color_view(&self, c: Color) -> GraphView<'_> {
        GraphView::new(self, ColorSet::single(c))
    }

    /// Minimum degree over all vertices, counting edges of every color.
    pub fn min_degree(&self) -> usize {
        self.view().min_degree()
    }

    /// Serializes to the `bcg` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("bcg {} {} {}\n", self.n1, self.n2, self.r);
        for row in self.colors.chunks(self.n2) {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the `bcg` text format: a `bcg <n1> <n2> <r>` header followed by
    /// `n1` lines of `n2` integers in `0..=r`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "bcg" {
            return Err(Error::parse(hl + 1, "expected `bcg <n1> <n2> <r>`"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(hl + 1, format!("bad number {s:?}")));
        let (n1, n2, r) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
        check_dims(n1, n2, r)?;
        let mut colors = Vec::with_capacity(n1 * n2);
        for x in 0..n1 {
            let (ln, line) = lines.next().ok_or_else(|| Error::parse(hl + 2 + x, format!("missing row {x}")))?;
            let before = colors.len();
            for tok in line.split_whitespace() {
                let c: usize = tok.parse().map_err(|_| Error::parse(ln + 1, format!("bad color {tok:?}")))?;
                if c > r {
                    return Err(Error::parse(ln + 1, format!("color {c} exceeds {r}")));
                }
                colors.push(c as Color);
            }
            if colors.len() - before != n2 {
                return Err(Error::parse(ln + 1, format!("expected {n2} entries, found {}", colors.len() - before)));
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln + 1, "trailing data after the last row"));
        }
        Ok(Self::from_parts(n1, n2, r, colors))
    }
}

fn check_dims(n1: usize, n2: usize, r: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || r == 0 || r > MAX_COLORS {
        return Err(Error::Dimensions { n1, n2, r });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n1: usize,
    n2: usize,
    r: usize,
    rows: Vec<Vec<Color>>,
}

impl Serialize for ColoredBipartiteGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr { n1: self.n1, n2: self.n2, r: self.r, rows: self.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredBipartiteGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        let g = Self::from_rows(repr.r, &repr.rows).map_err(serde::de::Error::custom)?;
        if g.n1 != repr.n1 || g.n2 != repr.n2 {
            return Err(serde::de::Error::custom("dimensions disagree with rows"));
        }
        Ok(g)
    }
}

/// Read-only subgraph: parent edges whose color is in `colors` and whose
/// endpoints lie in the vertex filters.
#[derive(Clone, Debug)]
pub struct GraphView<'a> {
    graph: &'a ColoredBipartiteGraph,
    colors: ColorSet,
    xs: FixedBitSet,
    ys: FixedBitSet,
}

impl<'a> GraphView<'a> {
    pub fn new(graph: &'a ColoredBipartiteGraph, colors: ColorSet) -> Self {
        let mut xs = FixedBitSet::with_capacity(graph.n1);
        xs.insert_range(..);
        let mut ys = FixedBitSet::with_capacity(graph.n2);
        ys.insert_range(..);
        GraphView { graph, colors, xs, ys }
    }

    /// Restricts the vertex filter to the given X and Y indices (intersected
    /// with the current filter). Out-of-range indices are ignored.
    pub fn restrict(&self, xs: impl IntoIterator<Item = usize>, ys: impl IntoIterator<Item = usize>) -> Self {
        let mut nx = FixedBitSet::with_capacity(self.graph.n1);
        for x in xs {
            if x < self.graph.n1 {
                nx.insert(x);
            }
        }
        nx.intersect_with(&self.xs);
        let mut ny = FixedBitSet::with_capacity(self.graph.n2);
        for y in ys {
            if y < self.graph.n2 {
                ny.insert(y);
            }
        }
        ny.intersect_with(&self.ys);
        GraphView { graph: self.graph, colors: self.colors, xs: nx, ys: ny }
    }

    /// Restricts to a set of named vertices.
    pub fn restrict_to(&self, vertices: &[Vertex]) -> Self {
        let xs = vertices.iter().filter(|v| v.side == Side::X).map(|v| v.index);
        let ys = vertices.iter().filter(|v| v.side == Side::Y).map(|v| v.index);
        self.restrict(xs.collect::<Vec<_>>(), ys.collect::<Vec<_>>())
    }

    pub fn graph(&self) -> &'a ColoredBipartiteGraph {
        self.graph
    }

    pub fn colors(&self) -> ColorSet {
        self.colors
    }

    pub fn x_filter(&self) -> &FixedBitSet {
        &self.xs
    }

    pub fn y_filter(&self) -> &FixedBitSet {
        &self.ys
    }

    pub fn xs(&self) -> impl Iterator<Item = usize> + '_ {
        self.xs.ones()
    }

    pub fn ys(&self) -> impl Iterator<Item = usize> + '_ {
        self.ys.ones()
    }

    /// All view vertices, X side first, ascending.
    pub fn vertices(&self) -> Vec<Vertex> {
        self.xs().map(Vertex::x).chain(self.ys().map(Vertex::y)).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.xs.count_ones(..) + self.ys.count_ones(..)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match v.side {
            Side::X => v.index < self.graph.n1 && self.xs.contains(v.index),
            Side::Y => v.index < self.graph.n2 && self.ys.contains(v.index),
        }
    }

    #[inline]
    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.xs.contains(x) && self.ys.contains(y) && self.colors.contains(self.graph.color(x, y))
    }

    /// Y-neighbors of `x` inside the view.
    pub fn x_neighbors(&self, x: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.graph.n2);
        if self.xs.contains(x) {
            for c in self.colors.iter().filter(|&c| (c as usize) <= self.graph.r) {
                out.union_with(self.graph.row(c, x));
            }
            out.intersect_with(&self.ys);
        }
        out
    }

    /// X-neighbors of `y` inside the view.
    pub fn y_neighbors(&self, y: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.graph.n1);
        if self.ys.contains(y) {
            for c in self.colors.iter().filter(|&c| (c as usize) <= self.graph.r) {
                out.union_with(self.graph.col(c, y));
            }
            out.intersect_with(&self.xs);
        }
        out
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        match v.side {
            Side::X => self.x_neighbors(v.index).ones().map(Vertex::y).collect(),
            Side::Y => self.y_neighbors(v.index).ones().map(Vertex::x).collect(),
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        if !self.contains(v) {
            return 0;
        }
        let colors = self.colors.iter().filter(|&c| (c as usize) <= self.graph.r);
        match v.side {
            Side::X => colors.map(|c| self.graph.row(c, v.index).intersection_count(&self.ys)).sum(),
            Side::Y => colors.map(|c| self.graph.col(c, v.index).intersection_count(&self.xs)).sum(),
        }
    }

    /// Adjacency lists (ascending) for every X index of the parent graph;
    /// vertices outside the view get empty lists.
    pub fn x_adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.graph.n1).map(|x| self.x_neighbors(x).ones().collect()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.xs().map(|x| self.degree(Vertex::x(x))).sum()
    }

    /// Minimum degree over all view vertices of both sides (0 for an empty view).
    pub fn min_degree(&self) -> usize {
        self.vertices().into_iter().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Connected components of the non-isolated view vertices, each sorted,
    /// ordered by their smallest vertex (X vertices precede Y vertices).
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let n1 = self.graph.n1;
        let mut seen = FixedBitSet::with_capacity(n1 + self.graph.n2);
        let mut out = Vec::new();
        for start in self.vertices() {
            let key = |v: Vertex| if v.side == Side::X { v.index } else { n1 + v.index };
            if seen.contains(key(start)) || self.degree(start) == 0 {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(key(start));
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for w in self.neighbors(v) {
                    if !seen.put(key(w)) {
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
