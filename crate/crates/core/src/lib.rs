//! Computational toolkit for bipartite Ramsey problems on even cycles.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`] holds r-edge-colored bipartite graphs and read-only views.
//! * [`constructions`] generates the two explicit extremal colorings.
//! * [`cycle`] finds and verifies monochromatic cycles of an exact even length.
//! * [`matching`] and [`tutte`] cover maximum and connected matchings and the
//!   `{S, T, U}` structure certificate for graphs without large matchings.
//! * [`regularity`] computes densities, epsilon-regularity, typical vertices and
//!   reduced graphs over a supplied cluster partition.
//! * [`embed`] turns a connected matching of a reduced graph into a verified long
//!   monochromatic cycle.
//! * [`ramsey`] decides small bipartite Ramsey statements exhaustively.
//!
//! Data-parallel loops go through [`Exec`]; with the `parallel` feature disabled
//! every strategy runs sequentially and produces identical results.

pub mod budget;
pub mod constructions;
pub mod cycle;
pub mod embed;
mod error;
pub mod exec;
pub mod graph;
pub mod matching;
pub mod ramsey;
pub mod random;
pub mod regularity;
pub mod tutte;

pub use budget::Budget;
pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{Color, ColorSet, ColoredBipartiteGraph, GraphView, Side, Vertex};
