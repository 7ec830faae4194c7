//! Graph embedding algorithms from extremal Ramsey theory, with exhaustive
//! small-case oracles for Ramsey, weighted Ramsey and stable Ramsey numbers.

pub mod arith;
pub mod bandwidth;
pub mod codec;
pub mod embed;
pub mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod morphisms;
pub mod oracles;
pub mod regularity;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{Color, EdgeColoring, Graph, Rational, VertexSet, WeightedGraph};
pub use morphisms::VertexMap;
