//! Symbolic Noetherian topologies: spaces, open and closed set expressions,
//! topology expanders with fixed-point iteration, divisibility topologies of
//! inductive datatypes, and backward coverability for well-structured
//! transition systems.

pub mod error;
pub mod exec;
pub mod expanders;
pub mod inductive;
pub mod ordinal;
pub mod sets;
pub mod sexpr;
pub mod space;
pub mod syntax;
pub mod universe;
pub mod wsts;

pub use error::{Error, Result};
pub use ordinal::Ordinal;
