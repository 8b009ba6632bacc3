//! Exact computations with piecewise-linear Markov maps on topological
//! graphs: disconnection invariants, certified topological entropy,
//! transitivity, horseshoes, low-entropy constructions and specification
//! witnesses.

pub mod acceptance;
pub mod construct;
pub mod error;
pub mod graph;
pub mod io;
pub mod logval;
pub mod plmap;
pub mod rational;
pub mod specprop;

pub use error::{Error, Result};
