pub mod bipartite;
pub mod combinatorics;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod involutions;
pub mod latin;
pub mod planar;
pub mod rng;
pub mod rota;
pub use error::{Error, Result};
