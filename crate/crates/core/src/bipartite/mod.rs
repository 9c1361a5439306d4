//! Reconstruction of bipartite graphs from decks with rows and columns
//! relabelled independently.

pub mod flow;
pub mod profile;
pub mod reconstruct;

pub use profile::{local_types, neighbor_profile, remove_from_profile, VertexType};
pub use reconstruct::{reconstruct_bipartite, requirements, Requirements};
