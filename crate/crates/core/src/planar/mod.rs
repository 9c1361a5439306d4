//! Planar instance generation and exact-verification reconstruction.

pub mod generate;
pub mod reconstruct;

pub use generate::{generate_planar, PlanarConfig};
pub use reconstruct::{
    reattachment_candidates, reattachment_requirements, reconstruct_planar, Candidate,
    AMBIGUITY_CAP,
};
