//! Domains, distances to the boundary and objects derived from them.

mod domain;
mod extension;
mod surrogate;
mod transform;

pub use domain::{l1_ball_distance, Domain, DomainKind, DomainMetadata};
pub use extension::{cutoff_psi, cutoff_psi_prime, BoundaryExtension};
pub use surrogate::{SurrogateBase, SurrogateDistance};
pub use transform::anisotropic_transform;
