//! Walk-on-spheres Monte Carlo for the Dirichlet Poisson problem
//! `½Δu = −f` in `D`, `u = g` on `∂D`.
//!
//! The crate is split into:
//! - [`geometry`]: domains, exact distances, (β,ε)-distance surrogates, boundary extension
//! - [`sampling`]: counter-based random streams, sphere directions, the Green measure
//! - [`wos`]: the walk, the deterministic-step estimator and exit statistics
//! - [`bounds`]: explicit error bounds and the (γ,η) parameter planner
//! - [`nn`]: ReLU networks, their calculus, and the frozen-randomness solution network

pub mod bounds;
pub mod error;
pub mod field;
pub mod geometry;
pub mod nn;
pub mod sampling;
pub mod summation;
pub mod wos;

pub use error::{Error, Result};
pub use field::{ConstField, FnField, ScalarField};
pub use geometry::{Domain, DomainKind, DomainMetadata, SurrogateDistance};
pub use sampling::{Channel, StreamKey};
pub use wos::{EstimateResult, ExitStats, WosConfig};
