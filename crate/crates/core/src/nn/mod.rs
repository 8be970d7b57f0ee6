//! ReLU networks with exact size accounting, the calculus used to build the
//! solution network, and the assembly of that network for frozen draws.

pub mod assemble;
pub mod builders;
pub mod calculus;
pub mod extension;
pub mod net;
pub mod product;

pub use assemble::{assemble_solution_net, AssembledNet, FrozenRandomness, SizeAudit};
pub use builders::{chain_net, hypercube_distance_net, pwl_net, step_net, surrogate_net};
pub use calculus::{augment, compose, identity, linear_combine, stack};
pub use net::{Layer, ReluNet};
pub use product::product_net;

use crate::field::ScalarField;

/// A scalar network used as a field (e.g. as `g`, `f` or `r̃` in a walk).
#[derive(Debug, Clone)]
pub struct NetField(pub ReluNet);

impl ScalarField for NetField {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval_unchecked(x)[0]
    }
}
