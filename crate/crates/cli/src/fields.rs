//! Expressions and networks as walk data.

use std::sync::Arc;

use wos_core::field::{field, FieldRef};
use wos_core::{Domain, ScalarField, SurrogateDistance};

use crate::expr::Expr;

pub struct ExprField(pub Expr);

impl ScalarField for ExprField {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }
}

pub fn expr_field(e: &Expr) -> FieldRef {
    Arc::new(ExprField(e.clone()))
}

/// `r̃ = β r`; the exact distance for `β = 1`.
pub fn scaled_surrogate(domain: &Domain, beta: f64) -> wos_core::Result<SurrogateDistance> {
    if beta == 1.0 {
        return Ok(SurrogateDistance::from_exact(domain));
    }
    let dom = domain.clone();
    SurrogateDistance::from_fn(field(move |x: &[f64]| beta * dom.distance_unchecked(x)), beta, 0.0)
}
