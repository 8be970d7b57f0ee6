//! Scalar fields `R^d -> R` used as source terms, boundary data and distance surrogates.

use std::sync::Arc;

pub trait ScalarField: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

/// Wraps a closure.
pub struct FnField<F>(pub F);

impl<F> ScalarField for FnField<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstField(pub f64);

impl ScalarField for ConstField {
    fn eval(&self, _x: &[f64]) -> f64 {
        self.0
    }
}

pub type FieldRef = Arc<dyn ScalarField>;

pub fn field<F>(f: F) -> FieldRef
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    Arc::new(FnField(f))
}

pub fn constant(c: f64) -> FieldRef {
    Arc::new(ConstField(c))
}
