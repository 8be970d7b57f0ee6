use std::fmt;

use crate::error::{invalid, Result};
use crate::field::FieldRef;

use super::Domain;

#[derive(Clone)]
pub enum SurrogateBase {
    Exact(Domain),
    /// `r̃ = (φ_r − ε_r)⁺` for an approximation `φ_r` with `|φ_r − r|∞ ≤ ε_r`.
    Approx { phi: FieldRef, eps_r: f64 },
    /// A ready-made `r̃`, e.g. a network.
    Direct(FieldRef),
}

impl fmt::Debug for SurrogateBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(d) => f.debug_tuple("Exact").field(d).finish(),
            Self::Approx { eps_r, .. } => f.debug_struct("Approx").field("eps_r", eps_r).finish(),
            Self::Direct(_) => f.write_str("Direct"),
        }
    }
}

/// A (β,ε)-distance: `0 ≤ r̃ ≤ r`, and `r̃ ≥ β r` where `r ≥ ε`.
#[derive(Debug, Clone)]
pub struct SurrogateDistance {
    base: SurrogateBase,
    beta: f64,
    eps_shell: f64,
}

impl SurrogateDistance {
    /// The exact distance, a (1, 0)-distance.
    pub fn from_exact(domain: &Domain) -> Self {
        Self { base: SurrogateBase::Exact(domain.clone()), beta: 1.0, eps_shell: 0.0 }
    }

    /// `(φ_r − ε_r)⁺`, a (1/3, 3ε_r)-distance when `|φ_r − r|∞ ≤ ε_r`.
    pub fn from_approx(phi: FieldRef, eps_r: f64) -> Result<Self> {
        if !(eps_r >= 0.0) || !eps_r.is_finite() {
            return invalid(format!("eps_r must be finite and >= 0, got {eps_r}"));
        }
        Ok(Self {
            base: SurrogateBase::Approx { phi, eps_r },
            beta: 1.0 / 3.0,
            eps_shell: 3.0 * eps_r,
        })
    }

    /// A caller-certified (β, ε)-distance.
    pub fn from_fn(r_tilde: FieldRef, beta: f64, eps_shell: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return invalid(format!("beta must lie in (0, 1], got {beta}"));
        }
        if !(eps_shell >= 0.0) {
            return invalid(format!("eps_shell must be >= 0, got {eps_shell}"));
        }
        Ok(Self { base: SurrogateBase::Direct(r_tilde), beta, eps_shell })
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.base {
            SurrogateBase::Exact(d) => d.distance_unchecked(x),
            SurrogateBase::Approx { phi, eps_r } => (phi.eval(x) - eps_r).max(0.0),
            SurrogateBase::Direct(r) => r.eval(x),
        }
    }

    pub fn base(&self) -> &SurrogateBase {
        &self.base
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eps_shell(&self) -> f64 {
        self.eps_shell
    }

    pub fn eps_r(&self) -> f64 {
        match self.base {
            SurrogateBase::Approx { eps_r, .. } => eps_r,
            _ => 0.0,
        }
    }
}
