use crate::error::{invalid, Error, Result};
use crate::field::{FieldRef, ScalarField};

use super::{Domain, DomainKind};

/// Cutoff profile: 1 on `[0,1]`, 0 on `[3,∞)`, piecewise quadratic between
/// with a triangular derivative, so `|ψ|, |ψ'|, |ψ''| ≤ 1`.
pub fn cutoff_psi(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t <= 2.0 {
        1.0 - 0.5 * (t - 1.0) * (t - 1.0)
    } else if t < 3.0 {
        0.5 * (3.0 - t) * (3.0 - t)
    } else {
        0.0
    }
}

pub fn cutoff_psi_prime(t: f64) -> f64 {
    if t <= 1.0 || t >= 3.0 {
        0.0
    } else if t <= 2.0 {
        -(t - 1.0)
    } else {
        -(3.0 - t)
    }
}

/// `G(x) = ψ(r(x)/ε₀) · g(π_∂D(x))`, an extension of boundary data `g` to `D̄`.
#[derive(Clone)]
pub struct BoundaryExtension {
    domain: Domain,
    g: FieldRef,
    eps0: f64,
}

impl BoundaryExtension {
    pub fn new(domain: &Domain, g: FieldRef, eps0: f64) -> Result<Self> {
        if !(eps0 > 0.0) {
            return invalid(format!("eps0 must be positive, got {eps0}"));
        }
        let width = match domain.kind() {
            DomainKind::Ball { radius } => radius,
            DomainKind::Annulus { r0, r1 } => 0.5 * (r1 - r0),
            _ => {
                return Err(Error::Unsupported(
                    "boundary extension needs a closed-form projection (Ball or Annulus)".into(),
                ))
            }
        };
        if eps0 >= width {
            return invalid(format!("eps0 = {eps0} must be below the projection width {width}"));
        }
        Ok(Self { domain: domain.clone(), g, eps0 })
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
}

impl ScalarField for BoundaryExtension {
    fn eval(&self, x: &[f64]) -> f64 {
        let t = self.domain.distance_unchecked(x) / self.eps0;
        let psi = cutoff_psi(t);
        if psi == 0.0 {
            return 0.0;
        }
        match self.domain.project_to_boundary(x) {
            Ok(p) => psi * self.g.eval(&p),
            Err(_) => f64::NAN,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_shape() {
        assert_eq!(cutoff_psi(0.5), 1.0);
        assert_eq!(cutoff_psi(2.0), 0.5);
        assert_eq!(cutoff_psi(3.0), 0.0);
        let h = 1e-6;
        for i in 0..400 {
            let t = 0.01 * i as f64;
            assert!(cutoff_psi(t).abs() <= 1.0 && cutoff_psi_prime(t).abs() <= 1.0);
            let fd = (cutoff_psi(t + h) - cutoff_psi(t - h)) / (2.0 * h);
            assert!((fd - cutoff_psi_prime(t)).abs() < 1e-5);
        }
    }
}
