//! Network realization of the cut-off boundary extension
//! `G = ψ(r/ε₀) · g(π(x))`.

use super::assemble::product_of_nets;
use super::calculus::{compose, scale_output};
use super::net::ReluNet;
use super::product::product_net;
use crate::error::{invalid, Result};

/// Component accuracies `|ψ − φ_ψ|∞ ≤ δ_ψ` etc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionErrors {
    pub psi: f64,
    pub r: f64,
    pub g: f64,
    pub pi: f64,
}

/// `δ̄ = 2(3δ_ψ + δ_r/ε₀)|g|∞ + 2(3δ_g + |∇g|∞ δ_π)(δ_ψ + 1)`.
pub fn extension_error_bound(e: &ExtensionErrors, eps0: f64, g_inf: f64, grad_g_inf: f64) -> f64 {
    2.0 * (3.0 * e.psi + e.r / eps0) * g_inf + 2.0 * (3.0 * e.g + grad_g_inf * e.pi) * (e.psi + 1.0)
}

/// `φ_G = Π(φ_ψ(φ_r/ε₀), φ_g ∘ φ_π)` with a product net of range `c` and
/// accuracy `delta_p`.
///
/// `φ_ψ` maps `R → R`, `φ_r` and `φ_g` are scalar on `R^d` and `R^d`, `φ_π`
/// maps `R^d → R^d`. `c` must bound both factors.
pub fn extension_net(
    phi_psi: &ReluNet,
    phi_r: &ReluNet,
    phi_g: &ReluNet,
    phi_pi: &ReluNet,
    eps0: f64,
    c: f64,
    delta_p: f64,
) -> Result<ReluNet> {
    if !(eps0 > 0.0) {
        return invalid("eps0 must be positive");
    }
    if phi_psi.input_dim() != 1 || phi_psi.output_dim() != 1 || phi_r.output_dim() != 1 || phi_g.output_dim() != 1 {
        return invalid("phi_psi must map R -> R; phi_r and phi_g must be scalar");
    }
    let cut = compose(phi_psi, &scale_output(phi_r, 1.0 / eps0))?;
    let data = compose(phi_g, phi_pi)?;
    if cut.input_dim() != data.input_dim() {
        return invalid(format!(
            "phi_r has input dim {} but phi_pi has input dim {}",
            cut.input_dim(),
            data.input_dim()
        ));
    }
    product_of_nets(&cut, &data, &product_net(c, delta_p)?)
}
