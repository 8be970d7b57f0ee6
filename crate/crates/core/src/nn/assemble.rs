//! The frozen-randomness solution network
//!
//! `𝕌(x) = 1/N Σ_i [ φ_g(θ_M^i(x)) + 1/d Σ_{k=1..M} Π(Π(r̃(θ_{k−1}^i), r̃(θ_{k−1}^i)), φ_f(θ_{k−1}^i + r̃(θ_{k−1}^i) Y^i)) ]`
//!
//! where `θ_k^i` is the chain of trajectory `i` for its frozen directions.

use super::builders::{chain_nets, chain_size_bound, step_net};
use super::calculus::{augment_to, compose, linear_combine, stack};
use super::net::ReluNet;
use super::product::product_net;
use crate::error::{check_dim, invalid, Error, Result};
use crate::sampling::TrajectoryDraws;
use crate::wos::WosConfig;

pub const DEFAULT_PARAMETER_CAP: usize = 100_000_000;

/// The draws `{U_{n,i}} ∪ {Y^i}` for `n ≤ M`, `i ≤ N`. They are regenerated
/// from the keyed streams on demand and are identical to the draws of
/// [`crate::wos`] under the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrozenRandomness {
    pub seed: u64,
    pub steps: usize,
    pub trajectories: usize,
}

impl FrozenRandomness {
    pub fn from_config(cfg: &WosConfig) -> Self {
        Self { seed: cfg.seed, steps: cfg.steps, trajectories: cfg.trajectories }
    }

    /// Draws of trajectory `i` (1-based).
    pub fn draws(&self, i: usize, d: usize, with_green: bool) -> TrajectoryDraws {
        TrajectoryDraws::generate(self.seed, i as u64, self.steps, d, with_green)
    }
}

/// Measured shape of the network next to the explicit counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeAudit {
    pub size: usize,
    pub width: usize,
    pub depth: usize,
    /// Explicit count assembled lemma by lemma.
    pub size_bound: usize,
    /// The first trajectory's measured size times `N`, checked against the cap.
    pub predicted_size: usize,
}

impl SizeAudit {
    pub fn within_bound(&self) -> bool {
        self.size <= self.size_bound
    }
}

#[derive(Debug, Clone)]
pub struct AssembledNet {
    pub net: ReluNet,
    pub audit: SizeAudit,
}

/// Product of two scalar nets, `Π(φ_1, φ_2)`, after augmenting to a common depth.
pub fn product_of_nets(a: &ReluNet, b: &ReluNet, pi: &ReluNet) -> Result<ReluNet> {
    let depth = a.depth().max(b.depth());
    let s = stack(&[augment_to(a, depth)?, augment_to(b, depth)?])?;
    compose(pi, &s)
}

/// `4s_1 + 4s_2 + 2 size(Π) + 4|ℒ_1 − ℒ_2|` for scalar factors.
pub fn product_of_nets_bound(s1: usize, l1: usize, s2: usize, l2: usize, pi_size: usize) -> usize {
    4 * s1 + 4 * s2 + 2 * pi_size + 4 * l1.abs_diff(l2)
}

/// Builds `𝕌` for the frozen draws `omega`.
///
/// `eps_p` and `c` are the accuracy and range of the product nets; `c` must
/// cover `r̃`, `r̃²` and `φ_f` on the domain (the caller asserts this).
#[allow(clippy::too_many_arguments)]
pub fn assemble_solution_net(
    cfg: &WosConfig,
    omega: &FrozenRandomness,
    phi_g: &ReluNet,
    phi_f: Option<&ReluNet>,
    r_tilde: &ReluNet,
    eps_p: f64,
    c: f64,
    cap: usize,
) -> Result<AssembledNet> {
    let d = cfg.dim();
    for (name, net) in [("phi_g", phi_g), ("r_tilde", r_tilde)].into_iter().chain(phi_f.map(|f| ("phi_f", f))) {
        check_dim(d, net.input_dim()).map_err(|e| Error::InvalidInput(format!("{name}: {e}")))?;
        if net.output_dim() != 1 {
            return invalid(format!("{name} must have a scalar output"));
        }
    }
    if !(eps_p > 0.0) {
        return invalid(format!("eps_p must be positive, got {eps_p}"));
    }
    if omega.trajectories == 0 {
        return invalid("number of trajectories must be at least 1");
    }
    let m = omega.steps;
    let n = omega.trajectories;
    let pi = match phi_f {
        Some(_) if m > 0 => Some(product_net(c, eps_p.min(0.5))?),
        _ => None,
    };

    let mut per_traj: Vec<Vec<(ReluNet, f64)>> = Vec::with_capacity(n);
    let mut bound_terms: Vec<(usize, usize, f64)> = Vec::new();
    let mut predicted = 0usize;
    for i in 1..=n {
        let draws = omega.draws(i, d, phi_f.is_some());
        let dirs: Vec<Vec<f64>> = (1..=m).map(|k| draws.direction(k).to_vec()).collect();
        let thetas = chain_nets(r_tilde, &dirs)?;
        let mut terms = Vec::with_capacity(m + 1);

        let g_term = compose(phi_g, &thetas[m])?;
        bound_terms.push((2 * phi_g.size() + 2 * chain_size_bound(r_tilde, m), g_term.depth(), 1.0 / n as f64));
        terms.push((g_term, 1.0 / n as f64));

        if let (Some(phi_f), Some(pi)) = (phi_f, pi.as_ref()) {
            let y_step = step_net(r_tilde, &draws.green)?;
            for k in 1..=m {
                let theta = &thetas[k - 1];
                let r_at = compose(r_tilde, theta)?;
                let r_sq = product_of_nets(&r_at, &r_at, pi)?;
                let f_at = compose(phi_f, &compose(&y_step, theta)?)?;
                let term = product_of_nets(&r_sq, &f_at, pi)?;

                // explicit counts, lemma by lemma
                let b_r = 2 * r_tilde.size() + 2 * chain_size_bound(r_tilde, k - 1);
                let b_rsq = product_of_nets_bound(b_r, r_at.depth(), b_r, r_at.depth(), pi.size());
                let b_f = 2 * phi_f.size() + 2 * chain_size_bound(r_tilde, k);
                let b_term = product_of_nets_bound(b_rsq, r_sq.depth(), b_f, f_at.depth(), pi.size());
                let coef = 1.0 / (d as f64 * n as f64);
                bound_terms.push((b_term, term.depth(), coef));
                terms.push((term, coef));
            }
        }
        if i == 1 {
            predicted = terms.iter().map(|(t, _)| t.size()).sum::<usize>().saturating_mul(n);
            if predicted > cap {
                return Err(Error::Limit(format!(
                    "predicted network size {predicted} exceeds the parameter cap {cap}; reduce M, N or d"
                )));
            }
        }
        per_traj.push(terms);
    }

    let depth = per_traj.iter().flatten().map(|(t, _)| t.depth()).max().unwrap();
    let mut nets = Vec::with_capacity(per_traj.iter().map(Vec::len).sum());
    let mut coeffs = Vec::with_capacity(nets.capacity());
    for (t, a) in per_traj.into_iter().flatten() {
        nets.push(augment_to(&t, depth)?);
        coeffs.push(a);
    }
    let net = linear_combine(&nets, &coeffs)?;
    let size_bound = bound_terms
        .iter()
        .map(|&(s, l, _)| if l == depth { s } else { 2 * s + 2 * (depth - l) })
        .sum();
    let audit = SizeAudit { size: net.size(), width: net.width(), depth: net.depth(), size_bound, predicted_size: predicted };
    Ok(AssembledNet { net, audit })
}
