//! Explicit error bounds for the deterministic-step estimator and the
//! `(γ, η) → (ε₀, K, M, N)` planner.

use crate::error::{invalid, Error, Result};
use crate::geometry::Domain;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemData {
    pub g_inf: f64,
    pub g_alpha: f64,
    pub alpha: f64,
    pub f_inf: f64,
    pub f_alpha: f64,
    pub lap_g_inf: Option<f64>,
    pub diam: f64,
    pub adiam: Option<f64>,
    pub delta: Option<f64>,
    pub beta: f64,
    /// Lipschitz constant of r̃.
    pub r_tilde_lip: f64,
    pub dim: usize,
}

impl ProblemData {
    /// Domain constants filled in from `domain`, exact distance (β = 1, |r̃|₁ = 1),
    /// all data norms zero.
    pub fn for_domain(domain: &Domain) -> Self {
        let m = domain.metadata();
        Self {
            g_inf: 0.0,
            g_alpha: 0.0,
            alpha: 1.0,
            f_inf: 0.0,
            f_alpha: 0.0,
            lap_g_inf: None,
            diam: m.diam,
            adiam: m.adiam,
            delta: m.delta_defective,
            beta: 1.0,
            r_tilde_lip: 1.0,
            dim: domain.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let norms = [self.g_inf, self.g_alpha, self.f_inf, self.f_alpha, self.r_tilde_lip];
        if norms.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return invalid("norms must be finite and non-negative");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return invalid(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return invalid(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if let Some(delta) = self.delta {
            if !(0.0..1.0).contains(&delta) {
                return invalid(format!("delta must lie in [0, 1), got {delta}"));
            }
        }
        if !(self.diam > 0.0) || self.dim == 0 {
            return invalid("diam and dim must be positive");
        }
        Ok(())
    }

    fn d(&self) -> f64 {
        self.dim as f64
    }

    /// `|g|_α + (diam²|f|_α + 2 diam |f|∞)/d`, the Hölder constant of one trajectory.
    pub fn holder_coefficient(&self) -> f64 {
        self.g_alpha + (self.diam * self.diam * self.f_alpha + 2.0 * self.diam * self.f_inf) / self.d()
    }

    /// `4|g|∞ + 2 diam² |f|∞ / d`, the coefficient of the shell tail.
    pub fn tail_coefficient(&self) -> f64 {
        4.0 * self.g_inf + 2.0 * self.diam * self.diam * self.f_inf / self.d()
    }

    /// `1 − β²(1−δ)/(4d)`.
    pub fn defective_rate(&self) -> Result<f64> {
        let delta = self.delta.ok_or_else(|| {
            Error::Unsupported("defective-convexity constant δ is required".into())
        })?;
        Ok(1.0 - self.beta * self.beta * (1.0 - delta) / (4.0 * self.d()))
    }
}

/// Surrogate for the mean exit time near the boundary in the bias term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VSurrogate {
    /// `ε · adiam(D)`.
    EpsAdiam,
    /// `diam(D)² / d`.
    DiamSq,
    User(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// `exp(−β²ε²M/(4 diam²))`.
    General,
    /// `(1 − β²(1−δ)/(4d))^M √(diam/ε)`.
    Defective,
}

/// How the grid union bound divides by `C₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    /// `N((γ−A)⁺)²/C₂²`, as obtained from the single-point Hoeffding bound.
    Squared,
    /// `N((γ−A)⁺)²/C₂`.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub v: VSurrogate,
    pub c2_smooth: bool,
    pub tail: TailKind,
    pub denominator: Denominator,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { v: VSurrogate::EpsAdiam, c2_smooth: false, tail: TailKind::General, denominator: Denominator::Squared }
    }
}

/// `|v_D|∞ ≤ diam²/d`.
pub fn v_sup_bound(pd: &ProblemData) -> f64 {
    pd.diam * pd.diam / pd.d()
}

/// Mean exit time bound in the annulus `A(r0, r1)`: `dist · (r1 − r0) · r1/r0`.
pub fn annulus_exit_bound(r0: f64, r1: f64, dist: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0 < r1) {
        return invalid(format!("annulus needs 0 < r0 < r1, got r0 = {r0}, r1 = {r1}"));
    }
    if !(dist >= 0.0) {
        return invalid("distance must be non-negative");
    }
    Ok(dist * (r1 - r0) * r1 / r0)
}

/// `min(1, 2 exp(−β²ε²M/(4 diam²)))`.
pub fn shell_tail_general(m: usize, eps: f64, pd: &ProblemData) -> f64 {
    let e = pd.beta * pd.beta * eps * eps * m as f64 / (4.0 * pd.diam * pd.diam);
    (2.0 * (-e).exp()).min(1.0)
}

/// `(1 − β²(1−δ)/(4d))^M √(r(x)/ε)`, clamped to `[0, 1]`.
pub fn shell_tail_defective(m: usize, eps: f64, rx: f64, pd: &ProblemData) -> Result<f64> {
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    let q = pd.defective_rate()?;
    let v = (m as f64 * q.ln()).exp() * (rx.max(0.0) / eps).sqrt();
    Ok(v.clamp(0.0, 1.0))
}

fn v_value(v: VSurrogate, pd: &ProblemData, eps: f64) -> Result<f64> {
    match v {
        VSurrogate::EpsAdiam => pd
            .adiam
            .map(|a| eps * a)
            .ok_or_else(|| Error::Unsupported("v-surrogate eps*adiam needs adiam(D); choose diam^2/d or a user value".into())),
        VSurrogate::DiamSq => Ok(v_sup_bound(pd)),
        VSurrogate::User(v) if v >= 0.0 => Ok(v),
        VSurrogate::User(v) => invalid(format!("user v-surrogate must be >= 0, got {v}")),
    }
}

/// The factor multiplying the tail coefficient in the bias.
pub fn tail_factor(pd: &ProblemData, m: usize, eps: f64, tail: TailKind) -> Result<f64> {
    match tail {
        TailKind::General => {
            Ok((-(pd.beta * pd.beta * eps * eps * m as f64) / (4.0 * pd.diam * pd.diam)).exp())
        }
        TailKind::Defective => Ok((m as f64 * pd.defective_rate()?.ln()).exp() * (pd.diam / eps).sqrt()),
    }
}

/// Bound on `sup_D |u − u_M|`: boundary term plus shell-tail term.
pub fn stepdet_bound(pd: &ProblemData, m: usize, eps: f64, opts: &BoundOptions) -> Result<f64> {
    pd.validate()?;
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    let v = v_value(opts.v, pd, eps)?;
    let tail = tail_factor(pd, m, eps, opts.tail)?;
    if opts.c2_smooth {
        let lap = pd.lap_g_inf.ok_or_else(|| Error::Unsupported("C² variant needs |Δg|∞".into()))?;
        let coef = 8.0 * pd.g_inf + 2.0 * pd.diam * pd.diam * pd.f_inf / pd.d();
        Ok((0.5 * lap + pd.f_inf) * v + coef * tail)
    } else {
        let a = pd.alpha;
        Ok(pd.d().powf(a / 2.0) * pd.g_alpha * v.powf(a / 2.0) + pd.f_inf * v + pd.tail_coefficient() * tail)
    }
}

/// The bias term `A(M, K, d, ε)`: grid term plus [`stepdet_bound`].
pub fn bias_a(pd: &ProblemData, m: usize, k: u64, eps: f64, opts: &BoundOptions) -> Result<f64> {
    if k == 0 {
        return invalid("K must be at least 1");
    }
    let exponent = if opts.c2_smooth { 1.0 } else { pd.alpha };
    let grid = 2.0 * pd.holder_coefficient() * (pd.diam / k as f64).powf(exponent);
    Ok(grid + stepdet_bound(pd, m, eps, opts)?)
}

/// `C₁ = d(⌈M/α⌉ log(2 + |r̃|₁) + log K)`; `⌈M/α⌉ → M` for C² data.
pub fn c1(pd: &ProblemData, m: usize, k: u64, c2_smooth: bool) -> f64 {
    let steps = if c2_smooth { m as f64 } else { (m as f64 / pd.alpha).ceil() };
    pd.d() * (steps * (2.0 + pd.r_tilde_lip).ln() + (k as f64).ln())
}

/// `C₂ = |g|∞ + M diam² |f|∞ / d`, a bound on one trajectory's contribution.
pub fn c2(pd: &ProblemData, m: usize) -> f64 {
    pd.g_inf + m as f64 * pd.diam * pd.diam * pd.f_inf / pd.d()
}

fn exp_tail(c1: f64, n: usize, excess: f64, c2: f64, denom: Denominator) -> f64 {
    if excess <= 0.0 {
        return (2.0 * c1.exp()).min(1.0);
    }
    if c2 == 0.0 {
        return 0.0;
    }
    let den = match denom {
        Denominator::Squared => c2 * c2,
        Denominator::Linear => c2,
    };
    (2.0 * (c1 - n as f64 * excess * excess / den).exp()).min(1.0)
}

/// `P(sup_D |u − u_M^N| ≥ γ) ≤ min(1, 2 exp(C₁ − N((γ−A)⁺)²/C₂²))`.
pub fn tail_bound(gamma: f64, n: usize, m: usize, k: u64, eps: f64, pd: &ProblemData, opts: &BoundOptions) -> Result<f64> {
    if !(gamma > 0.0) {
        return invalid("gamma must be positive");
    }
    let a = bias_a(pd, m, k, eps, opts)?;
    Ok(exp_tail(c1(pd, m, k, opts.c2_smooth), n, gamma - a, c2(pd, m), opts.denominator))
}

/// Single-point Hoeffding bound `2 exp(−Nγ²/C₂²)` for `|u_M(x) − u_M^N(x)| ≥ γ`.
pub fn hoeffding_point(gamma: f64, n: usize, m: usize, pd: &ProblemData) -> f64 {
    let c = c2(pd, m);
    if c == 0.0 {
        return if gamma > 0.0 { 0.0 } else { 2.0 };
    }
    2.0 * (-(n as f64) * gamma * gamma / (c * c)).exp()
}

/// `E sup_D |u − u_M^N| ≤ A + B/√N`, `B = C₂ (√(C₁ + log 2) + 1)`.
pub fn expectation_bound(n: usize, m: usize, k: u64, eps: f64, pd: &ProblemData, opts: &BoundOptions) -> Result<f64> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    let a = bias_a(pd, m, k, eps, opts)?;
    let b = c2(pd, m) * ((c1(pd, m, k, opts.c2_smooth) + 2f64.ln()).sqrt() + 1.0);
    Ok(a + b / (n as f64).sqrt())
}

/// `E ‖u − u_M^N‖²_{L²} ≤ 2|D| [supBias² + 2(|g|∞² + M|f|∞² diam⁴/d³)/N]`.
pub fn l2_mean_bound(n: usize, m: usize, pd: &ProblemData, volume: f64, sup_bias: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return invalid("volume must be positive");
    }
    if n == 0 {
        return invalid("N must be at least 1");
    }
    let d = pd.d();
    let var = pd.g_inf * pd.g_inf + m as f64 * pd.f_inf * pd.f_inf * pd.diam.powi(4) / (d * d * d);
    Ok(2.0 * volume * (sup_bias * sup_bias + 2.0 * var / n as f64))
}

/// `1 + a/(1 − aδ_d) · √r(x)/√ε`, a bound on `E[a^{N_ε}]`.
pub fn mgf_diagnostic(a: f64, rx: f64, eps: f64, pd: &ProblemData) -> Result<f64> {
    let dd = pd.defective_rate()?;
    if !(a > 1.0 && a * dd < 1.0) {
        return invalid(format!("a must lie in (1, {}), got {a}", 1.0 / dd));
    }
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    Ok(1.0 + a / (1.0 - a * dd) * rx.max(0.0).sqrt() / eps.sqrt())
}

/// Coefficient `k` in `ε₀ = [1 + 4k·adiam ∨ 1]^{−2/α} γ^{2/α}/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonCoefficient {
    /// `4(|g|_α + |f|∞)`.
    #[default]
    Joint,
    /// `4|g|_α + |f|∞`.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WosPlan {
    pub eps0: f64,
    pub k: u64,
    pub m: u64,
    pub n: u64,
    pub gamma: f64,
    pub eta: f64,
    pub beta: f64,
    pub defective: bool,
}

fn ceil_count(v: f64) -> Result<u64> {
    if !v.is_finite() || v > 9.0e18 {
        return Err(Error::Limit(format!("planned count {v} does not fit in 64 bits")));
    }
    Ok((v.ceil() as u64).max(1))
}

pub fn plan_eps0(gamma: f64, pd: &ProblemData, coef: EpsilonCoefficient) -> Result<f64> {
    let adiam = pd.adiam.ok_or_else(|| {
        Error::Unsupported("planner needs adiam(D) (uniform exterior ball) to set eps0".into())
    })?;
    let k = match coef {
        EpsilonCoefficient::Joint => 4.0 * (pd.g_alpha + pd.f_inf),
        EpsilonCoefficient::Split => 4.0 * pd.g_alpha + pd.f_inf,
    };
    let base = (1.0 + k * adiam).max(1.0);
    let p = 2.0 / pd.alpha;
    Ok(base.powf(-p) * gamma.powf(p) / pd.d())
}

pub fn plan_k(gamma: f64, pd: &ProblemData) -> Result<u64> {
    ceil_count(pd.diam * ((8.0 * pd.holder_coefficient() + 1.0) / gamma).powf(1.0 / pd.alpha))
}

/// Step count from the general exponential shell tail.
pub fn plan_m_general(gamma: f64, eps0: f64, pd: &ProblemData) -> Result<u64> {
    let c = pd.tail_coefficient();
    if c == 0.0 {
        return Ok(1);
    }
    let num = ((4.0 / gamma).ln() + c.ln()) * 4.0 * pd.diam * pd.diam;
    ceil_count(num / (pd.beta * pd.beta * eps0 * eps0))
}

/// Step count from the defective-convex geometric shell tail.
pub fn plan_m_defective(gamma: f64, eps0: f64, pd: &ProblemData) -> Result<u64> {
    let delta = pd.delta.ok_or_else(|| {
        Error::Unsupported("defective planning needs the defective-convexity constant delta".into())
    })?;
    let c = pd.tail_coefficient();
    if c == 0.0 {
        return Ok(1);
    }
    let num = 4.0 * pd.d() * ((4.0 / gamma * (pd.diam / eps0).sqrt()).ln() + c.ln());
    ceil_count(num / (pd.beta * pd.beta * (1.0 - delta)))
}

pub fn plan_n(gamma: f64, eta: f64, m: u64, k: u64, pd: &ProblemData) -> Result<u64> {
    let steps = (m as f64 / pd.alpha).ceil();
    let c1 = pd.d() * (steps * (2.0 + pd.r_tilde_lip).ln() + (k as f64).ln()) + (2.0 / eta).ln();
    let c2 = c2(pd, m as usize);
    ceil_count(16.0 * c1 * c2 * c2 / (9.0 * gamma * gamma))
}

/// Chooses `(ε₀, K, M, N)` so that `P(sup_D |u − u_M^N| ≥ γ) ≤ η`.
pub fn plan(gamma: f64, eta: f64, pd: &ProblemData, defective: bool) -> Result<WosPlan> {
    plan_with(gamma, eta, pd, defective, EpsilonCoefficient::Joint)
}

pub fn plan_with(gamma: f64, eta: f64, pd: &ProblemData, defective: bool, coef: EpsilonCoefficient) -> Result<WosPlan> {
    pd.validate()?;
    if !(gamma > 0.0 && gamma < 1.0) || !(eta > 0.0 && eta < 1.0) {
        return invalid("gamma and eta must lie in (0, 1)");
    }
    let mut missing = Vec::new();
    if pd.adiam.is_none() {
        missing.push("adiam (uniform exterior ball) for eps0");
    }
    if defective && pd.delta.is_none() {
        missing.push("delta (defective convexity) for M");
    }
    if !missing.is_empty() {
        return Err(Error::Unsupported(format!("planner requires: {}", missing.join(", "))));
    }
    let eps0 = plan_eps0(gamma, pd, coef)?;
    let k = plan_k(gamma, pd)?;
    let m = if defective { plan_m_defective(gamma, eps0, pd)? } else { plan_m_general(gamma, eps0, pd)? };
    let n = plan_n(gamma, eta, m, k, pd)?;
    Ok(WosPlan { eps0, k, m, n, gamma, eta, beta: pd.beta, defective })
}

impl WosPlan {
    /// Re-checks the defining inequalities of the plan.
    pub fn satisfies(&self, pd: &ProblemData) -> bool {
        let gamma = self.gamma;
        let holder = pd.holder_coefficient();
        let k_ok = 2.0 * holder * (pd.diam / self.k as f64).powf(pd.alpha) <= gamma / 4.0 * (1.0 + 1e-12);
        let tail = if self.defective {
            tail_factor(pd, self.m as usize, self.eps0, TailKind::Defective)
        } else {
            tail_factor(pd, self.m as usize, self.eps0, TailKind::General)
        };
        let m_ok = matches!(tail, Ok(t) if pd.tail_coefficient() * t <= gamma / 4.0 * (1.0 + 1e-9));
        let n_ok = plan_n(gamma, self.eta, self.m, self.k, pd).map_or(false, |n| self.n >= n);
        k_ok && m_ok && n_ok
    }

    pub fn regime(&self) -> &'static str {
        if self.defective {
            "defective convex: M in O(d log(d/gamma)), N in O(log^2(d/gamma) (d^2 log(d/gamma) + log(1/eta)) / gamma^2)"
        } else {
            "uniform exterior ball: M in O(d^2 log(1/gamma) / gamma^(4/alpha)), N in O(d^4 log^4(1/gamma) / gamma^(2+4/alpha))"
        }
    }
}
