//! Sawtooth approximation of squares and products.
//!
//! On `[0, 1]`, `t² ≈ f_m(t) = t − Σ_{s=1..m} g_s(t)/4^s` with `g_s` the
//! `s`-fold tent map, uniformly to `2^{−2m−2}`. Each refinement level keeps
//! three tent units `σ(h), σ(h−½), σ(h−1)` and one carry unit `σ(f_{s−1})`
//! (partial sums are non-negative, so the carry passes through σ unchanged).

use super::net::{Layer, ReluNet};
use crate::error::{invalid, Result};

type Trips = Vec<(usize, usize, f64)>;

/// Documented constant in `size(Π) ≤ κ (log₂(1/δ) + log₂(max(c, 2)) + 1)`.
pub const PRODUCT_SIZE_KAPPA: f64 = 64.0;

/// `Σ_j κ_j (w_j · x)²` up to `Σ|κ_j| s² 2^{−2m−2}`, valid while `|w_j · x| ≤ s`.
/// Depth `m + 2`.
pub fn abs_square_sum(input_dim: usize, features: &[Vec<(usize, f64)>], coeffs: &[f64], s: f64, m: usize) -> Result<ReluNet> {
    if m == 0 || !(s > 0.0) || features.is_empty() || features.len() != coeffs.len() {
        return invalid("abs_square_sum needs m >= 1, s > 0 and one coefficient per feature");
    }
    let nf = features.len();
    let mut layers = Vec::with_capacity(m + 2);

    // |w_j x| = σ(w_j x) + σ(−w_j x)
    let mut t = Trips::new();
    for (j, f) in features.iter().enumerate() {
        for &(i, w) in f {
            if i >= input_dim {
                return invalid(format!("feature uses input {i} of {input_dim}"));
            }
            t.push((2 * j, i, w));
            t.push((2 * j + 1, i, -w));
        }
    }
    layers.push(Layer::from_triplets(2 * nf, input_dim, t, vec![0.0; 2 * nf])?);

    // level 1: tent units of t_j = |w_j x| / s; the carry f_0 = t_j is unit 0
    let mut t = Trips::new();
    let mut bias = Vec::with_capacity(3 * nf);
    for j in 0..nf {
        for (k, b) in [0.0, -0.5, -1.0].into_iter().enumerate() {
            t.push((3 * j + k, 2 * j, 1.0 / s));
            t.push((3 * j + k, 2 * j + 1, 1.0 / s));
            bias.push(b);
        }
    }
    layers.push(Layer::from_triplets(3 * nf, 2 * nf, t, bias)?);

    // previous level layout: tent units at `base`, carry at `carry`
    let prev = |level: usize, j: usize| -> (usize, usize, usize) {
        if level == 1 {
            (3 * j, 3 * j, 3)
        } else {
            (4 * j, 4 * j + 3, 4)
        }
    };
    for level in 2..=m {
        let inv = 0.25f64.powi(level as i32 - 1);
        let mut t = Trips::new();
        let mut bias = Vec::with_capacity(4 * nf);
        for j in 0..nf {
            let (base, carry, _) = prev(level - 1, j);
            let tent = [(base, 2.0), (base + 1, -4.0), (base + 2, 2.0)];
            for (k, b) in [0.0, -0.5, -1.0].into_iter().enumerate() {
                t.extend(tent.iter().map(|&(c, w)| (4 * j + k, c, w)));
                bias.push(b);
            }
            // f_{s-1} = f_{s-2} − g_{s-1}/4^{s-1}
            t.push((4 * j + 3, carry, 1.0));
            t.extend(tent.iter().map(|&(c, w)| (4 * j + 3, c, -w * inv)));
            bias.push(0.0);
        }
        let cols = if level == 2 { 3 * nf } else { 4 * nf };
        layers.push(Layer::from_triplets(4 * nf, cols, t, bias)?);
    }

    let inv = 0.25f64.powi(m as i32);
    let mut t = Trips::new();
    for (j, &kj) in coeffs.iter().enumerate() {
        let (base, carry, _) = prev(m, j);
        let a = kj * s * s;
        t.push((0, carry, a));
        for (c, w) in [(base, 2.0), (base + 1, -4.0), (base + 2, 2.0)] {
            t.push((0, c, -a * w * inv));
        }
    }
    let cols = if m == 1 { 3 * nf } else { 4 * nf };
    layers.push(Layer::from_triplets(1, cols, t, vec![0.0])?);
    ReluNet::new(layers)
}

/// Least `m ≥ 1` with `weight · 2^{−2m−2} ≤ delta`.
pub fn levels_for(weight: f64, delta: f64) -> usize {
    let mut m = 1;
    while weight * 0.25f64.powi(m as i32 + 1) > delta && m < 200 {
        m += 1;
    }
    m
}

/// `Π_δ^c(a, b) = 2c² [q(|a+b|/2c) − q(|a|/2c) − q(|b|/2c)]` with `q ≈ t²`.
/// Error at most `δ` on `[−c, c]²`; `Π(a, 0) = Π(0, b) = 0` up to rounding.
pub fn product_net(c: f64, delta: f64) -> Result<ReluNet> {
    if !(c > 0.0) || !c.is_finite() {
        return invalid(format!("product range c must be positive, got {c}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("product accuracy must lie in (0, 1), got {delta}"));
    }
    let m = levels_for(6.0 * c * c, delta);
    abs_square_sum(2, &[vec![(0, 1.0), (1, 1.0)], vec![(0, 1.0)], vec![(1, 1.0)]], &[0.5, -0.5, -0.5], 2.0 * c, m)
}

/// Sup error guaranteed by [`product_net`] for given `(c, δ)`.
pub fn product_error(c: f64, delta: f64) -> f64 {
    6.0 * c * c * 0.25f64.powi(levels_for(6.0 * c * c, delta) as i32 + 1)
}

/// `|x|²` on `[−c, c]^d` up to `d c² 2^{−2m−2}`, `m` chosen for `delta`.
pub fn sum_of_squares_net(d: usize, c: f64, delta: f64) -> Result<ReluNet> {
    let features: Vec<Vec<(usize, f64)>> = (0..d).map(|i| vec![(i, 1.0)]).collect();
    let m = levels_for(d as f64 * c * c, delta);
    abs_square_sum(d, &features, &vec![1.0; d], c, m)
}

pub fn product_size_bound(c: f64, delta: f64) -> f64 {
    PRODUCT_SIZE_KAPPA * ((1.0 / delta).log2() + c.max(2.0).log2() + 1.0)
}
