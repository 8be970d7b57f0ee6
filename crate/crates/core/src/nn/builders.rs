//! Concrete networks: one WoS step, the frozen chain `θ_M`, the exact
//! hypercube distance, the truncated surrogate and 1-d interpolants.

use super::calculus::{compose, identity, relu_shift};
use super::net::{Layer, ReluNet};
use crate::error::{check_dim, invalid, Error, Result};

type Trips = Vec<(usize, usize, f64)>;

fn layer(rows: usize, cols: usize, trips: Trips, bias: Vec<f64>) -> Layer {
    Layer::from_triplets(rows, cols, trips, bias).expect("internal layer construction")
}

/// `x ↦ x + φ(x) v`, depth `ℒ(φ) + 1`.
pub fn step_net(phi: &ReluNet, v: &[f64]) -> Result<ReluNet> {
    if phi.output_dim() != 1 {
        return invalid("step_net needs a scalar network");
    }
    let d = phi.input_dim();
    check_dim(d, v.len())?;
    let depth = phi.depth();
    let mut layers = Vec::with_capacity(depth + 1);
    for (n, l) in phi.layers().iter().enumerate() {
        let last = n + 1 == depth;
        let (prows, pcols) = (if last { 2 } else { l.rows() }, l.cols());
        let mut t = Trips::new();
        let mut bias = Vec::with_capacity(prows + 2 * d);
        t.extend(l.entries());
        bias.extend_from_slice(l.bias());
        if last {
            t.extend(l.entries().map(|(i, j, w)| (i + 1, j, -w)));
            bias.push(-l.bias()[0]);
        }
        let (carry_col, cols) = if n == 0 { (0, d) } else { (pcols, pcols + 2 * d) };
        for i in 0..d {
            if n == 0 {
                t.push((prows + i, i, 1.0));
                t.push((prows + d + i, i, -1.0));
            } else {
                t.push((prows + i, carry_col + i, 1.0));
                t.push((prows + d + i, carry_col + d + i, 1.0));
            }
        }
        bias.extend(std::iter::repeat(0.0).take(2 * d));
        layers.push(layer(prows + 2 * d, cols, t, bias));
    }
    let mut t = Trips::new();
    for (j, &vj) in v.iter().enumerate() {
        t.push((j, 0, vj));
        t.push((j, 1, -vj));
        t.push((j, 2 + j, 1.0));
        t.push((j, 2 + d + j, -1.0));
    }
    layers.push(layer(d, 2 + 2 * d, t, vec![0.0; d]));
    let out = ReluNet::new(layers)?;
    debug_assert_eq!(out.depth(), depth + 1);
    debug_assert!(out.width() <= 2 * d + d.max(phi.width()));
    debug_assert!(out.size() <= 2 * phi.size() + 2 * d * (depth + 2));
    Ok(out)
}

/// Chain `θ_0 = id`, `θ_{k+1} = step(r̃, v_{k+1}) ∘ θ_k`; returns `θ_0..θ_M`.
pub fn chain_nets(r_tilde: &ReluNet, directions: &[Vec<f64>]) -> Result<Vec<ReluNet>> {
    let d = r_tilde.input_dim();
    let mut out = Vec::with_capacity(directions.len() + 1);
    out.push(identity(d, 1)?);
    for v in directions {
        let s = step_net(r_tilde, v)?;
        let next = compose(&s, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// `θ_M` for the frozen directions `v_1..v_M`.
pub fn chain_net(r_tilde: &ReluNet, directions: &[Vec<f64>]) -> Result<ReluNet> {
    Ok(chain_nets(r_tilde, directions)?.pop().unwrap())
}

/// `2dM[4d + 𝒲 + ℒ + 2] + d + 2M size(r̃)`.
pub fn chain_size_bound(r_tilde: &ReluNet, m: usize) -> usize {
    let d = r_tilde.input_dim();
    2 * d * m * (4 * d + r_tilde.width() + r_tilde.depth() + 2) + d + 2 * m * r_tilde.size()
}

pub fn chain_depth(r_tilde: &ReluNet, m: usize) -> usize {
    m * (r_tilde.depth() + 1) + 1
}

/// Exact `min_i (h − |x_i|)` on `R^d`, depth `⌈log₂ d⌉ + 2`.
///
/// Pairs are reduced with `min(a, b) = a − σ(a − b)`; `a` itself is routed as
/// `σ(a) − σ(−a)`, an odd element as `σ(a), σ(−a)`.
pub fn hypercube_distance_net(halfwidth: f64, d: usize) -> Result<ReluNet> {
    if d == 0 || !(halfwidth > 0.0) {
        return invalid("hypercube distance net needs d >= 1 and halfwidth > 0");
    }
    let mut layers = Vec::new();
    let mut t = Trips::new();
    for i in 0..d {
        t.push((2 * i, i, 1.0));
        t.push((2 * i + 1, i, -1.0));
    }
    layers.push(layer(2 * d, d, t, vec![0.0; 2 * d]));

    // each current value is an affine form over the previous hidden units
    let mut values: Vec<(Trips, f64)> = (0..d).map(|i| (vec![(0, 2 * i, -1.0), (0, 2 * i + 1, -1.0)], halfwidth)).collect();
    let mut prev_rows = 2 * d;
    while values.len() > 1 {
        let mut t = Trips::new();
        let mut bias = Vec::new();
        let mut next = Vec::new();
        let mut row = 0;
        for pair in values.chunks(2) {
            let (fa, ba) = &pair[0];
            let emit = |t: &mut Trips, bias: &mut Vec<f64>, row: usize, sign: f64, f: &Trips, b: f64| {
                t.extend(f.iter().map(|&(_, c, w)| (row, c, sign * w)));
                bias.push(sign * b);
            };
            emit(&mut t, &mut bias, row, 1.0, fa, *ba);
            emit(&mut t, &mut bias, row + 1, -1.0, fa, *ba);
            if let Some((fb, bb)) = pair.get(1) {
                // σ(a − b)
                t.extend(fa.iter().map(|&(_, c, w)| (row + 2, c, w)));
                t.extend(fb.iter().map(|&(_, c, w)| (row + 2, c, -w)));
                bias.push(ba - bb);
                next.push((vec![(0, row, 1.0), (0, row + 1, -1.0), (0, row + 2, -1.0)], 0.0));
                row += 3;
            } else {
                next.push((vec![(0, row, 1.0), (0, row + 1, -1.0)], 0.0));
                row += 2;
            }
        }
        layers.push(layer(row, prev_rows, t, bias));
        prev_rows = row;
        values = next;
    }
    let (f, b) = &values[0];
    layers.push(layer(1, prev_rows, f.clone(), vec![*b]));
    ReluNet::new(layers)
}

/// `r̃ = σ(φ_r − ε_r)`.
pub fn surrogate_net(phi_r: &ReluNet, eps_r: f64) -> Result<ReluNet> {
    if !(eps_r >= 0.0) {
        return invalid("eps_r must be non-negative");
    }
    let out = relu_shift(phi_r, eps_r)?;
    debug_assert!(out.size() <= phi_r.size() + 2);
    Ok(out)
}

/// Continuous piecewise-linear interpolant of `(knots, values)` on the real
/// line, constant outside `[t_0, t_n]`. Depth 2.
///
/// Written as `y_0 + Σ_k (s_k − s_{k−1}) σ(t − t_k)` with `s_k` the slope
/// right of `t_k`, so the value is exactly `y_0` left of `t_0`.
pub fn pwl_net(knots: &[f64], values: &[f64]) -> Result<ReluNet> {
    pwl_build(knots, values, false)
}

/// As [`pwl_net`], but anchored at the right end: exactly `y_n` right of `t_n`.
pub fn pwl_net_right(knots: &[f64], values: &[f64]) -> Result<ReluNet> {
    pwl_build(knots, values, true)
}

fn pwl_build(knots: &[f64], values: &[f64], right: bool) -> Result<ReluNet> {
    if knots.len() < 2 || knots.len() != values.len() {
        return invalid("pwl_net needs at least two knots and one value per knot");
    }
    if knots.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("knots must be strictly increasing");
    }
    let n = knots.len();
    let slope = |k: usize| -> f64 {
        if k + 1 < n {
            (values[k + 1] - values[k]) / (knots[k + 1] - knots[k])
        } else {
            0.0
        }
    };
    let sign = if right { -1.0 } else { 1.0 };
    let t: Trips = (0..n).map(|k| (k, 0, sign)).collect();
    let bias: Vec<f64> = knots.iter().map(|k| -sign * k).collect();
    let h = layer(n, 1, t, bias);
    let mut t = Trips::new();
    for k in 0..n {
        let prev = if k == 0 { 0.0 } else { slope(k - 1) };
        t.push((0, k, slope(k) - prev));
    }
    let anchor = if right { values[n - 1] } else { values[0] };
    ReluNet::new(vec![h, layer(1, n, t, vec![anchor])])
}

/// Interpolant on `K+1` uniform knots of `[a, b]`.
pub fn pwl_uniform(f: impl Fn(f64) -> f64, a: f64, b: f64, k: usize) -> Result<ReluNet> {
    if k == 0 || !(b > a) {
        return Err(Error::InvalidInput("pwl_uniform needs K >= 1 and a < b".into()));
    }
    let knots: Vec<f64> = (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect();
    let values: Vec<f64> = knots.iter().map(|&t| f(t)).collect();
    pwl_net(&knots, &values)
}
