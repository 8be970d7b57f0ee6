//! Exact network calculus: composition, parallelization, linear combination
//! and depth augmentation, all via the identity `t = σ(t) − σ(−t)`.

use super::net::{Layer, ReluNet};
use crate::error::{invalid, Error, Result};

type Trips = Vec<(usize, usize, f64)>;

fn push_block(trips: &mut Trips, layer: &Layer, row_off: usize, col_off: usize, scale: f64) {
    trips.extend(layer.entries().map(|(i, j, v)| (i + row_off, j + col_off, v * scale)));
}

fn eye(trips: &mut Trips, n: usize, row_off: usize, col_off: usize, scale: f64) {
    trips.extend((0..n).map(|i| (row_off + i, col_off + i, scale)));
}

fn layer(rows: usize, cols: usize, trips: Trips, bias: Vec<f64>) -> Layer {
    Layer::from_triplets(rows, cols, trips, bias).expect("internal layer construction")
}

fn net(layers: Vec<Layer>) -> ReluNet {
    ReluNet::new(layers).expect("internal network construction")
}

/// Single affine map `x ↦ W x + b`.
pub fn affine(w: &[Vec<f64>], b: Vec<f64>) -> Result<ReluNet> {
    ReluNet::new(vec![Layer::from_dense(w, b)?])
}

/// Identity on `R^d` realized with exactly `depth` affine maps.
pub fn identity(d: usize, depth: usize) -> Result<ReluNet> {
    if d == 0 || depth == 0 {
        return invalid("identity needs d >= 1 and depth >= 1");
    }
    let mut t = Trips::new();
    eye(&mut t, d, 0, 0, 1.0);
    let id = net(vec![layer(d, d, t, vec![0.0; d])]);
    if depth == 1 {
        Ok(id)
    } else {
        augment(&id, depth)
    }
}

/// `[A; −A]` with optional `[b; −b]`.
fn doubled_rows(l: &Layer, with_bias: bool) -> Layer {
    let m = l.rows();
    let mut t = Trips::new();
    push_block(&mut t, l, 0, 0, 1.0);
    push_block(&mut t, l, m, 0, -1.0);
    let bias = if with_bias {
        l.bias().iter().copied().chain(l.bias().iter().map(|b| -b)).collect()
    } else {
        vec![0.0; 2 * m]
    };
    layer(2 * m, l.cols(), t, bias)
}

/// `[A, −A]` with bias `b`.
fn doubled_cols(l: &Layer, bias: Vec<f64>) -> Layer {
    let n = l.cols();
    let mut t = Trips::new();
    push_block(&mut t, l, 0, 0, 1.0);
    push_block(&mut t, l, 0, n, -1.0);
    layer(l.rows(), 2 * n, t, bias)
}

/// `outer ∘ inner` with depth `ℒ(outer) + ℒ(inner)`.
///
/// The inner output `h` is passed as `σ(h) − σ(−h)`. The bias of the inner
/// last layer is either kept on both halves or folded into the outer bias,
/// whichever stores fewer entries.
pub fn compose(outer: &ReluNet, inner: &ReluNet) -> Result<ReluNet> {
    if inner.output_dim() != outer.input_dim() {
        return Err(Error::DimensionMismatch { expected: outer.input_dim(), got: inner.output_dim() });
    }
    let a2 = inner.layers().last().unwrap();
    let a1 = &outer.layers()[0];
    let folded: Vec<f64> = a1.mat_vec(a2.bias()).iter().zip(a1.bias()).map(|(c, b)| c + b).collect();
    let nnz = |v: &[f64]| v.iter().filter(|x| **x != 0.0).count();
    let keep_cost = a2.bias_nnz();
    let fold_cost = nnz(&folded) as isize - a1.bias_nnz() as isize - a2.bias_nnz() as isize;
    let fold = fold_cost < keep_cost as isize;

    let mut layers: Vec<Layer> = inner.layers()[..inner.depth() - 1].to_vec();
    if fold {
        layers.push(doubled_rows(a2, false));
        layers.push(doubled_cols(a1, folded));
    } else {
        layers.push(doubled_rows(a2, true));
        layers.push(doubled_cols(a1, a1.bias().to_vec()));
    }
    layers.extend(outer.layers()[1..].iter().cloned());
    let out = net(layers);
    debug_assert_eq!(out.depth(), outer.depth() + inner.depth());
    debug_assert!(out.width() <= outer.width().max(inner.width()).max(2 * inner.output_dim()));
    debug_assert!(out.size() <= 2 * outer.size() + 2 * inner.size());
    Ok(out)
}

fn check_parallel(nets: &[ReluNet]) -> Result<(usize, usize)> {
    let first = nets.first().ok_or_else(|| Error::InvalidInput("empty network list".into()))?;
    let (d0, depth) = (first.input_dim(), first.depth());
    for n in nets {
        if n.input_dim() != d0 {
            return Err(Error::DimensionMismatch { expected: d0, got: n.input_dim() });
        }
        if n.depth() != depth {
            return Err(Error::InvalidInput(format!(
                "depth mismatch: {} vs {depth}; augment nets to a common depth first",
                n.depth()
            )));
        }
    }
    Ok((d0, depth))
}

/// Hidden layers `1..ℒ−1` of nets run side by side: first layers stacked on
/// the shared input, block diagonal afterwards.
fn parallel_hidden(nets: &[ReluNet], d0: usize, depth: usize) -> Vec<Layer> {
    let mut layers = Vec::with_capacity(depth);
    for n in 0..depth - 1 {
        let rows: usize = nets.iter().map(|x| x.layers()[n].rows()).sum();
        let cols: usize = if n == 0 { d0 } else { nets.iter().map(|x| x.layers()[n].cols()).sum() };
        let mut t = Trips::new();
        let mut bias = Vec::with_capacity(rows);
        let (mut r, mut c) = (0, 0);
        for x in nets {
            let l = &x.layers()[n];
            push_block(&mut t, l, r, if n == 0 { 0 } else { c }, 1.0);
            bias.extend_from_slice(l.bias());
            r += l.rows();
            c += l.cols();
        }
        layers.push(layer(rows, cols, t, bias));
    }
    layers
}

/// `x ↦ (φ_1(x), …, φ_n(x))` for nets of equal depth and input dim.
pub fn stack(nets: &[ReluNet]) -> Result<ReluNet> {
    let (d0, depth) = check_parallel(nets)?;
    let mut layers = parallel_hidden(nets, d0, depth);
    let rows: usize = nets.iter().map(|x| x.output_dim()).sum();
    let cols = if depth == 1 { d0 } else { nets.iter().map(|x| x.layers()[depth - 1].cols()).sum() };
    let mut t = Trips::new();
    let mut bias = Vec::with_capacity(rows);
    let (mut r, mut c) = (0, 0);
    for x in nets {
        let l = x.layers().last().unwrap();
        push_block(&mut t, l, r, if depth == 1 { 0 } else { c }, 1.0);
        bias.extend_from_slice(l.bias());
        r += l.rows();
        c += l.cols();
    }
    layers.push(layer(rows, cols, t, bias));
    let out = net(layers);
    debug_assert_eq!(out.size(), nets.iter().map(ReluNet::size).sum::<usize>());
    Ok(out)
}

/// `x ↦ Σ a_i φ_i(x)` for nets of equal depth, input dim and output dim.
pub fn linear_combine(nets: &[ReluNet], coeffs: &[f64]) -> Result<ReluNet> {
    let (d0, depth) = check_parallel(nets)?;
    if coeffs.len() != nets.len() {
        return Err(Error::DimensionMismatch { expected: nets.len(), got: coeffs.len() });
    }
    let m = nets[0].output_dim();
    if let Some(bad) = nets.iter().find(|x| x.output_dim() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: bad.output_dim() });
    }
    let mut layers = parallel_hidden(nets, d0, depth);
    let cols = if depth == 1 { d0 } else { nets.iter().map(|x| x.layers()[depth - 1].cols()).sum() };
    let mut t = Trips::new();
    let mut bias = vec![0.0; m];
    let mut c = 0;
    for (x, &a) in nets.iter().zip(coeffs) {
        let l = x.layers().last().unwrap();
        if a != 0.0 {
            push_block(&mut t, l, 0, if depth == 1 { 0 } else { c }, a);
            bias.iter_mut().zip(l.bias()).for_each(|(s, b)| *s += a * b);
        }
        c += l.cols();
    }
    layers.push(layer(m, cols, t, bias));
    let out = net(layers);
    debug_assert!(out.size() <= nets.iter().map(ReluNet::size).sum::<usize>());
    debug_assert!(out.width() <= nets.iter().map(ReluNet::width).sum::<usize>());
    Ok(out)
}

/// Pointwise-equal net of depth exactly `depth > ℒ(net)`.
pub fn augment(phi: &ReluNet, depth: usize) -> Result<ReluNet> {
    if depth <= phi.depth() {
        return invalid(format!("augment needs depth > {} (got {depth})", phi.depth()));
    }
    let m = phi.output_dim();
    let last = phi.layers().last().unwrap();
    let mut layers: Vec<Layer> = phi.layers()[..phi.depth() - 1].to_vec();
    layers.push(doubled_rows(last, false));
    for _ in 0..depth - phi.depth() - 1 {
        let mut t = Trips::new();
        eye(&mut t, 2 * m, 0, 0, 1.0);
        layers.push(layer(2 * m, 2 * m, t, vec![0.0; 2 * m]));
    }
    let mut t = Trips::new();
    eye(&mut t, m, 0, 0, 1.0);
    eye(&mut t, m, 0, m, -1.0);
    layers.push(layer(m, 2 * m, t, last.bias().to_vec()));
    let out = net(layers);
    debug_assert_eq!(out.depth(), depth);
    debug_assert!(out.size() <= augment_size_bound(phi, depth));
    Ok(out)
}

/// Brings `phi` to `depth`; a no-op when it already has that depth.
pub fn augment_to(phi: &ReluNet, depth: usize) -> Result<ReluNet> {
    if phi.depth() == depth {
        Ok(phi.clone())
    } else {
        augment(phi, depth)
    }
}

/// `min(s + d₁𝒲, 2s) + 2d₁(L − ℒ)`.
pub fn augment_size_bound(phi: &ReluNet, depth: usize) -> usize {
    let (s, d1) = (phi.size(), phi.output_dim());
    (s + d1 * phi.width()).min(2 * s) + 2 * d1 * (depth - phi.depth())
}

/// `min(s₁ + s₂ + d₁(𝒲₁ + 𝒲₂), 2s₁ + 2s₂)` with `d₁` the inner output dim.
pub fn compose_size_bound(outer: &ReluNet, inner: &ReluNet) -> usize {
    let (s1, s2, d1) = (outer.size(), inner.size(), inner.output_dim());
    (s1 + s2 + d1 * (outer.width() + inner.width())).min(2 * s1 + 2 * s2)
}

/// Multiplies the output by `a` (last layer only).
pub fn scale_output(phi: &ReluNet, a: f64) -> ReluNet {
    let mut layers = phi.layers().to_vec();
    let last = layers.pop().unwrap();
    let mut t = Trips::new();
    push_block(&mut t, &last, 0, 0, a);
    let bias = last.bias().iter().map(|b| a * b).collect();
    layers.push(layer(last.rows(), last.cols(), t, bias));
    net(layers)
}

/// Picks output coordinates `idx` of `phi` (last layer rows).
pub fn select_outputs(phi: &ReluNet, idx: &[usize]) -> Result<ReluNet> {
    let last = phi.layers().last().unwrap();
    if let Some(&bad) = idx.iter().find(|&&i| i >= last.rows()) {
        return invalid(format!("output index {bad} out of range"));
    }
    let mut t = Trips::new();
    for (r, &i) in idx.iter().enumerate() {
        t.extend(last.entries().filter(|e| e.0 == i).map(|(_, j, v)| (r, j, v)));
    }
    let bias = idx.iter().map(|&i| last.bias()[i]).collect();
    let mut layers = phi.layers()[..phi.depth() - 1].to_vec();
    layers.push(layer(idx.len(), last.cols(), t, bias));
    Ok(net(layers))
}

/// `x ↦ σ(φ(x) − shift)` as a net of depth `ℒ(φ) + 1` for scalar `φ`.
pub fn relu_shift(phi: &ReluNet, shift: f64) -> Result<ReluNet> {
    if phi.output_dim() != 1 {
        return invalid("relu_shift needs a scalar network");
    }
    let mut layers = phi.layers().to_vec();
    let last = layers.pop().unwrap();
    let mut t = Trips::new();
    push_block(&mut t, &last, 0, 0, 1.0);
    layers.push(layer(1, last.cols(), t, vec![last.bias()[0] - shift]));
    layers.push(layer(1, 1, vec![(0, 0, 1.0)], vec![0.0]));
    Ok(net(layers))
}
