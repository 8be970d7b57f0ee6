//! The ReLU network value type.
//!
//! Layers are stored as compressed sparse rows. Explicit zeros are never
//! stored, so `size` (the number of nonzero weights and biases) is just the
//! stored entry count.

use serde_json::{json, Value};

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    /// Builds a layer from `(row, col, value)` triplets. Duplicates are summed
    /// and zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut trips: Vec<(usize, usize, f64)>, bias: Vec<f64>) -> Result<Self> {
        check_dim(rows, bias.len())?;
        if let Some(&(i, j, _)) = trips.iter().find(|(i, j, _)| *i >= rows || *j >= cols) {
            return Err(Error::InvalidInput(format!("entry ({i}, {j}) outside a {rows}x{cols} layer")));
        }
        if trips.iter().any(|t| !t.2.is_finite()) || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("non-finite weight".into()));
        }
        trips.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(trips.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(trips.len());
        for (i, j, v) in trips {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(j as u32);
                vals.push(v);
                row_of.push(i);
                last = Some((i, j));
            }
        }
        // drop zeros after summing duplicates
        let mut k = 0;
        for n in 0..vals.len() {
            if vals[n] != 0.0 {
                vals[k] = vals[n];
                col_idx[k] = col_idx[n];
                row_of[k] = row_of[n];
                k += 1;
            }
        }
        vals.truncate(k);
        col_idx.truncate(k);
        row_of.truncate(k);
        for &i in &row_of {
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { rows, cols, row_ptr, col_idx, vals, bias })
    }

    pub fn from_dense(w: &[Vec<f64>], bias: Vec<f64>) -> Result<Self> {
        let rows = w.len();
        let cols = w.first().map_or(0, |r| r.len());
        if w.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged weight matrix".into()));
        }
        let trips = w
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .collect();
        Self::from_triplets(rows, cols, trips, bias)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight_nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn bias_nnz(&self) -> usize {
        self.bias.iter().filter(|b| **b != 0.0).count()
    }

    pub fn nnz(&self) -> usize {
        self.weight_nnz() + self.bias_nnz()
    }

    /// Nonzero weights as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k] as usize, self.vals[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            w[i][j] = v;
        }
        w
    }

    /// `out = W x + b`.
    #[inline]
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.rows {
            let mut acc = self.bias[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k] as usize];
            }
            out[i] = acc;
        }
    }

    /// `W v` for a vector `v` (no bias).
    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| self.vals[k] * v[self.col_idx[k] as usize]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReluNet {
    layers: Vec<Layer>,
}

impl ReluNet {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("a network needs at least one affine map".into()));
        }
        for (n, w) in layers.windows(2).enumerate() {
            if w[1].cols != w[0].rows {
                return Err(Error::InvalidInput(format!(
                    "layer {} has {} outputs but layer {} expects {} inputs",
                    n + 1,
                    w[0].rows,
                    n + 2,
                    w[1].cols
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().rows
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn size(&self) -> usize {
        self.layers.iter().map(Layer::nnz).sum()
    }

    /// `max(d_0, …, d_L)`.
    pub fn width(&self) -> usize {
        self.layers.iter().map(|l| l.rows).max().unwrap().max(self.input_dim())
    }

    /// `[d_0, d_1, …, d_L]`.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim()).chain(self.layers.iter().map(|l| l.rows)).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (n, layer) in self.layers.iter().enumerate() {
            next.clear();
            next.resize(layer.rows, 0.0);
            layer.apply(&cur, &mut next);
            if n < last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Scalar output of a net with one output.
    pub fn eval_scalar(&self, x: &[f64]) -> Result<f64> {
        if self.output_dim() != 1 {
            return Err(Error::InvalidInput(format!("expected a scalar net, output dim is {}", self.output_dim())));
        }
        Ok(self.eval(x)?[0])
    }

    /// JSON document `{"dims": [...], "layers": [{"w": [[...]], "b": [...]}]}`.
    /// Layers with more than `dense_limit` matrix cells are written as
    /// `{"w_sparse": [[i, j, v], ...], "b": [...]}` instead.
    pub fn to_json(&self, dense_limit: usize) -> Value {
        let layers: Vec<Value> = self
            .layers
            .iter()
            .map(|l| {
                if l.rows * l.cols <= dense_limit {
                    json!({ "w": l.to_dense(), "b": l.bias })
                } else {
                    let trips: Vec<Value> = l.entries().map(|(i, j, v)| json!([i, j, v])).collect();
                    json!({ "w_sparse": trips, "b": l.bias })
                }
            })
            .collect();
        json!({ "dims": self.dims(), "layers": layers })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let perr = |m: &str| Error::Parse(format!("network JSON: {m}"));
        let dims: Vec<usize> = v
            .get("dims")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("missing \"dims\""))?
            .iter()
            .map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| perr("dims must be integers")))
            .collect::<Result<_>>()?;
        let layers = v.get("layers").and_then(Value::as_array).ok_or_else(|| perr("missing \"layers\""))?;
        if dims.len() != layers.len() + 1 {
            return Err(perr("dims must have one more entry than layers"));
        }
        let num = |x: &Value| x.as_f64().ok_or_else(|| perr("weights must be numbers"));
        let mut out = Vec::with_capacity(layers.len());
        for (n, l) in layers.iter().enumerate() {
            let (cols, rows) = (dims[n], dims[n + 1]);
            let bias: Vec<f64> = l
                .get("b")
                .and_then(Value::as_array)
                .ok_or_else(|| perr("layer without \"b\""))?
                .iter()
                .map(num)
                .collect::<Result<_>>()?;
            let layer = if let Some(w) = l.get("w").and_then(Value::as_array) {
                let dense: Vec<Vec<f64>> = w
                    .iter()
                    .map(|r| r.as_array().ok_or_else(|| perr("\"w\" rows must be arrays"))?.iter().map(num).collect())
                    .collect::<Result<_>>()?;
                if dense.len() != rows || dense.iter().any(|r| r.len() != cols) {
                    return Err(perr(&format!("layer {} does not match dims {rows}x{cols}", n + 1)));
                }
                if rows == 0 {
                    Layer::from_triplets(0, cols, vec![], bias)?
                } else {
                    Layer::from_dense(&dense, bias)?
                }
            } else if let Some(ws) = l.get("w_sparse").and_then(Value::as_array) {
                let trips = ws
                    .iter()
                    .map(|t| {
                        let t = t.as_array().filter(|t| t.len() == 3).ok_or_else(|| perr("sparse entries are [i, j, v]"))?;
                        let idx = |x: &Value| x.as_u64().map(|u| u as usize).ok_or_else(|| perr("sparse index"));
                        Ok((idx(&t[0])?, idx(&t[1])?, num(&t[2])?))
                    })
                    .collect::<Result<_>>()?;
                Layer::from_triplets(rows, cols, trips, bias)?
            } else {
                return Err(perr("layer without \"w\" or \"w_sparse\""));
            };
            out.push(layer);
        }
        Self::new(out)
    }
}
