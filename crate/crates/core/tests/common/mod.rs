#![allow(dead_code)]

use wos_core::sampling::{fill_unit_sphere, uniform_in_domain, Channel, CounterStream, StreamKey};
use wos_core::Domain;

pub struct TestRng(CounterStream);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(StreamKey::new(seed, 0, 0, Channel::PointSampler).stream())
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.0.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        self.0.normal()
    }

    pub fn vec(&mut self, d: usize, a: f64, b: f64) -> Vec<f64> {
        (0..d).map(|_| self.uniform(a, b)).collect()
    }

    pub fn sphere(&mut self, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        fill_unit_sphere(&mut self.0, &mut v);
        v
    }

    pub fn index(&mut self, n: usize) -> usize {
        ((self.0.uniform() * n as f64) as usize).min(n - 1)
    }
}

pub fn points_in(domain: &Domain, n: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| uniform_in_domain(StreamKey::new(seed, i as u64 + 1, 0, Channel::PointSampler), domain).unwrap())
        .collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = cdf(s);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
