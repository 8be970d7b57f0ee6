//! Counter-based random streams.
//!
//! Every draw is a pure function of a [`StreamKey`]: the 4×64-bit counter
//! `(seed, trajectory, step, channel)` is hashed into a 64-bit stream base,
//! and the `j`-th word of the stream is `mix64(base + (j+1)·φ)` (a SplitMix64
//! sequence started at `base`). Results therefore do not depend on worker
//! count or on the order in which streams are requested.
//!
//! Layout used by the solver:
//! - `Direction`, step `n = 1..M`: the direction `U_n` of trajectory `i`
//! - `GreenRadius` / `GreenDirection`, step `0`: radius and direction of `Y^i`
//! - `PointSampler`: uniform points in a domain, `trajectory` = point index

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::Domain;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SALT: [u64; 4] = [
    0x243F_6A88_85A3_08D3,
    0x1319_8A2E_0370_7344,
    0xA409_3822_299F_31D0,
    0x082E_FA98_EC4E_6C89,
];

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Direction = 0,
    GreenRadius = 1,
    GreenDirection = 2,
    PointSampler = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub trajectory: u64,
    pub step: u64,
    pub channel: Channel,
}

impl StreamKey {
    pub fn new(seed: u64, trajectory: u64, step: u64, channel: Channel) -> Self {
        Self { seed, trajectory, step, channel }
    }

    pub fn counter(&self) -> [u64; 4] {
        [self.seed, self.trajectory, self.step, self.channel as u64]
    }

    pub fn stream(&self) -> CounterStream {
        let mut h = 0u64;
        for (w, s) in self.counter().iter().zip(SALT) {
            h = mix64(h ^ mix64(w.wrapping_add(s)));
        }
        CounterStream { base: h, ctr: 0 }
    }
}

/// Derives an independent seed, e.g. for a replica or a point.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ SALT[0]) ^ mix64(tag.wrapping_add(SALT[1])) ^ mix64(index.wrapping_add(SALT[2])))
}

/// Sequential words of one keyed stream.
#[derive(Debug, Clone)]
pub struct CounterStream {
    base: u64,
    ctr: u64,
}

impl CounterStream {
    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for CounterStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.ctr = self.ctr.wrapping_add(1);
        mix64(self.base.wrapping_add(self.ctr.wrapping_mul(GOLDEN)))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let w = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }
}

/// Fills `out` with a uniform point on the unit sphere (Gaussian normalization).
pub fn fill_unit_sphere(stream: &mut CounterStream, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = if stream.normal() < 0.0 { -1.0 } else { 1.0 };
        return;
    }
    loop {
        let mut n2 = 0.0;
        for v in out.iter_mut() {
            let z = stream.normal();
            *v = z;
            n2 += z * z;
        }
        if n2 > 0.0 && n2.is_finite() {
            let inv = 1.0 / n2.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

pub fn unit_sphere(key: StreamKey, d: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidInput("sphere dimension must be at least 1".into()));
    }
    let mut out = vec![0.0; d];
    fill_unit_sphere(&mut key.stream(), &mut out);
    Ok(out)
}

fn require_green_dim(d: usize) -> Result<()> {
    if d < 3 {
        Err(Error::Unsupported(format!(
            "Green measure sampler needs d >= 3 (got d = {d})"
        )))
    } else {
        Ok(())
    }
}

/// Radius of a Green-measure draw: `S = B^{1/(d-2)}`, `B ~ Beta(2/(d-2), 2)`.
pub fn green_radius(key: StreamKey, d: usize) -> Result<f64> {
    require_green_dim(d)?;
    Ok(green_radius_from(&mut key.stream(), d))
}

fn green_radius_from(stream: &mut CounterStream, d: usize) -> f64 {
    let p = (d - 2) as f64;
    let a = 2.0 / p;
    loop {
        let x = stream.uniform_open0().powf(1.0 / a);
        if stream.uniform() < 1.0 - x {
            let s = x.powf(1.0 / p);
            return if s < 1.0 { s } else { 1.0 - f64::EPSILON / 2.0 };
        }
    }
}

/// CDF of the Green radius: `F(s) = (d s² − 2 s^d)/(d − 2)`.
pub fn green_radius_cdf(s: f64, d: usize) -> f64 {
    let s = s.clamp(0.0, 1.0);
    let df = d as f64;
    (df * s * s - 2.0 * s.powi(d as i32)) / (df - 2.0)
}

/// `E|Y|^2` for `Y ~ μ`.
pub fn green_second_moment(d: usize) -> f64 {
    let df = d as f64;
    2.0 * df / (df - 2.0) * (0.25 - 1.0 / (df + 2.0))
}

pub fn fill_green_point(seed: u64, trajectory: u64, d: usize, out: &mut [f64]) {
    let s = green_radius_from(
        &mut StreamKey::new(seed, trajectory, 0, Channel::GreenRadius).stream(),
        d,
    );
    fill_unit_sphere(
        &mut StreamKey::new(seed, trajectory, 0, Channel::GreenDirection).stream(),
        out,
    );
    out.iter_mut().for_each(|v| *v *= s);
}

/// Green draw `Y^i` for trajectory `i`.
pub fn green_point(seed: u64, trajectory: u64, d: usize) -> Result<Vec<f64>> {
    require_green_dim(d)?;
    let mut out = vec![0.0; d];
    fill_green_point(seed, trajectory, d, &mut out);
    Ok(out)
}

/// Direction `U_n` of trajectory `i`.
pub fn fill_direction(seed: u64, trajectory: u64, step: u64, out: &mut [f64]) {
    fill_unit_sphere(
        &mut StreamKey::new(seed, trajectory, step, Channel::Direction).stream(),
        out,
    );
}

/// All random inputs of one trajectory: `U_1..U_M` and `Y^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDraws {
    pub dim: usize,
    /// Row-major `M × d`; row `n-1` is `U_n`.
    pub directions: Vec<f64>,
    pub green: Vec<f64>,
}

impl TrajectoryDraws {
    pub fn generate(seed: u64, trajectory: u64, steps: usize, d: usize, with_green: bool) -> Self {
        let mut draws = Self { dim: d, directions: vec![0.0; steps * d], green: vec![0.0; d] };
        draws.refill(seed, trajectory, steps, with_green);
        draws
    }

    /// Regenerates in place, reusing the buffers.
    pub fn refill(&mut self, seed: u64, trajectory: u64, steps: usize, with_green: bool) {
        let d = self.dim;
        self.directions.resize(steps * d, 0.0);
        for (n, row) in self.directions.chunks_exact_mut(d).enumerate() {
            fill_direction(seed, trajectory, n as u64 + 1, row);
        }
        if with_green {
            fill_green_point(seed, trajectory, d, &mut self.green);
        } else {
            self.green.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    pub fn steps(&self) -> usize {
        self.directions.len() / self.dim
    }

    pub fn direction(&self, n: usize) -> &[f64] {
        &self.directions[(n - 1) * self.dim..n * self.dim]
    }
}

const REJECTION_CAP: u64 = 10_000_000;

/// Uniform point in a bounded domain by rejection from its bounding cube.
pub fn uniform_in_domain(key: StreamKey, domain: &Domain) -> Result<Vec<f64>> {
    let d = domain.dim();
    let h = domain.bounding_halfwidth();
    let mut stream = key.stream();
    let mut x = vec![0.0; d];
    for _ in 0..REJECTION_CAP {
        for v in x.iter_mut() {
            *v = h * (2.0 * stream.uniform() - 1.0);
        }
        if domain.contains_unchecked(&x) {
            return Ok(x);
        }
    }
    Err(Error::Sampling(format!(
        "no point accepted in {REJECTION_CAP} proposals; acceptance rate below 1e-6"
    )))
}
