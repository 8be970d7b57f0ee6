//! The r̃-walk on spheres and the deterministic-step Monte Carlo estimator
//!
//! `u_M^N(x) = 1/N Σ_i [ g(X_M^{x,i}) + 1/d Σ_{k=1..M} r̃²(X_{k-1}) f(X_{k-1} + r̃(X_{k-1}) Y^i) ]`
//!
//! with one Green draw `Y^i` per trajectory and the same draws for every
//! evaluation point. Per-trajectory values are reduced in trajectory order
//! with compensated summation, so results do not depend on the worker count.

use rayon::prelude::*;

use crate::error::{check_dim, invalid, Error, Result};
use crate::field::FieldRef;
use crate::geometry::{Domain, SurrogateDistance};
use crate::sampling::{fill_direction, TrajectoryDraws};
use crate::summation::MeanVar;

#[derive(Clone)]
pub struct WosConfig {
    pub domain: Domain,
    pub surrogate: SurrogateDistance,
    /// Source term; `None` means `f ≡ 0` (no Green draws are made).
    pub f: Option<FieldRef>,
    /// Boundary data, defined on the closure of the domain.
    pub g: FieldRef,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
}

impl WosConfig {
    /// Exact-distance walk.
    pub fn new(domain: Domain, f: Option<FieldRef>, g: FieldRef, steps: usize, trajectories: usize, seed: u64) -> Self {
        let surrogate = SurrogateDistance::from_exact(&domain);
        Self { domain, surrogate, f, g, steps, trajectories, seed }
    }

    pub fn with_surrogate(mut self, surrogate: SurrogateDistance) -> Self {
        self.surrogate = surrogate;
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn validate_points(&self, points: &[Vec<f64>]) -> Result<()> {
        if self.trajectories == 0 {
            return invalid("number of trajectories must be at least 1");
        }
        for p in points {
            check_dim(self.dim(), p.len())?;
            if !self.domain.contains_unchecked(p) {
                return invalid(format!("point {p:?} is not inside the domain"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitStats {
    /// `hit_counts[n]`: trajectories whose first entry into the ε-shell is step `n`.
    pub hit_counts: Vec<u64>,
    /// Trajectories still outside the shell after `M` steps.
    pub censored: u64,
    pub survival_prob: f64,
    pub trajectories: usize,
}

impl ExitStats {
    /// Binomial standard error of `survival_prob`.
    pub fn stderr(&self) -> f64 {
        let p = self.survival_prob;
        (p * (1.0 - p) / self.trajectories as f64).sqrt()
    }
}

/// One step `x + r̃(x) u`.
pub fn step(x: &[f64], u: &[f64], surrogate: &SurrogateDistance) -> Vec<f64> {
    let r = surrogate.eval(x);
    x.iter().zip(u).map(|(xi, ui)| xi + r * ui).collect()
}

/// Walks `M` steps with the given draws; returns `(X_M, source sum)`.
/// A state with `r̃ = 0` is a fixed point and contributes nothing further.
#[inline]
fn walk(cfg: &WosConfig, x0: &[f64], draws: &TrajectoryDraws, x: &mut [f64], tmp: &mut [f64]) -> f64 {
    let d = x0.len();
    x.copy_from_slice(x0);
    let mut src = 0.0;
    for k in 1..=cfg.steps {
        let r = cfg.surrogate.eval(x);
        if r == 0.0 {
            break;
        }
        if let Some(f) = &cfg.f {
            for j in 0..d {
                tmp[j] = x[j] + r * draws.green[j];
            }
            src += r * r * f.eval(tmp);
        }
        let u = draws.direction(k);
        for j in 0..d {
            x[j] += r * u[j];
        }
    }
    src / d as f64
}

/// Terminal point `X_M^{x,i}` and the source sum of trajectory `i` (1-based).
pub fn run_trajectory(x: &[f64], i: u64, cfg: &WosConfig) -> Result<(Vec<f64>, f64)> {
    check_dim(cfg.dim(), x.len())?;
    let draws = TrajectoryDraws::generate(cfg.seed, i, cfg.steps, cfg.dim(), cfg.f.is_some());
    let mut end = vec![0.0; x.len()];
    let mut tmp = vec![0.0; x.len()];
    let src = walk(cfg, x, &draws, &mut end, &mut tmp);
    Ok((end, src))
}

/// As [`run_trajectory`], also returning the draws that were consumed.
pub fn run_trajectory_logged(x: &[f64], i: u64, cfg: &WosConfig) -> Result<(Vec<f64>, f64, TrajectoryDraws)> {
    check_dim(cfg.dim(), x.len())?;
    let draws = TrajectoryDraws::generate(cfg.seed, i, cfg.steps, cfg.dim(), cfg.f.is_some());
    let mut end = vec![0.0; x.len()];
    let mut tmp = vec![0.0; x.len()];
    let src = walk(cfg, x, &draws, &mut end, &mut tmp);
    Ok((end, src, draws))
}

fn block_len(points: usize) -> usize {
    (32_768 / points.max(1)).clamp(1, 1024)
}

/// Estimates at every point, reporting the running result after the first
/// `n` trajectories for each `n` in `checkpoints` (ascending, ≤ N).
pub fn estimate_checkpoints(points: &[Vec<f64>], cfg: &WosConfig, checkpoints: &[usize]) -> Result<Vec<EstimateResult>> {
    cfg.validate_points(points)?;
    if checkpoints.windows(2).any(|w| w[0] > w[1]) || checkpoints.iter().any(|&c| c == 0 || c > cfg.trajectories) {
        return invalid("checkpoints must be ascending and within 1..=N");
    }
    let np = points.len();
    let d = cfg.dim();
    let n_total = cfg.trajectories;
    let blen = block_len(np);
    let n_blocks = n_total.div_ceil(blen);
    let batch = (4 * rayon::current_num_threads()).max(1);

    let mut acc = vec![MeanVar::new(); np];
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0;
    let mut done = 0usize;

    let mut b0 = 0;
    while b0 < n_blocks {
        let b1 = (b0 + batch).min(n_blocks);
        let results: Vec<Vec<f64>> = (b0..b1)
            .into_par_iter()
            .map(|b| {
                let start = b * blen;
                let end = (start + blen).min(n_total);
                let mut vals = Vec::with_capacity((end - start) * np);
                let mut draws = TrajectoryDraws::generate(cfg.seed, start as u64 + 1, 0, d, false);
                let mut x = vec![0.0; d];
                let mut tmp = vec![0.0; d];
                for t in start..end {
                    draws.refill(cfg.seed, t as u64 + 1, cfg.steps, cfg.f.is_some());
                    for p in points {
                        let src = walk(cfg, p, &draws, &mut x, &mut tmp);
                        vals.push(cfg.g.eval(&x) + src);
                    }
                }
                vals
            })
            .collect();
        for vals in results {
            for row in vals.chunks_exact(np) {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::Evaluation {
                            what: format!("estimator contribution of trajectory {}", done + 1),
                            point: points[j].clone(),
                        });
                    }
                    acc[j].push(v);
                }
                done += 1;
                while next_cp < checkpoints.len() && checkpoints[next_cp] == done {
                    out.push(snapshot(&acc, done));
                    next_cp += 1;
                }
            }
        }
        b0 = b1;
    }
    Ok(out)
}

fn snapshot(acc: &[MeanVar], n: usize) -> EstimateResult {
    EstimateResult {
        values: acc.iter().map(MeanVar::mean).collect(),
        stderr: acc.iter().map(MeanVar::stderr).collect(),
        n_used: n,
    }
}

/// `u_M^N` at every point with common random numbers.
pub fn estimate(points: &[Vec<f64>], cfg: &WosConfig) -> Result<EstimateResult> {
    let mut v = estimate_checkpoints(points, cfg, &[cfg.trajectories])?;
    Ok(v.pop().expect("one checkpoint requested"))
}

/// `u_m^N` for several step counts `m ≤ M` from one coupled run: the walk
/// for step count `m` is the length-`m` prefix of the length-`M` walk.
pub fn estimate_multi_steps(points: &[Vec<f64>], cfg: &WosConfig, steps: &[usize]) -> Result<Vec<EstimateResult>> {
    cfg.validate_points(points)?;
    let m_max = steps.iter().copied().max().unwrap_or(0);
    let np = points.len();
    let ns = steps.len();
    let d = cfg.dim();
    let n_total = cfg.trajectories;
    let blen = block_len(np * ns.max(1));
    let n_blocks = n_total.div_ceil(blen);
    let batch = (4 * rayon::current_num_threads()).max(1);
    let mut acc = vec![MeanVar::new(); np * ns];

    let mut b0 = 0;
    while b0 < n_blocks {
        let b1 = (b0 + batch).min(n_blocks);
        let results: Vec<Vec<f64>> = (b0..b1)
            .into_par_iter()
            .map(|b| {
                let start = b * blen;
                let end = (start + blen).min(n_total);
                let mut vals = vec![0.0; (end - start) * np * ns];
                let mut draws = TrajectoryDraws::generate(cfg.seed, start as u64 + 1, 0, d, false);
                let mut x = vec![0.0; d];
                let mut tmp = vec![0.0; d];
                for t in start..end {
                    draws.refill(cfg.seed, t as u64 + 1, m_max, cfg.f.is_some());
                    for (pi, p) in points.iter().enumerate() {
                        let row = &mut vals[((t - start) * np + pi) * ns..][..ns];
                        x.copy_from_slice(p);
                        let mut src = 0.0;
                        let mut stuck = false;
                        for k in 0..=m_max {
                            for (slot, &m) in row.iter_mut().zip(steps) {
                                if m == k {
                                    *slot = cfg.g.eval(&x) + src / d as f64;
                                }
                            }
                            if k == m_max || stuck {
                                if stuck {
                                    for (slot, &m) in row.iter_mut().zip(steps) {
                                        if m > k {
                                            *slot = cfg.g.eval(&x) + src / d as f64;
                                        }
                                    }
                                }
                                break;
                            }
                            let r = cfg.surrogate.eval(&x);
                            if r == 0.0 {
                                stuck = true;
                                continue;
                            }
                            if let Some(f) = &cfg.f {
                                for j in 0..d {
                                    tmp[j] = x[j] + r * draws.green[j];
                                }
                                src += r * r * f.eval(&tmp);
                            }
                            let u = draws.direction(k + 1);
                            for j in 0..d {
                                x[j] += r * u[j];
                            }
                        }
                    }
                }
                vals
            })
            .collect();
        for vals in results {
            for row in vals.chunks_exact(np * ns) {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::Evaluation {
                            what: "estimator contribution".into(),
                            point: points[j / ns].clone(),
                        });
                    }
                    acc[j].push(v);
                }
            }
        }
        b0 = b1;
    }
    Ok((0..ns)
        .map(|s| EstimateResult {
            values: (0..np).map(|p| acc[p * ns + s].mean()).collect(),
            stderr: (0..np).map(|p| acc[p * ns + s].stderr()).collect(),
            n_used: n_total,
        })
        .collect())
}

/// `|u_M^N(x) − u_M^N(y)|` on shared streams.
pub fn lipschitz_probe(x: &[f64], y: &[f64], cfg: &WosConfig) -> Result<f64> {
    let r = estimate(&[x.to_vec(), y.to_vec()], cfg)?;
    Ok((r.values[0] - r.values[1]).abs())
}

/// ε-shell statistics for several step counts from one coupled run.
/// Only the directions of the walk are used (no boundary or source data).
pub fn exit_stats_multi(x: &[f64], steps: &[usize], eps: f64, trajectories: usize, cfg: &WosConfig) -> Result<Vec<ExitStats>> {
    check_dim(cfg.dim(), x.len())?;
    if !cfg.domain.contains_unchecked(x) {
        return invalid(format!("point {x:?} is not inside the domain"));
    }
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    if trajectories == 0 {
        return invalid("number of trajectories must be at least 1");
    }
    let m_max = steps.iter().copied().max().unwrap_or(0);
    let d = cfg.dim();
    let chunk = 1024usize;
    let n_chunks = trajectories.div_ceil(chunk);

    // Per chunk: first-hit histogram and survivor counts at each requested M.
    let (hist, alive) = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u64; m_max + 1];
            let mut alive = vec![0u64; steps.len()];
            let mut pos = vec![0.0; d];
            let mut u = vec![0.0; d];
            let mut alive_at = vec![false; m_max + 1];
            for t in c * chunk..((c + 1) * chunk).min(trajectories) {
                pos.copy_from_slice(x);
                let mut hit: Option<usize> = None;
                let mut r = cfg.surrogate.eval(&pos);
                for n in 0..=m_max {
                    let r_true = cfg.domain.distance_unchecked(&pos);
                    alive_at[n] = r_true >= eps;
                    if hit.is_none() && !alive_at[n] {
                        hit = Some(n);
                    }
                    if n == m_max {
                        break;
                    }
                    if r == 0.0 {
                        let last = alive_at[n];
                        alive_at[n + 1..].iter_mut().for_each(|a| *a = last);
                        break;
                    }
                    fill_direction(cfg.seed, t as u64 + 1, n as u64 + 1, &mut u);
                    for j in 0..d {
                        pos[j] += r * u[j];
                    }
                    r = cfg.surrogate.eval(&pos);
                }
                if let Some(h) = hit {
                    hist[h] += 1;
                }
                for (a, &m) in alive.iter_mut().zip(steps) {
                    if alive_at[m] {
                        *a += 1;
                    }
                }
            }
            (hist, alive)
        })
        .reduce(
            || (vec![0u64; m_max + 1], vec![0u64; steps.len()]),
            |(mut h1, mut a1), (h2, a2)| {
                h1.iter_mut().zip(h2).for_each(|(a, b)| *a += b);
                a1.iter_mut().zip(a2).for_each(|(a, b)| *a += b);
                (h1, a1)
            },
        );

    Ok(steps
        .iter()
        .zip(alive)
        .map(|(&m, a)| {
            let hits: Vec<u64> = hist[..=m].to_vec();
            let censored = trajectories as u64 - hits.iter().sum::<u64>();
            ExitStats {
                hit_counts: hits,
                censored,
                survival_prob: a as f64 / trajectories as f64,
                trajectories,
            }
        })
        .collect())
}

pub fn exit_stats(x: &[f64], steps: usize, eps: f64, trajectories: usize, cfg: &WosConfig) -> Result<ExitStats> {
    Ok(exit_stats_multi(x, &[steps], eps, trajectories, cfg)?.remove(0))
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
