//! The experiments behind each subcommand. Each returns its tables and
//! report; writing files is left to the caller.

use std::path::Path;

use serde_json::Value;
use wos_core::bounds::{plan_with, shell_tail_defective, stepdet_bound, BoundOptions, EpsilonCoefficient, TailKind, VSurrogate, WosPlan};
use wos_core::field::{constant, FieldRef};
use wos_core::nn::assemble::DEFAULT_PARAMETER_CAP;
use wos_core::nn::{assemble_solution_net, hypercube_distance_net, FrozenRandomness, NetField, ReluNet, SizeAudit};
use wos_core::sampling::{derive_seed, uniform_in_domain};
use wos_core::wos::{estimate, estimate_checkpoints, exit_stats_multi};
use wos_core::{Channel, DomainKind, StreamKey, SurrogateDistance, WosConfig};

use crate::config::{domain_with_dim, Config, RunConfig};
use crate::error::CliError;
use crate::fields::{expr_field, scaled_surrogate};
use crate::table::{int, num, Table};

// tags for derive_seed
const TAG_POINTS: u64 = 0;
const TAG_COPY: u64 = 1;
const TAG_PROBE: u64 = 7;

fn require<T>(v: Option<T>, cfg: &Config, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| cfg.err(key, "required"))
}

fn walk_config(rc: &RunConfig, steps: usize, trajectories: usize, seed: u64) -> Result<WosConfig, CliError> {
    let f: Option<FieldRef> = rc.f.as_ref().map(expr_field);
    let c = WosConfig::new(rc.domain.clone(), f, expr_field(&rc.g), steps, trajectories, seed);
    Ok(c.with_surrogate(scaled_surrogate(&rc.domain, rc.beta)?))
}

/// `L` points drawn uniformly from the domain with the point-sampler channel.
pub fn sample_points(rc: &RunConfig, seed: u64, tag: u64, count: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let s = derive_seed(seed, tag, 0);
    (1..=count as u64)
        .map(|i| uniform_in_domain(StreamKey::new(s, i, 0, Channel::PointSampler), &rc.domain).map_err(CliError::from))
        .collect()
}

fn bound_options(rc: &RunConfig) -> BoundOptions {
    BoundOptions {
        v: if rc.data.adiam.is_some() { VSurrogate::EpsAdiam } else { VSurrogate::DiamSq },
        tail: if rc.data.delta.is_some() { TailKind::Defective } else { TailKind::General },
        ..BoundOptions::default()
    }
}

/// Columns `x1..xd, estimate, stderr`, then `exact, abs_error` when
/// `problem.exact` is set and `bias_bound` when `solve.bounds` is true.
pub fn run_solve(cfg: &Config, rc: &RunConfig) -> Result<Table, CliError> {
    let m = require(rc.steps, cfg, "solver.M")?;
    let n = require(rc.trajectories, cfg, "solver.N")?;
    let points = match (cfg.points("solve.points")?, cfg.usize("solve.random_points")?) {
        (Some(p), None) => p,
        (None, Some(k)) => sample_points(rc, rc.seed, TAG_POINTS, k)?,
        (Some(_), Some(_)) => return Err(cfg.err("solve.random_points", "give either solve.points or solve.random_points")),
        (None, None) => return Err(cfg.err("solve.points", "required (or solve.random_points)")),
    };
    let d = rc.dim();
    for p in &points {
        if p.len() != d {
            return Err(cfg.err("solve.points", &format!("point of length {} in dimension {d}", p.len())));
        }
        if !rc.domain.contains_unchecked(p) {
            return Err(cfg.err("solve.points", &format!("point {p:?} is not inside the domain")));
        }
    }
    let show_bound = cfg.bool("solve.bounds")?.unwrap_or(false);
    let bias = if show_bound {
        let eps = require(rc.eps, cfg, "solver.eps")?;
        Some(stepdet_bound(&rc.data, m, eps, &bound_options(rc))?)
    } else {
        None
    };
    let est = estimate(&points, &walk_config(rc, m, n, rc.seed)?)?;

    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.extend(["estimate".into(), "stderr".into()]);
    if rc.exact.is_some() {
        header.extend(["exact".into(), "abs_error".into()]);
    }
    if bias.is_some() {
        header.push("bias_bound".into());
    }
    let mut t = Table::new(header);
    for (k, p) in points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|&v| num(v)).collect();
        row.push(num(est.values[k]));
        row.push(num(est.stderr[k]));
        if let Some(u) = &rc.exact {
            let ux = u.eval(p);
            row.push(num(ux));
            row.push(num((est.values[k] - ux).abs()));
        }
        if let Some(b) = bias {
            row.push(num(b));
        }
        t.push(row);
    }
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct Test1Report {
    /// Columns `d, M, epsilon, empirical_prob, u_bound, stderr`.
    pub table: Table,
    pub violations: Vec<String>,
}

fn m_values(cfg: &Config) -> Result<Vec<usize>, CliError> {
    if let Some(v) = cfg.usize_list("test1.m_values")? {
        return Ok(v);
    }
    let start = cfg.require_usize("test1.m_start")?;
    let stop = cfg.require_usize("test1.m_stop")?;
    let step = cfg.usize("test1.m_step")?.unwrap_or(1);
    if step == 0 || stop < start {
        return Err(cfg.err("test1.m_step", "need m_step > 0 and m_start <= m_stop"));
    }
    Ok((start..=stop).step_by(step).collect())
}

/// `P_N(r(X_M) ≥ ε)` against `(1 − β²(1−δ)/(4d))^M √(r(x)/ε)` over a sweep in `M` (and `d`).
pub fn run_test1(cfg: &Config, rc: &RunConfig) -> Result<Test1Report, CliError> {
    let eps = require(rc.eps, cfg, "solver.eps")?;
    let n = require(rc.trajectories, cfg, "solver.N")?;
    let ms = m_values(cfg)?;
    let m_max = ms.iter().copied().max().unwrap_or(0);
    let dims = cfg.usize_list("test1.dims")?.unwrap_or_else(|| vec![rc.dim()]);
    let delta_override = cfg.f64("test1.delta")?;

    let mut t = Table::new(["d", "M", "epsilon", "empirical_prob", "u_bound", "stderr"]);
    let mut violations = Vec::new();
    for d in dims {
        let domain = domain_with_dim(cfg, d)?;
        let x = match (cfg.point("test1.x")?, cfg.f64("test1.x1")?) {
            (Some(p), _) if p.len() == d => p,
            (_, Some(x1)) => {
                let mut p = vec![0.0; d];
                p[0] = x1;
                p
            }
            _ => return Err(cfg.err("test1.x", &format!("need a point of dimension {d} or test1.x1"))),
        };
        let rx = domain.distance(&x)?;
        let mut wc = WosConfig::new(domain.clone(), None, constant(0.0), m_max, n, rc.seed);
        wc.surrogate = scaled_surrogate(&domain, rc.beta)?;
        let stats = exit_stats_multi(&x, &ms, eps, n, &wc)?;
        let mut pd = wos_core::bounds::ProblemData::for_domain(&domain);
        pd.beta = rc.beta;
        if let Some(delta) = delta_override {
            pd.delta = Some(delta);
        }
        for (&m, s) in ms.iter().zip(&stats) {
            let ub = match pd.delta {
                Some(_) => Some(shell_tail_defective(m, eps, rx, &pd)?),
                None => None,
            };
            let (p, se) = (s.survival_prob, s.stderr());
            if let Some(b) = ub {
                if p > b + 3.0 * se {
                    violations.push(format!("d={d} M={m}: empirical {p} > u_bound {b} + 3*{se}"));
                }
            }
            t.push(vec![int(d), int(m), num(eps), num(p), ub.map_or(String::new(), num), num(se)]);
        }
    }
    Ok(Test1Report { table: t, violations })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Test2Row {
    pub n: usize,
    pub err_l1_mean: f64,
    /// Standard error of `err_l1_mean` over the `L` points.
    pub err_l1_se: f64,
    pub err_sup_mean: f64,
    /// Standard error of `err_sup_mean` over the `E` replicas.
    pub err_sup_se: f64,
}

#[derive(Debug, Clone)]
pub struct Test2Report {
    /// Columns `N, err_L1_mean, err_sup_mean`.
    pub table: Table,
    /// Columns `N, point, err`: per-point errors of the first copy.
    pub hist: Table,
    pub rows: Vec<Test2Row>,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Errors at `L` uniform points against the exact solution: the mean over
/// points, and the max over points averaged over `E` independent replicas.
/// Every point and replica uses its own estimator seed.
pub fn run_test2(cfg: &Config, rc: &RunConfig) -> Result<Test2Report, CliError> {
    let m = require(rc.steps, cfg, "solver.M")?;
    let exact = rc.exact.clone().ok_or_else(|| cfg.err("problem.exact", "required (e.g. \"exact_u\")"))?;
    let l = cfg.require_usize("test2.L")?;
    let e = cfg.require_usize("test2.E")?;
    let mut ns = cfg.usize_list("test2.n_values")?.ok_or_else(|| cfg.err("test2.n_values", "required"))?;
    ns.sort_unstable();
    ns.dedup();
    if l == 0 || ns.is_empty() || ns[0] == 0 {
        return Err(cfg.err("test2.L", "need L >= 1 and positive n_values"));
    }
    let n_max = *ns.last().unwrap();
    let points = sample_points(rc, rc.seed, TAG_POINTS, l)?;

    // errs[copy][point][k]
    let mut errs = vec![vec![vec![0.0; ns.len()]; l]; e + 1];
    for (copy, per_point) in errs.iter_mut().enumerate() {
        for (i, (w, out)) in points.iter().zip(per_point.iter_mut()).enumerate() {
            let seed = derive_seed(rc.seed, TAG_COPY + copy as u64, i as u64 + 1);
            let wc = walk_config(rc, m, n_max, seed)?;
            let u = exact.eval(w);
            for (k, r) in estimate_checkpoints(std::slice::from_ref(w), &wc, &ns)?.iter().enumerate() {
                out[k] = (r.values[0] - u).abs();
            }
        }
    }

    let mut table = Table::new(["N", "err_L1_mean", "err_sup_mean"]);
    let mut hist = Table::new(["N", "point", "err"]);
    let mut rows = Vec::with_capacity(ns.len());
    for (k, &n) in ns.iter().enumerate() {
        let l1: Vec<f64> = errs[0].iter().map(|p| p[k]).collect();
        let sups: Vec<f64> = errs[1..].iter().map(|c| c.iter().map(|p| p[k]).fold(0.0, f64::max)).collect();
        let (l1m, l1s) = mean_se(&l1);
        let (supm, sups_se) = if sups.is_empty() { (f64::NAN, 0.0) } else { mean_se(&sups) };
        table.push(vec![int(n), num(l1m), num(supm)]);
        for (i, v) in l1.iter().enumerate() {
            hist.push(vec![int(n), int(i + 1), num(*v)]);
        }
        rows.push(Test2Row { n, err_l1_mean: l1m, err_l1_se: l1s, err_sup_mean: supm, err_sup_se: sups_se });
    }
    Ok(Test2Report { table, hist, rows })
}

#[derive(Debug, Clone)]
pub struct PlanReport {
    pub plan: WosPlan,
    pub text: String,
}

pub fn run_plan(cfg: &Config, rc: &RunConfig) -> Result<PlanReport, CliError> {
    let gamma = cfg.require_f64("plan.gamma")?;
    let eta = cfg.require_f64("plan.eta")?;
    let defective = cfg.bool("plan.defective")?.unwrap_or(rc.data.delta.is_some());
    let coef = match cfg.str("plan.coef")?.as_deref() {
        None | Some("joint") => EpsilonCoefficient::Joint,
        Some("split") => EpsilonCoefficient::Split,
        Some(other) => return Err(cfg.err("plan.coef", &format!("expected joint or split, got '{other}'"))),
    };
    let plan = plan_with(gamma, eta, &rc.data, defective, coef)?;
    let text = format!(
        "gamma = {}\neta = {}\neps0 = {}\nK = {}\nM = {}\nN = {}\nbeta = {}\nregime = {}\n",
        num(plan.gamma),
        num(plan.eta),
        num(plan.eps0),
        plan.k,
        plan.m,
        plan.n,
        num(plan.beta),
        plan.regime()
    );
    Ok(PlanReport { plan, text })
}

#[derive(Debug, Clone)]
pub struct AssembleReport {
    pub net: ReluNet,
    pub audit: SizeAudit,
    pub eps_p: f64,
    pub c: f64,
    /// `max |𝕌(x) − u_M^N(x)|` over the probe points.
    pub match_error: f64,
    /// `max |𝕌(x) − u_M^N(x)| / |u_M^N(x)|` over probe points with `u_M^N(x) ≠ 0`.
    pub match_rel: f64,
    /// `M εₚ (1 + 2|f|∞)/d`, or 0 when `f ≡ 0`.
    pub match_budget: f64,
    pub probes: usize,
    pub violations: Vec<String>,
}

impl AssembleReport {
    pub fn text(&self) -> String {
        format!(
            "size = {}\nwidth = {}\ndepth = {}\nsize_bound = {}\npredicted_size = {}\neps_p = {}\nc = {}\nprobes = {}\nmatch_error = {}\nmatch_rel = {}\nmatch_budget = {}\n",
            self.audit.size,
            self.audit.width,
            self.audit.depth,
            self.audit.size_bound,
            self.audit.predicted_size,
            num(self.eps_p),
            num(self.c),
            self.probes,
            num(self.match_error),
            num(self.match_rel),
            num(self.match_budget)
        )
    }
}

fn load_net(cfg: &Config, key: &str) -> Result<Option<ReluNet>, CliError> {
    let Some(path) = cfg.str(key)? else { return Ok(None) };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| cfg.err(key, &format!("cannot read {path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| cfg.err(key, &format!("{path}: {e}")))?;
    ReluNet::from_json(&v).map(Some).map_err(|e| cfg.err(key, &e.to_string()))
}

/// Builds the solution network for the frozen draws of `(solver.seed, M, N)`
/// and compares it against the walk run with the same draws and the same
/// network data.
pub fn run_assemble(cfg: &Config, rc: &RunConfig) -> Result<AssembleReport, CliError> {
    let m = require(rc.steps, cfg, "solver.M")?;
    let n = require(rc.trajectories, cfg, "solver.N")?;
    let d = rc.dim();
    let r_net = match load_net(cfg, "nn.r_net")? {
        Some(net) => net,
        None => match rc.domain.kind() {
            DomainKind::Hypercube { halfwidth } => hypercube_distance_net(halfwidth, d)?,
            _ => return Err(cfg.err("nn.r_net", "required unless domain.kind is hypercube")),
        },
    };
    let g_net = match load_net(cfg, "nn.g_net")? {
        Some(net) => net,
        None => rc.g.to_relu_net(d).map_err(|e| cfg.err("problem.g", &format!("no exact network: {e}; supply nn.g_net")))?,
    };
    let f_net = match (load_net(cfg, "nn.f_net")?, &rc.f) {
        (Some(net), _) => Some(net),
        (None, Some(f)) => Some(f.to_relu_net(d).map_err(|e| cfg.err("problem.f", &format!("no exact network: {e}; supply nn.f_net")))?),
        (None, None) => None,
    };
    let f_inf = if f_net.is_some() { rc.data.f_inf } else { 0.0 };
    if f_net.is_some() && rc.f.as_ref().and_then(|f| f.constant_value()).is_none() && !cfg.contains("problem.f_inf") {
        return Err(cfg.err("problem.f_inf", "required for a non-constant f"));
    }
    let eps_p = match cfg.f64("nn.eps_p")? {
        Some(v) => v,
        None => cfg.f64("nn.gamma")?.unwrap_or(0.1) * d as f64 / (6.0 * m.max(1) as f64 * (1.0 + 2.0 * f_inf)),
    };
    let rad = rc.domain.rad();
    let c = cfg.f64("nn.c")?.unwrap_or_else(|| rc.domain.diam().max(2.0 * f_inf).max(rad * rad).max(rad));
    let cap = cfg.usize("nn.cap")?.unwrap_or(DEFAULT_PARAMETER_CAP);

    let surrogate = if cfg.contains("nn.r_net") {
        SurrogateDistance::from_fn(std::sync::Arc::new(NetField(r_net.clone())), rc.beta, rc.eps.unwrap_or(0.0))?
    } else {
        SurrogateDistance::from_exact(&rc.domain)
    };
    let f_field: Option<FieldRef> = f_net.clone().map(|net| std::sync::Arc::new(NetField(net)) as FieldRef);
    let wc = WosConfig::new(rc.domain.clone(), f_field, std::sync::Arc::new(NetField(g_net.clone())), m, n, rc.seed)
        .with_surrogate(surrogate);
    let omega = FrozenRandomness::from_config(&wc);
    let assembled = assemble_solution_net(&wc, &omega, &g_net, f_net.as_ref(), &r_net, eps_p, c, cap)?;

    let probes = cfg.usize("nn.probe")?.unwrap_or(100);
    let pts = sample_points(rc, rc.seed, TAG_PROBE, probes)?;
    let walk = estimate(&pts, &wc)?;
    let (mut err, mut rel, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for (p, &w) in pts.iter().zip(&walk.values) {
        let u = assembled.net.eval_scalar(p)?;
        err = err.max((u - w).abs());
        scale = scale.max(w.abs());
        if w != 0.0 {
            rel = rel.max((u - w).abs() / w.abs());
        }
    }
    // without f there are no product nets
    let budget = if f_net.is_some() { m as f64 * eps_p * (1.0 + 2.0 * f_inf) / d as f64 } else { 0.0 };
    let mut violations = Vec::new();
    if !assembled.audit.within_bound() {
        violations.push(format!("size {} exceeds the explicit count {}", assembled.audit.size, assembled.audit.size_bound));
    }
    // rounding allowance for the f ≡ 0 case, where the analytic budget is 0
    let slack = 1e-12 * (1.0 + scale);
    if err > budget + slack {
        violations.push(format!("match error {err} exceeds M*eps_p*(1+2|f|)/d = {budget}"));
    }
    Ok(AssembleReport {
        net: assembled.net,
        audit: assembled.audit,
        eps_p,
        c,
        match_error: err,
        match_rel: rel,
        match_budget: budget,
        probes,
        violations,
    })
}
