//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run all: `cargo test --release -p wos-validation --test acceptance`.
//! Run some: append `-- 1 4 7` (or any substring of `criterion_N`).
//! `WOS_ACCEPT_FULL=1` runs the full-size N sweep of criterion 3 even when
//! its projected runtime exceeds the budget.

use std::time::Instant;

use wos_cli::commands::{run_assemble, run_solve, run_test1, run_test2};
use wos_cli::{Config, RunConfig, Table};
use wos_core::bounds::{plan, stepdet_bound, hoeffding_point, BoundOptions, ProblemData, TailKind, VSurrogate};
use wos_core::field::{constant, field};
use wos_core::nn::{augment, compose, linear_combine, stack, Layer, ReluNet};
use wos_core::nn::calculus::augment_size_bound;
use wos_core::sampling::{derive_seed, green_radius, green_radius_cdf, Channel, StreamKey};
use wos_core::wos::{estimate, estimate_checkpoints, estimate_multi_steps, with_workers};
use wos_core::{Domain, WosConfig};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Wall-clock budgets are stated for an 8-core laptop; scale them to the cores present.
fn scaled_budget(secs_on_8: f64) -> f64 {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get()) as f64;
    secs_on_8 * (8.0 / cores).max(1.0)
}

fn cfg(text: &str) -> (Config, RunConfig) {
    let c = Config::parse(text, None).unwrap();
    let rc = RunConfig::from_config(&c).unwrap();
    (c, rc)
}

/// Outputs kept for the determinism check.
#[derive(Default)]
struct Outputs {
    c1: Vec<(String, String)>,
    c2: Option<(String, String)>,
    c3: Option<(String, String)>,
}

fn c1_config(d: usize) -> String {
    let mut pd = ProblemData::for_domain(&Domain::ball(1.0, d).unwrap());
    pd.f_inf = 1.0;
    let p = plan(0.01, 0.05, &pd, true).unwrap();
    format!(
        r#"{{"domain.kind": "ball", "domain.dim": {d}, "problem.f": "1", "problem.g": "0", "problem.exact": "ball_exit",
            "solver.M": {}, "solver.N": 100000, "solver.seed": 1, "solve.points": [[{}], [{}]]}}"#,
        p.m,
        vec!["0"; d].join(","),
        std::iter::once("0.5").chain(vec!["0"; d - 1]).collect::<Vec<_>>().join(",")
    )
}

fn criterion_1(out: &mut Outputs) -> Verdict {
    let t0 = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [3usize, 10] {
        let text = c1_config(d);
        let (c, rc) = cfg(&text);
        let t = with_workers(1, || run_solve(&c, &rc)).unwrap().unwrap();
        let est = t.column("estimate").unwrap();
        let se = t.column("stderr").unwrap();
        let exact = t.column("exact").unwrap();
        for k in 0..2 {
            let err = (est[k].unwrap() - exact[k].unwrap()).abs();
            let tol = (3.0 * se[k].unwrap()).max(0.01);
            ok &= err <= tol;
            notes.push(format!("d={d} M={} x#{k}: err {err:.2e} tol {tol:.2e}", rc.steps.unwrap()));
        }
        out.c1.push((text, t.to_csv().unwrap()));
    }
    let secs = t0.elapsed().as_secs_f64();
    let budget = scaled_budget(60.0);
    ok &= secs < budget;
    notes.push(format!("runtime {secs:.1}s (budget {budget:.0}s)"));
    verdict(ok, notes.join("; "))
}

const C2_CONFIG: &str = r#"{"domain.kind": "hypercube", "domain.dim": 20, "solver.N": 50000, "solver.seed": 2, "solver.eps": 0.001,
    "test1.x1": 0.5, "test1.m_start": 400, "test1.m_stop": 1000, "test1.m_step": 50}"#;

fn criterion_2(out: &mut Outputs) -> Verdict {
    let t0 = Instant::now();
    let (c, rc) = cfg(C2_CONFIG);
    let r = with_workers(1, || run_test1(&c, &rc)).unwrap().unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let p: Vec<f64> = r.table.column("empirical_prob").unwrap().into_iter().map(Option::unwrap).collect();
    let ub: Vec<f64> = r.table.column("u_bound").unwrap().into_iter().map(Option::unwrap).collect();
    let se: Vec<f64> = r.table.column("stderr").unwrap().into_iter().map(Option::unwrap).collect();
    let rows_ok = r.violations.is_empty() && r.table.rows.len() == 13;
    let ub_dec = ub.windows(2).all(|w| w[1] < w[0]);
    // coupled sweep: each step non-increasing within 3σ of the difference, and an overall decrease
    let p_dec = (1..p.len()).all(|k| p[k] <= p[k - 1] + 3.0 * (se[k] * se[k] + se[k - 1] * se[k - 1]).sqrt())
        && p[p.len() - 1] < p[0];
    let budget = scaled_budget(300.0);
    out.c2 = Some((C2_CONFIG.to_string(), r.table.to_csv().unwrap()));
    verdict(
        rows_ok && ub_dec && p_dec && secs < budget,
        format!(
            "rows within bound+3se: {rows_ok} ({} of {} rows exceed it); u_bound decreasing: {ub_dec}; empirical decreasing: {p_dec} \
             (M=400: {:.2e} vs bound {:.2e}, M=1000: {:.2e} vs bound {:.2e}); runtime {secs:.1}s (budget {budget:.0}s)",
            r.violations.len(),
            p.len(),
            p[0],
            ub[0],
            p[p.len() - 1],
            ub[ub.len() - 1]
        ),
    )
}

fn c3_config(l: usize, e: usize, ns: &[usize]) -> String {
    format!(
        r#"{{"domain.kind": "annular_hypercube", "domain.dim": 10, "domain.l1_radius": 0.5,
            "problem.f": "1", "problem.g": "exact_u", "problem.exact": "exact_u",
            "solver.M": 500, "solver.seed": 3, "test2.L": {l}, "test2.E": {e}, "test2.n_values": {ns:?}}}"#
    )
}

fn decreasing_within_1sigma(v: &[(f64, f64)]) -> bool {
    v.windows(2).all(|w| w[1].0 < w[0].0 || w[1].0 - w[0].0 <= w[1].1.max(w[0].1))
}

fn criterion_3(out: &mut Outputs) -> Verdict {
    let (l, e, ns, m) = (2000usize, 5usize, [100usize, 1000, 10_000, 100_000], 500usize);
    let mut notes = Vec::new();

    // throughput on a small instance of the same problem
    let small = c3_config(20, 1, &[100, 1000]);
    let (c, rc) = cfg(&small);
    let t0 = Instant::now();
    let r = with_workers(1, || run_test2(&c, &rc)).unwrap().unwrap();
    let per_step = t0.elapsed().as_secs_f64() / (2.0 * 20.0 * 1000.0 * m as f64);
    out.c3 = Some((small, format!("{}{}", r.table.to_csv().unwrap(), r.hist.to_csv().unwrap())));
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get()) as f64;
    let full_steps = ((e + 1) * l * ns[3] * m) as f64;
    let projected = full_steps * per_step / cores;
    let budget = scaled_budget(20.0 * 60.0);
    notes.push(format!(
        "projected full run {:.2e} steps at {:.0} ns/step on {cores} core(s) = {:.1} h (budget {:.0} min)",
        full_steps,
        per_step * 1e9,
        projected / 3600.0,
        budget / 60.0
    ));

    let force = std::env::var("WOS_ACCEPT_FULL").is_ok_and(|v| v == "1");
    let mut full_ok = false;
    if projected <= budget || force {
        let text = c3_config(l, e, &ns);
        let (c, rc) = cfg(&text);
        let t0 = Instant::now();
        let r = run_test2(&c, &rc).unwrap();
        let secs = t0.elapsed().as_secs_f64();
        let l1: Vec<(f64, f64)> = r.rows.iter().map(|w| (w.err_l1_mean, w.err_l1_se)).collect();
        let sup: Vec<(f64, f64)> = r.rows.iter().map(|w| (w.err_sup_mean, w.err_sup_se)).collect();
        full_ok = decreasing_within_1sigma(&l1) && decreasing_within_1sigma(&sup) && secs < budget;
        notes.push(format!("full run: L1 {l1:?}, sup {sup:?}, runtime {secs:.0}s"));
    } else {
        notes.push("full run skipped (set WOS_ACCEPT_FULL=1 to force)".into());
        // the same monotonicity check at reduced L and N
        let text = c3_config(50, e, &[100, 1000]);
        let (c, rc) = cfg(&text);
        let r = run_test2(&c, &rc).unwrap();
        let l1: Vec<(f64, f64)> = r.rows.iter().map(|w| (w.err_l1_mean, w.err_l1_se)).collect();
        let sup: Vec<(f64, f64)> = r.rows.iter().map(|w| (w.err_sup_mean, w.err_sup_se)).collect();
        notes.push(format!(
            "reduced L=50, N in {{1e2, 1e3}}: L1 {:.4} -> {:.4}, sup {:.4} -> {:.4}, decreasing: {}",
            l1[0].0,
            l1[1].0,
            sup[0].0,
            sup[1].0,
            decreasing_within_1sigma(&l1) && decreasing_within_1sigma(&sup)
        ));
    }

    // fixed-point error slope over 20 seeds
    let (c, rc) = cfg(&c3_config(1, 0, &[100]));
    let _ = c;
    let x = {
        let mut p = vec![0.0; 10];
        p[0] = 0.7;
        p
    };
    let u = rc.exact.as_ref().unwrap().eval(&x);
    let mut mean_err = [0.0; 4];
    for s in 0..20u64 {
        let wc = WosConfig::new(
            rc.domain.clone(),
            Some(constant(1.0)),
            wos_cli::fields::expr_field(&rc.g),
            m,
            ns[3],
            derive_seed(rc.seed, 100, s),
        );
        let res = estimate_checkpoints(std::slice::from_ref(&x), &wc, &ns).unwrap();
        for (k, r) in res.iter().enumerate() {
            mean_err[k] += (r.values[0] - u).abs() / 20.0;
        }
    }
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = mean_err.iter().map(|e| e.ln()).collect();
    let slope = ls_slope(&lx, &ly);
    let slope_ok = (slope + 0.5).abs() <= 0.15;
    let errs: Vec<String> = mean_err.iter().map(|e| format!("{e:.2e}")).collect();
    notes.push(format!("fixed-point slope {slope:.3} (mean |err| {}), within -0.5 +- 0.15: {slope_ok}", errs.join(" ")));

    verdict(full_ok && slope_ok, notes.join("; "))
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn criterion_4() -> Verdict {
    let n = 100_000u64;
    let crit = 1.63 / (n as f64).sqrt();
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [3usize, 5, 10, 50] {
        let mut s: Vec<f64> = (1..=n).map(|i| green_radius(StreamKey::new(40 + d as u64, i, 0, Channel::GreenRadius), d).unwrap()).collect();
        s.sort_by(f64::total_cmp);
        let nf = n as f64;
        let ks = s
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = green_radius_cdf(v, d);
                (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
            })
            .fold(0.0, f64::max);
        ok &= ks < crit;
        notes.push(format!("d={d}: KS {ks:.5}"));
    }
    notes.push(format!("critical {crit:.5}"));
    verdict(ok, notes.join("; "))
}

fn criterion_5() -> Verdict {
    let dom = Domain::ball(1.0, 3).unwrap();
    let x = vec![vec![0.3, 0.2, -0.1]];
    let (m, n, reps) = (50usize, 2000usize, 200u64);
    // g is harmonic and linear, so u_M(x) = g(x) exactly
    let u_bar = 0.5 * x[0][0];
    let mut devs = Vec::with_capacity(reps as usize);
    for s in 0..reps {
        let c = WosConfig::new(dom.clone(), None, field(|y: &[f64]| 0.5 * y[0]), m, n, derive_seed(5, 0, s));
        devs.push((estimate(&x, &c).unwrap().values[0] - u_bar).abs());
    }
    let mut pd = ProblemData::for_domain(&dom);
    pd.g_inf = 0.5;
    let mut ok = true;
    let mut notes = Vec::new();
    for gamma in [0.01, 0.02] {
        let emp = devs.iter().filter(|&&v| v >= gamma).count() as f64 / reps as f64;
        let b = hoeffding_point(gamma, n, m, &pd).min(1.0);
        let band = 3.0 * (b * (1.0 - b) / reps as f64).sqrt();
        ok &= emp <= b + band;
        notes.push(format!("gamma={gamma}: empirical {emp:.3} <= bound {b:.3} + {band:.3}"));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_6() -> Verdict {
    let dom = Domain::ball(1.0, 3).unwrap();
    let pts: Vec<Vec<f64>> = (0..100).map(|k| vec![-0.99 + 1.98 * k as f64 / 99.0, 0.0, 0.0]).collect();
    let u = |p: &[f64]| (1.0 - p.iter().map(|v| v * v).sum::<f64>()) / 3.0;
    let c = WosConfig::new(dom.clone(), Some(constant(1.0)), constant(0.0), 200, 1_000_000, 6);
    let res = estimate_multi_steps(&pts, &c, &[50, 200]).unwrap();
    let mut pd = ProblemData::for_domain(&dom);
    pd.f_inf = 1.0;
    let opts = BoundOptions { v: VSurrogate::EpsAdiam, tail: TailKind::General, ..BoundOptions::default() };
    let mut ok = true;
    let mut notes = Vec::new();
    for ((m, eps), r) in [(50usize, 0.05), (200, 0.02)].into_iter().zip(&res) {
        let err = pts.iter().zip(&r.values).map(|(p, v)| (v - u(p)).abs()).fold(0.0, f64::max);
        let b = stepdet_bound(&pd, m, eps, &opts).unwrap();
        ok &= err <= b;
        notes.push(format!("M={m} eps={eps}: sup error {err:.2e} <= bound {b:.3}"));
    }
    verdict(ok, notes.join("; "))
}

const C7_CONFIG: &str = r#"{"domain.kind": "hypercube", "domain.dim": 5,
    "problem.f": "0.7", "problem.g": "0.5*x1 - 0.3*x2 + 0.2*x5 + 2",
    "solver.M": 10, "solver.N": 20, "solver.seed": 7, "nn.eps_p": 1e-10, "nn.probe": 100}"#;

fn criterion_7() -> Verdict {
    let (c, rc) = cfg(C7_CONFIG);
    let r = run_assemble(&c, &rc).unwrap();
    let within = r.match_error <= r.match_budget;
    let rel = r.match_rel <= 1e-6;
    verdict(
        within && rel,
        format!(
            "max |U - wos| {:.2e} <= M*eps_p*(1+2|f|)/d = {:.2e}: {within}; relative {:.2e} <= 1e-6: {rel}",
            r.match_error, r.match_budget, r.match_rel
        ),
    )
}

struct Draws(u64);

impl Draws {
    fn uniform(&mut self) -> f64 {
        let mut s = StreamKey::new(self.0, 0, 0, Channel::PointSampler).stream();
        self.0 += 1;
        s.uniform()
    }
    fn range(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }
    fn index(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

fn random_net(rng: &mut Draws, d_in: usize, d_out: usize, depth: usize) -> ReluNet {
    let mut dims = vec![d_in];
    for _ in 1..depth {
        dims.push(1 + rng.index(5));
    }
    dims.push(d_out);
    let layers = dims
        .windows(2)
        .map(|w| {
            let m: Vec<Vec<f64>> = (0..w[1])
                .map(|_| (0..w[0]).map(|_| if rng.uniform() < 0.7 { rng.range(-1.0, 1.0) } else { 0.0 }).collect())
                .collect();
            let b = (0..w[1]).map(|_| if rng.uniform() < 0.5 { rng.range(-0.5, 0.5) } else { 0.0 }).collect();
            Layer::from_dense(&m, b).unwrap()
        })
        .collect();
    ReluNet::new(layers).unwrap()
}

fn criterion_8() -> Verdict {
    let (c, rc) = cfg(C7_CONFIG);
    let r = run_assemble(&c, &rc).unwrap();
    let size_ok = r.audit.size <= r.audit.size_bound;
    let mut failures = 0;
    let mut rng = Draws(8_000);
    let close = |a: &[f64], b: &[f64]| {
        let s = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-12 * s)
    };
    for op in 0..1000 {
        let d = 1 + rng.index(3);
        let (a_out, a_depth) = (1 + rng.index(2), 1 + rng.index(3));
        let a = random_net(&mut rng, d, a_out, a_depth);
        let x: Vec<f64> = (0..d).map(|_| rng.range(-2.0, 2.0)).collect();
        let fa = a.eval(&x).unwrap();
        let ok = match op % 4 {
            0 => {
                let l = a.depth() + 1 + rng.index(3);
                let b = augment(&a, l).unwrap();
                b.depth() == l && b.size() <= augment_size_bound(&a, l) && close(&b.eval(&x).unwrap(), &fa)
            }
            1 => {
                let b = random_net(&mut rng, d, a.output_dim(), a.depth());
                let co = [rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)];
                let s = linear_combine(&[a.clone(), b.clone()], &co).unwrap();
                let want: Vec<f64> = fa.iter().zip(b.eval(&x).unwrap()).map(|(p, q)| co[0] * p + co[1] * q).collect();
                s.size() <= a.size() + b.size()
                    && s.width() <= a.width() + b.width()
                    && s.depth() == a.depth()
                    && close(&s.eval(&x).unwrap(), &want)
            }
            2 => {
                let b_out = 1 + rng.index(2);
                let b = random_net(&mut rng, d, b_out, a.depth());
                let s = stack(&[a.clone(), b.clone()]).unwrap();
                let mut want = fa.clone();
                want.extend(b.eval(&x).unwrap());
                s.size() <= a.size() + b.size() && s.width() <= a.width() + b.width() && close(&s.eval(&x).unwrap(), &want)
            }
            _ => {
                let o_depth = 1 + rng.index(3);
                let outer = random_net(&mut rng, a.output_dim(), 1, o_depth);
                let cnet = compose(&outer, &a).unwrap();
                let d1 = a.output_dim();
                cnet.depth() == outer.depth() + a.depth()
                    && cnet.size() <= 2 * outer.size() + 2 * a.size()
                    && cnet.size() <= outer.size() + a.size() + d1 * (outer.width() + a.width() + 1)
                    && close(&cnet.eval(&x).unwrap(), &outer.eval(&fa).unwrap())
            }
        };
        if !ok {
            failures += 1;
        }
    }
    verdict(
        size_ok && failures == 0,
        format!(
            "size {} <= explicit count {}: {size_ok} (width {}, depth {}); calculus inequality failures in 1000 ops: {failures}",
            r.audit.size, r.audit.size_bound, r.audit.width, r.audit.depth
        ),
    )
}

fn criterion_9(out: &Outputs) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for workers in [4usize, 16] {
        let mut same = true;
        for (text, csv) in &out.c1 {
            let (c, rc) = cfg(text);
            let t: Table = with_workers(workers, || run_solve(&c, &rc)).unwrap().unwrap();
            same &= t.to_csv().unwrap() == *csv;
        }
        notes.push(format!("9a (criterion 1) workers={workers}: {}", if same { "identical" } else { "DIFFERENT" }));
        ok &= same && !out.c1.is_empty();

        if let Some((text, csv)) = &out.c2 {
            let (c, rc) = cfg(text);
            let r = with_workers(workers, || run_test1(&c, &rc)).unwrap().unwrap();
            let same = r.table.to_csv().unwrap() == *csv;
            notes.push(format!("9b (criterion 2) workers={workers}: {}", if same { "identical" } else { "DIFFERENT" }));
            ok &= same;
        } else {
            ok = false;
        }
        if let Some((text, csv)) = &out.c3 {
            let (c, rc) = cfg(text);
            let r = with_workers(workers, || run_test2(&c, &rc)).unwrap().unwrap();
            let same = format!("{}{}", r.table.to_csv().unwrap(), r.hist.to_csv().unwrap()) == *csv;
            notes.push(format!("9c (criterion 3, L=20 N<=1e3) workers={workers}: {}", if same { "identical" } else { "DIFFERENT" }));
            ok &= same;
        } else {
            ok = false;
        }
    }
    verdict(ok, notes.join("; "))
}

/// `exp(mean log(y/shape))` and the largest relative deviation from it.
fn fit_constant(y: &[f64], shape: &[f64]) -> (f64, f64) {
    let logs: Vec<f64> = y.iter().zip(shape).map(|(a, b)| (a / b).ln()).collect();
    let c = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
    let dev = y.iter().zip(shape).map(|(a, b)| (a / (c * b) - 1.0).abs()).fold(0.0, f64::max);
    (c, dev)
}

fn criterion_10() -> Verdict {
    let (gamma, eta) = (0.1, 0.05);
    let dims = [4usize, 8, 16, 32, 64];
    let mut ms = Vec::new();
    let mut ns = Vec::new();
    for &d in &dims {
        let mut pd = ProblemData::for_domain(&Domain::ball(1.0, d).unwrap());
        pd.g_inf = 1.0;
        pd.g_alpha = 1.0;
        let p = plan(gamma, eta, &pd, true).unwrap();
        ms.push(p.m as f64);
        ns.push(p.n as f64);
    }
    let m_shape: Vec<f64> = dims.iter().map(|&d| d as f64 * (d as f64 / gamma).ln()).collect();
    let n_shape: Vec<f64> = dims
        .iter()
        .map(|&d| {
            let l = (d as f64 / gamma).ln();
            l * l * ((d * d) as f64 * l + (1.0 / eta).ln()) / (gamma * gamma)
        })
        .collect();
    let (cm, dm) = fit_constant(&ms, &m_shape);
    let (cn, dn) = fit_constant(&ns, &n_shape);
    verdict(
        dm <= 0.25 && dn <= 0.25,
        format!(
            "M {ms:?}: c = {cm:.3}, max deviation {:.1}%; N {ns:?}: c = {cn:.3e}, max deviation {:.1}% (limit 25%)",
            100.0 * dm,
            100.0 * dn
        ),
    )
}

fn main() {
    // libtest-style filters: `3` or any substring of `criterion_3`; flags are ignored
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let run = |k: usize| {
        let name = format!("criterion_{k}");
        filters.is_empty() || filters.iter().any(|f| *f == k.to_string() || name.contains(f.as_str()))
    };
    let mut out = Outputs::default();
    let mut failed = Vec::new();
    let mut report = |k: usize, v: Verdict, t: Instant| {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2}: {tag} [{:.1}s] {}", t.elapsed().as_secs_f64(), v.detail);
        if !v.pass {
            failed.push(k);
        }
    };
    type Job<'a> = Box<dyn FnOnce(&mut Outputs) -> Verdict + 'a>;
    let jobs: Vec<(usize, Job)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(|_| criterion_4())),
        (5, Box::new(|_| criterion_5())),
        (6, Box::new(|_| criterion_6())),
        (7, Box::new(|_| criterion_7())),
        (8, Box::new(|_| criterion_8())),
        (9, Box::new(|o: &mut Outputs| {
            // the determinism check reruns whatever criteria 1-3 produced
            if o.c1.is_empty() {
                criterion_1(o);
            }
            if o.c2.is_none() {
                criterion_2(o);
            }
            if o.c3.is_none() {
                criterion_3(o);
            }
            criterion_9(o)
        })),
        (10, Box::new(|_| criterion_10())),
    ];
    for (k, job) in jobs {
        if run(k) {
            let t = Instant::now();
            let v = job(&mut out);
            report(k, v, t);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
