mod common;

use common::{dist, points_in, TestRng};
use wos_core::field::{constant, field};
use wos_core::sampling::{fill_direction, TrajectoryDraws};
use wos_core::wos::{
    estimate, estimate_checkpoints, estimate_multi_steps, exit_stats, exit_stats_multi, lipschitz_probe, run_trajectory,
    run_trajectory_logged, step, with_workers,
};
use wos_core::{Domain, Error, SurrogateDistance, WosConfig};

fn ball_cfg(d: usize, m: usize, n: usize, seed: u64) -> WosConfig {
    WosConfig::new(Domain::ball(1.0, d).unwrap(), Some(constant(1.0)), constant(0.0), m, n, seed)
}

#[test]
fn step_examples() {
    let ball = Domain::ball(1.0, 3).unwrap();
    let s = SurrogateDistance::from_exact(&ball);
    assert_eq!(step(&[0.0; 3], &[1.0, 0.0, 0.0], &s), vec![1.0, 0.0, 0.0]);
    let zero = SurrogateDistance::from_fn(constant(0.0), 1.0, 0.0).unwrap();
    assert_eq!(step(&[0.2, 0.1, 0.0], &[0.0, 1.0, 0.0], &zero), vec![0.2, 0.1, 0.0]);
}

#[test]
fn chain_stays_inside() {
    let mut rng = TestRng::new(1);
    for dom in [
        Domain::hypercube(1.0, 5).unwrap(),
        Domain::annular_hypercube(1.0, 0.5, 4).unwrap(),
        Domain::ball(1.0, 3).unwrap(),
        Domain::annulus(1.0, 2.0, 3).unwrap(),
    ] {
        let s = SurrogateDistance::from_exact(&dom);
        let starts = points_in(&dom, 2500, 2);
        for x0 in &starts {
            let mut x = x0.clone();
            for _ in 0..100 {
                let u = rng.sphere(dom.dim());
                x = step(&x, &u, &s);
                // boundary points are fixed points with distance 0
                assert!(dom.contains_unchecked(&x) || dom.distance_unchecked(&x) == 0.0 && s.eval(&x) == 0.0);
            }
        }
    }
}

#[test]
fn trajectory_examples() {
    let cfg = ball_cfg(3, 1, 1, 7);
    let (_, src) = run_trajectory(&[0.0; 3], 1, &cfg).unwrap();
    assert!((src - 1.0 / 3.0).abs() < 1e-15);

    let cfg0 = ball_cfg(3, 0, 1, 7);
    let (end, src) = run_trajectory(&[0.1, 0.2, 0.3], 1, &cfg0).unwrap();
    assert_eq!(end, vec![0.1, 0.2, 0.3]);
    assert_eq!(src, 0.0);

    let mut nof = ball_cfg(3, 10, 1, 7);
    nof.f = None;
    assert_eq!(run_trajectory(&[0.1, 0.2, 0.3], 1, &nof).unwrap().1, 0.0);
}

#[test]
fn trajectory_matches_logged_draws() {
    let cfg = ball_cfg(4, 30, 1, 3);
    let x = [0.1, -0.2, 0.3, 0.0];
    let (end, _, draws) = run_trajectory_logged(&x, 5, &cfg).unwrap();
    assert_eq!(draws, TrajectoryDraws::generate(3, 5, 30, 4, true));
    let mut u = vec![0.0; 4];
    let mut y = x.to_vec();
    for n in 1..=30 {
        fill_direction(3, 5, n, &mut u);
        assert_eq!(&u[..], draws.direction(n as usize));
        y = step(&y, &u, &cfg.surrogate);
    }
    assert_eq!(y, end);
}

#[test]
fn constant_boundary_data_is_reproduced() {
    let dom = Domain::annular_hypercube(1.0, 0.5, 4).unwrap();
    let cfg = WosConfig::new(dom.clone(), None, constant(2.5), 20, 100, 1);
    let r = estimate(&points_in(&dom, 10, 4), &cfg).unwrap();
    assert!(r.values.iter().all(|&v| v == 2.5));
    assert!(r.stderr.iter().all(|&s| s == 0.0));
    assert_eq!(r.n_used, 100);
}

#[test]
fn ball_mean_exit_time() {
    let cfg = ball_cfg(3, 200, 20_000, 11);
    let pts = vec![vec![0.0; 3], vec![0.5, 0.0, 0.0], vec![0.0, -0.7, 0.2]];
    let r = estimate(&pts, &cfg).unwrap();
    for (p, (v, s)) in pts.iter().zip(r.values.iter().zip(&r.stderr)) {
        let exact = (1.0 - p.iter().map(|x| x * x).sum::<f64>()) / 3.0;
        assert!((v - exact).abs() < 4.0 * s + 1e-3, "{p:?}: {v} vs {exact} (se {s})");
    }
    // from the center the first step lands on the sphere
    assert!((r.values[0] - 1.0 / 3.0).abs() < 1e-15 && r.stderr[0] == 0.0);
    assert!(r.stderr[1] > 0.0);
}

#[test]
fn harmonic_boundary_data_is_a_fixed_point_on_average() {
    let dom = Domain::ball(1.0, 3).unwrap();
    let cfg = WosConfig::new(dom, None, field(|x: &[f64]| x[0]), 50, 20_000, 2);
    let x = [0.3, 0.1, -0.2];
    let r = estimate(&[x.to_vec()], &cfg).unwrap();
    assert!((r.values[0] - 0.3).abs() < 3.0 * r.stderr[0]);
}

#[test]
fn estimates_independent_of_worker_count() {
    let dom = Domain::annular_hypercube(1.0, 0.5, 5).unwrap();
    let g = field(|x: &[f64]| x[0] * x[0] - x[1] * x[1]);
    let cfg = WosConfig::new(dom.clone(), Some(constant(1.0)), g, 40, 3000, 77);
    let pts = points_in(&dom, 17, 5);
    let a = with_workers(1, || estimate(&pts, &cfg)).unwrap().unwrap();
    let b = with_workers(4, || estimate(&pts, &cfg)).unwrap().unwrap();
    let c = with_workers(16, || estimate(&pts, &cfg)).unwrap().unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn joint_and_separate_evaluation_agree() {
    let dom = Domain::hypercube(1.0, 3).unwrap();
    let cfg = WosConfig::new(dom, Some(field(|x: &[f64]| x[1].abs())), field(|x: &[f64]| x[0]), 25, 500, 4);
    let (x, y) = (vec![0.1, 0.2, 0.3], vec![-0.5, 0.0, 0.4]);
    let joint = estimate(&[x.clone(), y.clone()], &cfg).unwrap();
    let sx = estimate(&[x], &cfg).unwrap();
    let sy = estimate(&[y], &cfg).unwrap();
    assert_eq!(joint.values[0], sx.values[0]);
    assert_eq!(joint.values[1], sy.values[0]);
}

#[test]
fn checkpoints_and_multi_steps_match_independent_runs() {
    let cfg = ball_cfg(3, 30, 1000, 6);
    let pts = vec![vec![0.2, 0.0, 0.1]];
    let cps = estimate_checkpoints(&pts, &cfg, &[10, 500, 1000]).unwrap();
    for (cp, n) in cps.iter().zip([10, 500, 1000]) {
        let mut c = cfg.clone();
        c.trajectories = n;
        assert_eq!(cp.values, estimate(&pts, &c).unwrap().values);
        assert_eq!(cp.n_used, n);
    }
    let ms = estimate_multi_steps(&pts, &cfg, &[5, 30]).unwrap();
    for (r, m) in ms.iter().zip([5, 30]) {
        let mut c = cfg.clone();
        c.steps = m;
        let e = estimate(&pts, &c).unwrap();
        assert!((r.values[0] - e.values[0]).abs() < 1e-15);
    }
    assert!(estimate_checkpoints(&pts, &cfg, &[0]).is_err());
    assert!(estimate_checkpoints(&pts, &cfg, &[5, 2]).is_err());
}

#[test]
fn input_errors() {
    let cfg = ball_cfg(3, 5, 10, 1);
    assert!(matches!(estimate(&[vec![2.0, 0.0, 0.0]], &cfg), Err(Error::InvalidInput(_))));
    assert!(matches!(estimate(&[vec![0.0, 0.0]], &cfg), Err(Error::DimensionMismatch { .. })));
    let bad = WosConfig::new(Domain::ball(1.0, 3).unwrap(), None, field(|x: &[f64]| 1.0 / x[0]), 0, 3, 1);
    match estimate(&[vec![0.0, 0.1, 0.0]], &bad) {
        Err(Error::Evaluation { point, .. }) => assert_eq!(point, vec![0.0, 0.1, 0.0]),
        other => panic!("expected an evaluation error, got {other:?}"),
    }
}

#[test]
fn exit_stats_examples() {
    let cube = Domain::hypercube(1.0, 10).unwrap();
    let cfg = WosConfig::new(cube, None, constant(0.0), 0, 1, 3);
    let mut x = vec![0.0; 10];
    x[0] = 0.5;
    let s = exit_stats(&x, 0, 1e-3, 1000, &cfg).unwrap();
    assert_eq!(s.survival_prob, 1.0);
    let s = exit_stats(&x, 0, 0.6, 1000, &cfg).unwrap();
    assert_eq!(s.survival_prob, 0.0);
    assert_eq!(s.hit_counts[0], 1000);

    let steps: Vec<usize> = (0..=20).map(|i| 10 * i).collect();
    let all = exit_stats_multi(&x, &steps, 1e-2, 4000, &cfg).unwrap();
    for w in all.windows(2) {
        // coupled streams: first entry is pathwise, so the censored count only shrinks
        assert!(w[1].censored <= w[0].censored);
        assert!(w[1].censored as f64 / 4000.0 <= w[1].survival_prob);
    }
    for (st, &m) in all.iter().zip(&steps) {
        let mass: u64 = st.hit_counts.iter().sum();
        assert_eq!(mass + st.censored, 4000);
        assert!((0.0..=1.0).contains(&st.survival_prob));
        let single = exit_stats(&x, m, 1e-2, 4000, &cfg).unwrap();
        assert_eq!(&single, st);
    }
}

#[test]
fn lipschitz_probe_bound() {
    let dom = Domain::hypercube(1.0, 3).unwrap();
    let g = field(|x: &[f64]| 0.5 * x[0] + 0.25 * x[2]);
    let cfg = WosConfig::new(dom.clone(), Some(constant(1.0)), g, 5, 200, 8);
    let (g_lip, f_inf, f_lip, diam, d) = (0.5f64.hypot(0.25), 1.0, 0.0, dom.diam(), 3.0);
    let coef = g_lip + (diam * diam * f_lip + 2.0 * diam * f_inf) / d;
    let mut rng = TestRng::new(4);
    for x in points_in(&dom, 1000, 6) {
        let y: Vec<f64> = x.iter().map(|v| (v + rng.uniform(-0.01, 0.01)).clamp(-0.999, 0.999)).collect();
        let h = dist(&x, &y);
        let probe = lipschitz_probe(&x, &y, &cfg).unwrap();
        assert!(probe <= coef * 3f64.powi(5) * h + 1e-12);
    }
    assert_eq!(lipschitz_probe(&[0.1, 0.1, 0.1], &[0.1, 0.1, 0.1], &cfg).unwrap(), 0.0);
    let flat = WosConfig::new(dom, None, constant(3.0), 5, 50, 1);
    assert_eq!(lipschitz_probe(&[0.1, 0.1, 0.1], &[-0.3, 0.2, 0.0], &flat).unwrap(), 0.0);
}

#[test]
fn spread_over_seeds_shrinks_like_inverse_sqrt_n() {
    let cfg = ball_cfg(3, 40, 1, 0);
    let x = vec![vec![0.3, 0.0, 0.0]];
    let ns = [100usize, 400, 1600, 6400];
    let mut logs = Vec::new();
    for &n in &ns {
        let vals: Vec<f64> = (0..50)
            .map(|s| {
                let mut c = cfg.clone();
                c.trajectories = n;
                c.seed = 1000 + s;
                estimate(&x, &c).unwrap().values[0]
            })
            .collect();
        let m = vals.iter().sum::<f64>() / 50.0;
        let sd = (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 49.0).sqrt();
        logs.push(((n as f64).ln(), sd.ln()));
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.15, "slope {slope}");
}

#[test]
fn hoeffding_envelope() {
    let dom = Domain::ball(1.0, 3).unwrap();
    let (n, m, gamma) = (50usize, 20usize, 0.2);
    let x = vec![vec![0.4, 0.1, 0.0]];
    let mut rf = WosConfig::new(dom, None, field(|y: &[f64]| y[0]), m, 200_000, 999_999);
    let u_bar = estimate(&x, &rf).unwrap().values[0];
    rf.trajectories = n;
    let reps = 200;
    let hits = (0..reps)
        .filter(|&s| {
            let mut c = rf.clone();
            c.seed = s;
            (estimate(&x, &c).unwrap().values[0] - u_bar).abs() >= gamma
        })
        .count() as f64
        / reps as f64;
    // |g|∞ = 1, f ≡ 0
    let p = (2.0 * (-(n as f64) * gamma * gamma).exp()).min(1.0);
    assert!(hits <= p + 3.0 * (p * (1.0 - p) / reps as f64).sqrt(), "{hits} vs {p}");
}
