//! Acceptance criteria for the bundled experiments and the numerical oracles.
//!
//! Every criterion runs at its stated tolerance and prints one `PASS`/`FAIL`
//! line. Criteria listed in `KNOWN_FAILING` are reported but do not fail the
//! target; README.md explains each one. Any other failure, and any criterion in
//! that list that starts passing, fails the target.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use ndarray::{ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::engine::RotorEngine;
use resonance_core::entanglement::{product_basis_eps2, product_basis_purity, schmidt_purity, Bipartition};
use resonance_core::initial::InitialState;
use resonance_core::potential::{shift_coordinates, FourierTerm, IndexSet, PotentialSpec};
use resonance_core::predictor::classify_regimes;
use resonance_core::resonance::ResonancePlan;
use resonance_core::series::{default_lattice, WINDOW_MARGIN};
use resonance_core::stats::{linear_fit, power_law_fit};
use resonance_core::Complex64;

const KNOWN_FAILING: &[usize] = &[2, 3, 5, 8];

/// Named sub-checks of one criterion.
#[derive(Default)]
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.0.push((what.into(), ok));
    }

    fn within(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        self.check((value - target).abs() <= tol, format!("{what} = {value:.6e} (target {target:.6e} ± {tol:.1e})"));
    }

    fn runtime(&mut self, what: &str, elapsed: Duration, limit_s: f64) {
        let s = elapsed.as_secs_f64();
        self.check(s < limit_s, format!("{what} runtime {s:.1} s (< {limit_s} s)"));
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|(_, ok)| *ok)
    }
}

struct Table {
    columns: BTreeMap<String, usize>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn read(path: &Path) -> Table {
        let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let columns = r.headers().unwrap().iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        let rows = r
            .records()
            .map(|rec| rec.unwrap().iter().map(|x| x.parse::<f64>().unwrap_or(f64::NAN)).collect())
            .collect();
        Table { columns, rows }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let i = self.columns[name];
        self.rows.iter().map(|r| r[i]).collect()
    }
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Runs one subcommand and returns its output directory and wall-clock time.
fn cli(command: &str, config_name: &str, scratch: &Path) -> (PathBuf, Duration) {
    let out = scratch.join(format!("{command}-{}", config_name.trim_end_matches(".toml")));
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_resonance"))
        .args([command, "--quiet", "--config"])
        .arg(config(config_name))
        .arg("--out-dir")
        .arg(&out)
        .status()
        .expect("failed to launch the resonance binary");
    assert!(status.success(), "{command} {config_name} exited with {status}");
    (out, start.elapsed())
}

fn report(dir: &Path) -> toml::Value {
    toml::from_str(&std::fs::read_to_string(dir.join("report.toml")).unwrap()).unwrap()
}

fn num(v: &toml::Value, path: &str) -> f64 {
    let mut cur = v;
    for key in path.split('.') {
        cur = match key.parse::<usize>() {
            Ok(i) => &cur[i],
            Err(_) => &cur[key],
        };
    }
    cur.as_float().or_else(|| cur.as_integer().map(|i| i as f64)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn worst<I: IntoIterator<Item = (usize, f64)>>(it: I) -> (usize, f64) {
    it.into_iter().fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
}

fn principal_secondary(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    let (sim, t_sim) = cli("simulate", "principal_secondary.toml", scratch);
    let (pred, t_pred) = cli("predict", "principal_secondary.toml", scratch);
    let m = Table::read(&sim.join("moments.csv"));
    let e = Table::read(&sim.join("entropy.csv"));
    let (s1, s2, s_lin) = (m.col("sigma2_1"), m.col("sigma2_2"), e.col("s_lin"));

    let (t, err) = worst((2..=100).step_by(2).map(|t| (t, rel(s1[t], 0.005 * (t * t) as f64))));
    c.check(err <= 1e-6, format!("even-step sigma2_1 = 0.005 t^2, worst relative error {err:.2e} at t = {t}"));
    let (t, err) = worst((0..=100).map(|t| (t, (s2[t] - if t % 2 == 1 { 0.52 } else { 0.0 }).abs())));
    c.check(err <= 1e-8, format!("sigma2_2 alternates 0 / 0.52, worst deviation {err:.2e} at t = {t}"));

    let r = report(&pred);
    let (mc, se) = (num(&r, "epsilon.s_odd.value"), num(&r, "epsilon.s_odd.std_error"));
    let even = (0..=100).step_by(2).map(|t| s_lin[t].abs()).fold(0.0, f64::max);
    c.check(even < 1e-10, format!("even-step S_lin vanishes, max {even:.2e}"));
    let (t, dev) = worst((1..=100).step_by(2).map(|t| (t, (s_lin[t] - mc).abs())));
    c.check(
        dev <= 3.0 * se,
        format!("odd-step S_lin matches the sampled 1 - <cos eps> = {mc:.5} ± {se:.1e}, worst gap {dev:.2e} at t = {t}"),
    );
    c.within("simulated S_odd", s_lin[1], 0.58, 0.02);
    c.runtime("simulate + predict", t_sim + t_pred, 10.0);
    c
}

fn secondary_pair(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    let (sim, elapsed) = cli("simulate", "secondary_pair.toml", scratch);
    let m = Table::read(&sim.join("moments.csv"));
    let s_lin = Table::read(&sim.join("entropy.csv")).col("s_lin");
    let steps = s_lin.len() - 1;
    for (j, lm) in [(1, 2.0), (2, 4.5)] {
        let s = m.col(&format!("sigma2_{j}"));
        let (t, err) = worst((1..=steps).map(|t| {
            let law = 0.005 * (t * t) as f64 + if t % 2 == 1 { lm } else { 0.0 };
            (t, rel(s[t], law))
        }));
        c.check(
            err <= 1e-6,
            format!("sigma2_{j} = 0.005 t^2 (+ {lm} at odd t), worst relative error {err:.2e} at t = {t}"),
        );
    }
    let xi: f64 = 0.1;
    let (t, err) = worst((1..=4).map(|t| (t, rel(s_lin[t], xi * xi * (t * t) as f64))));
    c.check(err <= 0.10, format!("S_lin within 10% of xi^2 t^2 for t <= 4, worst {:.1}% at t = {t}", 100.0 * err));
    let t_star = 1.0 / (2f64.sqrt() * xi);
    let from = (4.0 * t_star).ceil() as usize;
    let (t, low) = (from..=steps).map(|t| (t, s_lin[t])).fold((0, f64::INFINITY), |a, x| if x.1 < a.1 { x } else { a });
    c.check(low >= 0.9, format!("S_lin >= 0.9 for t >= 4t* = {:.1}: minimum {low:.4} at t = {t}", 4.0 * t_star));
    c.runtime("simulate", elapsed, 60.0);
    c
}

fn antisymmetric_correction(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    let (sim, _) = cli("simulate", "secondary_pair_antisymmetric.toml", scratch);
    let (pred, _) = cli("predict", "secondary_pair_antisymmetric.toml", scratch);
    let s_lin = Table::read(&sim.join("entropy.csv")).col("s_lin");
    let target = num(&report(&pred), "epsilon.minus_sq.value") / 2.0;
    // Even-step envelope interpolated to odd t; residuals at the first odd steps.
    let odd: Vec<usize> = vec![1, 3, 5, 7, 9];
    let residual: Vec<f64> = odd.iter().map(|&t| s_lin[t] - 0.5 * (s_lin[t - 1] + s_lin[t + 1])).collect();
    let fit = linear_fit(&odd.iter().map(|&t| t as f64).collect::<Vec<_>>(), &residual).unwrap();
    c.check(residual.iter().all(|&r| r > 0.0), format!("odd-step residuals positive: {residual:.4?}"));
    c.check(
        rel(fit.intercept, target) <= 0.15,
        format!(
            "residual intercept {:.4} vs <eps_-^2>/2 = {target:.4} ({:.0}% off, slope {:.2e})",
            fit.intercept,
            100.0 * rel(fit.intercept, target),
            fit.slope
        ),
    );
    c
}

fn second_harmonic(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    let (sim, _) = cli("simulate", "second_harmonic.toml", scratch);
    let m = Table::read(&sim.join("moments.csv"));
    let s_lin = Table::read(&sim.join("entropy.csv")).col("s_lin");
    let steps = s_lin.len() - 1;
    for (j, lm) in [(1, 2.0), (2, 0.5)] {
        let s = m.col(&format!("sigma2_{j}"));
        let (t, err) = worst((1..=steps).map(|t| {
            let law = 0.02 * (t * t) as f64 + if t % 2 == 1 { lm } else { 0.0 };
            (t, rel(s[t], law))
        }));
        c.check(
            err <= 1e-6,
            format!("sigma2_{j} = 0.02 t^2 (+ {lm} at odd t), worst relative error {err:.2e} at t = {t}"),
        );
    }
    let even = (0..=steps).step_by(2).map(|t| s_lin[t].abs()).fold(0.0, f64::max);
    c.check(even < 1e-10, format!("even-step S_lin vanishes, max {even:.2e}"));
    let (t, dev) = worst((1..=steps).step_by(2).map(|t| (t, (s_lin[t] - 0.58).abs())));
    c.check(dev <= 0.02, format!("odd-step S_lin within 0.02 of 0.58, worst gap {dev:.4} at t = {t}"));
    c
}

fn high_order(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    for name in ["high_order_3_5.toml", "high_order_13_15.toml", "high_order_19_21.toml"] {
        let (sim, elapsed) = cli("simulate", name, scratch);
        let m = Table::read(&sim.join("moments.csv"));
        let s_lin = Table::read(&sim.join("entropy.csv")).col("s_lin");
        let window: Vec<usize> = (25..=50).collect();
        let ts: Vec<f64> = window.iter().map(|&t| t as f64).collect();
        for j in 1..=2 {
            let p2 = m.col(&format!("p2_{j}"));
            let y: Vec<f64> = window.iter().map(|&t| p2[t]).collect();
            let slope = power_law_fit(&ts, &y).unwrap().slope;
            c.check(
                (1.8..=2.2).contains(&slope),
                format!("{name}: <p{j}^2> log-log slope over t in [25, 50] = {slope:.3}"),
            );
        }
        let end = (1..s_lin.len()).find(|&t| s_lin[t] >= 0.5).unwrap_or(s_lin.len());
        let pre: Vec<usize> = (1..end).filter(|&t| s_lin[t] > 0.0).collect();
        if pre.len() >= 3 {
            let x: Vec<f64> = pre.iter().map(|&t| t as f64).collect();
            let y: Vec<f64> = pre.iter().map(|&t| s_lin[t]).collect();
            let slope = power_law_fit(&x, &y).unwrap().slope;
            c.check(
                (0.8..=1.2).contains(&slope),
                format!("{name}: S_lin growth exponent over t in [1, {}] = {slope:.3}", end - 1),
            );
        } else {
            c.check(false, format!("{name}: fewer than 3 points before S_lin reaches 0.5"));
        }
        c.runtime(name, elapsed, 600.0);
    }
    c
}

/// Random potential whose modes respect the translation symmetry of `orders`.
fn symmetric_potential(rng: &mut ChaCha8Rng, orders: &[u64]) -> PotentialSpec {
    let terms = (0..rng.random_range(1..=3))
        .map(|_| loop {
            let modes: Vec<i64> = orders
                .iter()
                .map(|&s| {
                    let period = if s % 2 == 0 { s / 2 } else { s } as i64;
                    period * rng.random_range(-1..=1)
                })
                .collect();
            if modes.iter().any(|&m| m != 0) {
                break FourierTerm::new(rng.random_range(0.05..0.6), modes, rng.random_range(0.0..std::f64::consts::TAU)).unwrap();
            }
        })
        .collect();
    PotentialSpec::new(orders.len(), terms).unwrap()
}

fn dressed_oracle() -> Checks {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..6 {
        let orders: Vec<u64> = (0..2).map(|_| rng.random_range(3..=5)).collect();
        let pairs: Vec<(u64, u64)> = orders.iter().map(|&s| (if s == 4 { 1 } else { rng.random_range(1..=2) }, s)).collect();
        let plan = ResonancePlan::exact(&pairs).unwrap();
        let v = symmetric_potential(&mut rng, &orders);
        let initial = InitialState::MomentumEigenstate { momenta: vec![rng.random_range(-2..=2), rng.random_range(-2..=2)] };
        // Amplitude-level comparison needs edge amplitudes, not edge mass, below 1e-10.
        let lattice = default_lattice(&v, &initial, 20, 2 * WINDOW_MARGIN, 1 << 22).unwrap();
        let s0 = initial.build(&lattice).unwrap();
        let mut engine = RotorEngine::default();
        let mut generic = s0.clone();
        engine.evolve(&mut generic, &v, &plan, 20).unwrap();
        let mut dressed = s0;
        engine.evolve_dressed(&mut dressed, &v, &plan, 20).unwrap();
        let dev = generic
            .amplitudes()
            .iter()
            .zip(dressed.amplitudes().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        c.check(dev < 1e-10, format!("case {case}: tau = 4pi{pairs:?}, V = {v}: max deviation {dev:.2e}"));
    }
    c
}

fn robustness(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    let (single, _) = cli("detune-scan", "detune_single.toml", scratch);
    let delta = Table::read(&single.join("delta.csv"));
    let (ts, ds) = (delta.col("t"), delta.col("delta"));
    let early = ts.iter().zip(&ds).filter(|(t, _)| **t <= 15.0).map(|(_, d)| *d).fold(0.0, f64::max);
    c.check(early < 0.01, format!("delta tau = 1e-3: max Delta_1 over t <= 15 = {early:.2e}"));
    let td = Table::read(&single.join("tD.csv"));
    let t_d = td.col("t_D")[0];
    c.check((15.0..=25.0).contains(&t_d), format!("delta tau = 1e-3: t_D = {t_d}"));
    c.within("early log Delta_1 slope", td.col("early_exponent")[0], 4.0, 0.3);

    let (scan, _) = cli("detune-scan", "detune_scan.toml", scratch);
    c.within("t_D scaling slope", num(&report(&scan), "scaling.slope"), -0.5, 0.1);

    let (pred, _) = cli("predict", "detune_single.toml", scratch);
    c.within("predicted S_odd", num(&report(&pred), "epsilon.s_odd.value"), 0.0099, 5e-4);
    c
}

fn tops(scratch: &Path) -> Checks {
    let mut c = Checks::default();
    let (sim, elapsed) = cli("top-simulate", "two_tops.toml", scratch);
    let m = Table::read(&sim.join("moments.csv"));
    let p = Table::read(&sim.join("predicted.csv"));
    let jx = Table::read(&sim.join("jx.csv"));
    let s_lin = Table::read(&sim.join("entropy.csv")).col("s_lin");
    let r = report(&sim);
    let steps = s_lin.len() - 1;
    let mut horizon = usize::MAX;
    for n in 1..=2 {
        let t_s = num(&r, &format!("tops.{}.saturation_time", n - 1));
        let limit = (0.3 * t_s).floor() as usize;
        horizon = horizon.min(limit);
        c.check(limit <= steps, format!("top {n}: run covers 0.3 t_s = {:.0}", 0.3 * t_s));
        let (sim_s, pred_s) = (m.col(&format!("sigma2_{n}")), p.col(&format!("sigma2_{n}")));
        let (t, err) = worst((1..=limit.min(steps)).map(|t| (t, rel(sim_s[t], pred_s[t]))));
        c.check(err <= 0.05, format!("top {n}: sigma2 vs closed form for t <= {limit}, worst {:.1}% at t = {t}", 100.0 * err));
        let x = jx.col(&format!("mean_jx{n}"));
        let drift = (0..=steps).step_by(2).map(|t| (x[t] - x[0]).abs()).fold(0.0, f64::max);
        c.check(drift <= 1e-10, format!("top {n}: even-step <J_x> drift {drift:.2e}"));
    }
    let horizon = horizon.min(steps);
    let offset = (1..horizon).step_by(2).map(|t| s_lin[t] - 0.5 * (s_lin[t - 1] + s_lin[t + 1])).fold(f64::INFINITY, f64::min);
    c.check(offset > 0.0, format!("odd-step S_lin offset above the even envelope, minimum {offset:.3e}"));
    let dips = (2..=horizon).step_by(2).filter(|&t| t >= 4 && s_lin[t] < s_lin[t - 2]).count();
    c.check(dips == 0, format!("even-step S_lin monotone for t <= {horizon}: {dips} decreases"));
    c.runtime("top-simulate", elapsed, 60.0);
    c
}

fn product_basis_oracle() -> Checks {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let random_state = |rng: &mut ChaCha8Rng, d: usize| {
        let v: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect::<Vec<_>>()
    };
    let mut worst_gap: f64 = 0.0;
    let mut worst_curvature: f64 = 0.0;
    for _ in 0..50 {
        let (da, db) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let phi = random_state(&mut rng, da);
        let chi = random_state(&mut rng, db);
        let e = DMatrix::from_fn(da, db, |_, _| rng.random_range(-2.0..2.0));
        for t in [0.3f64, 1.0, 7.5] {
            let mut quad = 0.0;
            for a in 0..da {
                for a2 in 0..da {
                    for b in 0..db {
                        for b2 in 0..db {
                            let w = phi[a].norm_sqr() * phi[a2].norm_sqr() * chi[b].norm_sqr() * chi[b2].norm_sqr();
                            quad += w * (t * (e[(a, b)] - e[(a2, b)] - e[(a, b2)] + e[(a2, b2)])).cos();
                        }
                    }
                }
            }
            worst_gap = worst_gap.max((product_basis_purity(&phi, &chi, &e, t).unwrap() - quad).abs());
        }
        let eps2 = product_basis_eps2(&phi, &chi, &e).unwrap();
        if eps2 > 1e-12 {
            // S_lin / t^2 = a + b t^2 over t|eps| <= 0.1; the curvature is 2a.
            let ts: Vec<f64> = (1..=10).map(|k| 0.01 * k as f64 / eps2.sqrt()).collect();
            let y: Vec<f64> = ts.iter().map(|&t| (1.0 - product_basis_purity(&phi, &chi, &e, t).unwrap()) / (t * t)).collect();
            let fit = linear_fit(&ts.iter().map(|t| t * t).collect::<Vec<_>>(), &y).unwrap();
            worst_curvature = worst_curvature.max(rel(2.0 * fit.intercept, eps2));
        }
    }
    c.check(worst_gap <= 1e-12, format!("purity vs quadruple sum over 50 instances, worst gap {worst_gap:.2e}"));
    c.check(
        worst_curvature <= 0.01,
        format!("short-time curvature vs <eps^2> at t|eps| <= 0.1, worst {:.3}%", 100.0 * worst_curvature),
    );
    c
}

fn random_potential(rng: &mut ChaCha8Rng, n: usize) -> PotentialSpec {
    let terms = (0..rng.random_range(1..=4))
        .map(|_| loop {
            let modes: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            if modes.iter().any(|&m| m != 0) {
                let c = rng.random_range(0.05..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                break FourierTerm::new(c, modes, rng.random_range(0.0..std::f64::consts::TAU)).unwrap();
            }
        })
        .collect();
    PotentialSpec::new(n, terms).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, proper: bool) -> IndexSet {
    loop {
        let set: IndexSet = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !proper || (!set.is_empty() && set.len() < n) {
            return set;
        }
    }
}

fn invariants() -> Checks {
    const CASES: usize = 1000;
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut engine = RotorEngine::default();

    let mut bad = 0;
    for _ in 0..CASES {
        let v = random_potential(&mut rng, 2);
        let plan = ResonancePlan::exact(&[(1, rng.random_range(1..=4)), (1, rng.random_range(1..=4))]).unwrap();
        let steps = rng.random_range(1..=4);
        let initial = InitialState::MomentumEigenstate { momenta: vec![rng.random_range(-3..=3), rng.random_range(-3..=3)] };
        let lattice = default_lattice(&v, &initial, steps, WINDOW_MARGIN, 1 << 22).unwrap();
        let mut s = initial.build(&lattice).unwrap();
        for _ in 0..steps {
            engine.step(&mut s, &v, &plan).unwrap();
            if (s.norm_sqr() - 1.0).abs() >= 1e-12 {
                bad += 1;
                break;
            }
        }
    }
    c.check(bad == 0, format!("norm conservation: {bad} of {CASES} instances off by >= 1e-12"));

    let mut bad = 0;
    for _ in 0..CASES {
        let v = random_potential(&mut rng, 3);
        let set = random_subset(&mut rng, 3, false);
        let theta: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let (plus, minus) = v.decompose(&set).unwrap();
        let shifted = shift_coordinates(&theta, &set);
        let ok = (plus.eval(&theta) + minus.eval(&theta) - v.eval(&theta)).abs() < 1e-12
            && (plus.eval(&shifted) - plus.eval(&theta)).abs() < 1e-11
            && (minus.eval(&shifted) + minus.eval(&theta)).abs() < 1e-11;
        bad += usize::from(!ok);
    }
    c.check(bad == 0, format!("decomposition reconstruction and parity: {bad} of {CASES} failures"));

    let mut bad = 0;
    for _ in 0..CASES {
        let n = rng.random_range(2..=3);
        let v = random_potential(&mut rng, n);
        let plan = ResonancePlan::exact(&(0..n).map(|_| (1, rng.random_range(1..=2))).collect::<Vec<_>>()).unwrap();
        let part = Bipartition::new(random_subset(&mut rng, n, true), n).unwrap();
        bad += usize::from(!classify_regimes(&v, &plan, &part).unwrap().selection_rule.is_consistent());
    }
    c.check(bad == 0, format!("selection-rule soundness: {bad} of {CASES} inconsistent reports"));

    let mut bad = 0;
    for _ in 0..CASES {
        let dims = [rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=4)];
        let mut amps = ArrayD::from_shape_fn(IxDyn(&dims), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.mapv_inplace(|z| z / norm);
        let part = Bipartition::new(random_subset(&mut rng, 3, true), 3).unwrap();
        let swapped = Bipartition::new(part.b().clone(), 3).unwrap();
        let (pa, pb) = (schmidt_purity(&amps, &part).unwrap(), schmidt_purity(&amps, &swapped).unwrap());
        bad += usize::from((pa - pb).abs() >= 1e-12 || pa > 1.0 + 1e-12 || pa <= 0.0);
    }
    c.check(bad == 0, format!("purity A/B symmetry: {bad} of {CASES} failures"));
    c
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().unwrap();
    let dir = scratch.path();
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Checks + '_>)> = vec![
        (1, "principal + secondary hybrid and period-2 entropy", Box::new(|| principal_secondary(dir))),
        (2, "double secondary: ballistic spreading and entropy saturation", Box::new(|| secondary_pair(dir))),
        (3, "antisymmetric correction to quadratic entropy growth", Box::new(|| antisymmetric_correction(dir))),
        (4, "second-harmonic potential", Box::new(|| second_harmonic(dir))),
        (5, "higher-order resonances", Box::new(|| high_order(dir))),
        (6, "dressed operators against generic steps", Box::new(dressed_oracle)),
        (7, "robustness against detuning", Box::new(|| robustness(dir))),
        (8, "kicked tops", Box::new(|| tops(dir))),
        (9, "product-basis purity oracle", Box::new(product_basis_oracle)),
        (10, "invariant suites", Box::new(invariants)),
    ];
    let mut unexpected = Vec::new();
    let mut failing = Vec::new();
    for (n, title, run) in criteria {
        let start = Instant::now();
        let checks = run();
        let ok = checks.passed();
        println!("{} criterion {n}: {title} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        for (what, sub) in &checks.0 {
            println!("    [{}] {what}", if *sub { "ok" } else { "xx" });
        }
        if !ok {
            failing.push(n);
        }
        if ok == KNOWN_FAILING.contains(&n) {
            unexpected.push(n);
        }
    }
    println!("\n{} of 10 criteria pass; failing: {failing:?}; documented as failing: {KNOWN_FAILING:?}", 10 - failing.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("outcome differs from the documented status for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
