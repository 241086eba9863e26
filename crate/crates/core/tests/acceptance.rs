//! Acceptance criteria 1-10. Each test prints one `criterion N: PASS|FAIL`
//! line; run with `cargo test -p axilab --test acceptance -- --nocapture`.

use std::f64::consts::{E, PI};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use axilab::criterion::{energy_inequality_residual, eval_g, EnergyBump, GaugeParams, NormProbe, R_MAX};
use axilab::dynamics::{run_scenario, swirl_residual, ExactSolution, LambOseen, RunOutput, Scenario, ScenarioSpec, SolverConfig};
use axilab::moser::{
    const_beta0_log, const_beta2_log2, const_c1, const_c1_prime, const_kappa0_delta0, const_mu_star, const_s, const_theta0,
    level_sets, swirl_to_pi, verify_growth_lemmas, AbsConstant, GrowthInputs, LemmaStatus,
};
use axilab::oscillation::{dyadic_scan, envelope_violations, fit_decay, max_principle_monitor};
use axilab::tolerances::*;
use axilab::{AxisPoint, CylGrid, FieldKind, ParabolicCylinder, Snapshot, SnapshotSeries};
use ndarray::Array2;

fn verdict(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

fn h_max(g: &CylGrid) -> f64 {
    g.h_rho.max(g.h_z)
}

fn lamb_oseen() -> ScenarioSpec {
    ScenarioSpec::LambOseen { circulation: 2.0 * PI, t_shift: 1.0 }
}

struct Run {
    scenario: Scenario,
    out: RunOutput,
    elapsed: Duration,
}

fn solve(spec: &ScenarioSpec, grid: CylGrid, dt: f64, steps: usize, stride: usize) -> Run {
    let scenario = spec.build(Arc::new(grid));
    let cfg = SolverConfig { dt, t_end: dt * steps as f64, ..SolverConfig::default() };
    let t0 = Instant::now();
    let out = run_scenario(&scenario, &cfg, stride, None).expect("solver run");
    Run { scenario, out, elapsed: t0.elapsed() }
}

/// 128 x 128 on the unit cylinder, 1000 steps at `dt = h^2/4`.
fn rigid() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let g = CylGrid::cylinder(1.0, 128, 128).unwrap();
        let dt = 0.25 * g.h_min().powi(2);
        solve(&ScenarioSpec::RigidRotation { omega: 1.0 }, g, dt, 1000, 20)
    })
}

/// Lamb-Oseen to `t = 0.1` on `rho <= 4` with `n_rho = 32, 64, 128`.
fn lamb_oseen_ladder() -> &'static [Run] {
    static RUNS: OnceLock<Vec<Run>> = OnceLock::new();
    RUNS.get_or_init(|| {
        [32usize, 64, 128]
            .iter()
            .map(|&n| {
                let g = CylGrid::new(4.0, -1.0, 1.0, n, 8).unwrap();
                let steps = (0.1 / (0.25 * g.h_rho.powi(2))).ceil() as usize;
                solve(&lamb_oseen(), g, 0.1 / steps as f64, steps, steps)
            })
            .collect()
    })
}

/// Lamb-Oseen to `t = 0.3` on `rho <= 1, |z| <= 3/4`, resolved enough for a
/// dyadic scan from `r = 1/2` down to `1/16`.
fn lamb_oseen_scan() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let g = CylGrid::new(1.0, -0.75, 0.75, 64, 96).unwrap();
        let steps = (0.3 / (0.2 * g.h_min().powi(2))).ceil() as usize;
        solve(&lamb_oseen(), g, 0.3 / steps as f64, steps, 40)
    })
}

fn zero_run() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let g = CylGrid::cylinder(1.0, 32, 64).unwrap();
        solve(&ScenarioSpec::Zero, g, 1e-4, 200, 10)
    })
}

fn last_time(run: &Run) -> f64 {
    *run.out.series.times().last().unwrap()
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    (a - b).iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

#[test]
fn criterion_1_rigid_rotation() {
    let run = rigid();
    let last = run.out.series.last().unwrap();
    let drift_v = max_abs_diff(last.require(FieldKind::VPhi).unwrap(), &run.scenario.initial.v_phi);
    let drift_s = max_abs_diff(last.require(FieldKind::Swirl).unwrap(), &run.scenario.initial.sigma);

    let g = run.scenario.grid();
    let h = h_max(g);
    let rho2 = Array2::from_shape_fn(g.shape(), |(i, _)| g.rho(i).powi(2));
    let z = Array2::zeros(g.shape());
    let res = swirl_residual(g, &rho2, None, &z, &z);

    // Truncation order of the same operator on a non-polynomial solution.
    let lo = LambOseen { circulation: 2.0 * PI, t_shift: 1.0 };
    let lo_res = |n: usize| {
        let g = CylGrid::new(4.0, -0.5, 0.5, n, 8).unwrap();
        let s = Array2::from_shape_fn(g.shape(), |(i, _)| lo.swirl(g.rho(i), 0.0, 0.0));
        let ds = Array2::from_shape_fn(g.shape(), |(i, _)| {
            let x = g.rho(i).powi(2) / 4.0;
            -lo.amplitude() * x * (-x).exp()
        });
        let z = Array2::zeros(g.shape());
        swirl_residual(&g, &s, Some(&ds), &z, &z)
    };
    let (a, b, c) = (lo_res(32), lo_res(64), lo_res(128));
    let orders = [(a / b).log2(), (b / c).log2()];
    let in_range = orders.iter().all(|p| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(p));

    let pass = drift_v <= RIGID_DRIFT
        && drift_s <= RIGID_DRIFT
        && res <= RHO2_RESIDUAL_C * h * h
        && in_range
        && run.out.stats.last().map(|s| s.step) == Some(1000)
        && run.elapsed <= Duration::from_secs(120);
    verdict(
        1,
        pass,
        format!(
            "drift v_phi={drift_v:.1e} sigma={drift_s:.1e} (<= {RIGID_DRIFT}); rho^2 residual={res:.1e} (<= {RHO2_RESIDUAL_C}h^2); \
             orders={:.3},{:.3}; steps={}; runtime={:.1?}",
            orders[0],
            orders[1],
            run.out.stats.last().unwrap().step,
            run.elapsed
        ),
    );
}

#[test]
fn criterion_2_lamb_oseen_oracle() {
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for run in lamb_oseen_ladder() {
        let g = run.scenario.grid();
        let exact = run.scenario.exact.as_ref().unwrap();
        let last = run.out.series.last().unwrap();
        let t = last.time;
        let s = last.require(FieldKind::Swirl).unwrap();
        let err = s.indexed_iter().fold(0.0, |m: f64, ((i, j), v)| m.max((v - exact.swirl(g.rho(i), g.z(j), t)).abs()));
        // The solution is independent of z; only the radial spacing is resolved.
        let h = g.h_rho;
        worst = worst.max(err / (h * h));
        details.push(format!("n={} err/h^2={:.4}", g.n_rho, err / (h * h)));
    }
    let fine = lamb_oseen_ladder().last().unwrap();
    let g = fine.scenario.grid();
    let i = g.rho_index(2.0);
    let spot = fine.out.series.first().unwrap().require(FieldKind::Swirl).unwrap()[[i, g.n_z / 2]];
    let spot_ok = (g.rho(i) - 2.0).abs() < 1e-12 && (spot - (1.0 - (-1.0f64).exp())).abs() < 5e-4;
    verdict(
        2,
        worst <= LAMB_OSEEN_C && spot_ok,
        format!("{} (<= {LAMB_OSEEN_C}); sigma(2, 0)={spot:.6}", details.join(", ")),
    );
}

#[test]
fn criterion_3_maximum_principle() {
    let mut runs: Vec<(&str, &Run)> = vec![("zero", zero_run()), ("rigid", rigid()), ("lamb_oseen_scan", lamb_oseen_scan())];
    for r in lamb_oseen_ladder() {
        runs.push(("lamb_oseen_ladder", r));
    }
    let mut violations = 0;
    let mut details = Vec::new();
    for (name, run) in runs {
        let h = run.scenario.grid().h_min();
        let rep = max_principle_monitor(&run.out.series, Some(run.scenario.sigma0()), MAX_PRINCIPLE_H2 * h * h).unwrap();
        violations += rep.violations;
        let excess = rep.sup_abs.iter().fold(0.0f64, |m, s| m.max(s / rep.sigma0 - 1.0));
        details.push(format!("{name}:{} (max excess {excess:.1e}, tol {:.1e})", rep.violations, rep.tol_rel));
    }
    verdict(3, violations == 0, format!("violations {}", details.join(" ")));
}

fn uniform_series(u: f64) -> SnapshotSeries {
    let g = Arc::new(CylGrid::cylinder(1.0, 128, 128).unwrap());
    let snaps = (0..=16)
        .map(|k| {
            let t = -1.0 + k as f64 / 16.0;
            let zero = Array2::zeros(g.shape());
            Snapshot::new(t)
                .with(FieldKind::VRho, zero.clone())
                .with(FieldKind::VPhi, zero)
                .with(FieldKind::V3, Array2::from_elem(g.shape(), u))
        })
        .collect();
    SnapshotSeries::new(g, snaps).unwrap()
}

#[test]
fn criterion_4_homogeneity() {
    let run = lamb_oseen_scan();
    let z0 = AxisPoint::new(0.0, last_time(run));
    let r = 0.25;
    let base = NormProbe::new(&run.out.series).unwrap();
    let (f1, m1) = (base.f(z0, r).unwrap(), base.m(z0, r).unwrap());
    let mut worst: f64 = 0.0;
    for mu in [2.0, 10.0] {
        let p = NormProbe::new(&run.out.series.scale_velocity(mu)).unwrap();
        let rf = p.f(z0, r).unwrap() / f1 / mu.powi(3) - 1.0;
        let rm = p.m(z0, r).unwrap() / m1 / mu - 1.0;
        worst = worst.max(rf.abs()).max(rm.abs());
    }

    let (u, r) = (1.5, 0.5);
    let p = NormProbe::new(&uniform_series(u)).unwrap();
    let o = AxisPoint::new(0.0, 0.0);
    let ef = p.f(o, r).unwrap() / (2.0 * PI * u.powi(3) * r.powi(4)) - 1.0;
    let em = p.m(o, r).unwrap() / ((2.0 * PI).powf(0.3) * u * r) - 1.0;
    verdict(
        4,
        worst <= HOMOGENEITY_REL && ef.abs() <= QUADRATURE_REL && em.abs() <= QUADRATURE_REL,
        format!("homogeneity rel={worst:.1e} (<= {HOMOGENEITY_REL}); closed forms f {ef:.1e}, M {em:.1e} (<= {QUADRATURE_REL})"),
    );
}

#[test]
fn criterion_5_gauge() {
    let p = GaugeParams::default();
    let at_clamp = eval_g((-E * E).exp(), &p).unwrap();
    let (lo, hi) = (1e-6f64.ln(), R_MAX.ln());
    let radii: Vec<f64> = (0..100).map(|k| (lo + (hi - lo) * k as f64 / 99.0).exp().min(R_MAX)).collect();
    let g: Vec<f64> = radii.iter().map(|&r| eval_g(r, &p).unwrap()).collect();
    let monotone = g.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        5,
        at_clamp == 1.0 && monotone,
        format!("g(e^-e^2)={at_clamp:?}; nonincreasing on 100 radii: {monotone}; g(1e-6)={:.6}", g[0]),
    );
}

#[test]
fn criterion_6_oscillation_decay() {
    let run = lamb_oseen_scan();
    let t0 = Instant::now();
    let center = AxisPoint::new(0.0, last_time(run));
    let reference = 0.25;
    let records = dyadic_scan(&run.out.series, center, 1.0 / 16.0, 2.0 * reference).unwrap();
    let fit = fit_decay(&records, reference);
    let bad = envelope_violations(&records, reference, fit.c2 - DECAY_ENVELOPE_SLACK, 2.0).unwrap();
    let elapsed = t0.elapsed();
    let pass = (DECAY_RANGE.0..=DECAY_RANGE.1).contains(&fit.c2)
        && bad.is_empty()
        && records.len() == 4
        && elapsed <= Duration::from_secs(60);
    verdict(
        6,
        pass,
        format!(
            "C2={:.4} +- {:.4} over {} radii; envelope violations {:?}; scan {:.1?}",
            fit.c2,
            fit.c2_stderr,
            records.len(),
            bad,
            elapsed
        ),
    );
}

fn sweep(a: f64, b: f64) -> impl Iterator<Item = f64> {
    (0..1000).map(move |k| a + (b - a) * k as f64 / 999.0)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn criterion_7_constants() {
    let c = AbsConstant::default();
    let g = GaugeParams::default();
    let b0 = const_beta0_log(1e-4, -1e-8, 1.0, &g, c).unwrap();
    let (_, delta0) = const_kappa0_delta0(1.0, 2.0, c).unwrap();
    let examples = [
        (const_c1(0.5, 1.0, 0.5, 1.0, 0.0, c).unwrap(), 200.574_340_423_307_855_3),
        (const_c1_prime(0.5, 1.0, 1.0, c).unwrap(), 447.792_024_685_625_400_0),
        (const_mu_star(1.0).unwrap(), 0.099_212_565_748_012_467_17),
        (const_theta0(0.5, 1.0, c).unwrap(), 0.002_900_993_021_007_986_808),
        (delta0, 0.044_194_173_824_159_220_28),
        (b0.theta_tilde, 0.999_463_762_217_268_455_8),
        (b0.chain, -2_217_149_738_820.080_400_4),
        (b0.collapsed, -1.037_867_874_922_877_032),
        (b0.target, -1.110_163_403_183_923_209),
    ];
    let worst = examples.iter().fold(0.0f64, |m, &(a, b)| m.max(rel(a, b)));
    let s_ok = const_s(1.0 / 3.0, 0.1, 0.5, 1.0, c).unwrap() == 3601 && b0.n == 2;

    let decreasing = |v: Vec<f64>| v.windows(2).all(|w| w[1] < w[0]);
    let nonincreasing = |v: Vec<f64>| v.windows(2).all(|w| w[1] <= w[0]);
    let sweeps = [
        ("c1 in tau", decreasing(sweep(0.51, 1.99).map(|t| const_c1(0.5, t, 0.5, 1.0, 0.0, c).unwrap()).collect())),
        ("mu* in c1", nonincreasing(sweep(0.5, 1e3).map(|x| const_mu_star(x).unwrap()).collect())),
        ("theta0 in f", nonincreasing(sweep(0.0, 10.0).map(|f| const_theta0(0.5, f, c).unwrap()).collect())),
        (
            "s in f",
            nonincreasing(sweep(0.0, 10.0).map(|f| -(const_s(1.0 / 3.0, 0.1, 0.5, f, c).unwrap() as f64)).collect()),
        ),
        ("beta2 in g", decreasing(sweep(1.0, 2.0).map(|x| const_beta2_log2(0.5, x, c).unwrap().value()).collect())),
        ("delta0 in M0", decreasing(sweep(1.0, 10.0).map(|m| const_kappa0_delta0(1.0, m, c).unwrap().1).collect())),
        (
            "beta0 in c_*",
            nonincreasing(
                sweep(1.0, 1.008)
                    .map(|cs| {
                        let r = 1e-150;
                        const_beta0_log(r, -r * r, 1.0, &GaugeParams { c_star: cs, ..g }, c).unwrap().collapsed
                    })
                    .collect(),
            ),
        ),
    ];
    let failed: Vec<&str> = sweeps.iter().filter(|s| !s.1).map(|s| s.0).collect();

    let b2 = const_beta2_log2(0.5, 1.0, c).unwrap();
    let exact = b2.magnitude == 2f64.powi(46) && b2.offset == 6f64.log2();
    verdict(
        7,
        worst <= CONSTANTS_REL && s_ok && failed.is_empty() && exact,
        format!(
            "examples rel={worst:.1e} (<= {CONSTANTS_REL}); s ok: {s_ok}; {} sweeps, failing {failed:?}; log2 beta2 = -2^46 - log2 6: {exact}",
            sweeps.len()
        ),
    );
}

#[test]
fn criterion_8_level_sets() {
    let g = Arc::new(CylGrid::cylinder(1.0, 128, 256).unwrap());
    let r = 0.5;
    let snaps = (0..=16)
        .map(|k| {
            let pi = Array2::from_shape_fn(g.shape(), |(i, _)| g.rho(i).powi(2) / (r * r));
            Snapshot::new(-1.0 + k as f64 / 16.0).with(FieldKind::Scalar, pi)
        })
        .collect();
    let annulus = SnapshotSeries::new(g.clone(), snaps).unwrap();
    let rep = level_sets(&annulus, FieldKind::Scalar, AxisPoint::new(0.0, 0.0), r, 0.25, 1.0).unwrap();
    let layer = g.h_rho / r;
    let annulus_err = rep.fractions.iter().fold(0.0f64, |m, f| m.max((f - 0.75).abs()));

    let (kappa0, _) = const_kappa0_delta0(1.0, 2.0, AbsConstant::default()).unwrap();
    let mut mean_ok = rep.mean_value_holds();
    let mut runs = Vec::new();
    for (name, run, radius) in [("rigid", rigid(), 0.06), ("lamb_oseen", lamb_oseen_scan(), 0.25)] {
        let top = AxisPoint::new(0.0, last_time(run));
        let (pi, k) = swirl_to_pi(&run.out.series, top, radius, true).unwrap();
        let rep = level_sets(&pi, FieldKind::Scalar, top, radius, kappa0, k).unwrap();
        mean_ok &= rep.mean_value_holds();
        runs.push(format!("{name}: t_bar={:.4} |e|R^2/4 / |E| = {:.3}", rep.t_bar, rep.measure_at_t_bar * 0.25 * radius * radius / rep.space_time));
    }
    verdict(
        8,
        annulus_err <= layer && mean_ok,
        format!("annulus |fraction - 0.75| = {annulus_err:.1e} (<= {layer:.1e}); mean value holds: {mean_ok}; {}", runs.join("; ")),
    );
}

fn constant_pi(value: f64) -> SnapshotSeries {
    let g = Arc::new(CylGrid::cylinder(1.0, 64, 128).unwrap());
    let snaps = (0..=32)
        .map(|k| Snapshot::new(-0.25 + k as f64 / 128.0).with(FieldKind::Scalar, Array2::from_elem(g.shape(), value)))
        .collect();
    SnapshotSeries::new(g, snaps).unwrap()
}

#[test]
fn criterion_9_lemma_harness() {
    let mut failures = 0;
    let mut details = Vec::new();
    let mut tally = |name: &str, series: &SnapshotSeries, inputs: GrowthInputs| {
        let rep = verify_growth_lemmas(series, &inputs).unwrap();
        let count = |s: LemmaStatus| rep.rows.iter().filter(|r| r.status == s).count();
        failures += rep.failures;
        details.push(format!(
            "{name}: {} fail / {} pass / {} vacuous / {} skipped",
            rep.failures,
            count(LemmaStatus::Pass),
            count(LemmaStatus::Vacuous),
            count(LemmaStatus::Skipped)
        ));
    };
    for v in [0.3, 1.0, 7.0] {
        tally(&format!("constant {v}"), &constant_pi(v), GrowthInputs::new(AxisPoint::new(0.0, 0.0), 0.25));
    }
    // The zero flow has no oscillation; its swirl shifted by one is a constant field.
    let zero = zero_run();
    let snaps = zero
        .out
        .series
        .snapshots
        .iter()
        .map(|s| s.clone().with(FieldKind::Scalar, s.require(FieldKind::Swirl).unwrap().mapv(|v| 1.0 + v)))
        .collect();
    let shifted = SnapshotSeries::new(zero.out.series.grid.clone(), snaps).unwrap();
    tally("zero", &shifted, GrowthInputs::new(AxisPoint::new(0.0, last_time(zero)), 0.05));
    for (name, run, r) in [("rigid", rigid(), 0.06), ("lamb_oseen", lamb_oseen_scan(), 0.25)] {
        let top = AxisPoint::new(0.0, last_time(run));
        let (pi, k) = swirl_to_pi(&run.out.series, top, r, true).unwrap();
        tally(name, &pi, GrowthInputs { k_r: Some(k), ..GrowthInputs::new(top, r) });
    }
    verdict(9, failures == 0, details.join("; "));
}

#[test]
fn criterion_10_energy_inequality() {
    let t_end = 0.02;
    let q = ParabolicCylinder::new(AxisPoint::new(0.0, t_end), 0.5, 1.0, t_end / 0.25).unwrap();
    let bump = EnergyBump::from_cylinder(&q);
    let cases = [
        ("rigid", ScenarioSpec::RigidRotation { omega: 1.0 }, CylGrid::cylinder(1.0, 64, 128).unwrap()),
        ("lamb_oseen", lamb_oseen(), CylGrid::new(2.0, -1.0, 1.0, 64, 64).unwrap()),
    ];
    let mut worst = f64::INFINITY;
    let mut details = Vec::new();
    for (name, spec, g) in cases {
        let h = h_max(&g);
        let steps = (t_end / (0.2 * g.h_min().powi(2))).ceil() as usize;
        let run = solve(&spec, g, t_end / steps as f64, steps, 4);
        let res = energy_inequality_residual(&run.out.series, &bump).unwrap();
        worst = worst.min(res / (h * h));
        details.push(format!("{name}: residual/h^2={:.4}", res / (h * h)));
    }
    verdict(10, worst >= -ENERGY_C, format!("{} (>= -{ENERGY_C})", details.join(", ")));
}
