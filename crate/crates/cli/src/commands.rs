use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use axilab::criterion::{scan_condition, R_MAX};
use axilab::dynamics::run_scenario;
use axilab::geometry::{AxisPoint, FieldKind, SnapshotSeries};
use axilab::moser::{
    swirl_to_pi, verify_growth_lemmas, GrowthInputs, LemmaRow, MoserConstants, MoserError, MoserInputs, VerifyReport,
    LEMMAS,
};
use axilab::oscillation::{dyadic_scan, fit_decay, max_principle_monitor};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{csv, Outputs};

fn load(dir: &Path) -> Result<SnapshotSeries> {
    let (series, _) = SnapshotSeries::load_dir(dir).with_context(|| format!("loading snapshots from {}", dir.display()))?;
    if series.is_empty() {
        bail!("no snapshots in {}", dir.display());
    }
    Ok(series)
}

fn center_or_last(series: &SnapshotSeries, given: Option<[f64; 2]>) -> Result<AxisPoint> {
    Ok(match given {
        Some([x3, t]) => AxisPoint::new(x3, t),
        None => AxisPoint::new(0.0, series.last()?.time),
    })
}

/// Largest `r` for which `Q(center, r)` lies inside the sampled region with
/// one cell of margin.
fn largest_radius(series: &SnapshotSeries, center: AxisPoint) -> f64 {
    let g = &series.grid;
    let space = (g.rho_max - g.h_rho)
        .min(center.x3 - g.z_min - g.h_z)
        .min(g.z_max - g.h_z - center.x3);
    let first = series.snapshots.first().map_or(center.t, |s| s.time);
    let time = (center.t - first).max(0.0).sqrt();
    space.min(time).min(R_MAX)
}

fn resolution(series: &SnapshotSeries) -> f64 {
    4.0 * series.grid.h_rho.max(series.grid.h_z)
}

fn dyadic(top: f64, bottom: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = top;
    while r >= bottom * (1.0 - 1e-12) && out.len() < 64 {
        out.push(r);
        r *= 0.5;
    }
    out
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let grid = Arc::new(cfg.grid.build()?);
    let scenario = cfg.scenario.build(grid);
    let mut files = Outputs::new(out)?;
    let run = run_scenario(&scenario, &cfg.solver, cfg.stride, Some(&out.join("snapshots"))).context("simulation failed")?;
    let rows = run.stats.iter().map(|s| {
        let r = &s.report;
        vec![
            s.step.to_string(),
            r.time.to_string(),
            r.dt.to_string(),
            r.max_speed.to_string(),
            r.divergence.to_string(),
            r.pressure_iters.to_string(),
            r.kinetic_energy.to_string(),
            r.sigma_max.to_string(),
        ]
    });
    let header = ["step", "time", "dt", "max_speed", "divergence", "pressure_iters", "kinetic_energy", "sigma_max"];
    files.write("stats.csv", csv(&header, rows).as_bytes())?;
    let last = run.stats.last().map(|s| s.report);
    let summary = json!({
        "scenario": scenario.name,
        "steps": run.stats.len().saturating_sub(1),
        "snapshots": run.series.len(),
        "snapshot_dir": "snapshots",
        "max_divergence": run.max_divergence(),
        "max_pressure_iters": run.stats.iter().map(|s| s.report.pressure_iters).max().unwrap_or(0),
        "final_kinetic_energy": last.map(|r| r.kinetic_energy),
        "energy_nonincreasing": run.energy_nonincreasing(1e-12),
    });
    files.manifest("simulate", cfg, summary.clone())?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

pub fn criterion(cfg: &RunConfig, out: &Path, snaps: &Path, extra: &[f64]) -> Result<()> {
    let series = load(snaps)?;
    let probes: Vec<AxisPoint> = if cfg.probes.points.is_empty() {
        vec![center_or_last(&series, None)?]
    } else {
        cfg.probes.points.iter().map(|&[x3, t]| AxisPoint::new(x3, t)).collect()
    };
    let mut radii: Vec<f64> = cfg.probes.radii.iter().chain(extra).copied().collect();
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0 && r <= R_MAX)) {
        bail!("radius {r} outside (0, 2/3]");
    }
    if radii.is_empty() {
        let top = probes.iter().map(|&p| largest_radius(&series, p)).fold(f64::INFINITY, f64::min);
        radii = dyadic(top, resolution(&series));
        if radii.is_empty() {
            bail!("no resolvable radius fits the snapshot data");
        }
    }
    let report = scan_condition(&series, &probes, &radii, &cfg.gauge)?;
    let mut files = Outputs::new(out)?;
    files.write_json("criterion.json", &report)?;
    files.write("criterion.csv", report.to_csv().as_bytes())?;
    let summary = json!({
        "records": report.records.len(),
        "all_pass": report.all_pass,
        "worst_margin": report.worst_margin,
        "first_failure_r": report.first_failure.map(|f| f.r),
    });
    files.manifest("criterion", cfg, summary.clone())?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

pub fn oscillation(cfg: &RunConfig, out: &Path, snaps: &Path) -> Result<()> {
    let series = load(snaps)?;
    let center = center_or_last(&series, cfg.scan.center)?;
    let r_max = cfg.scan.r_max.unwrap_or_else(|| largest_radius(&series, center));
    let r_min = cfg.scan.r_min.unwrap_or_else(|| resolution(&series));
    let records = dyadic_scan(&series, center, r_min, r_max)?;
    if records.is_empty() {
        bail!("empty oscillation scan: r_min = {r_min} exceeds r_max = {r_max}");
    }
    let reference_r = cfg.scan.reference_r.unwrap_or(0.5 * r_max);
    let fit = fit_decay(&records, reference_r);
    let h = series.grid.h_rho.max(series.grid.h_z);
    let monitor = max_principle_monitor(&series, None, cfg.scan.max_principle_tol_h2 * h * h)?;
    let mut files = Outputs::new(out)?;
    let rows = records.iter().map(|r| {
        vec![r.center.x3.to_string(), r.center.t.to_string(), r.r.to_string(), r.sup.to_string(), r.inf.to_string(), r.osc.to_string()]
    });
    files.write("oscillation.csv", csv(&["center_x3", "center_t", "r", "sup", "inf", "osc"], rows).as_bytes())?;
    files.write_json("decay.json", &json!({ "fit": fit, "max_principle": monitor }))?;
    let summary = json!({
        "records": records.len(),
        "c2": fit.c2,
        "degenerate": fit.degenerate,
        "flagged": fit.flagged.len(),
        "max_principle_violations": monitor.violations,
    });
    files.manifest("oscillation", cfg, summary.clone())?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>)> {
    let bad = || anyhow!("malformed sweep {spec:?}, expected key=start:end:count");
    let (key, range) = spec.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    let values = if n == 1 { vec![a] } else { (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect() };
    Ok((key.trim().to_string(), values))
}

fn assign(base: &mut Value, key: &str, v: f64) -> Result<()> {
    let slot = match key {
        "c_star" | "alpha" => base.pointer_mut(&format!("/gauge/{key}")),
        _ => base.get_mut(key),
    };
    let slot = slot.ok_or_else(|| anyhow!("unknown constants parameter {key:?}"))?;
    *slot = json!(v);
    Ok(())
}

pub fn constants(cfg: &RunConfig, out: &Path, set: &[String], sweep: &[String]) -> Result<()> {
    let mut base = serde_json::to_value(&cfg.constants)?;
    if let Some(obj) = base.as_object_mut() {
        obj.entry("t_bar").or_insert(Value::Null);
    }
    for s in set {
        let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("malformed --set {s:?}, expected key=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| anyhow!("malformed --set {s:?}, value is not a number"))?;
        assign(&mut base, k.trim(), v)?;
    }
    let sweeps = sweep.iter().map(|s| parse_sweep(s)).collect::<Result<Vec<_>>>()?;
    for (k, _) in &sweeps {
        assign(&mut base.clone(), k, 0.0)?;
    }
    let mut tuples: Vec<Value> = vec![base];
    for (k, values) in &sweeps {
        let mut next = Vec::with_capacity(tuples.len() * values.len());
        for t in &tuples {
            for &v in values {
                let mut t = t.clone();
                assign(&mut t, k, v)?;
                next.push(t);
            }
        }
        tuples = next;
    }
    let mut header: Vec<&'static str> = Vec::new();
    let mut rows = Vec::with_capacity(tuples.len());
    for t in tuples {
        let row = match serde_json::from_value::<MoserInputs>(t.clone()) {
            Ok(inputs) => MoserConstants::compute(&inputs).columns(),
            Err(e) => {
                let mut cols = MoserConstants::compute(&MoserInputs::default()).columns();
                for (_, v) in cols.iter_mut() {
                    v.clear();
                }
                cols.last_mut().expect("error column").1 = format!("inputs: {e}");
                cols
            }
        };
        if header.is_empty() {
            header = row.iter().map(|(k, _)| *k).collect();
        }
        rows.push(row.into_iter().map(|(_, v)| v).collect::<Vec<_>>());
    }
    let failed = rows.iter().filter(|r| r.last().is_some_and(|e| !e.is_empty())).count();
    let mut files = Outputs::new(out)?;
    files.write("constants.csv", csv(&header, rows.clone()).as_bytes())?;
    let summary = json!({ "rows": rows.len(), "rows_with_errors": failed });
    files.manifest("constants", cfg, summary.clone())?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn skipped_report(center: AxisPoint, r: f64, reason: &str) -> VerifyReport {
    VerifyReport {
        center,
        r,
        k_r: f64::NAN,
        f2r: f64::NAN,
        m2r: f64::NAN,
        g2r: f64::NAN,
        axis_bound_holds: false,
        rows: LEMMAS.iter().map(|l| LemmaRow::skipped(l, reason)).collect(),
        failures: 0,
        g_trace: None,
    }
}

pub fn verify(cfg: &RunConfig, out: &Path, snaps: &Path, r: Option<f64>) -> Result<()> {
    let series = load(snaps)?;
    series.first()?.require(FieldKind::Swirl).context("verify needs swirl snapshots")?;
    let center = center_or_last(&series, cfg.verify.center)?;
    let r = r.or(cfg.verify.r).unwrap_or_else(|| (0.5 * largest_radius(&series, center)).min(1.0 / 3.0));
    if !(r > 0.0) {
        bail!("no radius R with Q(2R) inside the snapshot data");
    }
    let (pi, k) = swirl_to_pi(&series, center, r, cfg.verify.upper)?;
    // pi <= osc = 2 k_R by construction.
    let params = MoserInputs { m0: cfg.constants.m0.max(2.0), ..cfg.constants.clone() };
    let inputs = GrowthInputs { k_r: Some(k), params, trace: cfg.verify.trace, ..GrowthInputs::new(center, r) };
    let report = match verify_growth_lemmas(&pi, &inputs) {
        Ok(rep) => rep,
        Err(MoserError::Contract(msg)) => skipped_report(center, r, &format!("contract: {msg}")),
        Err(e) => return Err(e.into()),
    };
    let mut files = Outputs::new(out)?;
    files.write_json("ledger.json", &report)?;
    let summary = json!({
        "r": r,
        "k_r": report.k_r,
        "axis_bound_holds": report.axis_bound_holds,
        "failures": report.failures,
        "statuses": report.rows.iter().map(|row| json!([row.lemma, row.status])).collect::<Vec<_>>(),
    });
    files.manifest("verify", cfg, summary.clone())?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
