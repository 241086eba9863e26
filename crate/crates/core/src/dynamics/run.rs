//! Time loop with snapshot output.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::nse::{kinetic_energy, NseSolver, StepReport};
use super::scenario::Scenario;
use super::{SolverConfig, SolverError};
use crate::geometry::SnapshotSeries;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepStats {
    pub step: usize,
    #[serde(flatten)]
    pub report: StepReport,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub series: SnapshotSeries,
    pub stats: Vec<StepStats>,
    pub dir: Option<PathBuf>,
}

impl RunOutput {
    pub fn max_divergence(&self) -> f64 {
        self.stats.iter().fold(0.0, |m, s| m.max(s.report.divergence))
    }

    /// Whether the recorded kinetic energy never increases by more than
    /// `slack` (relative) between steps.
    pub fn energy_nonincreasing(&self, slack: f64) -> bool {
        self.stats
            .windows(2)
            .all(|w| w[1].report.kinetic_energy <= w[0].report.kinetic_energy * (1.0 + slack))
    }
}

/// Runs `cfg.n_steps()` steps, keeping the initial state, every
/// `stride`-th state and the final state. With `out_dir` the snapshots and a sidecar carrying the
/// per-step statistics are written to disk.
pub fn run_scenario(scenario: &Scenario, cfg: &SolverConfig, stride: usize, out_dir: Option<&Path>) -> Result<RunOutput, SolverError> {
    if stride == 0 {
        return Err(SolverError::Config("snapshot stride must be positive".into()));
    }
    let grid = scenario.grid().clone();
    let mut solver = NseSolver::new(grid.clone(), cfg.clone(), scenario.boundary.clone())?;
    let mut state = scenario.initial.clone();
    let div0 = solver.divergence(&state);
    if div0 > cfg.pressure_tol {
        return Err(SolverError::NotSolenoidal { residual: div0, tol: cfg.pressure_tol });
    }
    let steps = cfg.n_steps();
    let mut snaps = vec![state.to_snapshot()];
    let mut stats = Vec::with_capacity(steps + 1);
    stats.push(StepStats {
        step: 0,
        report: StepReport {
            time: state.time,
            dt: 0.0,
            max_speed: state.max_speed(),
            divergence: div0,
            pressure_iters: 0,
            kinetic_energy: kinetic_energy(&state),
            sigma_max: scenario.sigma0(),
        },
    });
    for step in 1..=steps {
        let report = solver.step(&mut state).map_err(|e| SolverError::AtStep { step, source: Box::new(e) })?;
        stats.push(StepStats { step, report });
        if step % stride == 0 || step == steps {
            snaps.push(state.to_snapshot());
        }
    }
    let series = SnapshotSeries::new(Arc::clone(&grid), snaps)?;
    let dir = match out_dir {
        Some(d) => {
            let meta = serde_json::json!({
                "scenario": scenario.name,
                "solver": cfg,
                "stride": stride,
                "steps": steps,
                "stats": stats,
            });
            series.save_dir(d, meta)?;
            Some(d.to_path_buf())
        }
        None => None,
    };
    Ok(RunOutput { series, stats, dir })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ScenarioSpec;
    use crate::geometry::{CylGrid, FieldKind};

    #[test]
    fn zero_run_writes_identical_snapshots() {
        let g = Arc::new(CylGrid::cylinder(1.0, 8, 8).unwrap());
        let sc = ScenarioSpec::Zero.build(g.clone());
        let cfg = SolverConfig { dt: 1e-3, t_end: 0.1, ..Default::default() };
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&sc, &cfg, 10, Some(dir.path())).unwrap();
        assert_eq!(out.stats.len(), 101);
        assert_eq!(out.series.len(), 11);
        let (back, side) = SnapshotSeries::load_dir(dir.path()).unwrap();
        assert_eq!(back.len(), 11);
        assert_eq!(side.meta["scenario"], "zero");
        for s in &back.snapshots {
            assert!(s.require(FieldKind::VPhi).unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn step_errors_carry_the_step_index() {
        let g = Arc::new(CylGrid::cylinder(1.0, 8, 8).unwrap());
        let sc = ScenarioSpec::Zero.build(g);
        let cfg = SolverConfig { dt: 0.5, t_end: 1.0, ..Default::default() };
        let err = run_scenario(&sc, &cfg, 1, None).unwrap_err();
        assert!(matches!(err, SolverError::AtStep { step: 1, .. }));
    }
}
