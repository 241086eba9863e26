use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use axilab::criterion::{GaugeParams, R_MAX};
use axilab::dynamics::{ScenarioSpec, SolverConfig};
use axilab::moser::MoserInputs;
use axilab::CylGrid;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub n_rho: usize,
    pub n_z: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { rho_max: 1.0, z_min: -1.0, z_max: 1.0, n_rho: 32, n_z: 64 }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<CylGrid> {
        Ok(CylGrid::new(self.rho_max, self.z_min, self.z_max, self.n_rho, self.n_z)?)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSpec {
    /// Axis points `[x3, t]`; empty means `[0, t_last]`.
    pub points: Vec<[f64; 2]>,
    /// Radii; empty means a dyadic ladder down to four cells.
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    /// Axis point `[x3, t]`; defaults to `[0, t_last]`.
    pub center: Option<[f64; 2]>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    /// Defaults to `r_max / 2`.
    pub reference_r: Option<f64>,
    /// Relative slack of the maximum-principle monitor, in units of `h^2`.
    pub max_principle_tol_h2: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self { center: None, r_min: None, r_max: None, reference_r: None, max_principle_tol_h2: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// Top of `Q(2R)` as `[x3, t]`; defaults to `[0, t_last]`.
    pub center: Option<[f64; 2]>,
    /// Defaults to the largest radius whose `Q(2R)` fits the data.
    pub r: Option<f64>,
    /// Build `pi = sup sigma - sigma` (true) or `sigma - inf sigma` (false).
    pub upper: bool,
    pub trace: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { center: None, r: None, upper: true, trace: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Output directory, relative to the output root.
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Keep every `stride`-th step.
    pub stride: usize,
    pub scenario: ScenarioSpec,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub gauge: GaugeParams,
    pub probes: ProbeSpec,
    pub scan: ScanSpec,
    pub verify: VerifySpec,
    pub constants: MoserInputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("axilab-out"),
            seed: 0,
            scenario: ScenarioSpec::RigidRotation { omega: 1.0 },
            grid: GridSpec::default(),
            solver: SolverConfig { dt: 2e-4, t_end: 0.02, ..SolverConfig::default() },
            stride: 10,
            gauge: GaugeParams::default(),
            probes: ProbeSpec::default(),
            scan: ScanSpec::default(),
            verify: VerifySpec::default(),
            constants: MoserInputs::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gauge.validate().context("gauge exponent/prefactor")?;
        self.solver.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        if self.stride == 0 {
            bail!("stride must be positive");
        }
        for &r in &self.probes.radii {
            if !(r > 0.0 && r <= R_MAX) {
                bail!("probe radius {r} outside (0, 2/3]");
            }
        }
        Ok(())
    }

    /// Canonical JSON used for hashing and echoing.
    pub fn canonical(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(self)?)
    }
}
