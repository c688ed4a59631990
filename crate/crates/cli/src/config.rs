//! Flat `key = value` run configuration.
//!
//! Values are given in laboratory units and converted to SI here:
//!
//! | key                    | unit                      |
//! |------------------------|---------------------------|
//! | `device.EJ_GHz`        | `2E_J/h` in GHz           |
//! | `device.Cg_F`          | F                         |
//! | `device.CJ_F`          | F                         |
//! | `device.ng`            | dimensionless             |
//! | `device.phi_c`         | Φ₀                        |
//! | `device.S_um2`         | μm²                       |
//! | `device.T1_s`          | s                         |
//! | `device.T2_s`          | s                         |
//! | `device.mu`            | dimensionless             |
//! | `cavity.lambda_cm`     | cm                        |
//! | `cavity.Q`             | dimensionless             |
//! | `cavity.T_mK`          | mK                        |
//! | `cavity.V_m3`          | m³ (default `λ³`)         |
//! | `cavity.theta`         | rad                       |
//! | `sim.n_max`            | photons                   |
//! | `report.margin`        | dimensionless             |
//! | `report.transfer_margin` | dimensionless           |
//! | `output.path`          | file path                 |
//!
//! Lines starting with `#` and blank lines are ignored. Unset keys keep the
//! defaults of [`RunConfig::default`].

use std::path::PathBuf;

use cavity_synth::physics::{constants::PLANCK, CavityParams, DeviceParams, ReportOptions};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub device: DeviceParams,
    pub cavity: CavityParams,
    /// Minimum truncation for synthesis and simulation.
    pub n_max: usize,
    pub report: ReportOptions,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            device: DeviceParams::reference_device(),
            cavity: CavityParams::reference_cavity(),
            n_max: 8,
            report: ReportOptions::default(),
            output_path: None,
        }
    }
}

pub const KEYS: [&str; 18] = [
    "device.EJ_GHz",
    "device.Cg_F",
    "device.CJ_F",
    "device.ng",
    "device.phi_c",
    "device.S_um2",
    "device.T1_s",
    "device.T2_s",
    "device.mu",
    "cavity.lambda_cm",
    "cavity.Q",
    "cavity.T_mK",
    "cavity.V_m3",
    "cavity.theta",
    "sim.n_max",
    "report.margin",
    "report.transfer_margin",
    "output.path",
];

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Parse(format!(
                    "config line {}: expected `key = value`",
                    lineno + 1
                ))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Parse(format!("config line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value, in the units listed above.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        if key == "output.path" {
            self.output_path = Some(PathBuf::from(value));
            return Ok(());
        }
        if key == "sim.n_max" {
            self.n_max = value
                .parse()
                .map_err(|_| format!("{key}: `{value}` is not a nonnegative integer"))?;
            return Ok(());
        }
        let x: f64 = value
            .parse()
            .map_err(|_| format!("{key}: `{value}` is not a number"))?;
        let d = &mut self.device;
        let c = &mut self.cavity;
        match key {
            "device.EJ_GHz" => d.ej = PLANCK * x * 1.0e9 / 2.0,
            "device.Cg_F" => d.cg = x,
            "device.CJ_F" => d.cj = x,
            "device.ng" => d.ng = x,
            "device.phi_c" => d.phi_c = x,
            "device.S_um2" => d.s = x * 1.0e-12,
            "device.T1_s" => d.t1 = x,
            "device.T2_s" => d.t2 = x,
            "device.mu" => d.mu = x,
            "cavity.lambda_cm" => c.lambda = x * 1.0e-2,
            "cavity.Q" => c.q = x,
            "cavity.T_mK" => c.temperature = x * 1.0e-3,
            "cavity.V_m3" => c.volume = Some(x),
            "cavity.theta" => c.theta = x,
            "report.margin" => self.report.margin = x,
            "report.transfer_margin" => self.report.transfer_margin = x,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.device.validate().map_err(CliError::from_core)?;
        self.cavity.validate().map_err(CliError::from_core)?;
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.report.margin) || !ok(self.report.transfer_margin) {
            return Err(CliError::Parse("report margins must be positive".into()));
        }
        Ok(())
    }
}
