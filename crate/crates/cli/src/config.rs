//! Run configuration: one JSON document with optional `verify`, `scissor`
//! and `evolve` sections. Unknown keys are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wavedisp_core::catalog::{AiryParams, GaussianParams, SolutionSpec};
use wavedisp_core::evolve::{EvolutionConfig, SpatialGrid};
use wavedisp_core::lattice::{Lattice, StencilOrder, DEFAULT_MAX_POINTS};
use wavedisp_core::verify::SuiteConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub verify: Option<VerifySection>,
    #[serde(default)]
    pub scissor: Option<ScissorSection>,
    #[serde(default)]
    pub evolve: Option<EvolveSection>,
}

fn default_max_points() -> usize {
    DEFAULT_MAX_POINTS
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub cases: Vec<VerifyCase>,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

/// One solution on one lattice family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCase {
    pub label: String,
    pub solution: SolutionSpec,
    pub lattice: LatticeSpec,
    /// Refinement levels, coarsest first; the finest carries the verdict.
    #[serde(default = "one")]
    pub levels: usize,
    #[serde(default)]
    pub suite: SuiteConfig,
    /// Keep only these checks; all when absent.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    /// Write amplitude and phase of the finest level as CSV under `--out`.
    #[serde(default)]
    pub dump_csv: bool,
}

/// Closed box `origin + [0, extent]` cut into `cells` intervals per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub origin: Vec<f64>,
    pub extent: Vec<f64>,
    pub cells: Vec<usize>,
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice, CliError> {
        Lattice::from_extent(&self.origin, &self.extent, &self.cells)
            .map_err(|e| CliError::Config(format!("lattice: {e}")))
    }
}

/// Null decomposition of randomly drawn cos-branch modes. Draws are dyadic,
/// `k = i/8` and `v = 1 + j/16`, so the null condition is exact in floating
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScissorSection {
    pub pairs: usize,
    pub seed: u64,
    pub lattice: LatticeSpec,
    /// Largest `i` in `k = i/8`.
    #[serde(default = "default_k_steps")]
    pub k_steps: u32,
    /// Largest `j` in `v = 1 + j/16`.
    #[serde(default = "default_v_steps")]
    pub v_steps: u32,
    #[serde(default = "default_scissor_tol")]
    pub tolerance: f64,
}

fn default_k_steps() -> u32 {
    32
}

fn default_v_steps() -> u32 {
    32
}

fn default_scissor_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub initial: InitialState,
    pub grid: GridSpec,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub checks: EvolveChecks,
    /// Joint `(h, dt)` refinement study of the Hamilton-Jacobi residuals.
    #[serde(default)]
    pub qhj_study: Option<QhjStudy>,
    /// Write every n-th stored state as CSV under `--out`.
    #[serde(default)]
    pub csv_every: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Gaussian(GaussianParams),
    /// Airy slice apodized by `exp(-((x - taper_start)/taper_width)²)` for
    /// `x < taper_start`.
    Airy {
        #[serde(default)]
        params: AiryParams,
        taper_start: f64,
        taper_width: f64,
    },
}

/// Closed intervals `[lo, hi]` per axis, cut into `cells` intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub bounds: Vec<[f64; 2]>,
    pub cells: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<SpatialGrid, CliError> {
        let bounds: Vec<(f64, f64)> = self.bounds.iter().map(|b| (b[0], b[1])).collect();
        SpatialGrid::from_bounds(&bounds, &self.cells).map_err(|e| CliError::Config(format!("grid: {e}")))
    }
}

/// Bounds asserted on an evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveChecks {
    pub norm_drift: f64,
    /// Relative width error against the free-spreading closed form.
    pub width_rel: f64,
    /// Relative acceleration error against the Airy closed form.
    pub acceleration_rel: f64,
    /// Required `|a| / σ_a` of the fitted acceleration.
    pub acceleration_snr: f64,
}

impl Default for EvolveChecks {
    fn default() -> Self {
        EvolveChecks { norm_drift: 1e-10, width_rel: 1e-3, acceleration_rel: 0.05, acceleration_snr: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QhjStudy {
    pub levels: usize,
    #[serde(default)]
    pub order: StencilOrder,
    #[serde(default = "default_epsilon")]
    pub epsilon_rel: f64,
    /// Bound on the relative gap between the classical residual and `|V_B|`.
    #[serde(default = "default_plateau")]
    pub plateau_rel: f64,
}

fn default_epsilon() -> f64 {
    0.05
}

fn default_plateau() -> f64 {
    0.1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Structural checks that need no computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.verify.is_none() && self.scissor.is_none() && self.evolve.is_none() {
            return Err(CliError::Config("config has no verify, scissor or evolve section".into()));
        }
        if let Some(v) = &self.verify {
            if v.cases.is_empty() {
                return Err(CliError::Config("verify.cases is empty".into()));
            }
            for c in &v.cases {
                if c.levels == 0 {
                    return Err(CliError::Config(format!("case {}: levels must be at least 1", c.label)));
                }
                c.lattice.build()?;
            }
        }
        if let Some(s) = &self.scissor {
            if s.pairs == 0 || s.k_steps == 0 {
                return Err(CliError::Config("scissor needs pairs ≥ 1 and k_steps ≥ 1".into()));
            }
            s.lattice.build()?;
        }
        if let Some(e) = &self.evolve {
            e.grid.build()?;
            if let Some(q) = &e.qhj_study {
                if q.levels == 0 {
                    return Err(CliError::Config("evolve.qhj_study.levels must be at least 1".into()));
                }
            }
            if e.csv_every == Some(0) {
                return Err(CliError::Config("evolve.csv_every must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Applies command-line overrides to every verify case.
    pub fn override_cases(&mut self, order: Option<StencilOrder>, levels: Option<usize>) {
        if let Some(v) = &mut self.verify {
            for c in &mut v.cases {
                if let Some(o) = order {
                    c.suite.order = o;
                }
                if let Some(l) = levels {
                    c.levels = l;
                }
            }
        }
        if let (Some(e), Some(o)) = (&mut self.evolve, order) {
            if let Some(q) = &mut e.qhj_study {
                q.order = o;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_dt_names_the_field() {
        let text = r#"{"evolve": {"initial": {"kind": "gaussian", "sigma": 1.0},
            "grid": {"bounds": [[-5, 5]], "cells": [100]}, "evolution": {"steps": 10}}}"#;
        let err = RunConfig::from_json(text).unwrap_err();
        assert!(matches!(&err, CliError::Config(m) if m.contains("dt")), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"verify": {"cases": [], "extra": 1}}"#;
        assert!(matches!(RunConfig::from_json(text), Err(CliError::Config(m)) if m.contains("extra")));
    }

    #[test]
    fn empty_config_is_rejected() {
        assert!(RunConfig::from_json("{}").is_err());
    }
}
