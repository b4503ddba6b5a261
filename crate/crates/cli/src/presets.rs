//! Shipped run configurations, one per acceptance criterion plus a negative
//! control. `wavedisp verify --preset NAME` runs them unchanged.

use std::f64::consts::PI;

use wavedisp_core::catalog::{AiryParams, Branch, GaussianParams, Harmonic, SlepianParams, SolutionSpec};
use wavedisp_core::evolve::EvolutionConfig;
use wavedisp_core::geometry::ScaleFactor;
use wavedisp_core::lattice::DEFAULT_MAX_POINTS;
use wavedisp_core::verify::SuiteConfig;

use crate::config::{
    EvolveChecks, EvolveSection, GridSpec, InitialState, LatticeSpec, QhjStudy, RunConfig, ScissorSection, VerifyCase,
    VerifySection,
};
use crate::CliError;

pub const NAMES: [&str; 13] = [
    "slepian-scalar",
    "slepian-cosh",
    "plane-waves",
    "em-flat",
    "em-frw",
    "gw-flat",
    "scissor",
    "harmonic",
    "gaussian-spreading",
    "qhj-separation",
    "airy-acceleration",
    "slepian-detuned",
    "slepian-fourth-order",
];

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let cfg = match name {
        "slepian-scalar" => verify(name, vec![slepian_scalar(0.0, 3)]),
        "slepian-cosh" => verify(name, vec![slepian_cosh()]),
        "plane-waves" => verify(name, plane_waves()),
        "em-flat" => verify(name, vec![one_period("em_flat", SolutionSpec::SlepianEmFlat(cos_mode()), 16, 3)]),
        "em-frw" => verify(name, vec![em_frw()]),
        "gw-flat" => verify(name, vec![one_period("gw_flat", SolutionSpec::SlepianGw(cos_mode()), 16, 3)]),
        "scissor" => RunConfig { name: Some(name.into()), verify: None, scissor: Some(scissor()), evolve: None },
        "harmonic" => verify(name, harmonic()),
        "gaussian-spreading" => evolve(name, gaussian_spreading()),
        "qhj-separation" => evolve(name, qhj_separation()),
        "airy-acceleration" => evolve(name, airy_acceleration()),
        "slepian-detuned" => verify(name, vec![slepian_scalar(0.01, 2)]),
        "slepian-fourth-order" => verify(name, vec![slepian_fourth_order()]),
        other => {
            return Err(CliError::Config(format!("unknown preset {other:?}; available: {}", NAMES.join(", "))));
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn verify(name: &str, cases: Vec<VerifyCase>) -> RunConfig {
    RunConfig {
        name: Some(name.into()),
        verify: Some(VerifySection { cases, max_points: DEFAULT_MAX_POINTS }),
        scissor: None,
        evolve: None,
    }
}

fn evolve(name: &str, section: EvolveSection) -> RunConfig {
    RunConfig { name: Some(name.into()), verify: None, scissor: None, evolve: Some(section) }
}

fn case(
    label: &str,
    solution: SolutionSpec,
    origin: &[f64],
    extent: &[f64],
    cells: &[usize],
    levels: usize,
) -> VerifyCase {
    VerifyCase {
        label: label.into(),
        solution,
        lattice: LatticeSpec { origin: origin.to_vec(), extent: extent.to_vec(), cells: cells.to_vec() },
        levels,
        suite: SuiteConfig::default(),
        checks: None,
        dump_csv: false,
    }
}

/// `k = 1, v = 2, c = 1`: `κ = √3`, `ω = 2`, `V_B = -3`.
fn cos_mode() -> SlepianParams {
    SlepianParams::new(1.0, 2.0, 1.0, Branch::CosSuperPhase)
}

/// One period per axis for the `k = 1, v = 2` mode: `2π/ω`, `2π/k`, `2π/κ`.
const PERIODS: [f64; 3] = [PI, 2.0 * PI, 2.0 * PI / 1.732_050_807_568_877_2];

fn one_period(label: &str, solution: SolutionSpec, cells: usize, levels: usize) -> VerifyCase {
    case(label, solution, &[0.0; 3], &PERIODS, &[cells; 3], levels)
}

/// Finest level 64³.
fn slepian_scalar(detune: f64, levels: usize) -> VerifyCase {
    let p = SlepianParams { detune, ..cos_mode() };
    let label = if detune == 0.0 { "slepian_scalar" } else { "slepian_scalar_detuned" };
    one_period(label, SolutionSpec::SlepianScalar(p), 16, levels)
}

/// The box is deliberately not commensurate with the mode: on a one-period
/// box the discrete dispersion of any centred stencil cancels and the wave
/// residual is pure roundoff.
fn slepian_fourth_order() -> VerifyCase {
    let mut c =
        case("slepian_scalar_fourth", SolutionSpec::SlepianScalar(cos_mode()), &[0.0; 3], &[3.0; 3], &[24; 3], 3);
    c.suite.order = wavedisp_core::lattice::StencilOrder::Fourth;
    c
}

/// `k = 2, v = 0.5`: `□U/U = κ² = 3`, recorded with the opposite sign in
/// the literature formula; the suite emits the difference as a warning.
fn slepian_cosh() -> VerifyCase {
    let p = SlepianParams::new(2.0, 0.5, 1.0, Branch::CoshSubPhase);
    case("slepian_scalar_cosh", SolutionSpec::SlepianScalar(p), &[0.0, 0.0, -1.0], &[PI, PI, 2.0], &[32; 3], 2)
}

fn plane_waves() -> Vec<VerifyCase> {
    let specs = [
        ("plane_wave_nonrel", SolutionSpec::PlaneWaveNonrel { p: 1.0, hbar: 1.0, m: 1.0 }, 2),
        ("plane_wave", SolutionSpec::PlaneWave { k: 1.0, c: 1.0 }, 3),
        ("plane_wave_em_flat", SolutionSpec::PlaneWaveEmFlat { k: 1.0, c: 1.0 }, 3),
        ("plane_wave_em_frw", SolutionSpec::PlaneWaveEmFrw { k: 1.0, c: 1.0, a0: 2.0 }, 3),
        ("plane_wave_gw", SolutionSpec::PlaneWaveGw { k: 1.0, c: 1.0 }, 3),
    ];
    specs
        .into_iter()
        .map(|(label, spec, nd)| {
            let mut c = case(label, spec, &vec![0.0; nd], &vec![1.0; nd], &vec![8; nd], 3);
            c.suite.bohm_tol = Some(1e-12);
            c.suite.dispersion_tol = Some(1e-12);
            c
        })
        .collect()
}

/// `a = e^{0.1t}` on `t ∈ [0, 2]`; finest spacing 1/64 on every axis.
fn em_frw() -> VerifyCase {
    let spec = SolutionSpec::SlepianEmFrw {
        k: 1.0,
        v: 2.0,
        c: 1.0,
        amp: 1.0,
        branch: Some(Branch::CosSuperPhase),
        detune: 0.0,
        scale_factor: ScaleFactor::Exponential { h: 0.1 },
    };
    let mut c = case("em_frw", spec, &[0.0; 3], &[2.0, 1.0, 2.0], &[32, 16, 32], 3);
    c.suite.bohm_tol = Some(1e-2);
    c
}

fn scissor() -> ScissorSection {
    ScissorSection {
        pairs: 10,
        seed: 20_240_611,
        lattice: LatticeSpec { origin: vec![0.0; 3], extent: vec![1.0; 3], cells: vec![8; 3] },
        k_steps: 32,
        v_steps: 32,
        tolerance: 1e-12,
    }
}

fn harmonic() -> Vec<VerifyCase> {
    let amp = |choice| SolutionSpec::HarmonicAmplitude { choice, hbar: 1.0, m: 1.0 };
    let mut saddle =
        case("harmonic_saddle", amp(Harmonic::SaddleXy), &[0.0, -1.0, -1.0], &[1.0, 2.0, 2.0], &[4, 32, 32], 1);
    saddle.suite.bohm_tol = Some(1e-12);
    // Finest spacing 1/128.
    let mut exp_cos = case("harmonic_exp_cos", amp(Harmonic::ExpCos), &[0.0; 3], &[1.0; 3], &[4, 32, 32], 3);
    exp_cos.suite.bohm_tol = Some(1e-4);
    // The t axis only carries the sample; refining it changes nothing.
    let mut square = case("non_harmonic_square", amp(Harmonic::Square), &[0.0, 0.5, 0.0], &[1.0; 3], &[4, 32, 8], 1);
    square.suite.bohm_tol = Some(1e-3);
    square.suite.bohm_relative = true;
    vec![saddle, exp_cos, square]
}

/// Runs to `ħt/2mσ² = 1`, where the width has grown by `√2`.
fn gaussian_spreading() -> EvolveSection {
    let mut evolution = EvolutionConfig::new(0.002, 1000);
    evolution.snapshot_every = 10;
    EvolveSection {
        initial: InitialState::Gaussian(GaussianParams::default()),
        grid: GridSpec { bounds: vec![[-20.0, 20.0]], cells: vec![800] },
        evolution,
        checks: EvolveChecks::default(),
        qhj_study: None,
        csv_every: None,
    }
}

/// Joint refinement `(h, dt) = (0.1, 0.01) → (0.025, 0.0025)` up to `t = 1`.
fn qhj_separation() -> EvolveSection {
    EvolveSection {
        initial: InitialState::Gaussian(GaussianParams::default()),
        grid: GridSpec { bounds: vec![[-15.0, 15.0]], cells: vec![300] },
        evolution: EvolutionConfig::new(0.01, 100),
        checks: EvolveChecks::default(),
        qhj_study: Some(QhjStudy { levels: 3, order: Default::default(), epsilon_rel: 0.05, plateau_rel: 0.1 }),
        csv_every: None,
    }
}

/// `B = m = ħ = 1`, so the peak accelerates at 1/2. The run stops at `t = 2`,
/// before the tapered tail reaches the left wall.
fn airy_acceleration() -> EvolveSection {
    let mut evolution = EvolutionConfig::new(0.005, 400);
    evolution.snapshot_every = 10;
    EvolveSection {
        initial: InitialState::Airy { params: AiryParams::default(), taper_start: -40.0, taper_width: 10.0 },
        grid: GridSpec { bounds: vec![[-100.0, 30.0]], cells: vec![2600] },
        evolution,
        checks: EvolveChecks::default(),
        qhj_study: None,
        csv_every: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for n in NAMES {
            preset(n).unwrap_or_else(|e| panic!("{n}: {e}"));
        }
        assert!(matches!(preset("nope"), Err(CliError::Config(_))));
    }

    #[test]
    fn presets_round_trip_through_json() {
        for n in NAMES {
            let cfg = preset(n).unwrap();
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(RunConfig::from_json(&text).unwrap(), cfg, "{n}");
        }
    }
}
