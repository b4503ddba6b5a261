//! Command implementations. Each returns a [`RunReport`]; rendering and
//! exit codes are left to the caller.

use std::fmt::Write as _;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wavedisp_core::bohm::Sector;
use wavedisp_core::catalog::SampledField;
use wavedisp_core::catalog::{catalog, Branch, Luminality, SignNote, SlepianParams};
use wavedisp_core::evolve::{
    apodized_airy, packet_stats, qhj_residual, schrodinger_evolve, EvolutionConfig, PacketStats, SpatialGrid,
    Trajectory,
};
use wavedisp_core::lattice::Lattice;
use wavedisp_core::madelung::{decompose, decompose_components, DecomposeOptions};
use wavedisp_core::verify::suite::all_passed;
use wavedisp_core::verify::{convergence_study, run_convergence, scissor_check, ResidualReport, Status, Warning};

use crate::config::{EvolveSection, InitialState, QhjStudy, RunConfig, ScissorSection, VerifyCase};
use crate::output::write_atomic;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub sector: Sector,
    pub expected_class: Luminality,
    pub vb_formula: String,
    pub anchor: String,
    /// Serialized default parameters; doubles as the parameter schema.
    pub params: serde_json::Value,
    pub sign_note: Option<SignNote>,
}

pub fn cmd_catalog() -> Vec<CatalogEntry> {
    catalog()
        .into_iter()
        .map(|s| CatalogEntry {
            params: serde_json::to_value(s.spec).expect("specs serialize"),
            name: s.name,
            sector: s.sector,
            expected_class: s.expected_class,
            vb_formula: s.vb_formula,
            anchor: s.anchor,
            sign_note: s.sign_note,
        })
        .collect()
}

pub fn render_catalog(entries: &[CatalogEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        let _ = writeln!(s, "{}  [{}]  class {}", e.name, e.sector.name(), e.expected_class);
        let _ = writeln!(s, "    V_B = {}", e.vb_formula);
        let _ = writeln!(s, "    params: {}", e.params);
        let _ = writeln!(s, "    anchor: {}", e.anchor);
        if let Some(n) = &e.sign_note {
            let _ = writeln!(
                s,
                "    note: {} = {} (alternative {} = {})",
                n.oracle_formula, n.oracle_value, n.alternative_formula, n.alternative_value
            );
        }
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub name: Option<String>,
    pub passed: bool,
    pub cases: Vec<CaseReport>,
    pub scissor: Option<ScissorReport>,
    pub evolve: Option<EvolveReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub label: String,
    pub solution: String,
    pub sector: Sector,
    pub levels: usize,
    pub passed: bool,
    pub reports: Vec<ResidualReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScissorPair {
    pub k: f64,
    pub v: f64,
    pub kappa: f64,
    pub omega: f64,
    pub reports: Vec<ResidualReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScissorReport {
    pub seed: u64,
    pub passed: bool,
    pub pairs: Vec<ScissorPair>,
}

/// A scalar statistic compared against a bound.
#[derive(Debug, Clone, Serialize)]
pub struct StatCheck {
    pub name: String,
    pub value: f64,
    /// Closed-form value the statistic is compared with, when one exists.
    pub expected: Option<f64>,
    pub bound: f64,
    /// `"max"` when `value ≤ bound` passes, `"min"` when `value ≥ bound` does.
    pub kind: String,
    pub anchor: String,
    pub passed: bool,
}

impl StatCheck {
    fn at_most(name: &str, value: f64, expected: Option<f64>, bound: f64, anchor: &str) -> Self {
        StatCheck {
            name: name.into(),
            value,
            expected,
            bound,
            kind: "max".into(),
            anchor: anchor.into(),
            passed: value <= bound,
        }
    }

    fn at_least(name: &str, value: f64, bound: f64, anchor: &str) -> Self {
        StatCheck {
            name: name.into(),
            value,
            expected: None,
            bound,
            kind: "min".into(),
            anchor: anchor.into(),
            passed: value >= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveReport {
    pub initial: String,
    pub passed: bool,
    pub final_time: f64,
    pub norm_drift: f64,
    pub checks: Vec<StatCheck>,
    pub stats: PacketStats,
    pub warnings: Vec<Warning>,
    /// Joint `(h, dt)` refinement of the Hamilton-Jacobi residuals.
    pub qhj: Option<Vec<ResidualReport>>,
}

impl RunReport {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        RunReport {
            command: command.into(),
            name: cfg.name.clone(),
            passed: true,
            cases: vec![],
            scissor: None,
            evolve: None,
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.cases.iter().all(|c| c.passed)
            && self.scissor.as_ref().is_none_or(|s| s.passed)
            && self.evolve.as_ref().is_none_or(|e| e.passed);
        self
    }

    /// Every residual report with a `case/check` label.
    pub fn labelled(&self) -> Vec<(String, &ResidualReport)> {
        let mut out = Vec::new();
        for c in &self.cases {
            out.extend(c.reports.iter().map(|r| (format!("{}/{}", c.label, r.check_name), r)));
        }
        if let Some(s) = &self.scissor {
            for p in &s.pairs {
                let tag = format!("scissor(k={},v={})", p.k, p.v);
                out.extend(p.reports.iter().map(|r| (format!("{tag}/{}", r.check_name), r)));
            }
        }
        if let Some(q) = self.evolve.as_ref().and_then(|e| e.qhj.as_ref()) {
            out.extend(q.iter().map(|r| (format!("evolve/{}", r.check_name), r)));
        }
        out
    }
}

/// Runs every section present in `cfg`.
pub fn cmd_verify(cfg: &RunConfig, out: Option<&Path>) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("verify", cfg);
    if let Some(v) = &cfg.verify {
        for case in &v.cases {
            report.cases.push(run_case(case, v.max_points, out)?);
        }
    }
    if let Some(s) = &cfg.scissor {
        report.scissor = Some(run_scissor(s)?);
    }
    if let Some(e) = &cfg.evolve {
        report.evolve = Some(run_evolve(e, out)?);
    }
    finish(report, out)
}

/// Runs only the `evolve` section.
pub fn cmd_evolve(cfg: &RunConfig, out: Option<&Path>) -> Result<RunReport, CliError> {
    let section = cfg.evolve.as_ref().ok_or_else(|| CliError::Config("config has no evolve section".into()))?;
    let mut report = RunReport::new("evolve", cfg);
    report.evolve = Some(run_evolve(section, out)?);
    finish(report, out)
}

/// Refinement studies only; every study needs at least three levels so that
/// two orders are observed.
pub fn cmd_convergence(cfg: &RunConfig, out: Option<&Path>) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("convergence", cfg);
    let study = cfg.evolve.as_ref().and_then(|e| e.qhj_study.as_ref().map(|q| (e, q)));
    if cfg.verify.is_none() && study.is_none() {
        return Err(CliError::Config("convergence needs verify cases or an evolve.qhj_study".into()));
    }
    if let Some(v) = &cfg.verify {
        if let Some(c) = v.cases.iter().find(|c| c.levels < 3) {
            return Err(CliError::Config(format!("case {}: convergence needs levels ≥ 3, got {}", c.label, c.levels)));
        }
        for case in &v.cases {
            report.cases.push(run_case(case, v.max_points, out)?);
        }
    }
    if let Some((section, q)) = study {
        if q.levels < 3 {
            return Err(CliError::Config(format!("evolve.qhj_study: convergence needs levels ≥ 3, got {}", q.levels)));
        }
        let reports = run_qhj_study(section, q)?;
        let grid = section.grid.build()?;
        let traj = evolve_initial(section, &grid, &section.evolution)?;
        report.evolve = Some(EvolveReport {
            initial: initial_name(&section.initial).into(),
            passed: all_passed(&reports),
            final_time: traj.times().last().copied().unwrap_or(0.0),
            norm_drift: traj.norm_drift(),
            checks: vec![],
            stats: packet_stats(&traj)?,
            warnings: traj.warnings.clone(),
            qhj: Some(reports),
        });
    }
    finish(report, out)
}

fn finish(report: RunReport, out: Option<&Path>) -> Result<RunReport, CliError> {
    let report = report.finish();
    if let Some(dir) = out {
        write_atomic(&dir.join("report.json"), crate::output::to_json(&report).as_bytes())?;
    }
    Ok(report)
}

fn run_case(case: &VerifyCase, max_points: usize, out: Option<&Path>) -> Result<CaseReport, CliError> {
    let sol = case.solution.build()?;
    let base = case.lattice.build()?;
    let mut reports = run_convergence(&sol, &base, case.levels, max_points, &case.suite)?;
    if let Some(keep) = &case.checks {
        if let Some(unknown) = keep.iter().find(|k| !reports.iter().any(|r| &r.check_name == *k)) {
            return Err(CliError::Config(format!("case {}: no check named {unknown:?}", case.label)));
        }
        reports.retain(|r| keep.contains(&r.check_name));
    }
    if let (true, Some(dir)) = (case.dump_csv, out) {
        let mut finest = base.clone();
        for _ in 1..case.levels {
            finest = finest.refine_with_cap(max_points)?;
        }
        dump_decomposition(&sol, &finest, case, &dir.join(format!("{}.csv", case.label)))?;
    }
    Ok(CaseReport {
        label: case.label.clone(),
        solution: sol.name.clone(),
        sector: sol.sector,
        levels: case.levels,
        passed: all_passed(&reports),
        reports,
    })
}

fn dump_decomposition(
    sol: &wavedisp_core::catalog::AnalyticSolution,
    lattice: &Lattice,
    case: &VerifyCase,
    path: &Path,
) -> Result<(), CliError> {
    let opts = DecomposeOptions { hbar: sol.hbar, mode: case.suite.mode, ..DecomposeOptions::default() };
    let pair = match sol.sample(lattice)? {
        SampledField::Scalar(psi) => decompose(&psi, &opts)?,
        field => decompose_components(&field.components(), &opts)?.0,
    };
    let mut buf = Vec::new();
    pair.write_csv(&mut buf)?;
    write_atomic(path, &buf)?;
    Ok(())
}

/// Dyadic draws `k = i/8`, `v = 1 + j/16` keep every product in the null
/// condition exact.
fn run_scissor(s: &ScissorSection) -> Result<ScissorReport, CliError> {
    let lattice = s.lattice.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut pairs = Vec::with_capacity(s.pairs);
    for _ in 0..s.pairs {
        let k = rng.random_range(1..=s.k_steps) as f64 / 8.0;
        let v = 1.0 + rng.random_range(0..=s.v_steps) as f64 / 16.0;
        let params = SlepianParams::new(k, v, 1.0, Branch::CosSuperPhase);
        let reports: Vec<ResidualReport> = scissor_check(&params, &lattice)?
            .into_iter()
            .map(|r| {
                let (tol, anchor) = if r.check_name == "scissor_null" {
                    (0.0, "constituents are null: k² + κ² - ω²/c² = 0")
                } else {
                    (s.tolerance, "cos(κy) e^{i(kx-ωt)} = ½e^{i(kx+κy-ωt)} + ½e^{i(kx-κy-ωt)}")
                };
                r.with_anchor(anchor).asserted(Some(tol), None)
            })
            .collect();
        pairs.push(ScissorPair { k, v, kappa: params.kappa(), omega: params.omega(), reports });
    }
    let passed = pairs.iter().all(|p| all_passed(&p.reports));
    Ok(ScissorReport { seed: s.seed, passed, pairs })
}

fn initial_name(init: &InitialState) -> &'static str {
    match init {
        InitialState::Gaussian(_) => "gaussian",
        InitialState::Airy { .. } => "airy",
    }
}

/// Evolves the configured initial state on `grid`.
fn evolve_initial(section: &EvolveSection, grid: &SpatialGrid, cfg: &EvolutionConfig) -> Result<Trajectory, CliError> {
    if grid.ndim() != 1 {
        return Err(CliError::Config("gaussian and airy initial states are one-dimensional".into()));
    }
    let (hbar, m) = match section.initial {
        InitialState::Gaussian(p) => (p.hbar, p.m),
        InitialState::Airy { params, .. } => (params.hbar, params.m),
    };
    if hbar != cfg.hbar || m != cfg.m {
        return Err(CliError::Config(format!(
            "initial state has hbar = {hbar}, m = {m} but evolution uses hbar = {}, m = {}",
            cfg.hbar, cfg.m
        )));
    }
    let traj = match section.initial {
        InitialState::Gaussian(p) => schrodinger_evolve(grid, &grid.sample(|r| p.psi(r[0], 0.0)), cfg)?,
        InitialState::Airy { params, taper_start, taper_width } => {
            let psi0 = apodized_airy(&params, grid, taper_start, taper_width)?;
            schrodinger_evolve(grid, &psi0, cfg)?
        }
    };
    Ok(traj)
}

fn run_evolve(section: &EvolveSection, out: Option<&Path>) -> Result<EvolveReport, CliError> {
    let grid = section.grid.build()?;
    let traj = evolve_initial(section, &grid, &section.evolution)?;
    let mut stats = packet_stats(&traj)?;
    let bounds = &section.checks;
    let t_final = *stats.times.last().expect("at least five stored states");
    let norm_drift = traj.norm_drift();
    let mut checks =
        vec![StatCheck::at_most("norm_drift", norm_drift, Some(0.0), bounds.norm_drift, "Crank-Nicolson is unitary")];
    match section.initial {
        InitialState::Gaussian(p) => {
            let w = *stats.width.last().expect("nonempty");
            let want = p.width(t_final);
            let rel = (w / want - 1.0).abs();
            checks.push(StatCheck::at_most(
                "width_rel",
                rel,
                Some(want),
                bounds.width_rel,
                "free spreading σ√(1 + (ħt/2mσ²)²)",
            ));
        }
        InitialState::Airy { params, taper_width, .. } => {
            stats.taper_width = Some(taper_width);
            let fit = stats.peak_fit;
            let want = params.acceleration();
            let rel = (fit.acceleration / want - 1.0).abs();
            checks.push(StatCheck::at_most(
                "acceleration_rel",
                rel,
                Some(want),
                bounds.acceleration_rel,
                "force-free Airy peak accelerates at B³/2m²",
            ));
            let snr = fit.acceleration.abs() / fit.acceleration_err;
            checks.push(StatCheck::at_least(
                "acceleration_snr",
                snr,
                bounds.acceleration_snr,
                "fitted acceleration is nonzero",
            ));
        }
    }
    let qhj = match &section.qhj_study {
        Some(q) => Some(run_qhj_study(section, q)?),
        None => None,
    };
    if let (Some(every), Some(dir)) = (section.csv_every, out) {
        dump_trajectory(&traj, every, &dir.join("trajectory.csv"))?;
        write_atomic(&dir.join("packet_stats.json"), crate::output::to_json(&stats).as_bytes())?;
    }
    let passed = checks.iter().all(|c| c.passed) && qhj.as_ref().is_none_or(|q| all_passed(q));
    Ok(EvolveReport {
        initial: initial_name(&section.initial).into(),
        passed,
        final_time: t_final,
        norm_drift,
        checks,
        stats,
        warnings: traj.warnings,
        qhj,
    })
}

fn dump_trajectory(traj: &Trajectory, every: usize, path: &Path) -> Result<(), CliError> {
    let states: Vec<_> = traj.states.iter().step_by(every).cloned().collect();
    let thinned = Trajectory {
        grid: traj.grid.clone(),
        dt: traj.dt * every as f64,
        norms: traj.norms.iter().step_by(every).copied().collect(),
        states,
        warnings: vec![],
    };
    let psi = thinned.to_spacetime_field()?;
    let re: Vec<f64> = psi.values().iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.values().iter().map(|z| z.im).collect();
    let rho: Vec<f64> = psi.values().iter().map(|z| z.norm_sqr()).collect();
    let mut buf = Vec::new();
    wavedisp_core::lattice::io::write_csv(&mut buf, psi.lattice(), &[("re", &re), ("im", &im), ("rho", &rho)])?;
    write_atomic(path, &buf)?;
    Ok(())
}

/// Evolves on the `(t, x)` lattice family seeded by the configured run, one
/// stored state per step, and refines `h` and `dt` together.
fn run_qhj_study(section: &EvolveSection, q: &QhjStudy) -> Result<Vec<ResidualReport>, CliError> {
    let grid = section.grid.build()?;
    let ev = &section.evolution;
    let mut origin = vec![0.0];
    origin.extend(&grid.origin);
    let mut spacing = vec![ev.dt];
    spacing.extend(&grid.spacing);
    let mut counts = vec![ev.steps + 1];
    counts.extend(&grid.counts);
    let base = Lattice::new(origin, spacing, counts)?;
    let reports = convergence_study(&base, q.levels, wavedisp_core::lattice::DEFAULT_MAX_POINTS, |l| {
        let grid = SpatialGrid::new(l.origin[1..].to_vec(), l.spacing[1..].to_vec(), l.counts[1..].to_vec())?;
        let cfg = EvolutionConfig { dt: l.spacing[0], steps: l.counts[0] - 1, snapshot_every: 1, ..ev.clone() };
        let traj = evolve_initial(section, &grid, &cfg).map_err(|e| match e {
            CliError::Core(e) => e,
            other => wavedisp_core::Error::InvalidParameter(other.to_string()),
        })?;
        let r = qhj_residual(&traj, &cfg, q.order, q.epsilon_rel)?;
        let settings = |rep: ResidualReport| rep.with_settings(q.order, q.epsilon_rel);
        let mut qhj =
            settings(r.qhj).with_anchor("∂_t S + |∇S|²/2m + V + V_B = 0").asserted(None, Some(q.order.as_f64()));
        qhj.warnings.extend(traj.warnings);
        Ok(vec![
            qhj,
            settings(r.classical).with_anchor("∂_t S + |∇S|²/2m + V = 0 fails by V_B"),
            settings(r.continuity).with_anchor("∂_t A² + ∇·(A²∇S)/m = 0"),
            settings(r.plateau)
                .with_anchor("classical residual equals |V_B| where V_B dominates")
                .asserted(Some(q.plateau_rel), None),
        ])
    })?;
    Ok(reports)
}

fn fmt_orders(orders: &[Option<f64>]) -> String {
    let parts: Vec<String> = orders.iter().map(|o| o.map_or("NA".into(), |v| format!("{v:.2}"))).collect();
    format!("[{}]", parts.join(", "))
}

fn verdict(r: &ResidualReport) -> &'static str {
    match (r.status, r.passed) {
        (Status::Reported, _) => "INFO",
        (Status::Asserted, true) => "PASS",
        (Status::Asserted, false) => "FAIL",
    }
}

/// One line per check, then the overall verdict.
pub fn render_text(report: &RunReport) -> String {
    let mut s = String::new();
    if report.command == "convergence" {
        return render_table(report);
    }
    for (label, r) in report.labelled() {
        let class = r.classification.map(|c| format!("  class {c}")).unwrap_or_default();
        let tol = r.tolerance.map(|t| format!(" (tol {t:.1e})")).unwrap_or_default();
        let orders = if r.orders.is_empty() { String::new() } else { format!(" orders {}", fmt_orders(&r.orders)) };
        let _ = writeln!(s, "{} {label}: max {:.3e}{tol}{orders}{class}", verdict(r), r.masked_max);
        for w in &r.warnings {
            let _ = writeln!(s, "     warning [{}]: {}", w.code, w.message);
        }
    }
    if let Some(e) = &report.evolve {
        for c in &e.checks {
            let op = if c.kind == "max" { "≤" } else { "≥" };
            let _ = writeln!(
                s,
                "{} evolve/{}: {:.4e} {op} {:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.bound
            );
        }
        let f = &e.stats.peak_fit;
        if e.initial == "airy" {
            let _ = writeln!(
                s,
                "     peak fit: a = {:.5} ± {:.1e}, v = {:.4}, x0 = {:.4}",
                f.acceleration, f.acceleration_err, f.velocity, f.position
            );
        }
        for w in &e.warnings {
            let _ = writeln!(s, "     warning [{}]: {}", w.code, w.message);
        }
    }
    let _ = writeln!(s, "{}", if report.passed { "all asserted checks passed" } else { "some asserted checks FAILED" });
    s
}

/// Aligned table of per-level maxima and observed orders.
pub fn render_table(report: &RunReport) -> String {
    let rows: Vec<[String; 5]> = report
        .labelled()
        .into_iter()
        .map(|(label, r)| {
            let maxes: Vec<String> = r.level_max.iter().map(|m| format!("{m:.3e}")).collect();
            let target = r.target_order.map_or("-".into(), |t| format!("{t:.1}±{:.1}", r.order_band));
            [label, maxes.join(" "), fmt_orders(&r.orders), target, verdict(r).into()]
        })
        .collect();
    let header = ["check", "level max", "orders", "target", "verdict"].map(String::from);
    let mut widths = header.clone().map(|h| h.chars().count());
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> =
            row.iter().zip(&widths).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        let _ = writeln!(s, "{}", cells.join("  ").trim_end());
    }
    let _ = writeln!(s, "{}", if report.passed { "all asserted checks passed" } else { "some asserted checks FAILED" });
    s
}
