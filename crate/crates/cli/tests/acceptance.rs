//! Acceptance suite: every criterion at its stated tolerance, one
//! PASS/FAIL line each. Runs sequentially in a single test so the lines
//! appear in order (`cargo test --test acceptance -- --nocapture`).

use std::process::Command;

use wavedisp_cli::commands::{cmd_verify, CaseReport, RunReport};
use wavedisp_cli::output::to_json;
use wavedisp_cli::presets::preset;
use wavedisp_core::catalog::{Luminality, SolutionSpec};
use wavedisp_core::verify::{ResidualReport, Status};

struct Outcome {
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

fn run(name: &str) -> RunReport {
    cmd_verify(&preset(name).unwrap(), None).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn get<'a>(case: &'a CaseReport, check: &str) -> &'a ResidualReport {
    case.reports.iter().find(|r| r.check_name == check).unwrap_or_else(|| panic!("{}: no {check}", case.label))
}

fn in_band(r: &ResidualReport, target: f64, band: f64) -> bool {
    !r.orders.is_empty() && r.orders.iter().all(|o| o.is_some_and(|o| (o - target).abs() <= band))
}

fn max_at_most(o: &mut Outcome, r: &ResidualReport, tol: f64, label: &str) {
    o.check(r.masked_max <= tol, format!("{label}: {} max {:.3e} > {tol:.0e}", r.check_name, r.masked_max));
}

fn orders_near(o: &mut Outcome, r: &ResidualReport, target: f64, label: &str) {
    o.check(in_band(r, target, 0.2), format!("{label}: {} orders {:?} outside {target}±0.2", r.check_name, r.orders));
}

fn class_is(o: &mut Outcome, r: &ResidualReport, want: Luminality, label: &str) {
    o.check(r.classification == Some(want), format!("{label}: class {:?}, want {want}", r.classification));
}

fn finest_spacing(case: &CaseReport) -> Vec<f64> {
    get(case, "bohm_vs_expected").lattice.spacing.clone()
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("slepian-scalar");
    let c = &rep.cases[0];
    o.check(get(c, "bohm_vs_expected").lattice.counts == vec![65; 3], "finest lattice is not 64³");
    let vb = get(c, "bohm_vs_expected");
    max_at_most(&mut o, vb, 5e-3, "V_B + 3");
    o.check((vb.extra["vb_mean"] + 3.0).abs() <= 5e-3, format!("mean V_B {}", vb.extra["vb_mean"]));
    let d = get(c, "dispersion");
    max_at_most(&mut o, d, 1e-2, "k·k - V_B");
    orders_near(&mut o, d, 2.0, "dispersion");
    class_is(&mut o, d, Luminality::Timelike, "dispersion");
    o.check(rep.passed, "report verdict");
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("slepian-cosh");
    let c = &rep.cases[0];
    let vb = get(c, "bohm_vs_expected");
    max_at_most(&mut o, vb, 5e-3, "□U/U - κ²");
    o.check((vb.extra["vb_mean"] - 3.0).abs() <= 5e-3, format!("mean □U/U {}", vb.extra["vb_mean"]));
    class_is(&mut o, get(c, "dispersion"), Luminality::Spacelike, "dispersion");
    o.check(vb.warnings.iter().any(|w| w.code == "sign_convention"), "no sign_convention warning");
    o.check(rep.passed, "sign warning turned into a failure");
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("plane-waves");
    for c in &rep.cases {
        max_at_most(&mut o, get(c, "bohm_vs_expected"), 1e-12, &c.label);
        if c.label == "plane_wave_nonrel" {
            // No light cone in the non-relativistic sector; the dispersion
            // statement is the quantum Hamilton-Jacobi equation.
            max_at_most(&mut o, get(c, "qhj"), 1e-12, &c.label);
        } else {
            let d = get(c, "dispersion");
            max_at_most(&mut o, d, 1e-12, &c.label);
            class_is(&mut o, d, Luminality::Null, &c.label);
        }
    }
    o.check(rep.cases.len() == 5, "expected five sectors");
    o
}

fn gauge_pair(o: &mut Outcome, c: &CaseReport) {
    max_at_most(o, get(c, "gauge_algebraic"), 1e-10, &c.label);
    let diff = get(c, "gauge_differential");
    max_at_most(o, diff, 1e-2, &c.label);
    // An identically vanishing residual has no observable order.
    let order_ok = in_band(diff, 2.0, 0.2) || diff.level_max.iter().all(|m| *m <= 1e-12);
    o.check(order_ok, format!("{}: differential gauge orders {:?}", c.label, diff.orders));
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("em-flat");
    let c = &rep.cases[0];
    let vb = get(c, "bohm_vs_expected");
    max_at_most(&mut o, vb, 5e-3, "vector V_B + 3");
    o.check((vb.extra["vb_mean"] + 3.0).abs() <= 5e-3, format!("mean V_B {}", vb.extra["vb_mean"]));
    gauge_pair(&mut o, c);
    o.check(rep.passed, "report verdict");
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("em-frw");
    let c = &rep.cases[0];
    let h = finest_spacing(c);
    o.check(h.iter().all(|h| (h - 1.0 / 64.0).abs() < 1e-15), format!("finest spacing {h:?}"));
    let SolutionSpec::SlepianEmFrw { .. } = preset("em-frw").unwrap().verify.unwrap().cases[0].solution else {
        panic!("em-frw preset runs another solution");
    };
    let vb = get(c, "bohm_vs_expected");
    max_at_most(&mut o, vb, 1e-2, "V_B - (k²/a²)(1 - v²/c²)");
    orders_near(&mut o, vb, 2.0, "V_B");
    orders_near(&mut o, get(c, "wave"), 2.0, "curved wave operator");
    let cont = get(c, "continuity");
    o.check(cont.status == Status::Reported, "continuity is asserted");
    o.check(cont.prediction.is_some(), "continuity lacks its prediction");
    o.check(rep.passed, "report verdict");
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("gw-flat");
    let c = &rep.cases[0];
    let vb = get(c, "bohm_vs_expected");
    max_at_most(&mut o, vb, 5e-3, "tensor V_B + 3");
    o.check((vb.extra["vb_mean"] + 3.0).abs() <= 5e-3, format!("mean V_B {}", vb.extra["vb_mean"]));
    gauge_pair(&mut o, c);
    class_is(&mut o, get(c, "dispersion"), Luminality::Timelike, "dispersion");
    o.check(rep.passed, "report verdict");
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("scissor");
    let s = rep.scissor.as_ref().unwrap();
    o.check(s.pairs.len() == 10, "expected 10 pairs");
    for p in &s.pairs {
        let label = format!("k={}, v={}", p.k, p.v);
        let sum = p.reports.iter().find(|r| r.check_name == "scissor_sum").unwrap();
        let null = p.reports.iter().find(|r| r.check_name == "scissor_null").unwrap();
        max_at_most(&mut o, sum, 1e-12, &label);
        o.check(null.masked_max == 0.0, format!("{label}: null defect {:e}", null.masked_max));
    }
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("harmonic");
    let [saddle, exp_cos, square] = &rep.cases[..] else { panic!("three harmonic cases") };
    max_at_most(&mut o, get(saddle, "bohm_vs_expected"), 1e-12, "saddle");
    let e = get(exp_cos, "bohm_vs_expected");
    let h = finest_spacing(exp_cos);
    o.check(h[1..].iter().all(|h| (h - 1.0 / 128.0).abs() < 1e-15), format!("exp_cos spacing {h:?}"));
    max_at_most(&mut o, e, 1e-4, "exp_cos");
    orders_near(&mut o, e, 2.0, "exp_cos");
    // Relative deviation from -(ħ²/2m)·2/x².
    max_at_most(&mut o, get(square, "bohm_vs_expected"), 1e-3, "square");
    o.check(square.reports[0].extra.get("relative") == Some(&1.0), "square control is not relative");
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let cfg = preset("gaussian-spreading").unwrap();
    let section = cfg.evolve.as_ref().unwrap();
    o.check(section.evolution.steps == 1000, "run is not 1000 steps");
    let rep = cmd_verify(&cfg, None).unwrap();
    let e = rep.evolve.as_ref().unwrap();
    o.check(e.norm_drift <= 1e-10, format!("norm drift {:e}", e.norm_drift));
    o.check((e.final_time - 2.0).abs() < 1e-12, format!("final time {} is not ħt/2mσ² = 1", e.final_time));
    let w = e.checks.iter().find(|c| c.name == "width_rel").unwrap();
    o.check(w.value <= 1e-3, format!("width error {:e}", w.value));
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("qhj-separation");
    let q = rep.evolve.as_ref().unwrap().qhj.as_ref().unwrap();
    let find = |n: &str| q.iter().find(|r| r.check_name == n).unwrap();
    orders_near(&mut o, find("qhj"), 2.0, "qhj");
    let plateau = find("hj_plateau");
    max_at_most(&mut o, plateau, 0.1, "classical plateau vs |V_B|");
    o.check(plateau.kept_fraction > 0.0, "no point where |V_B| dominates");
    o.check(find("classical_hj").masked_max > 10.0 * find("qhj").masked_max, "classical residual did not rise");
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let rep = run("airy-acceleration");
    let e = rep.evolve.as_ref().unwrap();
    let f = e.stats.peak_fit;
    o.check(
        f.acceleration.abs() > 20.0 * f.acceleration_err,
        format!("a = {} ± {}", f.acceleration, f.acceleration_err),
    );
    o.check((f.acceleration / 0.5 - 1.0).abs() <= 0.05, format!("a = {} vs 0.5", f.acceleration));
    o.check(e.warnings.is_empty(), "boundary leak during the fit window");
    o
}

fn criterion_12() -> Outcome {
    let mut o = Outcome::new();
    let run_bin = || {
        Command::new(env!("CARGO_BIN_EXE_wavedisp"))
            .args(["verify", "--preset", "slepian-scalar", "--json"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run_bin(), run_bin());
    o.check(a.status.code() == Some(0), "first run failed");
    o.check(!a.stdout.is_empty() && a.stdout == b.stdout, "binary JSON differs between runs");
    for name in ["scissor", "airy-acceleration"] {
        o.check(to_json(&run(name)) == to_json(&run(name)), format!("{name}: in-process JSON differs"));
    }
    o
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("1 Slepian scalar dispersion", criterion_1),
        ("2 Slepian cosh branch", criterion_2),
        ("3 plane-wave nullity", criterion_3),
        ("4 EM flat Slepian", criterion_4),
        ("5 EM FRW mode", criterion_5),
        ("6 GW flat mode", criterion_6),
        ("7 null decomposition", criterion_7),
        ("8 harmonic amplitude", criterion_8),
        ("9 Schrödinger engine", criterion_9),
        ("10 QHJ vs HJ separation", criterion_10),
        ("11 Airy acceleration", criterion_11),
        ("12 determinism", criterion_12),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let start = std::time::Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        if outcome.failures.is_empty() {
            println!("PASS criterion {name} ({secs:.1}s)");
        } else {
            println!("FAIL criterion {name} ({secs:.1}s): {}", outcome.failures.join("; "));
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
