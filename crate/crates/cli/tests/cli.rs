use std::path::Path;
use std::process::{Command, Output};

fn wavedisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavedisp")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.json");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn catalog_lists_every_entry_with_its_class() {
    let o = wavedisp(&["catalog", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.len() >= 8);
    for e in entries {
        let class = e["expected_class"].as_str().unwrap();
        assert!(["Timelike", "Null", "Spacelike", "NA"].contains(&class), "{class}");
        assert!(!e["anchor"].as_str().unwrap().is_empty());
        assert!(!e["vb_formula"].as_str().unwrap().is_empty());
    }
    let text = wavedisp(&["catalog"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("slepian_scalar  [scalar]  class Timelike"));
}

#[test]
fn negative_control_exits_one() {
    let o = wavedisp(&["verify", "--preset", "slepian-detuned"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL slepian_scalar_detuned/bohm_vs_expected"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scissor": {"pairs": 1, "seed": 1, "lattice": {"origin": [0,0,0], "extent": [1,1,1], "cells": [8,8,8]}, "bogus": 1}}"#,
    );
    let o = wavedisp(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn missing_dt_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"evolve": {"initial": {"kind": "gaussian"}, "grid": {"bounds": [[-10, 10]], "cells": [200]},
            "evolution": {"steps": 10}}}"#,
    );
    let o = wavedisp(&["evolve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`dt`"), "{}", stderr(&o));
}

#[test]
fn stiff_potential_reports_a_suggested_dt() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"evolve": {"initial": {"kind": "gaussian"}, "grid": {"bounds": [[-10, 10]], "cells": [200]},
            "evolution": {"dt": 0.5, "steps": 10, "potential": {"kind": "harmonic", "omega": 4.0, "center": [0, 0]}}}}"#,
    );
    let o = wavedisp(&["evolve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("use dt ≤"), "{}", stderr(&o));
}

#[test]
fn memory_cap_names_the_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"verify": {"max_points": 2000, "cases": [{"label": "pw", "levels": 3,
            "solution": {"solution": "plane_wave"},
            "lattice": {"origin": [0,0,0], "extent": [1,1,1], "cells": [8,8,8]}}]}}"#,
    );
    let o = wavedisp(&["convergence", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at refinement level 1"), "{}", stderr(&o));
}

#[test]
fn convergence_requires_three_levels() {
    let o = wavedisp(&["convergence", "--preset", "slepian-cosh"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("levels ≥ 3"));
}

#[test]
fn plane_wave_convergence_reports_na_orders() {
    let o = wavedisp(&["convergence", "--preset", "plane-waves", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let disp = v["cases"][1]["reports"].as_array().unwrap().iter().find(|r| r["check_name"] == "dispersion").unwrap();
    assert_eq!(disp["orders"], serde_json::json!([null, null]));
    let table = wavedisp(&["convergence", "--preset", "plane-waves"]);
    assert!(String::from_utf8_lossy(&table.stdout).contains("[NA, NA]"));
}

#[test]
fn fourth_order_stencils_converge_at_fourth_order() {
    let o = wavedisp(&["convergence", "--preset", "slepian-fourth-order", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let disp = v["cases"][0]["reports"].as_array().unwrap().iter().find(|r| r["check_name"] == "dispersion").unwrap();
    for o in disp["orders"].as_array().unwrap() {
        assert!((o.as_f64().unwrap() - 4.0).abs() <= 0.2, "{o}");
    }
}

#[test]
fn out_dir_receives_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"verify": {"cases": [{"label": "pw", "dump_csv": true, "checks": ["dispersion"],
            "solution": {"solution": "plane_wave"},
            "lattice": {"origin": [0,0,0], "extent": [1,1,1], "cells": [8,8,8]}}]}}"#,
    );
    let out = dir.path().join("out");
    let o = wavedisp(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["cases"][0]["reports"].as_array().unwrap().len(), 1);
    let csv = std::fs::read_to_string(out.join("pw.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,A,S,kept"));
    assert_eq!(csv.lines().count(), 1 + 9 * 9 * 9);
}

#[test]
fn evolve_presets_carry_their_statistic() {
    let o = wavedisp(&["evolve", "--preset", "gaussian-spreading", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> =
        v["evolve"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"width_rel"));

    let o = wavedisp(&["evolve", "--preset", "airy-acceleration", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["evolve"]["stats"]["peak_fit"]["acceleration"].as_f64().unwrap() > 0.4);
}

#[test]
fn frw_continuity_is_reported_not_asserted() {
    let o = wavedisp(&["verify", "--preset", "em-frw", "--json", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = v["cases"][0]["reports"].as_array().unwrap().iter().find(|r| r["check_name"] == "continuity").unwrap();
    assert_eq!(c["status"], "reported");
    assert_eq!(c["prediction"].as_f64(), Some(0.0));
}
