//! Cross-module properties of the catalog, Bohm evaluators and residual
//! checks.

use proptest::prelude::*;
use wavedisp_core::bohm::{bohm_scalar, BohmOptions, Sector};
use wavedisp_core::catalog::{
    catalog, AnalyticSolution, Branch, Luminality, SampledField, SlepianParams, SolutionSpec,
};
use wavedisp_core::lattice::{Lattice, StencilOrder};
use wavedisp_core::madelung::{decompose, DecomposeOptions};
use wavedisp_core::verify::{
    classify_luminality, run_convergence, scissor_check, ResidualReport, SuiteConfig, ZERO_RESIDUAL,
};

const CAP: usize = 1 << 24;

fn cube(extent: f64, cells: usize) -> Lattice {
    Lattice::from_extent(&[0.0; 3], &[extent; 3], &[cells; 3]).unwrap()
}

/// Box for a catalog entry: away from packet tails and Airy nodes, and
/// incommensurate with the Slepian periods so that wave residuals carry
/// truncation error. The Airy box needs `h ≤ 1/16` to be in the asymptotic
/// range.
fn box_for(sol: &AnalyticSolution) -> Lattice {
    match sol.spec {
        SolutionSpec::GaussianPacket(_) => Lattice::from_extent(&[0.0, -4.0], &[1.0, 8.0], &[16, 32]).unwrap(),
        SolutionSpec::AiryPacket(_) => Lattice::from_extent(&[0.0, -1.8], &[1.0, 4.0], &[16, 64]).unwrap(),
        SolutionSpec::PlaneWaveNonrel { .. } => Lattice::from_extent(&[0.0; 2], &[1.0; 2], &[8; 2]).unwrap(),
        SolutionSpec::HarmonicAmplitude { .. } => {
            Lattice::from_extent(&[0.0, 0.5, 0.5], &[1.0; 3], &[4, 16, 16]).unwrap()
        }
        SolutionSpec::SlepianScalar(p) if p.branch() == Branch::CoshSubPhase => {
            Lattice::from_extent(&[0.0, 0.0, -1.0], &[3.0, 3.0, 2.0], &[16; 3]).unwrap()
        }
        _ => cube(3.0, 16),
    }
}

fn order_ok(r: &ResidualReport, design: f64) -> bool {
    r.orders.iter().all(|o| match o {
        Some(o) => (o - design).abs() <= 0.2,
        None => r.level_max.iter().all(|m| *m <= ZERO_RESIDUAL),
    })
}

#[test]
fn every_catalog_entry_converges_at_design_order() {
    for sol in catalog() {
        let reports = run_convergence(&sol, &box_for(&sol), 3, CAP, &SuiteConfig::default())
            .unwrap_or_else(|e| panic!("{}: {e}", sol.name));
        for r in &reports {
            if ["dispersion", "qhj", "wave", "gauge_differential", "bohm_vs_expected"].contains(&r.check_name.as_str())
            {
                assert!(order_ok(r, 2.0), "{} {}: {:?} {:?}", sol.name, r.check_name, r.orders, r.level_max);
            }
        }
        assert!(reports.iter().all(|r| r.masked_max.is_finite()), "{}", sol.name);
    }
}

fn vb_stats(p: SlepianParams, l: &Lattice) -> (f64, f64) {
    let sol = SolutionSpec::SlepianScalar(p).build().unwrap();
    let SampledField::Scalar(psi) = sol.sample(l).unwrap() else { unreachable!() };
    let pair = decompose(&psi, &DecomposeOptions::default()).unwrap();
    let vb = bohm_scalar(&pair.amplitude, p.c, &BohmOptions::default()).unwrap();
    let s = vb.summary();
    (s.mean, s.stddev)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The relative spread of `V_B` over the kept points falls like `h²`.
    #[test]
    fn slepian_bohm_potential_is_constant_to_second_order(k in 0.5f64..1.5, v in 1.2f64..3.0) {
        let p = SlepianParams::new(k, v, 1.0, Branch::CosSuperPhase);
        let coarse = vb_stats(p, &cube(3.0, 24));
        let fine = vb_stats(p, &cube(3.0, 48));
        let (rc, rf) = (coarse.1 / coarse.0.abs(), fine.1 / fine.0.abs());
        prop_assert!(rf <= rc / 3.0 || rf < 1e-10, "{} -> {}", rc, rf);
        let h = 3.0 / 48.0;
        prop_assert!(rf <= 2.0 * (k * v).powi(2) * h * h, "{}", rf);
    }

    /// Equal `|κ²|` on both branches gives opposite signs, negative for `cos`.
    #[test]
    fn branches_have_opposite_signs(k in 0.5f64..1.5, beta2 in 0.1f64..0.9) {
        let v_sub = beta2.sqrt();
        let v_super = (2.0 - beta2).sqrt();
        let l = Lattice::from_extent(&[0.0, 0.0, -0.5], &[2.0, 2.0, 1.0], &[32; 3]).unwrap();
        let (cos_mean, _) = vb_stats(SlepianParams::new(k, v_super, 1.0, Branch::CosSuperPhase), &l);
        let (cosh_mean, _) = vb_stats(SlepianParams::new(k, v_sub, 1.0, Branch::CoshSubPhase), &l);
        prop_assert!(cos_mean < 0.0 && cosh_mean > 0.0);
        prop_assert!((cos_mean + cosh_mean).abs() <= 1e-2 * cosh_mean, "{} vs {}", cos_mean, cosh_mean);
    }

    /// Class depends on neither the amplitude scale nor the resolution.
    #[test]
    fn luminality_survives_rescaling_and_refinement(amp in 1e-3f64..1e3, v in 0.3f64..3.0) {
        let p = SlepianParams { amp, ..SlepianParams::new(1.0, v, 1.0, if v > 1.0 { Branch::CosSuperPhase } else { Branch::CoshSubPhase }) };
        prop_assume!((v - 1.0).abs() > 0.05);
        let sol = SolutionSpec::SlepianScalar(p).build().unwrap();
        let want = sol.expected_class;
        for l in [cube(2.0, 16), cube(2.0, 32)] {
            let SampledField::Scalar(psi) = sol.sample(&l).unwrap() else { unreachable!() };
            let pair = decompose(&psi, &DecomposeOptions::default()).unwrap();
            let k = pair.wavevector(StencilOrder::Second).unwrap();
            let (class, share) = classify_luminality(&k, &sol.metric, 1e-6).unwrap();
            prop_assert_eq!(class, want);
            prop_assert!(share > 0.99);
        }
    }

    /// The null split of a cos-branch mode is stencil-free.
    #[test]
    fn null_decomposition_holds_for_any_cos_mode(k in 0.05f64..5.0, v in 1.0f64..5.0, amp in 0.1f64..10.0) {
        let p = SlepianParams { amp, ..SlepianParams::new(k, v, 1.0, Branch::CosSuperPhase) };
        let reports = scissor_check(&p, &cube(1.0, 8)).unwrap();
        prop_assert!(reports[0].masked_max <= 1e-12, "{}", reports[0].masked_max);
        prop_assert!(reports[1].masked_max <= 1e-12 * (k * v).powi(2), "{}", reports[1].masked_max);
    }
}

/// A detuned profile plateaus far above the exact solution's residual.
#[test]
fn negative_controls_plateau_above_the_exact_residual() {
    let l = cube(3.0, 16);
    let run = |detune| {
        let p = SlepianParams { detune, ..SlepianParams::new(1.0, 2.0, 1.0, Branch::CosSuperPhase) };
        let sol = SolutionSpec::SlepianScalar(p).build().unwrap();
        run_convergence(&sol, &l, 3, CAP, &SuiteConfig::default()).unwrap()
    };
    let exact = run(0.0);
    for detune in [0.05, 0.1] {
        let bad = run(detune);
        for name in ["bohm_vs_expected", "wave"] {
            let e = exact.iter().find(|r| r.check_name == name).unwrap().masked_max;
            let b = bad.iter().find(|r| r.check_name == name).unwrap();
            assert!(b.masked_max >= 100.0 * e, "{name} detune {detune}: {} vs {e}", b.masked_max);
            assert!(!b.passed);
        }
    }
}

#[test]
fn light_speed_limits_collapse_to_plane_waves() {
    let l = cube(2.0, 16);
    for spec in [
        SolutionSpec::SlepianScalar(SlepianParams::new(1.0, 1.0, 1.0, Branch::CosSuperPhase)),
        SolutionSpec::SlepianEmFlat(SlepianParams::new(1.3, 1.0, 1.0, Branch::CosSuperPhase)),
        SolutionSpec::SlepianGw(SlepianParams::new(0.7, 1.0, 1.0, Branch::CosSuperPhase)),
    ] {
        let sol = spec.build().unwrap();
        assert_eq!(sol.expected_class, Luminality::Null);
        let reports = wavedisp_core::verify::run_suite(&sol, &l, &SuiteConfig::default()).unwrap();
        let vb = reports.iter().find(|r| r.check_name == "bohm_vs_expected").unwrap();
        assert!(vb.masked_max <= 1e-12, "{}: {}", sol.name, vb.masked_max);
        assert!(vb.extra["vb_max"].abs() <= 1e-12 && vb.extra["vb_min"].abs() <= 1e-12);
        assert_ne!(sol.sector, Sector::NonRel);
    }
}
