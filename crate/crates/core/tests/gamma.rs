use cavity_core::trajectory::{build_gamma, GammaOptions, Segment};
use cavity_core::Preset;

// (x6, nu, omega) from an independent scipy integration of the same
// construction (rtol 1e-11)
const REFERENCE: [(Preset, f64, f64, f64); 6] = [
    (Preset::Case1, -0.751_914_3, 0.891_51, -0.273_68),
    (Preset::Case2, -0.798_60, 0.925_39, -0.148_09),
    (Preset::Case3, -0.643_66, 0.821_97, -0.695_84),
    (Preset::Case4, -0.806_80, 0.980_61, -0.172_90),
    (Preset::Case5, -0.819_12, 1.024_79, -0.101_44),
    (Preset::Case6, -0.419_21, 1.167_72, -1.194_79),
];

#[test]
fn all_presets_connect_p2_to_p1() {
    for (preset, x6, nu, omega) in REFERENCE {
        let g = build_gamma(&preset.params(), &GammaOptions::default()).unwrap();
        assert_eq!(g.x0, -1.0);
        assert!(g.x6 > -1.0 && g.x6 < 0.0);
        assert!(g.omega < 0.0 && g.nu.is_finite());
        assert!((g.x6 - x6).abs() < 2e-5, "{preset}: x6 {}", g.x6);
        assert!((g.nu - nu).abs() < 2e-5, "{preset}: nu {}", g.nu);
        assert!((g.omega - omega).abs() < 2e-5, "{preset}: omega {}", g.omega);
        assert!(g.samples.windows(2).all(|w| w[1].x > w[0].x), "{preset}");
        assert!(g.samples.iter().all(|s| s.c >= 0.0));
        let first: Vec<_> = g.segment(Segment::P2toP6).collect();
        assert!(first.windows(2).all(|w| w[1].v > w[0].v), "{preset}");
    }
}

#[test]
fn halving_tolerances_is_stable() {
    for preset in Preset::ALL {
        let base = GammaOptions::default();
        let fine = GammaOptions {
            tol_rel: base.tol_rel / 2.0,
            tol_abs: base.tol_abs / 2.0,
            ..base.clone()
        };
        let a = build_gamma(&preset.params(), &base).unwrap();
        let b = build_gamma(&preset.params(), &fine).unwrap();
        for (p, q, what) in [(a.x6, b.x6, "x6"), (a.nu, b.nu, "nu"), (a.omega, b.omega, "omega")] {
            let rel = ((p - q) / p).abs();
            assert!(rel < 1e-6, "{preset} {what}: {rel:e}");
        }
    }
}

#[test]
fn trapped_between_nullclines_then_in_box() {
    use cavity_core::phaseplane::{nullcline_f, nullcline_g};
    use cavity_core::trajectory::TRAP_TOL;
    for preset in Preset::ALL {
        let g = build_gamma(&preset.params(), &GammaOptions::default()).unwrap();
        let sys = g.system();
        for s in &g.samples[1..=g.i_p6] {
            let (cg, cf) = (nullcline_g(s.v, &sys).unwrap(), nullcline_f(s.v, &sys).unwrap());
            assert!(cg - TRAP_TOL <= s.c && s.c <= cf + TRAP_TOL, "{preset}: V = {}", s.v);
        }
        assert!(!g.after_p0().is_empty());
        for s in g.after_p0() {
            assert!(g.t2.contains(s.v, s.c), "{preset}: ({}, {}) outside T2", s.v, s.c);
        }
    }
}

#[test]
fn start_offset_does_not_matter() {
    use cavity_core::ode::Registry;
    use cavity_core::trajectory::Profile;
    let reg = Registry::<4>::with_builtins();
    let stepper = reg.get(Registry::<4>::DEFAULT).unwrap();
    for preset in Preset::ALL {
        let c: Vec<f64> = [1e-5, 1e-6, 1e-7]
            .iter()
            .map(|&eps| {
                let opts = GammaOptions {
                    eps_p2: eps,
                    ..GammaOptions::default()
                };
                let g = build_gamma(&preset.params(), &opts).unwrap();
                // V = -0.9 where that lies before P6, else halfway to P6
                let w = 0.1_f64.min(0.5 * (1.0 + g.p6.v));
                let at = Profile::new(&g, stepper).at_w(w).unwrap();
                Profile::c_of(&at)
            })
            .collect();
        for w in c.windows(2) {
            assert!(((w[0] - w[1]) / w[1]).abs() < 1e-6, "{preset}: {c:?}");
        }
    }
}

#[test]
fn every_builtin_method_agrees() {
    use cavity_core::ode::builtin_names;
    let base = build_gamma(&Preset::Case1.params(), &GammaOptions::default()).unwrap();
    for name in builtin_names() {
        let opts = GammaOptions {
            method: name.clone(),
            ..GammaOptions::default()
        };
        let g = build_gamma(&Preset::Case1.params(), &opts).unwrap();
        for (p, q) in [(base.x6, g.x6), (base.nu, g.nu), (base.omega, g.omega)] {
            assert!(((p - q) / p).abs() < 1e-5, "{name}: {p} vs {q}");
        }
    }
}

#[test]
fn unknown_method_is_rejected() {
    let opts = GammaOptions {
        method: "leapfrog".into(),
        ..GammaOptions::default()
    };
    let err = build_gamma(&Preset::Case1.params(), &opts).unwrap_err();
    assert!(matches!(err, cavity_core::Error::UnknownMethod(_)));
}
