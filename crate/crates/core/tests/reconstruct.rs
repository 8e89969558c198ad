use cavity_core::ode::Registry;
use cavity_core::reconstruct::{
    boundary_exponents, density_from_adiabatic, field_point, flow_field_scaled, interface_kinematics, log_space,
};
use cavity_core::trajectory::{build_gamma, GammaOptions, GammaResult};
use cavity_core::Preset;
use proptest::prelude::*;
use std::sync::OnceLock;

fn case1() -> &'static GammaResult {
    static G: OnceLock<GammaResult> = OnceLock::new();
    G.get_or_init(|| build_gamma(&Preset::Case1.params(), &GammaOptions::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rescaling_the_adiabatic_constant(a in 0.01f64..100.0) {
        let g = case1();
        let sys = g.system();
        let factor = a.powf(1.0 / (1.0 - sys.gamma() + sys.k.q));
        let base = density_from_adiabatic(g, 1.0).unwrap();
        let scaled = density_from_adiabatic(g, a).unwrap();
        for (r0, r1) in base.r.iter().zip(&scaled.r) {
            prop_assert!((r1 / r0 / factor - 1.0).abs() < 1e-12);
        }
        let (t, s) = ([-1.0, -0.1], [1.0, 1.3, 2.0, 10.0]);
        let f0 = flow_field_scaled(g, &base, &t, &s).unwrap();
        let f1 = flow_field_scaled(g, &scaled, &t, &s).unwrap();
        for (p, q) in f0.points.iter().zip(&f1.points) {
            prop_assert_eq!(p.u, q.u);
            prop_assert_eq!(p.c, q.c);
            if p.rho > 0.0 {
                prop_assert!((q.rho / p.rho / factor - 1.0).abs() < 1e-12);
                prop_assert!((q.p / p.p / factor - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn interface_moves_with_the_fluid() {
    for preset in Preset::ALL {
        let g = build_gamma(&preset.params(), &GammaOptions::default()).unwrap();
        let d = density_from_adiabatic(&g, 1.0).unwrap();
        let ts: Vec<f64> = log_space(-1.0, -1e-3, 25);
        let worst = interface_kinematics(&g, &d, &ts).unwrap();
        assert!(worst < 1e-6, "{preset}: {worst:e}");
    }
}

#[test]
fn velocity_sign_follows_v_over_x() {
    let g = case1();
    let sys = g.system();
    let d = density_from_adiabatic(g, 1.0).unwrap();
    let t = -1.0;
    for (s, big_r) in g.samples.iter().filter(|s| s.c > 0.0).zip(&d.r) {
        let r = (t / s.x).powf(1.0 / sys.lambda());
        let p = field_point(&sys, t, r, s.v, s.c, *big_r);
        if s.v != 0.0 {
            assert_eq!(p.u.signum(), -(s.v / s.x).signum(), "x = {}", s.x);
        }
        assert!(p.c > 0.0 && p.rho > 0.0 && p.p > 0.0, "x = {}", s.x);
    }
}

#[test]
fn interface_acceleration_is_finite_and_positive() {
    let reg = Registry::<4>::with_builtins();
    let st = reg.get(Registry::<4>::DEFAULT).unwrap();
    for preset in Preset::ALL {
        let g = build_gamma(&preset.params(), &GammaOptions::default()).unwrap();
        let b = boundary_exponents(&g, st, (1e-6, 1e-3), 40).unwrap();
        assert!(b.acceleration.is_finite() && b.acceleration > 0.0, "{preset}");
        assert!(b.acceleration_slope.abs() < 0.01, "{preset}: {}", b.acceleration_slope);
        // p ~ W^a, rho ~ W^b and r - r0 ~ W, so the acceleration scales as W^(a - b - 1)
        assert!((b.pressure.predicted - b.density.predicted - 1.0).abs() < 1e-12);
        for fit in [b.pressure, b.density, b.entropy] {
            assert!(fit.r_squared > 0.999, "{preset}");
        }
    }
}
