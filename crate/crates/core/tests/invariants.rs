//! Property tests of the closed forms and the reduced system.

use cavity_core::conditions::ConditionId;
use cavity_core::phaseplane::{
    classify, critical_points, nullcline_f, nullcline_g, v_pm, Classification, CriticalPointId,
    System,
};
use cavity_core::{derive, full_report, Params, Preset};
use proptest::prelude::*;

const ULP: f64 = f64::EPSILON;

fn any_params() -> impl Strategy<Value = Params> {
    (prop_oneof![Just(2u32), Just(3u32)], 1.01f64..4.0, 1.0001f64..3.0, -1.5f64..3.0)
        .prop_filter_map("structurally invalid", |(n, g, l, k)| Params::new(n, g, l, k).ok())
}

/// Parameters satisfying (A), (B) and (C).
fn admissible_abc() -> impl Strategy<Value = Params> {
    any_params().prop_filter("(A)-(C)", |p| {
        let r = full_report(p).unwrap();
        [ConditionId::A, ConditionId::B, ConditionId::C]
            .iter()
            .all(|id| r.get(*id).unwrap().passed())
    })
}

fn preset() -> impl Strategy<Value = Preset> {
    prop::sample::select(Preset::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn k_coefficients_sum_to_lambda(p in any_params()) {
        let d = derive(&p).unwrap();
        let scale = d.k1.abs() + d.k2.abs() + d.k3.abs() + p.lambda().abs();
        prop_assert!((d.k1 - d.k2 + d.k3 - p.lambda()).abs() <= 8.0 * ULP * scale);
    }

    #[test]
    fn alpha_has_sign_of_kappa_minus_kappa_bar(p in any_params()) {
        let d = derive(&p).unwrap();
        let gap = p.kappa() - d.kappa_bar;
        prop_assume!(gap.abs() > 1e-12);
        prop_assert_eq!(d.alpha > 0.0, gap > 0.0);
    }

    #[test]
    fn asymptote_bound_under_a(p in any_params()) {
        let r = full_report(&p).unwrap();
        prop_assume!(r.get(ConditionId::A).unwrap().passed());
        let d = derive(&p).unwrap();
        let lower = (p.n() + p.kappa() - 2.0 * d.mu) / (p.n() * p.gamma());
        prop_assert!(lower > 0.0);
        prop_assert!(1.0 + d.v_star > lower * (1.0 - 4.0 * ULP));
    }

    #[test]
    fn vertical_approach_carries_no_pressure(p in admissible_abc()) {
        let d = derive(&p).unwrap();
        prop_assert!(d.b_vert.abs() <= 8.0 * ULP * d.b_vert_scale(p.gamma()));
    }

    #[test]
    fn sonic_identity(case in preset(), v in -0.999f64..2.0) {
        let sys = System::new(case.params()).unwrap();
        let h = 0.5 * (sys.gamma() - 1.0);
        for sign in [1.0, -1.0] {
            let c = sign * (1.0 + v);
            let (f, g) = (sys.f(v, c), sys.g(v, c));
            let scale = 1.0 + f.abs() + (h * g).abs();
            prop_assert!((f + sign * h * g).abs() <= 1e-12 * scale, "V={v} sign={sign}");
        }
    }

    #[test]
    fn sonic_points_lie_on_the_sonic_line(p in any_params()) {
        let sys = System::new(p).unwrap();
        let roots = v_pm(&sys);
        for cp in critical_points(&sys) {
            if !cp.present || !matches!(cp.id, CriticalPointId::P6 | CriticalPointId::P8) {
                continue;
            }
            let (v, c) = (cp.location.v, cp.location.c);
            let scale = 1.0 + v.abs() + c.abs();
            prop_assert!((c * c - (1.0 + v) * (1.0 + v)).abs() <= 1e-10 * scale * scale);
            let (f, g, d) = (sys.f(v, c), sys.g(v, c), sys.d(v, c));
            let tol = 1e-9 * scale.powi(4);
            prop_assert!(f.abs() <= tol && g.abs() <= tol && d.abs() <= tol, "{:?} {f} {g} {d}", cp.id);
            prop_assert!(roots.v_minus == Some(v) || roots.v_plus == Some(v));
        }
    }

    #[test]
    fn field_points_right_above_g_in_the_strip(case in preset(), s in 0.0f64..1.0, t in 0.01f64..0.99) {
        let sys = System::new(case.params()).unwrap();
        let v_minus = v_pm(&sys).v_minus.unwrap();
        let v = -1.0 + 1e-4 + s * (v_minus - 1e-4 - (-1.0 + 1e-4));
        let (cg, cf) = (nullcline_g(v, &sys).unwrap(), nullcline_f(v, &sys).unwrap());
        prop_assume!(cf > cg);
        let c = cg + t * (cf - cg);
        // dV/dx = -G / (lambda x D) with x < 0
        let dv_dx_sign = (sys.g(v, c) / sys.d(v, c)).signum();
        prop_assert!(dv_dx_sign > 0.0);
    }
}

#[test]
fn slope_ordering_at_the_interface() {
    for case in Preset::ALL {
        let d = derive(&case.params()).unwrap();
        let lo = d.mu / (case.params().n() * d.w_star);
        assert!(0.0 < lo && lo < d.sigma && d.sigma < d.k3 / d.alpha, "{case}");
    }
}

#[test]
fn p6_nodality_matches_conditions() {
    for case in Preset::ALL {
        let sys = System::new(case.params()).unwrap();
        let report = full_report(&case.params()).unwrap();
        let margins_ok = [ConditionId::G, ConditionId::H]
            .iter()
            .all(|id| report.get(*id).unwrap().passed());
        let p6 = critical_points(&sys)
            .into_iter()
            .find(|c| c.id == CriticalPointId::P6)
            .unwrap();
        let p6 = classify(&p6, &sys).unwrap();
        let disc_ok = p6.discriminant.unwrap() > 0.0;
        assert_eq!(p6.class == Classification::Node, margins_ok && disc_ok, "{case}");
        let (w, wc) = (p6.wronskian.unwrap(), p6.wronskian_closed_form.unwrap());
        assert!(((w - wc) / wc).abs() < 1e-8, "{case}: {w} vs {wc}");
    }
}

#[test]
fn nullclines_increase_on_their_branches() {
    for case in Preset::ALL {
        let sys = System::new(case.params()).unwrap();
        let v_star = sys.k.v_star;
        let branches: [(&dyn Fn(f64) -> f64, f64, f64); 3] = [
            (&|v| nullcline_f(v, &sys).unwrap(), -1.0 + 1e-6, 3.0),
            (&|v| nullcline_g(v, &sys).unwrap(), -1.0 + 1e-6, v_star - 1e-3),
            (&|v| nullcline_g(v, &sys).unwrap(), 1e-6, 3.0),
        ];
        for (curve, lo, hi) in branches {
            let n = 1000;
            let mut prev = curve(lo);
            for i in 1..=n {
                let v = lo + (hi - lo) * i as f64 / n as f64;
                let c = curve(v);
                assert!(c > prev, "{case}: not increasing at V = {v}");
                prev = c;
            }
        }
    }
}
