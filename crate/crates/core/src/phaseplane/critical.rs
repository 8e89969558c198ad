//! Critical points of `dC/dV = F/G` and their linearized classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conditions::{ConditionId, ConditionResult, Inequality};
use crate::error::{Error, Result};

use super::nullcline::nullcline_g_sq;
use super::{PhasePoint, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalPointId {
    P1,
    P2,
    P3,
    P4,
    P6,
    P8,
}

impl fmt::Display for CriticalPointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Star,
    Node,
    Saddle,
    Degenerate,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Star => "star",
            Classification::Node => "node",
            Classification::Saddle => "saddle",
            Classification::Degenerate => "degenerate",
            Classification::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// First partials of `F` and `G` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partials {
    pub f_v: f64,
    pub f_c: f64,
    pub g_v: f64,
    pub g_c: f64,
}

impl Partials {
    pub fn wronskian(&self) -> f64 {
        self.f_c * self.g_v - self.f_v * self.g_c
    }

    pub fn discriminant(&self) -> f64 {
        let d = self.f_c - self.g_v;
        d * d + 4.0 * self.f_v * self.g_c
    }

    fn max_abs(&self) -> f64 {
        self.f_v.abs().max(self.f_c.abs()).max(self.g_v.abs()).max(self.g_c.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub id: CriticalPointId,
    pub present: bool,
    pub location: PhasePoint,
    pub partials: Option<Partials>,
    pub wronskian: Option<f64>,
    /// `K C6^2 (V6 - V4)(V6 - V8)`; P6 only.
    pub wronskian_closed_form: Option<f64>,
    pub discriminant: Option<f64>,
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub class: Classification,
}

impl CriticalPoint {
    fn at(id: CriticalPointId, present: bool, location: PhasePoint) -> Self {
        CriticalPoint {
            id,
            present,
            location,
            partials: None,
            wronskian: None,
            wronskian_closed_form: None,
            discriminant: None,
            e1: None,
            e2: None,
            l1: None,
            l2: None,
            class: Classification::Unclassified,
        }
    }
}

/// Roots of the quadratic whose solutions locate P6 (`v_minus`) and P8
/// (`v_plus`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VpmRoots {
    pub radicand: f64,
    pub v_minus: Option<f64>,
    pub v_plus: Option<f64>,
}

/// Solves `m gamma V^2 - b V + (2 mu - kappa) = 0` with
/// `b = (gamma-2) mu + kappa - m gamma`.
///
/// The larger-magnitude root comes from `b + sign(b) sqrt(radicand)` and the
/// other from the product `V- V+ = (2 mu - kappa)/(m gamma)`, which avoids
/// cancellation when the radicand is close to `b^2`.
pub fn v_pm(sys: &System) -> VpmRoots {
    let (g, k) = (sys.gamma(), sys.kappa());
    let (mu, m) = (sys.k.mu, sys.k.m);
    let b = (g - 2.0) * mu + k - m * g;
    let radicand = (g - 2.0) * (g - 2.0) * mu * mu
        - 2.0 * (g * m * (g + 2.0) - k * (g - 2.0)) * mu
        + (g * m + k) * (g * m + k);
    if radicand < 0.0 {
        return VpmRoots {
            radicand,
            v_minus: None,
            v_plus: None,
        };
    }
    let a2 = 2.0 * m * g;
    let big = (b + b.signum() * radicand.sqrt()) / a2;
    let product = (2.0 * mu - k) / (m * g);
    let small = if big != 0.0 { product / big } else { 0.0 };
    let (lo, hi) = if big < small { (big, small) } else { (small, big) };
    VpmRoots {
        radicand,
        v_minus: Some(lo),
        v_plus: Some(hi),
    }
}

/// `V4 = -2 lambda / (2 + n (gamma - 1))`.
pub fn v4(sys: &System) -> f64 {
    -2.0 * sys.lambda() / (2.0 + sys.n() * (sys.gamma() - 1.0))
}

/// Locates P1–P8 and classifies each present point where the linearization
/// allows it. Absence is reported through `present`, never as an error.
pub fn critical_points(sys: &System) -> Vec<CriticalPoint> {
    let lam = sys.lambda();
    let mut pts = vec![
        CriticalPoint::at(CriticalPointId::P1, true, PhasePoint::new(0.0, 0.0)),
        CriticalPoint::at(CriticalPointId::P2, true, PhasePoint::new(-1.0, 0.0)),
        CriticalPoint::at(CriticalPointId::P3, true, PhasePoint::new(-lam, 0.0)),
    ];

    let v4 = v4(sys);
    let c4_sq = nullcline_g_sq(v4, sys);
    let c4 = if c4_sq > 0.0 { c4_sq.sqrt() } else { 0.0 };
    pts.push(CriticalPoint::at(
        CriticalPointId::P4,
        c4_sq > 0.0,
        PhasePoint::new(v4, c4),
    ));

    let roots = v_pm(sys);
    for (id, v) in [
        (CriticalPointId::P6, roots.v_minus),
        (CriticalPointId::P8, roots.v_plus),
    ] {
        let (present, loc) = match v {
            Some(v) => (nullcline_g_sq(v, sys) > 0.0, PhasePoint::new(v, 1.0 + v)),
            None => (false, PhasePoint::new(f64::NAN, f64::NAN)),
        };
        pts.push(CriticalPoint::at(id, present, loc));
    }

    for cp in pts.iter_mut() {
        if let Ok(done) = classify(cp, sys) {
            *cp = done;
        }
    }
    pts
}

/// Partials at P6 in the simplified form valid at a triple point on
/// `C = 1 + V`.
pub fn p6_partials(sys: &System, v6: f64) -> Partials {
    let c = 1.0 + v6;
    let k = &sys.k;
    let n = sys.n();
    Partials {
        f_c: 2.0 * c * (1.0 + k.alpha + v6),
        f_v: c * (k.k2 - k.alpha - 2.0 * k.k1 * (1.0 + v6)),
        g_c: 2.0 * n * c * (v6 - k.v_star),
        g_v: c * (n * (1.0 + k.v_star) - 2.0 * v6 - sys.lambda()),
    }
}

/// Linearization data at a present critical point.
///
/// At P6 the simplified partials are returned; the generic analytic partials
/// are computed alongside and the largest relative discrepancy is returned
/// as the second element (zero elsewhere).
pub fn linearize(cp: &CriticalPoint, sys: &System) -> Result<(Partials, f64)> {
    if !cp.present {
        return Err(Error::AbsentPoint(cp.id.to_string()));
    }
    if cp.id == CriticalPointId::P2 {
        return Err(Error::DegenerateLinearization("P2".into()));
    }
    let generic = sys.partials(cp.location);
    let (chosen, cross) = if cp.id == CriticalPointId::P6 {
        let simple = p6_partials(sys, cp.location.v);
        let scale = simple.max_abs().max(f64::MIN_POSITIVE);
        let diff = [
            simple.f_v - generic.f_v,
            simple.f_c - generic.f_c,
            simple.g_v - generic.g_v,
            simple.g_c - generic.g_c,
        ]
        .iter()
        .fold(0.0_f64, |a, d| a.max(d.abs()))
            / scale;
        (simple, diff)
    } else {
        (generic, 0.0)
    };
    if chosen.max_abs() == 0.0 {
        return Err(Error::DegenerateLinearization(cp.id.to_string()));
    }
    Ok((chosen, cross))
}

/// Fills in the Wronskian, discriminant, characteristic values and slopes.
///
/// P1 is a star point for every parameter set and is labelled as such
/// directly; P2 is a degenerate triple point and P3 is only located.
/// Elsewhere `E1`, `E2` are ordered so that `|E1| < |E2|`, with the same
/// sign choice applied to `L1`, `L2`.
pub fn classify(cp: &CriticalPoint, sys: &System) -> Result<CriticalPoint> {
    let mut out = cp.clone();
    match cp.id {
        CriticalPointId::P1 => {
            let (p, _) = linearize(cp, sys)?;
            out.partials = Some(p);
            out.wronskian = Some(p.wronskian());
            out.discriminant = Some(p.discriminant());
            out.class = Classification::Star;
            return Ok(out);
        }
        CriticalPointId::P2 => {
            out.class = Classification::Degenerate;
            return Ok(out);
        }
        CriticalPointId::P3 => return Ok(out),
        _ => {}
    }

    if cp.id == CriticalPointId::P6 || cp.id == CriticalPointId::P8 {
        let roots = v_pm(sys);
        if roots.radicand == 0.0 {
            return Err(Error::Coalescence);
        }
    }

    let (p, _) = linearize(cp, sys)?;
    let w = p.wronskian();
    let r2 = p.discriminant();
    out.partials = Some(p);
    out.wronskian = Some(w);
    out.discriminant = Some(r2);

    if cp.id == CriticalPointId::P6 {
        let roots = v_pm(sys);
        if let (Some(vm), Some(vp)) = (roots.v_minus, roots.v_plus) {
            let c6 = 1.0 + vm;
            out.wronskian_closed_form = Some(sys.k.big_k * c6 * c6 * (vm - v4(sys)) * (vm - vp));
        }
    }

    if r2 <= 0.0 {
        return Err(Error::DiscriminantNonpositive(r2));
    }
    if p.g_c == 0.0 {
        out.class = Classification::Degenerate;
        return Ok(out);
    }
    let r = r2.sqrt();
    let denom = 2.0 * p.g_c;
    let e_minus = (p.f_c + p.g_v - r) / denom;
    let e_plus = (p.f_c + p.g_v + r) / denom;
    let l_minus = (p.f_c - p.g_v - r) / denom;
    let l_plus = (p.f_c - p.g_v + r) / denom;
    let (e1, e2, l1, l2) = if e_minus.abs() < e_plus.abs() {
        (e_minus, e_plus, l_minus, l_plus)
    } else {
        (e_plus, e_minus, l_plus, l_minus)
    };
    out.e1 = Some(e1);
    out.e2 = Some(e2);
    out.l1 = Some(l1);
    out.l2 = Some(l2);
    out.class = if w > 0.0 {
        Classification::Node
    } else if w < 0.0 {
        Classification::Saddle
    } else {
        Classification::Degenerate
    };
    Ok(out)
}

/// Conditions (G)–(J), which depend on the critical points in `C > 0`.
pub fn check_conditions_g_to_j(sys: &System) -> Vec<ConditionResult> {
    use ConditionId::*;
    let roots = v_pm(sys);
    let v4 = v4(sys);

    let g = match roots.v_minus {
        Some(vm) => ConditionResult::from_inequalities(
            G,
            vec![
                Inequality::less("0 < radicand", 0.0, roots.radicand),
                Inequality::less("0 < C_G(V-)^2", 0.0, nullcline_g_sq(vm, sys)),
            ],
        ),
        None => ConditionResult::from_inequalities(
            G,
            vec![Inequality::less("0 < radicand", 0.0, roots.radicand)],
        ),
    };
    if !g.passed() {
        return vec![
            g,
            ConditionResult::not_evaluable(H, "P6 absent"),
            ConditionResult::not_evaluable(I, "P6 absent"),
            ConditionResult::not_evaluable(J, "P6 absent"),
        ];
    }
    let (vm, vp) = (roots.v_minus.unwrap(), roots.v_plus.unwrap());
    let h = ConditionResult::from_inequalities(
        H,
        vec![
            Inequality::less("V- < V4", vm, v4),
            Inequality::less("V4 < V+", v4, vp),
        ],
    );

    let p = p6_partials(sys, vm);
    let r2 = p.discriminant();
    let i = ConditionResult::from_inequalities(I, vec![Inequality::less("0 < R^2 at P6", 0.0, r2)]);
    if !i.passed() || p.g_c == 0.0 || p.f_c == 0.0 {
        return vec![g, h, i, ConditionResult::not_evaluable(J, "slopes at P6 undefined")];
    }
    let r = r2.sqrt();
    // at P6 F_C + G_V > 0 under (A), so the minus branch is primary
    let l1 = (p.f_c - p.g_v - r) / (2.0 * p.g_c);
    let l2 = (p.f_c - p.g_v + r) / (2.0 * p.g_c);
    let f_slope = -p.f_v / p.f_c;
    let g_slope = -p.g_v / p.g_c;
    let j = ConditionResult::from_inequalities(
        J,
        vec![
            Inequality::less("L2 < -F_V/F_C", l2, f_slope),
            Inequality::less("-F_V/F_C < L1", f_slope, l1),
            Inequality::less("L1 < -G_V/G_C", l1, g_slope),
        ],
    );
    vec![g, h, i, j]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Params, Preset};

    fn sys(p: Preset) -> System {
        System::new(p.params()).unwrap()
    }

    fn find(pts: &[CriticalPoint], id: CriticalPointId) -> &CriticalPoint {
        pts.iter().find(|c| c.id == id).unwrap()
    }

    #[test]
    fn case1_locations() {
        let s = sys(Preset::Case1);
        assert_eq!(v4(&s), -0.625);
        let r = v_pm(&s);
        assert!((r.v_minus.unwrap() + 0.847_460_642_355_286_1).abs() < 1e-12);
        assert!((r.v_plus.unwrap() + 0.180_539_357_644_713_9).abs() < 1e-12);
    }

    #[test]
    fn p3_sits_at_minus_lambda() {
        for p in Preset::ALL {
            let s = sys(p);
            let pts = critical_points(&s);
            assert_eq!(find(&pts, CriticalPointId::P3).location.v, -s.lambda());
        }
    }

    #[test]
    fn p6_is_node_with_matching_wronskian() {
        let s = sys(Preset::Case1);
        let pts = critical_points(&s);
        let p6 = find(&pts, CriticalPointId::P6);
        assert!(p6.present);
        assert_eq!(p6.class, Classification::Node);
        let w = p6.wronskian.unwrap();
        let wc = p6.wronskian_closed_form.unwrap();
        assert!(w > 0.0);
        assert!(((w - wc) / w).abs() < 1e-8, "{w} vs {wc}");
        let (e1, e2) = (p6.e1.unwrap(), p6.e2.unwrap());
        assert!(e1.abs() < e2.abs());
        let gc = p6.partials.unwrap().g_c;
        assert!(((e1 * e2 * gc * gc - w) / w).abs() < 1e-10);
    }

    #[test]
    fn p6_simplified_partials_agree_with_generic() {
        let s = sys(Preset::Case1);
        let pts = critical_points(&s);
        let (p, cross) = linearize(find(&pts, CriticalPointId::P6), &s).unwrap();
        assert!(cross < 1e-10, "{cross}");
        let c6 = 1.0 + find(&pts, CriticalPointId::P6).location.v;
        let sum = (s.kappa() + s.n() + 1.0 - s.k.mu) * c6;
        assert!((p.f_c + p.g_v - sum).abs() < 1e-12);
    }

    #[test]
    fn p1_is_star_with_slope_field_c_over_v() {
        let s = sys(Preset::Case1);
        let pts = critical_points(&s);
        let p1 = find(&pts, CriticalPointId::P1);
        assert_eq!(p1.class, Classification::Star);
        let p = p1.partials.unwrap();
        // dC/dV = (F_V V + F_C C)/(G_V V + G_C C) = C/V
        assert_eq!(p.f_v, 0.0);
        assert_eq!(p.g_c, 0.0);
        assert!((p.f_c - p.g_v).abs() < 1e-15);
        assert!((p.f_c + s.lambda()).abs() < 1e-15);
    }

    #[test]
    fn p2_is_degenerate() {
        let s = sys(Preset::Case1);
        let pts = critical_points(&s);
        assert_eq!(find(&pts, CriticalPointId::P2).class, Classification::Degenerate);
    }

    #[test]
    fn p4_is_a_saddle_in_case1() {
        let s = sys(Preset::Case1);
        let pts = critical_points(&s);
        let p4 = find(&pts, CriticalPointId::P4);
        assert!(p4.present);
        assert_eq!(p4.class, Classification::Saddle);
    }

    #[test]
    fn g_to_j_hold_for_presets() {
        for preset in Preset::ALL {
            let res = check_conditions_g_to_j(&sys(preset));
            for r in &res {
                assert!(r.passed(), "{preset} {:?} {:?}", r.id, r.inequalities);
            }
        }
    }

    #[test]
    fn negative_radicand_fails_g() {
        // radicand at (3, 5/3, 2, -0.01) is -13.282 by direct evaluation
        let s = System::new(Params::new(3, 5.0 / 3.0, 2.0, -0.01).unwrap()).unwrap();
        let r = v_pm(&s);
        assert!(r.radicand < 0.0);
        let res = check_conditions_g_to_j(&s);
        assert!(!res[0].passed());
        for r in &res[1..] {
            assert_eq!(r.status, crate::conditions::Status::NotEvaluable);
        }
        let pts = critical_points(&s);
        assert!(!find(&pts, CriticalPointId::P6).present);
    }
}
