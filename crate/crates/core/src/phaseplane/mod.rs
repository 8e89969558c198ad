//! The reduced similarity system in the `(V, C)` plane.
//!
//! Along a self-similar flow, `V' = -G / (lambda x D)` and
//! `C' = -F / (lambda x D)`, so phase-plane trajectories satisfy
//! `dC/dV = F / G`. This module evaluates `D`, `G`, `F` and their partials,
//! the nullclines `{F = 0}` and `{G = 0}`, and the critical points.

mod critical;
mod nullcline;

pub use critical::{
    check_conditions_g_to_j, classify, critical_points, linearize, p6_partials, v4, v_pm,
    Classification, CriticalPoint, CriticalPointId, Partials, VpmRoots,
};
pub use nullcline::{nullcline_f, nullcline_f_sq, nullcline_g, nullcline_g_sq, polyline};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive, DerivedConstants, Params};

/// A point of the `(V, C)` plane, with the `(W, Z) = (1 + V, C^2)` view used
/// near the interface point P2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub v: f64,
    pub c: f64,
}

impl PhasePoint {
    pub const fn new(v: f64, c: f64) -> Self {
        PhasePoint { v, c }
    }

    pub fn from_wz(w: f64, z: f64) -> Self {
        PhasePoint { v: w - 1.0, c: z.sqrt() }
    }

    pub fn w(&self) -> f64 {
        1.0 + self.v
    }

    pub fn z(&self) -> f64 {
        self.c * self.c
    }

    pub fn dist(&self, other: &PhasePoint) -> f64 {
        (self.v - other.v).hypot(self.c - other.c)
    }
}

/// Values of the three scalar fields at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsValues {
    pub d: f64,
    pub g: f64,
    pub f: f64,
}

/// Parameters bundled with their derived constants; the phase-plane fields
/// need both on every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct System {
    pub params: Params,
    pub k: DerivedConstants,
}

impl System {
    pub fn new(params: Params) -> Result<Self> {
        Ok(System {
            params,
            k: derive(&params)?,
        })
    }

    pub fn n(&self) -> f64 {
        self.params.n()
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda()
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa()
    }

    /// `D = (1+V)^2 - C^2`, vanishing on the sonic lines.
    #[inline]
    pub fn d(&self, v: f64, c: f64) -> f64 {
        let w = 1.0 + v;
        (w - c) * (w + c)
    }

    /// `G = n C^2 (V - V*) - V (1+V) (lambda+V)`.
    #[inline]
    pub fn g(&self, v: f64, c: f64) -> f64 {
        self.n() * c * c * (v - self.k.v_star) - v * (1.0 + v) * (self.lambda() + v)
    }

    /// `F = C [C^2 (1 + alpha/(1+V)) - k1 (1+V)^2 + k2 (1+V) - k3]`.
    ///
    /// Finite only off `V = -1`; callers that may land on the pole use
    /// [`eval_rhs`].
    #[inline]
    pub fn f(&self, v: f64, c: f64) -> f64 {
        let w = 1.0 + v;
        let k = &self.k;
        c * (c * c * (1.0 + k.alpha / w) - (k.k1 * w - k.k2) * w - k.k3)
    }

    pub fn rhs(&self, p: PhasePoint) -> RhsValues {
        RhsValues {
            d: self.d(p.v, p.c),
            g: self.g(p.v, p.c),
            f: self.f(p.v, p.c),
        }
    }

    /// Analytic partials `(F_V, F_C, G_V, G_C)` at an arbitrary point off the
    /// pole line.
    pub fn partials(&self, p: PhasePoint) -> Partials {
        let (v, c) = (p.v, p.c);
        let w = 1.0 + v;
        let k = &self.k;
        let n = self.n();
        let lam = self.lambda();
        let c2 = c * c;
        Partials {
            f_v: c * (-c2 * k.alpha / (w * w) - 2.0 * k.k1 * w + k.k2),
            f_c: 3.0 * c2 * (1.0 + k.alpha / w) - k.k1 * w * w + k.k2 * w - k.k3,
            g_v: n * c2 - (w * (lam + v) + v * (lam + v) + v * w),
            g_c: 2.0 * n * c * (v - k.v_star),
        }
    }
}

/// Evaluates `D`, `G`, `F` at a point.
///
/// At `V = -1`, `F` carries a `1/(1+V)` pole unless `C = 0` or
/// `alpha = 0`; the limit is direction dependent there, so a point query
/// errors with [`Error::Pole`] instead of returning a value.
pub fn eval_rhs(p: PhasePoint, sys: &System) -> Result<RhsValues> {
    if p.w() == 0.0 {
        let f = if p.c == 0.0 {
            0.0
        } else if sys.k.alpha == 0.0 {
            p.c * (p.c * p.c - sys.k.k3)
        } else {
            return Err(Error::Pole { c: p.c });
        };
        return Ok(RhsValues {
            d: sys.d(p.v, p.c),
            g: sys.g(p.v, p.c),
            f,
        });
    }
    Ok(sys.rhs(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    fn case1() -> System {
        System::new(Preset::Case1.params()).unwrap()
    }

    #[test]
    fn origin_is_critical() {
        let r = eval_rhs(PhasePoint::new(0.0, 0.0), &case1()).unwrap();
        assert_eq!((r.d, r.g, r.f), (1.0, 0.0, 0.0));
    }

    #[test]
    fn p2_is_a_triple_point() {
        let r = eval_rhs(PhasePoint::new(-1.0, 0.0), &case1()).unwrap();
        assert_eq!((r.d, r.g, r.f), (0.0, 0.0, 0.0));
    }

    #[test]
    fn pole_at_v_minus_one() {
        let err = eval_rhs(PhasePoint::new(-1.0, 0.3), &case1()).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn isentropic_case_has_no_pole() {
        let p = Preset::Case1.params().with_kappa(-0.75).unwrap();
        let sys = System::new(p).unwrap();
        let r = eval_rhs(PhasePoint::new(-1.0, 0.3), &sys).unwrap();
        assert!((r.f - 0.3 * (0.09 - sys.k.k3)).abs() < 1e-15);
    }

    #[test]
    fn sonic_identity_on_upper_line() {
        let sys = case1();
        let half = (sys.gamma() - 1.0) / 2.0;
        for i in 0..20 {
            let v = -0.99 + 1.98 * i as f64 / 19.0;
            let r = sys.rhs(PhasePoint::new(v, 1.0 + v));
            assert!((r.f + half * r.g).abs() <= 1e-12 * (r.f.abs() + r.g.abs() + 1.0));
        }
    }

    #[test]
    fn partials_match_central_differences() {
        let sys = case1();
        let p = PhasePoint::new(-0.4, 0.7);
        let a = sys.partials(p);
        let h = 1e-6;
        let fd = |fun: &dyn Fn(f64, f64) -> f64, dv: f64, dc: f64| {
            (fun(p.v + dv, p.c + dc) - fun(p.v - dv, p.c - dc)) / (2.0 * h)
        };
        let f = |v, c| sys.f(v, c);
        let g = |v, c| sys.g(v, c);
        assert!((a.f_v - fd(&f, h, 0.0)).abs() < 1e-8);
        assert!((a.f_c - fd(&f, 0.0, h)).abs() < 1e-8);
        assert!((a.g_v - fd(&g, h, 0.0)).abs() < 1e-8);
        assert!((a.g_c - fd(&g, 0.0, h)).abs() < 1e-8);
    }

    #[test]
    fn wz_view() {
        let p = PhasePoint::from_wz(1e-6, 0.25);
        assert!((p.v + 1.0 - 1e-6).abs() < 1e-16);
        assert_eq!(p.c, 0.5);
        assert_eq!(p.z(), 0.25);
    }
}
