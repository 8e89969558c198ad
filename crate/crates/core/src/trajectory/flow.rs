//! The phase flow in arclength form with `log|x|` and `log R` carried along.
//!
//! State layout is `[V, C, y, ln R]` with `y = log|x|`. The phase curve is
//! traversed with unit speed, `(V, C)' = o (G, F)/|(G, F)|`, where the
//! orientation `o` is the sign of `D` on the branch being followed; this is
//! the direction of increasing `x`. Then `dy/ds = -lambda o D / |(G, F)|`
//! and the mass equation gives `ln R`.

use crate::phaseplane::System;

pub const IV: usize = 0;
pub const IC: usize = 1;
pub const IY: usize = 2;
pub const ILNR: usize = 3;

pub type State = [f64; 4];

#[derive(Debug, Clone, Copy)]
pub struct ArcField<'a> {
    pub sys: &'a System,
    /// Sign of `D` on the branch.
    pub orient: f64,
}

impl<'a> ArcField<'a> {
    pub fn new(sys: &'a System, orient: f64) -> Self {
        ArcField { sys, orient }
    }

    /// Derivatives with respect to arclength. Returns NaNs at critical
    /// points, which the driver treats as a rejected step.
    pub fn rhs(&self, u: &State) -> State {
        let (v, c) = (u[IV], u[IC]);
        let sys = self.sys;
        let w = 1.0 + v;
        let d = sys.d(v, c);
        let g = sys.g(v, c);
        let f = sys.f(v, c);
        let norm = g.hypot(f);
        if !(norm > 0.0) || !norm.is_finite() {
            return [f64::NAN; 4];
        }
        let o = self.orient;
        let od = o * d;
        [
            o * g / norm,
            o * f / norm,
            -sys.lambda() * od / norm,
            (-(sys.kappa() + sys.n()) * v * od - o * g) / (norm * w),
        ]
    }

    /// Derivatives with respect to component `k` of the state, which must be
    /// monotone along the stretch being integrated.
    pub fn rhs_by(&self, u: &State, k: usize) -> State {
        let mut r = self.rhs(u);
        let dk = r[k];
        for v in r.iter_mut() {
            *v /= dk;
        }
        r[k] = 1.0;
        r
    }
}

/// `ln R` from the adiabatic integral with unit constant:
/// `R^(1-gamma+q) = x^2 / (W^q Z)`.
pub fn ln_r_adiabatic(sys: &System, y: f64, v: f64, c: f64) -> f64 {
    let q = sys.k.q;
    let w = 1.0 + v;
    (2.0 * y - q * w.abs().ln() - 2.0 * c.ln()) / (1.0 - sys.gamma() + q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn unit_speed_in_phase_plane() {
        let sys = System::new(Preset::Case1.params()).unwrap();
        let f = ArcField::new(&sys, -1.0);
        let r = f.rhs(&[-0.95, 0.1, -0.05, -3.0]);
        assert!((r[IV].hypot(r[IC]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn x_increases_along_flow() {
        // y = log|x| with x < 0 decreases as x increases
        let sys = System::new(Preset::Case1.params()).unwrap();
        let (v, c) = (-0.95, 0.1);
        assert!(sys.d(v, c) < 0.0);
        let r = ArcField::new(&sys, -1.0).rhs(&[v, c, 0.0, 0.0]);
        assert!(r[IY] < 0.0);
    }

    #[test]
    fn reparametrized_rhs_has_unit_component() {
        let sys = System::new(Preset::Case1.params()).unwrap();
        let f = ArcField::new(&sys, -1.0);
        let u = [-0.9, 0.2, -0.1, -2.0];
        let r = f.rhs_by(&u, IY);
        assert_eq!(r[IY], 1.0);
        // dV/dy = -G/(lambda D)
        let expect = -sys.g(u[0], u[1]) / (sys.lambda() * sys.d(u[0], u[1]));
        assert!((r[IV] - expect).abs() < 1e-12 * expect.abs());
    }
}
