//! Evaluation of the trajectory at arbitrary `x` (or `W` near P2) by
//! re-integrating from the nearest sample.

use crate::error::{Error, Result};
use crate::ode::{integrate, StepControl, Stepper};
use crate::phaseplane::System;

use super::flow::{ln_r_adiabatic, ArcField, State, IC, ILNR, IV, IY};
use super::{GammaResult, Segment};

pub struct Profile<'a> {
    gamma: &'a GammaResult,
    sys: System,
    stepper: &'a dyn Stepper<4>,
    ctl: StepControl,
}

impl<'a> Profile<'a> {
    pub fn new(gamma: &'a GammaResult, stepper: &'a dyn Stepper<4>) -> Self {
        Profile {
            gamma,
            sys: gamma.system(),
            stepper,
            ctl: gamma.options.step_control(),
        }
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    fn orient(&self, i: usize) -> f64 {
        match self.gamma.samples[i].segment {
            Segment::P2toP6 => -1.0,
            Segment::P6toP1 => 1.0,
        }
    }

    /// Integrates from sample `i` with component `k` as the independent
    /// variable until it equals `target`.
    fn carry(&self, i: usize, k: usize, target: f64) -> Result<State> {
        let field = ArcField::new(&self.sys, self.orient(i));
        let rhs = |_s: f64, u: &State| field.rhs_by(u, k);
        let from = self.gamma.samples[i].state();
        let ctl = StepControl {
            h_init: (target - from[k]).abs(),
            ..self.ctl
        };
        let run = integrate(self.stepper, &rhs, from[k], from, target, &ctl, &[])?;
        let mut u = run.last().y;
        u[k] = target;
        Ok(u)
    }

    fn lerp(&self, i: usize, k: usize, target: f64) -> State {
        let (a, b) = (self.gamma.samples[i].state(), self.gamma.samples[i + 1].state());
        let t = (target - a[k]) / (b[k] - a[k]);
        let mut u = [0.0; 4];
        for j in 0..4 {
            u[j] = a[j] + t * (b[j] - a[j]);
        }
        u[k] = target;
        u
    }

    /// Near P2, inside the first step: `W` is linear in `y` and `Z/W` is
    /// constant to first order.
    fn near_interface(&self, w: f64) -> State {
        let s = &self.gamma.samples[1];
        let t = w / s.w();
        let (v, c, y) = (w - 1.0, (s.z() * t).sqrt(), s.y * t);
        [v, c, y, ln_r_adiabatic(&self.sys, y, v, c)]
    }

    /// State `[V, C, y, ln R]` at similarity coordinate `x`, `x0 <= x < 0`.
    pub fn at_x(&self, x: f64) -> Result<State> {
        let g = self.gamma;
        let first = &g.samples[0];
        if x == g.x0 {
            return Ok(first.state());
        }
        if !(x > g.x0 && x < 0.0) {
            return Err(Error::OutsideFluid { x, x0: g.x0 });
        }
        let y = (-x).ln();
        let last = g.samples.len() - 1;
        if y <= g.samples[last].y {
            // star-point limit beyond the last sample
            let (v, c) = (g.nu * x, g.omega * x);
            return Ok([v, c, y, ln_r_adiabatic(&self.sys, y, v, c)]);
        }
        // samples are ordered by decreasing y
        let j = g.samples.partition_point(|s| s.y > y);
        if g.samples[j].y == y {
            return Ok(g.samples[j].state());
        }
        let i = j - 1;
        if i == 0 {
            let s = &g.samples[1];
            return Ok(self.near_interface(s.w() * y / s.y));
        }
        if i >= g.i_arrival && i < g.i_departure {
            return Ok(self.lerp(i, IY, y));
        }
        self.carry(i, IY, y)
    }

    /// State at `W = 1 + V` on the stretch from P2 to P6, `0 < W < W6`.
    pub fn at_w(&self, w: f64) -> Result<State> {
        let g = self.gamma;
        let w6 = 1.0 + g.p6.v;
        if !(w > 0.0 && w <= w6) {
            return Err(Error::InvalidParameter(format!("W = {w} outside (0, {w6}]")));
        }
        let v = w - 1.0;
        let seg = &g.samples[..=g.i_p6];
        let j = seg.partition_point(|s| s.v < v);
        if j < seg.len() && seg[j].v == v {
            return Ok(seg[j].state());
        }
        let i = j - 1;
        if i == 0 {
            return Ok(self.near_interface(w));
        }
        if i >= g.i_arrival {
            return Ok(self.lerp(i, IV, v));
        }
        self.carry(i, IV, v)
    }

    /// `ln R` at a state from the adiabatic integral with unit constant.
    pub fn ln_r_adiabatic(&self, u: &State) -> f64 {
        ln_r_adiabatic(&self.sys, u[IY], u[IV], u[IC])
    }

    /// `ln R` carried by the mass equation, as stored in the state.
    pub fn ln_r_mass(u: &State) -> f64 {
        u[ILNR]
    }

    /// Similarity coordinate of a state.
    pub fn x_of(u: &State) -> f64 {
        -u[IY].exp()
    }

    /// Height `C` at a state.
    pub fn c_of(u: &State) -> f64 {
        u[IC]
    }
}
