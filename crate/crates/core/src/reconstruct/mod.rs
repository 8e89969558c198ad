//! Physical fields from the trajectory and their verification.
//!
//! With `x = t / r^lambda` the flow is
//! `rho = r^kappa R(x)`, `u = -(r^(1-lambda)/lambda) V/x`,
//! `c = -(r^(1-lambda)/lambda) C/x` and `p = rho c^2 / gamma`, where `R`
//! follows from the adiabatic integral
//! `R^(1-gamma+q) = K x^2 / (W^q Z)` for a fixed constant `K > 0`.

mod boundary;
mod fit;
mod integrability;
mod interp;
mod residual;

pub use boundary::{boundary_exponents, predicted_exponents, BoundaryReport, ExponentFit};
pub use fit::{fit_line, LineFit};
pub use integrability::{integrability_check, IntegralReport, IntegrabilityReport};
pub use interp::MonotoneCubic;
pub use residual::{residual_check, ResidualOptions, ResidualReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phaseplane::System;
use crate::trajectory::GammaResult;

/// `ln R` from the adiabatic integral with constant `k`.
pub fn ln_density(sys: &System, k: f64, x: f64, v: f64, c: f64) -> f64 {
    let q = sys.k.q;
    ((k * x * x).ln() - q * (1.0 + v).abs().ln() - 2.0 * c.ln()) / (1.0 - sys.gamma() + q)
}

/// `R` at one point of the trajectory.
pub fn density_at(sys: &System, k: f64, x: f64, v: f64, c: f64) -> Result<f64> {
    if c == 0.0 {
        return Err(Error::DensityAtVacuum(x));
    }
    Ok(ln_density(sys, k, x, v, c).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub adiabatic_constant: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
}

/// `R` along the trajectory; samples with `C = 0` (the interface) are
/// left out.
pub fn density_from_adiabatic(gamma: &GammaResult, constant: f64) -> Result<DensityProfile> {
    let sys = gamma.system();
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "adiabatic constant {constant} must be positive"
        )));
    }
    if sys.gamma() - 1.0 - sys.k.q == 0.0 {
        return Err(Error::InvalidParameter("gamma - 1 - q vanishes".into()));
    }
    let (mut x, mut r) = (Vec::new(), Vec::new());
    for s in gamma.samples.iter().filter(|s| s.c > 0.0) {
        x.push(s.x);
        r.push(density_at(&sys, constant, s.x, s.v, s.c)?);
    }
    Ok(DensityProfile {
        adiabatic_constant: constant,
        x,
        r,
    })
}

/// Relative spread `max/min - 1` of `[R|1+V|]^q R^(1-gamma) (C/x)^2` along
/// the trajectory, with `R` carried by the mass equation.
pub fn adiabatic_variation(gamma: &GammaResult) -> f64 {
    let sys = gamma.system();
    let (q, g) = (sys.k.q, sys.gamma());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in gamma.samples.iter().filter(|s| s.c > 0.0) {
        let l = q * (s.ln_r + s.w().abs().ln()) + (1.0 - g) * s.ln_r + 2.0 * (s.c / s.x).abs().ln();
        lo = lo.min(l);
        hi = hi.max(l);
    }
    (hi - lo).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub t: f64,
    pub r: f64,
    pub rho: f64,
    pub u: f64,
    pub c: f64,
    pub p: f64,
}

/// Physical fields at `(t, r)` from similarity values at `x = t/r^lambda`.
pub fn field_point(sys: &System, t: f64, r: f64, v: f64, c_sim: f64, big_r: f64) -> FieldPoint {
    let lam = sys.lambda();
    let x = t / r.powf(lam);
    let fac = -r.powf(1.0 - lam) / (lam * x);
    let rho = r.powf(sys.kappa()) * big_r;
    let c = fac * c_sim;
    FieldPoint {
        t,
        r,
        rho,
        u: fac * v,
        c,
        p: rho * c * c / sys.gamma(),
    }
}

/// Interface radius `r0(t) = (-t)^(1/lambda)` in the gauge `x0 = -1`.
pub fn interface_radius(sys: &System, t: f64) -> f64 {
    (-t).powf(1.0 / sys.lambda())
}

/// Interface speed `dr0/dt`.
pub fn interface_speed(sys: &System, t: f64) -> f64 {
    let lam = sys.lambda();
    -(-t).powf(1.0 / lam - 1.0) / lam
}

/// Monotone cubic interpolants of `V`, `C` and `R` in `x`, with the star
/// point limits beyond the last sample.
#[derive(Debug, Clone)]
pub struct Interpolant {
    sys: System,
    constant: f64,
    x0: f64,
    x_last: f64,
    nu: f64,
    omega: f64,
    v: MonotoneCubic,
    c: MonotoneCubic,
    r: MonotoneCubic,
}

impl Interpolant {
    pub fn new(gamma: &GammaResult, density: &DensityProfile) -> Self {
        let xs: Vec<f64> = gamma.samples.iter().map(|s| s.x).collect();
        let vs = gamma.samples.iter().map(|s| s.v).collect();
        let cs = gamma.samples.iter().map(|s| s.c).collect();
        // R vanishes at the interface
        let mut rx = vec![gamma.x0];
        let mut rv = vec![0.0];
        rx.extend(density.x.iter().copied().filter(|x| *x > gamma.x0));
        rv.extend(density.x.iter().zip(&density.r).filter(|(x, _)| **x > gamma.x0).map(|(_, r)| *r));
        Interpolant {
            sys: gamma.system(),
            constant: density.adiabatic_constant,
            x0: gamma.x0,
            x_last: *xs.last().expect("non-empty"),
            nu: gamma.nu,
            omega: gamma.omega,
            v: MonotoneCubic::new(xs.clone(), vs),
            c: MonotoneCubic::new(xs, cs),
            r: MonotoneCubic::new(rx, rv),
        }
    }

    /// `(V, C, R)` at `x`.
    pub fn at(&self, x: f64) -> Result<(f64, f64, f64)> {
        if x < self.x0 || x >= 0.0 || x.is_nan() {
            return Err(Error::OutsideFluid { x, x0: self.x0 });
        }
        if x > self.x_last {
            let (v, c) = (self.nu * x, self.omega * x);
            return Ok((v, c, density_at(&self.sys, self.constant, x, v, c)?));
        }
        Ok((self.v.eval(x), self.c.eval(x), self.r.eval(x)))
    }

    pub fn field(&self, t: f64, r: f64) -> Result<FieldPoint> {
        let mut x = t / r.powf(self.sys.lambda());
        // a point on the interface computed from r0(t) may round past x0
        if x < self.x0 && x > self.x0 * (1.0 + 1e-14) {
            x = self.x0;
        }
        let (v, c, big_r) = self.at(x)?;
        Ok(field_point(&self.sys, t, r, v, c, big_r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowField {
    pub adiabatic_constant: f64,
    pub points: Vec<FieldPoint>,
}

/// Fields on the tensor grid `t_list x r_grid`; every point must lie in
/// the fluid, `r >= r0(t)`, and `t < 0`.
pub fn flow_field(
    gamma: &GammaResult,
    density: &DensityProfile,
    t_list: &[f64],
    r_grid: &[f64],
) -> Result<FlowField> {
    let interp = Interpolant::new(gamma, density);
    let mut points = Vec::with_capacity(t_list.len() * r_grid.len());
    for &t in t_list {
        if !(t < 0.0) {
            return Err(Error::InvalidParameter(format!("t = {t} must be negative")));
        }
        for &r in r_grid {
            points.push(interp.field(t, r)?);
        }
    }
    Ok(FlowField {
        adiabatic_constant: density.adiabatic_constant,
        points,
    })
}

/// Fields at `r = s r0(t)` for each `s` in `scales` (all `>= 1`).
pub fn flow_field_scaled(
    gamma: &GammaResult,
    density: &DensityProfile,
    t_list: &[f64],
    scales: &[f64],
) -> Result<FlowField> {
    let sys = gamma.system();
    let interp = Interpolant::new(gamma, density);
    let mut points = Vec::with_capacity(t_list.len() * scales.len());
    for &t in t_list {
        if !(t < 0.0) {
            return Err(Error::InvalidParameter(format!("t = {t} must be negative")));
        }
        let r0 = interface_radius(&sys, t);
        for &s in scales {
            points.push(interp.field(t, s * r0)?);
        }
    }
    Ok(FlowField {
        adiabatic_constant: density.adiabatic_constant,
        points,
    })
}

/// Largest `|u - dr0/dt| / |dr0/dt|` on the interface over `t_list`.
pub fn interface_kinematics(gamma: &GammaResult, density: &DensityProfile, t_list: &[f64]) -> Result<f64> {
    let sys = gamma.system();
    let interp = Interpolant::new(gamma, density);
    let mut worst = 0.0_f64;
    for &t in t_list {
        let f = interp.field(t, interface_radius(&sys, t))?;
        let s = interface_speed(&sys, t);
        worst = worst.max(((f.u - s) / s).abs());
    }
    Ok(worst)
}

/// `n` points spaced evenly in `log` between `a` and `b` (same sign).
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let sign = a.signum();
    let (la, lb) = (a.abs().ln(), b.abs().ln());
    (0..n)
        .map(|i| sign * (la + (lb - la) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}
