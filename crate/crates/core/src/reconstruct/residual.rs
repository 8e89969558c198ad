//! Residuals of the similarity ODEs and of the Euler equations for the
//! reconstructed flow.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ode::Stepper;
use crate::phaseplane::System;
use crate::trajectory::{GammaResult, Profile, IC, IV};

use super::ln_density;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    /// Distance kept from `x0` and from `x = 0`.
    pub margin: f64,
    pub points: usize,
    /// Step of the fourth-order central differences in `x`. Stencils that
    /// straddle `x6`, where the profile is only finitely smooth, are skipped.
    pub fd_step: f64,
    /// Relative steps of the second-order differences in `t` and `r`.
    pub pde_steps: Vec<f64>,
    pub adiabatic_constant: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions {
            margin: 0.02,
            points: 40,
            fd_step: 1e-3,
            pde_steps: vec![4e-2, 2e-2, 1e-2, 5e-3],
            adiabatic_constant: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub ode_points: usize,
    pub ode_skipped: usize,
    /// Largest scaled residual of the mass, momentum and sound-speed ODEs.
    pub ode_max: [f64; 3],
    pub ode_worst_x: f64,
    pub pde_steps: Vec<f64>,
    /// Largest residual of mass, momentum, sound speed and entropy
    /// transport per step, each scaled by its term magnitudes at the
    /// finest step.
    pub pde_residuals: Vec<[f64; 4]>,
    /// Observed convergence orders from the two finest steps.
    pub pde_orders: [f64; 4],
}

impl ResidualReport {
    pub fn ode_worst(&self) -> f64 {
        self.ode_max.iter().copied().fold(0.0, f64::max)
    }
}

fn central4(f: impl Fn(f64) -> Result<[f64; 3]>, x: f64, h: f64) -> Result<([f64; 3], [f64; 3])> {
    let (m2, m1, p1, p2) = (f(x - 2.0 * h)?, f(x - h)?, f(x + h)?, f(x + 2.0 * h)?);
    let mut d = [0.0; 3];
    for k in 0..3 {
        d[k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h);
    }
    Ok((f(x)?, d))
}

/// `(V, C, R)` at `x`, with `R` from the adiabatic integral.
fn similarity(profile: &Profile, sys: &System, k: f64, x: f64) -> Result<[f64; 3]> {
    let u = profile.at_x(x)?;
    Ok([u[IV], u[IC], ln_density(sys, k, x, u[IV], u[IC]).exp()])
}

fn ode_residuals(sys: &System, x: f64, s: [f64; 3], d: [f64; 3]) -> [f64; 3] {
    let (n, g, lam, kap) = (sys.n(), sys.gamma(), sys.lambda(), sys.kappa());
    let ([v, c, r], [dv, dc, dr]) = (s, d);
    let lx = lam * x;
    let scaled = |terms: &[f64]| {
        let sum: f64 = terms.iter().sum();
        let mag: f64 = terms.iter().map(|t| t.abs()).sum();
        (sum / mag).abs()
    };
    [
        scaled(&[(1.0 + v) * dr, r * dv, -(kap + n) * r * v / lx]),
        scaled(&[
            c * c * dr,
            g * r * (1.0 + v) * dv,
            2.0 * r * c * dc,
            -g * (lam + v) * v * r / lx,
            -(kap + 2.0) * c * c * r / lx,
        ]),
        scaled(&[
            0.5 * (g - 1.0) * c * dv,
            (1.0 + v) * dc,
            -lam * c / lx,
            -(1.0 + 0.5 * n * (g - 1.0)) * v * c / lx,
        ]),
    ]
}

/// `(rho, u, c)` at `(t, r)`.
fn fields(profile: &Profile, sys: &System, k: f64, t: f64, r: f64) -> Result<[f64; 3]> {
    let lam = sys.lambda();
    let x = t / r.powf(lam);
    let [v, c, big_r] = similarity(profile, sys, k, x)?;
    let fac = -r.powf(1.0 - lam) / (lam * x);
    Ok([r.powf(sys.kappa()) * big_r, fac * v, fac * c])
}

/// Term lists of the four transport equations at `(t, r)`.
fn pde_terms(profile: &Profile, sys: &System, k: f64, t: f64, r: f64, h: f64) -> Result<[Vec<f64>; 4]> {
    let (n, g) = (sys.n(), sys.gamma());
    let (ht, hr) = (h * t.abs(), h * r);
    let f0 = fields(profile, sys, k, t, r)?;
    let (ft_p, ft_m) = (fields(profile, sys, k, t + ht, r)?, fields(profile, sys, k, t - ht, r)?);
    let (fr_p, fr_m) = (fields(profile, sys, k, t, r + hr)?, fields(profile, sys, k, t, r - hr)?);
    let dt = |i: usize| (ft_p[i] - ft_m[i]) / (2.0 * ht);
    let dr = |i: usize| (fr_p[i] - fr_m[i]) / (2.0 * hr);
    let entropy = |f: &[f64; 3]| (f[0] * f[2] * f[2] / g).ln() - g * f[0].ln();

    let [rho, u, c] = f0;
    let geom = (n - 1.0) * u / r;
    let p_r = (fr_p[0] * fr_p[2] * fr_p[2] - fr_m[0] * fr_m[2] * fr_m[2]) / (2.0 * hr);
    let s_t = (entropy(&ft_p) - entropy(&ft_m)) / (2.0 * ht);
    let s_r = (entropy(&fr_p) - entropy(&fr_m)) / (2.0 * hr);
    Ok([
        vec![dt(0), u * dr(0), rho * dr(1), rho * geom],
        vec![dt(1), u * dr(1), p_r / (g * rho)],
        vec![dt(2), u * dr(2), 0.5 * (g - 1.0) * c * dr(1), 0.5 * (g - 1.0) * c * geom],
        vec![s_t, u * s_r],
    ])
}

pub fn residual_check(
    gamma: &GammaResult,
    stepper: &dyn Stepper<4>,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let sys = gamma.system();
    let profile = Profile::new(gamma, stepper);
    let k = opts.adiabatic_constant;

    let (a, b) = (gamma.x0 + opts.margin, -opts.margin);
    let mut ode_max = [0.0_f64; 3];
    let mut ode_worst_x = f64::NAN;
    let mut worst = -1.0;
    let mut ode_skipped = 0;
    for i in 0..opts.points {
        let x = a + (b - a) * i as f64 / (opts.points - 1).max(1) as f64;
        if (x - gamma.x6).abs() <= 2.0 * opts.fd_step {
            ode_skipped += 1;
            continue;
        }
        let (s, d) = central4(|x| similarity(&profile, &sys, k, x), x, opts.fd_step)?;
        let res = ode_residuals(&sys, x, s, d);
        for j in 0..3 {
            ode_max[j] = ode_max[j].max(res[j]);
        }
        let m = res.iter().copied().fold(0.0, f64::max);
        if m > worst {
            worst = m;
            ode_worst_x = x;
        }
    }

    let t = -1.0;
    let xs = [0.5 * (gamma.x0 + gamma.x6), 0.5 * gamma.x6, 0.2 * gamma.x6];
    let rs: Vec<f64> = xs.iter().map(|x| (t / x).powf(1.0 / sys.lambda())).collect();
    let finest = opts.pde_steps.iter().copied().fold(f64::INFINITY, f64::min);
    let mut scales = Vec::new();
    for &r in &rs {
        let terms = pde_terms(&profile, &sys, k, t, r, finest)?;
        scales.push(terms.map(|ts| ts.iter().map(|v| v.abs()).sum::<f64>()));
    }
    let mut pde_residuals = Vec::new();
    for &h in &opts.pde_steps {
        let mut worst = [0.0_f64; 4];
        for (r, sc) in rs.iter().zip(&scales) {
            let terms = pde_terms(&profile, &sys, k, t, *r, h)?;
            for e in 0..4 {
                let sum: f64 = terms[e].iter().sum();
                worst[e] = worst[e].max(sum.abs() / sc[e]);
            }
        }
        pde_residuals.push(worst);
    }
    let mut pde_orders = [f64::NAN; 4];
    let m = opts.pde_steps.len();
    if m >= 2 {
        let ratio = (opts.pde_steps[m - 2] / opts.pde_steps[m - 1]).ln();
        for (e, o) in pde_orders.iter_mut().enumerate() {
            *o = (pde_residuals[m - 2][e] / pde_residuals[m - 1][e]).ln() / ratio;
        }
    }

    Ok(ResidualReport {
        ode_points: opts.points,
        ode_skipped,
        ode_max,
        ode_worst_x,
        pde_steps: opts.pde_steps.clone(),
        pde_residuals,
        pde_orders,
    })
}
