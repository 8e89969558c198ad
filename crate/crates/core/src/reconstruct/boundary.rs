//! Power-law behaviour of the flow at the fluid–vacuum interface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Stepper;
use crate::phaseplane::System;
use crate::trajectory::{ArcField, GammaResult, Profile, IC, ILNR, IY};

use super::{fit_line, log_space};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub fitted: f64,
    pub predicted: f64,
    pub rel_error: f64,
    pub r_squared: f64,
}

impl ExponentFit {
    fn new(x: &[f64], y: &[f64], predicted: f64) -> Self {
        let f = fit_line(x, y);
        ExponentFit {
            fitted: f.slope,
            predicted,
            rel_error: ((f.slope - predicted) / predicted).abs(),
            r_squared: f.r_squared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub window: (f64, f64),
    pub samples: usize,
    /// Exponents of `W` at fixed `t`.
    pub pressure: ExponentFit,
    pub density: ExponentFit,
    /// Exponent of `exp(S/c_v) = p rho^-gamma`.
    pub entropy: ExponentFit,
    /// `(1/rho) dp/dr` at the innermost sample; the outward-normal
    /// acceleration of the interface towards the vacuum.
    pub acceleration: f64,
    /// Fitted power of `W` in the acceleration; zero for a finite,
    /// non-vanishing limit.
    pub acceleration_slope: f64,
}

/// Predicted interface exponents `(p, rho, exp(S/c_v))` in powers of `W`.
pub fn predicted_exponents(sys: &System) -> (f64, f64, f64) {
    let (g, q) = (sys.gamma(), sys.k.q);
    let den = g - 1.0 - q;
    (g / den, (q + 1.0) / den, -g * q / den)
}

/// Fits `p`, `rho` and `p rho^-gamma` against `W` at `t = -1` over
/// `count` log-spaced values of `W` in `window`, with `R` carried by the
/// mass equation.
pub fn boundary_exponents(
    gamma: &GammaResult,
    stepper: &dyn Stepper<4>,
    window: (f64, f64),
    count: usize,
) -> Result<BoundaryReport> {
    let sys = gamma.system();
    let w_start = gamma.samples[1].w();
    if window.0 < w_start * (1.0 - 1e-9) || window.1 <= window.0 || count < 3 {
        return Err(Error::FitWindowUnresolved(format!(
            "window [{:e}, {:e}] with {count} points, trajectory starts at W = {w_start:e}",
            window.0, window.1
        )));
    }
    let profile = Profile::new(gamma, stepper);
    let field = ArcField::new(&sys, -1.0);
    let (lam, kap, g) = (sys.lambda(), sys.kappa(), sys.gamma());

    let ws = log_space(window.0, window.1, count);
    let (mut lw, mut lp, mut lrho, mut ls, mut la) = (vec![], vec![], vec![], vec![], vec![]);
    let mut innermost = f64::NAN;
    for (i, &w) in ws.iter().enumerate() {
        let u = profile.at_w(w)?;
        let x = Profile::x_of(&u);
        let r = (-1.0 / x).powf(1.0 / lam);
        let rho = r.powf(kap) * u[ILNR].exp();
        let c = -r.powf(1.0 - lam) / (lam * x) * u[IC];
        let p = rho * c * c / g;

        let d = field.rhs_by(&u, IY);
        let dlnp_dr = ((kap + 2.0 - 2.0 * lam) - lam * (d[ILNR] + 2.0 * d[IC] / u[IC] - 2.0)) / r;
        let acc = c * c / g * dlnp_dr;
        if i == 0 {
            innermost = acc;
        }
        lw.push(w.ln());
        lp.push(p.ln());
        lrho.push(rho.ln());
        ls.push(p.ln() - g * rho.ln());
        la.push(acc.abs().ln());
    }
    let (pp, pr, ps) = predicted_exponents(&sys);
    Ok(BoundaryReport {
        window,
        samples: count,
        pressure: ExponentFit::new(&lw, &lp, pp),
        density: ExponentFit::new(&lw, &lrho, pr),
        entropy: ExponentFit::new(&lw, &ls, ps),
        acceleration: innermost,
        acceleration_slope: fit_line(&lw, &la).slope,
    })
}
