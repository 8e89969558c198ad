//! Local integrability of mass, momentum and energy at collapse.
//!
//! At `t = 0` the profiles are pure powers of `r`: `rho = R0 r^kappa` with
//! `R0 = (K/omega^2)^(1/(1-gamma+q))`, `u = -(nu/lambda) r^(1-lambda)` and
//! `c = -(omega/lambda) r^(1-lambda)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::GammaResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub name: String,
    /// Power of `r` in the integrand.
    pub exponent: f64,
    pub deltas: Vec<f64>,
    /// Quadrature over `(delta, r_bar]` for each `delta`.
    pub partial: Vec<f64>,
    /// Aitken extrapolation of `partial` to `delta -> 0`.
    pub extrapolated: f64,
    /// Closed-form value over `(0, r_bar]`.
    pub closed_form: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub r_bar: f64,
    pub r0: f64,
    /// `kappa + n > 0`, `lambda < 1 + kappa + n`, `lambda < 1 + (kappa+n)/2`.
    pub exponent_conditions: [bool; 3],
    pub integrals: Vec<IntegralReport>,
}

impl IntegrabilityReport {
    pub fn worst_rel_error(&self) -> f64 {
        self.integrals.iter().map(|i| i.rel_error).fold(0.0, f64::max)
    }
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss–Legendre on geometric panels, 20 per decade.
fn quad_log(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let decades = (b / a).log10();
    let panels = ((decades * 20.0).ceil() as usize).max(1);
    let ratio = (b / a).powf(1.0 / panels as f64);
    let mut sum = 0.0;
    let mut lo = a;
    for _ in 0..panels {
        let hi = lo * ratio;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * half * (f(mid - half * x) + f(mid + half * x));
        }
        lo = hi;
    }
    sum
}

fn aitken(s: &[f64]) -> Option<f64> {
    let (a, b, c) = (s[s.len() - 3], s[s.len() - 2], s[s.len() - 1]);
    let den = (c - b) - (b - a);
    if den == 0.0 {
        return if c == b { Some(c) } else { None };
    }
    Some(c - (c - b) * (c - b) / den)
}

pub fn integrability_check(gamma: &GammaResult, adiabatic_constant: f64, r_bar: f64) -> Result<IntegrabilityReport> {
    let sys = gamma.system();
    let (n, g, lam, kap, q) = (sys.n(), sys.gamma(), sys.lambda(), sys.kappa(), sys.k.q);
    let (nu, om) = (gamma.nu, gamma.omega);
    let r0 = (adiabatic_constant / (om * om)).powf(1.0 / (1.0 - g + q));
    let m = n - 1.0;

    let mass = (r0, kap + m);
    let momentum = (r0 * nu.abs() / lam, kap + 1.0 - lam + m);
    let energy_coeff = r0 * (om * om / (lam * lam * g * (g - 1.0)) + nu * nu / (2.0 * lam * lam));
    let energy = (energy_coeff, kap + 2.0 * (1.0 - lam) + m);

    let deltas = vec![1e-3 * r_bar, 1e-4 * r_bar, 1e-5 * r_bar];
    let mut integrals = Vec::new();
    for (name, (a, beta)) in [("mass", mass), ("momentum", momentum), ("energy", energy)] {
        if !(beta > -1.0) {
            return Err(Error::DivergentIntegral(format!("{name}: integrand ~ r^{beta}")));
        }
        let f = |r: f64| a * r.powf(beta);
        let partial: Vec<f64> = deltas.iter().map(|&d| quad_log(f, d, r_bar)).collect();
        let extrapolated = aitken(&partial)
            .ok_or_else(|| Error::DivergentIntegral(format!("{name}: extrapolation failed")))?;
        let closed_form = a * r_bar.powf(beta + 1.0) / (beta + 1.0);
        integrals.push(IntegralReport {
            name: name.to_string(),
            exponent: beta,
            deltas: deltas.clone(),
            partial,
            extrapolated,
            closed_form,
            rel_error: ((extrapolated - closed_form) / closed_form).abs(),
        });
    }
    Ok(IntegrabilityReport {
        r_bar,
        r0,
        exponent_conditions: [kap + n > 0.0, lam < 1.0 + kap + n, lam < 1.0 + (kap + n) / 2.0],
        integrals,
    })
}
