//! Local analysis at the interface point P2 and the start of the trajectory.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, StepControl, Stepper};
use crate::phaseplane::{nullcline_f, nullcline_g, v_pm, System};

use super::flow::{ln_r_adiabatic, ArcField, State, IC, IV, IY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayClass {
    Isolated,
    Nodal,
    /// On the boundary between the two cases.
    Undetermined,
}

/// Integral half-rays of the quadratic truncation at P2 in the `(W, Z)`
/// plane, with the exponents along the vertical ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayAnalysisP2 {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub class1: RayClass,
    pub class2: RayClass,
    pub class3: RayClass,
    /// Exponent of `W` in `Z` along the vertical ray.
    pub a: f64,
    /// Exponent of the pressure along the vertical ray; identically zero.
    pub b: f64,
    /// Magnitude of the terms cancelling in `b`, for judging roundoff.
    pub b_scale: f64,
}

fn class_by_sign(margin: f64) -> RayClass {
    if margin > 0.0 {
        RayClass::Isolated
    } else if margin < 0.0 {
        RayClass::Nodal
    } else {
        RayClass::Undetermined
    }
}

pub fn analyze_p2_rays(sys: &System) -> RayAnalysisP2 {
    let k = &sys.k;
    let (n, g) = (sys.n(), sys.gamma());
    RayAnalysisP2 {
        phi1: 0.0,
        phi2: FRAC_PI_2,
        phi3: k.sigma.atan(),
        class1: RayClass::Isolated,
        class2: class_by_sign(sys.kappa() - k.kappa_bar),
        class3: class_by_sign(n * (g - 1.0) / 2.0 - k.mu),
        a: k.a_vert,
        b: k.b_vert,
        b_scale: k.b_vert_scale(g),
    }
}

/// `dy/dW` at P2 along the slope-`sigma` ray, `-lambda` times the limit of
/// `D/G`.
pub fn y_slope(sys: &System) -> f64 {
    let k = &sys.k;
    sys.lambda() * k.sigma / (k.mu - sys.n() * k.w_star * k.sigma)
}

/// Limit of `D/G` at P2 along the slope-`sigma` ray.
pub fn k_limit(sys: &System) -> f64 {
    let k = &sys.k;
    -k.sigma / (k.mu - sys.n() * k.w_star * k.sigma)
}

/// Exponent `h'(sigma)` governing how a slope deviation `Z/W - sigma`
/// evolves, `delta ~ W^p`, for the truncated equation `W ds/dW = h(s)`.
pub fn deviation_exponent(sys: &System) -> f64 {
    let k = &sys.k;
    let nw = sys.n() * k.w_star;
    let s = k.sigma;
    (4.0 * k.alpha * s - 2.0 * k.k3 + nw * s) / (k.mu - nw * s) - 1.0
}

/// First-order point `W = eps`, `Z = sigma eps` with its `y` and `ln R`.
pub fn first_order_state(sys: &System, eps: f64) -> State {
    let v = eps - 1.0;
    let c = (sys.k.sigma * eps).sqrt();
    let y = y_slope(sys) * eps;
    [v, c, y, ln_r_adiabatic(sys, y, v, c)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P2Start {
    pub eps: f64,
    pub state: State,
    /// `Z` of the first-order point before refinement.
    pub z_first_order: f64,
    pub exponent: f64,
    pub refined: bool,
}

fn in_strip(sys: &System, v: f64, c: f64) -> bool {
    let v6 = v_pm(sys).v_minus.unwrap_or(f64::NAN);
    let (Ok(cf), Ok(cg)) = (nullcline_f(v, sys), nullcline_g(v, sys)) else {
        return false;
    };
    v > -1.0 && v < v6 && c > cg && c < cf
}

/// Start point on the unique trajectory leaving P2 along the slope-`sigma`
/// ray, in the gauge `x0 = -1`.
///
/// With `richardson`, the first-order point at `eps/2` is carried to
/// `W = eps` and combined with the first-order point there, cancelling the
/// leading `O(eps^2)` error in `Z`.
pub fn start_at_p2(
    sys: &System,
    eps: f64,
    stepper: &dyn Stepper<4>,
    ctl: &StepControl,
    richardson: bool,
) -> Result<P2Start> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("P2 offset eps = {eps}")));
    }
    let first = first_order_state(sys, eps);
    if !in_strip(sys, first[IV], first[IC]) {
        return Err(Error::StartOutsideStrip(eps));
    }
    let p = deviation_exponent(sys);
    let z_first = first[IC] * first[IC];
    if !richardson {
        return Ok(P2Start {
            eps,
            state: first,
            z_first_order: z_first,
            exponent: p,
            refined: false,
        });
    }

    let half = first_order_state(sys, eps / 2.0);
    let field = ArcField::new(sys, -1.0);
    let rhs = |_s: f64, u: &State| field.rhs_by(u, IV);
    let local = StepControl {
        h_init: eps / 8.0,
        ..*ctl
    };
    let run = integrate(stepper, &rhs, half[IV], half, first[IV], &local, &[])?;
    let carried = run.last().y;
    let z_half = carried[IC] * carried[IC];
    let f = 2f64.powf(p - 1.0);
    let z = (z_half - f * z_first) / (1.0 - f);
    let c = z.sqrt();
    let y = carried[IY];
    let state = [first[IV], c, y, ln_r_adiabatic(sys, y, first[IV], c)];
    if !in_strip(sys, state[IV], state[IC]) {
        return Err(Error::StartOutsideStrip(eps));
    }
    Ok(P2Start {
        eps,
        state,
        z_first_order: z_first,
        exponent: p,
        refined: true,
    })
}
