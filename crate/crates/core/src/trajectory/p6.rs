//! Passage through the sonic node P6.
//!
//! The trajectory reaches P6 tangent to the primary slope `L1`. The short
//! stretch between the arrival sample, P6 and the departure point is bridged
//! with the linearization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phaseplane::{
    classify, critical_points, Classification, CriticalPointId, Partials, PhasePoint, System,
};

use super::flow::{State, IC, ILNR, IV, IY};

/// Arrival slope tolerance, radians.
pub const ARRIVAL_ANGLE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P6Data {
    pub point: PhasePoint,
    pub partials: Partials,
    pub l1: f64,
    pub l2: f64,
    /// Slope of `{F = 0}` at P6.
    pub f_slope: f64,
    /// Slope of `{G = 0}` at P6.
    pub g_slope: f64,
}

pub fn p6_data(sys: &System) -> Result<P6Data> {
    let cp = critical_points(sys)
        .into_iter()
        .find(|c| c.id == CriticalPointId::P6)
        .expect("P6 is always listed");
    if !cp.present {
        return Err(Error::AbsentPoint("P6".into()));
    }
    let cp = classify(&cp, sys)?;
    if cp.class != Classification::Node {
        return Err(Error::DegenerateLinearization(format!("P6 is a {}", cp.class)));
    }
    let p = cp.partials.expect("classified node has partials");
    Ok(P6Data {
        point: cp.location,
        partials: p,
        l1: cp.l1.expect("node has slopes"),
        l2: cp.l2.expect("node has slopes"),
        f_slope: -p.f_v / p.f_c,
        g_slope: -p.g_v / p.g_c,
    })
}

/// Angle between two line directions, folded into `[0, pi/2]`.
fn line_angle(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// `D/G` along the ray of slope `slope` out of P6.
fn d_over_g(p6: &P6Data, slope: f64) -> f64 {
    let c6 = p6.point.c;
    2.0 * c6 * (1.0 - slope) / (p6.partials.g_v + p6.partials.g_c * slope)
}

/// Changes of `y` and `ln R` between P6 and the phase point P6 + `(dv, dc)`
/// under the linearized flow. The offset is split along the eigenslopes
/// `L1` and `L2`; on each eigenray `D/G` is constant, so both changes are
/// exact to first order whatever the direction of approach.
fn linear_potential(sys: &System, p6: &P6Data, dv: f64, dc: f64) -> (f64, f64) {
    let a1 = (dc - p6.l2 * dv) / (p6.l1 - p6.l2);
    let a2 = dv - a1;
    let (v6, w6) = (p6.point.v, 1.0 + p6.point.v);
    let (mut y, mut ln_r) = (0.0, 0.0);
    for (a, l) in [(a1, p6.l1), (a2, p6.l2)] {
        let dg = d_over_g(p6, l);
        y -= sys.lambda() * dg * a;
        ln_r += (-(sys.kappa() + sys.n()) * v6 * dg - 1.0) / w6 * a;
    }
    (y, ln_r)
}

/// Carries `y` and `ln R` from the state `from` to the phase point `to`,
/// both close to P6, through the linearization.
fn bridge(sys: &System, p6: &P6Data, from: &State, to: PhasePoint) -> State {
    let (y0, r0) = linear_potential(sys, p6, from[IV] - p6.point.v, from[IC] - p6.point.c);
    let (y1, r1) = linear_potential(sys, p6, to.v - p6.point.v, to.c - p6.point.c);
    [to.v, to.c, from[IY] + y1 - y0, from[ILNR] + r1 - r0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Angle between the arrival chord and `L1`.
    pub arrival_angle: f64,
    pub at_p6: State,
    pub departure: State,
    /// Fraction of the wedge between `L1` and `{F = 0}` by which the
    /// departure direction is turned away from `L1`.
    pub rotation: f64,
    pub departure_slope: f64,
}

/// Checks the arrival slope, fills in the state at P6 and returns the
/// departure point on the subsonic side at distance `eps6`.
pub fn cross_p6(
    sys: &System,
    p6: &P6Data,
    arrival: &State,
    eps6: f64,
    rotation: f64,
) -> Result<Crossing> {
    let (dv, dc) = (arrival[IV] - p6.point.v, arrival[IC] - p6.point.c);
    let chord = dc.atan2(dv);
    let angle = line_angle(chord, p6.l1.atan());
    if !(angle <= ARRIVAL_ANGLE_TOL) {
        return Err(Error::WrongArrivalSlope { angle });
    }
    let at_p6 = bridge(sys, p6, arrival, p6.point);

    let theta = p6.l1.atan() + rotation * (p6.f_slope.atan() - p6.l1.atan());
    let to = PhasePoint::new(
        p6.point.v + eps6 * theta.cos(),
        p6.point.c + eps6 * theta.sin(),
    );
    if !(sys.d(to.v, to.c) > 0.0) {
        return Err(Error::DomainExit(format!(
            "departure point ({}, {}) is not below the sonic line",
            to.v, to.c
        )));
    }
    let slope = theta.tan();
    let departure = bridge(sys, p6, &at_p6, to);
    Ok(Crossing {
        arrival_angle: angle,
        at_p6,
        departure,
        rotation,
        departure_slope: slope,
    })
}
