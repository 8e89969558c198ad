//! Construction of the trajectory from the interface point P2 through the
//! sonic node P6 to the collapse point P1.

mod flow;
mod p2;
mod p6;
mod profile;

pub use flow::{ln_r_adiabatic, ArcField, State, IC, ILNR, IV, IY};
pub use p2::{
    analyze_p2_rays, deviation_exponent, first_order_state, k_limit, start_at_p2, y_slope,
    P2Start, RayAnalysisP2, RayClass,
};
pub use p6::{cross_p6, p6_data, Crossing, P6Data, ARRIVAL_ANGLE_TOL};
pub use profile::Profile;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, Event, Registry, StepControl, Stepper, Stop};
use crate::params::Params;
use crate::phaseplane::{nullcline_f, nullcline_g, nullcline_g_sq, PhasePoint, System};

/// Slack allowed when testing the nullcline bounds along the trajectory.
pub const TRAP_TOL: f64 = 1e-8;

/// Departure rotations tried, in order, when a departure from P6 fails to
/// reach P1.
pub const FAN: [f64; 6] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    P2toP6,
    P6toP1,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub x: f64,
    /// `log|x|`.
    pub y: f64,
    pub v: f64,
    pub c: f64,
    /// `ln R` carried by the mass equation; `-inf` at the interface.
    pub ln_r: f64,
    pub segment: Segment,
}

impl TrajectorySample {
    fn from_state(u: &State, segment: Segment) -> Self {
        TrajectorySample {
            x: recover_x(u[IY]),
            y: u[IY],
            v: u[IV],
            c: u[IC],
            ln_r: u[ILNR],
            segment,
        }
    }

    pub fn state(&self) -> State {
        [self.v, self.c, self.y, self.ln_r]
    }

    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.v, self.c)
    }

    pub fn w(&self) -> f64 {
        1.0 + self.v
    }

    pub fn z(&self) -> f64 {
        self.c * self.c
    }
}

/// Maps `y = log|x|` to `x` in the gauge `x0 = -1`.
pub fn recover_x(y: f64) -> f64 {
    -y.exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaOptions {
    pub tol_rel: f64,
    pub tol_abs: f64,
    /// Offset `W = eps` of the start from P2.
    pub eps_p2: f64,
    /// Arrival radius at P6.
    pub delta_p6: f64,
    /// Departure distance from P6.
    pub eps_p6: f64,
    /// Termination radius at P1.
    pub delta_p1: f64,
    /// Departure direction, as the fraction of the wedge between `L1` and
    /// `{F = 0}` by which it is turned away from `L1`.
    pub rotation: f64,
    /// Follow the trajectory if it crosses `{G = 0}` before `{F = 0}`.
    pub alternate_route: bool,
    pub richardson: bool,
    pub method: String,
    pub require_conditions: bool,
    /// Arclength budget per integration leg.
    pub max_arclength: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        GammaOptions {
            tol_rel: 1e-10,
            tol_abs: 1e-12,
            eps_p2: 1e-6,
            delta_p6: 1e-5,
            eps_p6: 1e-5,
            delta_p1: 1e-6,
            rotation: FAN[0],
            alternate_route: false,
            richardson: true,
            method: Registry::<4>::DEFAULT.to_string(),
            require_conditions: true,
            max_arclength: 50.0,
        }
    }
}

impl GammaOptions {
    pub fn step_control(&self) -> StepControl {
        StepControl {
            h_max: 0.01,
            ..StepControl::with_tolerances(self.tol_rel, self.tol_abs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub name: String,
    pub x: f64,
    pub v: f64,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EventRecord {
    fn at(name: &str, u: &State) -> Self {
        EventRecord {
            name: name.to_string(),
            x: recover_x(u[IY]),
            v: u[IV],
            c: u[IC],
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// The rectangle `(V0, V^) x (0, C0)` spanned by the crossing `P0` of
/// `{F = 0}` and the point of `{G = 0}` at the same height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapBox {
    pub v0: f64,
    pub c0: f64,
    pub v_hat: f64,
}

impl TrapBox {
    pub fn new(sys: &System, p0: PhasePoint) -> Self {
        let target = p0.c * p0.c;
        let f = |v: f64| nullcline_g_sq(v, sys) - target;
        let mut hi = 1.0;
        while f(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        TrapBox {
            v0: p0.v,
            c0: p0.c,
            v_hat: 0.5 * (lo + hi),
        }
    }

    pub fn contains(&self, v: f64, c: f64) -> bool {
        v > self.v0 && v < self.v_hat && c > 0.0 && c < self.c0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaResult {
    pub params: Params,
    pub samples: Vec<TrajectorySample>,
    pub x0: f64,
    pub x6: f64,
    pub nu: f64,
    pub omega: f64,
    /// `omega / nu`; absent for a vertical approach to P1.
    pub ell: Option<f64>,
    pub p6: PhasePoint,
    pub p0: PhasePoint,
    pub t2: TrapBox,
    pub start: P2Start,
    pub crossing: Crossing,
    pub alternate_route: bool,
    /// Sample indices of the arrival at, the passage through and the
    /// departure from P6, and of P0.
    pub i_arrival: usize,
    pub i_p6: usize,
    pub i_departure: usize,
    pub i_p0: usize,
    pub events: Vec<EventRecord>,
    pub options: GammaOptions,
}

impl GammaResult {
    pub fn system(&self) -> System {
        System::new(self.params).expect("parameters were validated on construction")
    }

    pub fn segment(&self, seg: Segment) -> impl Iterator<Item = &TrajectorySample> {
        self.samples.iter().filter(move |s| s.segment == seg)
    }

    /// Samples strictly after P0.
    pub fn after_p0(&self) -> &[TrajectorySample] {
        &self.samples[self.i_p0 + 1..]
    }
}

/// Builds the trajectory with the stepper named in `opts`.
pub fn build_gamma(params: &Params, opts: &GammaOptions) -> Result<GammaResult> {
    let sys = System::new(*params)?;
    if opts.require_conditions {
        let report = crate::full_report(params)?;
        if !report.all_pass() {
            let ids: Vec<String> = report.failures().iter().map(|c| c.to_string()).collect();
            return Err(Error::ConditionsFailed(ids.join(", ")));
        }
    }
    let registry = Registry::<4>::with_builtins();
    let stepper = registry.get(&opts.method)?;
    build_gamma_with(&sys, stepper, opts)
}

/// Builds the trajectory with an explicit stepper, without checking the
/// admissibility conditions.
pub fn build_gamma_with(
    sys: &System,
    stepper: &dyn Stepper<4>,
    opts: &GammaOptions,
) -> Result<GammaResult> {
    let ctl = opts.step_control();
    let p6 = p6_data(sys)?;
    let mut events = Vec::new();

    let start = start_at_p2(sys, opts.eps_p2, stepper, &ctl, opts.richardson)?;
    events.push(EventRecord::at("start", &start.state).with_note(format!(
        "eps = {:e}, refined = {}",
        start.eps, start.refined
    )));
    let seg1 = integrate_to_p6(sys, stepper, &ctl, &start.state, &p6, opts)?;
    let arrival = *seg1.last().expect("run holds its start");
    events.push(EventRecord::at("arrive_p6", &arrival));

    let mut rotations = vec![opts.rotation];
    rotations.extend(FAN.iter().copied().filter(|r| *r > opts.rotation));
    let mut failure = None;
    for rot in rotations {
        let crossing = cross_p6(sys, &p6, &arrival, opts.eps_p6, rot)?;
        match integrate_to_p1(sys, stepper, &ctl, &crossing.departure, opts) {
            Ok(tail) => {
                events.push(EventRecord::at("p6", &crossing.at_p6).with_note(format!(
                    "arrival angle to L1 = {:e} rad",
                    crossing.arrival_angle
                )));
                events.push(
                    EventRecord::at("depart_p6", &crossing.departure)
                        .with_note(format!("rotation = {rot}")),
                );
                events.extend(tail.events);
                return assemble(sys, stepper, opts, start, seg1, crossing, tail.states, tail.i_p0, tail.alternate, events);
            }
            Err(e) => {
                events.push(
                    EventRecord::at("retry", &crossing.departure)
                        .with_note(format!("rotation {rot} failed: {e}")),
                );
                failure = Some(e);
            }
        }
    }
    Err(Error::DidNotReachP1(
        failure.map_or_else(|| "no departure tried".into(), |e| e.to_string()),
    ))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    sys: &System,
    stepper: &dyn Stepper<4>,
    opts: &GammaOptions,
    start: P2Start,
    seg1: Vec<State>,
    crossing: Crossing,
    seg2: Vec<State>,
    i_p0_tail: usize,
    alternate: bool,
    events: Vec<EventRecord>,
) -> Result<GammaResult> {
    let mut samples = Vec::with_capacity(seg1.len() + seg2.len() + 2);
    samples.push(TrajectorySample {
        x: -1.0,
        y: 0.0,
        v: -1.0,
        c: 0.0,
        ln_r: f64::NEG_INFINITY,
        segment: Segment::P2toP6,
    });
    samples.extend(seg1.iter().map(|u| TrajectorySample::from_state(u, Segment::P2toP6)));
    let i_arrival = samples.len() - 1;
    samples.push(TrajectorySample::from_state(&crossing.at_p6, Segment::P2toP6));
    let i_p6 = samples.len() - 1;
    let i_departure = samples.len();
    samples.extend(seg2.iter().map(|u| TrajectorySample::from_state(u, Segment::P6toP1)));
    let i_p0 = i_departure + i_p0_tail;

    let p0 = samples[i_p0].point();
    let mut gamma = GammaResult {
        params: sys.params,
        x0: -1.0,
        x6: samples[i_p6].x,
        nu: f64::NAN,
        omega: f64::NAN,
        ell: None,
        p6: samples[i_p6].point(),
        p0,
        t2: TrapBox::new(sys, p0),
        start,
        crossing,
        alternate_route: alternate,
        i_arrival,
        i_p6,
        i_departure,
        i_p0,
        samples,
        events,
        options: opts.clone(),
    };

    // collapse limits from the last decade of |x|
    let last = *gamma.samples.last().expect("non-empty");
    let profile = Profile::new(&gamma, stepper);
    let x2 = 10.0 * last.x;
    let u2 = profile.at_x(x2)?;
    let (x1, v1, c1) = (last.x, last.v, last.c);
    let (v2, c2) = (u2[IV], u2[IC]);
    let extrapolate = |r1: f64, r2: f64| (r1 * x2 - r2 * x1) / (x2 - x1);
    gamma.nu = extrapolate(v1 / x1, v2 / x2);
    gamma.omega = extrapolate(c1 / x1, c2 / x2);
    gamma.ell = if gamma.nu.abs() > 1e-12 * gamma.omega.abs() {
        Some(gamma.omega / gamma.nu)
    } else {
        None
    };
    Ok(gamma)
}

fn leg_control(ctl: &StepControl, h_init: f64) -> StepControl {
    StepControl { h_init, ..*ctl }
}

/// Integrates from the P2 start until the trajectory comes within
/// `delta_p6` of P6; any exit from the region between the nullclines is
/// an error.
pub fn integrate_to_p6(
    sys: &System,
    stepper: &dyn Stepper<4>,
    ctl: &StepControl,
    start: &State,
    p6: &P6Data,
    opts: &GammaOptions,
) -> Result<Vec<State>> {
    let field = ArcField::new(sys, -1.0);
    let rhs = |_s: f64, u: &State| field.rhs(u);
    let (v6, c6) = (p6.point.v, p6.point.c);
    let d6 = opts.delta_p6;
    let events = [
        Event::new("p6", move |_s, u: &State| (u[IV] - v6).hypot(u[IC] - c6) - d6),
        Event::new("above {F=0}", |_s, u: &State| {
            nullcline_f(u[IV], sys).map_or(-1.0, |cf| cf + TRAP_TOL - u[IC])
        }),
        Event::new("below {G=0}", |_s, u: &State| {
            nullcline_g(u[IV], sys).map_or(-1.0, |cg| u[IC] - cg + TRAP_TOL)
        }),
        Event::new("past P6", move |_s, u: &State| v6 + d6 - u[IV]),
    ];
    let run = integrate(
        stepper,
        &rhs,
        0.0,
        *start,
        opts.max_arclength,
        &leg_control(ctl, 0.1 * opts.eps_p2),
        &events,
    )?;
    match run.stop {
        Stop::Event(0, _) => Ok(run.samples.iter().map(|s| s.y).collect()),
        Stop::Event(_, name) => Err(Error::DomainExit(format!("{name} before reaching P6"))),
        Stop::End => Err(Error::DomainExit("arclength budget exhausted before P6".into())),
    }
}

struct Tail {
    states: Vec<State>,
    i_p0: usize,
    alternate: bool,
    events: Vec<EventRecord>,
}

/// Integrates from the departure point past P6 until within `delta_p1` of
/// P1, passing `{F = 0}` at P0 on the way.
fn integrate_to_p1(
    sys: &System,
    stepper: &dyn Stepper<4>,
    ctl: &StepControl,
    departure: &State,
    opts: &GammaOptions,
) -> Result<Tail> {
    let field = ArcField::new(sys, 1.0);
    let rhs = |_s: f64, u: &State| field.rhs(u);
    let d1 = opts.delta_p1;
    let ev_p1 = || Event::new("p1", move |_s, u: &State| u[IV].hypot(u[IC]) - d1);
    let ev_sonic = || Event::new("sonic line", |_s, u: &State| sys.d(u[IV], u[IC]));
    let ev_c = || Event::new("C < 0", |_s, u: &State| u[IC]);
    let ev_f = || Event::new("p0", |_s, u: &State| sys.f(u[IV], u[IC]));
    let ev_g = || Event::new("{G=0}", |_s, u: &State| sys.g(u[IV], u[IC]));

    let mut states = vec![*departure];
    let mut events = Vec::new();
    let mut alternate = false;
    let mut i_p0 = None;
    let mut budget = opts.max_arclength;
    let mut h0 = 0.1 * opts.eps_p6;

    loop {
        let here = *states.last().expect("non-empty");
        let mut list = vec![ev_p1(), ev_sonic(), ev_c()];
        if i_p0.is_none() {
            list.push(ev_f());
            if !alternate {
                list.push(ev_g());
            }
        }
        let run = integrate(stepper, &rhs, 0.0, here, budget, &leg_control(ctl, h0), &list)?;
        budget -= run.last().s;
        states.extend(run.samples.iter().skip(1).map(|s| s.y));
        let end = *states.last().expect("non-empty");
        match run.stop {
            Stop::Event(_, "p1") => {
                let Some(i_p0) = i_p0 else {
                    return Err(Error::DomainExit("reached P1 without crossing {F=0}".into()));
                };
                events.push(EventRecord::at("p1", &end));
                return Ok(Tail {
                    states,
                    i_p0,
                    alternate,
                    events,
                });
            }
            Stop::Event(_, "p0") => {
                i_p0 = Some(states.len() - 1);
                events.push(EventRecord::at("p0", &end));
            }
            Stop::Event(_, "{G=0}") => {
                if !opts.alternate_route {
                    return Err(Error::DomainExit("crossed {G=0} before {F=0}".into()));
                }
                alternate = true;
                events.push(EventRecord::at("g_crossing", &end).with_note("alternate route"));
            }
            Stop::Event(_, name) => {
                return Err(Error::DomainExit(format!("{name} after leaving P6")));
            }
            Stop::End => {
                return Err(Error::DidNotReachP1("arclength budget exhausted".into()));
            }
        }
        h0 = ctl.h_init.min(1e-6);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn case1_reaches_p1() {
        let g = build_gamma(&Preset::Case1.params(), &GammaOptions::default()).unwrap();
        assert_eq!(g.x0, -1.0);
        assert!(g.x6 > -1.0 && g.x6 < 0.0);
        assert!((g.x6 + 0.751_914_3).abs() < 1e-5, "{}", g.x6);
        assert!((g.nu - 0.891_51).abs() < 1e-4, "{}", g.nu);
        assert!((g.omega + 0.273_68).abs() < 1e-4, "{}", g.omega);
        assert!(g.samples.windows(2).all(|w| w[1].x > w[0].x));
    }

    #[test]
    fn trap_box_corner_is_on_g_nullcline() {
        let sys = System::new(Preset::Case1.params()).unwrap();
        let b = TrapBox::new(&sys, PhasePoint::new(-0.3, 0.2));
        assert!((nullcline_g(b.v_hat, &sys).unwrap() - 0.2).abs() < 1e-12);
        assert!(b.contains(0.0, 0.1));
        assert!(!b.contains(-0.31, 0.1));
    }
}
