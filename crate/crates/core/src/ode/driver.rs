//! Adaptive step-size control with terminal events.

use crate::error::{Error, Result};

use super::{Rhs, Stepper};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Steps shorter than this abort the run.
    pub h_min: f64,
    pub max_steps: usize,
    /// Width, in the independent variable, to which event roots are bisected.
    pub event_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-4,
            h_max: 0.05,
            h_min: 1e-15,
            max_steps: 2_000_000,
            event_tol: 1e-12,
        }
    }
}

impl StepControl {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        StepControl {
            rtol,
            atol,
            ..Self::default()
        }
    }
}

/// A terminal event, triggered when `f` changes sign across an accepted step.
pub struct Event<'a, const N: usize> {
    pub name: &'static str,
    pub f: Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn new(name: &'static str, f: impl Fn(f64, &[f64; N]) -> f64 + 'a) -> Self {
        Event {
            name,
            f: Box::new(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const N: usize> {
    pub s: f64,
    pub y: [f64; N],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// Index and name of the event that fired first.
    Event(usize, &'static str),
    /// Reached the requested end of the interval.
    End,
}

#[derive(Debug, Clone)]
pub struct Run<const N: usize> {
    pub samples: Vec<Sample<N>>,
    pub stop: Stop,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize> Run<N> {
    pub fn last(&self) -> &Sample<N> {
        self.samples.last().expect("a run always holds its start sample")
    }
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], ctl: &StepControl) -> f64 {
    let mut m = 0.0_f64;
    for c in 0..N {
        let sc = ctl.atol + ctl.rtol * y0[c].abs().max(y1[c].abs());
        let r = err[c].abs() / sc;
        if !r.is_finite() {
            return f64::INFINITY;
        }
        m = m.max(r);
    }
    m
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates from `s0` towards `s_end` (either direction), stopping at the
/// first event sign change. Event roots are located by bisecting the step
/// fraction and re-stepping from the step start, so the terminal sample lies
/// just past the root, within `event_tol`.
pub fn integrate<const N: usize>(
    stepper: &dyn Stepper<N>,
    rhs: &Rhs<'_, N>,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    ctl: &StepControl,
    events: &[Event<'_, N>],
) -> Result<Run<N>> {
    let dir = if s_end >= s0 { 1.0 } else { -1.0 };
    let exponent = -1.0 / (stepper.order_err() as f64 + 1.0);
    let mut run = Run {
        samples: vec![Sample { s: s0, y: y0 }],
        stop: Stop::End,
        accepted: 0,
        rejected: 0,
    };
    let (mut s, mut y) = (s0, y0);
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.f)(s, &y)).collect();
    let mut h = ctl.h_init.min(ctl.h_max).min((s_end - s0).abs()) * dir;
    if h == 0.0 {
        return Ok(run);
    }

    while run.accepted + run.rejected < ctl.max_steps {
        let remaining = s_end - s;
        let last = h.abs() >= remaining.abs();
        if last {
            h = remaining;
        }
        let trial = stepper.step(rhs, s, &y, h);
        let en = if finite(&trial.y) {
            error_norm(&trial.err, &y, &trial.y, ctl)
        } else {
            f64::INFINITY
        };
        if en > 1.0 {
            run.rejected += 1;
            let fac = if en.is_finite() {
                (0.9 * en.powf(exponent)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h *= fac;
            if h.abs() < ctl.h_min {
                return Err(Error::StepUnderflow { s, h: h.abs() });
            }
            continue;
        }

        // accepted; look for the earliest event in (s, s + h]
        let s_new = if last { s_end } else { s + h };
        let g_new: Vec<f64> = events.iter().map(|e| (e.f)(s_new, &trial.y)).collect();
        let mut hit: Option<(usize, f64, [f64; N])> = None;
        for (i, e) in events.iter().enumerate() {
            let (g0, g1) = (g_prev[i], g_new[i]);
            if g0 == 0.0 || !g0.is_finite() || !(g0 * g1 <= 0.0 || g1.is_nan()) {
                continue;
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            let mut y_hi = trial.y;
            while (hi - lo) * h.abs() > ctl.event_tol {
                let mid = 0.5 * (lo + hi);
                let ym = stepper.step(rhs, s, &y, mid * h).y;
                let gm = (e.f)(s + mid * h, &ym);
                if gm * g0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    y_hi = ym;
                }
                if hi - lo < 1e-16 {
                    break;
                }
            }
            if hit.is_none_or(|(_, th, _)| hi < th) {
                hit = Some((i, hi, y_hi));
            }
        }
        run.accepted += 1;
        if let Some((i, th, yh)) = hit {
            run.samples.push(Sample { s: s + th * h, y: yh });
            run.stop = Stop::Event(i, events[i].name);
            return Ok(run);
        }
        s = s_new;
        y = trial.y;
        g_prev = g_new;
        run.samples.push(Sample { s, y });
        if last {
            run.stop = Stop::End;
            return Ok(run);
        }
        let fac = if en == 0.0 {
            5.0
        } else {
            (0.9 * en.powf(exponent)).clamp(0.2, 5.0)
        };
        h = (h * fac).clamp(-ctl.h_max, ctl.h_max);
    }
    Err(Error::StepUnderflow { s, h: h.abs() })
}
