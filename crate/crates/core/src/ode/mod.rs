//! Adaptive explicit integrators behind a name-keyed registry.
//!
//! Every integrator implements [`Stepper`]: one trial step returning the
//! propagated solution and a local error estimate. The [`driver`] wraps any
//! stepper with step-size control and event location, so the trajectory
//! code never depends on a concrete scheme.

pub mod driver;
pub mod tableau;

use std::fmt;

use crate::error::{Error, Result};

pub use driver::{integrate, Event, Run, Sample, StepControl, Stop};
pub use tableau::Tableau;

/// Right-hand side `dy/ds = f(s, y)`.
pub type Rhs<'a, const N: usize> = dyn Fn(f64, &[f64; N]) -> [f64; N] + 'a;

/// Result of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial<const N: usize> {
    pub y: [f64; N],
    pub err: [f64; N],
}

pub trait Stepper<const N: usize>: Send + Sync {
    fn name(&self) -> &str;

    /// Order of the propagated solution.
    fn order(&self) -> u32;

    /// Order governing the error estimate; the controller scales steps by
    /// `err^(-1/(order_err + 1))`.
    fn order_err(&self) -> u32;

    fn step(&self, rhs: &Rhs<'_, N>, s: f64, y: &[f64; N], h: f64) -> Trial<N>;
}

impl<const N: usize> fmt::Debug for dyn Stepper<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stepper({})", self.name())
    }
}

/// Embedded explicit Runge–Kutta pair driven by a Butcher tableau.
pub struct ExplicitPair {
    name: &'static str,
    tableau: &'static Tableau,
}

impl ExplicitPair {
    pub const fn new(name: &'static str, tableau: &'static Tableau) -> Self {
        ExplicitPair { name, tableau }
    }
}

impl<const N: usize> Stepper<N> for ExplicitPair {
    fn name(&self) -> &str {
        self.name
    }

    fn order(&self) -> u32 {
        self.tableau.order
    }

    fn order_err(&self) -> u32 {
        self.tableau.order_low
    }

    fn step(&self, rhs: &Rhs<'_, N>, s: f64, y: &[f64; N], h: f64) -> Trial<N> {
        let t = self.tableau;
        let stages = t.stages();
        let mut k: Vec<[f64; N]> = Vec::with_capacity(stages);
        for i in 0..stages {
            let mut yi = *y;
            for (j, aij) in t.a[i].iter().enumerate() {
                if *aij != 0.0 {
                    for (v, kj) in yi.iter_mut().zip(&k[j]) {
                        *v += h * aij * kj;
                    }
                }
            }
            k.push(rhs(s + t.c[i] * h, &yi));
        }
        let mut out = *y;
        let mut err = [0.0; N];
        for (i, ki) in k.iter().enumerate() {
            let (b, e) = (t.b[i], t.b[i] - t.b_low[i]);
            for c in 0..N {
                out[c] += h * b * ki[c];
                err[c] += h * e * ki[c];
            }
        }
        Trial { y: out, err }
    }
}

/// Classical fourth-order Runge–Kutta with a step-doubling error estimate.
/// The returned solution is the Richardson-corrected two-half-step value.
pub struct StepDoublingRk4;

impl StepDoublingRk4 {
    fn rk4<const N: usize>(rhs: &Rhs<'_, N>, s: f64, y: &[f64; N], h: f64) -> [f64; N] {
        let shift = |base: &[f64; N], k: &[f64; N], f: f64| {
            let mut o = *base;
            for (v, kk) in o.iter_mut().zip(k) {
                *v += f * kk;
            }
            o
        };
        let k1 = rhs(s, y);
        let k2 = rhs(s + h / 2.0, &shift(y, &k1, h / 2.0));
        let k3 = rhs(s + h / 2.0, &shift(y, &k2, h / 2.0));
        let k4 = rhs(s + h, &shift(y, &k3, h));
        let mut o = *y;
        for c in 0..N {
            o[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        o
    }
}

impl<const N: usize> Stepper<N> for StepDoublingRk4 {
    fn name(&self) -> &str {
        "rk4-doubling"
    }

    fn order(&self) -> u32 {
        5
    }

    fn order_err(&self) -> u32 {
        4
    }

    fn step(&self, rhs: &Rhs<'_, N>, s: f64, y: &[f64; N], h: f64) -> Trial<N> {
        let full = Self::rk4(rhs, s, y, h);
        let mid = Self::rk4(rhs, s, y, h / 2.0);
        let half = Self::rk4(rhs, s + h / 2.0, &mid, h / 2.0);
        let mut out = half;
        let mut err = [0.0; N];
        for c in 0..N {
            let d = (half[c] - full[c]) / 15.0;
            out[c] += d;
            err[c] = d;
        }
        Trial { y: out, err }
    }
}

/// Name-keyed collection of steppers.
pub struct Registry<const N: usize> {
    entries: Vec<Box<dyn Stepper<N>>>,
}

impl<const N: usize> Default for Registry<N> {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl<const N: usize> Registry<N> {
    pub const DEFAULT: &'static str = "dopri5";

    pub fn empty() -> Self {
        Registry {
            entries: Vec::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ExplicitPair::new("dopri5", &tableau::DOPRI5)));
        r.register(Box::new(ExplicitPair::new("cash-karp", &tableau::CASH_KARP)));
        r.register(Box::new(ExplicitPair::new("rkf45", &tableau::RKF45)));
        r.register(Box::new(ExplicitPair::new("bs23", &tableau::BS23)));
        r.register(Box::new(StepDoublingRk4));
        r
    }

    /// Adds a stepper, replacing any existing entry with the same name.
    pub fn register(&mut self, stepper: Box<dyn Stepper<N>>) {
        if let Some(slot) = self.entries.iter_mut().find(|e| e.name() == stepper.name()) {
            *slot = stepper;
        } else {
            self.entries.push(stepper);
        }
    }

    pub fn get(&self, name: &str) -> Result<&dyn Stepper<N>> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name()).collect()
    }
}

/// Names of the built-in steppers, in registration order.
pub fn builtin_names() -> Vec<String> {
    Registry::<1>::with_builtins()
        .names()
        .into_iter()
        .map(String::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_s: f64, y: &[f64; 1]) -> [f64; 1] {
        [-y[0]]
    }

    fn fixed_step_error(st: &dyn Stepper<1>, h: f64) -> f64 {
        let mut y = [1.0];
        let steps = (1.0 / h).round() as usize;
        for i in 0..steps {
            y = st.step(&decay, i as f64 * h, &y, h).y;
        }
        (y[0] - (-1.0f64).exp()).abs()
    }

    #[test]
    fn observed_orders() {
        let reg = Registry::<1>::with_builtins();
        for name in reg.names() {
            let st = reg.get(name).unwrap();
            let e1 = fixed_step_error(st, 0.1);
            let e2 = fixed_step_error(st, 0.05);
            let p = (e1 / e2).log2();
            assert!(
                (p - st.order() as f64).abs() < 0.35,
                "{name}: observed {p}, nominal {}",
                st.order()
            );
        }
    }

    #[test]
    fn error_estimate_tracks_true_local_error() {
        let reg = Registry::<1>::with_builtins();
        for name in reg.names() {
            let st = reg.get(name).unwrap();
            let t = st.step(&decay, 0.0, &[1.0], 0.1);
            let local = (t.y[0] - (-0.1f64).exp()).abs();
            assert!(t.err[0].abs() > local, "{name}");
        }
    }

    #[test]
    fn unknown_method_is_reported() {
        let reg = Registry::<1>::with_builtins();
        assert!(matches!(reg.get("euler"), Err(Error::UnknownMethod(m)) if m == "euler"));
    }

    #[test]
    fn register_replaces_by_name() {
        let mut reg = Registry::<1>::with_builtins();
        let before = reg.names().len();
        reg.register(Box::new(ExplicitPair::new("bs23", &tableau::DOPRI5)));
        assert_eq!(reg.names().len(), before);
        assert_eq!(reg.get("bs23").unwrap().order(), 5);
    }
}
