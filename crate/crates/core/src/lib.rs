//! Self-similar cavity-collapse flows of a polytropic gas with a power-law
//! initial entropy profile.
//!
//! The crate covers the parameter checks, the `(V, C)` phase plane of the
//! reduced similarity system, construction of the collapse trajectory from
//! the gas–vacuum interface through the sonic node to the origin, and the
//! reconstruction of the physical fields from it.

pub mod conditions;
pub mod error;
pub mod ode;
pub mod output;
pub mod params;
pub mod phaseplane;
pub mod reconstruct;
pub mod trajectory;

pub use error::{Error, Result};
pub use params::{derive, DerivedConstants, Params, Preset};
pub use phaseplane::System;

use conditions::{check_algebraic_conditions, ConditionReport};

/// Evaluates all ten admissibility conditions.
///
/// ```
/// use cavity_core::trajectory::{build_gamma, GammaOptions};
/// use cavity_core::{full_report, Preset};
///
/// let params = Preset::Case1.params();
/// assert!(full_report(&params).unwrap().all_pass());
/// let gamma = build_gamma(&params, &GammaOptions::default()).unwrap();
/// assert!(gamma.x6 > -1.0 && gamma.x6 < 0.0);
/// ```
pub fn full_report(params: &Params) -> Result<ConditionReport> {
    let sys = System::new(*params)?;
    let mut results = check_algebraic_conditions(params, &sys.k);
    results.extend(phaseplane::check_conditions_g_to_j(&sys));
    Ok(ConditionReport {
        params: *params,
        results,
    })
}
