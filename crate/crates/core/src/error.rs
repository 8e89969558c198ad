use thiserror::Error;

/// Errors raised anywhere in the construction pipeline.
///
/// Variants are grouped by the stage that raises them so the CLI can map
/// them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // parameter handling
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse number {0:?}")]
    Parse(String),
    #[error("unknown preset {0:?} (expected case1..case6)")]
    UnknownPreset(String),

    // phase-plane evaluation
    #[error("F has a pole at V = -1 with C = {c} (alpha != 0)")]
    Pole { c: f64 },
    #[error("negative radicand {value:e} on the F-nullcline at V = {v}")]
    NegativeRadicand { v: f64, value: f64 },
    #[error("V = {v} lies outside the branch domain of the G-nullcline")]
    OutsideBranchDomain { v: f64 },
    #[error("all partial derivatives vanish at {0}")]
    DegenerateLinearization(String),
    #[error("discriminant R^2 = {0:e} is not positive")]
    DiscriminantNonpositive(f64),
    #[error("critical point {0} is absent")]
    AbsentPoint(String),
    #[error("P6 and P8 coalesce (V- = V+); classification refused")]
    Coalescence,

    // integration
    #[error("unknown integrator {0:?}")]
    UnknownMethod(String),
    #[error("step size underflow at s = {s} (h = {h:e})")]
    StepUnderflow { s: f64, h: f64 },
    #[error("trajectory left the admissible region: {0}")]
    DomainExit(String),

    // trajectory construction
    #[error("start offset eps = {0:e} leaves the first trapping strip")]
    StartOutsideStrip(f64),
    #[error("arrival at P6 off the primary slope by {angle:e} rad")]
    WrongArrivalSlope { angle: f64 },
    #[error("trajectory did not reach P1: {0}")]
    DidNotReachP1(String),
    #[error("non-integrable endpoint: {0}")]
    NonintegrableEndpoint(String),
    #[error("conditions not satisfied: {0}")]
    ConditionsFailed(String),

    // reconstruction
    #[error("x = {x} lies outside the fluid region (x0 = {x0})")]
    OutsideFluid { x: f64, x0: f64 },
    #[error("fit window unresolved: {0}")]
    FitWindowUnresolved(String),
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    #[error("density undefined where C = 0 (x = {0})")]
    DensityAtVacuum(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
