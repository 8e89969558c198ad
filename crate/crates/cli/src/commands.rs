use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use cavity_core::conditions::ConditionReport;
use cavity_core::ode::Registry;
use cavity_core::output::{
    point_table, write_field_csv, write_json, write_polyline_csv, write_trajectory_csv, FieldHeader,
    GammaSummary, Grid, PointReport, PortraitBundle,
};
use cavity_core::phaseplane::{check_conditions_g_to_j, nullcline_f, nullcline_g, polyline, System};
use cavity_core::reconstruct::{
    adiabatic_variation, boundary_exponents, density_from_adiabatic, flow_field_scaled,
    integrability_check, interface_kinematics, log_space, residual_check, BoundaryReport,
    IntegrabilityReport, ResidualOptions, ResidualReport,
};
use cavity_core::trajectory::{build_gamma, GammaOptions, GammaResult};
use cavity_core::{full_report, Error, Params};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{FieldArgs, Format, GridArgs, OutputArgs, RangeArgs, SweepArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CONDITIONS: u8 = 2;
pub const EXIT_TRAJECTORY: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

/// An error together with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use Error::*;
        let code = match &e {
            InvalidParameter(_) | Parse(_) | UnknownPreset(_) | UnknownMethod(_) => EXIT_USAGE,
            ConditionsFailed(_) => EXIT_CONDITIONS,
            OutsideFluid { .. } | FitWindowUnresolved(_) | DivergentIntegral(_) | DensityAtVacuum(_) => {
                EXIT_VERIFICATION
            }
            _ => EXIT_TRAJECTORY,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        // a closed downstream pipe is not an error worth reporting
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure {
                code: EXIT_OK,
                message: String::new(),
            };
        }
        Failure {
            code: EXIT_USAGE,
            message: format!("i/o: {e}"),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn save_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> io::Result<()> {
    let mut f = create(dir, name)?;
    write_json(&mut f, value)?;
    f.flush()
}

fn stdout() -> io::StdoutLock<'static> {
    io::stdout().lock()
}

fn g(v: f64) -> String {
    format!("{v:.10}")
}

fn write_conditions_text(out: &mut dyn Write, r: &ConditionReport) -> io::Result<()> {
    writeln!(out, "{}", r.params)?;
    for c in &r.results {
        let status = if c.passed() { "pass" } else { "FAIL" };
        writeln!(out, "({}) {status}", c.id)?;
        for i in &c.inequalities {
            writeln!(out, "    {:<40} margin {:+.6e}", i.label, i.margin)?;
        }
        if let Some(n) = &c.note {
            writeln!(out, "    {n}")?;
        }
    }
    Ok(())
}

fn write_conditions_csv(out: &mut dyn Write, r: &ConditionReport) -> io::Result<()> {
    writeln!(out, "condition,inequality,lhs,rhs,margin,holds")?;
    for c in &r.results {
        for i in &c.inequalities {
            writeln!(
                out,
                "{},\"{}\",{:.16e},{:.16e},{:.16e},{}",
                c.id, i.label, i.lhs, i.rhs, i.margin, i.holds
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    lambda: f64,
    kappa: f64,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    x6: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn sweep_grid(p: &Params, s: &SweepArgs) -> Vec<(f64, f64)> {
    let r = s.sweep_radius as i64;
    let mut grid = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            grid.push((p.lambda() + i as f64 * s.sweep_step, p.kappa() + j as f64 * s.sweep_step));
        }
    }
    grid
}

fn perturbed(p: &Params, lambda: f64, kappa: f64) -> Result<Params, Error> {
    Params::new(p.gas.n, p.gas.gamma, lambda, kappa)
}

fn emit_sweep(rows: &[SweepRow], output: &OutputArgs, name: &str) -> io::Result<()> {
    if let Some(dir) = &output.out {
        save_json(dir, name, &rows)?;
    }
    let mut out = stdout();
    match output.format {
        Format::Json => write_json(&mut out, &rows),
        Format::Csv | Format::Text => {
            writeln!(out, "lambda,kappa,ok,x6,nu,omega")?;
            let opt = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
            for r in rows {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{},{},{},{}",
                    r.lambda,
                    r.kappa,
                    r.ok,
                    opt(r.x6),
                    opt(r.nu),
                    opt(r.omega)
                )?;
            }
            Ok(())
        }
    }
}

pub fn check(params: Params, output: &OutputArgs, sweep: &SweepArgs) -> Outcome {
    if sweep.sweep {
        let rows: Vec<SweepRow> = sweep_grid(&params, sweep)
            .into_par_iter()
            .map(|(lambda, kappa)| {
                let (ok, error) = match perturbed(&params, lambda, kappa).and_then(|p| full_report(&p)) {
                    Ok(r) => (r.all_pass(), None),
                    Err(e) => (false, Some(e.to_string())),
                };
                SweepRow {
                    lambda,
                    kappa,
                    ok,
                    x6: None,
                    nu: None,
                    omega: None,
                    error,
                }
            })
            .collect();
        emit_sweep(&rows, output, "sweep.json")?;
        return Ok(if rows.iter().all(|r| r.ok) { EXIT_OK } else { EXIT_CONDITIONS });
    }

    let report = full_report(&params)?;
    if let Some(dir) = &output.out {
        save_json(dir, "conditions.json", &report)?;
    }
    let mut out = stdout();
    match output.format {
        Format::Text => write_conditions_text(&mut out, &report)?,
        Format::Json => write_json(&mut out, &report)?,
        Format::Csv => write_conditions_csv(&mut out, &report)?,
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_CONDITIONS })
}

pub fn points(params: Params, output: &OutputArgs, range: &RangeArgs) -> Outcome {
    let sys = System::new(params)?;
    let report = PointReport {
        params,
        points: point_table(&sys),
        conditions: check_conditions_g_to_j(&sys),
    };
    if let Some(dir) = &output.out {
        save_json(dir, "points.json", &report)?;
        let v_star = sys.k.v_star;
        let lo = range.v_min.max(-1.0);
        let curves = [
            ("nullcline_f.csv", polyline(|v| nullcline_f(v, &sys), lo, range.v_max, range.samples)),
            (
                "nullcline_g_left.csv",
                polyline(|v| nullcline_g(v, &sys), lo, range.v_max.min(v_star), range.samples),
            ),
            (
                "nullcline_g_right.csv",
                polyline(|v| nullcline_g(v, &sys), range.v_min.max(0.0), range.v_max, range.samples),
            ),
        ];
        for (name, pts) in curves {
            let mut f = create(dir, name)?;
            write_polyline_csv(&mut f, &pts)?;
            f.flush()?;
        }
    }
    let mut out = stdout();
    match output.format {
        Format::Json => write_json(&mut out, &report)?,
        Format::Csv | Format::Text => {
            let opt = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
            writeln!(out, "id,present,V,C,W,class,R2,L1,L2")?;
            for row in &report.points {
                let p = &row.point;
                writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{:.16e},{},{},{},{}",
                    p.id,
                    p.present,
                    p.location.v,
                    p.location.c,
                    row.w,
                    p.class,
                    opt(p.discriminant),
                    opt(p.l1),
                    opt(p.l2)
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn write_summary_text(out: &mut dyn Write, s: &GammaSummary) -> io::Result<()> {
    writeln!(out, "{}", s.params)?;
    writeln!(out, "method   {}", s.method)?;
    writeln!(out, "x0       {}", g(s.x0))?;
    writeln!(out, "x6       {}", g(s.x6))?;
    writeln!(out, "nu       {}", g(s.nu))?;
    writeln!(out, "omega    {}", g(s.omega))?;
    if let Some(ell) = s.ell {
        writeln!(out, "ell      {}", g(ell))?;
    }
    writeln!(out, "samples  {}", s.samples)?;
    for e in &s.events {
        write!(out, "event {:<12} x {} V {} C {}", e.name, g(e.x), g(e.v), g(e.c))?;
        match &e.note {
            Some(n) => writeln!(out, "  ({n})")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

pub fn solve(params: Params, opts: GammaOptions, output: &OutputArgs, sweep: &SweepArgs) -> Outcome {
    if sweep.sweep {
        let rows: Vec<SweepRow> = sweep_grid(&params, sweep)
            .into_par_iter()
            .map(|(lambda, kappa)| {
                match perturbed(&params, lambda, kappa).and_then(|p| build_gamma(&p, &opts)) {
                    Ok(g) => SweepRow {
                        lambda,
                        kappa,
                        ok: true,
                        x6: Some(g.x6),
                        nu: Some(g.nu),
                        omega: Some(g.omega),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        lambda,
                        kappa,
                        ok: false,
                        x6: None,
                        nu: None,
                        omega: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect();
        emit_sweep(&rows, output, "sweep.json")?;
        return Ok(if rows.iter().all(|r| r.ok) { EXIT_OK } else { EXIT_TRAJECTORY });
    }

    let gamma = build_gamma(&params, &opts)?;
    let summary = GammaSummary::from(&gamma);
    if let Some(dir) = &output.out {
        let mut f = create(dir, "trajectory.csv")?;
        write_trajectory_csv(&mut f, &gamma)?;
        f.flush()?;
        save_json(dir, "summary.json", &summary)?;
    }
    let mut out = stdout();
    match output.format {
        Format::Text => write_summary_text(&mut out, &summary)?,
        Format::Json => write_json(&mut out, &summary)?,
        Format::Csv => write_trajectory_csv(&mut out, &gamma)?,
    }
    Ok(EXIT_OK)
}

pub fn portrait(params: Params, opts: GammaOptions, output: &OutputArgs, grid: &GridArgs) -> Outcome {
    let sys = System::new(params)?;
    // the trajectory is drawn when it can be built; the rest stands alone
    let gamma = build_gamma(&params, &opts).ok();
    let bundle = PortraitBundle::new(
        &sys,
        Grid {
            v_min: grid.v_min,
            v_max: grid.v_max,
            nv: grid.nv,
            c_min: grid.c_min,
            c_max: grid.c_max,
            nc: grid.nc,
        },
        grid.samples,
        gamma.as_ref(),
    );
    if let Some(dir) = &output.out {
        save_json(dir, "portrait.json", &bundle)?;
    }
    if output.out.is_none() || output.format == Format::Json {
        write_json(&mut stdout(), &bundle)?;
    } else {
        let mut out = stdout();
        writeln!(
            out,
            "portrait: {} arrows, {} critical points, trajectory {}",
            bundle.direction_field.len(),
            bundle.critical_points.len(),
            if bundle.gamma.is_some() { "included" } else { "not available" }
        )?;
    }
    Ok(EXIT_OK)
}

/// Verification tolerances of the reconstructed flow.
const EXPONENT_TOL: f64 = 0.02;
const KINEMATICS_TOL: f64 = 1e-6;
const ADIABATIC_TOL: f64 = 1e-7;
const ODE_TOL: f64 = 1e-6;
const ORDER_TOL: f64 = 0.2;
const INTEGRAL_TOL: f64 = 0.01;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            value,
            tolerance,
            pass: value < tolerance,
        }
    }
}

#[derive(Debug, Serialize)]
struct Verification {
    params: Params,
    checks: Vec<Check>,
    boundary: BoundaryReport,
    integrability: IntegrabilityReport,
    residual: ResidualReport,
}

fn verify(gamma: &GammaResult, field: &FieldArgs) -> Result<Verification, Error> {
    let reg = Registry::<4>::with_builtins();
    let st = reg.get(&gamma.options.method)?;
    let density = density_from_adiabatic(gamma, field.adiabatic_constant)?;
    let boundary = boundary_exponents(gamma, st, (1e-6, 1e-3), 40)?;
    let kin = interface_kinematics(gamma, &density, &log_space(-1.0, -1e-3, 25))?;
    let integrability = integrability_check(gamma, field.adiabatic_constant, 1.0)?;
    let residual = residual_check(
        gamma,
        st,
        &ResidualOptions {
            adiabatic_constant: field.adiabatic_constant,
            ..ResidualOptions::default()
        },
    )?;
    let order_dev = residual.pde_orders[..3]
        .iter()
        .map(|o| (o - 2.0).abs())
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check::below("pressure exponent rel. error", boundary.pressure.rel_error, EXPONENT_TOL),
        Check::below("density exponent rel. error", boundary.density.rel_error, EXPONENT_TOL),
        Check::below("interface kinematics", kin, KINEMATICS_TOL),
        Check::below("adiabatic variation", adiabatic_variation(gamma), ADIABATIC_TOL),
        Check::below("similarity ODE residual", residual.ode_worst(), ODE_TOL),
        Check::below("PDE order deviation from 2", order_dev, ORDER_TOL),
        Check::below("integral tail mismatch", integrability.worst_rel_error(), INTEGRAL_TOL),
    ];
    checks.push(Check {
        name: "interface acceleration positive",
        value: boundary.acceleration,
        tolerance: 0.0,
        pass: boundary.acceleration > 0.0 && boundary.acceleration.is_finite(),
    });
    Ok(Verification {
        params: gamma.params,
        checks,
        boundary,
        integrability,
        residual,
    })
}

pub fn reconstruct(params: Params, opts: GammaOptions, output: &OutputArgs, field: &FieldArgs) -> Outcome {
    let gamma = build_gamma(&params, &opts)?;
    let density = density_from_adiabatic(&gamma, field.adiabatic_constant)?;
    let scales = log_space(1.0, field.r_span, field.radii.max(2));
    let flow = flow_field_scaled(&gamma, &density, &field.times, &scales)?;
    let v = verify(&gamma, field)?;

    if let Some(dir) = &output.out {
        let mut f = create(dir, "fields.csv")?;
        write_field_csv(&mut f, &flow)?;
        f.flush()?;
        save_json(dir, "fields.json", &FieldHeader::new(&gamma, &flow))?;
        save_json(dir, "boundary.json", &v.boundary)?;
        save_json(dir, "integrability.json", &v.integrability)?;
        save_json(dir, "residual.json", &v.residual)?;
        save_json(dir, "verification.json", &v.checks)?;
    }
    let mut out = stdout();
    match output.format {
        Format::Json => write_json(&mut out, &v)?,
        Format::Csv => write_field_csv(&mut out, &flow)?,
        Format::Text => {
            writeln!(out, "{}", params)?;
            for c in &v.checks {
                writeln!(
                    out,
                    "{:<34} {:>12.4e}  (tol {:.0e})  {}",
                    c.name,
                    c.value,
                    c.tolerance,
                    if c.pass { "pass" } else { "FAIL" }
                )?;
            }
        }
    }
    Ok(if v.checks.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_VERIFICATION })
}
