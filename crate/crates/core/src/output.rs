//! CSV and JSON serialization of results.
//!
//! CSV floats are written with 17 significant digits so that every value
//! reparses to the same `f64`; JSON uses serde_json's shortest round-trip
//! form. Nothing here depends on wall-clock time or hash order, so equal
//! inputs give byte-identical files.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::conditions::ConditionResult;
use crate::params::Params;
use crate::phaseplane::{classify, critical_points, CriticalPoint, PhasePoint, System};
use crate::reconstruct::FlowField;
use crate::trajectory::{EventRecord, GammaResult};

/// One float in CSV form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_row(out: &mut dyn Write, fields: &[f64], tail: Option<&str>) -> io::Result<()> {
    let mut line: Vec<String> = fields.iter().map(|v| fmt_f64(*v)).collect();
    if let Some(t) = tail {
        line.push(t.to_string());
    }
    writeln!(out, "{}", line.join(","))
}

/// Columns `x, V, C, W, Z, D, G, F, segment`.
pub fn write_trajectory_csv(out: &mut dyn Write, gamma: &GammaResult) -> io::Result<()> {
    let sys = gamma.system();
    writeln!(out, "x,V,C,W,Z,D,G,F,segment")?;
    for s in &gamma.samples {
        let row = [
            s.x,
            s.v,
            s.c,
            1.0 + s.v,
            s.c * s.c,
            sys.d(s.v, s.c),
            sys.g(s.v, s.c),
            sys.f(s.v, s.c),
        ];
        csv_row(out, &row, Some(&s.segment.to_string()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub params: Params,
    pub method: String,
    pub x0: f64,
    pub x6: f64,
    pub nu: f64,
    pub omega: f64,
    pub ell: Option<f64>,
    pub samples: usize,
    pub departure_rotation: f64,
    pub alternate_route: bool,
    pub events: Vec<EventRecord>,
}

impl From<&GammaResult> for GammaSummary {
    fn from(g: &GammaResult) -> Self {
        GammaSummary {
            params: g.params,
            method: g.options.method.clone(),
            x0: g.x0,
            x6: g.x6,
            nu: g.nu,
            omega: g.omega,
            ell: g.ell,
            samples: g.samples.len(),
            departure_rotation: g.crossing.rotation,
            alternate_route: g.alternate_route,
            events: g.events.clone(),
        }
    }
}

/// Columns `t, r, rho, u, c, p`.
pub fn write_field_csv(out: &mut dyn Write, field: &FlowField) -> io::Result<()> {
    writeln!(out, "t,r,rho,u,c,p")?;
    for p in &field.points {
        csv_row(out, &[p.t, p.r, p.rho, p.u, p.c, p.p], None)?;
    }
    Ok(())
}

/// Metadata accompanying a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub params: Params,
    /// Similarity coordinate of the interface; fixes the time gauge.
    pub x0: f64,
    pub adiabatic_constant: f64,
    pub columns: Vec<String>,
}

impl FieldHeader {
    pub fn new(gamma: &GammaResult, field: &FlowField) -> Self {
        FieldHeader {
            params: gamma.params,
            x0: gamma.x0,
            adiabatic_constant: field.adiabatic_constant,
            columns: ["t", "r", "rho", "u", "c", "p"].map(String::from).to_vec(),
        }
    }
}

/// Columns `V, C`.
pub fn write_polyline_csv(out: &mut dyn Write, points: &[PhasePoint]) -> io::Result<()> {
    writeln!(out, "V,C")?;
    for p in points {
        csv_row(out, &[p.v, p.c], None)?;
    }
    Ok(())
}

/// A critical point with the quantities tabulated by `points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    #[serde(flatten)]
    pub point: CriticalPoint,
    pub w: f64,
}

/// All critical points, classified where the linearization allows it.
pub fn point_table(sys: &System) -> Vec<PointRow> {
    critical_points(sys)
        .into_iter()
        .map(|cp| {
            let point = if cp.present {
                classify(&cp, sys).unwrap_or(cp)
            } else {
                cp
            };
            PointRow {
                w: point.location.w(),
                point,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub params: Params,
    pub points: Vec<PointRow>,
    /// Conditions (G)–(J) with their margins.
    pub conditions: Vec<ConditionResult>,
}

/// Rectangular grid for the direction field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub v_min: f64,
    pub v_max: f64,
    pub nv: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub nc: usize,
}

impl Grid {
    fn axis(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        let n = n.max(2);
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub v: f64,
    pub c: f64,
    /// Unit tangent in the direction of increasing `x` (for `x < 0`);
    /// zero on a critical point.
    pub dv: f64,
    pub dc: f64,
}

/// Direction of `(V, C)` as `x` increases through negative values:
/// `(V', C')` is a positive multiple of `(G, F) / D`.
pub fn direction_field(sys: &System, grid: &Grid) -> Vec<Arrow> {
    let mut out = Vec::with_capacity(grid.nv.max(2) * grid.nc.max(2));
    for c in Grid::axis(grid.c_min, grid.c_max, grid.nc) {
        for v in Grid::axis(grid.v_min, grid.v_max, grid.nv) {
            let (d, g, f) = (sys.d(v, c), sys.g(v, c), sys.f(v, c));
            let norm = g.hypot(f);
            let s = d.signum();
            let (dv, dc) = if norm > 0.0 && d != 0.0 && norm.is_finite() {
                (s * g / norm, s * f / norm)
            } else {
                (0.0, 0.0)
            };
            out.push(Arrow { v, c, dv, dc });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GBranches {
    /// `-1 <= V < V*`.
    pub left: Vec<PhasePoint>,
    /// `V >= 0`.
    pub right: Vec<PhasePoint>,
    /// Vertical asymptote `V = V*`.
    pub asymptote_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitBundle {
    pub params: Params,
    pub grid: Grid,
    pub nullcline_f: Vec<PhasePoint>,
    pub nullcline_g: GBranches,
    /// Endpoints of the sonic line `C = 1 + V` across the grid.
    pub sonic_line: [PhasePoint; 2],
    pub direction_field: Vec<Arrow>,
    pub critical_points: Vec<PointRow>,
    /// `(V, C)` samples of the trajectory, when it was built.
    pub gamma: Option<Vec<PhasePoint>>,
}

impl PortraitBundle {
    pub fn new(sys: &System, grid: Grid, samples: usize, gamma: Option<&GammaResult>) -> Self {
        use crate::phaseplane::{nullcline_f, nullcline_g, polyline};
        let v_star = sys.k.v_star;
        let left_hi = v_star - 1e-6 * (1.0 + v_star.abs());
        let v_lo = grid.v_min.max(-1.0);
        let sonic = |v: f64| PhasePoint::new(v, 1.0 + v);
        PortraitBundle {
            params: sys.params,
            grid,
            nullcline_f: polyline(|v| nullcline_f(v, sys), v_lo, grid.v_max, samples),
            nullcline_g: GBranches {
                left: polyline(|v| nullcline_g(v, sys), -1.0, left_hi, samples),
                right: polyline(|v| nullcline_g(v, sys), 0.0, grid.v_max.max(0.0), samples),
                asymptote_v: v_star,
            },
            sonic_line: [sonic(v_lo), sonic(grid.v_max)],
            direction_field: direction_field(sys, &grid),
            critical_points: point_table(sys),
            gamma: gamma.map(|g| g.samples.iter().map(|s| PhasePoint::new(s.v, s.c)).collect()),
        }
    }
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
