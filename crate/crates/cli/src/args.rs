use std::path::PathBuf;

use cavity_core::params::parse_number;
use cavity_core::trajectory::GammaOptions;
use cavity_core::{Error, Params, Preset};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cavity",
    version,
    about = "Self-similar cavity collapse: conditions, critical points, trajectories and flow fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the admissibility conditions (A)-(J).
    Check {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Tabulate the critical points and, with --out, export the nullclines.
    Points {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Construct the trajectory from the interface point to the origin.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Emit nullclines, direction field, critical points and the trajectory.
    Portrait {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Rebuild the physical flow and verify it.
    Reconstruct {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// One of case1..case6.
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON file {"n", "gamma", "lambda", "kappa"}.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Spatial dimension (2 or 3).
    #[arg(short = 'n')]
    pub n: Option<u32>,
    /// Adiabatic index; decimals or ratios such as 5/3.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Similarity exponent; the interface moves as (-t)^(1/lambda).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Exponent of the undisturbed density profile rho ~ r^kappa.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
}

impl ParamArgs {
    /// Exactly one of a preset, a parameter file or the four explicit values.
    pub fn resolve(&self) -> Result<Params, Error> {
        let explicit = [
            self.n.is_some(),
            self.gamma.is_some(),
            self.lambda.is_some(),
            self.kappa.is_some(),
        ];
        let any_explicit = explicit.iter().any(|b| *b);
        let sources = [self.preset.is_some(), self.params.is_some(), any_explicit];
        if sources.iter().filter(|b| **b).count() != 1 {
            return Err(Error::InvalidParameter(
                "give exactly one of --preset, --params or -n/--gamma/--lambda/--kappa".into(),
            ));
        }
        if let Some(p) = &self.preset {
            return Ok(p.parse::<Preset>()?.params());
        }
        if let Some(path) = &self.params {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())));
        }
        match (self.n, &self.gamma, &self.lambda, &self.kappa) {
            (Some(n), Some(g), Some(l), Some(k)) => Params::new(n, parse_number(g)?, parse_number(l)?, parse_number(k)?),
            _ => Err(Error::InvalidParameter(
                "explicit parameters need all of -n, --gamma, --lambda and --kappa".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub tol_rel: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_abs: f64,
    /// Offset W of the start from the interface point.
    #[arg(long, default_value_t = 1e-6)]
    pub eps_p2: f64,
    /// Departure distance from the sonic node.
    #[arg(long, default_value_t = 1e-5)]
    pub eps_p6: f64,
    /// Termination radius at the origin.
    #[arg(long, default_value_t = 1e-6)]
    pub delta_p1: f64,
    /// Turn of the departure direction at the sonic node, as a fraction of
    /// the wedge between the primary slope and the F-nullcline.
    #[arg(long, default_value_t = 0.01)]
    pub rotation: f64,
    /// Integrator, by registry name.
    #[arg(long, default_value = "dopri5")]
    pub method: String,
    /// Build the trajectory even if a condition fails.
    #[arg(long)]
    pub force: bool,
}

impl TrajectoryArgs {
    pub fn options(&self) -> GammaOptions {
        GammaOptions {
            tol_rel: self.tol_rel,
            tol_abs: self.tol_abs,
            eps_p2: self.eps_p2,
            eps_p6: self.eps_p6,
            delta_p1: self.delta_p1,
            rotation: self.rotation,
            method: self.method.clone(),
            require_conditions: !self.force,
            ..GammaOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for output files; created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Format of what is written to standard output.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Re-run on a grid of (lambda, kappa) around the given parameters.
    #[arg(long)]
    pub sweep: bool,
    /// Grid spacing in both lambda and kappa.
    #[arg(long, default_value_t = 0.005)]
    pub sweep_step: f64,
    /// Grid half-width, in steps.
    #[arg(long, default_value_t = 2)]
    pub sweep_radius: u32,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub v_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub v_max: f64,
    /// Samples per nullcline polyline.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub v_min: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub v_max: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c_min: f64,
    #[arg(long, default_value_t = 1.2, allow_hyphen_values = true)]
    pub c_max: f64,
    #[arg(long, default_value_t = 31)]
    pub nv: usize,
    #[arg(long, default_value_t = 25)]
    pub nc: usize,
    /// Samples per nullcline polyline.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Times (negative), comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [-1.0, -0.5, -0.1], allow_hyphen_values = true)]
    pub times: Vec<f64>,
    /// Number of radii per time, log-spaced from the interface out to
    /// `--r-span` interface radii.
    #[arg(long, default_value_t = 64)]
    pub radii: usize,
    #[arg(long, default_value_t = 100.0)]
    pub r_span: f64,
    #[arg(long, default_value_t = 1.0)]
    pub adiabatic_constant: f64,
}
