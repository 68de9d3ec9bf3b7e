use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "hypercurv",
    version,
    about = "Curvature invariants, cylinder ladders and feasibility scans for hypersurfaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with defaults for the flags below.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Random seed; falls back to HYPERCURV_SEED, then the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for grid scans.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Exact rational arithmetic (the default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Double precision arithmetic.
    #[arg(long, global = true)]
    pub float: bool,
    /// Relative tolerance for floating point comparisons.
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Absolute tolerance for floating point comparisons.
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetric functions, mean curvatures and identity residuals of a spectrum.
    Invariants(InvariantsArgs),
    /// The scalar-curvature ladder of the cylinders in dimension n.
    Ladder(LadderArgs),
    /// Locate (H, R) on the ladder, with the rigidity status of the match.
    Classify(ClassifyArgs),
    /// Feasibility scan of a constraint system on limit curvatures.
    Scan(ScanArgs),
    /// Both forms of the Simons formula at a point.
    Simons(SimonsArgs),
    /// Fundamental forms and principal curvatures of a parametrized patch.
    #[command(name = "immersion-eval")]
    ImmersionEval(ImmersionArgs),
    /// Run the built-in fixture suite.
    #[command(name = "verify-all")]
    VerifyAll(VerifyArgs),
    /// Serve a built-in shape over the line protocol used by --command.
    #[command(name = "shape-server", hide = true)]
    ShapeServer(ShapeServerArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InvariantsArgs {
    /// Spectrum JSON file, or `-` for standard input.
    #[arg(long, value_name = "FILE", conflicts_with = "lambdas", required_unless_present = "lambdas")]
    pub input: Option<PathBuf>,
    /// Comma separated principal curvatures, e.g. `0,0,2,2` or `-1/2,3`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub lambdas: Option<Vec<String>>,
    /// Ambient curvature (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Also summarize the nonzero curvatures by sign.
    #[arg(long)]
    pub pct: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LadderArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub n: usize,
    /// Mean curvature.
    #[arg(long = "H", alias = "h", allow_hyphen_values = true)]
    pub h: String,
    /// Scalar curvature.
    #[arg(long = "R", alias = "r", allow_hyphen_values = true)]
    pub r: String,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Built-in case: thm1-claim, thm1-lambda2, thm2-claim, thm2-lambda3, thm2-lambda2.
    #[arg(long, conflicts_with = "system", required_unless_present = "system")]
    pub case: Option<String>,
    /// Constraint system JSON file, or `-` for standard input.
    #[arg(long, value_name = "FILE")]
    pub system: Option<PathBuf>,
    /// Mean curvature (default 1 for built-in cases).
    #[arg(long = "H", alias = "h", allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Scalar curvature (default: the case's threshold times H^2).
    #[arg(long = "R", alias = "r", allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Number of grid points.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Random points used to check the certificate identities.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SimonsArgs {
    /// Point data JSON file, or `-` for standard input.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Take sectional curvatures from the Gauss equation.
    #[arg(long)]
    pub gauss: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Sphere,
    Cylinder,
    Graph,
    Paraboloid,
    Plane,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeSpec {
    /// Built-in shape.
    #[arg(long, value_enum)]
    pub shape: Option<ShapeKind>,
    /// Patch dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sphere radius.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Sphere factor dimension of a cylinder.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sphere factor radius of a cylinder.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Graph polynomial as `coeff:e1,...,en` terms separated by `;`,
    /// e.g. `0.5:2,0;0.5:0,2`.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ImmersionArgs {
    #[command(flatten)]
    pub shape: ShapeSpec,
    /// External shape: a shell command speaking the JSON line protocol.
    #[arg(long, conflicts_with = "shape")]
    pub command: Option<String>,
    /// Parameter point, comma separated. Repeat for several points.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// Use finite differences of the embedding instead of analytic derivatives.
    #[arg(long)]
    pub fd: bool,
    /// Uniform finite-difference step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Compute both derivative paths and compare the spectra.
    #[arg(long, conflicts_with = "fd")]
    pub compare: bool,
    /// Largest accepted difference for --compare.
    #[arg(long, default_value_t = 1e-5)]
    pub compare_tol: f64,
    /// Summarize the nonzero curvatures of all points by sign.
    #[arg(long)]
    pub pct: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Grid points per case scan.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeServerArgs {
    #[command(flatten)]
    pub shape: ShapeSpec,
}
