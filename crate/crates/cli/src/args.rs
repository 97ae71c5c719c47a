use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rabi-dpt", version, about = "Dissipative anisotropic Rabi model: solves, sweeps and scaling data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON config; command-line flags override its keys
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Initial Fock cutoff (escalated automatically while the tail is populated)
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Steady-state residual tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma-separated subset of exact,meanfield,cumulant,effective,scaling
    #[arg(long)]
    pub layers: Option<String>,
    /// Worker threads for sweeps
    #[arg(long)]
    pub workers: Option<usize>,
    /// Memory budget for concurrent exact solves, in MB
    #[arg(long)]
    pub max_mem: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Omega / omega_c (negative for Omega < 0)
    #[arg(long, required_unless_present = "config", allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Co-rotating coupling in units of lambda_c
    #[arg(long, required_unless_present = "config", allow_hyphen_values = true)]
    pub lam_m: Option<f64>,
    /// Counter-rotating coupling in units of lambda_c
    #[arg(long, required_unless_present = "config", allow_hyphen_values = true)]
    pub lam_p: Option<f64>,
    /// kappa / omega_c
    #[arg(long, required_unless_present = "config")]
    pub kappa_ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepPointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lam_m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lam_p: Option<f64>,
    #[arg(long)]
    pub kappa_ratio: Option<f64>,
    /// Ratio lam_p / lam_m, used instead of --lam-p
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TimeArgs {
    /// Final time in units of 1/omega_c
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of equally spaced samples including t = 0
    #[arg(long)]
    pub samples: Option<usize>,
    /// Initial qubit state with the cavity in vacuum: up or down
    #[arg(long)]
    pub init: Option<String>,
    /// Relative integration tolerance
    #[arg(long)]
    pub rtol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary state at one parameter point
    Steady {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Time evolution of the master equation from a product state
    Evolve {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Phase grid over one or two axes
    PhaseDiagram {
        #[command(flatten)]
        point: SweepPointArgs,
        /// name:min:max:steps with name in eta, lam_m, lam_p, kappa_ratio, r
        #[arg(long, required_unless_present = "config")]
        axis1: Option<String>,
        #[arg(long)]
        axis2: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Order parameter versus lam_m at fixed ratio for several eta
    ScanOrderParameter {
        /// lam_m:min:max:steps
        #[arg(long, required_unless_present = "config")]
        axis1: Option<String>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        etas: Option<Vec<f64>>,
        #[arg(long)]
        kappa_ratio: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Critical fluctuations and collapse coordinates near the second-order line
    Scaling {
        #[arg(long, value_delimiter = ',')]
        rs: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        etas: Option<Vec<f64>>,
        /// Offsets from the second-order coupling
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        dlams: Option<Vec<f64>>,
        #[arg(long)]
        kappa_ratio: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Mean-field fixed points, stability and region
    Meanfield {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Second-order cumulant dynamics and stationary normal-phase moments
    Cumulant {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[command(flatten)]
        common: Common,
    },
}
