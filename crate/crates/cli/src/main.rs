//! `lipext`: command-line access to Lipschitz extension constants, extension operators
//! and hyperbolic tree embeddings.

mod commands;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "lipext", version, about = "Lipschitz extension constants of finite metric spaces")]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true, env = "LIPEXT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the metric axioms of a space file and list every violation.
    Validate {
        /// Space JSON: an explicit matrix or a generator.
        input: PathBuf,
    },
    /// Optimal extension constant λ(S, F) by linear programming.
    Lambda(LambdaArgs),
    /// Extend a function from a subset and measure the result.
    Extend(ExtendArgs),
    /// Embed a truncated T_k into the upper half-plane and report the distortion.
    Embed(EmbedArgs),
    /// Run a canned experiment described by a JSON config.
    Experiment {
        config: PathBuf,
        /// Overrides the config's output path; `-` writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct LambdaArgs {
    pub input: PathBuf,
    /// Comma-separated point indices of S.
    #[arg(long, value_delimiter = ',', conflicts_with = "enumerate")]
    pub subset: Option<Vec<usize>>,
    /// Restrict to operators with nonnegative weights.
    #[arg(long)]
    pub nonneg: bool,
    /// Maximize over all subsets (λ of the space) instead of solving for one S.
    #[arg(long, conflicts_with = "nonneg")]
    pub enumerate: bool,
    /// Largest subset size visited by --enumerate.
    #[arg(long, requires = "enumerate")]
    pub max_subset: Option<usize>,
    /// Refuse --enumerate runs with more subsets than this.
    #[arg(long, default_value_t = 100_000)]
    pub subset_cap: u128,
    /// Largest space a generator may build.
    #[arg(long, default_value_t = 4096)]
    pub point_cap: usize,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mcshane,
    Average,
    Whitney,
    Projection,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    /// Space JSON, or for `projection` a `{"body", "sample", "queries"}` document.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// `{"subset": [...], "values": [...]}`; for `projection` the subset indexes the sample.
    #[arg(long)]
    pub function: PathBuf,
    /// Ball radius R of the Whitney cover; defaults to twice the largest distance to the subset.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub point_cap: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    Rho,
    Rho0,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Branching parameter: every vertex has k + 1 children.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, value_enum, default_value = "rho0")]
    pub metric: MetricArg,
    /// Vertex coordinates CSV (`vertex_label,x1,x2`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Edge polylines CSV for plotting.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Segments per edge polyline.
    #[arg(long, default_value_t = 16, requires = "edges")]
    pub segments: usize,
    /// Distortion report JSON; stderr when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Sampled pairs when the tree is too large for an exhaustive sweep.
    #[arg(long, default_value_t = 200_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub vertex_cap: usize,
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_FAILURE, message: message.into() }
    }
}

impl From<lipext::Error> for Failure {
    fn from(e: lipext::Error) -> Self {
        let code = if e.is_resource_cap() { EXIT_RESOURCE } else { EXIT_FAILURE };
        Failure { code, message: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<lipext::Error>() {
            Ok(inner) => inner.into(),
            Err(e) => Failure { code: EXIT_FAILURE, message: format!("{e:#}") },
        }
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure the thread pool: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    let result = match cli.command {
        Command::Validate { input } => commands::validate(&input),
        Command::Lambda(args) => commands::lambda(&args),
        Command::Extend(args) => commands::extend(&args),
        Command::Embed(args) => commands::embed(&args),
        Command::Experiment { config, out } => experiment::run(&config, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
