use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cantorlab", version, about = "Cantor sets, ultrametric valuations and scale-free products")]
pub struct Cli {
    /// Working precision of every floating-point computation.
    #[arg(long, global = true, env = "CANTORLAB_PRECISION_BITS", default_value_t = 256)]
    pub precision_bits: u32,
    /// Refinement depth (meaning depends on the command).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Convergence tolerance for limit evaluations.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for `experiment all`.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// JSON system description used when --system is absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArg {
    /// System specification, e.g. middle-alpha:1/3, example2:1/2, fluct:3.
    #[arg(long)]
    pub system: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Materialize a refinement level as JSON.
    Construct(SystemArg),
    /// Measure, dimension, thickness and fatness.
    Stats {
        #[command(subcommand)]
        stat: StatsCmd,
    },
    /// Evaluate or sample the Cantor function.
    Phi {
        #[command(subcommand)]
        op: PhiCmd,
    },
    /// Word metric, valuations, valued norms and exponents.
    Ultra {
        #[command(subcommand)]
        op: UltraCmd,
    },
    /// Infinite products, hopping identities and locally constant solutions.
    De {
        #[command(subcommand)]
        op: DeCmd,
    },
    /// Named experiments.
    #[command(alias = "paper")]
    Experiment(ExperimentArgs),
}

#[derive(Subcommand, Debug)]
pub enum StatsCmd {
    /// Limit of the remaining length.
    Measure(SystemArg),
    /// Box-counting dimension over depths min-depth..=depth.
    Dimension {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 5)]
        min_depth: usize,
    },
    /// Thickness and divergence diagnostic up to --depth.
    Thickness(SystemArg),
    /// Fatness exponent from fattening scales s^from..s^to.
    Fatness {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 8)]
        from: usize,
        #[arg(long, default_value_t = 20)]
        to: usize,
        #[arg(long)]
        allow_null_set: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum PhiCmd {
    /// Evaluate at one point.
    Eval {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        x: String,
    },
    /// Sample on the grid i / resolution.
    Sample {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 64)]
        resolution: u32,
    },
    /// Check monotonicity on random pairs (uses --seed).
    Sweep {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum UltraCmd {
    /// Natural ultrametric between two digit words.
    Metric {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "1/3")]
        beta: String,
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Binary address of a point of a middle-alpha set to --depth digits.
    Encode {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        x: String,
    },
    /// Valuation of x~ = eps^(1 + a) along eps = base^(2^k).
    Valuation {
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "1/2")]
        base: String,
    },
    /// Relative infinitesimal eps^2 / (lambda x).
    Inversion {
        #[arg(long)]
        x: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Valued norm of a point of the middle-thirds set.
    Norm {
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
    },
    /// Limit of eps^(n - n l) in the valued norm.
    Sequence(SequenceArgs),
    /// Valuated exponent of a fluctuating family over depths 2..=depth.
    Exponent(SystemArg),
    /// Renormalised (double-logarithmic) valuation.
    Renormalised {
        #[arg(long)]
        xtilde: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0")]
        v0: String,
    },
    /// k solving c^(n - k) = b^n.
    Endpoint {
        #[arg(long)]
        c: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: u64,
    },
    /// Valued measure of a middle-alpha set at one level.
    Measure {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 8)]
        level: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SequenceArgs {
    #[arg(long)]
    pub eps: String,
    #[arg(long)]
    pub l: String,
    #[arg(long, default_value = "0.9")]
    pub lambda: String,
    #[arg(long, default_value_t = 1 << 20)]
    pub n_max: u64,
    #[arg(long, default_value_t = 10)]
    pub companion_n: u64,
}

#[derive(Subcommand, Debug)]
pub enum DeCmd {
    /// Partial products converging to 1 - eta and 1 + eta.
    Products {
        #[arg(long)]
        eta: String,
        #[arg(long, default_value_t = 10)]
        n: u32,
    },
    /// Both sides of the hopping identity for N = 0..=n.
    Hopping {
        #[arg(long)]
        eta: String,
        #[arg(long, default_value_t = 10)]
        n: u32,
    },
    /// Additive and multiplicative coverage, and hops to reach 1 - delta.
    Coverage {
        #[arg(long)]
        eta: String,
        #[arg(long, default_value_t = 10)]
        n: u32,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Locally constant solutions built from the Cantor function.
    Lcf {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, num_args = 1.., required = true)]
        x: Vec<String>,
        #[arg(long, num_args = 1.., default_values = ["1e-3", "1e-5", "1e-8"])]
        eps: Vec<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long, default_value = "0.3")]
    pub eps: String,
    #[arg(long, default_value = "0.4")]
    pub l: String,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    /// Parameters of the fluctuating family; repeatable.
    #[arg(long)]
    pub q: Vec<u32>,
    /// Values of eta; repeatable.
    #[arg(long)]
    pub eta: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Example1,
    Example2,
    Example3,
    #[value(alias = "sec51-family")]
    FluctFamily,
    #[value(alias = "eq24-identity")]
    HoppingIdentity,
    GrowthOfMeasure,
    FatnessExample2,
    RhoSeparation,
    All,
}

impl Experiment {
    pub const EACH: [Experiment; 8] = [
        Experiment::Example1,
        Experiment::Example2,
        Experiment::Example3,
        Experiment::FluctFamily,
        Experiment::HoppingIdentity,
        Experiment::GrowthOfMeasure,
        Experiment::FatnessExample2,
        Experiment::RhoSeparation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Example1 => "example1",
            Experiment::Example2 => "example2",
            Experiment::Example3 => "example3",
            Experiment::FluctFamily => "fluct-family",
            Experiment::HoppingIdentity => "hopping-identity",
            Experiment::GrowthOfMeasure => "growth-of-measure",
            Experiment::FatnessExample2 => "fatness-example2",
            Experiment::RhoSeparation => "rho-separation",
            Experiment::All => "all",
        }
    }
}
