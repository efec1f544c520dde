use clap::{Args, Parser, Subcommand, ValueEnum};
use mahler_core::series::DEFAULT_TERM_CAP;

#[derive(Parser, Debug)]
#[command(
    name = "mahler",
    version,
    about = "Logarithmic Mahler measure of linear forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Working precision in bits (at least 64).
    #[arg(
        long,
        global = true,
        env = "MAHLER_PRECISION",
        default_value_t = 256,
        value_parser = clap::value_parser!(u32).range(64..)
    )]
    pub precision: u32,

    /// Shorthand for --format json.
    #[arg(long, global = true)]
    pub json: bool,

    /// Shorthand for --format csv.
    #[arg(long, global = true, conflicts_with = "json")]
    pub csv: bool,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Series estimate of m(P_D) with its truncation certificate.
    Measure(MeasureArgs),
    /// Direct evaluation by quadrature, sampling or the walk density.
    Oracle(OracleArgs),
    /// Multinomial moments a(n,k,D).
    Moments(MomentsArgs),
    /// The constant G(n,D), A(D,l) and the tail bounds.
    Bound(BoundArgs),
    /// Residuals of the series identities that hold for every D.
    Identity(IdentityArgs),
    /// 2 log|P_D(z)| at a projective point from its series.
    Lognorm(LognormArgs),
}

#[derive(Args, Debug)]
pub struct Coeffs {
    /// Comma separated coefficients: integers, fractions, decimals or complex (1+2i).
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub coeffs: Coeffs,
    /// e1, e2 or s<l> (for example s0, s3); plain "s" takes l from --ell.
    #[arg(long, default_value = "e1")]
    pub variant: String,
    #[arg(long)]
    pub ell: Option<u32>,
    /// Number of series terms N.
    #[arg(long, short = 'N', default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
    #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
    pub term_cap: usize,
    /// Exit with status 3 when no certificate is available.
    #[arg(long)]
    pub require_certificate: bool,
    /// Skip the Monte Carlo cross-check.
    #[arg(long)]
    pub no_check: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record partial sums at N = 1, 2, 5, 10, 20, 50, ...
    #[arg(long)]
    pub checkpoints: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMethod {
    Jensen,
    Montecarlo,
    Density,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub coeffs: Coeffs,
    #[arg(long, value_enum, default_value_t = OracleMethod::Jensen)]
    pub method: OracleMethod,
    /// Largest number of grid points per angle.
    #[arg(long, default_value_t = mahler_core::oracle::DEFAULT_GRID_CAP)]
    pub grid: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub coeffs: Coeffs,
    /// Largest k.
    #[arg(long, short = 'K', default_value_t = 10)]
    pub max_k: usize,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub coeffs: Coeffs,
    /// Values of l for A(D,l) and the S_l tails.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub ell: Vec<u32>,
    /// Values of N for the tails.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub terms: Vec<usize>,
    #[arg(long)]
    pub require_certificate: bool,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub coeffs: Coeffs,
    /// Number of outer terms J.
    #[arg(long, short = 'N', default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
    /// Zero coefficients appended in the padding identity.
    #[arg(long, default_value_t = 1)]
    pub pad: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LognormForm {
    Hyper,
    Jacobi,
}

#[derive(Args, Debug)]
pub struct LognormArgs {
    #[command(flatten)]
    pub coeffs: Coeffs,
    /// Homogeneous coordinates of the point z.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, value_enum, default_value_t = LognormForm::Hyper)]
    pub form: LognormForm,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    #[arg(long, short = 'N', default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
}
