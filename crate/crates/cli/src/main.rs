use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod inputs;
mod record;
mod verify;

use record::{Failure, Session};

#[derive(Parser)]
#[command(name = "deuber", version, about = "Deuber sets, Rado's columns condition, Hales-Jewett lifts and coloring certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Directory for JSON artifacts
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Append-only run ledger (defaults to <out>/ledger.ndjson)
    #[arg(long, global = true)]
    pub ledger: Option<PathBuf>,

    /// Node limit for searches and solvers
    #[arg(long, global = true)]
    pub max_nodes: Option<u64>,

    /// Wall-clock limit in seconds
    #[arg(long, global = true)]
    pub max_seconds: Option<f64>,

    /// Inclusive seed coordinate range LO:HI (use --seed-range=-5:5 for negatives)
    #[arg(long, global = true, value_parser = inputs::parse_range)]
    pub seed_range: Option<(i64, i64)>,

    /// Worker threads (0 = all cores, 1 = sequential)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Sequential search so reported witnesses are the lexicographically least
    #[arg(long, global = true)]
    pub canonical: bool,

    /// Do not print the summary
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Shapes and their generated sets
    #[command(subcommand)]
    Shape(ShapeCmd),
    /// Rado's columns condition
    #[command(subcommand)]
    Rado(RadoCmd),
    /// Monochromatic configurations and partition numbers
    #[command(subcommand)]
    Search(SearchCmd),
    /// Hales-Jewett lines and numbers
    #[command(subcommand)]
    Hj(HjCmd),
    /// The Hales-Jewett lift of a shape
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Finite IP-sets
    #[command(subcommand)]
    Ip(IpCmd),
    /// Certificates
    #[command(subcommand)]
    Cert(CertCmd),
}

#[derive(Subcommand)]
pub enum ShapeCmd {
    /// Emit the set generated by a shape and seed
    Gen {
        /// Shape or pattern JSON file, or a catalog name
        #[arg(long)]
        shape: String,
        /// Seed points: "2,5" in Z, "1,0;0,3" in Z^2
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
    },
    /// Emit Deuber's (m,p,c) shape
    Mpc {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        c: i64,
    },
    /// Join two homomorphic shapes with commuting endomorphisms
    Join {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
}

#[derive(Subcommand)]
pub enum RadoCmd {
    /// Decide the columns condition for an integer matrix
    Check {
        /// Rows separated by ';', entries by spaces or commas
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Generalized columns condition for columns given as integer matrices
    CheckGen {
        /// One column map per flag, as a matrix
        #[arg(long = "column", required = true, allow_hyphen_values = true)]
        columns: Vec<String>,
        /// Endomorphism c; candidates are tried when absent
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
    },
    /// Build B with A·B = 0 whose rows lie in an (m,p,c)-set
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
}

#[derive(Subcommand)]
pub enum SearchCmd {
    /// Find a monochromatic configuration under a given coloring
    Mono {
        #[arg(long)]
        shape: String,
        /// Box per coordinate: "1:2000" or "1:10,1:10"
        #[arg(long)]
        domain: String,
        /// parity, mod:K, random:SEED, rle:TEXT, or a JSON file
        #[arg(long)]
        coloring: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        /// Require distinct configuration terms
        #[arg(long)]
        strict: bool,
    },
    /// Least N such that every r-coloring of the side-N box has a configuration
    Number {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        /// positive ([1,N]^d) or symmetric
        #[arg(long, default_value = "positive")]
        family: String,
        #[arg(long, default_value_t = 64)]
        max_n: usize,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Subcommand)]
pub enum HjCmd {
    /// Find a monochromatic combinatorial line
    Line {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        /// One base-36 digit per word in index order, or random:SEED
        #[arg(long)]
        coloring: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
    },
    /// Least n forcing a monochromatic line in [k]^n
    Number {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
}

#[derive(Subcommand)]
pub enum LiftCmd {
    /// Build the lifted shape
    Build {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        /// Number of trailing lines already monochromatic
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Word length; the Hales-Jewett number when absent
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 250_000)]
        max_maps: usize,
    },
    /// Check extraction on colorings of a lifted configuration
    Verify {
        /// lift.json written by `lift build`
        #[arg(long)]
        plan: PathBuf,
        /// Seed t_0, …, t_M
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        /// Every coloring whose last k lines are monochromatic
        #[arg(long)]
        exhaustive: bool,
        /// A single coloring (random:SEED, parity, mod:K) when not exhaustive
        #[arg(long)]
        coloring: Option<String>,
    },
}

#[derive(Subcommand)]
pub enum IpCmd {
    /// Subset sums, optionally of a sub-IP-set
    Fs {
        /// Generators: "1;2;4" in Z, "1,0;0,1" in Z^2
        #[arg(long, allow_hyphen_values = true)]
        generators: String,
        /// 1-based blocks: "1,2;3"
        #[arg(long)]
        blocks: Option<String>,
    },
    /// Search intervals I where every r-coloring has {a} ∪ {a + f(y_α)} monochromatic
    Probe {
        /// Polynomial Z^h -> Z in x0, …, x{h-1}; repeat for a family
        #[arg(long = "map", required = true, allow_hyphen_values = true)]
        maps: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        generators: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 1)]
        start: i64,
        #[arg(long, default_value_t = 24)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
pub enum CertCmd {
    /// Re-verify artifacts from their own contents
    Verify {
        #[arg(long = "file", required = true)]
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut session = Session::new(cli.global.clone(), &argv[1..]);
    let result = match &cli.command {
        Command::Shape(c) => commands::shape(&mut session, c),
        Command::Rado(c) => commands::rado(&mut session, c),
        Command::Search(c) => commands::search(&mut session, c),
        Command::Hj(c) => commands::hj(&mut session, c),
        Command::Lift(c) => commands::lift(&mut session, c),
        Command::Ip(c) => commands::ip(&mut session, c),
        Command::Cert(c) => commands::cert(&mut session, c),
    };
    let code = match result {
        Ok(status) => session.finish(status),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            session.finish_error(code, &message)
        }
    };
    ExitCode::from(code)
}
