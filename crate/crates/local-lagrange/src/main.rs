//! Command-line front end over the experiment harness. All real work lives
//! in the library; this binary parses flags, dispatches, and maps error
//! classes onto exit codes (0 success, 2 usage, 3 numerical, 4 resource
//! cap, 1 I/O).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use local_lagrange::error::{Error, Result};
use local_lagrange::experiments::{
    exit_code, run_lagrange, run_nodes, run_precond, run_truncate, NodeFamily, OutputOptions,
};
use local_lagrange::kernels::KernelSpec;

#[derive(Parser)]
#[command(
    name = "local-lagrange",
    version,
    about = "Kernel interpolation on the sphere and torus with local Lagrange preconditioning"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Icosahedral,
    Fibonacci,
    Torus,
}

#[derive(Args)]
struct FamilyArgs {
    /// Node family to generate.
    #[arg(long, value_enum)]
    family: Family,
    /// Icosahedral refinement level (icosahedral family only).
    #[arg(long)]
    level: Option<u32>,
    /// Node count (fibonacci and torus families).
    #[arg(long)]
    n: Option<usize>,
    /// Seed for randomized constructions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FamilyArgs {
    fn parse_family(&self) -> Result<NodeFamily> {
        match self.family {
            Family::Icosahedral => {
                let level = self.level.ok_or_else(|| {
                    Error::InvalidInput("icosahedral family needs --level".into())
                })?;
                Ok(NodeFamily::Icosahedral { level })
            }
            Family::Fibonacci => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidInput("fibonacci family needs --n".into()))?;
                Ok(NodeFamily::Fibonacci { n })
            }
            Family::Torus => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidInput("torus family needs --n".into()))?;
                Ok(NodeFamily::Torus {
                    n,
                    seed: self.seed,
                })
            }
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a node set; write nodes.txt and stats.json.
    Nodes {
        #[command(flatten)]
        family: FamilyArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Full Lagrange decay study; write decay.csv and profile CSVs.
    Lagrange {
        /// Kernel name: s2-tps:m=<order> or torus-tps.
        #[arg(long, default_value = "s2-tps:m=2")]
        kernel: String,
        #[command(flatten)]
        family: FamilyArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Omit the timestamp header and zero wall-time fields so re-runs
        /// are byte-identical.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// GMRES iteration table over icosahedral levels; write iterations.csv
    /// and reports.jsonl.
    Precond {
        /// Kernel name (sphere kernels only).
        #[arg(long, default_value = "s2-tps:m=2")]
        kernel: String,
        /// Icosahedral level; repeat the flag for several levels.
        #[arg(long, required = true)]
        level: Vec<u32>,
        /// Relative-residual tolerance; repeat the flag for several.
        #[arg(long, required = true)]
        tol: Vec<f64>,
        /// Footprint size override (default: 7 ceil((log10 N)^2)).
        #[arg(long)]
        m: Option<usize>,
        /// Seed for the random data vectors.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Truncation-error study of the polar Lagrange function; write
    /// truncate.csv.
    Truncate {
        /// Kernel name (sphere kernels only).
        #[arg(long, default_value = "s2-tps:m=2")]
        kernel: String,
        #[command(flatten)]
        family: FamilyArgs,
        /// Truncation radius constant K (radius = K h |ln h|); repeatable.
        #[arg(long = "k-trunc", required = true)]
        k_trunc: Vec<f64>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        no_timestamp: bool,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Nodes { family, out } => {
            let fam = family.parse_family()?;
            let (nodes_path, stats_path) = run_nodes(&fam, &out)?;
            println!("wrote {} and {}", nodes_path.display(), stats_path.display());
        }
        Cmd::Lagrange {
            kernel,
            family,
            out,
            no_timestamp,
        } => {
            let spec = KernelSpec::parse(&kernel)?;
            let fam = family.parse_family()?;
            let opts = OutputOptions {
                timestamp: !no_timestamp,
            };
            for path in run_lagrange(spec, &fam, &out, opts)? {
                println!("wrote {}", path.display());
            }
        }
        Cmd::Precond {
            kernel,
            level,
            tol,
            m,
            seed,
            out,
            no_timestamp,
        } => {
            let spec = KernelSpec::parse(&kernel)?;
            let opts = OutputOptions {
                timestamp: !no_timestamp,
            };
            for path in run_precond(spec, &level, &tol, m, seed, &out, opts)? {
                println!("wrote {}", path.display());
            }
        }
        Cmd::Truncate {
            kernel,
            family,
            k_trunc,
            out,
            no_timestamp,
        } => {
            let spec = KernelSpec::parse(&kernel)?;
            let fam = family.parse_family()?;
            let opts = OutputOptions {
                timestamp: !no_timestamp,
            };
            let path = run_truncate(spec, &fam, &k_trunc, &out, opts)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
