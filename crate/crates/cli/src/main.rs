use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsl::commands::{run, Command, Format, SolveConfig};

/// Fractional Sturm-Liouville eigenvalue solver.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a problem file and write the spectrum, eigenfunctions and residuals.
    Solve {
        #[command(flatten)]
        solve: SolveArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Both)]
        format: FormatArg,
    },
    /// Compare oscillator eigenvalues between orders.
    OscillatorSuite {
        /// Interval endpoints, `a,b`.
        #[arg(long, value_parser = parse_interval, default_value = "0,3.141592653589793")]
        interval: (f64, f64),
        /// Constant coefficient p.
        #[arg(long = "p", default_value_t = 1.0)]
        p0: f64,
        /// Fractional orders; order 1 is always added.
        #[arg(long, value_delimiter = ',', default_value = "0.6,0.75,0.9")]
        orders: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        jmax: usize,
        #[arg(long, default_value_t = 2048)]
        grid_n: usize,
        #[arg(long, default_value_t = 24)]
        m_max: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Both)]
        format: FormatArg,
    },
    /// Check the fractional-operator identities numerically.
    ValidateOps {
        #[arg(long, default_value_t = 2048)]
        grid_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that the first eigenfunction minimizes the Rayleigh quotient.
    RayleighCheck {
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write rayleigh.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 2048)]
    grid_n: usize,
    /// Smallest basis size in the convergence trace (default: eigs).
    #[arg(long)]
    m_min: Option<usize>,
    #[arg(long, default_value_t = 24)]
    m_max: usize,
    /// Number of eigenpairs.
    #[arg(long, default_value_t = 3)]
    eigs: usize,
}

impl From<SolveArgs> for SolveConfig {
    fn from(a: SolveArgs) -> Self {
        SolveConfig {
            spec_path: a.spec,
            grid_n: a.grid_n,
            m_min: a.m_min.unwrap_or(a.eigs),
            m_max: a.m_max,
            n_eigs: a.eigs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Both => Format::Both,
        }
    }
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn main() -> ExitCode {
    let command = match Cli::parse().command {
        Cmd::Solve { solve, out, format } => Command::Solve {
            solve: solve.into(),
            out_dir: out,
            format: format.into(),
        },
        Cmd::OscillatorSuite {
            interval,
            p0,
            orders,
            jmax,
            grid_n,
            m_max,
            out,
            format,
        } => Command::OscillatorSuite {
            interval,
            p0,
            orders,
            j_max: jmax,
            grid_n,
            m_max,
            out_dir: out,
            format: format.into(),
        },
        Cmd::ValidateOps { grid_n, seed } => Command::ValidateOps { grid_n, seed },
        Cmd::RayleighCheck { solve, seed, out } => Command::RayleighCheck {
            solve: solve.into(),
            seed,
            out_dir: out,
        },
    };
    match run(&command, &mut std::io::stdout().lock()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
