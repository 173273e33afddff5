mod commands;
mod error;
mod format;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noisy_distill::verify::VerifyConfig;

use commands::{MixedArgs, Quantity, SweepSpec};
use error::{CliError, EXIT_OK};
use format::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "noisy-distill", version, about = "Entanglement distillation with noisy measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reference tables of lower bounds and filtered fidelities.
    Tables {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Directory receiving one file per table (default: all tables on stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one quantity over a parameter grid.
    Sweep(SweepArgs),
    /// Compare the closed forms against density-matrix simulation.
    Verify(VerifyArgs),
    /// One or more rounds of the two-copy recurrence protocol.
    DistillMixed(DistillMixedArgs),
    /// Local filtering of a pure state.
    DistillPure(DistillPureArgs),
    /// Coefficients of a purified measurement.
    PovmPurify(PovmPurifyArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(value_enum)]
    quantity: Quantity,
    /// Noise fraction axis: `a,b,...` or `start:stop:count`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Alice's gadget size: `a,b,...` or `start:stop`.
    #[arg(long)]
    n: Option<String>,
    /// Bob's gadget size: `a,b,...` or `start:stop`.
    #[arg(long)]
    m: Option<String>,
    /// Tie Bob's gadget size to Alice's.
    #[arg(long)]
    m_equals_n: bool,
    #[arg(long = "F")]
    f: Option<String>,
    /// Angle axis in radians.
    #[arg(long, conflicts_with = "theta_frac_pi")]
    theta: Option<String>,
    /// Angle axis in units of pi.
    #[arg(long)]
    theta_frac_pi: Option<String>,
    /// Draw every noise fraction uniformly from `lo,hi` instead of using `--p`.
    #[arg(long)]
    band: Option<String>,
    /// Records per grid point in band mode.
    #[arg(long, default_value_t = 1)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    max_n: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    draws: usize,
    /// Also simulate the unreduced registers (up to 8 qubits).
    #[arg(long)]
    full: bool,
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb_analytic: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DistillMixedArgs {
    #[arg(long = "F")]
    f: f64,
    /// Noise fraction for every measurement.
    #[arg(long)]
    p: Option<f64>,
    /// Alice's noise fractions, comma separated.
    #[arg(long = "pA")]
    p_a: Option<String>,
    /// Bob's noise fractions, comma separated.
    #[arg(long = "pB")]
    p_b: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DistillPureArgs {
    /// Schmidt angle in radians.
    #[arg(long, conflicts_with = "theta_frac_pi")]
    theta: Option<f64>,
    /// Schmidt angle in units of pi.
    #[arg(long)]
    theta_frac_pi: Option<f64>,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PovmPurifyArgs {
    #[arg(long, conflicts_with = "p_list")]
    p: Option<f64>,
    /// Per-qubit noise fractions, comma separated.
    #[arg(long)]
    p_list: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: Output,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Tables { format, out } => commands::cmd_tables(format, out.as_deref()),
        Command::Sweep(a) => {
            let spec = SweepSpec {
                quantity: Some(a.quantity),
                p: a.p,
                epsilon: a.epsilon,
                n: a.n,
                m: a.m,
                f: a.f,
                theta: a.theta,
                theta_frac_pi: a.theta_frac_pi,
                m_equals_n: a.m_equals_n,
                band: a.band,
                draws: a.draws,
                seed: a.seed,
            };
            let table = commands::run_sweep(&spec)?;
            emit(&table.render(a.output.format)?, a.output.out.as_deref())
        }
        Command::Verify(a) => {
            let cfg = VerifyConfig {
                max_n: a.max_n,
                seed: a.seed,
                draws: a.draws,
                full: a.full,
                analytic_offset: a.perturb_analytic,
                ..VerifyConfig::default()
            };
            commands::cmd_verify(&cfg, a.output.format, a.output.out.as_deref())
        }
        Command::DistillMixed(a) => {
            let args = MixedArgs {
                f: a.f,
                p: a.p,
                p_a: a.p_a,
                p_b: a.p_b,
                n: a.n,
                m: a.m,
                epsilon: a.epsilon,
                rounds: a.rounds,
            };
            let table = commands::run_distill_mixed(&args)?;
            emit(&table.render(a.output.format)?, a.output.out.as_deref())
        }
        Command::DistillPure(a) => {
            let theta = commands::resolve_theta(a.theta, a.theta_frac_pi)?;
            let table = commands::run_distill_pure(theta, a.p, a.epsilon, a.n)?;
            emit(&table.render(a.output.format)?, a.output.out.as_deref())
        }
        Command::PovmPurify(a) => {
            let table = commands::run_povm_purify(a.p, a.p_list.as_deref(), a.epsilon, a.n)?;
            emit(&table.render(a.output.format)?, a.output.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
