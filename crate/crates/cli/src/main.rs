mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bethe_potts::exec::Execution;
use bethe_potts::ground_states::Family;
use bethe_potts::tolerances::CRITICAL_CURVE;
use clap::{Parser, Subcommand};

use args::{BoundaryArg, Grid, ParamArgs};
use output::Format;

/// Exact recursions, fixed points, phase diagrams and ground states for the
/// three-state Potts model with competing interactions on the binary tree.
#[derive(Debug, Parser)]
#[command(name = "bethe-potts", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate the partition-function recursion from a boundary condition.
    Recurse {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// free, e1, e2, e3 or field:h1,h2
        #[arg(long, default_value = "free")]
        boundary: BoundaryArg,
        /// Emit all 18 normalized components instead of the ratios.
        #[arg(long)]
        full: bool,
    },
    /// Translation-invariant fixed points with their stability.
    FixedPoints {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Transition label on a J/J1 by T/J1 grid. Pass --grid twice.
    PhaseDiagram {
        /// a:b:n for J/J1, then a:b:n for T/J1.
        #[arg(long = "grid", required = true, num_args = 1, allow_hyphen_values = true)]
        grids: Vec<Grid>,
    },
    /// Critical T/J1 as a function of J/J1.
    CriticalCurve {
        #[arg(long, default_value = "0:5:51", allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long, default_value_t = CRITICAL_CURVE)]
        tol: f64,
    },
    /// Check the standard ground-state families against given couplings.
    GroundStates {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// all, ti, quasi or periodic:k
        #[arg(long, default_value = "all")]
        family: String,
    },
    /// Free energy, internal energy and magnetization of the ordered phase.
    FreeEnergy {
        #[command(flatten)]
        params: ParamArgs,
        /// Sweep beta over a:b:n (needs --jp/--j1p).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Number of series terms.
        #[arg(long, default_value_t = 40)]
        terms: usize,
        /// Depth of the exact root marginal.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Run the acceptance checks.
    Verify {
        /// Largest enumeration depth, 1 to 3.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 20240501)]
        seed: u64,
        /// Perturb one recursion coefficient to exercise the harness.
        #[arg(long)]
        inject_fault: bool,
    },
}

/// An error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 1, message: msg.into() }
    }
}

impl From<bethe_potts::Error> for Failure {
    fn from(e: bethe_potts::Error) -> Self {
        use bethe_potts::Error::*;
        let code = match e {
            Numerical(_) | NoSolution(_) => 2,
            InvalidParameter(_) | DepthOutOfRange { .. } | Unsupported(_) | OnBoundary(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure { code: 1, message: format!("{e:#}") }
    }
}

fn parse_families(s: &str) -> Result<Vec<Family>, Failure> {
    Ok(match s {
        "all" => vec![Family::TranslationInvariant, Family::Quasi, Family::Periodic(2), Family::Periodic(3), Family::Periodic(4)],
        "ti" => vec![Family::TranslationInvariant],
        "quasi" => vec![Family::Quasi],
        _ => {
            let k = s
                .strip_prefix("periodic:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| (2..=8).contains(&k))
                .ok_or_else(|| Failure::usage(format!("unknown family '{s}'")))?;
            vec![Family::Periodic(k)]
        }
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    let exec = Execution::Parallel;
    let table = match cli.command {
        Command::Recurse { params, depth, boundary, full } => commands::recurse(&params.resolve()?, boundary.0, depth, full)?,
        Command::FixedPoints { params } => commands::fixed_points(&params.resolve()?)?,
        Command::PhaseDiagram { grids } => {
            let [j, t] = grids[..] else {
                return Err(Failure::usage("phase-diagram needs exactly two --grid values: J/J1 then T/J1"));
            };
            commands::phase_diagram(&j, &t, exec)?
        }
        Command::CriticalCurve { grid, tol } => {
            if !(tol > 0.0) {
                return Err(Failure::usage("--tol must be positive"));
            }
            commands::critical(&grid, tol, exec)?
        }
        Command::GroundStates { params, depth, family } => {
            if !(1..=16).contains(&depth) {
                return Err(Failure::usage("ground-state depth must be between 1 and 16"));
            }
            commands::ground_states(&params, depth, &parse_families(&family)?)?
        }
        Command::FreeEnergy { params, grid, terms, depth } => {
            commands::free_energy(&params, grid.as_ref(), terms, depth, exec)?
        }
        Command::Verify { depth, seed, inject_fault } => {
            if !(1..=3).contains(&depth) {
                return Err(Failure::usage("verify depth must be 1, 2 or 3"));
            }
            let (table, ok) = commands::verify(depth, seed, inject_fault, exec);
            table.write(cli.format, cli.out.as_deref())?;
            if !ok {
                return Err(Failure { code: 3, message: "verification failed".into() });
            }
            return Ok(());
        }
    };
    table.write(cli.format, cli.out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
