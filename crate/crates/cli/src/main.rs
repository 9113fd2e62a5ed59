mod commands;
mod files;
mod output;
mod specs;

use clap::{Parser, Subcommand, ValueEnum};
use output::{write_atomic, RunReport};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "flowcert",
    version,
    about = "Finite certificates for amenability, paradoxical subshifts and compressible flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest ball (in elements) any step may enumerate.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    cap: usize,
    /// Largest number of search nodes for pattern enumeration.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    node_cap: u64,
    /// Also write a JSON run report (with wall time) to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the ball of a given radius in the standard Cayley graph.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        /// Print every element with its word length.
        #[arg(long)]
        list: bool,
    },
    /// Alternate Følner and expansion searches until one certificate appears.
    Probe {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 12)]
        budget: usize,
        #[arg(long, default_value = "1/5")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search the default Følner family for a set with ratio below epsilon.
    Folner {
        #[arg(long)]
        group: String,
        #[arg(long)]
        epsilon: String,
        /// Largest radius tried.
        #[arg(long, default_value_t = 50)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a 2-to-1 map onto ball(R) with S = ball(1).
    Expand {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and verify a paradoxical-subshift patch.
    Xst {
        #[arg(long, default_value = "F2")]
        group: String,
        #[arg(long, value_enum, default_value_t = XstKind::Xst)]
        kind: XstKind,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select parameters and, in toy mode, build and check a compressible witness patch.
    BuildCompressible {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = Mode::Toy)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        rho: usize,
        #[arg(long, default_value_t = 2)]
        n: u64,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a patch file against a named subshift.
    SubshiftCheck {
        /// golden-mean, hard-core or full:K
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "Z")]
        group: String,
        #[arg(long)]
        patch: PathBuf,
    },
    /// Extend a patch (or nothing) to an admissible patch on ball(R).
    SubshiftExtend {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "Z")]
        group: String,
        #[arg(long)]
        patch: Option<PathBuf>,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-resolution clopen generator test.
    GenCheck {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "Z")]
        group: String,
        /// Radius of the ball read by the labeling.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        /// Radius of the ball of translates compared.
        #[arg(long, default_value_t = 1)]
        window: usize,
        #[arg(long, value_enum, default_value_t = Labeling::Centre)]
        labeling: Labeling,
        #[arg(long, default_value_t = 100_000)]
        max_patches: usize,
    },
    /// Re-verify a certificate or patch file.
    Verify {
        file: PathBuf,
        /// Subshift for patch files.
        #[arg(long)]
        spec: Option<String>,
    },
    /// Search for a word of the F2 tail action taking x to y.
    F2Orbit {
        x: String,
        y: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Odometer steps and the one-digit compression on base-4 digit strings.
    Odometer {
        /// Digits, least significant first.
        digits: String,
        #[arg(long, value_enum)]
        op: OdometerOp,
        /// Index from which the digits are declared to stay in {1,2}.
        #[arg(long)]
        tail_from: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum XstKind {
    Xst,
    Xt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Toy,
    Faithful,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Labeling {
    /// The symbol at the identity.
    Centre,
    /// The whole ball(depth) pattern.
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OdometerOp {
    Up,
    Down,
    Compress,
    Decompress,
}

/// Exit status: produced or verified, definitive failure, or inconclusive within the budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Inconclusive,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Inconclusive => 2,
        }
    }
}

pub struct Ctx {
    pub cap: usize,
    pub node_cap: u64,
    pub report: RunReport,
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Ball { .. } => "ball",
        Command::Probe { .. } => "probe",
        Command::Folner { .. } => "folner",
        Command::Expand { .. } => "expand",
        Command::Xst { .. } => "xst",
        Command::BuildCompressible { .. } => "build-compressible",
        Command::SubshiftCheck { .. } => "subshift-check",
        Command::SubshiftExtend { .. } => "subshift-extend",
        Command::GenCheck { .. } => "gen-check",
        Command::Verify { .. } => "verify",
        Command::F2Orbit { .. } => "f2-orbit",
        Command::Odometer { .. } => "odometer",
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> anyhow::Result<Status> {
    use commands::*;
    match command {
        Command::Ball { group, radius, list } => ball_cmd(ctx, &group, radius, list),
        Command::Probe { group, budget, epsilon, out } => probe_cmd(ctx, &group, budget, &epsilon, out),
        Command::Folner { group, epsilon, budget, out } => folner_cmd(ctx, &group, &epsilon, budget, out),
        Command::Expand { group, radius, out } => expand_cmd(ctx, &group, radius, out),
        Command::Xst { group, kind, radius, out } => xst_cmd(ctx, &group, kind, radius, out),
        Command::BuildCompressible { group, mode, rho, n, radius, out } => {
            build_compressible_cmd(ctx, &group, mode, rho, n, radius, out)
        }
        Command::SubshiftCheck { spec, group, patch } => subshift_check_cmd(ctx, &spec, &group, &patch),
        Command::SubshiftExtend { spec, group, patch, radius, out } => {
            subshift_extend_cmd(ctx, &spec, &group, patch, radius, out)
        }
        Command::GenCheck { spec, group, depth, window, labeling, max_patches } => {
            gen_check_cmd(ctx, &spec, &group, depth, window, labeling, max_patches)
        }
        Command::Verify { file, spec } => verify_cmd(ctx, &file, spec.as_deref()),
        Command::F2Orbit { x, y, depth } => f2_orbit_cmd(ctx, &x, &y, depth),
        Command::Odometer { digits, op, tail_from } => odometer_cmd(ctx, &digits, op, tail_from),
    }
}

/// Budget and cap overruns are inconclusive; every other error is invalid input or a failed check.
fn error_status(err: &anyhow::Error) -> Status {
    match err.downcast_ref::<flowcert::Error>() {
        Some(flowcert::Error::ResourceLimit { .. }) => Status::Inconclusive,
        _ => Status::Failed,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Ctx {
        cap: cli.cap,
        node_cap: cli.node_cap,
        report: RunReport { subcommand: subcommand_name(&cli.command).into(), ..RunReport::default() },
    };
    let status = match dispatch(cli.command, &mut ctx) {
        Ok(s) => s,
        Err(e) => {
            let s = error_status(&e);
            eprintln!("error: {e:#}");
            ctx.report.outcome = match s {
                Status::Inconclusive => "inconclusive".into(),
                _ => "error".into(),
            };
            ctx.report.summary.push(format!("error: {e:#}"));
            s
        }
    };
    ctx.report.exit_code = status.code();
    ctx.report.wall_time_ms = start.elapsed().as_millis();
    if let Some(path) = cli.report {
        let mut text = serde_json::to_string_pretty(&ctx.report).expect("report serializes");
        text.push('\n');
        if let Err(e) = write_atomic(&path, &text) {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(status.code())
}
