use crate::commands;
use crate::input::InputError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "rvw",
    version,
    about = "Exact verifiers for restricted-variable counting bounds"
)]
pub struct Cli {
    /// Worker threads for grid sweeps (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub workers: u64,
    /// Seed for `--random` instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum product over ball distributions.
    Mbound(MboundArgs),
    /// Apply the Delta operator to a polynomial on a box.
    Delta(DeltaArgs),
    /// Check a counting bound on a polynomial system.
    Verify(VerifyArgs),
    /// Davenport constant of a p-group by exhaustive search.
    Davenport(DavenportArgs),
    /// Count g-sum subsequences.
    Ngsum(SeqArgs),
    /// Count weighted subsequence sums.
    Gensub(SeqArgs),
    /// Subfamilies whose union size is divisible by m.
    Setsystem(SetSystemArgs),
    /// Erdos-Ginzburg-Ziv style weighted counts, or the classical statement.
    Egz(EgzArgs),
    /// Weighted zero-sum counts with equal weight sets.
    Dags(SeqArgs),
}

#[derive(Debug, Args)]
pub struct MboundArgs {
    /// Bin capacities, e.g. `3,3,2`.
    #[arg(long)]
    pub bins: String,
    #[arg(long, allow_negative_numbers = true)]
    pub balls: i64,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    #[arg(long)]
    pub p: Option<u64>,
    /// Box set; repeat per variable or give once for all.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub boxes: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long)]
    pub nvars: Option<usize>,
    /// Number of Delta applications.
    #[arg(long, default_value_t = 1)]
    pub iterations: usize,
    /// Read `{prime, polys, box}` from a JSON file.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Rvw2,
    Warning2,
    Chevalley,
    Brink,
    Schanuel,
    Alonfuredi,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: VerifyKind,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Check this many seeded random instances instead of one given instance.
    #[arg(long)]
    pub random: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub p: Option<u64>,
    /// Finite field `p,ell`.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long = "box", allow_hyphen_values = true)]
    pub boxes: Vec<String>,
    #[arg(long = "poly", allow_hyphen_values = true)]
    pub polys: Vec<String>,
    /// Exponent of the modulus per polynomial; one value applies to all.
    #[arg(long = "v")]
    pub exps: Vec<u32>,
    #[arg(long)]
    pub nvars: Option<usize>,
    /// Per-variable caps for the split expansion.
    #[arg(long)]
    pub caps: Option<String>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DavenportArgs {
    /// Group `p:v1,v2,...` for the sum of Z/p^v_i.
    #[arg(long)]
    pub group: String,
    /// Search node budget.
    #[arg(long, default_value_t = rvw_core::zerosum::DAVENPORT_NODE_LIMIT)]
    pub max_nodes: u64,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[arg(long)]
    pub group: Option<String>,
    /// Elements: `1,2,2` for cyclic groups, `1,0;0,1` otherwise.
    #[arg(long)]
    pub seq: Option<String>,
    /// Weight set; repeat per entry or give once for all.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub boxes: Vec<String>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub random: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SetSystemArgs {
    /// Member sets as atom lists, `0,1;1,2`.
    #[arg(long)]
    pub sets: Option<String>,
    #[arg(long)]
    pub modulus: u64,
    #[arg(long, default_value_t = 0)]
    pub target: u64,
    /// Use the extremal system of this maximal degree.
    #[arg(long, conflicts_with = "sets")]
    pub extremal: Option<u64>,
    #[arg(long, conflicts_with_all = ["sets", "extremal"])]
    pub random: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EgzArgs {
    /// Check the classical statement for Z/m exhaustively.
    #[arg(long, conflicts_with_all = ["group", "seq"])]
    pub classic: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[command(flatten)]
    pub seq: SeqArgs,
}

/// What one invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Result of a command before rendering.
pub struct Report {
    pub body: Map<String, Value>,
    /// Some verdict was VIOLATED or a check failed.
    pub failed: bool,
    pub summary: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers as usize)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return failure(format!("cannot start worker pool: {e}")),
    };
    let result = pool.install(|| commands::dispatch(&cli.command, cli.seed));
    let report = match result {
        Ok(r) => r,
        Err(InputError::Usage(msg)) => return failure(format!("usage: {msg}")),
        Err(e) => return failure(format!("error: {e}")),
    };
    let mut body = report.body;
    body.insert("seed".into(), Value::from(cli.seed));
    let mut text =
        serde_json::to_string_pretty(&Value::Object(body)).expect("JSON values serialize");
    text.push('\n');
    let code = if report.failed { 2 } else { 0 };
    let stderr = format!("{}\n", report.summary);
    match &cli.json_out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => failure(format!("error: {}: {e}", path.display())),
        },
        None => Outcome {
            code,
            stdout: text,
            stderr,
        },
    }
}

fn failure(msg: String) -> Outcome {
    Outcome {
        code: 1,
        stdout: String::new(),
        stderr: format!("{msg}\n"),
    }
}
