mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use cnc_core::{Error, WMode, DEFAULT_CAP};
use serde_json::{json, Map};

use crate::commands::Outcome;
use crate::report::{Format, Report};

/// Finite ring exponents, CNC chains and their brute-force checks.
#[derive(Parser, Debug)]
#[command(name = "cnc", version)]
struct Cli {
    /// Largest number of elements any enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print nothing on stdout; the exit status still reports the outcome.
    #[arg(long, global = true)]
    quiet: bool,
    /// Add wall-clock timing to the report (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cardinality, unit count and multiplicative order of a ring.
    Info { ring: String },
    /// Units of a ring with their order histogram.
    Units { ring: String },
    /// CNC chain checks.
    #[command(subcommand)]
    Cnc(CncCommand),
    /// Exponent bounds M1, M2, M3 for a chain, each checked against the unit group.
    Bounds {
        ring: String,
        /// Generator lists separated by ';', e.g. "2;4".
        #[arg(long)]
        chain: String,
        #[arg(long, default_value = "ring_order")]
        w_mode: String,
    },
    /// lcm exponent over a direct product: pairs of ring and chain.
    Euler {
        #[arg(required = true, num_args = 2..)]
        pairs: Vec<String>,
    },
    /// Seeded random units of Z/p^k[x] checked against (p-1)p^(k-1).
    SamplePoly {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        deg: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum CncCommand {
    /// Check an explicit chain.
    Verify {
        ring: String,
        #[arg(long)]
        chain: String,
    },
    /// Check the chain of powers of the ideal generated by `gen`.
    Auto {
        ring: String,
        #[arg(long)]
        gen: String,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> (String, Result<Outcome, Error>) {
    let cap = cli.cap;
    match &cli.command {
        Command::Info { ring } => ("info".into(), commands::info(ring, cap)),
        Command::Units { ring } => ("units".into(), commands::units(ring, cap)),
        Command::Cnc(CncCommand::Verify { ring, chain }) => {
            ("cnc verify".into(), commands::cnc_verify(ring, chain, cap))
        }
        Command::Cnc(CncCommand::Auto { ring, gen }) => {
            ("cnc auto".into(), commands::cnc_auto(ring, gen, cap))
        }
        Command::Bounds {
            ring,
            chain,
            w_mode,
        } => (
            "bounds".into(),
            w_mode
                .parse::<WMode>()
                .and_then(|w| commands::bounds(ring, chain, w, cap)),
        ),
        Command::Euler { pairs } => ("euler".into(), commands::euler(pairs, cap)),
        Command::SamplePoly {
            p,
            k,
            deg,
            count,
            seed,
        } => (
            "sample-poly".into(),
            commands::sample_poly(*p, *k, *deg, *count, *seed),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (command, outcome) = run(&cli);
    let elapsed = start.elapsed().as_millis();

    let args: Vec<String> = std::env::args().skip(1).collect();
    let report = match outcome {
        Ok(o) => Report {
            command,
            args,
            inputs: o.inputs,
            result: o.result,
            status: if o.failed {
                "verification_failed"
            } else {
                "ok"
            },
            exit_code: if o.failed { 1 } else { 0 },
            timing_ms: cli.timing.then_some(elapsed),
        },
        Err(e) => {
            eprintln!("{}: {e}", e.category());
            Report {
                command,
                args,
                inputs: Map::new(),
                result: json!({ "category": e.category(), "message": e.to_string() }),
                status: "error",
                exit_code: exit_code(&e),
                timing_ms: cli.timing.then_some(elapsed),
            }
        }
    };
    if !cli.quiet {
        print!("{}", report.render(cli.format));
    }
    ExitCode::from(report.exit_code as u8)
}
