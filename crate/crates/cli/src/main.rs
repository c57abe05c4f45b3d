mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use sigcalc::dlp::Oracle;
use sigcalc::reduction::Case;

use output::{Format, Outcome};

#[derive(Parser, Debug)]
#[command(name = "sigcalc", version, about = "Ramification signature reductions and checks")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseArg {
    A,
    B,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Case {
        match c {
            CaseArg::A => Case::A,
            CaseArg::B => Case::B,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleArg {
    Bsgs,
    PohligHellman,
    Exhaustive,
}

impl From<OracleArg> for Oracle {
    fn from(o: OracleArg) -> Oracle {
        match o {
            OracleArg::Bsgs => Oracle::Bsgs,
            OracleArg::PohligHellman => Oracle::PohligHellman,
            OracleArg::Exhaustive => Oracle::Exhaustive,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Lemma31,
    Lemma32,
    Proportionality,
    Classnumbers,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Forms,
    Ideals,
    Both,
}

#[derive(clap::Args, Debug, Clone)]
struct InstanceArgs {
    #[arg(long)]
    p: BigUint,
    #[arg(long)]
    l: BigUint,
    /// Expected case; rejected if `(p, l)` falls in the other one.
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    #[arg(long, env = "SIGCALC_SEED", default_value_t = 0)]
    seed: u64,
    /// Exponent of the target; drawn from the seed when absent.
    #[arg(long)]
    m: Option<BigUint>,
    /// Draws of k allowed per field (default 8 l).
    #[arg(long)]
    budget: Option<u64>,
    /// Fields tried before reporting a class number obstruction.
    #[arg(long, default_value_t = 20)]
    max_fields: usize,
    #[arg(long, value_enum, default_value_t = OracleArg::PohligHellman)]
    oracle: OracleArg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a prime p of the given size and a prime l >= 5 dividing p+1 (A) or p-1 (B).
    GenParams {
        #[arg(long)]
        bits: u32,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, env = "SIGCALC_SEED", default_value_t = 0)]
        seed: u64,
        /// Candidate draws before giving up.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Lift a random target, sign it and recover m mod l.
    Roundtrip(InstanceArgs),
    /// Lift a random target and emit the signed instance record.
    Signature(InstanceArgs),
    /// Recover m mod l from an instance record ("-" reads stdin).
    Recover {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest l (lemma31) or d (classnumbers).
        #[arg(long)]
        bound: Option<u64>,
        /// Sample count (lemma32) or targets per pair (proportionality).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, env = "SIGCALC_SEED", default_value_t = 0)]
        seed: u64,
        /// Restrict the proportionality suite to one pair.
        #[arg(long, requires = "l")]
        p: Option<BigUint>,
        #[arg(long, requires = "p")]
        l: Option<BigUint>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Class number of Q(sqrt(d)).
    ClassNumber {
        #[arg(long, allow_hyphen_values = true)]
        d: BigInt,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Report whether this prime divides h.
        #[arg(long)]
        l: Option<BigUint>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenParams {
            bits,
            case,
            seed,
            budget,
        } => commands::gen_params(bits, case.into(), seed, budget),
        Command::Roundtrip(args) => commands::roundtrip(&args),
        Command::Signature(args) => commands::signature(&args),
        Command::Recover { input } => commands::recover(&input),
        Command::Verify {
            suite,
            bound,
            samples,
            seed,
            p,
            l,
            budget,
        } => commands::verify(suite, bound, samples, seed, p.zip(l), budget),
        Command::ClassNumber { d, method, l } => commands::class_number(&d, method, l.as_ref()),
    };
    emit(outcome, cli.format, cli.output.as_deref())
}

fn emit(outcome: Outcome, format: Format, path: Option<&std::path::Path>) -> ExitCode {
    let code = outcome.exit_code();
    if let Err(e) = output::write(&outcome.report, format, path) {
        eprintln!("sigcalc: cannot write report: {e}");
        return ExitCode::from(1);
    }
    if let Some(msg) = &outcome.message {
        eprintln!("sigcalc: {msg}");
    }
    ExitCode::from(code)
}
