mod commands;
mod prover;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qam_core::report::Format;
use qam_core::Error;

#[derive(Parser, Debug)]
#[command(name = "qam", version, about = "Exact simulator for a qAM verifier deciding SUBSET-SUM")]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    format: OutputFormat,

    /// How long to wait for each external prover reply.
    #[arg(long, value_name = "MS", default_value_t = 10_000, global = true)]
    prover_timeout_ms: u64,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Human,
    Structured,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Human => Format::Human,
            OutputFormat::Structured => Format::Structured,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the completeness relation of the eight protocol superoperators.
    ValidateOps {
        /// Perturb one matrix entry of the named operator first.
        #[arg(long, value_name = "OPERATOR", hide = true)]
        corrupt: Option<String>,
    },
    /// Exact pass probabilities, overall verdict and expected passes.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        witness: WitnessArgs,
    },
    /// Follow the surviving branch symbol by symbol.
    Trace {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        witness: WitnessArgs,
    },
    /// Monte-Carlo passes compared against the exact probabilities.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        witness: WitnessArgs,
        #[arg(long)]
        passes: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduce a 3-CNF formula to a SUBSET-SUM instance.
    Reduce {
        #[arg(long, value_name = "FILE")]
        cnf: PathBuf,
    },
    /// Reduce, decide classically, and run the protocol on the result.
    EndToEnd {
        #[arg(long, value_name = "FILE")]
        cnf: PathBuf,
    },
    /// Error after repeating the protocol sequentially.
    Amplify {
        #[arg(long)]
        rounds: u32,
        /// Single-run error probability.
        #[arg(long, default_value = "1/10")]
        base: String,
        /// Also report the rounds needed to reach this error.
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Instance line "S a1 ... an".
    #[arg(long)]
    instance: Option<String>,
    /// File whose first nonblank line is an instance.
    #[arg(long, value_name = "FILE")]
    instance_file: Option<PathBuf>,
    /// Raw tape over {0,1,#}; endmarkers are implied.
    #[arg(long)]
    tape: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct WitnessArgs {
    /// Comma-separated select/skip list, one entry per value.
    #[arg(long)]
    witness: Option<String>,
    /// Use a brute-force witness, or the strongest fixed selection if none exists.
    #[arg(long)]
    oracle: bool,
    /// Shell command of an external prover.
    #[arg(long, value_name = "CMD")]
    prover_cmd: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Inconsistent(_) | Error::Unresolved(_)) => 1,
            _ => 2,
        }
    }
}

/// Rendered output plus whether every checked property held.
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let format = Format::from(cli.format);
    let ctx = commands::Context {
        format,
        prover_timeout: std::time::Duration::from_millis(cli.prover_timeout_ms),
    };
    match cli.command {
        Cmd::ValidateOps { corrupt } => commands::validate_ops(&ctx, corrupt.as_deref()),
        Cmd::Analyze { input, witness } => commands::analyze(&ctx, &input.into(), &witness.into()),
        Cmd::Trace { input, witness } => commands::trace(&ctx, &input.into(), &witness.into()),
        Cmd::Sample { input, witness, passes, seed } => {
            commands::sample(&ctx, &input.into(), &witness.into(), passes, seed)
        }
        Cmd::Reduce { cnf } => commands::reduce(&ctx, &cnf),
        Cmd::EndToEnd { cnf } => commands::end_to_end(&ctx, &cnf),
        Cmd::Amplify { rounds, base, target } => commands::amplify(&ctx, rounds, &base, target.as_deref()),
    }
}

impl From<InputArgs> for commands::InputSource {
    fn from(a: InputArgs) -> Self {
        match (a.instance, a.instance_file, a.tape) {
            (Some(s), _, _) => commands::InputSource::Instance(s),
            (_, Some(p), _) => commands::InputSource::InstanceFile(p),
            (_, _, Some(t)) => commands::InputSource::Tape(t),
            _ => unreachable!("clap requires one input"),
        }
    }
}

impl From<WitnessArgs> for commands::WitnessSource {
    fn from(a: WitnessArgs) -> Self {
        match (a.witness, a.oracle, a.prover_cmd) {
            (Some(w), _, _) => commands::WitnessSource::Inline(w),
            (_, true, _) => commands::WitnessSource::Oracle,
            (_, _, Some(c)) => commands::WitnessSource::Prover(c),
            _ => unreachable!("clap requires one witness source"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
