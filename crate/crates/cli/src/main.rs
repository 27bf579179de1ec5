use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use catalyx_cli::{
    cmd_catprob, cmd_prob, cmd_synth, cmd_verify, cmd_verify_certificate, is_certificate, Failure, Outcome, Overrides,
    Problem, EXIT_PARSE,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "catalyx", version, about = "Conversion probabilities and catalysts for bipartite pure states.")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug)]
struct Flags {
    /// Working precision for power means; CATALYX_PRECISION_BITS sets the default.
    #[arg(long, global = true)]
    precision_bits: Option<usize>,

    /// Grid points of the ν scan.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Slack used when classifying attainability
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Scale of the target, e.g. "9/10"; overrides the file.
    #[arg(long, global = true)]
    lambda: Option<String>,

    /// Largest accepted λ as a fraction of p_cat.
    #[arg(long, global = true)]
    margin: Option<f64>,

    /// Cap on distinct runs in x⊗c and y⊗c
    #[arg(long, global = true)]
    max_product_size: Option<u128>,

    /// Rescale x and y to unit sum first.
    #[arg(long, global = true)]
    normalize: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-copy probability.
    Prob {
        /// Problem file; stdin when absent or "-"
        file: Option<PathBuf>,
    },
    /// Catalytic probability and attainability.
    Catprob {
        /// Problem file; stdin when absent or "-"
        file: Option<PathBuf>,
        /// Write the ratio curve as CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Build a catalyst for x → λy.
    Synth {
        /// Problem file; stdin when absent or "-"
        file: Option<PathBuf>,
        /// Certificate path; without it the certificate goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact check of a catalyst, from the problem file or a certificate.
    Verify {
        /// Problem file; stdin when absent or "-"
        file: Option<PathBuf>,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    let io_failure = |e: io::Error| Failure { code: EXIT_PARSE, message: format!("cannot read input: {e}") };
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map_err(io_failure),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(io_failure)?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let f = cli.flags;
    let default_precision_bits = match std::env::var("CATALYX_PRECISION_BITS") {
        Ok(v) => Some(v.trim().parse().map_err(|_| Failure {
            code: EXIT_PARSE,
            message: format!("CATALYX_PRECISION_BITS={v:?} is not a bit count"),
        })?),
        Err(_) => None,
    };
    let overrides = Overrides {
        default_precision_bits,
        precision_bits: f.precision_bits,
        grid: f.grid,
        tolerance: f.tolerance,
        lambda: f.lambda,
        margin: f.margin,
        max_product_size: f.max_product_size,
        normalize: f.normalize,
    };
    let path_str = |p: Option<PathBuf>| p.map(|p| p.to_string_lossy().into_owned());
    match cli.command {
        Command::Prob { file } => cmd_prob(&Problem::parse(&read_input(file.as_ref())?, &overrides)?),
        Command::Catprob { file, curve } => {
            cmd_catprob(&Problem::parse(&read_input(file.as_ref())?, &overrides)?, path_str(curve).as_deref())
        }
        Command::Synth { file, out } => {
            cmd_synth(&Problem::parse(&read_input(file.as_ref())?, &overrides)?, path_str(out).as_deref())
        }
        Command::Verify { file, certificate } => {
            let cap = overrides.max_product_size.unwrap_or(catalyx::catalysis::DEFAULT_PRODUCT_CAP);
            if let Some(cert) = certificate {
                return cmd_verify_certificate(&read_input(Some(&cert))?, cap);
            }
            let text = read_input(file.as_ref())?;
            if is_certificate(&text) {
                cmd_verify_certificate(&text, cap)
            } else {
                cmd_verify(&Problem::parse(&text, &overrides)?)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            for (path, contents) in &out.files {
                if let Err(e) = std::fs::write(path, contents) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(EXIT_PARSE as u8);
                }
            }
            let _ = io::stdout().write_all(out.stdout.as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
