use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use msx_core::cli::runner::verify_line;
use msx_core::cli::{document, parse, Output, Runner, Scope};
use msx_core::scalar::parse_scalar;
use msx_core::verify::{run_suite_with, traceability_markdown, Mutation, SuiteId, SuiteParams};

const EXIT_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "msx", version, about = "Exact multisymplectic geometry engine")]
struct Cli {
    #[command(flatten)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    /// Emit JSON (default).
    #[arg(long, global = true)]
    json: bool,
    /// Emit one human-readable line per result.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an .msx script.
    Run {
        file: PathBuf,
        /// Default seed for `verify` statements.
        #[arg(long, env = "MSX_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Read statements from stdin one line at a time.
    Repl {
        #[arg(long, env = "MSX_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite id, or `all` for every suite at its default size.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "MSX_SEED", default_value_t = 0)]
    seed: u64,
    /// Print the suite traceability table as markdown and exit.
    #[arg(long)]
    list: bool,
    /// Multiply the energy term of Θ on Z by this rational (mutation testing).
    #[arg(long, value_name = "Q")]
    theta_scale: Option<String>,
}

/// Writes a line to stdout, ignoring a closed pipe.
fn emit(line: &str) {
    let _ = writeln!(io::stdout().lock(), "{line}");
}

fn print_doc(doc: &Value) {
    emit(&serde_json::to_string_pretty(doc).expect("JSON values serialize"));
}

fn finish(outputs: &[Output], text: bool) -> ExitCode {
    if text {
        for o in outputs {
            emit(&o.to_text());
        }
    } else {
        print_doc(&document(outputs, None));
    }
    if outputs.iter().all(Output::ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_ERROR)
}

fn run_file(file: &PathBuf, seed: u64, text: bool) -> ExitCode {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {e}", file.display())),
    };
    let script = match parse(&src) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {e}", file.display())),
    };
    let mut runner = Runner::new(seed);
    let mut outputs = Vec::new();
    for stmt in &script.statements {
        match runner.exec(stmt) {
            Ok(Some(o)) => outputs.push(o),
            Ok(None) => {}
            Err(e) => {
                if !text {
                    print_doc(&document(&outputs, Some(&e)));
                }
                return fail(format!("{}:{e}", file.display()));
            }
        }
    }
    finish(&outputs, text)
}

fn verify(args: &VerifyArgs, text: bool) -> ExitCode {
    if args.list {
        emit(traceability_markdown().trim_end());
        return ExitCode::SUCCESS;
    }
    let mutation = match &args.theta_scale {
        None => Mutation::default(),
        Some(q) => match parse_scalar(q).map(|s| s.as_constant()) {
            Ok(Some(theta_scale)) => Mutation { theta_scale },
            _ => {
                return fail(format!(
                    "--theta-scale expects a rational constant, got `{q}`"
                ))
            }
        },
    };
    let suites: Vec<SuiteId> = if args.suite == "all" {
        SuiteId::ALL.to_vec()
    } else {
        match args.suite.parse() {
            Ok(id) => vec![id],
            Err(e) => return fail(e),
        }
    };
    let mut outputs = Vec::new();
    for id in suites {
        let d = id.default_params();
        let params = SuiteParams {
            n: args.n.unwrap_or(d.n),
            k: args.k.unwrap_or(d.k),
            m: args.m.or(d.m),
            trials: args.trials.unwrap_or(d.trials),
            seed: args.seed,
        };
        match run_suite_with(id, params, &mutation) {
            Ok(r) => {
                if text {
                    emit(&verify_line(&r));
                }
                outputs.push(Output::Verify(r));
            }
            Err(e) => return fail(e),
        }
    }
    if text {
        return if outputs.iter().all(Output::ok) {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_FAILED)
        };
    }
    finish(&outputs, false)
}

fn repl(seed: u64, text: bool) -> ExitCode {
    let mut scope = Scope::default();
    let mut runner = Runner::new(seed);
    let mut any_failed = false;
    for line in io::stdin().lock().lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => return fail(e),
        };
        // Parse against a copy so a bad line leaves the scope untouched.
        let mut trial = scope.clone();
        let script = match trial.parse(&line) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                continue;
            }
        };
        scope = trial;
        for stmt in &script.statements {
            match runner.exec(stmt) {
                Ok(Some(o)) => {
                    any_failed |= !o.ok();
                    emit(&if text {
                        o.to_text()
                    } else {
                        o.to_json().to_string()
                    });
                }
                Ok(None) => {}
                Err(e) => eprintln!("error: {}", e.error),
            }
        }
    }
    if any_failed {
        ExitCode::from(EXIT_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let text = cli.format.text;
    match &cli.command {
        Command::Run { file, seed } => run_file(file, *seed, text),
        Command::Verify(args) => verify(args, text),
        Command::Repl { seed } => repl(*seed, text),
    }
}
