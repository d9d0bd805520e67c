use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bethck_core::formulas::parse_sentence;
use bethck_core::mutation::Mutation;
use bethck_core::semantics::{forces, parse_model};
use bethck_core::suites::{cmd_check_z, cmd_demo_beth_failure, cmd_finite_oracle, cmd_verify_lemmas, Report};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bethck", version, about = "Checks a constant-domain Kripke countermodel to Beth definability")]
struct Cli {
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Run with a deliberate fault injected.
    #[arg(long, global = true, hide = true)]
    mutant: Option<Mutation>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure, companion and world facts on random sets and worlds.
    VerifyLemmas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Witness constructors for the relation between the two models.
    CheckZ {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        tuple_len: usize,
    },
    /// Exhaustive definability and transfer checks on small finite models.
    FiniteOracle {
        #[arg(long, default_value_t = 2)]
        max_worlds: usize,
        #[arg(long, default_value_t = 2)]
        max_dom: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// The end-to-end argument at the two base points.
    DemoBethFailure,
    /// Evaluate a sentence at a world of a finite model.
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long)]
        world: usize,
        #[arg(long)]
        formula: String,
    },
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    std::fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn finish(report: Report, json: Option<&Path>) -> ExitCode {
    print!("{}", report.render());
    if let Some(path) = json {
        if let Err(e) = write_json(path, &report.to_json()) {
            return usage(e);
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn eval(model: &Path, world: usize, formula: &str, json: Option<&Path>) -> ExitCode {
    let text = match std::fs::read_to_string(model) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read {}: {e}", model.display())),
    };
    let m = match parse_model(&text) {
        Ok(m) => m,
        Err(e) => return usage(format!("{}: {e}", model.display())),
    };
    let f = match parse_sentence(formula) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let forced = match forces(&m, world, &f, &[]) {
        Ok(b) => b,
        Err(e) => return usage(e),
    };
    println!("{}", if forced { "forced" } else { "not forced" });
    if let Some(path) = json {
        let value = serde_json::json!({
            "model": model.display().to_string(),
            "world": world,
            "formula": f.to_string(),
            "forced": forced,
        });
        if let Err(e) = write_json(path, &value) {
            return usage(e);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json.as_deref();
    match cli.command {
        Command::VerifyLemmas { seed, samples } => finish(cmd_verify_lemmas(seed, samples, cli.mutant), json),
        Command::CheckZ { seed, samples, tuple_len } => match cmd_check_z(seed, samples, tuple_len, cli.mutant) {
            Ok(r) => finish(r, json),
            Err(e) => usage(e),
        },
        Command::FiniteOracle { max_worlds, max_dom, depth } => match cmd_finite_oracle(max_worlds, max_dom, depth) {
            Ok(r) => finish(r, json),
            Err(e) => usage(e),
        },
        Command::DemoBethFailure => finish(cmd_demo_beth_failure(), json),
        Command::Eval { model, world, formula } => eval(&model, world, &formula, json),
    }
}
