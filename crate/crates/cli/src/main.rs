//! `resolve`: run a problem file through the resolution engine.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use resolve_core::marked::Variant;
use resolve_core::report::{key_text, ProblemFile, Status, TreeReport};
use resolve_core::resolver::{run_mode, Config, Mode};

const EXIT_INPUT: u8 = 1;
const EXIT_EXHAUSTED: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_FAILED: u8 = 4;

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Principalize,
    Resolve,
    Embedded,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Canonical,
    Bv,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

/// Resolve a marked ideal, principalize an ideal, or desingularize a hypersurface.
#[derive(Parser)]
#[command(name = "resolve", version)]
struct Args {
    /// Problem file (JSON); `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Overrides the file's mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Overrides the file's variant.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Overrides the file's depth limit.
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// 0 silent, 1 summary on stderr, 2 also the key trace.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    trace: u8,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(path: &PathBuf) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn emit(args: &Args, report: &TreeReport) -> io::Result<()> {
    let body = match args.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    match &args.out {
        Some(p) => fs::write(p, body),
        None => io::stdout().write_all(body.as_bytes()),
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", args.input.display())),
    };
    let problem = match ProblemFile::from_json(&text) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let marked = match problem.marked_ideal() {
        Ok(m) => m,
        Err(e) => return input_error(e),
    };
    let mut cfg = problem.config(&Config::default());
    if let Some(m) = args.mode {
        cfg.mode = match m {
            ModeArg::Principalize => Mode::Principalize,
            ModeArg::Resolve => Mode::Resolve,
            ModeArg::Embedded => Mode::Embedded,
        };
    }
    if let Some(v) = args.variant {
        cfg.variant = match v {
            VariantArg::Canonical => Variant::Canonical,
            VariantArg::Bv => Variant::BravoVillamayor,
        };
    }
    if let Some(d) = args.max_depth {
        cfg.max_depth = d;
    }
    cfg.trace = args.trace;

    let start = Instant::now();
    let result = run_mode(problem.variables.clone(), marked, &cfg);
    let elapsed = start.elapsed();
    let report = match &result {
        Ok(tree) => TreeReport::from_tree(tree).map(Some),
        Err(e) => TreeReport::from_error(e),
    };
    let report = match report {
        Ok(Some(r)) => r,
        Ok(None) => return input_error(result.expect_err("error without tree")),
        Err(e) => {
            eprintln!("error: rendering report: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    if args.trace >= 1 {
        eprintln!(
            "{}: {} blow-ups, depth {}, {} nodes, {:.3}s",
            cfg.mode,
            report.blowups,
            report.depth,
            report.nodes.len(),
            elapsed.as_secs_f64()
        );
    }
    if args.trace >= 2 {
        for k in &report.trace {
            eprintln!("  {}", key_text(k));
        }
    }
    if let Err(e) = emit(&args, &report) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(EXIT_FAILED);
    }
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    match report.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Exhausted => ExitCode::from(EXIT_EXHAUSTED),
        Status::VerificationFailed => {
            eprintln!("error: leaf certificate failed");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Status::Failed => ExitCode::from(EXIT_FAILED),
    }
}
