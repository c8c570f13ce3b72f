use clap::Parser;
use gradsym_cli::{emit_report, parse_spec, run, RunSpec, SpecErrors};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_SPEC: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Runs verification stages on a constraint system or a BF surface model.
#[derive(Parser, Debug)]
#[command(name = "gradsym", version)]
struct Args {
    /// Spec file (`key = value` lines with `[section]` headers).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Target key when no spec file is given, e.g. `se2_nested` or `bf_torus_h`.
    #[arg(long)]
    target: Option<String>,
    /// Stage to run (repeatable); prerequisites are added automatically.
    #[arg(long = "stage")]
    stages: Vec<String>,
    /// Structured report path; the table goes next to it with extension `txt`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomised checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation degree for the cohomology stage.
    #[arg(long = "max-degree")]
    max_degree: Option<u32>,
}

fn resolve(args: &Args) -> Result<Result<RunSpec, SpecErrors>, std::io::Error> {
    let base = match (&args.spec, &args.target) {
        (Some(path), None) => parse_spec(&std::fs::read_to_string(path)?),
        (None, Some(t)) => RunSpec::for_target(t),
        (Some(_), Some(_)) => Err(SpecErrors(vec![gradsym_cli::SpecError {
            line: 0,
            column: 0,
            message: "give either --spec or --target".into(),
        }])),
        (None, None) => Err(SpecErrors(vec![gradsym_cli::SpecError { line: 0, column: 0, message: "missing --spec or --target".into() }])),
    };
    Ok(base.and_then(|mut s| {
        if let Some(seed) = args.seed {
            s.seed = seed;
        }
        if let Some(d) = args.max_degree {
            s.max_degree = d;
        }
        if let Some(out) = &args.out {
            s.out = Some(out.display().to_string());
        }
        if args.stages.is_empty() {
            Ok(s)
        } else {
            s.with_stages(&args.stages)
        }
    }))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let spec = match resolve(&args) {
        Err(e) => {
            eprintln!("error: cannot read spec: {}", e);
            return ExitCode::from(EXIT_INTERNAL);
        }
        Ok(Err(errors)) => {
            eprintln!("{}", errors);
            return ExitCode::from(EXIT_SPEC);
        }
        Ok(Ok(s)) => s,
    };
    let report = match std::panic::catch_unwind(|| run(&spec)) {
        Ok(r) => r,
        Err(_) => return ExitCode::from(EXIT_INTERNAL),
    };
    print!("{}", report.to_table());
    if let Some(out) = &spec.out {
        if let Err(e) = emit_report(&report, std::path::Path::new(out)) {
            eprintln!("error: cannot write report: {}", e);
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
