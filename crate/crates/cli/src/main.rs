use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use paracurv::runner::{render, run_suite, ManifoldSource, RunConfig, RunError, Suite};
use paracurv::spec::to_json;
use paracurv::zoo::{build_example, ZooId, ZooParams};

/// Curvature and paracontact-structure checks on 3-dimensional manifolds.
#[derive(Parser)]
#[command(name = "paracurv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites on a zoo example or a manifold spec.
    Run(RunArgs),
    /// Print a zoo example as a manifold spec.
    Export(ExportArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["zoo", "spec"])))]
struct RunArgs {
    /// Zoo example: E1, E2, E3, E5 or E6.
    #[arg(long)]
    zoo: Option<String>,
    /// Zoo parameter, e.g. beta0=1/2, alpha0=-2, backend=chart (repeatable).
    #[arg(long = "param", requires = "zoo")]
    params: Vec<String>,
    /// Manifold spec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// axioms, normality, qps, conformal, classify or all (repeatable).
    #[arg(long = "suite", default_value = "all")]
    suites: Vec<String>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance for identities.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Tolerance for identities involving third metric derivatives.
    #[arg(long, default_value_t = 1e-6)]
    tol3: f64,
    /// Largest spread across samples still counted as constant.
    #[arg(long, default_value_t = 1e-8)]
    spread: f64,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    zoo: String,
    #[arg(long = "param")]
    params: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn zoo_source(id: &str, assignments: &[String]) -> Result<(ZooId, ZooParams), RunError> {
    let id: ZooId = id.parse()?;
    let mut params = ZooParams::default();
    for a in assignments {
        params.set(a)?;
    }
    Ok((id, params))
}

fn config(args: RunArgs) -> Result<RunConfig, RunError> {
    let source = match (&args.zoo, args.spec) {
        (Some(id), _) => {
            let (id, params) = zoo_source(id, &args.params)?;
            ManifoldSource::Zoo { id, params }
        }
        (None, Some(path)) => ManifoldSource::Spec(path),
        (None, None) => unreachable!("clap requires a source"),
    };
    let mut suites = Vec::new();
    for s in &args.suites {
        suites.extend(Suite::parse_list(s)?);
    }
    let config = RunConfig {
        source,
        suites,
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
        tol3: args.tol3,
        spread: args.spread,
        format: args.format.parse()?,
        out: args.out,
    };
    config.validate()?;
    Ok(config)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> ExitCode {
    let config = match config(args) {
        Ok(c) => c,
        Err(e) => return fail(&e.to_string(), e.exit_code()),
    };
    let report = match run_suite(&config) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string(), e.exit_code()),
    };
    if let Err(e) = emit(&render(&report, config.format), config.out.as_ref()) {
        return fail(&e, 2);
    }
    if report.engine_fault {
        eprintln!("engine fault:");
        for d in &report.diagnostics {
            eprintln!("  {d}");
        }
    }
    code(report.exit_code())
}

fn export(args: ExportArgs) -> ExitCode {
    let built = zoo_source(&args.zoo, &args.params).and_then(|(id, p)| Ok(build_example(id, p)?));
    match built {
        Ok((m, _)) => {
            let mut json = to_json(&m);
            json.push('\n');
            match emit(&json, args.out.as_ref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e, 2),
            }
        }
        Err(e) => fail(&e.to_string(), e.exit_code()),
    }
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn fail(msg: &str, c: i32) -> ExitCode {
    eprintln!("error: {msg}");
    code(c)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Export(args) => export(args),
    }
}
