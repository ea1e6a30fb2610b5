//! `deltasum`: batch verification suites and experiment sweeps.

mod commands;
mod params;
mod report;
mod suites;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use params::{CliError, CliResult, Params};
use report::{emit, float17, Output, Table};
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "deltasum", version, about = "Exponential sums, Voronoi and delta-method numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// d, d3, μ, φ and Λ up to --limit
    Sieve,
    /// Kloosterman, Ramanujan and Gauss sums at --q
    Expsum,
    /// the two-dimensional Gauss sum and the zero-frequency sum at --q
    Charsum,
    /// both sides of the d3 Voronoi identity at --q with h on [X, 2X]
    Voronoi,
    /// the delta-symbol expansion at scale --Q
    Delta,
    /// composite oscillatory integrals at --X and --q
    Osc,
    /// main sums over --X or --xs
    Sum,
    /// log-log slope of --series
    Fit,
    /// Voronoi kernel table at --ys (CSV)
    Kernel,
    /// one verification suite
    Verify { suite: String },
    /// every verification suite
    VerifyAll,
}

fn parse_exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
        ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => 3,
        ErrorKind::ValueValidation | ErrorKind::InvalidValue | ErrorKind::InvalidUtf8 => 4,
        ErrorKind::MissingRequiredArgument
        | ErrorKind::MissingSubcommand
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 5,
        _ => 6,
    }
}

fn set_threads(params: &Params) -> CliResult<()> {
    let threads = match params.threads {
        Some(n) => Some(n),
        None => match std::env::var("DELTASUM_THREADS") {
            Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
                CliError::Type(format!("DELTASUM_THREADS must be a positive integer, got {v:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    Ok(())
}

fn verify(name: &str, suites: &[&str], params: &Params) -> CliResult<u8> {
    let (rows, timeout) = suites::run(suites, params)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut table = Table::new(&["suite", "name", "anchor", "observed", "relation", "bound", "pass", "detail"]);
    for r in &rows {
        table.push(vec![
            r.suite.clone(),
            r.name.clone(),
            r.anchor.clone(),
            float17(r.observed),
            r.relation.into(),
            float17(r.bound),
            r.pass.to_string(),
            r.detail.clone(),
        ]);
    }
    let json = json!({
        "assertions": rows,
        "summary": {"total": rows.len(), "passed": rows.len() - failed, "failed": failed},
        "aborted": timeout.is_some(),
    });
    emit(name, params, &Output { json, table: Some(table) })?;
    let mut err = std::io::stderr();
    for r in rows.iter().filter(|r| !r.pass) {
        let _ = writeln!(err, "FAIL {}/{}: {} {} {} ({})", r.suite, r.name, r.observed, r.relation, r.bound, r.anchor);
    }
    let _ = writeln!(err, "{} assertions, {failed} failed", rows.len());
    if let Some(t) = timeout {
        let _ = writeln!(err, "{t}");
        return Ok(t.exit_code() as u8);
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> CliResult<u8> {
    let params = Params::resolve(&cli.params)?;
    set_threads(&params)?;
    let out = match &cli.command {
        Command::Sieve => commands::sieve(&params)?,
        Command::Expsum => commands::expsum(&params)?,
        Command::Charsum => commands::charsum(&params)?,
        Command::Voronoi => commands::voronoi(&params)?,
        Command::Delta => commands::delta(&params)?,
        Command::Osc => commands::osc(&params)?,
        Command::Sum => commands::sum(&params)?,
        Command::Fit => commands::fit(&params)?,
        Command::Kernel => {
            let text = commands::kernel(&params)?;
            match &params.out {
                Some(path) => std::fs::write(path, text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            return Ok(0);
        }
        Command::Verify { suite } => {
            suites::find(suite)?;
            return verify(suite, &[suite.as_str()], &params);
        }
        Command::VerifyAll => {
            let names: Vec<&str> = suites::SUITES.iter().map(|(n, _)| *n).collect();
            return verify("verify-all", &names, &params);
        }
    };
    let name = format!("{:?}", cli.command).to_lowercase();
    emit(&name, &params, &out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(parse_exit_code(e.kind()));
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
