use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use shell_compat_cli::{
    run, write_outputs, CliError, Expectation, OutputFormat, ResidualReport, RunConfig,
};

/// Runs a shell compatibility experiment and writes a residual report.
#[derive(Debug, Parser)]
#[command(name = "shellcompat", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `run.out_dir`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// json, csv or both.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Comma-separated grid sizes, e.g. 33,65,129.
    #[arg(long, value_delimiter = ',')]
    grids: Option<Vec<usize>>,
    /// Run the experiment's negative control.
    #[arg(long)]
    negative_control: bool,
}

fn execute(args: Args) -> Result<ResidualReport, CliError> {
    let cfg = RunConfig::load(&args.config)?.with_overrides(
        args.out_dir,
        args.format,
        args.grids,
        args.negative_control,
    )?;
    let report = run(&cfg)?;
    write_outputs(&report, &cfg)?;
    Ok(report)
}

fn print_summary(report: &ResidualReport) {
    println!(
        "{} on {} (grids {:?})",
        report.experiment, report.subject, report.grids
    );
    for r in &report.residuals {
        let finest = r.norms.last().map_or(f64::NAN, |g| g.linf);
        let order = r
            .orders
            .as_ref()
            .filter(|_| r.expectation != Expectation::Informational)
            .and_then(|o| o.last().copied().flatten())
            .map_or_else(|| "-".to_string(), |o| format!("{o:.2}"));
        let verdict = match r.pass {
            Some(true) => "ok",
            Some(false) => "FAIL",
            None => "--",
        };
        println!(
            "  {:<28} {finest:>10.3e}  order {order:>6}  {verdict}",
            r.name
        );
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    println!("{}", if report.passed { "PASSED" } else { "FAILED" });
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(report) => {
            print_summary(&report);
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("shellcompat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
