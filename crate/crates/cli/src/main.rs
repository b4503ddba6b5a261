use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavedisp_cli::commands::{
    cmd_catalog, cmd_convergence, cmd_evolve, cmd_verify, render_catalog, render_text, RunReport,
};
use wavedisp_cli::config::RunConfig;
use wavedisp_cli::output::to_json;
use wavedisp_cli::{presets, verdict_code, CliError};
use wavedisp_core::lattice::StencilOrder;

#[derive(Parser)]
#[command(name = "wavedisp", version, about = "Bohm-potential dispersion checks on exact wave solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the analytic solutions with their expected Bohm potential.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Run every section of a configuration.
    Verify(RunArgs),
    /// Run the evolve section only.
    Evolve(RunArgs),
    /// Run refinement studies and print the observed orders.
    Convergence(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Shipped configuration, e.g. slepian-scalar.
    #[arg(long)]
    preset: Option<String>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
    /// Directory for report.json and CSV dumps.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stencil order for every case (2 or 4).
    #[arg(long, value_parser = parse_order)]
    order: Option<StencilOrder>,
    /// Refinement levels for every case.
    #[arg(long)]
    levels: Option<usize>,
}

fn parse_order(s: &str) -> Result<StencilOrder, String> {
    let n: u8 = s.parse().map_err(|_| format!("expected 2 or 4, got {s:?}"))?;
    StencilOrder::try_from(n).map_err(|e| e.to_string())
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => presets::preset(name)?,
            (None, None) => return Err(CliError::Config("either --config or --preset is required".into())),
        };
        cfg.override_cases(self.order, self.levels);
        cfg.validate()?;
        Ok(cfg)
    }
}

type Runner = fn(&RunConfig, Option<&Path>) -> Result<RunReport, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&RunArgs, Runner) = match &cli.command {
        Command::Catalog { json } => {
            let entries = cmd_catalog();
            if *json {
                print!("{}", to_json(&entries));
            } else {
                print!("{}", render_catalog(&entries));
            }
            return ExitCode::SUCCESS;
        }
        Command::Verify(a) => (a, cmd_verify),
        Command::Evolve(a) => (a, cmd_evolve),
        Command::Convergence(a) => (a, cmd_convergence),
    };
    let result = args.load().and_then(|cfg| run(&cfg, args.out.as_deref()));
    match result {
        Ok(report) => {
            if args.json {
                print!("{}", to_json(&report));
            } else {
                print!("{}", render_text(&report));
            }
            ExitCode::from(verdict_code(report.passed))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
