use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gecert_cli::{parse_scenario, run, Overrides, RunReport, Stage};
use gecert_core::solver::solve_static_with;
use gecert_core::Tolerances;

/// Solution trajectories, regularity certificates and perturbation bounds
/// for circuits with set-valued characteristics.
#[derive(Debug, Parser)]
#[command(name = "gecert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the static equation for one source value.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Source voltage (V).
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long)]
        tol_z: Option<f64>,
    },
    /// Sweep the time grid and link trajectories.
    Sweep(Common),
    /// Sweep, then certify the focus branch.
    Certify(Common),
    /// Sweep, certify, then perturb the focus branch.
    Perturb(Common),
    /// Every stage.
    Run(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Number of uniform grid points.
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write trajectories.svg.
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    tol_res: Option<f64>,
    #[arg(long)]
    tol_z: Option<f64>,
    #[arg(long)]
    delta_link: Option<f64>,
}

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFICATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<gecert_cli::Scenario> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("in {}", path.display()))
}

fn dispatch(command: Command) -> anyhow::Result<bool> {
    let (common, last) = match command {
        Command::Solve { scenario, p, tol_z } => {
            let s = load(&scenario)?;
            let tol = Tolerances {
                tol_z: tol_z.unwrap_or(Tolerances::default().tol_z),
                ..Tolerances::default()
            };
            let set = solve_static_with(&s.equation()?, p, &tol);
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({ "p": p, "solutions": set }))?
            );
            return Ok(true);
        }
        Command::Sweep(c) => (c, Stage::Sweep),
        Command::Certify(c) => (c, Stage::Certify),
        Command::Perturb(c) | Command::Run(c) => (c, Stage::Perturb),
    };
    let scenario = load(&common.scenario)?;
    let overrides = Overrides {
        grid: common.grid,
        delta_link: common.delta_link,
        tol_res: common.tol_res,
        tol_z: common.tol_z,
        out: common.out,
        plot: common.plot,
    };
    let report = run(&scenario, last, &overrides)?;
    summarize(&report);
    Ok(report.pass)
}

fn summarize(r: &RunReport) {
    if let Some(t) = &r.trajectories {
        println!("trajectories: {}", t.count);
    }
    if let Some(u) = r.certificate.as_ref().and_then(|c| c.uniform.as_ref()) {
        println!("uniform: a = {}, b = {}, kappa = {}", u.a, u.b, u.kappa);
    }
    if let Some(p) = &r.perturbation {
        let b = &p.bound;
        println!(
            "perturbation: epsilon = {}, b/4 = {}, bound = {}, observed = {}",
            b.epsilon, b.gate, b.bound, b.observed
        );
    }
    for f in &r.failures {
        println!("FAIL [{:?}] {}: {}", f.stage, f.kind, f.message);
    }
    println!("{}", if r.pass { "PASS" } else { "FAIL" });
}
