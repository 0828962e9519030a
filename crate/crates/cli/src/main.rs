mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tailmdp::MdpError;

use crate::commands::Outcome;
use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "tailmdp", version, about = "Finite-horizon approximation of MDPs with two-sided unbounded rewards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate of the reward functional under the uniform policy.
    Simulate(Flags),
    /// Run a hypothesis check (or `all`).
    Verify {
        check: Option<String>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Discretize, solve by backward induction and cross-check by simulation.
    Solve(Flags),
    /// Check a weak-convergence scenario.
    Weakconv(Flags),
}

/// Every flag maps onto one config key; flags override `--config`.
#[derive(Args, Default)]
struct Flags {
    /// `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<String>,
    /// Print the effective config and exit.
    #[arg(long)]
    dump_config: bool,
    /// Also solve by enumerating every deterministic Markov policy.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    amax: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    discount: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    income: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    net_step: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    betas: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("model", &self.model),
            ("seed", &self.seed),
            ("horizon", &self.horizon),
            ("samples", &self.samples),
            ("grid", &self.grid),
            ("amax", &self.amax),
            ("p", &self.p),
            ("rho", &self.rho),
            ("sigma", &self.sigma),
            ("discount", &self.discount),
            ("z", &self.z),
            ("d", &self.d),
            ("income", &self.income),
            ("tmax", &self.tmax),
            ("tol", &self.tol),
            ("t", &self.t),
            ("target", &self.target),
            ("domain", &self.domain),
            ("net_step", &self.net_step),
            ("betas", &self.betas),
            ("points", &self.points),
            ("g", &self.g),
            ("scenario", &self.scenario),
            ("n", &self.n),
            ("out", &self.out),
        ]
    }

    fn resolve(&self, command: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {path}"))?;
            cfg.apply_text(&text).with_context(|| format!("in config {path}"))?;
        }
        cfg.set("command", command)?;
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        if self.oracle {
            cfg.oracle = true;
        }
        Ok(cfg)
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("MDP_THREADS") {
        let n: usize = v.parse().with_context(|| format!("MDP_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    init_threads()?;
    let (name, flags, check) = match &cli.command {
        Command::Simulate(f) => ("simulate", f, None),
        Command::Verify { check, flags } => ("verify", flags, check.as_deref()),
        Command::Solve(f) => ("solve", f, None),
        Command::Weakconv(f) => ("weakconv", f, None),
    };
    let mut cfg = flags.resolve(name)?;
    if let Some(c) = check {
        cfg.set("check", c)?;
    }
    if flags.dump_config {
        print!("{}", cfg.to_text());
        return Ok(Outcome::Ok);
    }
    match name {
        "simulate" => commands::simulate(&cfg),
        "verify" => commands::verify(&cfg),
        "solve" => commands::solve(&cfg),
        _ => commands::weakconv(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            // A parameter or capability problem means the run never started.
            let failed_check = matches!(e.downcast_ref::<MdpError>(), Some(MdpError::TargetUnreachable { .. }));
            ExitCode::from(if failed_check { 1 } else { 2 })
        }
    }
}
