use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use charfem::app::study::{run_cavity_to, run_convergence_study_to};
use charfem::app::{run_file, CavityConfig, DtRule, RunFile, StudyConfig};
use charfem::fem::ElementPair;
use charfem::mesh::Pattern;
use charfem::scheme::SchemeKind;
use charfem::Error;

#[derive(Parser)]
#[command(name = "charfem", version, about = "Lagrange–Galerkin Navier–Stokes solver")]
struct Cli {
    /// Reject steps whose foot map violates dt·|w|_{1,∞} ≤ 1/4.
    #[arg(long, global = true)]
    strict_cfl: bool,
    /// Zero wall times in outputs so that repeated runs are identical.
    #[arg(long, global = true)]
    reproducible: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Convergence sweep for the manufactured solution.
    Converge {
        #[arg(long, default_value = "example1")]
        problem: String,
        #[arg(long)]
        scheme: SchemeKind,
        #[arg(long, default_value_t = 1e-2)]
        nu: f64,
        #[arg(long, default_value = "h2")]
        dt_rule: DtRule,
        /// Comma-separated divisions, e.g. 8,12,16.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Use the large mesh list instead of the desk-scale one.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value = "p2p1")]
        pair: ElementPair,
        #[arg(long, default_value = "crisscross")]
        pattern: Pattern,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regularized lid-driven cavity.
    Cavity {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dt: f64,
        #[arg(long = "T", default_value_t = 8.0)]
        t_final: f64,
        #[arg(long, default_value = "lgllv")]
        scheme: SchemeKind,
        #[arg(long, default_value = "p2p1")]
        pair: ElementPair,
        #[arg(long, default_value = "crisscross")]
        pattern: Pattern,
        /// Snapshot interval in steps (final state always written).
        #[arg(long)]
        snapshot_every: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AtStep { source, .. } => exit_code(source),
        Error::InvalidArgument(_) | Error::Parse(_) | Error::Io { .. } => 2,
        Error::StepRejected { .. } => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn execute(cli: &Cli) -> charfem::Result<()> {
    match &cli.command {
        Command::Run { config, out } => {
            let mut file = RunFile::load(config)?;
            file.strict_cfl |= cli.strict_cfl;
            file.reproducible |= cli.reproducible;
            let history = run_file(&file, out)?.into_result()?;
            log::info!("completed {} steps, output in {}", history.num_steps, out.display());
        }
        Command::Converge {
            problem,
            scheme,
            nu,
            dt_rule,
            n,
            full,
            pair,
            pattern,
            out,
        } => {
            if problem != "example1" {
                return Err(Error::invalid(format!("no convergence study for problem '{problem}'")));
            }
            let sizes = n.clone().unwrap_or_else(|| dt_rule.default_sizes(*full));
            let mut cfg = StudyConfig::new(*scheme, *nu, *dt_rule, sizes);
            cfg.pair = *pair;
            cfg.pattern = *pattern;
            cfg.strict_cfl = cli.strict_cfl;
            cfg.reproducible = cli.reproducible;
            let series = run_convergence_study_to(&cfg, out)?;
            for r in &series.rows {
                log::info!(
                    "N={:3} E_H1_u={:.3e} E_L2_p={:.3e} E_L2inf_u={:.3e} orders=({:.2}, {:.2}, {:.2}) {}",
                    r.n,
                    r.errors[0],
                    r.errors[1],
                    r.errors[2],
                    r.orders[0],
                    r.orders[1],
                    r.orders[2],
                    r.status
                );
            }
        }
        Command::Cavity {
            nu,
            n,
            dt,
            t_final,
            scheme,
            pair,
            pattern,
            snapshot_every,
            out,
        } => {
            let mut cfg = CavityConfig::new(*scheme, *nu, *n, *dt);
            cfg.t_final = *t_final;
            cfg.pair = *pair;
            cfg.pattern = *pattern;
            cfg.strict_cfl = cli.strict_cfl;
            cfg.reproducible = cli.reproducible;
            if let Some(k) = snapshot_every {
                cfg.snapshot_every = *k;
            }
            let run = run_cavity_to(&cfg, out)?;
            for (step, m) in &run.window_max {
                log::info!("step {step}: max |u| in window = {m:.4e}");
            }
            run.history.into_result()?;
        }
    }
    Ok(())
}
