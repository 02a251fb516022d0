use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use irs_stealth::harness::{emit_csv, run_experiment, ScenarioConfig};
use irs_stealth::linalg::CVec;
use irs_stealth::optimizers::{
    build_instance, dft_codebook_search, min_irs_elements, mmse_default, random_phase, reverse_alignment,
    solve_lagrange, solve_pgd, ReflectionModel, ReflectionSolution, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use irs_stealth::power_model::sum_power;
use irs_stealth::{Error, Result};

#[derive(Parser)]
#[command(name = "irs-stealth", version, about = "IRS stealth simulator and reflection optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named sweep and write per-trial powers as CSV.
    Run {
        preset: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Master seed; defaults to the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analytic minimum IRS size for full single-radar stealth.
    MinElements {
        #[arg(long, default_value_t = 0.8)]
        zeta_bar: f64,
        #[arg(long, default_value_t = 200)]
        n2: usize,
        #[arg(long, default_value_t = 1.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 20)]
        realizations: usize,
    },
    /// Solve one scenario and print θ and the achieved power.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Solver::Pgd)]
        solver: Solver,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Pgd,
    Lagrange,
    ReverseAlignment,
    Mmse,
    DftCodebook,
    RandomPhase,
}

fn load(config: &Option<PathBuf>) -> Result<ScenarioConfig> {
    match config {
        Some(p) => ScenarioConfig::load(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn solve(config: &ScenarioConfig, solver: Solver) -> Result<()> {
    let scenario = config.build(config.seed)?;
    let model = ReflectionModel::from_scenario(&scenario)?;
    let inst = build_instance(&model);
    let beta = scenario.target.irs.beta_max;
    let sol: ReflectionSolution = match solver {
        Solver::Pgd => solve_pgd(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
        Solver::Lagrange => solve_lagrange(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
        Solver::ReverseAlignment => {
            if scenario.num_radars() != 1 {
                return Err(Error::InvalidArgument("reverse alignment needs exactly one radar".into()));
            }
            reverse_alignment(&model.links[0].u, model.nirs_gains()[0], beta)?
        }
        Solver::Mmse => mmse_default(&model)?.1,
        Solver::DftCodebook => dft_codebook_search(&model),
        Solver::RandomPhase => {
            let theta = random_phase(scenario.n1(), beta, config.seed);
            ReflectionSolution {
                objective: model.objective(&theta),
                theta,
                solver: "random-phase".into(),
                iterations: 0,
                kkt_residual: None,
                multipliers: None,
            }
        }
    };
    let power = sum_power(&sol.theta, &scenario)?;
    let baseline = sum_power(&CVec::zeros(scenario.n1()), &scenario)?;
    println!("solver {}", sol.solver);
    println!("objective {:e}", sol.objective);
    println!("sum_power_watts {power:e}");
    println!("no_irs_power_watts {baseline:e}");
    if let Some(r) = sol.kkt_residual {
        println!("kkt_residual {r:e}");
    }
    println!("theta");
    for z in sol.theta.iter() {
        println!("{:e} {:e}", z.re, z.im);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            preset,
            config,
            trials,
            seed,
            out,
        } => {
            let cfg = load(&config)?;
            let result = run_experiment(&preset, &cfg, trials, seed.unwrap_or(cfg.seed))?;
            emit_csv(&result, &out)?;
            eprintln!("wrote {} rows to {}", result.rows.len(), out.display());
            Ok(())
        }
        Command::MinElements {
            zeta_bar,
            n2,
            beta_max,
            realizations,
        } => {
            println!("{}", min_irs_elements(zeta_bar, n2, beta_max, realizations)?);
            Ok(())
        }
        Command::Solve { config, solver } => solve(&load(&config)?, solver),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
