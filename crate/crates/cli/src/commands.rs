//! Subcommands and their CSV tables.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rmabf_core::harness::{brute_force_value, offline_benchmark, optimality_gap_sweep, run_monte_carlo, AggregateMetrics, GapPoint};
use rmabf_core::lp::{occupancy_from_solution, offline_program, OccupancyForm, OccupancyLayout};
use rmabf_core::model::{ACTIVE, PASSIVE};
use rmabf_core::{fair_indices, Algorithm, LpError, LpStatus, RmabInstance};

use crate::config::{load_config, ExperimentConfig};
use crate::error::CliError;
use crate::output::{format_number, Table};

/// Arms with their own activation and violation columns in `learn` output.
pub const LEARN_ARM_COLUMNS: usize = 8;
/// Absolute LP/oracle agreement tolerance, widened by the grid error.
pub const ORACLE_TOL: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "rmabf", version, about = "Restless bandits with fairness floors: planning, learning and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the offline LP and dump the fair index table.
    Plan(CommonArgs),
    /// Monte-Carlo learning run; one row per epoch.
    Learn(CommonArgs),
    /// Optimality gap of the offline index policy across replica counts.
    Sweep(CommonArgs),
    /// Cross-check every arm's single-arm LP against the brute-force oracle.
    Oracle(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's algorithm.
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Option<Algorithm>,
    /// Overrides the config's trial count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    /// Overrides the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: rmabf_core::LearnerError| e.to_string())
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Plan(a) | Command::Learn(a) | Command::Sweep(a) | Command::Oracle(a) => a,
        }
    }
}

impl CommonArgs {
    /// Loads the config and applies the command-line overrides.
    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let mut config = load_config(&self.config)?;
        if let Some(algo) = self.algo {
            config.algorithm = algo;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
            config.simulation.seed = seed;
        }
        if let Some(trials) = self.trials {
            config.trials = trials as usize;
            config.simulation.trials = trials as usize;
        }
        Ok(config)
    }
}

/// Runs one subcommand and writes its table.
pub fn run(command: &Command) -> Result<(), CliError> {
    let args = command.args();
    let config = args.experiment()?;
    let table = match command {
        Command::Plan(_) => {
            let (table, value) = plan_table(&config.instance)?;
            eprintln!("offline LP value: {}", format_number(value));
            table
        }
        Command::Learn(_) => {
            let bench = offline_benchmark(&config.instance, &config.simulation)?;
            log::info!(
                "benchmarks: LP bound {}, index policy {} +- {}",
                bench.lp_bound,
                bench.index_average,
                bench.index_stderr
            );
            let learner = config.learner_config()?;
            let agg = run_monte_carlo(&config.instance, &learner, config.trials, &bench)?;
            learn_table(&agg)
        }
        Command::Sweep(_) => sweep_table(&optimality_gap_sweep(&config.instance, &config.replicas, &config.simulation)?),
        Command::Oracle(_) => oracle_table(&config.instance, config.resolution)?,
    };
    table.write(args.out.as_deref())
}

/// Index table with the offline occupancy measure behind it, plus the LP
/// optimum.
pub fn plan_table(instance: &RmabInstance) -> Result<(Table, f64), CliError> {
    let sol = offline_program(instance).solve()?;
    let layout = OccupancyLayout {
        form: OccupancyForm::StateAction,
        num_arms: instance.num_arms(),
        num_states: instance.num_states(),
    };
    let occ = occupancy_from_solution(&sol, layout)?;
    let omega = fair_indices(&occ);
    let mut table = Table::new(["arm", "state", "omega", "zeta_passive", "zeta_active"]);
    for n in 0..instance.num_arms() {
        for s in 0..instance.num_states() {
            table.push(vec![
                n.to_string(),
                s.to_string(),
                format_number(omega.get(n, s)),
                format_number(occ.state_action(n, s, PASSIVE)),
                format_number(occ.state_action(n, s, ACTIVE)),
            ]);
        }
    }
    Ok((table, sol.objective_value))
}

pub fn learn_header(num_arms: usize) -> Vec<String> {
    let mut header: Vec<String> = [
        "t",
        "mean_cum_reward",
        "mean_reward_regret_lp",
        "mean_reward_regret_index",
        "stderr_reward_regret",
    ]
    .map(String::from)
    .into();
    for n in 0..num_arms.min(LEARN_ARM_COLUMNS) {
        header.push(format!("act_frac_{n}"));
        header.push(format!("fair_viol_{n}"));
    }
    header.extend(["act_frac_min", "act_frac_mean", "fair_viol_min", "fair_viol_mean"].map(String::from));
    header
}

/// One row per epoch `t = 1..=T` of trial means. The two regret series
/// differ per trial by a deterministic drift, so they share one standard
/// error.
pub fn learn_table(agg: &AggregateMetrics) -> Table {
    let arms = agg.num_arms();
    let mut table = Table::new(learn_header(arms));
    let cum = agg.mean(&agg.cum_reward);
    let lp = agg.mean(&agg.regret_lp);
    let index = agg.mean(&agg.regret_index);
    let se = agg.stderr(&agg.regret_lp);
    let act: Vec<Vec<f64>> = agg.act_frac.iter().map(|c| agg.mean(c)).collect();
    let viol: Vec<Vec<f64>> = agg.fair_viol.iter().map(|c| agg.mean(c)).collect();
    let min_mean = |cols: &[Vec<f64>], t: usize| {
        let (min, sum) = cols.iter().fold((f64::INFINITY, 0.0), |(m, s), c| (m.min(c[t]), s + c[t]));
        (min, sum / cols.len() as f64)
    };
    for t in 0..agg.epochs {
        let mut row = vec![
            (t + 1).to_string(),
            format_number(cum[t]),
            format_number(lp[t]),
            format_number(index[t]),
            format_number(se[t]),
        ];
        for n in 0..arms.min(LEARN_ARM_COLUMNS) {
            row.push(format_number(act[n][t]));
            row.push(format_number(viol[n][t]));
        }
        let (act_min, act_mean) = min_mean(&act, t);
        let (viol_min, viol_mean) = min_mean(&viol, t);
        row.extend([act_min, act_mean, viol_min, viol_mean].map(format_number));
        table.push(row);
    }
    table
}

pub const SWEEP_HEADER: [&str; 9] = [
    "replicas",
    "arms",
    "budget",
    "lp_bound",
    "index_average",
    "index_stderr",
    "gap_per_arm",
    "gap_stderr",
    "attractor_distance",
];

pub fn sweep_table(points: &[GapPoint]) -> Table {
    let mut table = Table::new(SWEEP_HEADER);
    for p in points {
        let mut row = vec![p.replicas.to_string(), p.arms.to_string(), p.budget.to_string()];
        row.extend(
            [p.lp_bound, p.index_average, p.index_stderr, p.gap_per_arm, p.gap_stderr, p.attractor_distance].map(format_number),
        );
        table.push(row);
    }
    table
}

pub const ORACLE_HEADER: [&str; 6] = ["arm", "lp_value", "oracle_value", "grid_error", "abs_diff", "agree"];

/// Each arm alone with budget 1 and its own floor, solved by the LP and by
/// grid search over stationary randomized policies.
pub fn oracle_table(instance: &RmabInstance, resolution: f64) -> Result<Table, CliError> {
    let mut table = Table::new(ORACLE_HEADER);
    for n in 0..instance.num_arms() {
        let single = RmabInstance::new(
            vec![instance.arm(n).clone()],
            1,
            vec![instance.eta()[n]],
            vec![instance.initial_states()[n]],
        )?;
        let sol = offline_program(&single).solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(LpError::NotOptimal(sol.status).into());
        }
        let oracle = brute_force_value(&single, resolution)?;
        let diff = (sol.objective_value - oracle.value).abs();
        let agree = diff <= ORACLE_TOL.max(oracle.grid_error);
        if !agree {
            log::warn!("arm {n}: LP {} vs oracle {}", sol.objective_value, oracle.value);
        }
        table.push(vec![
            n.to_string(),
            format_number(sol.objective_value),
            format_number(oracle.value),
            format_number(oracle.grid_error),
            format_number(diff),
            agree.to_string(),
        ]);
    }
    Ok(table)
}

/// Sizes the global worker pool; must run before any parallel work.
pub fn set_jobs(jobs: Option<u64>) -> Result<(), CliError> {
    if let Some(jobs) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    Ok(())
}
