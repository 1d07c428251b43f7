//! Command-line front end: train a policy, evaluate a checkpoint, print a
//! budget schedule, or run an ablation preset.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wean::curriculum::budget_schedule;
use wean::harness::{
    evaluate, macro_accuracy, parse_skill_selector, run_ablation, train, HarnessError, RunConfig,
};
use wean::mini_world::WorldLayout;
use wean::policy::PolicyParams;
use wean::skill_bank::load_bank;

#[derive(Parser)]
#[command(name = "wean", version, about = "Skill-annealed policy training on a text gridworld")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the curriculum training loop from a config file.
    Train {
        /// Path to a `key = value` run config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy per-category accuracy of a saved checkpoint.
    Eval {
        /// Checkpoint written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Context skills: `all`, `none`, or comma-separated ids.
        #[arg(long, default_value = "none")]
        skills: String,
        /// Config naming the layout and skills dir (defaults if omitted).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the annealed skill budget per stage.
    Schedule {
        /// Bank size.
        #[arg(long)]
        n: usize,
        /// Number of curriculum stages.
        #[arg(long)]
        stages: usize,
    },
    /// Train every variant of a preset and print the comparison table.
    Ablate {
        /// One of: budgets, filter_rank, interval.
        #[arg(long)]
        preset: String,
        /// Base config the variants are derived from (defaults if omitted).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, HarnessError> {
    match path {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Train { config, seed, out } => {
            let mut config = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(out) = out {
                config.out_dir = out;
            }
            let outcome = train(&config)?;
            println!("wrote {}", outcome.metrics_path.display());
            println!("wrote {}", outcome.helpfulness_path.display());
            println!("wrote {}", outcome.checkpoint_path.display());

            let layout = WorldLayout::load(&config.layout_path)?;
            let bank = load_bank(&config.skills_dir)?;
            let skill_free = evaluate(
                &outcome.params,
                &std::collections::BTreeSet::new(),
                &layout,
                &bank,
                config.max_steps,
            )?;
            println!("final skill-free accuracy:");
            print_accuracies(&skill_free);
            Ok(())
        }
        Command::Eval { checkpoint, skills, config } => {
            let config = load_config(config.as_ref())?;
            let layout = WorldLayout::load(&config.layout_path)?;
            let bank = load_bank(&config.skills_dir)?;
            let params = PolicyParams::load(&checkpoint)?;
            let active = parse_skill_selector(&skills, &bank)?;
            let accuracies = evaluate(&params, &active, &layout, &bank, config.max_steps)?;
            print_accuracies(&accuracies);
            Ok(())
        }
        Command::Schedule { n, stages } => {
            let budgets = budget_schedule(n, stages)?;
            for (idx, budget) in budgets.iter().enumerate() {
                println!("stage {}: budget {budget}", idx + 1);
            }
            Ok(())
        }
        Command::Ablate { preset, config } => {
            let base = load_config(config.as_ref())?;
            let report = run_ablation(&preset, &base)?;
            print!("{}", report.render());
            Ok(())
        }
    }
}

fn print_accuracies(per_category: &std::collections::BTreeMap<wean::mini_world::TaskCategory, f64>) {
    for (category, accuracy) in per_category {
        println!("  {:<6} {accuracy:.4}", category.as_str());
    }
    println!("  {:<6} {:.4}", "macro", macro_accuracy(per_category));
}
