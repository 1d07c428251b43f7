//! Run configuration, the outer training loop, deterministic experiment
//! execution, metrics logging, evaluation, and ablation presets.
//!
//! A run is a pure function of its [`RunConfig`]: every random draw comes
//! from a counter-derived seed, workers only map over items, and both CSV
//! outputs are built in memory and written once, so identical configs
//! produce byte-identical files regardless of worker count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::context_encoder::feature_dim;
use crate::curriculum::{
    filter_random_select, filter_rank_select, group_validation, helpfulness_report,
    rank_select_unfiltered, validate_accuracy, CurriculumError, CurriculumState,
};
use crate::grpo::{apply_update, composite_return, loss_and_grad, rollout, GrpoError, Trajectory, TrajectoryGroup};
use crate::mini_world::{all_tasks, enumerate_tasks, Task, TaskCategory, WorldError, WorldLayout};
use crate::parallel::{map_items, mix_seed};
use crate::policy::{CompressionGrid, PolicyError, PolicyParams};
use crate::skill_bank::{load_bank, rules_for, BankError, SkillBank, SkillId};

/// Seed-stream tags for phases that need randomness of their own. Rollout
/// streams are tagged with their (group, member) pair, so these sit at the
/// top of the range where no group index can reach.
const TASK_STREAM: u64 = u64::MAX;
const SELECTION_STREAM: u64 = u64::MAX - 1;

/// How many seeds each ablation variant is averaged over.
pub const ABLATION_SEEDS: u64 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("unknown ablation preset `{0}` (expected budgets, filter_rank, or interval)")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Bank(#[from] BankError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Rollout(#[from] GrpoError),
    #[error(transparent)]
    Curriculum(#[from] CurriculumError),
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// How the per-validation selection treats the helpfulness report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// Filter (Δ > 0), rank by Δ, keep the top budget — the full method.
    Skill0,
    /// Skip the positivity filter: rank everything, keep the top budget.
    NoFilter,
    /// Keep the filter but replace ranking with a seeded uniform draw.
    NoRank,
    /// Pin the active set to the whole bank; never validate, never shrink.
    Full,
}

impl SelectionMode {
    pub fn from_name(name: &str) -> Result<SelectionMode, HarnessError> {
        match name {
            "skill0" => Ok(SelectionMode::Skill0),
            "no_filter" => Ok(SelectionMode::NoFilter),
            "no_rank" => Ok(SelectionMode::NoRank),
            "full" => Ok(SelectionMode::Full),
            other => Err(HarnessError::ConfigInvalid(format!(
                "unknown selection_mode `{other}` (expected skill0, no_filter, no_rank, or full)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMode::Skill0 => "skill0",
            SelectionMode::NoFilter => "no_filter",
            SelectionMode::NoRank => "no_rank",
            SelectionMode::Full => "full",
        }
    }
}

/// Everything one training run depends on. Parsed from a flat
/// `key = value` text file; unknown keys are rejected rather than ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub total_steps: u64,
    pub stages: usize,
    pub validation_interval: u64,
    pub group_size: usize,
    pub tasks_per_batch: usize,
    pub lambda: f64,
    pub beta: f64,
    pub eps_clip: f64,
    pub learning_rate: f64,
    pub max_steps: u32,
    pub compression_grid: Vec<f64>,
    pub skills_dir: PathBuf,
    pub layout_path: PathBuf,
    pub out_dir: PathBuf,
    pub budget_override: Option<Vec<usize>>,
    pub selection_mode: SelectionMode,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed: 0,
            total_steps: 300,
            stages: 3,
            validation_interval: 10,
            group_size: 8,
            tasks_per_batch: 16,
            lambda: 0.1,
            beta: 0.01,
            eps_clip: 0.2,
            learning_rate: 0.05,
            max_steps: 12,
            compression_grid: vec![1.0, 1.5, 2.0, 3.0],
            skills_dir: PathBuf::from("skills"),
            layout_path: PathBuf::from("layouts/default.txt"),
            out_dir: PathBuf::from("runs/default"),
            budget_override: None,
            selection_mode: SelectionMode::Skill0,
        }
    }
}

fn parse_scalar<T>(key: &str, value: &str) -> Result<T, HarnessError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|err| {
        HarnessError::ConfigInvalid(format!("key `{key}`: cannot parse `{value}`: {err}"))
    })
}

fn parse_list<T>(key: &str, value: &str) -> Result<Vec<T>, HarnessError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.split(',').map(|part| parse_scalar(key, part.trim())).collect()
}

impl RunConfig {
    /// Parses `key = value` lines. Blank lines are skipped and `#` starts a
    /// comment. Missing keys keep their defaults; the result is validated.
    pub fn parse(text: &str) -> Result<RunConfig, HarnessError> {
        let mut config = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::ConfigInvalid(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    idx + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => config.seed = parse_scalar(key, value)?,
                "total_steps" => config.total_steps = parse_scalar(key, value)?,
                "stages" => config.stages = parse_scalar(key, value)?,
                "validation_interval" => config.validation_interval = parse_scalar(key, value)?,
                "group_size" => config.group_size = parse_scalar(key, value)?,
                "tasks_per_batch" => config.tasks_per_batch = parse_scalar(key, value)?,
                "lambda" => config.lambda = parse_scalar(key, value)?,
                "beta" => config.beta = parse_scalar(key, value)?,
                "eps_clip" => config.eps_clip = parse_scalar(key, value)?,
                "learning_rate" => config.learning_rate = parse_scalar(key, value)?,
                "max_steps" => config.max_steps = parse_scalar(key, value)?,
                "compression_grid" => config.compression_grid = parse_list(key, value)?,
                "skills_dir" => config.skills_dir = PathBuf::from(value),
                "layout_path" => config.layout_path = PathBuf::from(value),
                "out_dir" => config.out_dir = PathBuf::from(value),
                "budget_override" => {
                    config.budget_override =
                        if value == "none" { None } else { Some(parse_list(key, value)?) }
                }
                "selection_mode" => config.selection_mode = SelectionMode::from_name(value)?,
                other => {
                    return Err(HarnessError::ConfigInvalid(format!(
                        "line {}: unknown key `{other}`",
                        idx + 1
                    )))
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig, HarnessError> {
        RunConfig::parse(&fs::read_to_string(path)?)
    }

    /// Fails fast on values the downstream modules would reject mid-run.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::ConfigInvalid(msg));
        if self.total_steps == 0 {
            return bad("total_steps must be >= 1".into());
        }
        if self.stages < 2 {
            return bad(format!("stages must be >= 2, got {}", self.stages));
        }
        if self.validation_interval == 0 {
            return bad("validation_interval must be >= 1".into());
        }
        if self.group_size < 2 {
            return bad(format!(
                "group_size must be >= 2 for group-relative advantages, got {}",
                self.group_size
            ));
        }
        if self.tasks_per_batch == 0 {
            return bad("tasks_per_batch must be >= 1".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be >= 1".into());
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be finite and >= 0, got {}", self.beta));
        }
        if !(self.eps_clip > 0.0 && self.eps_clip < 1.0) {
            return bad(format!("eps_clip must lie in (0, 1), got {}", self.eps_clip));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be finite and > 0, got {}", self.learning_rate));
        }
        CompressionGrid::new(self.compression_grid.clone())
            .map_err(|err| HarnessError::ConfigInvalid(format!("compression_grid: {err}")))?;
        if let Some(budgets) = &self.budget_override {
            if budgets.len() != self.stages {
                return bad(format!(
                    "budget_override has {} entries but stages = {}",
                    budgets.len(),
                    self.stages
                ));
            }
            if budgets.windows(2).any(|w| w[0] < w[1]) {
                return bad(format!("budget_override must be non-increasing, got {budgets:?}"));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

/// What `train` leaves behind: the final weights and the files it wrote.
#[derive(Debug)]
pub struct TrainOutcome {
    pub params: PolicyParams,
    pub metrics_path: PathBuf,
    pub helpfulness_path: PathBuf,
    pub checkpoint_path: PathBuf,
}

fn metrics_header() -> String {
    let mut header =
        String::from("step,stage,budget,active_count,mean_return,mean_success,mean_log_c");
    for category in TaskCategory::ALL {
        let _ = write!(header, ",acc_with_{}", category.as_str());
    }
    for category in TaskCategory::ALL {
        let _ = write!(header, ",acc_without_{}", category.as_str());
    }
    header.push_str(",wall_ms\n");
    header
}

/// Greedy per-category accuracy under two contexts at once: the given
/// active set and the empty set. Twelve independent sweeps, fanned out.
fn accuracy_pair(
    params: &PolicyParams,
    active: &BTreeSet<SkillId>,
    tasks_by_category: &[Vec<Task>],
    bank: &SkillBank,
    layout: &WorldLayout,
    max_steps: u32,
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let empty = BTreeSet::new();
    let jobs: Vec<(usize, bool)> = (0..tasks_by_category.len())
        .flat_map(|idx| [(idx, true), (idx, false)])
        .collect();
    let results = map_items(&jobs, |&(idx, with_skills)| {
        let ids = if with_skills { active } else { &empty };
        validate_accuracy(params, &tasks_by_category[idx], ids, bank, layout, max_steps)
    });
    let mut with = Vec::with_capacity(tasks_by_category.len());
    let mut without = Vec::with_capacity(tasks_by_category.len());
    for (job, result) in jobs.iter().zip(results) {
        let acc = result?;
        if job.1 {
            with.push(acc);
        } else {
            without.push(acc);
        }
    }
    Ok((with, without))
}

/// Runs the full curriculum training loop and writes the checkpoint plus
/// the metrics and helpfulness CSVs into `config.out_dir`.
///
/// Per step: enforce the stage budget, run helpfulness validation when the
/// within-stage position hits the interval (selection mode decides how the
/// report becomes the next active set), roll out one batch of task groups
/// under the pre-update snapshot, take one clipped policy-gradient step,
/// and append one metrics row with post-update greedy accuracies.
pub fn train(config: &RunConfig) -> Result<TrainOutcome, HarnessError> {
    config.validate()?;
    let layout = WorldLayout::load(&config.layout_path)?;
    let bank = load_bank(&config.skills_dir)?;
    let grid = CompressionGrid::new(config.compression_grid.clone())?;

    let n_actions = layout.action_vocabulary().len();
    let mut params = PolicyParams::zeros(feature_dim(&layout), n_actions, grid);
    let params_ref = params.snapshot();

    let mut curriculum = CurriculumState::new(
        &bank,
        config.stages,
        config.total_steps,
        config.validation_interval,
    )?;
    if let Some(budgets) = &config.budget_override {
        curriculum.budgets = budgets.clone();
    }

    let tasks = all_tasks(&layout);
    if tasks.is_empty() {
        return Err(HarnessError::ConfigInvalid("layout enumerates no tasks".into()));
    }
    let tasks_by_category: Vec<Vec<Task>> =
        TaskCategory::ALL.iter().map(|&c| enumerate_tasks(&layout, c)).collect();
    let split = if config.selection_mode == SelectionMode::Full {
        None
    } else {
        Some(group_validation(&tasks, &bank)?)
    };

    let mut metrics_csv = metrics_header();
    let mut helpfulness_csv = String::from("step,stage,k,acc_with,acc_without,delta,selected\n");

    for step in 1..=config.total_steps {
        let stage = curriculum.stage(step)?;

        if let Some(split) = &split {
            curriculum.enforce_budget(step)?;
            if curriculum.validation_due(step)? {
                let budget = curriculum.budget(step)?;
                let report = helpfulness_report(
                    &params,
                    split,
                    &curriculum.active,
                    &bank,
                    &layout,
                    config.max_steps,
                    step,
                )?;
                let selected = match config.selection_mode {
                    SelectionMode::Skill0 => filter_rank_select(&report, budget),
                    SelectionMode::NoFilter => rank_select_unfiltered(&report, budget),
                    SelectionMode::NoRank => {
                        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
                            config.seed,
                            step,
                            SELECTION_STREAM,
                            0,
                        ));
                        filter_random_select(&report, budget, &mut rng)
                    }
                    SelectionMode::Full => unreachable!("full mode never validates"),
                };
                let kept: BTreeSet<SkillId> = selected.iter().copied().collect();
                for entry in &report.entries {
                    let _ = writeln!(
                        helpfulness_csv,
                        "{},{},{},{},{},{},{}",
                        step,
                        stage,
                        entry.id,
                        entry.acc_with,
                        entry.acc_without,
                        entry.delta,
                        u8::from(kept.contains(&entry.id)),
                    );
                }
                curriculum.apply_selection(&selected, step);
            }
        }

        // One group-relative update: sample tasks, roll out G members each
        // under the frozen pre-update snapshot, ascend the clipped objective.
        let params_old = params.snapshot();
        let mut task_rng =
            ChaCha8Rng::seed_from_u64(mix_seed(config.seed, step, TASK_STREAM, 0));
        let batch: Vec<&Task> = (0..config.tasks_per_batch)
            .map(|_| &tasks[task_rng.gen_range(0..tasks.len())])
            .collect();
        let mut batch_rules = Vec::with_capacity(batch.len());
        for task in &batch {
            batch_rules.push(rules_for(&bank, &curriculum.active, task.category.as_str())?);
        }
        let jobs: Vec<(usize, usize)> = (0..batch.len())
            .flat_map(|group| (0..config.group_size).map(move |member| (group, member)))
            .collect();
        let rolled = map_items(&jobs, |&(group, member)| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
                config.seed,
                step,
                group as u64,
                member as u64,
            ));
            rollout(&params_old, &layout, batch[group], &batch_rules[group], config.max_steps, &mut rng)
        });
        let mut rolled = rolled.into_iter();
        let mut groups = Vec::with_capacity(batch.len());
        for _ in 0..batch.len() {
            let members: Vec<Trajectory> =
                rolled.by_ref().take(config.group_size).collect::<Result<_, _>>()?;
            groups.push(TrajectoryGroup::from_rollouts(members, config.lambda)?);
        }
        let (_objective, gradient) =
            loss_and_grad(&params, &params_old, &params_ref, &groups, config.eps_clip, config.beta)?;
        params = apply_update(&params, &gradient, config.learning_rate)?;

        // Batch statistics plus post-update greedy accuracies.
        let mut episodes = 0usize;
        let mut return_sum = 0.0;
        let mut successes = 0usize;
        let mut log_c_sum = 0.0;
        for group in &groups {
            for trajectory in &group.trajectories {
                episodes += 1;
                return_sum += composite_return(trajectory, config.lambda);
                successes += usize::from(trajectory.success);
                log_c_sum += trajectory.steps.iter().map(|s| s.factor.ln()).sum::<f64>();
            }
        }
        let (acc_with, acc_without) = accuracy_pair(
            &params,
            &curriculum.active,
            &tasks_by_category,
            &bank,
            &layout,
            config.max_steps,
        )?;

        let _ = write!(
            metrics_csv,
            "{},{},{},{},{},{},{}",
            step,
            stage,
            curriculum.budget(step)?,
            curriculum.active.len(),
            return_sum / episodes as f64,
            successes as f64 / episodes as f64,
            log_c_sum / episodes as f64,
        );
        for acc in acc_with.iter().chain(acc_without.iter()) {
            let _ = write!(metrics_csv, ",{acc}");
        }
        // Wall-clock is pinned to zero so reruns stay byte-identical.
        metrics_csv.push_str(",0\n");
    }

    fs::create_dir_all(&config.out_dir)?;
    let metrics_path = config.out_dir.join("metrics.csv");
    let helpfulness_path = config.out_dir.join("helpfulness.csv");
    let checkpoint_path = config.out_dir.join("checkpoint.json");
    fs::write(&metrics_path, metrics_csv)?;
    fs::write(&helpfulness_path, helpfulness_csv)?;
    params.save(&checkpoint_path)?;

    Ok(TrainOutcome { params, metrics_path, helpfulness_path, checkpoint_path })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Greedy accuracy per category over the full task enumeration, with
/// exactly the given active set in context (empty = skill-free inference).
pub fn evaluate(
    params: &PolicyParams,
    active_ids: &BTreeSet<SkillId>,
    layout: &WorldLayout,
    bank: &SkillBank,
    max_steps: u32,
) -> Result<BTreeMap<TaskCategory, f64>, HarnessError> {
    let categories: Vec<TaskCategory> = TaskCategory::ALL.to_vec();
    let results = map_items(&categories, |&category| {
        let tasks = enumerate_tasks(layout, category);
        validate_accuracy(params, &tasks, active_ids, bank, layout, max_steps)
    });
    let mut out = BTreeMap::new();
    for (category, result) in categories.into_iter().zip(results) {
        out.insert(category, result?);
    }
    Ok(out)
}

/// Unweighted mean of the per-category accuracies.
pub fn macro_accuracy(per_category: &BTreeMap<TaskCategory, f64>) -> f64 {
    let sum: f64 = per_category.values().sum();
    sum / per_category.len() as f64
}

/// Parses the CLI skill selector: `all`, `none`, or comma-separated ids,
/// each of which must exist in the bank.
pub fn parse_skill_selector(
    selector: &str,
    bank: &SkillBank,
) -> Result<BTreeSet<SkillId>, HarnessError> {
    match selector {
        "all" => Ok(bank.ids()),
        "none" => Ok(BTreeSet::new()),
        list => {
            let mut ids = BTreeSet::new();
            for part in list.split(',') {
                let id: SkillId = parse_scalar("skills", part.trim())?;
                bank.get(id)?;
                ids.insert(id);
            }
            Ok(ids)
        }
    }
}

// ---------------------------------------------------------------------------
// Ablations
// ---------------------------------------------------------------------------

/// Final accuracies of one trained variant under one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationCell {
    pub variant: String,
    pub seed: u64,
    pub skill_free: f64,
    pub skill_augmented: f64,
}

/// Seed-mean summary line for one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub variant: String,
    pub skill_free: f64,
    pub skill_augmented: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub preset: String,
    pub seeds: u64,
    pub rows: Vec<AblationRow>,
    pub cells: Vec<AblationCell>,
}

impl AblationReport {
    /// Plain-text summary table: one line per variant, seed means.
    pub fn render(&self) -> String {
        let mut out = format!("preset: {} ({} seeds)\n", self.preset, self.seeds);
        let width = self.rows.iter().map(|r| r.variant.len()).max().unwrap_or(7).max(7);
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>15}", "variant", "skill_free", "skill_augmented");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>10.4}  {:>15.4}",
                row.variant, row.skill_free, row.skill_augmented
            );
        }
        out
    }
}

/// The preset's config grid, before seeds are applied.
fn preset_variants(
    preset: &str,
    base: &RunConfig,
) -> Result<Vec<(String, RunConfig)>, HarnessError> {
    let variant = |name: &str, edit: &dyn Fn(&mut RunConfig)| {
        let mut config = base.clone();
        config.selection_mode = SelectionMode::Skill0;
        config.budget_override = None;
        edit(&mut config);
        (name.to_string(), config)
    };
    match preset {
        "budgets" => {
            let bank = load_bank(&base.skills_dir)?;
            let n = bank.len();
            Ok(vec![
                variant("annealed", &|_| {}),
                variant("constant_full", &|c| c.budget_override = Some(vec![n; c.stages])),
                variant("constant_half", &|c| {
                    c.budget_override = Some(vec![n.div_ceil(2); c.stages])
                }),
                variant("constant_zero", &|c| c.budget_override = Some(vec![0; c.stages])),
                variant("fixed_full", &|c| c.selection_mode = SelectionMode::Full),
            ])
        }
        "filter_rank" => Ok(vec![
            variant("skill0", &|_| {}),
            variant("no_filter", &|c| c.selection_mode = SelectionMode::NoFilter),
            variant("no_rank", &|c| c.selection_mode = SelectionMode::NoRank),
        ]),
        "interval" => Ok(vec![
            variant("d5", &|c| c.validation_interval = 5),
            variant("d10", &|c| c.validation_interval = 10),
            variant("d20", &|c| c.validation_interval = 20),
        ]),
        other => Err(HarnessError::UnknownPreset(other.to_string())),
    }
}

/// Trains every variant of the preset's grid over [`ABLATION_SEEDS`] seeds
/// and reports final skill-free and skill-augmented (whole bank in context)
/// macro accuracy, as per-variant seed means.
pub fn run_ablation(preset: &str, base: &RunConfig) -> Result<AblationReport, HarnessError> {
    let variants = preset_variants(preset, base)?;
    let layout = WorldLayout::load(&base.layout_path)?;
    let bank = load_bank(&base.skills_dir)?;
    let full = bank.ids();
    let none = BTreeSet::new();

    let mut cells = Vec::new();
    let mut rows = Vec::new();
    for (name, config) in &variants {
        let mut free_sum = 0.0;
        let mut augmented_sum = 0.0;
        for offset in 0..ABLATION_SEEDS {
            let mut config = config.clone();
            config.seed = base.seed + offset;
            config.out_dir =
                base.out_dir.join(preset).join(name).join(format!("seed{}", config.seed));
            let outcome = train(&config)?;
            let skill_free =
                macro_accuracy(&evaluate(&outcome.params, &none, &layout, &bank, config.max_steps)?);
            let skill_augmented =
                macro_accuracy(&evaluate(&outcome.params, &full, &layout, &bank, config.max_steps)?);
            free_sum += skill_free;
            augmented_sum += skill_augmented;
            cells.push(AblationCell { variant: name.clone(), seed: config.seed, skill_free, skill_augmented });
        }
        rows.push(AblationRow {
            variant: name.clone(),
            skill_free: free_sum / ABLATION_SEEDS as f64,
            skill_augmented: augmented_sum / ABLATION_SEEDS as f64,
        });
    }
    Ok(AblationReport { preset: preset.to_string(), seeds: ABLATION_SEEDS, rows, cells })
}

// ---------------------------------------------------------------------------
