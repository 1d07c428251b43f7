//! Skill-withdrawal curriculum: the annealed budget schedule, validation
//! task grouping, helpfulness measurement, and the Filter/Rank/Select step
//! that shrinks the active skill set from the whole bank down to nothing.
//!
//! The driving signal is per-file helpfulness Δ_k: validation accuracy on
//! the file's own sub-tasks with the active set in context minus accuracy
//! with no skills at all. Files that stop paying rent are dropped and never
//! come back.

use crate::grpo::{greedy_rollout, GrpoError};
use crate::mini_world::{Task, TaskCategory, WorldLayout};
use crate::policy::PolicyParams;
use crate::skill_bank::{rules_for, BankError, SkillBank, SkillId, GENERAL_CATEGORY};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Fixed reset seed for every validation rollout, so measured accuracy is a
/// pure function of the policy and the active set.
pub const VALIDATION_SEED: u64 = 0xD1CE;

#[derive(Debug, Error)]
pub enum CurriculumError {
    #[error("a curriculum needs at least 2 stages, got {0}")]
    InvalidStages(usize),
    #[error("step {step} is outside 1..={total}")]
    InvalidStep { step: u64, total: u64 },
    #[error("no skill file covers task category `{0}`")]
    UncoveredCategory(String),
    #[error("validation task set is empty")]
    EmptyTaskSet,
    #[error(transparent)]
    Bank(#[from] BankError),
    #[error(transparent)]
    Rollout(#[from] GrpoError),
}

// ---------------------------------------------------------------------------
// Budget schedule and stages
// ---------------------------------------------------------------------------

/// Linear anneal of the skill budget: `M^(s) = ⌈N·(N_S−s)/(N_S−1)⌉` for
/// s = 1..N_S, so the first stage admits the whole bank and the last stage
/// admits nothing. Exact integer arithmetic throughout.
pub fn budget_schedule(bank_size: usize, n_stages: usize) -> Result<Vec<usize>, CurriculumError> {
    if n_stages < 2 {
        return Err(CurriculumError::InvalidStages(n_stages));
    }
    let d = n_stages - 1;
    Ok((1..=n_stages)
        .map(|s| {
            let numer = bank_size * (n_stages - s);
            numer.div_ceil(d)
        })
        .collect())
}

/// Maps a 1-based training step to its 1-based stage: contiguous blocks of
/// `⌊total/N_S⌋` steps each, remainder steps folded into the final stage.
/// Degenerate configs with more stages than steps clamp to the final stage.
pub fn stage_index(step: u64, total_steps: u64, n_stages: usize) -> Result<usize, CurriculumError> {
    if step < 1 || step > total_steps {
        return Err(CurriculumError::InvalidStep { step, total: total_steps });
    }
    let block = total_steps / n_stages as u64;
    if block == 0 {
        return Ok(n_stages);
    }
    Ok(((1 + (step - 1) / block) as usize).min(n_stages))
}

/// All steps at which helpfulness validation fires: within-stage position
/// divisible by `interval`, and only while the stage budget is positive.
pub fn validation_steps(
    total_steps: u64,
    n_stages: usize,
    interval: u64,
    budgets: &[usize],
) -> Result<Vec<u64>, CurriculumError> {
    if interval == 0 {
        return Ok(Vec::new());
    }
    let block = total_steps / n_stages as u64;
    let mut out = Vec::new();
    for step in 1..=total_steps {
        let stage = stage_index(step, total_steps, n_stages)?;
        if budgets[stage - 1] == 0 {
            continue;
        }
        let within = if block == 0 { step } else { step - (stage as u64 - 1) * block };
        if within % interval == 0 {
            out.push(step);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Validation grouping
// ---------------------------------------------------------------------------

/// Which validation tasks belong to which skill file.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSplit {
    pub by_file: BTreeMap<SkillId, Vec<Task>>,
}

impl ValidationSplit {
    pub fn tasks_for(&self, id: SkillId) -> &[Task] {
        self.by_file.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Assigns every task to exactly one skill file: the lowest-id file whose
/// category matches the task. General-category files then take a uniform
/// round-robin slice across categories — about a 1/n_files share each —
/// without ever draining a category file below one task.
pub fn group_validation(
    tasks: &[Task],
    bank: &SkillBank,
) -> Result<ValidationSplit, CurriculumError> {
    let mut category_owner: BTreeMap<&str, SkillId> = BTreeMap::new();
    let mut general_ids: Vec<SkillId> = Vec::new();
    for id in bank.ids() {
        let file = bank.get(id)?;
        if file.category == GENERAL_CATEGORY {
            general_ids.push(id);
        } else {
            category_owner.entry(file.category.as_str()).or_insert(id);
        }
    }

    let mut by_file: BTreeMap<SkillId, Vec<Task>> =
        bank.ids().into_iter().map(|id| (id, Vec::new())).collect();
    for task in tasks {
        let category = task.category.as_str();
        let owner = category_owner
            .get(category)
            .copied()
            .ok_or_else(|| CurriculumError::UncoveredCategory(category.to_string()))?;
        by_file.get_mut(&owner).unwrap().push(task.clone());
    }

    if !general_ids.is_empty() && !tasks.is_empty() {
        let share = tasks.len().div_ceil(bank.len());
        for &gid in &general_ids {
            let mut taken = 0;
            let mut stalled = 0;
            let mut cats = TaskCategory::ALL.iter().cycle();
            while taken < share && stalled < TaskCategory::ALL.len() {
                let cat = cats.next().unwrap();
                let Some(&owner) = category_owner.get(cat.as_str()) else {
                    stalled += 1;
                    continue;
                };
                let pool = by_file.get_mut(&owner).unwrap();
                if pool.len() > 1 {
                    let task = pool.pop().unwrap();
                    by_file.get_mut(&gid).unwrap().push(task);
                    taken += 1;
                    stalled = 0;
                } else {
                    stalled += 1;
                }
            }
        }
    }

    Ok(ValidationSplit { by_file })
}

// ---------------------------------------------------------------------------
// Helpfulness
// ---------------------------------------------------------------------------

/// Fraction of `tasks` solved by greedy rollouts from the fixed validation
/// reset, with the rules of `active_ids` in context. An empty active set
/// zeroes the hint block, which is exactly the skill-free condition.
pub fn validate_accuracy(
    params: &PolicyParams,
    tasks: &[Task],
    active_ids: &BTreeSet<SkillId>,
    bank: &SkillBank,
    layout: &WorldLayout,
    max_steps: u32,
) -> Result<f64, CurriculumError> {
    if tasks.is_empty() {
        return Err(CurriculumError::EmptyTaskSet);
    }
    let mut solved = 0usize;
    for task in tasks {
        let rules = rules_for(bank, active_ids, task.category.as_str())?;
        let traj = greedy_rollout(params, layout, task, &rules, max_steps, VALIDATION_SEED)?;
        if traj.success {
            solved += 1;
        }
    }
    Ok(solved as f64 / tasks.len() as f64)
}

/// One file's helpfulness measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct HelpfulnessEntry {
    pub id: SkillId,
    pub acc_with: f64,
    pub acc_without: f64,
    pub delta: f64,
}

/// Helpfulness of every file in the current active set at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct HelpfulnessReport {
    pub step: u64,
    pub active: BTreeSet<SkillId>,
    pub entries: Vec<HelpfulnessEntry>,
}

/// Measures Δ_k for every k in the active set: accuracy on k's validation
/// tasks with the whole active set in context, minus accuracy with no
/// skills. Only currently-active files are measured — withdrawn files are
/// gone for good.
pub fn helpfulness_report(
    params: &PolicyParams,
    split: &ValidationSplit,
    active_ids: &BTreeSet<SkillId>,
    bank: &SkillBank,
    layout: &WorldLayout,
    max_steps: u32,
    step: u64,
) -> Result<HelpfulnessReport, CurriculumError> {
    let empty = BTreeSet::new();
    let mut entries = Vec::with_capacity(active_ids.len());
    for &id in active_ids {
        bank.get(id)?;
        let tasks = split.tasks_for(id);
        let acc_with = validate_accuracy(params, tasks, active_ids, bank, layout, max_steps)?;
        let acc_without = validate_accuracy(params, tasks, &empty, bank, layout, max_steps)?;
        entries.push(HelpfulnessEntry { id, acc_with, acc_without, delta: acc_with - acc_without });
    }
    Ok(HelpfulnessReport { step, active: active_ids.clone(), entries })
}

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------

fn ranked(entries: &[HelpfulnessEntry]) -> Vec<&HelpfulnessEntry> {
    let mut sorted: Vec<&HelpfulnessEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| {
        b.delta.partial_cmp(&a.delta).unwrap_or(std::cmp::Ordering::Equal).then(a.id.cmp(&b.id))
    });
    sorted
}

/// Filter (Δ > 0), rank (Δ descending, ties by ascending id), select (top
/// `budget`). Budget 0 always yields the empty list.
pub fn filter_rank_select(report: &HelpfulnessReport, budget: usize) -> Vec<SkillId> {
    ranked(&report.entries)
        .into_iter()
        .filter(|e| e.delta > 0.0)
        .take(budget)
        .map(|e| e.id)
        .collect()
}

/// Ablation: rank and truncate without the positivity filter, so unhelpful
/// files can survive as long as the budget allows.
pub fn rank_select_unfiltered(report: &HelpfulnessReport, budget: usize) -> Vec<SkillId> {
    ranked(&report.entries).into_iter().take(budget).map(|e| e.id).collect()
}

/// Ablation: keep the positivity filter but replace ranking with a seeded
/// uniform draw of `budget` survivors.
pub fn filter_random_select(
    report: &HelpfulnessReport,
    budget: usize,
    rng: &mut impl Rng,
) -> Vec<SkillId> {
    let mut kept: Vec<SkillId> =
        report.entries.iter().filter(|e| e.delta > 0.0).map(|e| e.id).collect();
    // Partial Fisher–Yates: the first `budget` slots become the sample.
    let take = budget.min(kept.len());
    for i in 0..take {
        let j = rng.gen_range(i..kept.len());
        kept.swap(i, j);
    }
    let mut selected = kept[..take].to_vec();
    selected.sort_unstable();
    selected
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Mutable curriculum position: the schedule, the surviving active set, and
/// the bookkeeping needed to enforce monotone withdrawal.
#[derive(Debug, Clone)]
pub struct CurriculumState {
    pub budgets: Vec<usize>,
    pub n_stages: usize,
    pub total_steps: u64,
    pub interval: u64,
    pub active: BTreeSet<SkillId>,
    /// Active ids in priority order — the latest selection's ranking, or
    /// ascending id before any selection has run. Budget enforcement at a
    /// stage boundary truncates this list, so the files that survive a
    /// shrink are the best-ranked ones from the most recent validation.
    pub ranking: Vec<SkillId>,
    pub last_validation_step: Option<u64>,
}

impl CurriculumState {
    /// Starts at stage 1 with the whole bank active.
    pub fn new(
        bank: &SkillBank,
        n_stages: usize,
        total_steps: u64,
        interval: u64,
    ) -> Result<CurriculumState, CurriculumError> {
        let budgets = budget_schedule(bank.len(), n_stages)?;
        let active = bank.ids();
        let ranking = active.iter().copied().collect();
        Ok(CurriculumState {
            budgets,
            n_stages,
            total_steps,
            interval,
            active,
            ranking,
            last_validation_step: None,
        })
    }

    pub fn stage(&self, step: u64) -> Result<usize, CurriculumError> {
        stage_index(step, self.total_steps, self.n_stages)
    }

    pub fn budget(&self, step: u64) -> Result<usize, CurriculumError> {
        Ok(self.budgets[self.stage(step)? - 1])
    }

    /// True when this step should run helpfulness validation: within-stage
    /// position divisible by the interval while the budget is positive.
    pub fn validation_due(&self, step: u64) -> Result<bool, CurriculumError> {
        if self.interval == 0 {
            return Ok(false);
        }
        let stage = self.stage(step)?;
        if self.budgets[stage - 1] == 0 {
            return Ok(false);
        }
        let block = self.total_steps / self.n_stages as u64;
        let within = if block == 0 { step } else { step - (stage as u64 - 1) * block };
        Ok(within % self.interval == 0)
    }

    /// Caps the active set at the stage budget by truncating the priority
    /// ranking. A stage boundary can drop the budget below the carried-over
    /// set size mid-interval; the best-ranked files from the most recent
    /// validation survive the cut. Zero-budget stages force the set empty.
    pub fn enforce_budget(&mut self, step: u64) -> Result<(), CurriculumError> {
        let budget = self.budget(step)?;
        if self.ranking.len() > budget {
            self.ranking.truncate(budget);
            self.active = self.ranking.iter().copied().collect();
        }
        Ok(())
    }

    /// Installs a selection, given in priority order. Selections can only
    /// shrink the active set — re-admitting a withdrawn file is a logic
    /// error.
    pub fn apply_selection(&mut self, selected: &[SkillId], step: u64) {
        let next: BTreeSet<SkillId> = selected.iter().copied().collect();
        debug_assert_eq!(next.len(), selected.len(), "selection repeats an id");
        assert!(
            next.is_subset(&self.active),
            "selection must be a subset of the active set (no re-admission)"
        );
        self.active = next;
        self.ranking = selected.to_vec();
        self.last_validation_step = Some(step);
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context_encoder::FeatureLayout;
    use crate::mini_world::{all_tasks, enumerate_tasks};
    use crate::oracles::brute_force_select;
    use crate::policy::CompressionGrid;
    use crate::skill_bank::parse_skill_file;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn desk() -> WorldLayout {
        WorldLayout::default_desk()
    }

    fn file(category: &str, rules: &str) -> crate::skill_bank::SkillFile {
        let text = format!("---\ntask: t\ncategory: {category}\n---\n## Rules\n{rules}\n");
        parse_skill_file(&text, &format!("{category}.md")).unwrap()
    }

    fn six_category_bank() -> SkillBank {
        let files = TaskCategory::ALL
            .iter()
            .map(|c| file(c.as_str(), "when task_is(pick) then noop"))
            .collect();
        SkillBank::from_files(files)
    }

    // -- schedule ---------------------------------------------------------

    #[test]
    fn published_schedules_are_reproduced_exactly() {
        assert_eq!(budget_schedule(6, 3).unwrap(), vec![6, 3, 0]);
        assert_eq!(budget_schedule(5, 3).unwrap(), vec![5, 3, 0]);
        assert_eq!(budget_schedule(1, 2).unwrap(), vec![1, 0]);
    }

    #[test]
    fn one_stage_is_rejected() {
        assert!(matches!(budget_schedule(6, 1), Err(CurriculumError::InvalidStages(1))));
        assert!(matches!(budget_schedule(6, 0), Err(CurriculumError::InvalidStages(0))));
    }

    #[test]
    fn schedule_endpoints_and_decrements_hold_across_the_sweep() {
        for n in 1..=64usize {
            for stages in 2..=16usize {
                let m = budget_schedule(n, stages).unwrap();
                assert_eq!(m.len(), stages);
                assert_eq!(m[0], n, "first stage admits the whole bank");
                assert_eq!(*m.last().unwrap(), 0, "last stage admits nothing");
                let cap = n.div_ceil(stages - 1);
                for w in m.windows(2) {
                    assert!(w[0] >= w[1], "budgets never grow");
                    assert!(w[0] - w[1] <= cap, "per-stage drop stays within the linear rate");
                }
            }
        }
    }

    #[test]
    fn stage_boundaries_match_block_arithmetic() {
        assert_eq!(stage_index(1, 300, 3).unwrap(), 1);
        assert_eq!(stage_index(100, 300, 3).unwrap(), 1);
        assert_eq!(stage_index(101, 300, 3).unwrap(), 2);
        assert_eq!(stage_index(200, 300, 3).unwrap(), 2);
        assert_eq!(stage_index(201, 300, 3).unwrap(), 3);
        assert_eq!(stage_index(300, 300, 3).unwrap(), 3);
    }

    #[test]
    fn remainder_steps_fall_in_the_final_stage() {
        // 305 / 3 = 101 per block; steps 304..=305 exceed 3 * 101 = 303.
        assert_eq!(stage_index(303, 305, 3).unwrap(), 3);
        assert_eq!(stage_index(305, 305, 3).unwrap(), 3);
    }

    #[test]
    fn out_of_range_steps_are_rejected() {
        assert!(matches!(
            stage_index(0, 300, 3),
            Err(CurriculumError::InvalidStep { step: 0, .. })
        ));
        assert!(matches!(
            stage_index(301, 300, 3),
            Err(CurriculumError::InvalidStep { step: 301, .. })
        ));
    }

    #[test]
    fn more_stages_than_steps_clamps_to_the_terminal_stage() {
        assert_eq!(stage_index(1, 2, 5).unwrap(), 5);
        assert_eq!(stage_index(2, 2, 5).unwrap(), 5);
    }

    #[test]
    fn validation_fires_on_interval_steps_of_budgeted_stages() {
        let budgets = budget_schedule(6, 3).unwrap();
        let steps = validation_steps(300, 3, 10, &budgets).unwrap();
        let expected: Vec<u64> = (1..=20).map(|i| i * 10).collect();
        assert_eq!(steps, expected, "two budgeted stages of 100 steps, every 10th step");
    }

    #[test]
    fn zero_budget_stages_never_validate() {
        let budgets = budget_schedule(6, 3).unwrap();
        let steps = validation_steps(300, 3, 10, &budgets).unwrap();
        assert!(steps.iter().all(|s| stage_index(*s, 300, 3).unwrap() < 3));
    }

    // -- grouping -----------------------------------------------------------

    #[test]
    fn tasks_group_bijectively_onto_matching_files() {
        let layout = desk();
        let bank = six_category_bank();
        let tasks = all_tasks(&layout);
        let split = group_validation(&tasks, &bank).unwrap();
        let total: usize = split.by_file.values().map(Vec::len).sum();
        assert_eq!(total, tasks.len(), "every task lands in exactly one bucket");
        for id in bank.ids() {
            let category = bank.get(id).unwrap().category.clone();
            for task in split.tasks_for(id) {
                assert_eq!(task.category.as_str(), category);
            }
            assert!(!split.tasks_for(id).is_empty());
        }
    }

    #[test]
    fn uncovered_category_is_an_error() {
        let layout = desk();
        let files = TaskCategory::ALL
            .iter()
            .take(5)
            .map(|c| file(c.as_str(), "when task_is(pick) then noop"))
            .collect();
        let bank = SkillBank::from_files(files);
        assert!(matches!(
            group_validation(&all_tasks(&layout), &bank),
            Err(CurriculumError::UncoveredCategory(c)) if c == "pick2"
        ));
    }

    #[test]
    fn duplicate_category_files_tie_break_to_the_lowest_id() {
        let layout = desk();
        let mut files: Vec<_> = TaskCategory::ALL
            .iter()
            .map(|c| file(c.as_str(), "when task_is(pick) then noop"))
            .collect();
        files.push(file("clean", "when task_is(clean) then noop"));
        let bank = SkillBank::from_files(files);
        let split = group_validation(&all_tasks(&layout), &bank).unwrap();
        let clean_id = bank
            .ids()
            .into_iter()
            .find(|&id| bank.get(id).unwrap().category == "clean")
            .unwrap();
        assert!(!split.tasks_for(clean_id).is_empty());
        assert!(split.tasks_for(7).is_empty(), "the later duplicate receives nothing");
    }

    #[test]
    fn general_files_receive_a_round_robin_mixture() {
        let layout = desk();
        let mut files: Vec<_> = TaskCategory::ALL
            .iter()
            .map(|c| file(c.as_str(), "when task_is(pick) then noop"))
            .collect();
        files.push(file(GENERAL_CATEGORY, "when visible(target) then take(target)"));
        let bank = SkillBank::from_files(files);
        let tasks = all_tasks(&layout);
        let split = group_validation(&tasks, &bank).unwrap();

        let total: usize = split.by_file.values().map(Vec::len).sum();
        assert_eq!(total, tasks.len());
        let general_id = 7;
        let share = tasks.len().div_ceil(bank.len());
        let general = split.tasks_for(general_id);
        assert_eq!(general.len(), share);
        // Round-robin over the six categories: one task each, then wrap.
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in general {
            *counts.entry(t.category.as_str()).or_default() += 1;
        }
        assert_eq!(counts.len(), TaskCategory::ALL.len(), "mixture spans every category");
        assert!(counts.values().all(|&c| c <= 2));
        for id in 1..=6u32 {
            assert!(!split.tasks_for(id).is_empty(), "category files keep at least one task");
        }
    }

    // -- validation accuracy --------------------------------------------------

    /// Rules that solve any pick task from any placement: cycle the rooms
    /// until the target shows up, grab it, walk to the goal, drop it.
    fn pick_solver_file() -> crate::skill_bank::SkillFile {
        file(
            "pick",
            "when holding(target) and at(goal) then put(goal)\n\
             when holding(target) then goto(goal)\n\
             when visible(target) then take(target)\n\
             when at(hall) then goto(kitchen)\n\
             when at(kitchen) then goto(study)\n\
             when at(study) then goto(pantry)\n\
             when at(pantry) then goto(hall)",
        )
    }

    /// Params whose action head reads only the hint one-hot, so greedy
    /// rollouts follow whatever the active rules suggest.
    fn hint_follower(layout: &WorldLayout) -> PolicyParams {
        let widths = FeatureLayout::of(layout);
        let hint_start = widths.observation_block() + widths.recency_block();
        let dim = widths.dim();
        let mut params = PolicyParams::zeros(dim, widths.actions, CompressionGrid::default_grid());
        for a in 0..widths.actions {
            params.action.data[a * dim + hint_start + a] = 12.0;
        }
        params
    }

    #[test]
    fn empty_task_set_is_rejected() {
        let layout = desk();
        let bank = six_category_bank();
        let params = hint_follower(&layout);
        assert!(matches!(
            validate_accuracy(&params, &[], &bank.ids(), &bank, &layout, 12),
            Err(CurriculumError::EmptyTaskSet)
        ));
    }

    #[test]
    fn hint_follower_with_solver_rules_is_perfect_on_pick() {
        let layout = desk();
        let bank = SkillBank::from_files(vec![pick_solver_file()]);
        let params = hint_follower(&layout);
        let tasks = enumerate_tasks(&layout, TaskCategory::Pick);
        let acc =
            validate_accuracy(&params, &tasks, &bank.ids(), &bank, &layout, 12).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn removing_the_skills_strictly_lowers_hint_follower_accuracy() {
        let layout = desk();
        let bank = SkillBank::from_files(vec![pick_solver_file()]);
        let params = hint_follower(&layout);
        let tasks = enumerate_tasks(&layout, TaskCategory::Pick);
        let with =
            validate_accuracy(&params, &tasks, &bank.ids(), &bank, &layout, 12).unwrap();
        let without =
            validate_accuracy(&params, &tasks, &BTreeSet::new(), &bank, &layout, 12).unwrap();
        assert!(without < with, "skill-free accuracy {without} must trail {with}");
    }

    // -- helpfulness ------------------------------------------------------------

    #[test]
    fn helpful_skill_scores_a_full_delta() {
        let layout = desk();
        let bank = SkillBank::from_files(vec![pick_solver_file()]);
        let params = hint_follower(&layout);
        let tasks = enumerate_tasks(&layout, TaskCategory::Pick);
        let split = group_validation(&tasks, &bank).unwrap();
        let report =
            helpfulness_report(&params, &split, &bank.ids(), &bank, &layout, 12, 10).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].acc_with, 1.0);
        assert_eq!(report.entries[0].acc_without, 0.0);
        assert_eq!(report.entries[0].delta, 1.0);
    }

    #[test]
    fn zero_hint_weights_mean_zero_delta_everywhere() {
        let layout = desk();
        let bank = six_category_bank();
        let widths = FeatureLayout::of(&layout);
        let params =
            PolicyParams::zeros(widths.dim(), widths.actions, CompressionGrid::default_grid());
        let split = group_validation(&all_tasks(&layout), &bank).unwrap();
        let report =
            helpfulness_report(&params, &split, &bank.ids(), &bank, &layout, 12, 10).unwrap();
        assert_eq!(report.entries.len(), 6);
        for entry in &report.entries {
            assert_eq!(entry.delta, 0.0);
            assert_eq!(entry.acc_with, entry.acc_without);
        }
    }

    #[test]
    fn rules_that_never_fire_score_zero_delta() {
        let layout = desk();
        // Declared for pick, but every condition is gated on a different
        // task — the hint block stays zero on pick validation tasks.
        let inert = file("pick", "when task_is(heat) then use(microwave)");
        let bank = SkillBank::from_files(vec![inert]);
        let params = hint_follower(&layout);
        let tasks = enumerate_tasks(&layout, TaskCategory::Pick);
        let split = group_validation(&tasks, &bank).unwrap();
        let report =
            helpfulness_report(&params, &split, &bank.ids(), &bank, &layout, 12, 10).unwrap();
        assert_eq!(report.entries[0].delta, 0.0);
    }

    // -- selection ----------------------------------------------------------------

    fn report_from(deltas: &[(SkillId, f64)]) -> HelpfulnessReport {
        HelpfulnessReport {
            step: 0,
            active: deltas.iter().map(|(id, _)| *id).collect(),
            entries: deltas
                .iter()
                .map(|&(id, delta)| HelpfulnessEntry {
                    id,
                    acc_with: 0.5 + delta / 2.0,
                    acc_without: 0.5 - delta / 2.0,
                    delta,
                })
                .collect(),
        }
    }

    #[test]
    fn selection_keeps_positive_deltas_in_rank_order() {
        let report = report_from(&[(1, 0.2), (2, -0.1), (3, 0.05)]);
        assert_eq!(filter_rank_select(&report, 2), vec![1, 3]);
    }

    #[test]
    fn all_non_positive_deltas_empty_the_selection() {
        let report = report_from(&[(1, 0.0), (2, -0.3), (3, -0.01)]);
        assert_eq!(filter_rank_select(&report, 3), Vec::<SkillId>::new());
    }

    #[test]
    fn equal_deltas_tie_break_by_ascending_id() {
        let report = report_from(&[(1, 0.1), (2, 0.1)]);
        assert_eq!(filter_rank_select(&report, 1), vec![1]);
        let report = report_from(&[(2, 0.1), (1, 0.1)]);
        assert_eq!(filter_rank_select(&report, 1), vec![1]);
    }

    #[test]
    fn zero_budget_selects_nothing() {
        let report = report_from(&[(1, 0.9), (2, 0.8)]);
        assert_eq!(filter_rank_select(&report, 0), Vec::<SkillId>::new());
    }

    #[test]
    fn greedy_selection_matches_brute_force_on_random_deltas() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12usize);
            // Dyadic deltas make ties common and sums exact.
            let deltas: Vec<(SkillId, f64)> = (1..=n as SkillId)
                .map(|id| (id, rng.gen_range(-4i32..=4) as f64 * 0.25))
                .collect();
            let map: BTreeMap<u32, f64> = deltas.iter().copied().collect();
            let report = report_from(&deltas);
            for budget in 0..=n {
                let mine = filter_rank_select(&report, budget);
                let oracle = brute_force_select(&map, budget).unwrap();
                let sum = |ids: &[u32]| {
                    let mut sorted = ids.to_vec();
                    sorted.sort_unstable();
                    sorted.iter().map(|id| map[id]).sum::<f64>()
                };
                assert_eq!(sum(&mine), sum(&oracle), "objective must be optimal");
            }
        }
    }

    #[test]
    fn unfiltered_ranking_keeps_unhelpful_files_under_budget() {
        let report = report_from(&[(1, -0.2), (2, 0.3), (3, 0.0)]);
        assert_eq!(rank_select_unfiltered(&report, 2), vec![2, 3]);
        assert_eq!(rank_select_unfiltered(&report, 5), vec![2, 3, 1]);
    }

    #[test]
    fn random_selection_filters_first_and_respects_the_budget() {
        let report = report_from(&[(1, 0.5), (2, -0.1), (3, 0.2), (4, 0.1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let picked = filter_random_select(&report, 2, &mut rng);
            assert_eq!(picked.len(), 2);
            assert!(picked.iter().all(|id| [1u32, 3, 4].contains(id)));
            assert!(picked.windows(2).all(|w| w[0] < w[1]));
        }
        // Budget beyond the survivors returns all of them.
        let picked = filter_random_select(&report, 9, &mut rng);
        assert_eq!(picked, vec![1, 3, 4]);
    }

    // -- state ------------------------------------------------------------------

    #[test]
    fn state_walks_through_shrinking_selections() {
        let bank = six_category_bank();
        let mut state = CurriculumState::new(&bank, 3, 300, 10).unwrap();
        assert_eq!(state.budgets, vec![6, 3, 0]);
        assert_eq!(state.active.len(), 6);

        assert!(state.validation_due(10).unwrap());
        assert!(!state.validation_due(11).unwrap());
        state.apply_selection(&[1, 3, 5], 10);
        assert_eq!(state.active, BTreeSet::from([1, 3, 5]));

        state.apply_selection(&[3, 5], 110);
        assert_eq!(state.active, BTreeSet::from([3, 5]));

        // Stage 3 has budget 0: no validation fires and the set empties.
        assert!(!state.validation_due(250).unwrap());
        state.enforce_budget(250).unwrap();
        assert!(state.active.is_empty());
    }

    #[test]
    fn stage_entry_truncates_by_latest_ranking() {
        // A stage boundary mid-interval shrinks the budget before the next
        // validation fires; the carried set must be cut to the new budget,
        // keeping the best-ranked survivors (here: 5 outranks 1 outranks 3).
        let bank = six_category_bank();
        let mut state = CurriculumState::new(&bank, 3, 300, 10).unwrap();
        assert_eq!(state.ranking, vec![1, 2, 3, 4, 5, 6]);

        state.apply_selection(&[5, 1, 3, 6], 100);
        state.enforce_budget(101).unwrap(); // stage 2, budget 3
        assert_eq!(state.ranking, vec![5, 1, 3]);
        assert_eq!(state.active, BTreeSet::from([1, 3, 5]));

        // Within the same stage the cap is idempotent.
        state.enforce_budget(150).unwrap();
        assert_eq!(state.ranking, vec![5, 1, 3]);
    }

    #[test]
    fn pre_validation_truncation_keeps_lowest_ids() {
        // Before any selection the ranking is ascending id, so a budget
        // override smaller than the bank cuts to the lowest ids.
        let bank = six_category_bank();
        let mut state = CurriculumState::new(&bank, 3, 300, 10).unwrap();
        state.budgets = vec![3, 3, 0];
        state.enforce_budget(1).unwrap();
        assert_eq!(state.ranking, vec![1, 2, 3]);
        assert_eq!(state.active, BTreeSet::from([1, 2, 3]));
    }

    #[test]
    #[should_panic(expected = "no re-admission")]
    fn re_admission_is_a_logic_error() {
        let bank = six_category_bank();
        let mut state = CurriculumState::new(&bank, 3, 300, 10).unwrap();
        state.apply_selection(&[1, 2], 10);
        state.apply_selection(&[1, 2, 3], 20);
    }

    #[test]
    fn self_paced_filtering_never_resurrects_a_dropped_file() {
        // Simulate: file 2 goes non-positive at the first validation; it
        // must be absent from every later active set.
        let bank = six_category_bank();
        let mut state = CurriculumState::new(&bank, 3, 300, 10).unwrap();
        let first = report_from(&[(1, 0.3), (2, -0.1), (3, 0.2), (4, 0.1), (5, 0.05), (6, 0.2)]);
        let sel = filter_rank_select(&first, state.budget(10).unwrap());
        state.apply_selection(&sel, 10);
        assert!(!state.active.contains(&2));
        for later_budget in [3usize, 1, 0] {
            let entries: Vec<(SkillId, f64)> =
                state.active.iter().map(|&id| (id, 0.5)).collect();
            let rep = report_from(&entries);
            let sel = filter_rank_select(&rep, later_budget);
            state.apply_selection(&sel, 0);
            assert!(!state.active.contains(&2));
        }
    }
}
