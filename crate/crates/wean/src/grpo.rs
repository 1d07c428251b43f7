//! Group-relative policy optimization: grouped rollouts, composite returns,
//! z-normalized advantages, and the clipped surrogate objective with an
//! exact-KL penalty toward a frozen reference policy.
//!
//! The update is strictly on-policy: the behavior snapshot is refreshed
//! every batch and exactly one ascent step is taken per batch, so the
//! importance ratio is 1 at the point of differentiation and the clip acts
//! only as a safety rail.

use crate::context_encoder::{encode, EncodeError, HistoryEvent};
use crate::mini_world::{Episode, Task, WorldError, WorldLayout};
use crate::policy::{
    accumulate_kl_grad, exact_kl, PolicyError, PolicyGrad, PolicyParams,
};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrpoError {
    #[error("advantage normalization needs at least 2 trajectories, got {found}")]
    GroupTooSmall { found: usize },
    #[error("group has {advantages} advantages for {trajectories} trajectories")]
    AdvantageMismatch { advantages: usize, trajectories: usize },
    #[error("objective or gradient became non-finite")]
    NonFinite,
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// One decision point: the features the policy saw, what it chose, and the
/// log-probability of that choice under the behavior snapshot, plus the
/// observation the environment returned.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub features: Vec<f64>,
    pub action_idx: usize,
    pub factor_idx: usize,
    /// Grid value selected by `factor_idx`; compresses the next step's
    /// history and earns the log-compression bonus on success.
    pub factor: f64,
    /// Joint log-probability under the policy that generated the step.
    pub logp_old: f64,
    /// Observation after the action was applied.
    pub observation: crate::mini_world::Observation,
}

/// A finished episode under one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub task: Task,
    pub steps: Vec<TrajectoryStep>,
    pub success: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// G trajectories for one task together with their normalized advantages.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryGroup {
    pub task: Task,
    pub trajectories: Vec<Trajectory>,
    pub advantages: Vec<f64>,
}

impl TrajectoryGroup {
    /// Computes composite returns and advantages for a freshly rolled-out
    /// group. All trajectories must already share the same task.
    pub fn from_rollouts(
        trajectories: Vec<Trajectory>,
        lambda: f64,
    ) -> Result<TrajectoryGroup, GrpoError> {
        if trajectories.len() < 2 {
            return Err(GrpoError::GroupTooSmall { found: trajectories.len() });
        }
        let returns: Vec<f64> =
            trajectories.iter().map(|t| composite_return(t, lambda)).collect();
        let advantages = group_advantages(&returns)?;
        Ok(TrajectoryGroup { task: trajectories[0].task.clone(), trajectories, advantages })
    }
}

/// Samples one episode under `params_old`. The reset seed and both heads'
/// choices are drawn from `rng`, so a given rng stream reproduces the
/// trajectory bit-for-bit. The compression factor chosen at step t governs
/// how much history survives at step t+1; the first step always sees the
/// full history (factor 1).
pub fn rollout(
    params_old: &PolicyParams,
    layout: &WorldLayout,
    task: &Task,
    rules: &[crate::skill_bank::SkillRule],
    max_steps: u32,
    rng: &mut impl Rng,
) -> Result<Trajectory, GrpoError> {
    let reset_seed = rng.gen::<u64>();
    run_episode(params_old, layout, task, rules, max_steps, reset_seed, |params, features| {
        let d = params.sample_decision(features, rng)?;
        Ok((d.action_idx, d.factor_idx, d.logp_total()))
    })
}

/// Argmax episode used for validation and inference; ties resolve to the
/// lowest index, so the result depends only on `(params, task, reset_seed,
/// rules)`.
pub fn greedy_rollout(
    params: &PolicyParams,
    layout: &WorldLayout,
    task: &Task,
    rules: &[crate::skill_bank::SkillRule],
    max_steps: u32,
    reset_seed: u64,
) -> Result<Trajectory, GrpoError> {
    run_episode(params, layout, task, rules, max_steps, reset_seed, |params, features| {
        let (action_idx, factor_idx) = params.greedy_decision(features)?;
        let logp = params.logprob(features, action_idx, factor_idx)?;
        Ok((action_idx, factor_idx, logp))
    })
}

fn run_episode(
    params: &PolicyParams,
    layout: &WorldLayout,
    task: &Task,
    rules: &[crate::skill_bank::SkillRule],
    max_steps: u32,
    reset_seed: u64,
    mut choose: impl FnMut(&PolicyParams, &[f64]) -> Result<(usize, usize, f64), PolicyError>,
) -> Result<Trajectory, GrpoError> {
    let episode = Episode::new(layout, task, max_steps);
    let (mut state, mut obs) = episode.reset(reset_seed)?;
    let vocabulary = layout.action_vocabulary();
    let mut history: Vec<HistoryEvent> = Vec::new();
    let mut steps: Vec<TrajectoryStep> = Vec::new();
    let mut success = false;
    let mut factor_prev = 1.0;
    while state.t < max_steps {
        let features = encode(layout, &history, &obs, rules, factor_prev)?;
        let (action_idx, factor_idx, logp) = choose(params, &features)?;
        let action = vocabulary[action_idx];
        let out = episode.step(&state, action);
        let factor = params.grid.values()[factor_idx];
        steps.push(TrajectoryStep {
            features,
            action_idx,
            factor_idx,
            factor,
            logp_old: logp,
            observation: out.observation.clone(),
        });
        history.push((obs, action));
        state = out.state;
        obs = out.observation;
        success = out.success;
        factor_prev = factor;
        if out.done {
            break;
        }
    }
    Ok(Trajectory { task: task.clone(), steps, success })
}

/// Episode return: on success, 1 plus λ times the summed log of the chosen
/// compression factors; on failure, exactly 0 — the compression bonus is
/// never paid for a failed episode.
pub fn composite_return(traj: &Trajectory, lambda: f64) -> f64 {
    if !traj.success {
        return 0.0;
    }
    let bonus: f64 = traj.steps.iter().map(|s| s.factor.ln()).sum();
    1.0 + lambda * bonus
}

/// Z-scores a group of returns with the population standard deviation.
/// Degenerate groups (std below 1e−8) normalize to all zeros instead of
/// amplifying noise. The guard makes an epsilon in the denominator
/// unnecessary, so textbook cases like `[1, 0] → [1, −1]` come out exact.
pub fn group_advantages(returns: &[f64]) -> Result<Vec<f64>, GrpoError> {
    let g = returns.len();
    if g < 2 {
        return Err(GrpoError::GroupTooSmall { found: g });
    }
    let mean = returns.iter().sum::<f64>() / g as f64;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / g as f64;
    let std = var.sqrt();
    if std < 1e-8 {
        return Ok(vec![0.0; g]);
    }
    Ok(returns.iter().map(|r| (r - mean) / std).collect())
}

/// Clipped-surrogate objective with KL penalty, plus its exact gradient.
///
/// objective = (1/Σ|τ|) Σ_{i,t} min(ρ_{i,t} A_i, clamp(ρ_{i,t}, 1−ε, 1+ε) A_i)
///           − β · (1/Σ|τ|) Σ_{i,t} KL(π_θ(·|x_{i,t}) ‖ π_ref(·|x_{i,t}))
///
/// where ρ = exp(logπ_θ − logπ_old) per step and A_i is the trajectory's
/// group advantage. Maximization convention: the caller ascends the
/// returned gradient. When the pessimistic clip binds the surrogate is
/// flat in θ, so that step contributes no policy-gradient term.
///
/// The stored per-step log-probs are trusted for speed; debug builds
/// recompute them from `params_old` to catch snapshot mix-ups.
pub fn loss_and_grad(
    params: &PolicyParams,
    params_old: &PolicyParams,
    params_ref: &PolicyParams,
    groups: &[TrajectoryGroup],
    eps_clip: f64,
    beta: f64,
) -> Result<(f64, PolicyGrad), GrpoError> {
    let mut grad = PolicyGrad::zeros_like(params);
    let total_steps: usize = groups
        .iter()
        .flat_map(|g| g.trajectories.iter())
        .map(|t| t.steps.len())
        .sum();
    if total_steps == 0 {
        return Ok((0.0, grad));
    }
    let norm = 1.0 / total_steps as f64;
    let mut objective = 0.0;
    for group in groups {
        if group.advantages.len() != group.trajectories.len() {
            return Err(GrpoError::AdvantageMismatch {
                advantages: group.advantages.len(),
                trajectories: group.trajectories.len(),
            });
        }
        for (traj, &adv) in group.trajectories.iter().zip(&group.advantages) {
            for step in &traj.steps {
                debug_assert!(
                    (params_old
                        .logprob(&step.features, step.action_idx, step.factor_idx)?
                        - step.logp_old)
                        .abs()
                        < 1e-12,
                    "stored log-prob must match the behavior snapshot"
                );
                let (logp_new, glogp) =
                    params.logprob_and_grad(&step.features, step.action_idx, step.factor_idx)?;
                let rho = (logp_new - step.logp_old).exp();
                if !rho.is_finite() {
                    return Err(GrpoError::NonFinite);
                }
                let unclipped = rho * adv;
                let clipped = rho.clamp(1.0 - eps_clip, 1.0 + eps_clip) * adv;
                if unclipped <= clipped {
                    objective += norm * unclipped;
                    grad.axpy(norm * adv * rho, &glogp);
                } else {
                    // min picked the clipped branch, so ρ sits outside the
                    // band and the clamp zeroes the derivative.
                    objective += norm * clipped;
                }
                if beta != 0.0 {
                    objective -= beta * norm * exact_kl(params, params_ref, &step.features)?;
                    accumulate_kl_grad(&mut grad, params, params_ref, &step.features, -beta * norm)?;
                }
            }
        }
    }
    if !objective.is_finite() || !grad.is_finite() {
        return Err(GrpoError::NonFinite);
    }
    Ok((objective, grad))
}

/// One gradient-ascent step: θ ← θ + lr·∇.
pub fn apply_update(
    params: &PolicyParams,
    gradient: &PolicyGrad,
    lr: f64,
) -> Result<PolicyParams, GrpoError> {
    if gradient.action.data.len() != params.action.data.len() {
        return Err(GrpoError::Policy(PolicyError::ShapeMismatch {
            expected: params.action.data.len(),
            found: gradient.action.data.len(),
        }));
    }
    if gradient.compression.data.len() != params.compression.data.len() {
        return Err(GrpoError::Policy(PolicyError::ShapeMismatch {
            expected: params.compression.data.len(),
            found: gradient.compression.data.len(),
        }));
    }
    let mut next = params.snapshot();
    next.action.axpy(lr, &gradient.action);
    next.compression.axpy(lr, &gradient.compression);
    let finite = next
        .action
        .data
        .iter()
        .chain(next.compression.data.iter())
        .all(|w| w.is_finite());
    if !finite {
        return Err(GrpoError::NonFinite);
    }
    Ok(next)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context_encoder::FeatureLayout;
    use crate::mini_world::{enumerate_tasks, TaskCategory, WorldLayout};
    use crate::oracles::{bfs_solve, finite_diff_grad, relative_vector_error, PlanOutcome};
    use crate::policy::CompressionGrid;
    use crate::skill_bank::{parse_skill_file, SkillRule};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn desk() -> WorldLayout {
        WorldLayout::default_desk()
    }

    fn pick_task(layout: &WorldLayout) -> Task {
        enumerate_tasks(layout, TaskCategory::Pick).into_iter().next().unwrap()
    }

    fn small_params(rng: &mut ChaCha8Rng) -> PolicyParams {
        let grid = CompressionGrid::default_grid();
        let mut p = PolicyParams::zeros(6, 3, grid);
        for w in p.action.data.iter_mut().chain(p.compression.data.iter_mut()) {
            *w = rng.gen_range(-0.5..0.5);
        }
        p
    }

    /// Random synthetic trajectories sampled under `params_old`, so the
    /// stored log-probs are genuine behavior-policy quantities.
    fn synthetic_groups(
        params_old: &PolicyParams,
        rng: &mut ChaCha8Rng,
        n_groups: usize,
        group_size: usize,
        max_len: usize,
    ) -> Vec<TrajectoryGroup> {
        let layout = desk();
        let task = pick_task(&layout);
        let dummy_obs = {
            let ep = Episode::new(&layout, &task, 1);
            ep.reset(0).unwrap().1
        };
        (0..n_groups)
            .map(|_| {
                let trajectories: Vec<Trajectory> = (0..group_size)
                    .map(|_| {
                        let len = rng.gen_range(1..=max_len);
                        let steps = (0..len)
                            .map(|_| {
                                let features: Vec<f64> = (0..params_old.feature_dim())
                                    .map(|_| rng.gen_range(-1.0..1.0))
                                    .collect();
                                let d = params_old.sample_decision(&features, rng).unwrap();
                                TrajectoryStep {
                                    features,
                                    action_idx: d.action_idx,
                                    factor_idx: d.factor_idx,
                                    factor: params_old.grid.values()[d.factor_idx],
                                    logp_old: d.logp_total(),
                                    observation: dummy_obs.clone(),
                                }
                            })
                            .collect();
                        Trajectory { task: task.clone(), steps, success: rng.gen_bool(0.5) }
                    })
                    .collect();
                TrajectoryGroup::from_rollouts(trajectories, 0.1).unwrap()
            })
            .collect()
    }

    fn flatten(p: &PolicyParams) -> Vec<f64> {
        p.action.data.iter().chain(p.compression.data.iter()).copied().collect()
    }

    fn with_flat(template: &PolicyParams, flat: &[f64]) -> PolicyParams {
        let mut p = template.snapshot();
        let na = p.action.data.len();
        p.action.data.copy_from_slice(&flat[..na]);
        p.compression.data.copy_from_slice(&flat[na..]);
        p
    }

    fn uniform_rules() -> Vec<SkillRule> {
        Vec::new()
    }

    // -- rollout ------------------------------------------------------------

    #[test]
    fn zero_step_budget_gives_empty_failed_trajectory() {
        let layout = desk();
        let task = pick_task(&layout);
        let params =
            PolicyParams::zeros(crate::context_encoder::feature_dim(&layout), 21, CompressionGrid::default_grid());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let traj = rollout(&params, &layout, &task, &uniform_rules(), 0, &mut rng).unwrap();
        assert!(traj.is_empty());
        assert!(!traj.success);
    }

    #[test]
    fn rollout_length_never_exceeds_the_budget() {
        let layout = desk();
        let task = pick_task(&layout);
        let dim = crate::context_encoder::feature_dim(&layout);
        let params = PolicyParams::zeros(dim, 21, CompressionGrid::default_grid());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let traj = rollout(&params, &layout, &task, &uniform_rules(), 7, &mut rng).unwrap();
            assert!(traj.len() <= 7);
            if traj.success {
                assert!(traj.len() <= 7);
            }
        }
    }

    #[test]
    fn identical_rng_streams_reproduce_the_trajectory() {
        let layout = desk();
        let task = pick_task(&layout);
        let dim = crate::context_encoder::feature_dim(&layout);
        let mut seed_rng = ChaCha8Rng::seed_from_u64(9);
        let mut params = PolicyParams::zeros(dim, 21, CompressionGrid::default_grid());
        for w in params.action.data.iter_mut() {
            *w = seed_rng.gen_range(-0.2..0.2);
        }
        let mut a = ChaCha8Rng::seed_from_u64(123);
        let mut b = ChaCha8Rng::seed_from_u64(123);
        let ta = rollout(&params, &layout, &task, &uniform_rules(), 12, &mut a).unwrap();
        let tb = rollout(&params, &layout, &task, &uniform_rules(), 12, &mut b).unwrap();
        assert_eq!(ta, tb);
    }

    /// A policy whose action head just reads the hint one-hot follows a
    /// rule file exactly; with fetch-and-deliver rules it matches the
    /// shortest plan on a start where the target is already in view.
    #[test]
    fn hint_following_params_solve_pick_in_three_steps() {
        let layout = desk();
        let skill = parse_skill_file(
            "---\ntask: fetch and place\ncategory: pick\n---\n\n## Rules\n\nwhen holding(target) and at(goal) then put(goal)\nwhen holding(target) then goto(goal)\nwhen visible(target) then take(target)\n",
            "test.md",
        )
        .unwrap();
        let widths = FeatureLayout::of(&layout);
        let hint_start = widths.observation_block() + widths.recency_block();
        let dim = widths.dim();
        let mut params = PolicyParams::zeros(dim, widths.actions, CompressionGrid::default_grid());
        for a in 0..widths.actions {
            params.action.data[a * dim + hint_start + a] = 12.0;
        }

        // Find a start whose shortest plan is take → goto → put.
        let mut found = None;
        'outer: for task in enumerate_tasks(&layout, TaskCategory::Pick) {
            for seed in 0..64u64 {
                if let PlanOutcome::Solved(plan) = bfs_solve(&layout, &task, seed, 12).unwrap() {
                    if plan.len() == 3 {
                        found = Some((task, seed));
                        break 'outer;
                    }
                }
            }
        }
        let (task, seed) = found.expect("some pick start has a 3-step plan");
        let traj =
            greedy_rollout(&params, &layout, &task, &skill.rules, 12, seed).unwrap();
        assert!(traj.success, "hint follower must solve the episode");
        assert!(traj.len() <= 3, "expected at most 3 steps, took {}", traj.len());
    }

    // -- composite return ----------------------------------------------------

    fn bare_traj(factors: Vec<f64>, success: bool) -> Trajectory {
        let layout = desk();
        let task = pick_task(&layout);
        let obs = Episode::new(&layout, &task, 1).reset(0).unwrap().1;
        let steps = factors
            .into_iter()
            .map(|factor| TrajectoryStep {
                features: vec![],
                action_idx: 0,
                factor_idx: 0,
                factor,
                logp_old: 0.0,
                observation: obs.clone(),
            })
            .collect();
        Trajectory { task, steps, success }
    }

    #[test]
    fn unit_factors_earn_exactly_one_on_success() {
        let traj = bare_traj(vec![1.0, 1.0, 1.0], true);
        assert_eq!(composite_return(&traj, 0.1), 1.0);
    }

    #[test]
    fn failure_earns_zero_regardless_of_compression() {
        let traj = bare_traj(vec![3.0, 2.0, 1.5], false);
        assert_eq!(composite_return(&traj, 0.7), 0.0);
    }

    #[test]
    fn compression_bonus_matches_closed_form() {
        let traj = bare_traj(vec![2.0, 2.0], true);
        let expected = 1.0 + 0.1 * (2.0f64.ln() + 2.0f64.ln());
        assert!((composite_return(&traj, 0.1) - expected).abs() < 1e-9);
        assert!((composite_return(&traj, 0.1) - 1.138629436111989).abs() < 1e-9);
    }

    // -- advantages -----------------------------------------------------------

    #[test]
    fn constant_returns_trip_the_zero_variance_guard() {
        assert_eq!(group_advantages(&[1.0, 1.0, 1.0, 1.0]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn two_point_group_normalizes_exactly() {
        let adv = group_advantages(&[1.0, 0.0]).unwrap();
        assert!((adv[0] - 1.0).abs() < 1e-9);
        assert!((adv[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn three_point_group_matches_population_std() {
        let adv = group_advantages(&[2.0, 1.0, 0.0]).unwrap();
        let expected = 1.0 / (2.0f64 / 3.0).sqrt();
        assert!((adv[0] - expected).abs() < 1e-9);
        assert!(adv[1].abs() < 1e-9);
        assert!((adv[2] + expected).abs() < 1e-9);
    }

    #[test]
    fn singleton_group_is_rejected() {
        assert!(matches!(
            group_advantages(&[1.0]).unwrap_err(),
            GrpoError::GroupTooSmall { found: 1 }
        ));
    }

    proptest! {
        /// Whenever the guard does not fire, advantages are an exact
        /// z-score: mean 0 and population variance 1.
        #[test]
        fn advantages_are_zero_mean_unit_variance(
            returns in proptest::collection::vec(-5.0f64..5.0, 2..12)
        ) {
            let adv = group_advantages(&returns).unwrap();
            let g = adv.len() as f64;
            if adv.iter().all(|a| *a == 0.0) {
                // guard fired; nothing more to check
            } else {
                let sum: f64 = adv.iter().sum();
                prop_assert!(sum.abs() < 1e-9 * g);
                let var: f64 = adv.iter().map(|a| a * a).sum::<f64>() / g;
                prop_assert!((var - 1.0).abs() < 1e-6);
            }
        }
    }

    // -- loss and gradient -----------------------------------------------------

    #[test]
    fn at_the_behavior_snapshot_the_gradient_is_reinforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = small_params(&mut rng);
        let groups = synthetic_groups(&params, &mut rng, 2, 4, 3);
        let (_, grad) = loss_and_grad(&params, &params, &params, &groups, 0.2, 0.0).unwrap();

        let total: usize =
            groups.iter().flat_map(|g| &g.trajectories).map(|t| t.steps.len()).sum();
        let mut expect = PolicyGrad::zeros_like(&params);
        for group in &groups {
            for (traj, &adv) in group.trajectories.iter().zip(&group.advantages) {
                for step in &traj.steps {
                    let (_, g) = params
                        .logprob_and_grad(&step.features, step.action_idx, step.factor_idx)
                        .unwrap();
                    expect.axpy(adv / total as f64, &g);
                }
            }
        }
        for (a, b) in grad.action.data.iter().zip(&expect.action.data) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in grad.compression.data.iter().zip(&expect.compression.data) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_advantages_give_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let params = small_params(&mut rng);
        let mut groups = synthetic_groups(&params, &mut rng, 1, 4, 3);
        for a in groups[0].advantages.iter_mut() {
            *a = 0.0;
        }
        let (obj, grad) = loss_and_grad(&params, &params, &params, &groups, 0.2, 0.0).unwrap();
        assert_eq!(obj, 0.0);
        assert!(grad.action.data.iter().all(|w| *w == 0.0));
        assert!(grad.compression.data.iter().all(|w| *w == 0.0));
    }

    #[test]
    fn kl_gradient_vanishes_at_the_reference_policy() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let params = small_params(&mut rng);
        let mut groups = synthetic_groups(&params, &mut rng, 1, 4, 3);
        for a in groups[0].advantages.iter_mut() {
            *a = 0.0;
        }
        // θ = θ_ref: the penalty is at its minimum, so the whole gradient is 0.
        let (_, grad) = loss_and_grad(&params, &params, &params, &groups, 0.2, 0.5).unwrap();
        for w in grad.action.data.iter().chain(grad.compression.data.iter()) {
            assert!(w.abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for case in 0..5 {
            let params_old = small_params(&mut rng);
            let params_ref = small_params(&mut rng);
            // Differentiate away from the snapshot so clipping can engage.
            let mut params = params_old.snapshot();
            for w in params.action.data.iter_mut().chain(params.compression.data.iter_mut()) {
                *w += rng.gen_range(-0.05..0.05);
            }
            let groups = synthetic_groups(&params_old, &mut rng, 2, 4, 3);
            let (_, grad) = loss_and_grad(&params, &params_old, &params_ref, &groups, 0.2, 0.3).unwrap();
            let flat_grad: Vec<f64> =
                grad.action.data.iter().chain(grad.compression.data.iter()).copied().collect();

            let point = flatten(&params);
            let f = |theta: &[f64]| {
                let p = with_flat(&params, theta);
                loss_and_grad(&p, &params_old, &params_ref, &groups, 0.2, 0.3).unwrap().0
            };
            let fd = finite_diff_grad(f, &point, 1e-5).unwrap();
            let err = relative_vector_error(&flat_grad, &fd);
            assert!(err < 1e-4, "case {case}: relative error {err}");
        }
    }

    #[test]
    fn stronger_kl_penalty_never_increases_post_update_divergence() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = small_params(&mut rng);
            let params_ref = small_params(&mut rng);
            let groups = synthetic_groups(&params, &mut rng, 2, 4, 3);
            let mean_kl = |p: &PolicyParams| {
                let mut sum = 0.0;
                let mut n = 0usize;
                for g in &groups {
                    for t in &g.trajectories {
                        for s in &t.steps {
                            sum += exact_kl(p, &params_ref, &s.features).unwrap();
                            n += 1;
                        }
                    }
                }
                sum / n as f64
            };
            let mut last = f64::INFINITY;
            for beta in [0.0, 0.5, 2.0] {
                let (_, grad) = loss_and_grad(&params, &params, &params_ref, &groups, 0.2, beta).unwrap();
                let next = apply_update(&params, &grad, 1e-3).unwrap();
                let kl = mean_kl(&next);
                assert!(
                    kl <= last + 1e-12,
                    "seed {seed}: KL rose from {last} to {kl} as beta grew to {beta}"
                );
                last = kl;
            }
        }
    }

    #[test]
    fn surrogate_equals_plain_ratio_inside_the_clip_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let params_old = small_params(&mut rng);
        let mut params = params_old.snapshot();
        for w in params.action.data.iter_mut() {
            *w += rng.gen_range(-0.01..0.01);
        }
        let groups = synthetic_groups(&params_old, &mut rng, 1, 4, 2);
        // A huge band keeps every ratio unclipped.
        let (obj, _) = loss_and_grad(&params, &params_old, &params_old, &groups, 10.0, 0.0).unwrap();
        let total: usize =
            groups.iter().flat_map(|g| &g.trajectories).map(|t| t.steps.len()).sum();
        let mut expect = 0.0;
        for g in &groups {
            for (t, &adv) in g.trajectories.iter().zip(&g.advantages) {
                for s in &t.steps {
                    let logp =
                        params.logprob(&s.features, s.action_idx, s.factor_idx).unwrap();
                    expect += (logp - s.logp_old).exp() * adv / total as f64;
                }
            }
        }
        assert!((obj - expect).abs() < 1e-12);
    }

    #[test]
    fn empty_batch_is_a_zero_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let params = small_params(&mut rng);
        let (obj, grad) = loss_and_grad(&params, &params, &params, &[], 0.2, 0.1).unwrap();
        assert_eq!(obj, 0.0);
        assert!(grad.action.data.iter().all(|w| *w == 0.0));
    }

    // -- update ----------------------------------------------------------------

    #[test]
    fn zero_gradient_and_zero_lr_are_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let params = small_params(&mut rng);
        let zero = PolicyGrad::zeros_like(&params);
        assert_eq!(apply_update(&params, &zero, 0.3).unwrap(), params);

        let mut g = PolicyGrad::zeros_like(&params);
        g.action.data[0] = 4.2;
        assert_eq!(apply_update(&params, &g, 0.0).unwrap(), params);
    }

    #[test]
    fn sequential_updates_compose_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let params = small_params(&mut rng);
        let mut g1 = PolicyGrad::zeros_like(&params);
        let mut g2 = PolicyGrad::zeros_like(&params);
        for w in g1.action.data.iter_mut().chain(g1.compression.data.iter_mut()) {
            *w = rng.gen_range(-1.0..1.0);
        }
        for w in g2.action.data.iter_mut().chain(g2.compression.data.iter_mut()) {
            *w = rng.gen_range(-1.0..1.0);
        }
        let lr = 1e-3;
        let two_step = apply_update(&apply_update(&params, &g1, lr).unwrap(), &g2, lr).unwrap();
        let mut summed = g1.clone();
        summed.axpy(1.0, &g2);
        let one_step = apply_update(&params, &summed, lr).unwrap();
        for (a, b) in two_step.action.data.iter().zip(&one_step.action.data) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in two_step.compression.data.iter().zip(&one_step.compression.data) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_gradients_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let params = small_params(&mut rng);
        let mut g = PolicyGrad::zeros_like(&params);
        g.action.data[0] = f64::NAN;
        assert!(matches!(apply_update(&params, &g, 0.1), Err(GrpoError::NonFinite)));
    }
}
