//! Independent reference implementations the test suite checks against.
//!
//! Nothing here is used by the training path. Each oracle recomputes an
//! answer by a different, brute-force route: breadth-first search for
//! shortest plans, exhaustive subset enumeration for budgeted selection,
//! and central finite differences for gradients.

use crate::mini_world::{Action, Episode, Task, WorldError, WorldLayout, WorldState};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("subset enumeration over {0} deltas is too large (limit 20)")]
    TooLarge(usize),
    #[error("objective returned a non-finite value during finite differencing")]
    NonFinite,
    #[error(transparent)]
    World(#[from] WorldError),
}

// ---------------------------------------------------------------------------
// Shortest plans
// ---------------------------------------------------------------------------

/// Result of planning: either the shortest action sequence or proof that the
/// step budget is not enough.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanOutcome {
    Solved(Vec<Action>),
    Unsolvable,
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&[Action]> {
        match self {
            PlanOutcome::Solved(p) => Some(p),
            PlanOutcome::Unsolvable => None,
        }
    }
}

/// Breadth-first search over full world states from `reset(layout, task,
/// seed)`, expanding actions in lexicographic display order so the returned
/// plan is the lexicographically least among the shortest ones. States are
/// deduplicated on their configuration (step counter excluded). Plans longer
/// than `max_steps` are reported as [`PlanOutcome::Unsolvable`].
pub fn bfs_solve(
    layout: &WorldLayout,
    task: &Task,
    seed: u64,
    max_steps: u32,
) -> Result<PlanOutcome, OracleError> {
    let episode = Episode::new(layout, task, max_steps.max(1));
    let (start, _) = episode.reset(seed)?;
    if episode.success(&start) {
        return Ok(PlanOutcome::Solved(Vec::new()));
    }

    let mut actions = layout.action_vocabulary();
    actions.sort_by_key(|a| a.display(layout));

    let key = |s: &WorldState| {
        (
            s.agent_location,
            s.holding,
            s.object_locations.clone(),
            s.flags.clone(),
            s.placed_count,
        )
    };
    let mut seen: HashMap<_, ()> = HashMap::new();
    seen.insert(key(&start), ());
    let mut queue: VecDeque<(WorldState, Vec<Action>)> = VecDeque::new();
    queue.push_back((start, Vec::new()));

    while let Some((state, plan)) = queue.pop_front() {
        if plan.len() as u32 >= max_steps {
            continue;
        }
        for &action in &actions {
            // Drive the simulator itself so the oracle can never drift from
            // the real transition function; reset the counter to keep the
            // search free of the per-episode budget.
            let mut probe = state.clone();
            probe.t = 0;
            let out = Episode::new(layout, task, u32::MAX).step(&probe, action);
            let k = key(&out.state);
            if seen.contains_key(&k) {
                continue;
            }
            seen.insert(k, ());
            let mut next_plan = plan.clone();
            next_plan.push(action);
            if out.success {
                return Ok(PlanOutcome::Solved(next_plan));
            }
            queue.push_back((out.state, next_plan));
        }
    }
    Ok(PlanOutcome::Unsolvable)
}

// ---------------------------------------------------------------------------
// Budgeted subset selection
// ---------------------------------------------------------------------------

/// Exhaustively picks the subset of ids that maximizes the summed delta,
/// subject to `|subset| <= budget`. Only positive deltas can help, but the
/// search enumerates every subset of them to stay assumption-free. Ties go
/// to the lexicographically smallest sorted id vector. Inputs larger than
/// 20 ids are refused to keep the enumeration honest.
pub fn brute_force_select(
    deltas: &BTreeMap<u32, f64>,
    budget: usize,
) -> Result<Vec<u32>, OracleError> {
    if deltas.len() > 20 {
        return Err(OracleError::TooLarge(deltas.len()));
    }
    let ids: Vec<u32> = deltas.keys().copied().collect();
    let n = ids.len();
    let mut best_sum = f64::NEG_INFINITY;
    let mut best: Vec<u32> = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize > budget {
            continue;
        }
        let subset: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
        let sum: f64 = subset.iter().map(|id| deltas[id]).sum();
        if sum > best_sum || (sum == best_sum && subset < best) {
            best_sum = sum;
            best = subset;
        }
    }
    Ok(best)
}

/// Convenience wrapper when ids arrive as a set with a shared delta lookup.
pub fn delta_sum(deltas: &BTreeMap<u32, f64>, ids: &BTreeSet<u32>) -> f64 {
    ids.iter().map(|id| deltas.get(id).copied().unwrap_or(0.0)).sum()
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Central-difference gradient of `f` at `point` with half-step `eps`.
pub fn finite_diff_grad<F>(f: F, point: &[f64], eps: f64) -> Result<Vec<f64>, OracleError>
where
    F: Fn(&[f64]) -> f64,
{
    let mut grad = vec![0.0; point.len()];
    let mut probe = point.to_vec();
    for i in 0..point.len() {
        probe[i] = point[i] + eps;
        let plus = f(&probe);
        probe[i] = point[i] - eps;
        let minus = f(&probe);
        probe[i] = point[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(OracleError::NonFinite);
        }
        grad[i] = (plus - minus) / (2.0 * eps);
    }
    Ok(grad)
}

/// `‖a − b‖ / max(‖a‖, ‖b‖, 1e−12)` — the scale-free error used by the
/// gradient checks.
pub fn relative_vector_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a).max(norm(b)).max(1e-12)
}

// ---------------------------------------------------------------------------
