//! Turns an episode's observable context into a fixed-width feature vector.
//!
//! The vector has four documented blocks, laid out in this order:
//!
//! 1. **Observation** — one-hots over the current observation: agent
//!    location, held object (plus an empty-hand slot), a held-pending-target
//!    flag, per-object visible-pending-target flags, the focus target's
//!    state flags, the task category, and the goal receptacle.
//! 2. **Recency** — indicator aggregates over the `ceil(H / c)` most recent
//!    history events: locations visited and actions tried. The compression
//!    factor `c` truncates history; larger `c` keeps fewer events.
//! 3. **Hint** — a one-hot over the action vocabulary for the first active
//!    skill rule whose condition holds in the current observation. All-zero
//!    when no rule fires or no skills are active.
//! 4. **Bias** — a constant 1.
//!
//! Encoding is pure: it never mutates the world and two calls with equal
//! arguments return equal vectors.

use crate::mini_world::{
    Action, LocationKind, Observation, StateFlag, TaskCategory, WorldLayout,
};
use crate::skill_bank::{ActionHead, Atom, Predicate, SkillRule};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("compression factor must be >= 1, got {0}")]
    InvalidCompression(f64),
}

/// One remembered step: what the agent saw, then what it did.
pub type HistoryEvent = (Observation, Action);

/// How many of the most recent history events survive compression `c`:
/// `ceil(len / c)`, and 0 for an empty history.
pub fn retained_events(history_len: usize, c: f64) -> Result<usize, EncodeError> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(EncodeError::InvalidCompression(c));
    }
    Ok((history_len as f64 / c).ceil() as usize)
}

/// Block widths for a layout; the encoder and the policy both size
/// themselves from this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureLayout {
    pub locations: usize,
    pub objects: usize,
    pub receptacles: usize,
    pub actions: usize,
}

impl FeatureLayout {
    pub fn of(layout: &WorldLayout) -> FeatureLayout {
        FeatureLayout {
            locations: layout.locations.len(),
            objects: layout.objects.len(),
            receptacles: layout.receptacles().count(),
            actions: layout.action_vocabulary().len(),
        }
    }

    /// Observation block width.
    pub fn observation_block(&self) -> usize {
        // location one-hot + holding one-hot (objects + empty) + held-pending
        // flag + visible-pending per object + 4 focus flags + category
        // one-hot + goal receptacle one-hot.
        self.locations
            + (self.objects + 1)
            + 1
            + self.objects
            + StateFlag::ALL.len()
            + TaskCategory::ALL.len()
            + self.receptacles
    }

    /// Recency block width: visited locations + tried actions.
    pub fn recency_block(&self) -> usize {
        self.locations + self.actions
    }

    pub fn hint_block(&self) -> usize {
        self.actions
    }

    pub fn dim(&self) -> usize {
        self.observation_block() + self.recency_block() + self.hint_block() + 1
    }
}

/// Total feature dimension for a layout.
pub fn feature_dim(layout: &WorldLayout) -> usize {
    FeatureLayout::of(layout).dim()
}

/// How much `dim` grows when one object is added to a layout: one holding
/// slot, one visible-pending flag, and one `take` action that appears in
/// both the recency and hint blocks.
pub const PER_OBJECT_FEATURES: usize = 4;

// ---------------------------------------------------------------------------
// Rule evaluation
// ---------------------------------------------------------------------------

/// Resolves an object symbol against the observation. `target` means any
/// pending task target; anything else must name a layout object.
fn object_candidates(sym: &str, layout: &WorldLayout, obs: &Observation) -> Vec<usize> {
    if sym == "target" {
        obs.pending_targets.clone()
    } else {
        layout.object_id(sym).into_iter().collect()
    }
}

/// Resolves a location symbol. `goal` means the task's goal receptacle.
fn location_of(sym: &str, layout: &WorldLayout, obs: &Observation) -> Option<usize> {
    if sym == "goal" {
        obs.goal
    } else {
        layout.location_id(sym)
    }
}

fn atom_holds(atom: &Atom, layout: &WorldLayout, obs: &Observation) -> bool {
    let positive = match atom.predicate {
        Predicate::Holding => {
            let candidates = object_candidates(&atom.args[0], layout, obs);
            obs.holding.map_or(false, |(held, _)| candidates.contains(&held))
        }
        Predicate::At => {
            location_of(&atom.args[0], layout, obs) == Some(obs.agent_location)
        }
        Predicate::Visible => {
            let candidates = object_candidates(&atom.args[0], layout, obs);
            obs.visible.iter().any(|(o, _)| candidates.contains(o))
        }
        Predicate::State => {
            let flag = StateFlag::from_name(&atom.args[1]);
            let candidates = object_candidates(&atom.args[0], layout, obs);
            match flag {
                Some(flag) => candidates.iter().any(|&o| {
                    let held = obs.holding.filter(|(h, _)| *h == o).map(|(_, f)| f);
                    let seen = obs
                        .visible
                        .iter()
                        .find(|(v, _)| *v == o)
                        .map(|&(_, f)| f);
                    held.or(seen).map_or(false, |f| f.has(flag))
                }),
                None => false,
            }
        }
        Predicate::TaskIs => obs.category.as_str() == atom.args[0],
    };
    positive != atom.negated
}

/// Resolves a rule's action template to a concrete vocabulary action.
/// `take(target)` prefers a visible pending target, falling back to the
/// lowest-indexed pending one; `goto(goal)`/`put(goal)` use the task goal.
/// Returns `None` when a symbol has no referent in this world.
fn resolve_action(
    template: &crate::skill_bank::ActionTemplate,
    layout: &WorldLayout,
    obs: &Observation,
) -> Option<Action> {
    let arg = template.arg.as_deref();
    match template.head {
        ActionHead::Noop => Some(Action::Noop),
        ActionHead::Goto => Some(Action::Goto(location_of(arg?, layout, obs)?)),
        ActionHead::Take => {
            let candidates = object_candidates(arg?, layout, obs);
            let visible = candidates
                .iter()
                .copied()
                .find(|o| obs.visible.iter().any(|(v, _)| v == o));
            visible.or_else(|| candidates.first().copied()).map(Action::Take)
        }
        ActionHead::Put => {
            let loc = location_of(arg?, layout, obs)?;
            (layout.locations[loc].kind == LocationKind::Receptacle).then_some(Action::Put(loc))
        }
        ActionHead::Use => {
            let loc = location_of(arg?, layout, obs)?;
            matches!(layout.locations[loc].kind, LocationKind::Station(_))
                .then_some(Action::Use(loc))
        }
    }
}

/// First-match hint: scans rules top-down and returns the vocabulary index
/// of the first rule whose condition holds. A firing rule whose action
/// cannot be resolved yields no hint at all — the rule wins the match but
/// has nothing to say.
pub fn evaluate_hint(
    rules: &[SkillRule],
    layout: &WorldLayout,
    obs: &Observation,
) -> Option<usize> {
    let vocabulary = layout.action_vocabulary();
    let rule = rules
        .iter()
        .find(|r| r.condition.iter().all(|a| atom_holds(a, layout, obs)))?;
    let action = resolve_action(&rule.action, layout, obs)?;
    vocabulary.iter().position(|a| *a == action)
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

/// Encodes `(history, current, rules, c)` into a feature vector of width
/// `feature_dim(layout)`.
pub fn encode(
    layout: &WorldLayout,
    history: &[HistoryEvent],
    current: &Observation,
    rules: &[SkillRule],
    c: f64,
) -> Result<Vec<f64>, EncodeError> {
    let widths = FeatureLayout::of(layout);
    let keep = retained_events(history.len(), c)?;
    let mut x = vec![0.0; widths.dim()];
    let mut base = 0usize;

    // --- observation block -------------------------------------------------
    x[base + current.agent_location] = 1.0;
    base += widths.locations;

    match current.holding {
        Some((obj, _)) => x[base + obj] = 1.0,
        None => x[base + widths.objects] = 1.0, // empty-hand slot
    }
    base += widths.objects + 1;

    let holding_pending = current
        .holding
        .map_or(false, |(obj, _)| current.pending_targets.contains(&obj));
    if holding_pending {
        x[base] = 1.0;
    }
    base += 1;

    for &(obj, _) in &current.visible {
        if current.pending_targets.contains(&obj) {
            x[base + obj] = 1.0;
        }
    }
    base += widths.objects;

    // Focus target: the held pending target if any, else the first visible
    // pending target. Its flags tell the policy whether processing is done.
    let focus = current
        .holding
        .filter(|(obj, _)| current.pending_targets.contains(obj))
        .or_else(|| {
            current
                .visible
                .iter()
                .copied()
                .find(|(obj, _)| current.pending_targets.contains(obj))
        });
    if let Some((_, flags)) = focus {
        for (i, flag) in StateFlag::ALL.into_iter().enumerate() {
            if flags.has(flag) {
                x[base + i] = 1.0;
            }
        }
    }
    base += StateFlag::ALL.len();

    let cat_idx = TaskCategory::ALL
        .iter()
        .position(|c| *c == current.category)
        .expect("category is part of the closed set");
    x[base + cat_idx] = 1.0;
    base += TaskCategory::ALL.len();

    if let Some(goal) = current.goal {
        let receptacles: Vec<usize> = layout.receptacles().collect();
        if let Some(r) = receptacles.iter().position(|&l| l == goal) {
            x[base + r] = 1.0;
        }
    }
    base += widths.receptacles;

    // --- recency block ------------------------------------------------------
    let recent = &history[history.len() - keep..];
    let vocabulary = layout.action_vocabulary();
    for (obs, action) in recent {
        x[base + obs.agent_location] = 1.0;
        if let Some(idx) = vocabulary.iter().position(|a| a == action) {
            x[base + widths.locations + idx] = 1.0;
        }
    }
    base += widths.recency_block();

    // --- hint block -----------------------------------------------------------
    if let Some(idx) = evaluate_hint(rules, layout, current) {
        x[base + idx] = 1.0;
    }
    base += widths.hint_block();

    // --- bias ------------------------------------------------------------------
    x[base] = 1.0;
    debug_assert_eq!(base + 1, widths.dim());
    Ok(x)
}

// ---------------------------------------------------------------------------
