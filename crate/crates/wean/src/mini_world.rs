//! A deterministic text gridworld of rooms, stations, and receptacles.
//!
//! The world is deliberately small: a handful of rooms connected as a
//! complete graph (any `goto` is one step), four processing stations
//! (sink, microwave, fridge, lamp), goal receptacles, and movable objects.
//! Six task categories mirror classic household instruction benchmarks:
//! deliver an object, examine one under the lamp, clean/heat/cool then
//! deliver, and deliver two objects.
//!
//! Everything is value-semantic and deterministic: `reset` is a pure
//! function of `(layout, task, seed)` and `step` of `(state, action)`.
//! Invalid actions are silent no-ops that still consume a step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Index into [`WorldLayout::locations`].
pub type LocId = usize;
/// Index into [`WorldLayout::objects`].
pub type ObjId = usize;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("unknown entity `{0}` for this layout")]
    UnknownEntity(String),
    #[error("unknown task category `{0}`")]
    UnknownCategory(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("layout file line {line}: {msg}")]
    LayoutSyntax { line: usize, msg: String },
    #[error("failed to read layout file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

/// What a location is used for. Stations are keyed by their effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocationKind {
    Room,
    Receptacle,
    Station(StationKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StationKind {
    Sink,
    Microwave,
    Fridge,
    Lamp,
}

impl StationKind {
    pub const ALL: [StationKind; 4] = [
        StationKind::Sink,
        StationKind::Microwave,
        StationKind::Fridge,
        StationKind::Lamp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StationKind::Sink => "sink",
            StationKind::Microwave => "microwave",
            StationKind::Fridge => "fridge",
            StationKind::Lamp => "lamp",
        }
    }

    pub fn from_name(name: &str) -> Option<StationKind> {
        StationKind::ALL.into_iter().find(|k| k.as_str() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub kind: LocationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectDef {
    pub name: String,
    /// Where the object sits before the reset permutation is applied.
    pub initial_location: LocId,
}

/// Static world description: locations, objects, and their names.
///
/// Adjacency is the complete graph, so it is implicit: every location is
/// one `goto` away from every other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldLayout {
    pub locations: Vec<Location>,
    pub objects: Vec<ObjectDef>,
}

impl WorldLayout {
    /// Validates naming and station uniqueness; returns the layout on success.
    pub fn new(locations: Vec<Location>, objects: Vec<ObjectDef>) -> Result<Self, WorldError> {
        let layout = WorldLayout { locations, objects };
        layout.validate()?;
        Ok(layout)
    }

    fn validate(&self) -> Result<(), WorldError> {
        if self.rooms().next().is_none() {
            return Err(WorldError::InvalidLayout("at least one room required".into()));
        }
        let mut names: Vec<&str> = self
            .locations
            .iter()
            .map(|l| l.name.as_str())
            .chain(self.objects.iter().map(|o| o.name.as_str()))
            .collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(WorldError::InvalidLayout("entity names must be unique".into()));
        }
        for kind in StationKind::ALL {
            let count = self
                .locations
                .iter()
                .filter(|l| l.kind == LocationKind::Station(kind))
                .count();
            if count != 1 {
                return Err(WorldError::InvalidLayout(format!(
                    "station `{}` must appear exactly once, found {count}",
                    kind.as_str()
                )));
            }
        }
        for obj in &self.objects {
            if obj.initial_location >= self.locations.len() {
                return Err(WorldError::InvalidLayout(format!(
                    "object `{}` placed at a location that does not exist",
                    obj.name
                )));
            }
        }
        Ok(())
    }

    /// The default desk-scale world: four rooms, the four stations, two
    /// goal receptacles, and four objects (one per room).
    pub fn default_desk() -> WorldLayout {
        let room = |name: &str| Location {
            name: name.into(),
            kind: LocationKind::Room,
        };
        let station = |kind: StationKind| Location {
            name: kind.as_str().into(),
            kind: LocationKind::Station(kind),
        };
        let receptacle = |name: &str| Location {
            name: name.into(),
            kind: LocationKind::Receptacle,
        };
        let locations = vec![
            room("hall"),
            room("kitchen"),
            room("study"),
            room("pantry"),
            station(StationKind::Sink),
            station(StationKind::Microwave),
            station(StationKind::Fridge),
            station(StationKind::Lamp),
            receptacle("shelf"),
            receptacle("table"),
        ];
        let objects = vec![
            ObjectDef { name: "apple".into(), initial_location: 0 },
            ObjectDef { name: "mug".into(), initial_location: 1 },
            ObjectDef { name: "book".into(), initial_location: 2 },
            ObjectDef { name: "plate".into(), initial_location: 3 },
        ];
        WorldLayout::new(locations, objects).expect("default layout is valid")
    }

    pub fn rooms(&self) -> impl Iterator<Item = LocId> + '_ {
        self.locations
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == LocationKind::Room)
            .map(|(i, _)| i)
    }

    pub fn receptacles(&self) -> impl Iterator<Item = LocId> + '_ {
        self.locations
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == LocationKind::Receptacle)
            .map(|(i, _)| i)
    }

    pub fn station(&self, kind: StationKind) -> LocId {
        self.locations
            .iter()
            .position(|l| l.kind == LocationKind::Station(kind))
            .expect("validated layouts contain every station")
    }

    pub fn location_id(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o.name == name)
    }

    /// The canonical, fixed action vocabulary for this layout:
    /// `goto` per location, `take` per object, `put` per receptacle,
    /// `use` per station, then `noop`. Policies and encoders index
    /// actions by position in this list.
    pub fn action_vocabulary(&self) -> Vec<Action> {
        let mut actions: Vec<Action> = (0..self.locations.len()).map(Action::Goto).collect();
        actions.extend((0..self.objects.len()).map(Action::Take));
        actions.extend(self.receptacles().map(Action::Put));
        actions.extend(StationKind::ALL.iter().map(|&k| Action::Use(self.station(k))));
        actions.push(Action::Noop);
        actions
    }

    /// Parses the structured-text layout format:
    ///
    /// ```text
    /// room hall
    /// station sink
    /// receptacle shelf
    /// object apple hall
    /// ```
    ///
    /// Locations are numbered in file order; `object` lines must come after
    /// the location they reference. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<WorldLayout, WorldError> {
        let mut locations = Vec::new();
        let mut objects = Vec::new();
        let mut names: std::collections::HashMap<String, LocId> = Default::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let keyword = parts.next().unwrap();
            let err = |msg: String| WorldError::LayoutSyntax { line, msg };
            match keyword {
                "room" | "receptacle" => {
                    let name = parts
                        .next()
                        .ok_or_else(|| err(format!("`{keyword}` needs a name")))?;
                    let kind = if keyword == "room" {
                        LocationKind::Room
                    } else {
                        LocationKind::Receptacle
                    };
                    names.insert(name.to_string(), locations.len());
                    locations.push(Location { name: name.into(), kind });
                }
                "station" => {
                    let name = parts.next().ok_or_else(|| err("`station` needs a name".into()))?;
                    let kind = StationKind::from_name(name)
                        .ok_or_else(|| err(format!("unknown station `{name}`")))?;
                    names.insert(name.to_string(), locations.len());
                    locations.push(Location {
                        name: name.into(),
                        kind: LocationKind::Station(kind),
                    });
                }
                "object" => {
                    let name = parts.next().ok_or_else(|| err("`object` needs a name".into()))?;
                    let loc_name =
                        parts.next().ok_or_else(|| err("`object` needs a location".into()))?;
                    let loc = *names
                        .get(loc_name)
                        .ok_or_else(|| err(format!("unknown location `{loc_name}`")))?;
                    objects.push(ObjectDef { name: name.into(), initial_location: loc });
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
            if let Some(extra) = parts.next() {
                return Err(WorldError::LayoutSyntax {
                    line,
                    msg: format!("unexpected trailing token `{extra}`"),
                });
            }
        }
        WorldLayout::new(locations, objects)
    }

    pub fn load(path: &Path) -> Result<WorldLayout, WorldError> {
        let text = std::fs::read_to_string(path).map_err(|source| WorldError::Io {
            path: path.display().to_string(),
            source,
        })?;
        WorldLayout::parse(&text)
    }

    /// Renders the layout in the same structured-text format `parse` accepts.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for loc in &self.locations {
            let keyword = match loc.kind {
                LocationKind::Room => "room",
                LocationKind::Receptacle => "receptacle",
                LocationKind::Station(_) => "station",
            };
            out.push_str(&format!("{keyword} {}\n", loc.name));
        }
        for obj in &self.objects {
            out.push_str(&format!(
                "object {} {}\n",
                obj.name, self.locations[obj.initial_location].name
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskCategory {
    Pick,
    Look,
    Clean,
    Heat,
    Cool,
    Pick2,
}

impl TaskCategory {
    pub const ALL: [TaskCategory; 6] = [
        TaskCategory::Pick,
        TaskCategory::Look,
        TaskCategory::Clean,
        TaskCategory::Heat,
        TaskCategory::Cool,
        TaskCategory::Pick2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskCategory::Pick => "pick",
            TaskCategory::Look => "look",
            TaskCategory::Clean => "clean",
            TaskCategory::Heat => "heat",
            TaskCategory::Cool => "cool",
            TaskCategory::Pick2 => "pick2",
        }
    }

    pub fn from_name(name: &str) -> Result<TaskCategory, WorldError> {
        TaskCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == name)
            .ok_or_else(|| WorldError::UnknownCategory(name.to_string()))
    }

    /// The state flag a target must carry before delivery, if any.
    fn required_flag(self) -> Option<StateFlag> {
        match self {
            TaskCategory::Clean => Some(StateFlag::Clean),
            TaskCategory::Heat => Some(StateFlag::Hot),
            TaskCategory::Cool => Some(StateFlag::Cold),
            TaskCategory::Look => Some(StateFlag::Examined),
            TaskCategory::Pick | TaskCategory::Pick2 => None,
        }
    }
}

impl fmt::Display for TaskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One concrete instruction: a category, its target object(s), and — except
/// for `look` — the receptacle the targets must end up in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub category: TaskCategory,
    pub targets: Vec<ObjId>,
    pub goal: Option<LocId>,
    pub instruction: String,
}

/// All tasks of one category for a layout, in deterministic order:
/// targets iterate in layout object order, receptacles in location order.
pub fn enumerate_tasks(layout: &WorldLayout, category: TaskCategory) -> Vec<Task> {
    let receptacles: Vec<LocId> = layout.receptacles().collect();
    let obj_name = |o: ObjId| layout.objects[o].name.clone();
    let loc_name = |l: LocId| layout.locations[l].name.clone();
    let mut tasks = Vec::new();
    match category {
        TaskCategory::Look => {
            for o in 0..layout.objects.len() {
                tasks.push(Task {
                    category,
                    targets: vec![o],
                    goal: None,
                    instruction: format!("examine the {} under the lamp", obj_name(o)),
                });
            }
        }
        TaskCategory::Pick2 => {
            for a in 0..layout.objects.len() {
                for b in (a + 1)..layout.objects.len() {
                    for &r in &receptacles {
                        tasks.push(Task {
                            category,
                            targets: vec![a, b],
                            goal: Some(r),
                            instruction: format!(
                                "put the {} and the {} in the {}",
                                obj_name(a),
                                obj_name(b),
                                loc_name(r)
                            ),
                        });
                    }
                }
            }
        }
        _ => {
            let adjective = match category {
                TaskCategory::Clean => "clean ",
                TaskCategory::Heat => "hot ",
                TaskCategory::Cool => "cold ",
                _ => "",
            };
            for o in 0..layout.objects.len() {
                for &r in &receptacles {
                    tasks.push(Task {
                        category,
                        targets: vec![o],
                        goal: Some(r),
                        instruction: format!(
                            "put a {}{} in the {}",
                            adjective,
                            obj_name(o),
                            loc_name(r)
                        ),
                    });
                }
            }
        }
    }
    tasks
}

/// Every task of every category, concatenated in `TaskCategory::ALL` order.
pub fn all_tasks(layout: &WorldLayout) -> Vec<Task> {
    TaskCategory::ALL
        .into_iter()
        .flat_map(|c| enumerate_tasks(layout, c))
        .collect()
}

/// Draws one task uniformly from the concatenated enumeration, advancing `rng`.
pub fn sample_task(layout: &WorldLayout, rng: &mut impl Rng) -> Task {
    let tasks = all_tasks(layout);
    let idx = rng.gen_range(0..tasks.len());
    tasks[idx].clone()
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateFlag {
    Clean,
    Hot,
    Cold,
    Examined,
}

impl StateFlag {
    pub const ALL: [StateFlag; 4] = [
        StateFlag::Clean,
        StateFlag::Hot,
        StateFlag::Cold,
        StateFlag::Examined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateFlag::Clean => "clean",
            StateFlag::Hot => "hot",
            StateFlag::Cold => "cold",
            StateFlag::Examined => "examined",
        }
    }

    pub fn from_name(name: &str) -> Option<StateFlag> {
        StateFlag::ALL.into_iter().find(|f| f.as_str() == name)
    }
}

/// Per-object condition flags. `hot` and `cold` are mutually exclusive;
/// `clean` and `examined` are monotone once set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateFlags {
    pub clean: bool,
    pub hot: bool,
    pub cold: bool,
    pub examined: bool,
}

impl StateFlags {
    pub fn has(&self, flag: StateFlag) -> bool {
        match flag {
            StateFlag::Clean => self.clean,
            StateFlag::Hot => self.hot,
            StateFlag::Cold => self.cold,
            StateFlag::Examined => self.examined,
        }
    }
}

/// Full simulator state. Everything an episode needs beyond the layout
/// and task lives here; `step` is a pure function of this value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldState {
    pub agent_location: LocId,
    pub holding: Option<ObjId>,
    /// `None` while the object is held.
    pub object_locations: Vec<Option<LocId>>,
    pub flags: Vec<StateFlags>,
    /// Number of task targets currently sitting in the goal receptacle.
    pub placed_count: u8,
    /// Steps taken so far this episode.
    pub t: u32,
}

impl WorldState {
    /// State identity ignoring the step counter — two states that differ
    /// only in `t` describe the same world configuration.
    pub fn configuration(&self) -> (LocId, Option<ObjId>, &[Option<LocId>], &[StateFlags], u8) {
        (
            self.agent_location,
            self.holding,
            &self.object_locations,
            &self.flags,
            self.placed_count,
        )
    }
}

/// What the agent can see from where it stands, plus the instruction echo.
/// Derivable from `(layout, task, state)` alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub agent_location: LocId,
    /// Objects at the agent's location, in layout object order, with flags.
    pub visible: Vec<(ObjId, StateFlags)>,
    pub holding: Option<(ObjId, StateFlags)>,
    pub category: TaskCategory,
    pub instruction: String,
    /// Task targets that do not yet satisfy their goal clause, in layout order.
    pub pending_targets: Vec<ObjId>,
    pub goal: Option<LocId>,
}

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Goto(LocId),
    Take(ObjId),
    Put(LocId),
    Use(LocId),
    Noop,
}

impl Action {
    /// Human-readable form, e.g. `goto(kitchen)` or `take(mug)`.
    pub fn display(&self, layout: &WorldLayout) -> String {
        match *self {
            Action::Goto(l) => format!("goto({})", layout.locations[l].name),
            Action::Take(o) => format!("take({})", layout.objects[o].name),
            Action::Put(l) => format!("put({})", layout.locations[l].name),
            Action::Use(l) => format!("use({})", layout.locations[l].name),
            Action::Noop => "noop".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Episode dynamics
// ---------------------------------------------------------------------------

/// Output of one transition.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: WorldState,
    pub observation: Observation,
    pub done: bool,
    pub success: bool,
}

/// Bundles the immutable pieces of one episode: layout, task, step limit.
#[derive(Debug, Clone, Copy)]
pub struct Episode<'a> {
    pub layout: &'a WorldLayout,
    pub task: &'a Task,
    pub max_steps: u32,
}

impl<'a> Episode<'a> {
    pub fn new(layout: &'a WorldLayout, task: &'a Task, max_steps: u32) -> Episode<'a> {
        Episode { layout, task, max_steps }
    }

    /// Deterministic initial state: the seed permutes object placements
    /// among the layout's initial-location slots and picks the start room.
    /// The permutation depends only on `(layout, seed)`, so a fixed seed
    /// yields one placement shared by every task.
    pub fn reset(&self, seed: u64) -> Result<(WorldState, Observation), WorldError> {
        self.validate_task()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slots: Vec<LocId> =
            self.layout.objects.iter().map(|o| o.initial_location).collect();
        // Fisher-Yates over the placement slots.
        for i in (1..slots.len()).rev() {
            let j = rng.gen_range(0..=i);
            slots.swap(i, j);
        }
        let rooms: Vec<LocId> = self.layout.rooms().collect();
        let start = rooms[rng.gen_range(0..rooms.len())];
        let mut state = WorldState {
            agent_location: start,
            holding: None,
            object_locations: slots.into_iter().map(Some).collect(),
            flags: vec![StateFlags::default(); self.layout.objects.len()],
            placed_count: 0,
            t: 0,
        };
        state.placed_count = self.placed_targets(&state).len() as u8;
        let obs = self.observe(&state);
        Ok((state, obs))
    }

    fn validate_task(&self) -> Result<(), WorldError> {
        for &t in &self.task.targets {
            if t >= self.layout.objects.len() {
                return Err(WorldError::UnknownEntity(format!("object #{t}")));
            }
        }
        if let Some(goal) = self.task.goal {
            let ok = goal < self.layout.locations.len()
                && self.layout.locations[goal].kind == LocationKind::Receptacle;
            if !ok {
                return Err(WorldError::UnknownEntity(format!("receptacle #{goal}")));
            }
        }
        Ok(())
    }

    fn placed_targets(&self, state: &WorldState) -> Vec<ObjId> {
        match self.task.goal {
            Some(goal) => self
                .task
                .targets
                .iter()
                .copied()
                .filter(|&t| state.object_locations[t] == Some(goal))
                .collect(),
            None => Vec::new(),
        }
    }

    /// Targets that do not yet satisfy their goal clause (location and,
    /// where the category demands one, state flag).
    pub fn pending_targets(&self, state: &WorldState) -> Vec<ObjId> {
        let required = self.task.category.required_flag();
        self.task
            .targets
            .iter()
            .copied()
            .filter(|&t| {
                let flag_ok = required.map_or(true, |f| state.flags[t].has(f));
                let place_ok = match self.task.goal {
                    Some(goal) => state.object_locations[t] == Some(goal),
                    None => true,
                };
                !(flag_ok && place_ok)
            })
            .collect()
    }

    /// The goal predicate for this task's category.
    pub fn success(&self, state: &WorldState) -> bool {
        self.pending_targets(state).is_empty()
    }

    pub fn observe(&self, state: &WorldState) -> Observation {
        let visible = state
            .object_locations
            .iter()
            .enumerate()
            .filter(|(_, loc)| **loc == Some(state.agent_location))
            .map(|(o, _)| (o, state.flags[o]))
            .collect();
        Observation {
            agent_location: state.agent_location,
            visible,
            holding: state.holding.map(|o| (o, state.flags[o])),
            category: self.task.category,
            instruction: self.task.instruction.clone(),
            pending_targets: self.pending_targets(state),
            goal: self.task.goal,
        }
    }

    /// Applies one action. Invalid actions leave the world configuration
    /// untouched (the step counter still advances). `done` turns on at
    /// success or when the step budget runs out.
    pub fn step(&self, state: &WorldState, action: Action) -> StepOutcome {
        debug_assert!(state.t < self.max_steps, "step called on a finished episode");
        let mut next = state.clone();
        match action {
            Action::Goto(loc) => {
                if loc < self.layout.locations.len() {
                    next.agent_location = loc;
                }
            }
            Action::Take(obj) => {
                let visible = obj < self.layout.objects.len()
                    && next.object_locations[obj] == Some(next.agent_location);
                if visible && next.holding.is_none() {
                    next.holding = Some(obj);
                    next.object_locations[obj] = None;
                }
            }
            Action::Put(loc) => {
                let at_receptacle = loc < self.layout.locations.len()
                    && self.layout.locations[loc].kind == LocationKind::Receptacle
                    && next.agent_location == loc;
                if at_receptacle {
                    if let Some(obj) = next.holding.take() {
                        next.object_locations[obj] = Some(loc);
                    }
                }
            }
            Action::Use(loc) => {
                let station = (loc < self.layout.locations.len()
                    && next.agent_location == loc)
                    .then(|| match self.layout.locations[loc].kind {
                        LocationKind::Station(kind) => Some(kind),
                        _ => None,
                    })
                    .flatten();
                if let (Some(kind), Some(obj)) = (station, next.holding) {
                    let flags = &mut next.flags[obj];
                    match kind {
                        StationKind::Sink => flags.clean = true,
                        StationKind::Microwave => {
                            flags.hot = true;
                            flags.cold = false;
                        }
                        StationKind::Fridge => {
                            flags.cold = true;
                            flags.hot = false;
                        }
                        // The lamp only examines the object the task asks about.
                        StationKind::Lamp => {
                            if self.task.targets.contains(&obj) {
                                flags.examined = true;
                            }
                        }
                    }
                }
            }
            Action::Noop => {}
        }
        next.t = state.t + 1;
        next.placed_count = self.placed_targets(&next).len() as u8;
        let success = self.success(&next);
        let done = success || next.t >= self.max_steps;
        let observation = self.observe(&next);
        StepOutcome { state: next, observation, done, success }
    }
}

// ---------------------------------------------------------------------------
