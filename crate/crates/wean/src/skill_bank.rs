//! Human-readable skill files and the bank that holds them.
//!
//! A skill file is markdown-flavoured text with a tiny front matter and a
//! list of condition → action rules:
//!
//! ```text
//! ---
//! task: miniworld
//! category: clean
//! ---
//! # Clean before you deliver
//!
//! ## Rules
//! when holding(target) and at(sink) then use(sink)
//! when holding(target) then goto(sink)
//! ```
//!
//! Rules are purely syntactic here: predicates come from a closed set and
//! actions are stored as templates (`take(target)`, `goto(goal)`, …) whose
//! symbols are resolved against a concrete world only when a hint is
//! computed. Files whose category matches neither the current task nor
//! `general` still ride along in the active set as inert noise — their
//! guards simply never fire.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;
use walkdir::WalkDir;

/// 1-based stable identifier assigned by bank load order.
pub type SkillId = u32;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected `---` front matter delimiter")]
    MissingFrontMatter { line: usize },
    #[error("line {line}: front matter is missing the `{field}` field")]
    MissingField { field: &'static str, line: usize },
    #[error("line {line}: unknown predicate `{name}`")]
    UnknownPredicate { name: String, line: usize },
    #[error("line {line}: unknown action `{name}`")]
    UnknownAction { name: String, line: usize },
    #[error("line {line}: unknown state flag `{name}`")]
    UnknownStateFlag { name: String, line: usize },
    #[error("line {line}: predicate `{name}` takes {expected} argument(s), found {found}")]
    BadArity { name: String, expected: usize, found: usize, line: usize },
    #[error("line {line}: malformed rule: {msg}")]
    MalformedRule { line: usize, msg: String },
    #[error("line {line}: unexpected content `{text}`")]
    UnexpectedLine { line: usize, text: String },
    #[error("line {line}: no rules found under `## Rules`")]
    EmptyRules { line: usize },
}

#[derive(Debug, Error)]
pub enum BankError {
    #[error("skill directory `{0}` contains no skill files")]
    EmptyBank(PathBuf),
    #[error("skill id {0} is not in the bank")]
    UnknownId(SkillId),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("failed to read `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

// ---------------------------------------------------------------------------
// Grammar
// ---------------------------------------------------------------------------

/// The closed predicate vocabulary rule conditions may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predicate {
    /// `holding(obj)` — the agent holds the named object.
    Holding,
    /// `at(loc)` — the agent stands at the named location.
    At,
    /// `visible(obj)` — the named object sits at the agent's location.
    Visible,
    /// `state(obj, flag)` — the named object carries the named flag.
    State,
    /// `task_is(category)` — the current task has the named category.
    TaskIs,
}

impl Predicate {
    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::Holding => "holding",
            Predicate::At => "at",
            Predicate::Visible => "visible",
            Predicate::State => "state",
            Predicate::TaskIs => "task_is",
        }
    }

    fn from_name(name: &str) -> Option<Predicate> {
        match name {
            "holding" => Some(Predicate::Holding),
            "at" => Some(Predicate::At),
            "visible" => Some(Predicate::Visible),
            "state" => Some(Predicate::State),
            "task_is" => Some(Predicate::TaskIs),
            _ => None,
        }
    }

    fn arity(self) -> usize {
        match self {
            Predicate::State => 2,
            _ => 1,
        }
    }
}

/// One optionally negated condition, e.g. `not state(target, clean)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub negated: bool,
    pub predicate: Predicate,
    pub args: Vec<String>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}({})", self.predicate.as_str(), self.args.join(", "))
    }
}

/// Action heads the grammar accepts; arguments stay symbolic until a hint
/// is resolved against a layout and task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionHead {
    Goto,
    Take,
    Put,
    Use,
    Noop,
}

impl ActionHead {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionHead::Goto => "goto",
            ActionHead::Take => "take",
            ActionHead::Put => "put",
            ActionHead::Use => "use",
            ActionHead::Noop => "noop",
        }
    }

    fn from_name(name: &str) -> Option<ActionHead> {
        match name {
            "goto" => Some(ActionHead::Goto),
            "take" => Some(ActionHead::Take),
            "put" => Some(ActionHead::Put),
            "use" => Some(ActionHead::Use),
            "noop" => Some(ActionHead::Noop),
            _ => None,
        }
    }
}

/// A syntactically valid action suggestion, e.g. `goto(goal)` or `noop`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTemplate {
    pub head: ActionHead,
    pub arg: Option<String>,
}

impl fmt::Display for ActionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arg {
            Some(arg) => write!(f, "{}({})", self.head.as_str(), arg),
            None => f.write_str(self.head.as_str()),
        }
    }
}

/// `when <atom> and <atom> ... then <action>`; the condition is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillRule {
    pub condition: Vec<Atom>,
    pub action: ActionTemplate,
}

impl fmt::Display for SkillRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.condition.iter().map(|a| a.to_string()).collect();
        write!(f, "when {} then {}", atoms.join(" and "), self.action)
    }
}

/// A parsed skill file. `id` is 0 until the bank assigns load order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillFile {
    pub id: SkillId,
    pub task: String,
    pub category: String,
    pub title: String,
    pub rules: Vec<SkillRule>,
    pub source_path: String,
}

/// The general category applies to every task.
pub const GENERAL_CATEGORY: &str = "general";

#[derive(Debug, Clone, PartialEq)]
pub struct SkillBank {
    pub files: Vec<SkillFile>,
}

impl SkillBank {
    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn ids(&self) -> BTreeSet<SkillId> {
        self.files.iter().map(|f| f.id).collect()
    }

    pub fn get(&self, id: SkillId) -> Result<&SkillFile, BankError> {
        self.files
            .iter()
            .find(|f| f.id == id)
            .ok_or(BankError::UnknownId(id))
    }

    /// Builds a bank from in-memory files, assigning ids in order.
    /// Useful for tests; `load_bank` is the filesystem entry point.
    pub fn from_files(mut files: Vec<SkillFile>) -> SkillBank {
        for (i, f) in files.iter_mut().enumerate() {
            f.id = (i + 1) as SkillId;
        }
        SkillBank { files }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses one skill file. Grammar, line by line:
/// front matter fenced by `---` with `task:` and `category:`, an optional
/// `# title`, a `## Rules` heading, then one rule per line. Blank lines are
/// ignored everywhere.
pub fn parse_skill_file(text: &str, source_path: &str) -> Result<SkillFile, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut pos = 0usize;

    if lines.first().map(|l| l.trim()) != Some("---") {
        return Err(ParseError::MissingFrontMatter { line: 1 });
    }
    pos += 1;

    let mut task: Option<String> = None;
    let mut category: Option<String> = None;
    loop {
        let Some(raw) = lines.get(pos) else {
            return Err(ParseError::MissingFrontMatter { line: pos + 1 });
        };
        let line_no = pos + 1;
        let trimmed = raw.trim();
        pos += 1;
        if trimmed == "---" {
            break;
        }
        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(ParseError::UnexpectedLine { line: line_no, text: trimmed.into() });
        };
        match key.trim() {
            "task" => task = Some(value.trim().to_string()),
            "category" => category = Some(value.trim().to_string()),
            other => {
                return Err(ParseError::UnexpectedLine {
                    line: line_no,
                    text: format!("{other}: …"),
                })
            }
        }
    }
    let task = task.ok_or(ParseError::MissingField { field: "task", line: pos })?;
    let category = category.ok_or(ParseError::MissingField { field: "category", line: pos })?;

    // Optional title, then the rules heading.
    let mut title = String::new();
    let mut in_rules = false;
    let mut rules = Vec::new();
    let mut last_line = pos;
    while pos < lines.len() {
        let raw = lines[pos];
        let line_no = pos + 1;
        last_line = line_no;
        let trimmed = raw.trim();
        pos += 1;
        if trimmed.is_empty() {
            continue;
        }
        if !in_rules {
            if let Some(rest) = trimmed.strip_prefix("## ") {
                if rest.trim() == "Rules" {
                    in_rules = true;
                    continue;
                }
                return Err(ParseError::UnexpectedLine { line: line_no, text: trimmed.into() });
            }
            if let Some(rest) = trimmed.strip_prefix("# ") {
                if title.is_empty() {
                    title = rest.trim().to_string();
                    continue;
                }
            }
            return Err(ParseError::UnexpectedLine { line: line_no, text: trimmed.into() });
        }
        rules.push(parse_rule(trimmed, line_no)?);
    }
    if rules.is_empty() {
        return Err(ParseError::EmptyRules { line: last_line });
    }

    Ok(SkillFile {
        id: 0,
        task,
        category,
        title,
        rules,
        source_path: source_path.to_string(),
    })
}

fn parse_rule(text: &str, line: usize) -> Result<SkillRule, ParseError> {
    let malformed = |msg: &str| ParseError::MalformedRule { line, msg: msg.into() };
    let body = text
        .strip_prefix("when ")
        .ok_or_else(|| malformed("rule must start with `when`"))?;
    let (cond_text, action_text) = body
        .split_once(" then ")
        .ok_or_else(|| malformed("rule must contain ` then `"))?;
    let mut condition = Vec::new();
    for atom_text in cond_text.split(" and ") {
        condition.push(parse_atom(atom_text.trim(), line)?);
    }
    if condition.is_empty() {
        return Err(malformed("condition must contain at least one atom"));
    }
    let action = parse_action(action_text.trim(), line)?;
    Ok(SkillRule { condition, action })
}

fn parse_atom(text: &str, line: usize) -> Result<Atom, ParseError> {
    let (negated, text) = match text.strip_prefix("not ") {
        Some(rest) => (true, rest.trim()),
        None => (false, text),
    };
    let (name, args) = split_call(text, line)?;
    let predicate = Predicate::from_name(name)
        .ok_or_else(|| ParseError::UnknownPredicate { name: name.into(), line })?;
    if args.len() != predicate.arity() {
        return Err(ParseError::BadArity {
            name: name.into(),
            expected: predicate.arity(),
            found: args.len(),
            line,
        });
    }
    if predicate == Predicate::State {
        let flag = &args[1];
        if crate::mini_world::StateFlag::from_name(flag).is_none() {
            return Err(ParseError::UnknownStateFlag { name: flag.clone(), line });
        }
    }
    Ok(Atom { negated, predicate, args })
}

fn parse_action(text: &str, line: usize) -> Result<ActionTemplate, ParseError> {
    if !text.contains('(') {
        let head = ActionHead::from_name(text)
            .ok_or_else(|| ParseError::UnknownAction { name: text.into(), line })?;
        if head != ActionHead::Noop {
            return Err(ParseError::MalformedRule {
                line,
                msg: format!("`{text}` needs an argument"),
            });
        }
        return Ok(ActionTemplate { head, arg: None });
    }
    let (name, args) = split_call(text, line)?;
    let head = ActionHead::from_name(name)
        .ok_or_else(|| ParseError::UnknownAction { name: name.into(), line })?;
    let expected = if head == ActionHead::Noop { 0 } else { 1 };
    if args.len() != expected {
        return Err(ParseError::MalformedRule {
            line,
            msg: format!("`{name}` takes {expected} argument(s), found {}", args.len()),
        });
    }
    Ok(ActionTemplate { head, arg: args.into_iter().next() })
}

/// Splits `name(arg1, arg2)` into the name and trimmed argument list.
fn split_call(text: &str, line: usize) -> Result<(&str, Vec<String>), ParseError> {
    let malformed = |msg: String| ParseError::MalformedRule { line, msg };
    let open = text
        .find('(')
        .ok_or_else(|| malformed(format!("`{text}` is missing `(`")))?;
    if !text.ends_with(')') {
        return Err(malformed(format!("`{text}` is missing `)`")));
    }
    let name = text[..open].trim();
    if name.is_empty() {
        return Err(malformed("empty predicate or action name".into()));
    }
    let inner = &text[open + 1..text.len() - 1];
    let args: Vec<String> = inner
        .split(',')
        .map(|a| a.trim().to_string())
        .filter(|a| !a.is_empty())
        .collect();
    Ok((name, args))
}

/// Renders a file in the canonical form `parse_skill_file` accepts, so that
/// parse ∘ serialize is the identity on the semantic fields.
pub fn serialize_skill_file(file: &SkillFile) -> String {
    let mut out = String::new();
    out.push_str("---\n");
    out.push_str(&format!("task: {}\n", file.task));
    out.push_str(&format!("category: {}\n", file.category));
    out.push_str("---\n");
    if !file.title.is_empty() {
        out.push_str(&format!("# {}\n", file.title));
        out.push('\n');
    }
    out.push_str("## Rules\n");
    for rule in &file.rules {
        out.push_str(&format!("{rule}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Bank loading and active-set ordering
// ---------------------------------------------------------------------------

/// Loads every `*.md` file under `root/{task}/` in lexicographic path
/// order, assigning 1-based ids in that order.
pub fn load_bank(root: &Path) -> Result<SkillBank, BankError> {
    let mut paths: Vec<PathBuf> = WalkDir::new(root)
        .min_depth(2)
        .max_depth(2)
        .sort_by_file_name()
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.extension().map(|e| e == "md").unwrap_or(false))
        .collect();
    paths.sort();
    let mut files = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .map_err(|source| BankError::Io { path: path.clone(), source })?;
        let mut file = parse_skill_file(&text, &path.display().to_string())
            .map_err(|source| BankError::Parse { path: path.clone(), source })?;
        file.id = (files.len() + 1) as SkillId;
        files.push(file);
    }
    if files.is_empty() {
        return Err(BankError::EmptyBank(root.to_path_buf()));
    }
    Ok(SkillBank { files })
}

/// Concatenates the rules of the active files for one task category.
///
/// Files whose category matches the task (or is `general`) come first, in
/// ascending id order; the remaining active files follow, also by id, as
/// inert noise. Within a file, rules keep their written order, so hint
/// evaluation is first-match top-down.
pub fn rules_for(
    bank: &SkillBank,
    active_ids: &BTreeSet<SkillId>,
    task_category: &str,
) -> Result<Vec<SkillRule>, BankError> {
    for &id in active_ids {
        bank.get(id)?;
    }
    let matches = |f: &SkillFile| f.category == task_category || f.category == GENERAL_CATEGORY;
    let mut rules = Vec::new();
    for file in bank.files.iter().filter(|f| active_ids.contains(&f.id)) {
        if matches(file) {
            rules.extend(file.rules.iter().cloned());
        }
    }
    for file in bank.files.iter().filter(|f| active_ids.contains(&f.id)) {
        if !matches(file) {
            rules.extend(file.rules.iter().cloned());
        }
    }
    Ok(rules)
}

// ---------------------------------------------------------------------------
