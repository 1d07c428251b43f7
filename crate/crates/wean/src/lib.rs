//! Curriculum-driven skill weaning for a linear policy on a text gridworld.
//!
//! The pipeline trains a small two-head softmax policy with group-relative
//! policy optimization while a bank of human-readable skill files injects
//! action hints into the observation features. A helpfulness-driven
//! curriculum measures how much each skill file still lifts validation
//! accuracy, keeps only the helpful ones under a shrinking budget, and
//! finally withdraws the bank entirely so the learned weights must carry
//! the behaviour on their own.
//!
//! Module map:
//!
//! * [`mini_world`] — deterministic household gridworld (tasks, transitions).
//! * [`skill_bank`] — rule-file grammar, bank loading, active-set ordering.
//! * [`context_encoder`] — fixed-width feature vectors with history compression.
//! * [`policy`] — factorized linear-softmax policy over actions × compression.
//! * [`grpo`] — rollouts, composite returns, group advantages, clipped update.
//! * [`curriculum`] — budget schedule, helpfulness reports, filter/rank/select.
//! * [`oracles`] — independent reference implementations used by the test suite.
//! * [`harness`] — run configuration, training loop, evaluation, ablations.

pub mod context_encoder;
pub mod curriculum;
pub mod grpo;
pub mod harness;
pub mod mini_world;
pub mod oracles;
pub mod parallel;
pub mod policy;
pub mod skill_bank;
