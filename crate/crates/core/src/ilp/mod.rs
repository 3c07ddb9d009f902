//! Horn-clause learning and evaluation over a sealed knowledge base.

mod builtin;
mod clause;
mod coverage;
mod eval;
mod learn;
mod modes;

use alloc::string::String;
use thiserror::Error;

use crate::kb::ParseError;

pub use builtin::{builtin_paper_rules, BUILTIN_RULES};
pub use clause::{parse_rules, render_rules, Clause};
pub use coverage::{coverage, covers, CoverageResult, Matcher, Witness};
pub use eval::{evaluate_ruleset, ClauseEval, EvalMetrics};
pub use learn::{
    foil_gain, gain_from_counts, learn_clause, learn_ruleset, ClauseStats, LearnConfig,
    LearnedClause, LearnedRuleSet, TrainingMetadata,
};
pub use modes::{candidate_literals, default_event_modes, ArgMode, ModeDeclaration, ModeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IlpError {
    #[error("example predicate `{found}` does not match clause head `{expected}`")]
    PredicateMismatch { expected: String, found: String },
    #[error("predicate `{predicate}/{arity}` is not in the schema")]
    SchemaMismatch { predicate: String, arity: usize },
    #[error("no rules learned")]
    NoRulesLearned,
    #[error("no positive examples")]
    EmptyPositives,
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
