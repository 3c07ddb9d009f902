//! Ground first-order facts: terms, schema, the fact store, the text
//! format, discretization bands and fact compilation.

mod compile;
mod discretize;
mod schema;
mod store;
mod syntax;
mod term;

pub use compile::{
    city_symbol, compile_city_facts, compile_event_facts, event_symbol, hour_symbol,
    CompileWarning, EventContext, MONTHS,
};
pub use discretize::{discretize, BandSpecs, DiscretizationSpec, SpecError};
pub use schema::{
    is_target_predicate, target_predicate, ArgType, Lookup, Predicate, Schema, TARGET_PREFIX,
};
pub use store::{
    Fact, FactError, KnowledgeBase, Provenance, Relation, SchemaPolicy, SealedKb,
};
pub use syntax::{
    emit_facts, parse_clauses, parse_facts, parse_literal, render_facts, ParseError,
    ParsedClause,
};
pub use term::{is_symbol, is_variable_name, Constant, Decimal, Literal, Term, Variable};
