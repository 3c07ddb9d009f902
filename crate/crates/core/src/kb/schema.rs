use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::term::Constant;

/// Prefix of the per-city target predicates, `is_event_in<city>/1`.
pub const TARGET_PREFIX: &str = "is_event_in";

pub fn target_predicate(city_symbol: &str) -> String {
    alloc::format!("{TARGET_PREFIX}{city_symbol}")
}

pub fn is_target_predicate(name: &str, arity: usize) -> bool {
    arity == 1 && name.len() > TARGET_PREFIX.len() && name.starts_with(TARGET_PREFIX)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgType {
    City,
    Event,
    EventType,
    Road,
    Band,
    Number,
    Context,
    BooleanAttr,
    Location,
    /// Predicates registered from a fact file without schema enforcement.
    Any,
}

impl ArgType {
    pub fn admits(self, c: &Constant) -> bool {
        match self {
            ArgType::Any => true,
            ArgType::Number => c.is_numeric(),
            _ => !c.is_numeric(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ArgType::City => "city",
            ArgType::Event => "event",
            ArgType::EventType => "event_type",
            ArgType::Road => "road",
            ArgType::Band => "band",
            ArgType::Number => "number",
            ArgType::Context => "context",
            ArgType::BooleanAttr => "boolean_attr",
            ArgType::Location => "location",
            ArgType::Any => "any",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ArgType::City,
            ArgType::Event,
            ArgType::EventType,
            ArgType::Road,
            ArgType::Band,
            ArgType::Number,
            ArgType::Context,
            ArgType::BooleanAttr,
            ArgType::Location,
            ArgType::Any,
        ]
        .into_iter()
        .find(|t| t.name() == name)
    }
}

impl fmt::Display for ArgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub arg_types: Vec<ArgType>,
}

impl Predicate {
    pub fn new(name: &str, arg_types: Vec<ArgType>) -> Self {
        Self {
            name: name.to_string(),
            arg_types,
        }
    }

    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup<'a> {
    Found(&'a Predicate),
    /// A member of the `is_event_in<city>/1` family not yet registered.
    Target(Predicate),
    ArityMismatch { known: Vec<usize> },
    Unknown,
}

/// Set of predicates keyed by `(name, arity)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    predicates: BTreeMap<(String, usize), Predicate>,
}

impl Schema {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every predicate used by the city and event fact compilers and by the
    /// built-in rules.
    pub fn standard() -> Self {
        use ArgType::*;
        let mut s = Self::empty();
        let defs: &[(&str, &[ArgType])] = &[
            ("night_hours", &[City, Number, Number, Number, Number]),
            ("location_distribution", &[City, Number, Number, Number]),
            // City-level and event-level context share arity 2.
            ("location_context", &[Event, Context]),
            ("location_context", &[City, Location, Context]),
            ("event_previous_occurrence", &[Event, Band]),
            ("driver_characteristics", &[Event, BooleanAttr]),
            ("vehicle_year", &[Event, Band]),
            ("main_road", &[Event, Road]),
            ("population_density", &[City, Number]),
            ("median_income", &[City, Band]),
            ("education", &[City, Band]),
            ("poverty", &[City, Band]),
            ("density", &[City, Band]),
            ("event_time", &[Event, Band]),
            ("event_period_of_year", &[Event, Band]),
            ("event_type", &[Event, EventType]),
            ("past_event_probability", &[Event, Band]),
            ("safe_location", &[Location, City]),
            ("event_happen", &[Event, City]),
            ("is_event_inbethesda", &[Event]),
            ("is_event_ingaithersburg", &[Event]),
        ];
        for (name, types) in defs {
            s.register(Predicate::new(name, types.to_vec()));
        }
        s
    }

    /// Adds `p`, replacing any predicate with the same name and arity.
    pub fn register(&mut self, p: Predicate) {
        self.predicates.insert((p.name.clone(), p.arity()), p);
    }

    pub fn get(&self, name: &str, arity: usize) -> Option<&Predicate> {
        self.predicates.get(&(name.to_string(), arity))
    }

    pub fn contains(&self, name: &str, arity: usize) -> bool {
        self.get(name, arity).is_some()
    }

    pub fn lookup(&self, name: &str, arity: usize) -> Lookup<'_> {
        if let Some(p) = self.get(name, arity) {
            return Lookup::Found(p);
        }
        if is_target_predicate(name, arity) {
            return Lookup::Target(Predicate::new(name, vec![ArgType::Event]));
        }
        let known: Vec<usize> = self
            .predicates
            .keys()
            .filter(|(n, _)| n == name)
            .map(|(_, a)| *a)
            .collect();
        if known.is_empty() {
            Lookup::Unknown
        } else {
            Lookup::ArityMismatch { known }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Predicate> {
        self.predicates.values()
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }
}
