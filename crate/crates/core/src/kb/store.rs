use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::schema::{ArgType, Lookup, Predicate, Schema};
use super::syntax::render_facts;
use super::term::{Constant, Literal, Term};

/// Ground atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<Constant>,
}

impl Fact {
    pub fn new(predicate: &str, args: Vec<Constant>) -> Self {
        Self {
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn to_literal(&self) -> Literal {
        Literal {
            predicate: self.predicate.clone(),
            args: self.args.iter().cloned().map(Term::Const).collect(),
        }
    }

    /// `None` when `lit` contains a variable.
    pub fn from_literal(lit: &Literal) -> Option<Self> {
        let args = lit
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            predicate: lit.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(").")
    }
}

/// Which operation produced a fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    CityFacts,
    EventFacts,
    Parsed,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactError {
    #[error("unknown predicate {predicate}/{arity}")]
    UnknownPredicate { predicate: String, arity: usize },
    #[error("{predicate} has arity {expected:?}, got {found}")]
    ArityMismatch {
        predicate: String,
        expected: Vec<usize>,
        found: usize,
    },
    #[error("argument {position} of {predicate} must be {expected}, got {found}")]
    TypeMismatch {
        predicate: String,
        position: usize,
        expected: ArgType,
        found: Constant,
    },
}

/// How to treat predicates missing from the schema on insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaPolicy {
    Enforce,
    /// Register unknown predicates with [`ArgType::Any`] arguments.
    Extend,
}

/// Set of ground facts over a schema.
///
/// Equality compares the fact sets only.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    schema: Schema,
    facts: BTreeSet<Fact>,
    provenance: BTreeMap<Fact, Provenance>,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.facts == other.facts
    }
}

impl Eq for KnowledgeBase {}

impl KnowledgeBase {
    pub fn new(schema: Schema) -> Self {
        Self {
            schema,
            facts: BTreeSet::new(),
            provenance: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        Self::new(Schema::standard())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn insert(&mut self, fact: Fact, provenance: Provenance) -> Result<bool, FactError> {
        self.insert_with(fact, provenance, SchemaPolicy::Enforce)
    }

    /// Returns `false` when the fact was already present; its first
    /// provenance is kept.
    pub fn insert_with(
        &mut self,
        fact: Fact,
        provenance: Provenance,
        policy: SchemaPolicy,
    ) -> Result<bool, FactError> {
        let arity = fact.arity();
        let pred = match self.schema.lookup(&fact.predicate, arity) {
            Lookup::Found(p) => p.clone(),
            Lookup::Target(p) => {
                self.schema.register(p.clone());
                p
            }
            Lookup::ArityMismatch { known } if policy == SchemaPolicy::Enforce => {
                return Err(FactError::ArityMismatch {
                    predicate: fact.predicate,
                    expected: known,
                    found: arity,
                })
            }
            Lookup::Unknown if policy == SchemaPolicy::Enforce => {
                return Err(FactError::UnknownPredicate {
                    predicate: fact.predicate,
                    arity,
                })
            }
            _ => {
                let p = Predicate::new(&fact.predicate, alloc::vec![ArgType::Any; arity]);
                self.schema.register(p.clone());
                p
            }
        };
        for (position, (t, c)) in pred.arg_types.iter().zip(&fact.args).enumerate() {
            if !t.admits(c) {
                return Err(FactError::TypeMismatch {
                    predicate: fact.predicate.clone(),
                    position,
                    expected: *t,
                    found: c.clone(),
                });
            }
        }
        if self.facts.contains(&fact) {
            return Ok(false);
        }
        self.provenance.insert(fact.clone(), provenance);
        self.facts.insert(fact);
        Ok(true)
    }

    /// Adds every fact of `other`, registering its predicates first.
    pub fn merge(&mut self, other: KnowledgeBase) {
        for p in other.schema.iter() {
            if !self.schema.contains(&p.name, p.arity()) {
                self.schema.register(p.clone());
            }
        }
        for (fact, prov) in other.provenance {
            if !self.facts.contains(&fact) {
                self.facts.insert(fact.clone());
                self.provenance.insert(fact, prov);
            }
        }
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn facts_of<'a>(&'a self, predicate: &'a str, arity: usize) -> impl Iterator<Item = &'a Fact> {
        self.facts
            .iter()
            .filter(move |f| f.predicate == predicate && f.arity() == arity)
    }

    pub fn provenance(&self, fact: &Fact) -> Option<Provenance> {
        self.provenance.get(fact).copied()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Removes and returns every fact whose predicate matches `pred`.
    pub fn take_where(&mut self, mut pred: impl FnMut(&Fact) -> bool) -> Vec<Fact> {
        let taken: Vec<Fact> = self.facts.iter().filter(|f| pred(f)).cloned().collect();
        for f in &taken {
            self.facts.remove(f);
            self.provenance.remove(f);
        }
        taken
    }

    /// Hex SHA-256 of the canonical text rendering.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(render_facts(self).as_bytes());
        hash.iter().map(|b| alloc::format!("{b:02x}")).collect()
    }

    pub fn seal(self) -> SealedKb {
        SealedKb::new(self)
    }
}

/// Rows of one predicate with per-argument postings.
#[derive(Debug, Clone)]
pub struct Relation {
    arity: usize,
    rows: Vec<u32>,
    postings: Vec<BTreeMap<u32, Vec<u32>>>,
}

impl Relation {
    pub fn len(&self) -> usize {
        if self.arity == 0 {
            0
        } else {
            self.rows.len() / self.arity
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: u32) -> &[u32] {
        let start = i as usize * self.arity;
        &self.rows[start..start + self.arity]
    }

    /// Row indices whose argument `position` is constant `id`.
    pub fn rows_with(&self, position: usize, id: u32) -> &[u32] {
        self.postings[position]
            .get(&id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Distinct constant ids at `position` with their row counts.
    pub fn values_at(&self, position: usize) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.postings[position].iter().map(|(&id, rows)| (id, rows.len()))
    }
}

/// Immutable knowledge base with interned constants and per-predicate
/// indexes, ready for coverage queries.
#[derive(Debug, Clone)]
pub struct SealedKb {
    kb: KnowledgeBase,
    constants: Vec<Constant>,
    ids: BTreeMap<Constant, u32>,
    relations: BTreeMap<(String, usize), Relation>,
}

impl SealedKb {
    fn new(kb: KnowledgeBase) -> Self {
        let mut constants = Vec::new();
        let mut ids = BTreeMap::new();
        let mut relations: BTreeMap<(String, usize), Relation> = BTreeMap::new();
        for fact in &kb.facts {
            let arity = fact.arity();
            let rel = relations
                .entry((fact.predicate.clone(), arity))
                .or_insert_with(|| Relation {
                    arity,
                    rows: Vec::new(),
                    postings: alloc::vec![BTreeMap::new(); arity],
                });
            let row = rel.len() as u32;
            for (pos, c) in fact.args.iter().enumerate() {
                let id = *ids.entry(c.clone()).or_insert_with(|| {
                    constants.push(c.clone());
                    (constants.len() - 1) as u32
                });
                rel.rows.push(id);
                rel.postings[pos].entry(id).or_default().push(row);
            }
        }
        Self {
            kb,
            constants,
            ids,
            relations,
        }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn into_inner(self) -> KnowledgeBase {
        self.kb
    }

    pub fn const_id(&self, c: &Constant) -> Option<u32> {
        self.ids.get(c).copied()
    }

    pub fn constant(&self, id: u32) -> &Constant {
        &self.constants[id as usize]
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn relation(&self, predicate: &str, arity: usize) -> Option<&Relation> {
        self.relations.get(&(predicate.to_string(), arity))
    }
}

impl Deref for SealedKb {
    type Target = KnowledgeBase;

    fn deref(&self) -> &KnowledgeBase {
        &self.kb
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fact(p: &str, args: &[&str]) -> Fact {
        Fact::new(p, args.iter().map(|a| Constant::sym(a)).collect())
    }

    #[test]
    fn set_semantics() {
        let mut kb = KnowledgeBase::standard();
        let f = Fact::new("population_density", vec![Constant::sym("bethesda"), Constant::Int(1624)]);
        assert_eq!(kb.insert(f.clone(), Provenance::Manual), Ok(true));
        assert_eq!(kb.insert(f.clone(), Provenance::Parsed), Ok(false));
        assert_eq!(kb.len(), 1);
        assert_eq!(kb.provenance(&f), Some(Provenance::Manual));
    }

    #[test]
    fn schema_errors() {
        let mut kb = KnowledgeBase::standard();
        assert!(matches!(
            kb.insert(fact("main_road", &["a"]), Provenance::Manual),
            Err(FactError::ArityMismatch { .. })
        ));
        assert!(matches!(
            kb.insert(fact("nope", &["a"]), Provenance::Manual),
            Err(FactError::UnknownPredicate { .. })
        ));
        assert!(matches!(
            kb.insert(fact("population_density", &["a", "b"]), Provenance::Manual),
            Err(FactError::TypeMismatch { position: 1, .. })
        ));
        assert_eq!(
            kb.insert_with(fact("nope", &["a"]), Provenance::Parsed, SchemaPolicy::Extend),
            Ok(true)
        );
        assert!(kb.schema().contains("nope", 1));
    }

    #[test]
    fn target_predicates_register_on_insert() {
        let mut kb = KnowledgeBase::standard();
        kb.insert(fact("is_event_inrockville", &["e1"]), Provenance::EventFacts)
            .unwrap();
        assert!(kb.schema().contains("is_event_inrockville", 1));
    }

    #[test]
    fn sealed_index() {
        let mut kb = KnowledgeBase::standard();
        for (e, r) in [("e1", "i270"), ("e2", "i495"), ("e3", "i270")] {
            kb.insert(fact("main_road", &[e, r]), Provenance::Manual).unwrap();
        }
        let sealed = kb.seal();
        let rel = sealed.relation("main_road", 2).unwrap();
        assert_eq!(rel.len(), 3);
        let i270 = sealed.const_id(&Constant::sym("i270")).unwrap();
        assert_eq!(rel.rows_with(1, i270).len(), 2);
        assert!(sealed.relation("main_road", 3).is_none());
    }
}
