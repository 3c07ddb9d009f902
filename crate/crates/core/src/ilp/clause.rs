use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::IlpError;
use crate::kb::{parse_clauses, Literal, Lookup, ParseError, Schema, Variable};

/// Horn clause `head :- body1, ..., bodyN` with positive literals only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Literal, body: Vec<Literal>) -> Self {
        Self { head, body }
    }

    pub fn head_only(head: Literal) -> Self {
        Self {
            head,
            body: Vec::new(),
        }
    }

    /// Copy with `lit` appended to the body.
    pub fn extended(&self, lit: Literal) -> Self {
        let mut c = self.clone();
        c.body.push(lit);
        c
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        core::iter::once(&self.head).chain(&self.body)
    }

    /// Named variables in order of first appearance, head first.
    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.literals().flat_map(Literal::variables) {
            if !v.is_anonymous() && seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Every literal must name a predicate of `schema` with matching arity.
    pub fn check_schema(&self, schema: &Schema) -> Result<(), IlpError> {
        for lit in self.literals() {
            match schema.lookup(&lit.predicate, lit.arity()) {
                Lookup::Found(_) | Lookup::Target(_) => {}
                _ => {
                    return Err(IlpError::SchemaMismatch {
                        predicate: lit.predicate.clone(),
                        arity: lit.arity(),
                    })
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

/// One clause per line, in the given order.
pub fn render_rules(clauses: &[Clause]) -> String {
    let mut out = String::new();
    for c in clauses {
        out.push_str(&alloc::format!("{c}\n"));
    }
    out
}

pub fn parse_rules(source: &str) -> Result<Vec<Clause>, ParseError> {
    Ok(parse_clauses(source)?
        .into_iter()
        .map(|p| Clause::new(p.head, p.body))
        .collect())
}
