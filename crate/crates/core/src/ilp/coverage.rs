//! Coverage checking: does some substitution ground the head to an example
//! and every body literal to a fact?
//!
//! Body literals are solved left to right with backtracking. Each literal
//! picks its candidate rows from the smallest posting list among its bound
//! argument positions, falling back to a scan of the whole relation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Clause, IlpError};
use crate::kb::{Constant, Fact, Relation, SealedKb, Term, Variable};

/// Variable bindings that prove an example covered. Anonymous variables are
/// omitted.
pub type Witness = BTreeMap<Variable, Constant>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Var(usize),
    /// Constant id, or `None` for a constant absent from the KB.
    Const(Option<u32>),
}

struct CompiledLiteral<'k> {
    relation: Option<&'k Relation>,
    slots: Vec<Slot>,
}

/// A clause compiled against one sealed knowledge base.
pub struct Matcher<'c, 'k> {
    clause: &'c Clause,
    kb: &'k SealedKb,
    head: Vec<Slot>,
    body: Vec<CompiledLiteral<'k>>,
    names: Vec<Option<Variable>>,
}

impl<'c, 'k> Matcher<'c, 'k> {
    pub fn new(clause: &'c Clause, kb: &'k SealedKb) -> Self {
        let mut names: Vec<Option<Variable>> = Vec::new();
        let mut index: BTreeMap<&Variable, usize> = BTreeMap::new();
        let mut slot = |t: &'c Term, names: &mut Vec<Option<Variable>>| match t {
            Term::Const(c) => Slot::Const(kb.const_id(c)),
            Term::Var(v) if v.is_anonymous() => {
                names.push(None);
                Slot::Var(names.len() - 1)
            }
            Term::Var(v) => Slot::Var(*index.entry(v).or_insert_with(|| {
                names.push(Some(v.clone()));
                names.len() - 1
            })),
        };
        let head = clause.head.args.iter().map(|t| slot(t, &mut names)).collect();
        let body = clause
            .body
            .iter()
            .map(|lit| CompiledLiteral {
                relation: kb.relation(&lit.predicate, lit.arity()),
                slots: lit.args.iter().map(|t| slot(t, &mut names)).collect(),
            })
            .collect();
        Self {
            clause,
            kb,
            head,
            body,
            names,
        }
    }

    pub fn clause(&self) -> &Clause {
        self.clause
    }

    fn check_head(&self, example: &Fact) -> Result<(), IlpError> {
        if example.predicate != self.clause.head.predicate
            || example.arity() != self.clause.head.arity()
        {
            return Err(IlpError::PredicateMismatch {
                expected: self.clause.head.predicate.clone(),
                found: example.predicate.clone(),
            });
        }
        Ok(())
    }

    /// Binds head variables to the example. Constants absent from the KB get
    /// ids past the interned range so they can only match each other.
    fn bind_head(&self, example: &Fact) -> Option<(Vec<Option<u32>>, Vec<Constant>)> {
        let mut bindings = vec![None; self.names.len()];
        let mut extra: Vec<Constant> = Vec::new();
        for (slot, (term, c)) in self.head.iter().zip(self.clause.head.args.iter().zip(&example.args)) {
            match (slot, term) {
                (Slot::Const(_), Term::Const(k)) => {
                    if k != c {
                        return None;
                    }
                }
                (Slot::Var(v), _) => {
                    let id = match self.kb.const_id(c) {
                        Some(id) => id,
                        None => {
                            let pos = extra.iter().position(|e| e == c).unwrap_or_else(|| {
                                extra.push(c.clone());
                                extra.len() - 1
                            });
                            (self.kb.constant_count() + pos) as u32
                        }
                    };
                    match bindings[*v] {
                        Some(prev) if prev != id => return None,
                        _ => bindings[*v] = Some(id),
                    }
                }
                _ => unreachable!("slots mirror head terms"),
            }
        }
        Some((bindings, extra))
    }

    pub fn covers(&self, example: &Fact) -> Result<bool, IlpError> {
        self.check_head(example)?;
        Ok(match self.bind_head(example) {
            Some((mut b, _)) => self.solve(0, &mut b),
            None => false,
        })
    }

    pub fn witness(&self, example: &Fact) -> Result<Option<Witness>, IlpError> {
        self.check_head(example)?;
        let Some((mut b, extra)) = self.bind_head(example) else {
            return Ok(None);
        };
        if !self.solve(0, &mut b) {
            return Ok(None);
        }
        let n = self.kb.constant_count() as u32;
        let mut w = Witness::new();
        for (name, id) in self.names.iter().zip(b) {
            if let (Some(name), Some(id)) = (name, id) {
                let c = if id < n {
                    self.kb.constant(id).clone()
                } else {
                    extra[(id - n) as usize].clone()
                };
                w.insert(name.clone(), c);
            }
        }
        Ok(Some(w))
    }

    fn solve(&self, i: usize, b: &mut [Option<u32>]) -> bool {
        let Some(lit) = self.body.get(i) else {
            return true;
        };
        let Some(rel) = lit.relation else {
            return false;
        };
        let mut bound: Vec<Option<u32>> = Vec::with_capacity(lit.slots.len());
        for s in &lit.slots {
            bound.push(match *s {
                Slot::Const(None) => return false,
                Slot::Const(Some(id)) => Some(id),
                Slot::Var(v) => b[v],
            });
        }
        let postings = bound
            .iter()
            .enumerate()
            .filter_map(|(pos, id)| id.map(|id| rel.rows_with(pos, id)))
            .min_by_key(|rows| rows.len());
        let scan: Vec<u32>;
        let rows: &[u32] = match postings {
            Some(rows) => rows,
            None => {
                scan = (0..rel.len() as u32).collect();
                &scan
            }
        };
        let mut newly: Vec<usize> = Vec::new();
        for &row in rows {
            let values = rel.row(row);
            newly.clear();
            let mut ok = true;
            for (pos, s) in lit.slots.iter().enumerate() {
                let val = values[pos];
                match *s {
                    Slot::Const(id) => {
                        if id != Some(val) {
                            ok = false;
                            break;
                        }
                    }
                    Slot::Var(v) => match b[v] {
                        Some(x) if x != val => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            b[v] = Some(val);
                            newly.push(v);
                        }
                    },
                }
            }
            if ok && self.solve(i + 1, b) {
                return true;
            }
            for &v in &newly {
                b[v] = None;
            }
        }
        false
    }
}

/// Whether `clause` covers `example`, with a witness substitution when it
/// does.
pub fn covers(clause: &Clause, example: &Fact, kb: &SealedKb) -> Result<Option<Witness>, IlpError> {
    Matcher::new(clause, kb).witness(example)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageResult {
    /// Indices into the example slice.
    pub covered: Vec<usize>,
    /// One per entry of `covered`.
    pub witnesses: Vec<Witness>,
}

pub fn coverage(clause: &Clause, examples: &[Fact], kb: &SealedKb) -> Result<CoverageResult, IlpError> {
    let m = Matcher::new(clause, kb);
    let mut out = CoverageResult::default();
    for (i, e) in examples.iter().enumerate() {
        if let Some(w) = m.witness(e)? {
            out.covered.push(i);
            out.witnesses.push(w);
        }
    }
    Ok(out)
}

/// Indices of `examples` covered by `clause`, restricted to `candidates`.
pub(crate) fn covered_subset(
    m: &Matcher<'_, '_>,
    examples: &[Fact],
    candidates: &[usize],
) -> Result<Vec<usize>, IlpError> {
    let mut out = Vec::new();
    for &i in candidates {
        if m.covers(&examples[i])? {
            out.push(i);
        }
    }
    Ok(out)
}
