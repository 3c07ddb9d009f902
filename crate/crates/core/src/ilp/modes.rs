use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Clause;
use crate::kb::{is_symbol, ArgType, Constant, Literal, Lookup, SealedKb, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModeError {
    #[error("malformed mode declaration `{0}`")]
    Malformed(String),
    #[error("unknown argument type `{0}`")]
    UnknownType(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ArgMode {
    /// `+type`: a variable already in the clause.
    Input,
    /// `-type`: a fresh variable.
    Output,
    /// `#type`: a constant seen at this position in the KB.
    Constant,
}

impl ArgMode {
    fn sigil(self) -> char {
        match self {
            ArgMode::Input => '+',
            ArgMode::Output => '-',
            ArgMode::Constant => '#',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeDeclaration {
    pub predicate: String,
    pub modes: Vec<(ArgMode, ArgType)>,
}

impl ModeDeclaration {
    pub fn new(predicate: &str, modes: Vec<(ArgMode, ArgType)>) -> Self {
        Self {
            predicate: predicate.to_string(),
            modes,
        }
    }

    pub fn arity(&self) -> usize {
        self.modes.len()
    }

    /// Parses `name(+type, #type, -type)`.
    pub fn parse(src: &str) -> Result<Self, ModeError> {
        let malformed = || ModeError::Malformed(src.to_string());
        let s = src.trim().trim_end_matches('.');
        let (name, rest) = s.split_once('(').ok_or_else(malformed)?;
        let inner = rest.strip_suffix(')').ok_or_else(malformed)?;
        let name = name.trim();
        if !is_symbol(name) {
            return Err(malformed());
        }
        let mut modes = Vec::new();
        for arg in inner.split(',') {
            let arg = arg.trim();
            let mut chars = arg.chars();
            let mode = match chars.next() {
                Some('+') => ArgMode::Input,
                Some('-') => ArgMode::Output,
                Some('#') => ArgMode::Constant,
                _ => return Err(malformed()),
            };
            let ty = chars.as_str().trim();
            let ty = ArgType::from_name(ty).ok_or_else(|| ModeError::UnknownType(ty.to_string()))?;
            modes.push((mode, ty));
        }
        Ok(Self::new(name, modes))
    }
}

impl fmt::Display for ModeDeclaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, (m, t)) in self.modes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{}", m.sigil(), t)?;
        }
        f.write_str(")")
    }
}

/// Modes over the per-event background predicates.
pub fn default_event_modes() -> Vec<ModeDeclaration> {
    use ArgMode::*;
    use ArgType::*;
    [
        ("event_time", Band),
        ("event_period_of_year", Band),
        ("driver_characteristics", BooleanAttr),
        ("vehicle_year", Band),
        ("location_context", Context),
        ("main_road", Road),
        ("event_previous_occurrence", Band),
        ("event_type", EventType),
    ]
    .into_iter()
    .map(|(p, t)| ModeDeclaration::new(p, alloc::vec![(Input, Event), (Constant, t)]))
    .collect()
}

fn compatible(var: ArgType, wanted: ArgType) -> bool {
    var == wanted || var == ArgType::Any || wanted == ArgType::Any
}

/// Types of the named variables in `clause`: head positions from the schema,
/// body positions from the mode that matches the literal, else the schema.
fn variable_types(clause: &Clause, modes: &[ModeDeclaration], kb: &SealedKb) -> BTreeMap<Variable, ArgType> {
    let mut types = BTreeMap::new();
    for lit in clause.literals() {
        let from_mode = modes
            .iter()
            .find(|m| m.predicate == lit.predicate && m.arity() == lit.arity())
            .map(|m| m.modes.iter().map(|&(_, t)| t).collect::<Vec<_>>());
        let from_schema = match kb.schema().lookup(&lit.predicate, lit.arity()) {
            Lookup::Found(p) => Some(p.arg_types.clone()),
            Lookup::Target(p) => Some(p.arg_types),
            _ => None,
        };
        let arg_types = from_mode.or(from_schema);
        for (i, t) in lit.args.iter().enumerate() {
            if let Term::Var(v) = t {
                if v.is_anonymous() {
                    continue;
                }
                let ty = arg_types.as_ref().map_or(ArgType::Any, |ts| ts[i]);
                types.entry(v.clone()).or_insert(ty);
            }
        }
    }
    types
}

fn fresh_variables(clause: &Clause, n: usize) -> Vec<Variable> {
    let used: BTreeSet<Variable> = clause.variables().into_iter().collect();
    (1..)
        .map(|i| Variable::new(&format!("V{i}")))
        .filter(|v| !used.contains(v))
        .take(n)
        .collect()
}

/// Constants at `position` of `predicate/arity`, most frequent first, capped
/// at `limit`.
fn constant_pool(kb: &SealedKb, predicate: &str, arity: usize, position: usize, ty: ArgType, limit: Option<usize>) -> Vec<Constant> {
    let Some(rel) = kb.relation(predicate, arity) else {
        return Vec::new();
    };
    let mut pool: Vec<(usize, &Constant)> = rel
        .values_at(position)
        .map(|(id, n)| (n, kb.constant(id)))
        .filter(|(_, c)| ty.admits(c))
        .collect();
    pool.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    pool.into_iter()
        .take(limit.unwrap_or(usize::MAX))
        .map(|(_, c)| c.clone())
        .collect()
}

/// Every literal buildable from `modes` that may extend `partial`, sorted by
/// predicate then arguments.
pub fn candidate_literals(
    partial: &Clause,
    modes: &[ModeDeclaration],
    kb: &SealedKb,
    pool_limit: Option<usize>,
) -> Vec<Literal> {
    let types = variable_types(partial, modes, kb);
    let mut out: BTreeSet<Literal> = BTreeSet::new();
    for mode in modes {
        let outputs = mode.modes.iter().filter(|(m, _)| *m == ArgMode::Output).count();
        let mut fresh = fresh_variables(partial, outputs).into_iter();
        let mut options: Vec<Vec<Term>> = Vec::with_capacity(mode.arity());
        for (pos, &(m, ty)) in mode.modes.iter().enumerate() {
            options.push(match m {
                ArgMode::Input => types
                    .iter()
                    .filter(|(_, &vt)| compatible(vt, ty))
                    .map(|(v, _)| Term::Var(v.clone()))
                    .collect(),
                ArgMode::Output => alloc::vec![Term::Var(fresh.next().expect("enough fresh names"))],
                ArgMode::Constant => constant_pool(kb, &mode.predicate, mode.arity(), pos, ty, pool_limit)
                    .into_iter()
                    .map(Term::Const)
                    .collect(),
            });
        }
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = alloc::vec![0usize; options.len()];
        loop {
            let args = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
            let lit = Literal::new(&mode.predicate, args);
            if !partial.body.contains(&lit) {
                out.insert(lit);
            }
            // Odometer increment over the argument options.
            let mut k = options.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::parse_rules;
    use crate::kb::{parse_facts, parse_literal, Schema, SchemaPolicy};
    use alloc::vec;

    fn kb(src: &str) -> SealedKb {
        parse_facts(src, Schema::standard(), SchemaPolicy::Extend)
            .unwrap()
            .seal()
    }

    fn lits(ls: &[Literal]) -> Vec<String> {
        ls.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn parse_and_display() {
        let m = ModeDeclaration::parse("main_road(+event, #road)").unwrap();
        assert_eq!(m.modes, vec![(ArgMode::Input, ArgType::Event), (ArgMode::Constant, ArgType::Road)]);
        assert_eq!(m.to_string(), "main_road(+event, #road)");
        assert!(matches!(ModeDeclaration::parse("p(+weird)"), Err(ModeError::UnknownType(_))));
        assert!(matches!(ModeDeclaration::parse("p(event)"), Err(ModeError::Malformed(_))));
        for m in default_event_modes() {
            assert_eq!(ModeDeclaration::parse(&m.to_string()).unwrap(), m);
        }
    }

    #[test]
    fn road_constants() {
        let k = kb("main_road(e1, i270). main_road(e2, i495). main_road(e3, i270).");
        let c = parse_rules("is_event_inolney(X).").unwrap().remove(0);
        let modes = vec![ModeDeclaration::parse("main_road(+event, #road)").unwrap()];
        assert_eq!(lits(&candidate_literals(&c, &modes, &k, None)), ["main_road(X, i270)", "main_road(X, i495)"]);
        assert_eq!(lits(&candidate_literals(&c, &modes, &k, Some(1))), ["main_road(X, i270)"]);
        assert!(candidate_literals(&c, &[], &k, None).is_empty());
    }

    #[test]
    fn body_literals_excluded() {
        let k = kb("main_road(e1, i270). main_road(e2, i495).");
        let c = parse_rules("is_event_inolney(X) :- main_road(X, i270).").unwrap().remove(0);
        let modes = vec![ModeDeclaration::parse("main_road(+event, #road)").unwrap()];
        assert_eq!(lits(&candidate_literals(&c, &modes, &k, None)), ["main_road(X, i495)"]);
    }

    #[test]
    fn fresh_and_typed_inputs() {
        let k = kb("loc(e1, l1). ctx(l1, shop).");
        let c = parse_rules("is_event_inolney(X) :- loc(X, V1).").unwrap().remove(0);
        let modes = vec![
            ModeDeclaration::parse("loc(+event, -location)").unwrap(),
            ModeDeclaration::parse("ctx(+location, #context)").unwrap(),
        ];
        assert_eq!(
            lits(&candidate_literals(&c, &modes, &k, None)),
            ["ctx(V1, shop)", "loc(X, V2)"]
        );
    }

    #[test]
    fn sorted_by_predicate_then_args() {
        let k = kb("vehicle_year(e1, gt_2009). event_time(e1, h20). event_time(e2, h08).");
        let c = Clause::head_only(parse_literal("is_event_inolney(X)").unwrap());
        let got = lits(&candidate_literals(&c, &default_event_modes(), &k, None));
        assert_eq!(got, ["event_time(X, h08)", "event_time(X, h20)", "vehicle_year(X, gt_2009)"]);
    }
}
