//! `covers` against exhaustive substitution enumeration on small random KBs.

use std::collections::BTreeMap;

use proptest::prelude::*;
use traffic_ilp_core::ilp::{covers, Clause};
use traffic_ilp_core::kb::{Constant, Fact, KnowledgeBase, Literal, Provenance, SchemaPolicy, SealedKb, Term, Variable};

const PREDICATES: [(&str, usize); 3] = [("p", 2), ("q", 2), ("r", 1)];
const VARS: [&str; 3] = ["X", "Y", "Z"];

fn constant(i: u8) -> Constant {
    Constant::sym(&format!("c{i}"))
}

fn build_kb(rows: &[(usize, u8, u8)]) -> SealedKb {
    let mut kb = KnowledgeBase::new(Default::default());
    for &(p, a, b) in rows {
        let (name, arity) = PREDICATES[p];
        let args = [constant(a), constant(b)][..arity].to_vec();
        kb.insert_with(Fact::new(name, args), Provenance::Manual, SchemaPolicy::Extend)
            .unwrap();
    }
    kb.seal()
}

fn term_strategy() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => (0..VARS.len()).prop_map(|i| Term::var(VARS[i])),
        1 => Just(Term::Var(Variable::anonymous())),
        1 => (0u8..8).prop_map(|i| Term::Const(constant(i))),
    ]
}

fn literal_strategy() -> impl Strategy<Value = Literal> {
    (0..PREDICATES.len(), term_strategy(), term_strategy()).prop_map(|(p, a, b)| {
        let (name, arity) = PREDICATES[p];
        Literal::new(name, [a, b][..arity].to_vec())
    })
}

fn clause_strategy() -> impl Strategy<Value = Clause> {
    proptest::collection::vec(literal_strategy(), 0..4)
        .prop_map(|body| Clause::new(Literal::new("t", vec![Term::var("X")]), body))
}

fn kb_strategy() -> impl Strategy<Value = Vec<(usize, u8, u8)>> {
    proptest::collection::vec((0..PREDICATES.len(), 0u8..8, 0u8..8), 0..24)
}

/// Rename each anonymous occurrence to its own variable.
fn name_anonymous(c: &Clause) -> Clause {
    let mut n = 0;
    let mut fix = |l: &Literal| {
        let args = l
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) if v.is_anonymous() => {
                    n += 1;
                    Term::var(&format!("Anon{n}"))
                }
                t => t.clone(),
            })
            .collect();
        Literal::new(&l.predicate, args)
    };
    let head = fix(&c.head);
    let body = c.body.iter().map(&mut fix).collect();
    Clause::new(head, body)
}

fn ground(l: &Literal, theta: &BTreeMap<Variable, Constant>) -> Fact {
    Fact::new(
        &l.predicate,
        l.args
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => theta[v].clone(),
            })
            .collect(),
    )
}

/// Tries every assignment of clause variables to constants of the KB or the
/// example.
fn brute_force(clause: &Clause, example: &Fact, kb: &SealedKb) -> bool {
    let c = name_anonymous(clause);
    let vars = c.variables();
    let mut domain: Vec<Constant> = kb.facts().flat_map(|f| f.args.iter().cloned()).collect();
    domain.extend(example.args.iter().cloned());
    domain.sort();
    domain.dedup();
    if domain.is_empty() {
        return false;
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        let theta: BTreeMap<Variable, Constant> =
            vars.iter().cloned().zip(idx.iter().map(|&i| domain[i].clone())).collect();
        if ground(&c.head, &theta) == *example && c.body.iter().all(|l| kb.contains(&ground(l, &theta))) {
            return true;
        }
        let mut k = vars.len();
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domain.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn example(i: u8) -> Fact {
    Fact::new("t", vec![constant(i)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn agrees_with_brute_force(rows in kb_strategy(), clause in clause_strategy(), e in 0u8..9) {
        let kb = build_kb(&rows);
        let ex = example(e);
        let got = covers(&clause, &ex, &kb).unwrap();
        prop_assert_eq!(got.is_some(), brute_force(&clause, &ex, &kb));
        if let Some(w) = got {
            // Replaying the witness grounds every body literal to a fact.
            prop_assert_eq!(&w[&Variable::new("X")], &ex.args[0]);
            for l in &clause.body {
                if l.args.iter().all(|t| !matches!(t, Term::Var(v) if v.is_anonymous())) {
                    prop_assert!(kb.contains(&ground(l, &w)));
                }
            }
        }
    }

    #[test]
    fn anti_monotone(rows in kb_strategy(), clause in clause_strategy(), extra in literal_strategy()) {
        let kb = build_kb(&rows);
        let longer = clause.extended(extra);
        for e in 0u8..9 {
            let ex = example(e);
            if covers(&longer, &ex, &kb).unwrap().is_some() {
                prop_assert!(covers(&clause, &ex, &kb).unwrap().is_some());
                prop_assert!(brute_force(&clause, &ex, &kb));
            }
        }
    }
}

#[test]
fn chain_join_matches_oracle() {
    let kb = {
        let mut kb = KnowledgeBase::new(Default::default());
        for (p, a, b) in [("loc", "e1", "l1"), ("loc", "e2", "l2"), ("ctx", "l1", "shop"), ("ctx", "l2", "park")] {
            kb.insert_with(
                Fact::new(p, vec![Constant::sym(a), Constant::sym(b)]),
                Provenance::Manual,
                SchemaPolicy::Extend,
            )
            .unwrap();
        }
        kb.seal()
    };
    let clause = traffic_ilp_core::ilp::parse_rules("t(X) :- loc(X, L), ctx(L, shop).").unwrap().remove(0);
    for e in ["e1", "e2", "l1", "shop"] {
        let ex = Fact::new("t", vec![Constant::sym(e)]);
        assert_eq!(covers(&clause, &ex, &kb).unwrap().is_some(), brute_force(&clause, &ex, &kb), "{e}");
    }
    assert!(covers(&clause, &Fact::new("t", vec![Constant::sym("e1")]), &kb).unwrap().is_some());
}
