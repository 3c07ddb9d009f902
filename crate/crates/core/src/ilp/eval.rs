use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::coverage::Matcher;
use super::{Clause, IlpError};
use crate::kb::{Fact, SealedKb};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseEval {
    pub clause_index: usize,
    pub pos_covered: usize,
    pub neg_covered: usize,
    /// `None` when the clause covers nothing.
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    /// Examples predicted positive.
    pub coverage: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub per_clause: Vec<ClauseEval>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// An example is predicted positive when any clause whose head predicate
/// matches it covers it. Clauses for other heads take no part.
pub fn evaluate_ruleset(
    rules: &[Clause],
    pos: &[Fact],
    neg: &[Fact],
    kb: &SealedKb,
) -> Result<EvalMetrics, IlpError> {
    for c in rules {
        c.check_schema(kb.schema())?;
    }
    let matchers: Vec<Matcher<'_, '_>> = rules.iter().map(|c| Matcher::new(c, kb)).collect();
    let mut per_clause: Vec<ClauseEval> = (0..rules.len())
        .map(|i| ClauseEval {
            clause_index: i,
            pos_covered: 0,
            neg_covered: 0,
            precision: None,
        })
        .collect();
    let mut predicted = |e: &Fact, positive: bool| -> Result<bool, IlpError> {
        let mut any = false;
        for (i, m) in matchers.iter().enumerate() {
            let head = &m.clause().head;
            if head.predicate != e.predicate || head.arity() != e.arity() {
                continue;
            }
            if m.covers(e)? {
                any = true;
                if positive {
                    per_clause[i].pos_covered += 1;
                } else {
                    per_clause[i].neg_covered += 1;
                }
            }
        }
        Ok(any)
    };
    let (mut tp, mut fp) = (0, 0);
    for e in pos {
        tp += predicted(e, true)? as usize;
    }
    for e in neg {
        fp += predicted(e, false)? as usize;
    }
    for c in &mut per_clause {
        c.precision = ratio(c.pos_covered, c.pos_covered + c.neg_covered);
    }
    Ok(EvalMetrics {
        true_positives: tp,
        false_positives: fp,
        false_negatives: pos.len() - tp,
        true_negatives: neg.len() - fp,
        coverage: tp + fp,
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, pos.len()),
        per_clause,
    })
}
