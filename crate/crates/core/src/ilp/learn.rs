use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::coverage::{covered_subset, Matcher};
use super::{candidate_literals, Clause, IlpError, ModeDeclaration};
use crate::kb::{Fact, Literal, SealedKb, Term};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub max_body_literals: usize,
    pub min_coverage: usize,
    pub min_precision: f64,
    /// 1 is pure greedy search.
    pub beam_width: usize,
    /// Cap on constants tried per `#` position; `None` tries all.
    pub constant_pool_limit: Option<usize>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            max_body_literals: 6,
            min_coverage: 2,
            min_precision: 0.9,
            beam_width: 1,
            constant_pool_limit: None,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<(), IlpError> {
        if self.max_body_literals == 0 {
            return Err(IlpError::InvalidConfig("max_body_literals must be positive"));
        }
        if self.min_coverage == 0 {
            return Err(IlpError::InvalidConfig("min_coverage must be positive"));
        }
        if !(self.min_precision > 0.0 && self.min_precision <= 1.0) {
            return Err(IlpError::InvalidConfig("min_precision must lie in (0, 1]"));
        }
        if self.beam_width == 0 {
            return Err(IlpError::InvalidConfig("beam_width must be positive"));
        }
        if self.constant_pool_limit == Some(0) {
            return Err(IlpError::InvalidConfig("constant_pool_limit must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClauseStats {
    pub pos_covered: usize,
    pub neg_covered: usize,
    pub precision: f64,
}

impl ClauseStats {
    pub fn new(pos_covered: usize, neg_covered: usize) -> Self {
        let total = pos_covered + neg_covered;
        let precision = if total == 0 { 0.0 } else { pos_covered as f64 / total as f64 };
        Self {
            pos_covered,
            neg_covered,
            precision,
        }
    }

    fn acceptable(&self, config: &LearnConfig) -> bool {
        self.pos_covered >= config.min_coverage && self.precision >= config.min_precision
    }
}

/// `p1 * (log2(p1/(p1+n1)) - log2(p0/(p0+n0)))`, zero when `p1` is zero.
pub fn gain_from_counts(p0: usize, n0: usize, p1: usize, n1: usize) -> f64 {
    if p1 == 0 || p0 == 0 {
        return 0.0;
    }
    let info = |p: usize, n: usize| libm::log2(p as f64 / (p + n) as f64);
    p1 as f64 * (info(p1, n1) - info(p0, n0))
}

/// FOIL gain of appending `literal` to `partial`, counting examples.
pub fn foil_gain(
    partial: &Clause,
    literal: &Literal,
    pos: &[Fact],
    neg: &[Fact],
    kb: &SealedKb,
) -> Result<f64, IlpError> {
    let count = |c: &Clause, ex: &[Fact]| -> Result<usize, IlpError> {
        let m = Matcher::new(c, kb);
        let mut n = 0;
        for e in ex {
            n += m.covers(e)? as usize;
        }
        Ok(n)
    };
    let extended = partial.extended(literal.clone());
    Ok(gain_from_counts(
        count(partial, pos)?,
        count(partial, neg)?,
        count(&extended, pos)?,
        count(&extended, neg)?,
    ))
}

#[derive(Debug, Clone)]
struct State {
    clause: Clause,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl State {
    fn stats(&self) -> ClauseStats {
        ClauseStats::new(self.pos.len(), self.neg.len())
    }

    fn finished(&self, config: &LearnConfig) -> bool {
        self.neg.is_empty()
            || self.stats().precision >= config.min_precision
            || self.clause.body.len() >= config.max_body_literals
    }
}

fn head_for(example: &Fact) -> Literal {
    const NAMES: [&str; 4] = ["X", "Y", "Z", "W"];
    let args = (0..example.arity())
        .map(|i| match NAMES.get(i) {
            Some(n) => Term::var(n),
            None => Term::var(&format!("X{}", i + 1)),
        })
        .collect();
    Literal::new(&example.predicate, args)
}

fn check_examples(pos: &[Fact], neg: &[Fact]) -> Result<(), IlpError> {
    let first = pos.first().ok_or(IlpError::EmptyPositives)?;
    for e in pos.iter().chain(neg) {
        if e.predicate != first.predicate || e.arity() != first.arity() {
            return Err(IlpError::PredicateMismatch {
                expected: first.predicate.clone(),
                found: e.predicate.clone(),
            });
        }
    }
    Ok(())
}

/// Top-down search for one clause: from the bare head, append the literal
/// with the highest gain until the clause is consistent enough, too long, or
/// nothing improves it. Returns `None` when the result misses the coverage or
/// precision thresholds.
pub fn learn_clause(
    pos: &[Fact],
    neg: &[Fact],
    kb: &SealedKb,
    modes: &[ModeDeclaration],
    config: &LearnConfig,
) -> Result<Option<(Clause, ClauseStats)>, IlpError> {
    config.validate()?;
    check_examples(pos, neg)?;
    let root = State {
        clause: Clause::head_only(head_for(&pos[0])),
        pos: (0..pos.len()).collect(),
        neg: (0..neg.len()).collect(),
    };
    let mut beam = alloc::vec![root];
    let mut done: Vec<State> = Vec::new();
    while !beam.is_empty() {
        // (gain, child) in beam order then candidate order.
        let mut children: Vec<(f64, State)> = Vec::new();
        for state in beam {
            if state.finished(config) {
                done.push(state);
                continue;
            }
            let (p0, n0) = (state.pos.len(), state.neg.len());
            let mut grew = false;
            for lit in candidate_literals(&state.clause, modes, kb, config.constant_pool_limit) {
                let clause = state.clause.extended(lit);
                let m = Matcher::new(&clause, kb);
                let p = covered_subset(&m, pos, &state.pos)?;
                if p.is_empty() {
                    continue;
                }
                let n = covered_subset(&m, neg, &state.neg)?;
                let gain = gain_from_counts(p0, n0, p.len(), n.len());
                if gain > 0.0 {
                    grew = true;
                    children.push((gain, State { clause, pos: p, neg: n }));
                }
            }
            if !grew {
                done.push(state);
            }
        }
        // Stable sort keeps the deterministic order among equal gains.
        children.sort_by(|a, b| b.0.total_cmp(&a.0));
        children.truncate(config.beam_width);
        beam = children.into_iter().map(|(_, s)| s).collect();
    }
    let best = done
        .into_iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            let (sa, sb) = (a.stats(), b.stats());
            sa.acceptable(config)
                .cmp(&sb.acceptable(config))
                .then(sa.precision.total_cmp(&sb.precision))
                .then(sa.pos_covered.cmp(&sb.pos_covered))
                .then(b.clause.body.len().cmp(&a.clause.body.len()))
                .then(ib.cmp(ia))
        })
        .map(|(_, s)| s);
    Ok(best.and_then(|s| {
        let stats = s.stats();
        stats.acceptable(config).then_some((s.clause, stats))
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedClause {
    pub clause: Clause,
    /// Measured against the full training sets.
    pub stats: ClauseStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub target: String,
    pub config: LearnConfig,
    pub kb_digest: String,
    pub positives: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedRuleSet {
    pub clauses: Vec<LearnedClause>,
    pub metadata: TrainingMetadata,
}

impl LearnedRuleSet {
    pub fn rules(&self) -> Vec<Clause> {
        self.clauses.iter().map(|c| c.clause.clone()).collect()
    }
}

/// Sequential covering: learn a clause, drop the positives it covers, repeat.
pub fn learn_ruleset(
    pos: &[Fact],
    neg: &[Fact],
    kb: &SealedKb,
    modes: &[ModeDeclaration],
    config: &LearnConfig,
) -> Result<LearnedRuleSet, IlpError> {
    config.validate()?;
    check_examples(pos, neg)?;
    let mut remaining: Vec<Fact> = pos.to_vec();
    let mut clauses = Vec::new();
    while !remaining.is_empty() && remaining.len() >= config.min_coverage {
        let Some((clause, _)) = learn_clause(&remaining, neg, kb, modes, config)? else {
            break;
        };
        let m = Matcher::new(&clause, kb);
        let before = remaining.len();
        let mut kept = Vec::with_capacity(before);
        for e in remaining {
            if !m.covers(&e)? {
                kept.push(e);
            }
        }
        remaining = kept;
        let stats = ClauseStats::new(
            covered_subset(&m, pos, &(0..pos.len()).collect::<Vec<_>>())?.len(),
            covered_subset(&m, neg, &(0..neg.len()).collect::<Vec<_>>())?.len(),
        );
        clauses.push(LearnedClause { clause, stats });
        if remaining.len() == before {
            break;
        }
    }
    if clauses.is_empty() {
        return Err(IlpError::NoRulesLearned);
    }
    Ok(LearnedRuleSet {
        clauses,
        metadata: TrainingMetadata {
            target: pos[0].predicate.clone(),
            config: config.clone(),
            kb_digest: kb.digest(),
            positives: pos.len(),
            negatives: neg.len(),
        },
    })
}
