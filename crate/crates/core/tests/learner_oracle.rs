//! Learner output checked against exhaustive clause search and planted rules.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use traffic_ilp_core::ilp::{
    covers, default_event_modes, evaluate_ruleset, learn_clause, learn_ruleset, Clause, IlpError, LearnConfig,
};
use traffic_ilp_core::kb::{Constant, Fact, KnowledgeBase, Literal, Provenance, SealedKb, Term};

const TARGET: &str = "is_event_inolney";

struct Event<'a> {
    attrs: Vec<(&'a str, &'a str)>,
}

fn ev(i: usize) -> Constant {
    Constant::sym(&format!("e{i}"))
}

fn build(events: &[Event<'_>]) -> SealedKb {
    let mut kb = KnowledgeBase::standard();
    for (i, e) in events.iter().enumerate() {
        for &(p, v) in &e.attrs {
            kb.insert(Fact::new(p, vec![ev(i), Constant::sym(v)]), Provenance::Manual)
                .unwrap();
        }
    }
    kb.seal()
}

fn examples(idx: impl IntoIterator<Item = usize>) -> Vec<Fact> {
    idx.into_iter().map(|i| Fact::new(TARGET, vec![ev(i)])).collect()
}

fn head() -> Literal {
    Literal::new(TARGET, vec![Term::var("X")])
}

/// Every `p(X, c)` with `c` a constant stored under `p` in the KB, built
/// directly from the facts.
fn all_single_literals(kb: &SealedKb) -> Vec<Literal> {
    let mut out: Vec<Literal> = kb
        .facts()
        .filter(|f| f.arity() == 2)
        .map(|f| Literal::new(&f.predicate, vec![Term::var("X"), Term::Const(f.args[1].clone())]))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn counts(c: &Clause, pos: &[Fact], neg: &[Fact], kb: &SealedKb) -> (usize, usize) {
    let n = |ex: &[Fact]| ex.iter().filter(|e| covers(c, e, kb).unwrap().is_some()).count();
    (n(pos), n(neg))
}

fn foil(p0: usize, n0: usize, p1: usize, n1: usize) -> f64 {
    if p1 == 0 {
        return 0.0;
    }
    let info = |p: usize, n: usize| (p as f64 / (p + n) as f64).log2();
    p1 as f64 * (info(p1, n1) - info(p0, n0))
}

#[test]
fn depth_one_matches_exhaustive_search() {
    let rows = [
        ("i270", "h08"),
        ("i270", "h20"),
        ("i270", "h08"),
        ("i270", "h20"),
        ("i495", "h08"),
        ("i495", "h20"),
        ("i370", "h08"),
        ("i370", "h20"),
    ];
    let events: Vec<Event> = rows
        .iter()
        .map(|&(r, h)| Event {
            attrs: vec![("main_road", r), ("event_time", h)],
        })
        .collect();
    let kb = build(&events);
    let pos = examples(0..4);
    let neg = examples(4..8);

    let mut best: Option<(f64, Clause)> = None;
    for lit in all_single_literals(&kb) {
        let c = Clause::new(head(), vec![lit]);
        let (p, n) = counts(&c, &pos, &neg, &kb);
        let g = foil(4, 4, p, n);
        if best.as_ref().map_or(true, |(bg, _)| g > *bg) {
            best = Some((g, c));
        }
    }
    let (_, expected) = best.unwrap();
    let (got, stats) = learn_clause(&pos, &neg, &kb, &default_event_modes(), &LearnConfig::default())
        .unwrap()
        .unwrap();
    assert_eq!(got, expected);
    assert_eq!(got.to_string(), "is_event_inolney(X) :- main_road(X, i270).");
    assert_eq!((stats.pos_covered, stats.neg_covered), (4, 0));
}

#[test]
fn depth_two_matches_exhaustive_search() {
    let rows = [
        ("i270", "belt_no"),
        ("i270", "belt_no"),
        ("i270", "belt_no"),
        ("i270", "belt_yes"),
        ("i270", "belt_yes"),
        ("i495", "belt_no"),
        ("i495", "belt_no"),
        ("i495", "belt_yes"),
    ];
    let events: Vec<Event> = rows
        .iter()
        .map(|&(r, b)| Event {
            attrs: vec![("main_road", r), ("driver_characteristics", b)],
        })
        .collect();
    let kb = build(&events);
    let pos = examples(0..3);
    let neg = examples(3..8);
    let singles = all_single_literals(&kb);

    // No single literal separates the classes.
    for l in &singles {
        let (p, n) = counts(&Clause::new(head(), vec![l.clone()]), &pos, &neg, &kb);
        assert!(!(p == 3 && n == 0), "{l}");
    }
    // Two-literal clauses that cover every positive and no negative.
    let mut consistent = Vec::new();
    for (i, a) in singles.iter().enumerate() {
        for b in &singles[i + 1..] {
            let c = Clause::new(head(), vec![a.clone(), b.clone()]);
            if counts(&c, &pos, &neg, &kb) == (3, 0) {
                consistent.push(c);
            }
        }
    }
    assert_eq!(consistent.len(), 1);

    let (got, stats) = learn_clause(&pos, &neg, &kb, &default_event_modes(), &LearnConfig::default())
        .unwrap()
        .unwrap();
    assert_eq!(got.body.len(), 2);
    let mut sorted = got.body.clone();
    sorted.sort();
    assert_eq!(sorted, consistent[0].body);
    assert_eq!((stats.pos_covered, stats.neg_covered), (3, 0));
}

const ROADS: [&str; 3] = ["i270", "i495", "i370"];
const BELTS: [&str; 2] = ["belt_no", "belt_yes"];
const HOURS: [&str; 4] = ["h08", "h12", "h17", "h20"];
const YEARS: [&str; 2] = ["le_2009", "gt_2009"];

fn random_events(seed: u64, n: usize) -> Vec<Event<'static>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Event {
            attrs: vec![
                ("main_road", ROADS[rng.gen_range(0..ROADS.len())]),
                ("driver_characteristics", BELTS[rng.gen_range(0..BELTS.len())]),
                ("event_time", HOURS[rng.gen_range(0..HOURS.len())]),
                ("vehicle_year", YEARS[rng.gen_range(0..YEARS.len())]),
            ],
        })
        .collect()
}

fn has(e: &Event<'_>, p: &str, v: &str) -> bool {
    e.attrs.contains(&(p, v))
}

fn split(events: &[Event<'_>], label: impl Fn(&Event<'_>) -> bool) -> (Vec<Fact>, Vec<Fact>) {
    let pos = examples((0..events.len()).filter(|&i| label(&events[i])));
    let neg = examples((0..events.len()).filter(|&i| !label(&events[i])));
    (pos, neg)
}

fn exact() -> LearnConfig {
    LearnConfig {
        min_precision: 1.0,
        ..LearnConfig::default()
    }
}

#[test]
fn planted_conjunction_is_recovered() {
    let events = random_events(7, 80);
    let (pos, neg) = split(&events, |e| has(e, "main_road", "i270") && has(e, "driver_characteristics", "belt_no"));
    assert!(pos.len() >= 4);
    let kb = build(&events);
    let rs = learn_ruleset(&pos, &neg, &kb, &default_event_modes(), &exact()).unwrap();
    assert_eq!(rs.clauses.len(), 1);
    let mut body = rs.clauses[0].clause.body.clone();
    body.sort();
    let rendered: Vec<String> = body.iter().map(|l| l.to_string()).collect();
    assert_eq!(rendered, ["driver_characteristics(X, belt_no)", "main_road(X, i270)"]);
    let m = evaluate_ruleset(&rs.rules(), &pos, &neg, &kb).unwrap();
    assert_eq!((m.precision, m.recall), (Some(1.0), Some(1.0)));
}

#[test]
fn planted_disjunction_gives_two_clauses() {
    let events = random_events(11, 80);
    let (pos, neg) = split(&events, |e| has(e, "event_time", "h20") || has(e, "main_road", "i370"));
    let kb = build(&events);
    let rs = learn_ruleset(&pos, &neg, &kb, &default_event_modes(), &exact()).unwrap();
    let mut texts: Vec<String> = rs.rules().iter().map(|c| c.to_string()).collect();
    texts.sort();
    assert_eq!(
        texts,
        [
            "is_event_inolney(X) :- event_time(X, h20).",
            "is_event_inolney(X) :- main_road(X, i370).",
        ]
    );
    // Jointly the clauses cover every positive, checked one by one.
    for e in &pos {
        assert!(rs.rules().iter().any(|c| covers(c, e, &kb).unwrap().is_some()));
    }
}

#[test]
fn identical_profiles_learn_nothing() {
    let events: Vec<Event> = (0..6)
        .map(|_| Event {
            attrs: vec![("main_road", "i270")],
        })
        .collect();
    let kb = build(&events);
    let r = learn_ruleset(&examples(0..3), &examples(3..6), &kb, &default_event_modes(), &LearnConfig::default());
    assert_eq!(r, Err(IlpError::NoRulesLearned));
}

#[test]
fn wider_beam_finds_the_same_planted_rule() {
    let events = random_events(3, 60);
    let (pos, neg) = split(&events, |e| has(e, "main_road", "i495") && has(e, "vehicle_year", "gt_2009"));
    let kb = build(&events);
    let config = LearnConfig {
        beam_width: 4,
        ..exact()
    };
    let rs = learn_ruleset(&pos, &neg, &kb, &default_event_modes(), &config).unwrap();
    let m = evaluate_ruleset(&rs.rules(), &pos, &neg, &kb).unwrap();
    assert_eq!((m.precision, m.recall), (Some(1.0), Some(1.0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ruleset_respects_thresholds_and_is_deterministic(seed in any::<u64>(), n in 8usize..30, labels in proptest::collection::vec(any::<bool>(), 30)) {
        let events = random_events(seed, n);
        let pos = examples((0..n).filter(|&i| labels[i]));
        let neg = examples((0..n).filter(|&i| !labels[i]));
        prop_assume!(!pos.is_empty());
        let kb = build(&events);
        let config = LearnConfig::default();
        let first = learn_ruleset(&pos, &neg, &kb, &default_event_modes(), &config);
        let second = learn_ruleset(&pos, &neg, &kb, &default_event_modes(), &config);
        prop_assert_eq!(&first, &second);
        if let Ok(rs) = first {
            for lc in &rs.clauses {
                prop_assert!(lc.stats.pos_covered >= config.min_coverage);
                prop_assert!(lc.stats.precision >= config.min_precision);
                prop_assert_eq!(counts(&lc.clause, &pos, &neg, &kb), (lc.stats.pos_covered, lc.stats.neg_covered));
            }
        }
    }

    #[test]
    fn learned_clause_stats_replay(seed in any::<u64>(), labels in proptest::collection::vec(any::<bool>(), 20)) {
        let events = random_events(seed, 20);
        let pos = examples((0..20).filter(|&i| labels[i]));
        let neg = examples((0..20).filter(|&i| !labels[i]));
        prop_assume!(!pos.is_empty());
        let kb = build(&events);
        if let Some((c, s)) = learn_clause(&pos, &neg, &kb, &default_event_modes(), &LearnConfig::default()).unwrap() {
            prop_assert_eq!(counts(&c, &pos, &neg, &kb), (s.pos_covered, s.neg_covered));
        }
    }
}
