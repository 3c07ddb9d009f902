//! Subcommand implementations. Each stage reads its inputs from the paths in
//! [`PipelineConfig`] and writes artifacts under `config.out`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;
use traffic_ilp_core::analytics::{
    city_profile, crosstab, dimension_breakdown, hotspot_detect, night_duration_series, night_series,
    pearson_correlation, per_capita_ratio, rank_violations, temporal_histogram, AnalyticsError, Axis, CategoryMap,
    CityProfile, Dimension, DEFAULT_MIN_PROMINENCE,
};
use traffic_ilp_core::ilp::{
    builtin_paper_rules, default_event_modes, evaluate_ruleset, learn_ruleset, parse_rules, render_rules, Clause,
    EvalMetrics, IlpError, LearnConfig,
};
use traffic_ilp_core::kb::{
    compile_city_facts, compile_event_facts, is_target_predicate, parse_facts, render_facts, EventContext, Fact,
    KnowledgeBase, ParseError, Schema, SchemaPolicy,
};
use traffic_ilp_core::model::{city_key, BoolFlag, Dataset, ParseReport, ViolationRecord};

use crate::config::{ConfigError, PipelineConfig};
use crate::ingest::{
    parse_census_csv, parse_context_annotations, parse_violations_csv, parse_weather_csv, write_violations_csv,
    IngestError, ViolationOptions,
};
use crate::report::{bundle, csv_bytes, histogram_rows, json_artifacts, json_bytes, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ingest,
    Analyze,
    CompileFacts,
    Learn,
    Eval,
    Report,
    All,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("missing required input `--{0}`")]
    MissingInput(&'static str),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Ilp(#[from] IlpError),
    #[error("no target predicate given; pass --target")]
    NoTarget,
    #[error("no positive examples of `{0}` in the facts")]
    NoPositives(String),
    #[error("no negative examples for `{0}`; pass --negatives")]
    NoNegatives(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl PipelineError {
    /// 2 for broken internal invariants, 1 for everything caused by inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

/// Files written and non-fatal diagnostics.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct Run<'c> {
    cfg: &'c PipelineConfig,
    outcome: Outcome,
}

impl Run<'_> {
    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.cfg.out.join(rel);
        write_atomic(&path, bytes).map_err(|source| PipelineError::Write { path: path.clone(), source })?;
        self.outcome.written.push(path);
        Ok(())
    }

    fn warn(&mut self, msg: impl Into<String>) {
        self.outcome.warnings.push(msg.into());
    }
}

pub fn run(command: Command, cfg: &PipelineConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut run = Run {
        cfg,
        outcome: Outcome::default(),
    };
    match command {
        Command::Ingest => {
            let ds = load_dataset(cfg)?;
            ingest(&mut run, &ds)?;
        }
        Command::Analyze => {
            let ds = load_dataset(cfg)?;
            analyze(&mut run, &ds)?;
        }
        Command::CompileFacts => {
            let ds = load_dataset(cfg)?;
            compile(&mut run, &ds)?;
        }
        Command::Learn => {
            let kb = load_facts(cfg)?;
            let target = cfg.target.clone().ok_or(PipelineError::NoTarget)?;
            learn(&mut run, kb, &target)?;
        }
        Command::Eval => {
            let kb = load_facts(cfg)?;
            let target = cfg.target.clone().ok_or(PipelineError::NoTarget)?;
            let spec = cfg.rules.clone().unwrap_or_else(|| "builtin".into());
            evaluate(&mut run, kb, &target, &spec)?;
        }
        Command::Report => report(&mut run)?,
        Command::All => {
            let ds = load_dataset(cfg)?;
            ingest(&mut run, &ds)?;
            analyze(&mut run, &ds)?;
            let kb = compile(&mut run, &ds)?;
            let targets: Vec<String> = match &cfg.target {
                Some(t) => vec![t.clone()],
                None => kb
                    .facts()
                    .filter(|f| is_target_predicate(&f.predicate, f.arity()))
                    .map(|f| f.predicate.clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            };
            for t in &targets {
                learn(&mut run, kb.clone(), t)?;
                let learned = run.cfg.out.join("rules").join(format!("{t}.rules"));
                evaluate(&mut run, kb.clone(), t, &learned.to_string_lossy())?;
                evaluate(&mut run, kb.clone(), t, "builtin")?;
            }
            report(&mut run)?;
        }
    }
    Ok(run.outcome)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| PipelineError::Read {
            path: path.to_path_buf(),
            source,
        })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads every configured input. Only the violations file is required.
pub fn load_dataset(cfg: &PipelineConfig) -> Result<Dataset> {
    let path = cfg.violations.as_ref().ok_or(PipelineError::MissingInput("violations"))?;
    let options = ViolationOptions {
        mapping: cfg.mapping.clone(),
        strict: cfg.strict,
        window: cfg.window(),
    };
    let (violations, vreport) = parse_violations_csv(open(path)?, &options)?;
    let mut parse_report = ParseReport::default();
    parse_report.files.insert("violations".into(), vreport);
    let mut ds = Dataset {
        violations,
        ..Dataset::default()
    };
    if let Some(p) = &cfg.weather {
        ds.weather = parse_weather_csv(open(p)?)?;
        parse_report.files.insert(
            "weather".into(),
            traffic_ilp_core::model::FileReport {
                accepted: ds.weather.len() as u64,
                ..Default::default()
            },
        );
    }
    if let Some(p) = &cfg.census {
        ds.census = parse_census_csv(open(p)?)?;
        parse_report.files.insert(
            "census".into(),
            traffic_ilp_core::model::FileReport {
                accepted: ds.census.len() as u64,
                ..Default::default()
            },
        );
    }
    if let Some(p) = &cfg.annotations {
        let (ann, report) = parse_context_annotations(open(p)?, cfg.precision)?;
        ds.annotations = ann;
        parse_report.files.insert("annotations".into(), report);
    }
    ds.parse_report = parse_report;
    Ok(ds)
}

fn scoped<'d>(cfg: &PipelineConfig, ds: &'d Dataset) -> Vec<&'d ViolationRecord> {
    let map = CategoryMap::top_ten();
    ds.violations.iter().filter(|r| cfg.scope.admits(r, &map)).collect()
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    violations: usize,
    weather_days: usize,
    census_cities: Vec<&'a str>,
    annotations: usize,
    year: i32,
}

fn ingest(run: &mut Run<'_>, ds: &Dataset) -> Result<()> {
    let mut buf = Vec::new();
    write_violations_csv(&mut buf, &ds.violations, &run.cfg.mapping)
        .map_err(|e| PipelineError::Invariant(format!("snapshot serialization: {e}")))?;
    run.write("ingest/violations.csv", &buf)?;
    run.write("ingest/parse_report.json", &json_bytes(&ds.parse_report))?;
    let summary = IngestSummary {
        violations: ds.violations.len(),
        weather_days: ds.weather.len(),
        census_cities: ds.census.keys().map(String::as_str).collect(),
        annotations: ds.annotations.len(),
        year: run.cfg.year,
    };
    run.write("ingest/summary.json", &json_bytes(&summary))?;
    let rejected = ds.parse_report.files.get("violations").map_or(0, |r| r.rejected);
    if rejected > 0 {
        run.warn(format!("{rejected} violation rows rejected; see ingest/parse_report.json"));
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

/// Cities to profile: the configured list, or every census city with records
/// in scope.
fn profile_cities(run: &mut Run<'_>, ds: &Dataset) -> Vec<String> {
    let present: BTreeSet<String> = ds.violations.iter().map(|r| r.city_key()).collect();
    if run.cfg.cities.is_empty() {
        return ds.census.keys().filter(|k| present.contains(*k)).cloned().collect();
    }
    let mut out = Vec::new();
    for c in &run.cfg.cities {
        let key = city_key(c);
        if !present.contains(&key) {
            run.warn(format!("city `{c}` has no records in scope"));
        } else if !ds.census.contains_key(&key) {
            run.warn(format!("city `{c}` has no census row"));
        } else {
            out.push(key);
        }
    }
    out
}

fn scoped_dataset(cfg: &PipelineConfig, ds: &Dataset) -> Dataset {
    Dataset {
        violations: scoped(cfg, ds).into_iter().cloned().collect(),
        weather: ds.weather.clone(),
        census: ds.census.clone(),
        annotations: ds.annotations.clone(),
        parse_report: ds.parse_report.clone(),
    }
}

fn profiles(run: &mut Run<'_>, ds: &Dataset) -> Result<Vec<CityProfile>> {
    let cities = profile_cities(run, ds);
    let pc = run.cfg.profile_config();
    cities
        .iter()
        .map(|c| city_profile(ds, c, &pc).map_err(PipelineError::from))
        .collect()
}

#[derive(Serialize)]
struct NightReport {
    night_events: [u64; 12],
    mean_night_hours: [Option<f64>; 12],
    uncovered_dates: u64,
    correlation: Option<f64>,
    correlation_note: Option<String>,
    excluded_months: Vec<usize>,
    per_capita_percent: f64,
    county_population: u64,
}

/// June and July are left out of the night-length correlation.
const CORRELATION_EXCLUDED: [usize; 2] = [5, 6];

fn analyze(run: &mut Run<'_>, full: &Dataset) -> Result<()> {
    let cfg = run.cfg;
    let ds = scoped_dataset(cfg, full);
    let records: Vec<&ViolationRecord> = ds.violations.iter().collect();
    let map = CategoryMap::top_ten();

    let top = rank_violations(records.iter().copied(), 10)?;
    let rows = top.rows.iter().enumerate().map(|(i, r)| {
        vec![
            (i + 1).to_string(),
            r.key.clone(),
            r.count.to_string(),
            map.categorize(&r.key).as_str().to_string(),
        ]
    });
    run.write("analysis/top_violations.csv", &csv_bytes(&["rank", "description", "count", "category"], rows))?;
    run.write("analysis/top_violations.json", &json_bytes(&top))?;

    let flags = ["property_damage", "contributed_to_accident", "personal_injury"];
    let ct = crosstab(records.iter().copied(), &flags)?;
    let mut headers: Vec<&str> = flags.to_vec();
    headers.push("count");
    let ct_rows: Vec<Vec<String>> = ct
        .cells
        .iter()
        .map(|(k, c)| {
            let mut row: Vec<String> = k.iter().map(|&b| yes_no(b).to_string()).collect();
            row.push(c.to_string());
            row
        })
        .collect();
    run.write("analysis/consequences.csv", &csv_bytes(&headers, ct_rows))?;

    let flag_rows: Vec<Vec<String>> = BoolFlag::ALL
        .iter()
        .map(|&f| vec![f.name().to_string(), records.iter().filter(|r| r.flag(f)).count().to_string()])
        .collect();
    run.write("analysis/flags.csv", &csv_bytes(&["flag", "count"], flag_rows))?;

    let mut breakdown_rows = Vec::new();
    let mut breakdowns = Vec::new();
    for d in Dimension::ALL {
        let b = dimension_breakdown(records.iter().copied(), d.name())?;
        for r in &b.rows {
            breakdown_rows.push(vec![d.name().to_string(), r.key.clone(), r.count.to_string(), format!("{:.4}", r.percent)]);
        }
        breakdowns.push(b);
    }
    run.write(
        "analysis/breakdowns.csv",
        &csv_bytes(&["dimension", "key", "count", "percent"], breakdown_rows),
    )?;
    run.write("analysis/breakdowns.json", &json_bytes(&breakdowns))?;

    let hists: Vec<_> = [Axis::Hour, Axis::Weekday, Axis::Month]
        .into_iter()
        .map(|a| temporal_histogram(records.iter().copied(), a))
        .collect();
    run.write("analysis/temporal.csv", &histogram_rows(&hists))?;
    let temporal: BTreeMap<&str, serde_json::Value> = hists
        .iter()
        .map(|h| {
            (
                h.axis.name(),
                serde_json::json!({ "bins": h.bins, "peaks": h.peaks(DEFAULT_MIN_PROMINENCE) }),
            )
        })
        .collect();
    run.write("analysis/temporal.json", &json_bytes(&temporal))?;

    let hot = hotspot_detect(records.iter().copied(), cfg.hotspot_threshold, cfg.precision, &ds.annotations);
    let hot_rows: Vec<Vec<String>> = hot
        .cells
        .iter()
        .map(|c| {
            vec![
                c.location_key.latitude_str(),
                c.location_key.longitude_str(),
                c.count.to_string(),
                c.context_label.map(|l| l.as_str().to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    run.write(
        "analysis/hotspots.csv",
        &csv_bytes(&["latitude", "longitude", "count", "label"], hot_rows),
    )?;
    run.write("analysis/hotspots.json", &json_bytes(&hot))?;

    let night = night_series(records.iter().copied(), &ds.weather, None, cfg.night_fallback);
    let (durations, mut note) = match night_duration_series(&ds.weather) {
        Ok(d) => (d, None),
        Err(e) => {
            run.warn(format!("night durations unavailable: {e}"));
            ([None; 12], Some(e.to_string()))
        }
    };
    let mut excluded: Vec<usize> = CORRELATION_EXCLUDED.to_vec();
    excluded.extend((0..12).filter(|&m| durations[m].is_none() && !CORRELATION_EXCLUDED.contains(&m)));
    excluded.sort_unstable();
    let xs: Vec<f64> = durations.iter().map(|d| d.unwrap_or(0.0)).collect();
    let ys: Vec<f64> = night.counts.iter().map(|&c| c as f64).collect();
    let correlation = match pearson_correlation(&xs, &ys, &excluded) {
        Ok(r) => Some(r),
        Err(e) => {
            note.get_or_insert_with(|| e.to_string());
            None
        }
    };
    let night_rows: Vec<Vec<String>> = (0..12)
        .map(|m| {
            vec![
                Axis::Month.bin_label(m).to_string(),
                night.counts[m].to_string(),
                durations[m].map(|d| format!("{d:.4}")).unwrap_or_default(),
            ]
        })
        .collect();
    run.write(
        "analysis/night.csv",
        &csv_bytes(&["month", "night_events", "mean_night_hours"], night_rows),
    )?;
    let nr = NightReport {
        night_events: night.counts,
        mean_night_hours: durations,
        uncovered_dates: night.uncovered_dates,
        correlation,
        correlation_note: note,
        excluded_months: excluded,
        per_capita_percent: per_capita_ratio(records.len() as u64, cfg.county_population)?,
        county_population: cfg.county_population,
    };
    run.write("analysis/night.json", &json_bytes(&nr))?;

    let profs = profiles(run, &ds)?;
    run.write("analysis/city_profiles.json", &json_bytes(&profs))?;
    run.write("analysis/city_comparison.csv", &comparison_csv(&profs))?;
    Ok(())
}

fn comparison_csv(profiles: &[CityProfile]) -> Vec<u8> {
    let mut headers = vec!["metric".to_string()];
    headers.extend(profiles.iter().map(|p| p.city.clone()));
    type Get = fn(&CityProfile) -> String;
    let metrics: [(&str, Get); 20] = [
        ("violations", |p| p.violation_count.to_string()),
        ("violation_share_pct", |p| format!("{:.2}", p.violation_share)),
        ("top_event", |p| p.top_event.clone()),
        ("second_event", |p| p.second_event.clone().unwrap_or_default()),
        ("night_mean", |p| format!("{:.1}", p.night_stats.mean)),
        ("night_median", |p| format!("{:.1}", p.night_stats.median)),
        ("night_variance", |p| format!("{:.1}", p.night_stats.variance)),
        ("night_std", |p| format!("{:.1}", p.night_stats.std)),
        ("location_mean", |p| p.location_stats.map(|s| format!("{:.1}", s.mean)).unwrap_or_default()),
        ("location_variance", |p| p.location_stats.map(|s| format!("{:.1}", s.variance)).unwrap_or_default()),
        ("location_std", |p| p.location_stats.map(|s| format!("{:.1}", s.std)).unwrap_or_default()),
        ("light_truck_pct", |p| format!("{:.1}", p.light_truck_pct)),
        ("cars_under_10y_pct", |p| format!("{:.1}", p.cars_under_10y_pct)),
        ("injuries", |p| p.injury_count.to_string()),
        ("accidents", |p| p.accident_count.to_string()),
        ("not_wearing_belt", |p| p.belt_count.to_string()),
        ("population", |p| p.census.population.to_string()),
        ("density", |p| p.census.density.to_string()),
        ("education_pct", |p| p.census.education_pct.to_string()),
        ("median_income", |p| p.census.median_income.to_string()),
    ];
    csv_bytes(
        &headers,
        metrics.iter().map(|(name, get)| {
            let mut row = vec![name.to_string()];
            row.extend(profiles.iter().map(get));
            row
        }),
    )
}

#[derive(Serialize)]
struct CompileSummary {
    facts: usize,
    digest: String,
    warnings: Vec<String>,
}

fn compile(run: &mut Run<'_>, full: &Dataset) -> Result<KnowledgeBase> {
    let cfg = run.cfg;
    let ds = scoped_dataset(cfg, full);
    let profs = profiles(run, &ds)?;
    let (mut kb, warnings) = compile_city_facts(&profs, &cfg.bands);
    let cities: BTreeSet<String> = profs.iter().map(|p| city_key(&p.city)).collect();
    let ctx = EventContext {
        annotations: &ds.annotations,
        census: &ds.census,
        precision: cfg.precision,
        bands: &cfg.bands,
        cities: Some(&cities),
    };
    kb.merge(compile_event_facts(&ds.violations, &ctx));
    let text = render_facts(&kb);
    let back = parse_facts(&text, Schema::standard(), SchemaPolicy::Enforce)
        .map_err(|e| PipelineError::Invariant(format!("emitted facts do not parse: {e}")))?;
    if back != kb {
        return Err(PipelineError::Invariant("emitted facts do not round-trip".into()));
    }
    run.write("facts/facts.pl", text.as_bytes())?;
    let warnings: Vec<String> = warnings.iter().map(|w| w.to_string()).collect();
    for w in &warnings {
        run.warn(w.clone());
    }
    let summary = CompileSummary {
        facts: kb.len(),
        digest: kb.digest(),
        warnings,
    };
    run.write("facts/summary.json", &json_bytes(&summary))?;
    Ok(kb)
}

fn load_facts(cfg: &PipelineConfig) -> Result<KnowledgeBase> {
    let path = cfg.facts.clone().unwrap_or_else(|| cfg.out.join("facts/facts.pl"));
    let text = read_text(&path)?;
    parse_facts(&text, Schema::standard(), SchemaPolicy::Extend).map_err(|source| PipelineError::Parse { path, source })
}

/// Splits `kb` into background facts and examples of `target`. Without a
/// negatives file, events labelled for any other city are the negatives.
fn examples(cfg: &PipelineConfig, mut kb: KnowledgeBase, target: &str) -> Result<(KnowledgeBase, Vec<Fact>, Vec<Fact>)> {
    let labels = kb.take_where(|f| f.predicate == target || is_target_predicate(&f.predicate, f.arity()));
    let pos: Vec<Fact> = labels.iter().filter(|f| f.predicate == target).cloned().collect();
    if pos.is_empty() {
        return Err(PipelineError::NoPositives(target.into()));
    }
    let arity = pos[0].arity();
    let pos_args: BTreeSet<&Vec<_>> = pos.iter().map(|f| &f.args).collect();
    let neg: Vec<Fact> = match &cfg.negatives {
        Some(path) => {
            let text = read_text(path)?;
            let nkb = parse_facts(&text, Schema::standard(), SchemaPolicy::Extend)
                .map_err(|source| PipelineError::Parse { path: path.clone(), source })?;
            nkb.facts_of(target, arity).cloned().collect()
        }
        None if is_target_predicate(target, arity) => {
            let set: BTreeSet<Fact> = labels
                .iter()
                .filter(|f| f.predicate != target && f.arity() == arity && !pos_args.contains(&f.args))
                .map(|f| Fact::new(target, f.args.clone()))
                .collect();
            set.into_iter().collect()
        }
        None => return Err(PipelineError::NoNegatives(target.into())),
    };
    Ok((kb, pos, neg))
}

#[derive(Serialize)]
struct ClauseRow {
    clause_index: usize,
    clause: String,
    pos_covered: usize,
    neg_covered: usize,
    precision: f64,
}

#[derive(Serialize)]
struct LearnReport {
    target: String,
    kb_digest: String,
    positives: usize,
    negatives: usize,
    config: LearnConfig,
    clauses: Vec<ClauseRow>,
}

fn learn(run: &mut Run<'_>, kb: KnowledgeBase, target: &str) -> Result<()> {
    let (background, pos, neg) = examples(run.cfg, kb, target)?;
    let sealed = background.seal();
    let config = run.cfg.learn.clone();
    let (clauses, rows) = match learn_ruleset(&pos, &neg, &sealed, &default_event_modes(), &config) {
        Ok(rs) => {
            let rows = rs
                .clauses
                .iter()
                .enumerate()
                .map(|(i, c)| ClauseRow {
                    clause_index: i,
                    clause: c.clause.to_string(),
                    pos_covered: c.stats.pos_covered,
                    neg_covered: c.stats.neg_covered,
                    precision: c.stats.precision,
                })
                .collect();
            (rs.rules(), rows)
        }
        Err(IlpError::NoRulesLearned) => {
            run.warn(format!("no rules learned for `{target}`"));
            (Vec::new(), Vec::new())
        }
        Err(e) => return Err(e.into()),
    };
    let report = LearnReport {
        target: target.into(),
        kb_digest: sealed.digest(),
        positives: pos.len(),
        negatives: neg.len(),
        config,
        clauses: rows,
    };
    run.write(&format!("rules/{target}.rules"), render_rules(&clauses).as_bytes())?;
    run.write(&format!("rules/{target}.json"), &json_bytes(&report))?;
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    target: String,
    rules: String,
    clauses: Vec<String>,
    positives: usize,
    negatives: usize,
    metrics: EvalMetrics,
}

fn load_rules(spec: &str) -> Result<(String, Vec<Clause>)> {
    if spec == "builtin" {
        return Ok(("builtin".into(), builtin_paper_rules()));
    }
    let path = PathBuf::from(spec);
    let text = read_text(&path)?;
    let rules = parse_rules(&text).map_err(|source| PipelineError::Parse { path: path.clone(), source })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "rules".into());
    Ok((name, rules))
}

fn evaluate(run: &mut Run<'_>, kb: KnowledgeBase, target: &str, spec: &str) -> Result<()> {
    let (name, rules) = load_rules(spec)?;
    let (background, pos, neg) = examples(run.cfg, kb, target)?;
    let sealed = background.seal();
    let metrics = evaluate_ruleset(&rules, &pos, &neg, &sealed)?;
    let report = EvalReport {
        target: target.into(),
        rules: name.clone(),
        clauses: rules.iter().map(|c| c.to_string()).collect(),
        positives: pos.len(),
        negatives: neg.len(),
        metrics,
    };
    run.write(&format!("eval/{target}.{name}.json"), &json_bytes(&report))?;
    Ok(())
}

fn report(run: &mut Run<'_>) -> Result<()> {
    let out = run.cfg.out.clone();
    let target = out.join("report.json");
    let read_err = |source| PipelineError::Read { path: out.clone(), source };
    let files = json_artifacts(&out, &target).map_err(read_err)?;
    let value = bundle(&out, &files).map_err(|source| PipelineError::Read { path: out.clone(), source })?;
    run.write("report.json", &json_bytes(&value))?;
    Ok(())
}
