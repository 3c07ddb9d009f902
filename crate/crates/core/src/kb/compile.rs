//! Compilation of analytics outputs and records into ground facts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::discretize::{discretize, BandSpecs};
use super::schema::target_predicate;
use super::store::{Fact, KnowledgeBase, Provenance};
use super::term::Constant;
use crate::analytics::{dominant_label, CityProfile};
use crate::model::{city_key, CityCensus, ContextLabel, LocationKey, ViolationRecord};
use crate::text;

pub const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompileWarning {
    /// No annotated hotspot in the city, so `location_context/2` is omitted.
    #[error("{city}: no annotated hotspot, location_context omitted")]
    MissingAnnotationData { city: String },
    /// No record of the city has coordinates; `location_distribution/4` is
    /// omitted.
    #[error("{city}: no coordinates, location_distribution omitted")]
    MissingLocationStats { city: String },
}

/// Constant naming a city: case-folded token.
pub fn city_symbol(city: &str) -> String {
    text::symbolize(&city_key(city))
}

/// Constant naming the `index`-th record (zero-based) of a compiled slice.
pub fn event_symbol(index: usize) -> String {
    alloc::format!("e{}", index + 1)
}

pub fn hour_symbol(hour: u32) -> String {
    alloc::format!("h{hour}")
}

fn add(kb: &mut KnowledgeBase, predicate: &str, args: Vec<Constant>, provenance: Provenance) {
    kb.insert(Fact::new(predicate, args), provenance)
        .expect("compiled facts match the standard schema");
}

fn band(value: f64, spec: &super::discretize::DiscretizationSpec) -> Constant {
    Constant::Symbol(String::from(discretize(value, spec)))
}

/// City-level background facts.
pub fn compile_city_facts(
    profiles: &[CityProfile],
    bands: &BandSpecs,
) -> (KnowledgeBase, Vec<CompileWarning>) {
    let mut kb = KnowledgeBase::standard();
    let mut warnings = Vec::new();
    let p = Provenance::CityFacts;
    for profile in profiles {
        let city = Constant::Symbol(city_symbol(&profile.city));
        let n = profile.night_stats;
        add(
            &mut kb,
            "night_hours",
            vec![
                city.clone(),
                Constant::decimal(n.mean, 1),
                Constant::decimal(n.median, 1),
                Constant::decimal(n.variance, 1),
                Constant::decimal(n.std, 1),
            ],
            p,
        );
        match profile.location_stats {
            Some(s) => add(
                &mut kb,
                "location_distribution",
                vec![
                    city.clone(),
                    Constant::decimal(s.mean, 1),
                    Constant::decimal(s.variance, 1),
                    Constant::decimal(s.std, 1),
                ],
                p,
            ),
            None => warnings.push(CompileWarning::MissingLocationStats {
                city: profile.city.clone(),
            }),
        }
        match dominant_label(&profile.hotspots) {
            Some(label) => add(
                &mut kb,
                "location_context",
                vec![city.clone(), Constant::sym(label.kb_constant())],
                p,
            ),
            None => warnings.push(CompileWarning::MissingAnnotationData {
                city: profile.city.clone(),
            }),
        }
        for cell in &profile.hotspots {
            if let Some(label) = cell.context_label {
                add(
                    &mut kb,
                    "location_context",
                    vec![
                        city.clone(),
                        Constant::Symbol(cell.location_key.symbol()),
                        Constant::sym(label.kb_constant()),
                    ],
                    p,
                );
            }
        }
        let c = &profile.census;
        add(
            &mut kb,
            "population_density",
            vec![city.clone(), Constant::decimal(c.density, 1)],
            p,
        );
        add(&mut kb, "median_income", vec![city.clone(), band(c.median_income, &bands.income)], p);
        add(&mut kb, "education", vec![city.clone(), band(c.education_pct, &bands.education)], p);
        add(&mut kb, "poverty", vec![city.clone(), band(c.poverty_pct, &bands.poverty)], p);
        add(&mut kb, "density", vec![city.clone(), band(c.density, &bands.density)], p);
        if !c.main_road.trim().is_empty() {
            add(
                &mut kb,
                "main_road",
                vec![city.clone(), Constant::symbolized(&c.main_road)],
                p,
            );
        }
    }
    (kb, warnings)
}

/// Inputs for [`compile_event_facts`] besides the records.
#[derive(Debug, Clone, Copy)]
pub struct EventContext<'a> {
    pub annotations: &'a BTreeMap<LocationKey, ContextLabel>,
    pub census: &'a BTreeMap<String, CityCensus>,
    pub precision: u8,
    pub bands: &'a BandSpecs,
    /// City keys whose events get facts; `None` means every city. Prior
    /// occurrence counts always use all records.
    pub cities: Option<&'a BTreeSet<String>>,
}

/// Per-event facts plus one `is_event_in<city>/1` label per event.
///
/// Event `i` of `records` is named `e{i+1}`. Its prior-occurrence count is
/// the number of records at the same rounded location that come strictly
/// earlier in `(timestamp, index)` order.
pub fn compile_event_facts(records: &[ViolationRecord], ctx: &EventContext<'_>) -> KnowledgeBase {
    let mut kb = KnowledgeBase::standard();
    let p = Provenance::EventFacts;

    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by_key(|&i| (records[i].timestamp, i));
    let mut seen: BTreeMap<LocationKey, u64> = BTreeMap::new();
    let mut prior: Vec<Option<u64>> = vec![None; records.len()];
    for i in order {
        if let Some(k) = records[i].location_key(ctx.precision) {
            let c = seen.entry(k).or_insert(0);
            prior[i] = Some(*c);
            *c += 1;
        }
    }

    for (i, r) in records.iter().enumerate() {
        let ckey = r.city_key();
        if ctx.cities.is_some_and(|set| !set.contains(&ckey)) {
            continue;
        }
        let e = Constant::Symbol(event_symbol(i));
        let description = r.normalized_description().to_lowercase();
        add(&mut kb, "event_type", vec![e.clone(), Constant::text(&description)], p);
        add(&mut kb, "event_time", vec![e.clone(), Constant::Symbol(hour_symbol(r.hour()))], p);
        add(
            &mut kb,
            "event_period_of_year",
            vec![e.clone(), Constant::sym(MONTHS[r.month() as usize - 1])],
            p,
        );
        let belt = if r.belts { "belt_no" } else { "belt_yes" };
        add(&mut kb, "driver_characteristics", vec![e.clone(), Constant::sym(belt)], p);
        if let Some(year) = r.vehicle_year {
            add(&mut kb, "vehicle_year", vec![e.clone(), band(year as f64, &ctx.bands.vehicle_year)], p);
        }
        if let Some(key) = r.location_key(ctx.precision) {
            if let Some(&label) = ctx.annotations.get(&key) {
                add(&mut kb, "location_context", vec![e.clone(), Constant::sym(label.kb_constant())], p);
                if label == ContextLabel::MainRoad {
                    if let Some(c) = ctx.census.get(&ckey).filter(|c| !c.main_road.trim().is_empty()) {
                        add(&mut kb, "main_road", vec![e.clone(), Constant::symbolized(&c.main_road)], p);
                    }
                }
            }
        }
        if let Some(n) = prior[i] {
            add(
                &mut kb,
                "event_previous_occurrence",
                vec![e.clone(), band(n as f64, &ctx.bands.occurrence)],
                p,
            );
        }
        add(&mut kb, &target_predicate(&city_symbol(&r.city)), vec![e], p);
    }
    kb
}
