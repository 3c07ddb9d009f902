use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{
    hotspot_detect, location_distribution_stats, night_series, rank_violations, summary_stats,
    AnalyticsError, HotspotCell, NightWindow, SummaryStats, DEFAULT_HOTSPOT_THRESHOLD,
};
use crate::model::{city_key, CityCensus, Dataset, DEFAULT_PRECISION, DEFAULT_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub analysis_year: i32,
    pub precision: u8,
    pub hotspot_threshold: u64,
    pub night_fallback: NightWindow,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            analysis_year: DEFAULT_YEAR,
            precision: DEFAULT_PRECISION,
            hotspot_threshold: DEFAULT_HOTSPOT_THRESHOLD,
            night_fallback: NightWindow::default(),
        }
    }
}

/// Side-by-side comparison statistics for one city.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityProfile {
    pub city: String,
    pub violation_count: u64,
    /// Percent of all records in the dataset.
    pub violation_share: f64,
    pub top_event: String,
    pub second_event: Option<String>,
    /// Over the twelve monthly night-event counts.
    pub night_stats: SummaryStats,
    pub night_counts: [u64; 12],
    /// Over per-location event counts; `None` when no record has coordinates.
    pub location_stats: Option<SummaryStats>,
    pub light_truck_pct: f64,
    /// Share of records with a known vehicle year that are newer than
    /// `analysis_year - 10`.
    pub cars_under_10y_pct: f64,
    pub injury_count: u64,
    pub accident_count: u64,
    pub belt_count: u64,
    pub hotspots: Vec<HotspotCell>,
    pub census: CityCensus,
}

pub fn city_profile(
    dataset: &Dataset,
    city: &str,
    config: &ProfileConfig,
) -> Result<CityProfile, AnalyticsError> {
    let key = city_key(city);
    let records: Vec<_> = dataset
        .violations
        .iter()
        .filter(|r| r.city_key() == key)
        .collect();
    if records.is_empty() {
        return Err(AnalyticsError::UnknownCity(city.to_string()));
    }
    let census = dataset
        .census
        .get(&key)
        .cloned()
        .ok_or_else(|| AnalyticsError::MissingCensus(city.to_string()))?;

    let n = records.len() as u64;
    let ranking = rank_violations(records.iter().copied(), 2)?;
    let top_event = ranking.rows[0].key.clone();
    let second_event = ranking.rows.get(1).map(|r| r.key.clone());

    let night = night_series(
        records.iter().copied(),
        &dataset.weather,
        None,
        config.night_fallback,
    );
    let monthly: Vec<f64> = night.counts.iter().map(|&c| c as f64).collect();
    let night_stats = summary_stats(&monthly)?;

    let location_stats = match location_distribution_stats(records.iter().copied(), city, config.precision) {
        Ok(s) => Some(s),
        Err(AnalyticsError::EmptyInput) => None,
        Err(e) => return Err(e),
    };

    let light_trucks = records
        .iter()
        .filter(|r| r.vehicle_label().eq_ignore_ascii_case("Light Duty Truck"))
        .count() as u64;
    let with_year: Vec<i32> = records.iter().filter_map(|r| r.vehicle_year).collect();
    let recent = with_year
        .iter()
        .filter(|&&y| y > config.analysis_year - 10)
        .count();

    let hotspots = hotspot_detect(
        records.iter().copied(),
        config.hotspot_threshold,
        config.precision,
        &dataset.annotations,
    )
    .cells;

    Ok(CityProfile {
        city: census.city.clone(),
        violation_count: n,
        violation_share: percent(n, dataset.violations.len() as u64),
        top_event,
        second_event,
        night_stats,
        night_counts: night.counts,
        location_stats,
        light_truck_pct: percent(light_trucks, n),
        cars_under_10y_pct: percent(recent as u64, with_year.len() as u64),
        injury_count: records.iter().filter(|r| r.personal_injury).count() as u64,
        accident_count: records.iter().filter(|r| r.contributed_to_accident).count() as u64,
        belt_count: records.iter().filter(|r| r.belts).count() as u64,
        hotspots,
        census,
    })
}

fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Dominant context label among a set of hotspots: most cells, ties by
/// label order.
pub(crate) fn dominant_label(cells: &[HotspotCell]) -> Option<crate::model::ContextLabel> {
    let mut counts = BTreeMap::new();
    for c in cells {
        if let Some(l) = c.context_label {
            *counts.entry(l).or_insert(0u64) += 1;
        }
    }
    let max = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, c)| c == max).map(|(l, _)| l)
}
