use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{summary_stats, AnalyticsError, SummaryStats};
use crate::model::{city_key, ContextLabel, LocationKey, ViolationRecord};

pub const DEFAULT_HOTSPOT_THRESHOLD: u64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotspotCell {
    pub location_key: LocationKey,
    pub count: u64,
    pub context_label: Option<ContextLabel>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotspotReport {
    /// Count descending, then location ascending.
    pub cells: Vec<HotspotCell>,
    pub skipped_without_coordinates: u64,
}

/// Event counts per rounded location. Records without coordinates are
/// ignored.
pub fn location_counts<'a, I>(records: I, precision: u8) -> BTreeMap<LocationKey, u64>
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    let mut counts = BTreeMap::new();
    for r in records {
        if let Some(k) = r.location_key(precision) {
            *counts.entry(k).or_insert(0) += 1;
        }
    }
    counts
}

/// Cells with strictly more than `threshold` events.
pub fn hotspot_detect<'a, I>(
    records: I,
    threshold: u64,
    precision: u8,
    annotations: &BTreeMap<LocationKey, ContextLabel>,
) -> HotspotReport
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    let mut counts: BTreeMap<LocationKey, u64> = BTreeMap::new();
    let mut skipped = 0;
    for r in records {
        match r.location_key(precision) {
            Some(k) => *counts.entry(k).or_insert(0) += 1,
            None => skipped += 1,
        }
    }
    let mut cells: Vec<HotspotCell> = counts
        .into_iter()
        .filter(|&(_, c)| c > threshold)
        .map(|(location_key, count)| HotspotCell {
            location_key,
            count,
            context_label: annotations.get(&location_key).copied(),
        })
        .collect();
    cells.sort_by(|a, b| b.count.cmp(&a.count));
    HotspotReport {
        cells,
        skipped_without_coordinates: skipped,
    }
}

/// Summary statistics over the per-location event counts of one city.
pub fn location_distribution_stats<'a, I>(
    records: I,
    city: &str,
    precision: u8,
) -> Result<SummaryStats, AnalyticsError>
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    let key = city_key(city);
    let mut seen = false;
    let in_city = records.into_iter().filter(|r| {
        let hit = r.city_key() == key;
        seen |= hit;
        hit
    });
    let counts = location_counts(in_city, precision);
    if !seen {
        return Err(AnalyticsError::UnknownCity(city.to_string()));
    }
    let values: Vec<f64> = counts.values().map(|&c| c as f64).collect();
    summary_stats(&values)
}
