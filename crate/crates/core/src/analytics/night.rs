use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::model::{city_key, ViolationRecord, WeatherDay};

/// Fixed night interval used for dates missing from the weather table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NightWindow {
    pub start: NaiveTime,
    pub end: NaiveTime,
}

impl NightWindow {
    pub fn new(start: NaiveTime, end: NaiveTime) -> Self {
        Self { start, end }
    }

    /// Same strict comparison as [`WeatherDay::is_night`].
    pub fn is_night(&self, t: NaiveTime) -> bool {
        t > self.start || t < self.end
    }
}

impl Default for NightWindow {
    fn default() -> Self {
        Self {
            start: NaiveTime::from_hms_opt(20, 0, 0).unwrap(),
            end: NaiveTime::from_hms_opt(6, 0, 0).unwrap(),
        }
    }
}

/// Whether the event happened at night, and whether the weather table
/// covered its date.
pub fn is_night_event(
    record: &ViolationRecord,
    weather: &BTreeMap<NaiveDate, WeatherDay>,
    fallback: NightWindow,
) -> (bool, bool) {
    let t = record.timestamp.time();
    match weather.get(&record.timestamp.date()) {
        Some(day) => (day.is_night(t), true),
        None => (fallback.is_night(t), false),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NightSeries {
    /// Night events per month, January first.
    pub counts: [u64; 12],
    /// Distinct event dates with no weather row.
    pub uncovered_dates: u64,
}

pub fn night_series<'a, I>(
    records: I,
    weather: &BTreeMap<NaiveDate, WeatherDay>,
    city: Option<&str>,
    fallback: NightWindow,
) -> NightSeries
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    let city = city.map(city_key);
    let mut counts = [0u64; 12];
    let mut uncovered = BTreeSet::new();
    for r in records {
        if city.as_ref().is_some_and(|c| *c != r.city_key()) {
            continue;
        }
        let (night, covered) = is_night_event(r, weather, fallback);
        if !covered {
            uncovered.insert(r.timestamp.date());
        }
        if night {
            counts[r.timestamp.month0() as usize] += 1;
        }
    }
    NightSeries {
        counts,
        uncovered_dates: uncovered.len() as u64,
    }
}

/// Mean night length in hours for each month that has weather rows.
///
/// A month with some but not all of its days present is an error; months
/// with no rows at all are `None`.
pub fn night_duration_series(
    weather: &BTreeMap<NaiveDate, WeatherDay>,
) -> Result<[Option<f64>; 12], AnalyticsError> {
    let mut sums = [0.0f64; 12];
    let mut days = [0u32; 12];
    let mut years: [BTreeSet<i32>; 12] = Default::default();
    for day in weather.values() {
        let m = day.date.month0() as usize;
        sums[m] += day.night_hours();
        days[m] += 1;
        years[m].insert(day.date.year());
    }
    let mut out = [None; 12];
    for m in 0..12 {
        if days[m] == 0 {
            continue;
        }
        let expected: u32 = years[m]
            .iter()
            .map(|&y| days_in_month(y, m as u32 + 1))
            .sum();
        if days[m] != expected {
            return Err(AnalyticsError::IncompleteMonth {
                month: m as u32 + 1,
                present: days[m],
                expected,
            });
        }
        out[m] = Some(sums[m] / days[m] as f64);
    }
    Ok(out)
}

fn days_in_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    let first = NaiveDate::from_ymd_opt(year, month, 1).expect("valid month");
    let next = NaiveDate::from_ymd_opt(ny, nm, 1).expect("valid month");
    (next - first).num_days() as u32
}

/// Pearson product-moment correlation over the indices not in `exclude`.
pub fn pearson_correlation(xs: &[f64], ys: &[f64], exclude: &[usize]) -> Result<f64, AnalyticsError> {
    if xs.len() != ys.len() {
        return Err(AnalyticsError::DegenerateInput("series lengths differ"));
    }
    let pairs: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .enumerate()
        .filter(|(i, _)| !exclude.contains(i))
        .map(|(_, (&x, &y))| (x, y))
        .collect();
    if pairs.len() < 3 {
        return Err(AnalyticsError::DegenerateInput("fewer than 3 points"));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyticsError::DegenerateInput("zero variance"));
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Events as a percent of population.
pub fn per_capita_ratio(event_count: u64, population: u64) -> Result<f64, AnalyticsError> {
    if population == 0 {
        return Err(AnalyticsError::ZeroPopulation);
    }
    Ok(100.0 * event_count as f64 / population as f64)
}
