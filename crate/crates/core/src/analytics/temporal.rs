use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, Timelike};
use serde::{Deserialize, Serialize};

use crate::model::ViolationRecord;

pub const DEFAULT_MIN_PROMINENCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Hour,
    Weekday,
    Month,
}

impl Axis {
    pub fn bins(self) -> usize {
        match self {
            Axis::Hour => 24,
            Axis::Weekday => 7,
            Axis::Month => 12,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Hour => "hour",
            Axis::Weekday => "weekday",
            Axis::Month => "month",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "hour" => Some(Axis::Hour),
            "weekday" => Some(Axis::Weekday),
            "month" => Some(Axis::Month),
            _ => None,
        }
    }

    /// Human label for bin `i`: `0`..`23`, `Mon`..`Sun`, `Jan`..`Dec`.
    pub fn bin_label(self, i: usize) -> &'static str {
        const HOURS: [&str; 24] = [
            "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12", "13", "14", "15",
            "16", "17", "18", "19", "20", "21", "22", "23",
        ];
        const DAYS: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
        const MONTHS: [&str; 12] = [
            "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
        ];
        match self {
            Axis::Hour => HOURS[i],
            Axis::Weekday => DAYS[i],
            Axis::Month => MONTHS[i],
        }
    }

    fn bin_of(self, r: &ViolationRecord) -> usize {
        match self {
            Axis::Hour => r.timestamp.hour() as usize,
            Axis::Weekday => r.timestamp.weekday().num_days_from_monday() as usize,
            Axis::Month => r.timestamp.month0() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub axis: Axis,
    pub bins: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Peaks with the hour axis treated as cyclic.
    pub fn peaks(&self, min_prominence: f64) -> Vec<usize> {
        detect_peaks(&self.bins, self.axis == Axis::Hour, min_prominence)
    }
}

pub fn temporal_histogram<'a, I>(records: I, axis: Axis) -> Histogram
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    let mut bins = vec![0u64; axis.bins()];
    for r in records {
        bins[axis.bin_of(r)] += 1;
    }
    Histogram { axis, bins }
}

/// Indices of bins that are strictly greater than each neighbour and
/// strictly greater than `min_prominence` times the largest bin.
///
/// On a linear axis the end bins only have one neighbour. On a cyclic axis
/// the first and last bins are neighbours.
pub fn detect_peaks(bins: &[u64], cyclic: bool, min_prominence: f64) -> Vec<usize> {
    debug_assert!(min_prominence > 0.0 && min_prominence < 1.0);
    let n = bins.len();
    let Some(&max) = bins.iter().max() else {
        return Vec::new();
    };
    let floor = min_prominence * max as f64;
    (0..n)
        .filter(|&i| {
            let v = bins[i];
            let left = if i > 0 {
                Some(bins[i - 1])
            } else if cyclic && n > 1 {
                Some(bins[n - 1])
            } else {
                None
            };
            let right = if i + 1 < n {
                Some(bins[i + 1])
            } else if cyclic && n > 1 {
                Some(bins[0])
            } else {
                None
            };
            let has_neighbour = left.is_some() || right.is_some();
            has_neighbour
                && left.is_none_or(|l| v > l)
                && right.is_none_or(|r| v > r)
                && v as f64 > floor
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::record_at;

    #[test]
    fn hour_flooring() {
        let rs = [record_at(2017, 3, 1, 7, 15), record_at(2017, 3, 1, 7, 59)];
        let h = temporal_histogram(&rs, Axis::Hour);
        assert_eq!(h.bins[7], 2);
        assert_eq!(h.total(), 2);
    }

    #[test]
    fn monday() {
        let rs = [record_at(2017, 1, 2, 12, 0)];
        let h = temporal_histogram(&rs, Axis::Weekday);
        assert_eq!(h.bins, [1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn months() {
        let rs: Vec<_> = [1, 1, 2, 12, 12]
            .iter()
            .map(|&m| record_at(2017, m, 5, 10, 0))
            .collect();
        let h = temporal_histogram(&rs, Axis::Month);
        assert_eq!(h.bins, [2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2]);
    }

    #[test]
    fn linear_peaks() {
        assert_eq!(detect_peaks(&[1, 5, 1, 1, 6, 1], false, 0.5), [1, 4]);
    }

    #[test]
    fn flat_has_no_peaks() {
        assert!(detect_peaks(&[3; 24], true, 0.5).is_empty());
        assert!(detect_peaks(&[], false, 0.5).is_empty());
    }

    #[test]
    fn cyclic_wraparound() {
        let mut bins = [1u64; 24];
        bins[0] = 9;
        bins[23] = 8;
        let h = Histogram { axis: Axis::Hour, bins: bins.to_vec() };
        assert_eq!(h.peaks(0.5), [0]);
        // Linear treatment sees 23 as a peak because it has no right neighbour.
        assert_eq!(detect_peaks(&bins, false, 0.5), [0, 23]);
    }

    #[test]
    fn prominence_filters_small_bumps() {
        assert_eq!(detect_peaks(&[1, 2, 1, 10, 1], false, 0.5), [3]);
    }
}
