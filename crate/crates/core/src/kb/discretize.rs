use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("cut points of `{0}` are not strictly ascending")]
    UnsortedCuts(String),
    #[error("`{0}` needs exactly one more band name than cut points")]
    BandCount(String),
    #[error("band names of `{0}` are not distinct")]
    DuplicateBand(String),
}

/// Named intervals over a real quantity. A value equal to a cut point
/// belongs to the band above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationSpec {
    quantity: String,
    cut_points: Vec<f64>,
    band_names: Vec<String>,
}

impl DiscretizationSpec {
    pub fn new(quantity: &str, cut_points: &[f64], band_names: &[&str]) -> Result<Self, SpecError> {
        if cut_points.windows(2).any(|w| !(w[0] < w[1])) || cut_points.iter().any(|c| c.is_nan()) {
            return Err(SpecError::UnsortedCuts(quantity.to_string()));
        }
        if band_names.len() != cut_points.len() + 1 {
            return Err(SpecError::BandCount(quantity.to_string()));
        }
        for (i, a) in band_names.iter().enumerate() {
            if band_names[i + 1..].contains(a) {
                return Err(SpecError::DuplicateBand(quantity.to_string()));
            }
        }
        Ok(Self {
            quantity: quantity.to_string(),
            cut_points: cut_points.to_vec(),
            band_names: band_names.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn quantity(&self) -> &str {
        &self.quantity
    }

    pub fn cut_points(&self) -> &[f64] {
        &self.cut_points
    }

    pub fn band_names(&self) -> &[String] {
        &self.band_names
    }

    pub fn band_index(&self, value: f64) -> usize {
        self.cut_points.iter().take_while(|&&c| value >= c).count()
    }
}

pub fn discretize(value: f64, spec: &DiscretizationSpec) -> &str {
    &spec.band_names[spec.band_index(value)]
}

/// Band specifications used by fact compilation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpecs {
    /// Prior same-location event count.
    pub occurrence: DiscretizationSpec,
    pub income: DiscretizationSpec,
    pub education: DiscretizationSpec,
    pub poverty: DiscretizationSpec,
    pub density: DiscretizationSpec,
    pub vehicle_year: DiscretizationSpec,
    pub past_event_probability: DiscretizationSpec,
}

impl BandSpecs {
    /// Vehicle year banded at `newer_than`: years strictly greater fall in
    /// `gt_<newer_than>`.
    pub fn vehicle_year_after(newer_than: i32) -> DiscretizationSpec {
        let le = alloc::format!("le_{newer_than}");
        let gt = alloc::format!("gt_{newer_than}");
        DiscretizationSpec::new("vehicle_year", &[(newer_than + 1) as f64], &[&le, &gt])
            .expect("two distinct bands")
    }
}

impl Default for BandSpecs {
    fn default() -> Self {
        // Counts and years are integers, so "more than 10" is the cut 11.
        Self {
            occurrence: DiscretizationSpec::new(
                "event_previous_occurrence",
                &[5.0, 11.0, 21.0],
                &["lt_5", "band_5_10", "band_11_20", "gt_20"],
            )
            .unwrap(),
            income: DiscretizationSpec::new(
                "median_income",
                &[75000.0, 150000.0],
                &["lt_75000", "band_75000_150000", "gt_150000"],
            )
            .unwrap(),
            education: DiscretizationSpec::new(
                "education",
                &[50.0, 80.0],
                &["lt_50pct", "band_50_80pct", "gt_80pct"],
            )
            .unwrap(),
            poverty: DiscretizationSpec::new("poverty", &[3.0], &["lt_3pct", "gt_3pct"]).unwrap(),
            density: DiscretizationSpec::new("density", &[2000.0], &["lt_2000", "gt_2000"]).unwrap(),
            vehicle_year: Self::vehicle_year_after(2009),
            past_event_probability: DiscretizationSpec::new(
                "past_event_probability",
                &[2.5, 3.5],
                &["lt_2_5pct", "band_3pct", "gt_3_5pct"],
            )
            .unwrap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn income_bands() {
        let b = BandSpecs::default();
        assert_eq!(discretize(85773.0, &b.income), "band_75000_150000");
        assert_eq!(discretize(154559.0, &b.income), "gt_150000");
        assert_eq!(discretize(75000.0, &b.income), "band_75000_150000");
        assert_eq!(discretize(74999.99, &b.income), "lt_75000");
    }

    #[test]
    fn occurrence_bands_are_strict_for_counts() {
        let b = BandSpecs::default();
        assert_eq!(discretize(25.0, &b.occurrence), "gt_20");
        assert_eq!(discretize(20.0, &b.occurrence), "band_11_20");
        assert_eq!(discretize(11.0, &b.occurrence), "band_11_20");
        assert_eq!(discretize(10.0, &b.occurrence), "band_5_10");
        assert_eq!(discretize(0.0, &b.occurrence), "lt_5");
    }

    #[test]
    fn vehicle_year() {
        let b = BandSpecs::default();
        assert_eq!(discretize(2010.0, &b.vehicle_year), "gt_2009");
        assert_eq!(discretize(2009.0, &b.vehicle_year), "le_2009");
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            DiscretizationSpec::new("q", &[2.0, 1.0], &["a", "b", "c"]),
            Err(SpecError::UnsortedCuts(_))
        ));
        assert!(matches!(
            DiscretizationSpec::new("q", &[1.0, 1.0], &["a", "b", "c"]),
            Err(SpecError::UnsortedCuts(_))
        ));
        assert!(matches!(
            DiscretizationSpec::new("q", &[1.0], &["a"]),
            Err(SpecError::BandCount(_))
        ));
        assert!(matches!(
            DiscretizationSpec::new("q", &[1.0], &["a", "a"]),
            Err(SpecError::DuplicateBand(_))
        ));
    }
}
