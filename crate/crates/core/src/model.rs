//! Typed records for the violation, weather, census and location-context
//! inputs, plus the assembled [`Dataset`].
//!
//! Nothing here performs IO. The `traffic-ilp` crate turns CSV bytes into
//! these types and calls the `validate` methods before accepting a row.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

/// Default number of decimal places used to key coordinates (~11 m).
pub const DEFAULT_PRECISION: u8 = 4;
/// Default analysis year.
pub const DEFAULT_YEAR: i32 = 2017;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationType {
    Citation,
    Warning,
    #[serde(rename = "ESERO")]
    Esero,
}

impl ViolationType {
    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "citation" => Some(Self::Citation),
            "warning" => Some(Self::Warning),
            "esero" => Some(Self::Esero),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Citation => "Citation",
            Self::Warning => "Warning",
            Self::Esero => "ESERO",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    F,
    M,
    U,
}

impl Gender {
    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim() {
            "F" | "f" => Some(Self::F),
            "M" | "m" => Some(Self::M),
            "U" | "u" => Some(Self::U),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::F => "F",
            Self::M => "M",
            Self::U => "U",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Race {
    White,
    Black,
    Hispanic,
    Asian,
    NativeAmerican,
    Other,
}

impl Race {
    pub fn parse(raw: &str) -> Option<Self> {
        let folded: String = raw
            .chars()
            .filter(|c| c.is_ascii_alphabetic())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match folded.as_str() {
            "white" => Some(Self::White),
            "black" => Some(Self::Black),
            "hispanic" => Some(Self::Hispanic),
            "asian" => Some(Self::Asian),
            "nativeamerican" => Some(Self::NativeAmerican),
            "other" => Some(Self::Other),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::White => "WHITE",
            Self::Black => "BLACK",
            Self::Hispanic => "HISPANIC",
            Self::Asian => "ASIAN",
            Self::NativeAmerican => "NATIVE AMERICAN",
            Self::Other => "OTHER",
        }
    }
}

/// Yes/No columns of a violation record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoolFlag {
    Belts,
    PersonalInjury,
    PropertyDamage,
    ContributedToAccident,
    Alcohol,
    CommercialVehicle,
    WorkZone,
}

impl BoolFlag {
    pub const ALL: [BoolFlag; 7] = [
        BoolFlag::Belts,
        BoolFlag::PersonalInjury,
        BoolFlag::PropertyDamage,
        BoolFlag::ContributedToAccident,
        BoolFlag::Alcohol,
        BoolFlag::CommercialVehicle,
        BoolFlag::WorkZone,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "belts" | "belt" => Some(Self::Belts),
            "personal_injury" => Some(Self::PersonalInjury),
            "property_damage" => Some(Self::PropertyDamage),
            "contributed_to_accident" | "accident" => Some(Self::ContributedToAccident),
            "alcohol" => Some(Self::Alcohol),
            "commercial_vehicle" => Some(Self::CommercialVehicle),
            "work_zone" => Some(Self::WorkZone),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Belts => "belts",
            Self::PersonalInjury => "personal_injury",
            Self::PropertyDamage => "property_damage",
            Self::ContributedToAccident => "contributed_to_accident",
            Self::Alcohol => "alcohol",
            Self::CommercialVehicle => "commercial_vehicle",
            Self::WorkZone => "work_zone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub latitude: f64,
    pub longitude: f64,
}

/// One traffic-violation event.
///
/// `belts` is `true` when the driver was flagged for *not* wearing a belt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub record_id: String,
    pub timestamp: NaiveDateTime,
    pub city: String,
    pub coordinates: Option<Coordinates>,
    pub description: String,
    pub violation_type: ViolationType,
    pub charge: String,
    pub belts: bool,
    pub personal_injury: bool,
    pub property_damage: bool,
    pub contributed_to_accident: bool,
    pub alcohol: bool,
    pub commercial_vehicle: bool,
    pub work_zone: bool,
    pub gender: Gender,
    pub race: Race,
    pub vehicle_type: String,
    pub vehicle_year: Option<i32>,
    pub make: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("latitude out of range")]
    LatitudeOutOfRange,
    #[error("longitude out of range")]
    LongitudeOutOfRange,
    #[error("timestamp {0} outside analysis window")]
    OutsideWindow(NaiveDateTime),
    #[error("empty description")]
    EmptyDescription,
}

impl ViolationRecord {
    pub fn validate(&self, window: &AnalysisWindow) -> Result<(), RecordError> {
        if let Some(c) = self.coordinates {
            if !(-90.0..=90.0).contains(&c.latitude) {
                return Err(RecordError::LatitudeOutOfRange);
            }
            if !(-180.0..=180.0).contains(&c.longitude) {
                return Err(RecordError::LongitudeOutOfRange);
            }
        }
        if !window.contains(self.timestamp) {
            return Err(RecordError::OutsideWindow(self.timestamp));
        }
        if self.description.trim().is_empty() {
            return Err(RecordError::EmptyDescription);
        }
        Ok(())
    }

    pub fn flag(&self, flag: BoolFlag) -> bool {
        match flag {
            BoolFlag::Belts => self.belts,
            BoolFlag::PersonalInjury => self.personal_injury,
            BoolFlag::PropertyDamage => self.property_damage,
            BoolFlag::ContributedToAccident => self.contributed_to_accident,
            BoolFlag::Alcohol => self.alcohol,
            BoolFlag::CommercialVehicle => self.commercial_vehicle,
            BoolFlag::WorkZone => self.work_zone,
        }
    }

    pub fn city_key(&self) -> String {
        city_key(&self.city)
    }

    pub fn location_key(&self, precision: u8) -> Option<LocationKey> {
        self.coordinates
            .map(|c| LocationKey::new(c.latitude, c.longitude, precision))
    }

    /// Description in the canonical form used as a ranking key.
    pub fn normalized_description(&self) -> String {
        text::normalize_description(&self.description)
    }

    /// Vehicle type with any leading `NN - ` source code removed.
    pub fn vehicle_label(&self) -> &str {
        text::strip_code_prefix(&self.vehicle_type)
    }

    pub fn hour(&self) -> u32 {
        self.timestamp.hour()
    }

    /// Month of the event, 1..=12.
    pub fn month(&self) -> u32 {
        self.timestamp.month()
    }
}

/// Case-folded, whitespace-normalized city key.
pub fn city_key(raw: &str) -> String {
    text::collapse_whitespace(raw).to_lowercase()
}

/// Inclusive calendar-date window that accepted records must fall in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl AnalysisWindow {
    pub fn for_year(year: i32) -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year"),
            end: NaiveDate::from_ymd_opt(year, 12, 31).expect("valid year"),
        }
    }

    pub fn contains(&self, ts: NaiveDateTime) -> bool {
        let d = ts.date();
        d >= self.start && d <= self.end
    }
}

impl Default for AnalysisWindow {
    fn default() -> Self {
        Self::for_year(DEFAULT_YEAR)
    }
}

/// A coordinate pair rounded to a fixed number of decimal places and stored
/// as scaled integers, so equal cells compare equal exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocationKey {
    lat_scaled: i64,
    lon_scaled: i64,
    precision: u8,
}

impl LocationKey {
    /// Rounds half away from zero at `precision` decimal places.
    pub fn new(latitude: f64, longitude: f64, precision: u8) -> Self {
        let scale = pow10(precision);
        Self {
            lat_scaled: libm::round(latitude * scale) as i64,
            lon_scaled: libm::round(longitude * scale) as i64,
            precision,
        }
    }

    pub fn precision(&self) -> u8 {
        self.precision
    }

    pub fn latitude(&self) -> f64 {
        self.lat_scaled as f64 / pow10(self.precision)
    }

    pub fn longitude(&self) -> f64 {
        self.lon_scaled as f64 / pow10(self.precision)
    }

    /// Symbolic constant for the knowledge base, e.g. `loc_38_9845_m77_0943`.
    pub fn symbol(&self) -> String {
        let lat = fixed(self.lat_scaled, self.precision).replace('-', "m").replace('.', "_");
        let lon = fixed(self.lon_scaled, self.precision).replace('-', "m").replace('.', "_");
        alloc::format!("loc_{lat}_{lon}")
    }

    pub fn latitude_str(&self) -> String {
        fixed(self.lat_scaled, self.precision)
    }

    pub fn longitude_str(&self) -> String {
        fixed(self.lon_scaled, self.precision)
    }
}

impl fmt::Display for LocationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.latitude_str(), self.longitude_str())
    }
}

fn pow10(p: u8) -> f64 {
    libm::pow(10.0, p as f64)
}

fn fixed(scaled: i64, precision: u8) -> String {
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.unsigned_abs();
    if precision == 0 {
        return alloc::format!("{sign}{abs}");
    }
    let div = 10u64.pow(precision as u32);
    alloc::format!(
        "{sign}{}.{:0width$}",
        abs / div,
        abs % div,
        width = precision as usize
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherDay {
    pub date: NaiveDate,
    pub sunrise: NaiveTime,
    pub sunset: NaiveTime,
    pub mean_temp: Option<f64>,
    pub precipitation: Option<f64>,
}

impl WeatherDay {
    pub fn validate(&self) -> Result<(), WeatherError> {
        if self.sunrise >= self.sunset {
            return Err(WeatherError::SunriseNotBeforeSunset(self.date));
        }
        Ok(())
    }

    pub fn daylight_minutes(&self) -> i64 {
        (self.sunset - self.sunrise).num_minutes()
    }

    /// Hours between sunset and the next sunrise, taken as 24h minus daylight.
    pub fn night_hours(&self) -> f64 {
        24.0 - self.daylight_minutes() as f64 / 60.0
    }

    /// Strictly after sunset or strictly before sunrise.
    pub fn is_night(&self, t: NaiveTime) -> bool {
        t > self.sunset || t < self.sunrise
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeatherError {
    #[error("sunrise is not before sunset on {0}")]
    SunriseNotBeforeSunset(NaiveDate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityCensus {
    pub city: String,
    pub population: u64,
    pub density: f64,
    pub education_pct: f64,
    pub median_income: f64,
    pub poverty_pct: f64,
    pub age_band_pct: f64,
    pub land_area: f64,
    pub water_area: f64,
    pub schools: u32,
    pub hospitals: u32,
    pub main_road: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CensusError {
    #[error("population must be positive")]
    NegativePopulation,
    #[error("{field} = {value} is not a percent in [0, 100]")]
    PercentOutOfRange { field: &'static str, value: f64 },
    #[error("{field} must be non-negative")]
    NegativeArea { field: &'static str },
}

impl CityCensus {
    pub fn validate(&self) -> Result<(), CensusError> {
        if self.population == 0 {
            return Err(CensusError::NegativePopulation);
        }
        for (field, value) in [
            ("education_pct", self.education_pct),
            ("poverty_pct", self.poverty_pct),
            ("age_band_pct", self.age_band_pct),
        ] {
            if !(0.0..=100.0).contains(&value) {
                return Err(CensusError::PercentOutOfRange { field, value });
            }
        }
        for (field, value) in [
            ("density", self.density),
            ("land_area", self.land_area),
            ("water_area", self.water_area),
        ] {
            if value < 0.0 || value.is_nan() {
                return Err(CensusError::NegativeArea { field });
            }
        }
        Ok(())
    }

    pub fn key(&self) -> String {
        city_key(&self.city)
    }
}

/// User-supplied context label for a rounded location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextLabel {
    Intersection,
    CommunityArea,
    GreenArea,
    MainRoad,
    AthleticCenter,
    ShoppingArea,
    Other,
}

impl ContextLabel {
    pub const ALL: [ContextLabel; 7] = [
        ContextLabel::Intersection,
        ContextLabel::CommunityArea,
        ContextLabel::GreenArea,
        ContextLabel::MainRoad,
        ContextLabel::AthleticCenter,
        ContextLabel::ShoppingArea,
        ContextLabel::Other,
    ];

    pub fn parse(raw: &str) -> Option<Self> {
        let t = raw.trim();
        Self::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(t))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Intersection => "intersection",
            Self::CommunityArea => "community_area",
            Self::GreenArea => "green_area",
            Self::MainRoad => "main_road",
            Self::AthleticCenter => "athletic_center",
            Self::ShoppingArea => "shopping_area",
            Self::Other => "other",
        }
    }

    /// Constant used in knowledge-base facts. Area labels are plural
    /// (`community_areas`) to match the rule vocabulary.
    pub fn kb_constant(self) -> &'static str {
        match self {
            Self::CommunityArea => "community_areas",
            Self::GreenArea => "green_areas",
            Self::ShoppingArea => "shopping_areas",
            other => other.as_str(),
        }
    }
}

impl fmt::Display for ContextLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextAnnotation {
    pub location_key: LocationKey,
    pub context_label: ContextLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

/// Accepted/rejected tallies for one input file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileReport {
    pub accepted: u64,
    pub rejected: u64,
    pub warnings: u64,
    pub rejections: Vec<Rejection>,
}

impl FileReport {
    pub fn total(&self) -> u64 {
        self.accepted + self.rejected
    }

    pub fn reject(&mut self, line: u64, reason: impl ToString) {
        self.rejected += 1;
        self.rejections.push(Rejection {
            line,
            reason: reason.to_string(),
        });
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub files: BTreeMap<String, FileReport>,
}

/// Everything the analytics and fact compilation read. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub violations: Vec<ViolationRecord>,
    pub weather: BTreeMap<NaiveDate, WeatherDay>,
    pub census: BTreeMap<String, CityCensus>,
    pub annotations: BTreeMap<LocationKey, ContextLabel>,
    pub parse_report: ParseReport,
}

impl Dataset {
    pub fn census_for(&self, city: &str) -> Option<&CityCensus> {
        self.census.get(&city_key(city))
    }

    pub fn records_in_city<'a>(&'a self, city: &str) -> impl Iterator<Item = &'a ViolationRecord> {
        let key = city_key(city);
        self.violations.iter().filter(move |r| r.city_key() == key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_annotation_coordinates() {
        let key = LocationKey::new(38.98451, -77.09432, 4);
        assert_eq!(key.latitude_str(), "38.9845");
        assert_eq!(key.longitude_str(), "-77.0943");
        assert_eq!(key.symbol(), "loc_38_9845_m77_0943");
    }

    #[test]
    fn nearby_points_share_a_cell() {
        assert_eq!(
            LocationKey::new(39.00001, -77.00002, 4),
            LocationKey::new(39.00004, -76.99996, 4)
        );
    }

    #[test]
    fn daylight_arithmetic() {
        let day = WeatherDay {
            date: NaiveDate::from_ymd_opt(2017, 6, 21).unwrap(),
            sunrise: NaiveTime::from_hms_opt(5, 43, 0).unwrap(),
            sunset: NaiveTime::from_hms_opt(20, 36, 0).unwrap(),
            mean_temp: None,
            precipitation: None,
        };
        assert_eq!(day.daylight_minutes(), 14 * 60 + 53);
        assert!(day.validate().is_ok());
    }

    #[test]
    fn inverted_sun_times_rejected() {
        let day = WeatherDay {
            date: NaiveDate::from_ymd_opt(2017, 1, 1).unwrap(),
            sunrise: NaiveTime::from_hms_opt(7, 0, 0).unwrap(),
            sunset: NaiveTime::from_hms_opt(4, 0, 0).unwrap(),
            mean_temp: None,
            precipitation: None,
        };
        assert!(matches!(
            day.validate(),
            Err(WeatherError::SunriseNotBeforeSunset(_))
        ));
    }

    #[test]
    fn label_parsing() {
        assert_eq!(
            ContextLabel::parse("athletic_center"),
            Some(ContextLabel::AthleticCenter)
        );
        assert_eq!(ContextLabel::parse("stadium"), None);
        assert_eq!(ContextLabel::CommunityArea.kb_constant(), "community_areas");
    }

    #[test]
    fn race_accepts_source_spelling() {
        assert_eq!(Race::parse("NATIVE AMERICAN"), Some(Race::NativeAmerican));
        assert_eq!(Race::parse("Hispanic"), Some(Race::Hispanic));
    }
}
