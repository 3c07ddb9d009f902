//! CSV parsers for the violation, weather, census and annotation files.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use csv::{ReaderBuilder, StringRecord, WriterBuilder};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use traffic_ilp_core::model::{
    AnalysisWindow, CensusError, CityCensus, ContextLabel, Coordinates, FileReport, Gender, LocationKey, Race,
    ViolationRecord, ViolationType,
};

/// Rejections kept verbatim per file; the tally past this is still exact.
pub const MAX_LOGGED_REJECTIONS: usize = 1000;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{file}: {source}")]
    Csv { file: String, source: csv::Error },
    #[error("{file}: header lacks required column `{column}`")]
    MissingColumn { file: String, column: String },
    #[error("{file}:{line}: {reason}")]
    ParseAbort { file: String, line: u64, reason: String },
    #[error("{0}: no data rows")]
    EmptyInput(String),
    #[error("weather:{line}: duplicate date {date}")]
    DuplicateDate { line: u64, date: NaiveDate },
    #[error("weather:{line}: malformed time `{value}`")]
    MalformedTime { line: u64, value: String },
    #[error("weather:{line}: malformed date `{value}`")]
    MalformedDate { line: u64, value: String },
    #[error("weather:{line}: sunrise is not before sunset")]
    SunriseAfterSunset { line: u64 },
    #[error("census:{line}: duplicate city `{city}`")]
    DuplicateCity { line: u64, city: String },
    #[error("census:{line}: population must be positive")]
    NegativePopulation { line: u64 },
    #[error("census:{line}: {field} = {value} is not a percent in [0, 100]")]
    PercentOutOfRange { line: u64, field: &'static str, value: f64 },
    #[error("census:{line}: {source}")]
    Census { line: u64, source: CensusError },
    #[error("annotations:{line}: unknown label `{label}`")]
    UnknownLabel { line: u64, label: String },
    #[error("annotations:{line}: malformed coordinate `{value}`")]
    MalformedCoordinate { line: u64, value: String },
    #[error("{file}:{line}: malformed number `{value}` in `{column}`")]
    MalformedNumber { file: String, line: u64, column: String, value: String },
}

/// Logical field to CSV header. Fields marked required must be present in
/// the header; the others default when absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub columns: BTreeMap<String, String>,
}

/// (logical name, default header, required)
pub const VIOLATION_FIELDS: [(&str, &str, bool); 22] = [
    ("record_id", "SeqID", false),
    ("date", "Date Of Stop", true),
    ("time", "Time Of Stop", true),
    ("description", "Description", true),
    ("type", "Violation Type", true),
    ("charge", "Charge", false),
    ("latitude", "Latitude", true),
    ("longitude", "Longitude", true),
    ("belts", "Belts", false),
    ("personal_injury", "Personal Injury", false),
    ("property_damage", "Property Damage", false),
    ("accident", "Contributed To Accident", false),
    ("alcohol", "Alcohol", false),
    ("commercial_vehicle", "Commercial Vehicle", false),
    ("work_zone", "Work Zone", false),
    ("gender", "Gender", false),
    ("race", "Race", false),
    ("vehicle_type", "VehicleType", false),
    ("year", "Year", false),
    ("make", "Make", false),
    ("color", "Color", false),
    ("city", "Driver City", true),
];

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            columns: VIOLATION_FIELDS
                .iter()
                .map(|(k, h, _)| (k.to_string(), h.to_string()))
                .collect(),
        }
    }
}

impl ColumnMapping {
    /// Points `logical` at `header`. Returns false for an unknown logical
    /// field.
    pub fn set(&mut self, logical: &str, header: &str) -> bool {
        if VIOLATION_FIELDS.iter().any(|(k, _, _)| *k == logical) {
            self.columns.insert(logical.to_string(), header.to_string());
            true
        } else {
            false
        }
    }

    pub fn header(&self, logical: &str) -> &str {
        &self.columns[logical]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationOptions {
    pub mapping: ColumnMapping,
    pub strict: bool,
    pub window: AnalysisWindow,
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(raw, "%m/%d/%Y"))
        .ok()
}

fn parse_time(raw: &str) -> Option<NaiveTime> {
    let raw = raw.trim();
    NaiveTime::parse_from_str(raw, "%H:%M:%S")
        .or_else(|_| NaiveTime::parse_from_str(raw, "%H:%M"))
        .ok()
}

fn parse_yes_no(raw: &str) -> Option<bool> {
    let v = raw.trim();
    if v.eq_ignore_ascii_case("yes") {
        Some(true)
    } else if v.eq_ignore_ascii_case("no") {
        Some(false)
    } else {
        None
    }
}

struct Columns {
    index: BTreeMap<&'static str, usize>,
}

fn build_record(
    row: &StringRecord,
    cols: &Columns,
    line: u64,
    window: &AnalysisWindow,
    warnings: &mut u64,
) -> Result<ViolationRecord, String> {
    let field = |name: &str| -> Result<&str, String> {
        match cols.index.get(name) {
            Some(&i) => row.get(i).ok_or_else(|| format!("missing field `{name}`")),
            None => Ok(""),
        }
    };
    let date = parse_date(field("date")?).ok_or_else(|| format!("malformed date `{}`", field("date").unwrap()))?;
    let time = parse_time(field("time")?).ok_or_else(|| format!("malformed time `{}`", field("time").unwrap()))?;
    let coord = |name: &str| -> Result<Option<f64>, String> {
        let v = field(name)?.trim();
        if v.is_empty() {
            return Ok(None);
        }
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| format!("malformed {name} `{v}`"))
    };
    let coordinates = match (coord("latitude")?, coord("longitude")?) {
        (Some(latitude), Some(longitude)) => Some(Coordinates { latitude, longitude }),
        (None, None) => None,
        _ => return Err("latitude and longitude must both be present or both absent".into()),
    };
    let violation_type = ViolationType::parse(field("type")?)
        .ok_or_else(|| format!("unknown violation type `{}`", field("type").unwrap()))?;
    let flag = |name: &str| -> Result<bool, String> {
        if !cols.index.contains_key(name) {
            return Ok(false);
        }
        let v = field(name)?;
        parse_yes_no(v).ok_or_else(|| format!("`{name}` must be Yes or No, found `{v}`"))
    };
    let gender = match field("gender")?.trim() {
        "" => Gender::U,
        g => Gender::parse(g).ok_or_else(|| format!("unknown gender `{g}`"))?,
    };
    let race = match field("race")?.trim() {
        "" => Race::Other,
        r => Race::parse(r).ok_or_else(|| format!("unknown race `{r}`"))?,
    };
    let vehicle_year = match field("year")?.trim() {
        "" => None,
        y => match y.parse::<i32>() {
            Ok(0) => None,
            Ok(y) => Some(y),
            Err(_) => {
                *warnings += 1;
                None
            }
        },
    };
    let record_id = match field("record_id")?.trim() {
        "" => format!("row-{line}"),
        id => id.to_string(),
    };
    let record = ViolationRecord {
        record_id,
        timestamp: NaiveDateTime::new(date, time),
        city: field("city")?.trim().to_string(),
        coordinates,
        description: field("description")?.to_string(),
        violation_type,
        charge: field("charge")?.trim().to_string(),
        belts: flag("belts")?,
        personal_injury: flag("personal_injury")?,
        property_damage: flag("property_damage")?,
        contributed_to_accident: flag("accident")?,
        alcohol: flag("alcohol")?,
        commercial_vehicle: flag("commercial_vehicle")?,
        work_zone: flag("work_zone")?,
        gender,
        race,
        vehicle_type: field("vehicle_type")?.trim().to_string(),
        vehicle_year,
        make: field("make")?.trim().to_string(),
        color: field("color")?.trim().to_string(),
    };
    record.validate(window).map_err(|e| e.to_string())?;
    Ok(record)
}

fn note_rejection(report: &mut FileReport, line: u64, reason: String) {
    if report.rejections.len() < MAX_LOGGED_REJECTIONS {
        report.reject(line, reason);
    } else {
        report.rejected += 1;
    }
}

/// Parses the violations file. In lenient mode bad rows are tallied in the
/// report; in strict mode the first one aborts.
pub fn parse_violations_csv<R: Read>(
    source: R,
    options: &ViolationOptions,
) -> Result<(Vec<ViolationRecord>, FileReport), IngestError> {
    const FILE: &str = "violations";
    let mut reader = ReaderBuilder::new().flexible(true).from_reader(source);
    let headers = reader
        .headers()
        .map_err(|source| IngestError::Csv { file: FILE.into(), source })?
        .clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(IngestError::EmptyInput(FILE.into()));
    }
    let mut index = BTreeMap::new();
    for (logical, _, required) in VIOLATION_FIELDS {
        let header = options.mapping.header(logical);
        match headers.iter().position(|h| h.trim() == header) {
            Some(i) => {
                index.insert(logical, i);
            }
            None if required => {
                return Err(IngestError::MissingColumn {
                    file: FILE.into(),
                    column: header.to_string(),
                })
            }
            None => {}
        }
    }
    let cols = Columns { index };
    let mut report = FileReport::default();
    let mut records = Vec::new();
    let mut row = StringRecord::new();
    let mut line = 1u64;
    loop {
        let outcome = match reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                line = row.position().map_or(line + 1, |p| p.line());
                build_record(&row, &cols, line, &options.window, &mut report.warnings)
            }
            Err(e) => {
                line = e.position().map_or(line + 1, |p| p.line());
                Err(e.to_string())
            }
        };
        match outcome {
            Ok(r) => {
                report.accepted += 1;
                records.push(r);
            }
            Err(reason) if options.strict => {
                return Err(IngestError::ParseAbort {
                    file: FILE.into(),
                    line,
                    reason,
                })
            }
            Err(reason) => note_rejection(&mut report, line, reason),
        }
    }
    if report.total() == 0 {
        return Err(IngestError::EmptyInput(FILE.into()));
    }
    Ok((records, report))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

/// Writes records with the mapping's headers in a form
/// [`parse_violations_csv`] reads back to the same records.
pub fn write_violations_csv<W: Write>(sink: W, records: &[ViolationRecord], mapping: &ColumnMapping) -> csv::Result<()> {
    let mut w = WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(VIOLATION_FIELDS.iter().map(|(k, _, _)| mapping.header(k)))?;
    for r in records {
        let (lat, lon) = match r.coordinates {
            Some(c) => (c.latitude.to_string(), c.longitude.to_string()),
            None => (String::new(), String::new()),
        };
        let fields: [String; 22] = [
            r.record_id.clone(),
            r.timestamp.date().format("%Y-%m-%d").to_string(),
            r.timestamp.time().format("%H:%M:%S").to_string(),
            r.description.clone(),
            r.violation_type.as_str().to_string(),
            r.charge.clone(),
            lat,
            lon,
            yes_no(r.belts).into(),
            yes_no(r.personal_injury).into(),
            yes_no(r.property_damage).into(),
            yes_no(r.contributed_to_accident).into(),
            yes_no(r.alcohol).into(),
            yes_no(r.commercial_vehicle).into(),
            yes_no(r.work_zone).into(),
            r.gender.as_str().into(),
            r.race.as_str().into(),
            r.vehicle_type.clone(),
            r.vehicle_year.map(|y| y.to_string()).unwrap_or_default(),
            r.make.clone(),
            r.color.clone(),
            r.city.clone(),
        ];
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

fn named_columns(headers: &StringRecord, file: &str, required: &[&str]) -> Result<BTreeMap<String, usize>, IngestError> {
    let index: BTreeMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
        .collect();
    for c in required {
        if !index.contains_key(*c) {
            return Err(IngestError::MissingColumn {
                file: file.into(),
                column: c.to_string(),
            });
        }
    }
    Ok(index)
}

fn cell<'r>(row: &'r StringRecord, cols: &BTreeMap<String, usize>, name: &str) -> &'r str {
    cols.get(name).and_then(|&i| row.get(i)).unwrap_or("").trim()
}

fn rows<R: Read>(source: R, file: &str) -> Result<(StringRecord, Vec<(u64, StringRecord)>), IngestError> {
    let csv_err = |source| IngestError::Csv { file: file.into(), source };
    let mut reader = ReaderBuilder::new().flexible(true).from_reader(source);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut out = Vec::new();
    for r in reader.records() {
        let r = r.map_err(csv_err)?;
        let line = r.position().map_or(0, |p| p.line());
        out.push((line, r));
    }
    if out.is_empty() {
        return Err(IngestError::EmptyInput(file.into()));
    }
    Ok((headers, out))
}

fn optional_number(raw: &str, file: &str, line: u64, column: &str) -> Result<Option<f64>, IngestError> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>().map(Some).map_err(|_| IngestError::MalformedNumber {
        file: file.into(),
        line,
        column: column.into(),
        value: raw.into(),
    })
}

/// `date,sunrise,sunset,mean_temp,precipitation`; the last two may be empty.
pub fn parse_weather_csv<R: Read>(source: R) -> Result<BTreeMap<NaiveDate, traffic_ilp_core::model::WeatherDay>, IngestError> {
    const FILE: &str = "weather";
    let (headers, data) = rows(source, FILE)?;
    let cols = named_columns(&headers, FILE, &["date", "sunrise", "sunset"])?;
    let mut out = BTreeMap::new();
    for (line, row) in data {
        let raw_date = cell(&row, &cols, "date");
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| IngestError::MalformedDate {
            line,
            value: raw_date.into(),
        })?;
        let time = |name: &str| {
            let v = cell(&row, &cols, name);
            NaiveTime::parse_from_str(v, "%H:%M").map_err(|_| IngestError::MalformedTime { line, value: v.into() })
        };
        let day = traffic_ilp_core::model::WeatherDay {
            date,
            sunrise: time("sunrise")?,
            sunset: time("sunset")?,
            mean_temp: optional_number(cell(&row, &cols, "mean_temp"), FILE, line, "mean_temp")?,
            precipitation: optional_number(cell(&row, &cols, "precipitation"), FILE, line, "precipitation")?,
        };
        day.validate().map_err(|_| IngestError::SunriseAfterSunset { line })?;
        if out.insert(date, day).is_some() {
            return Err(IngestError::DuplicateDate { line, date });
        }
    }
    Ok(out)
}

pub const CENSUS_FIELDS: [&str; 12] = [
    "city",
    "population",
    "density",
    "education_pct",
    "median_income",
    "poverty_pct",
    "age_band_pct",
    "land_area",
    "water_area",
    "schools",
    "hospitals",
    "main_road",
];

/// One row per city, keyed by the case-folded city name.
pub fn parse_census_csv<R: Read>(source: R) -> Result<BTreeMap<String, CityCensus>, IngestError> {
    const FILE: &str = "census";
    let (headers, data) = rows(source, FILE)?;
    let cols = named_columns(&headers, FILE, &CENSUS_FIELDS)?;
    let mut out = BTreeMap::new();
    for (line, row) in data {
        let num = |name: &str| -> Result<f64, IngestError> {
            let v = cell(&row, &cols, name);
            v.parse::<f64>().map_err(|_| IngestError::MalformedNumber {
                file: FILE.into(),
                line,
                column: name.into(),
                value: v.into(),
            })
        };
        let count = |name: &str| -> Result<u32, IngestError> {
            let v = num(name)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(IngestError::MalformedNumber {
                    file: FILE.into(),
                    line,
                    column: name.into(),
                    value: cell(&row, &cols, name).into(),
                });
            }
            Ok(v as u32)
        };
        let population = num("population")?;
        if population <= 0.0 {
            return Err(IngestError::NegativePopulation { line });
        }
        let c = CityCensus {
            city: cell(&row, &cols, "city").to_string(),
            population: population as u64,
            density: num("density")?,
            education_pct: num("education_pct")?,
            median_income: num("median_income")?,
            poverty_pct: num("poverty_pct")?,
            age_band_pct: num("age_band_pct")?,
            land_area: num("land_area")?,
            water_area: num("water_area")?,
            schools: count("schools")?,
            hospitals: count("hospitals")?,
            main_road: cell(&row, &cols, "main_road").to_string(),
        };
        c.validate().map_err(|source| match source {
            CensusError::PercentOutOfRange { field, value } => IngestError::PercentOutOfRange { line, field, value },
            CensusError::NegativePopulation => IngestError::NegativePopulation { line },
            source => IngestError::Census { line, source },
        })?;
        let key = c.key();
        if out.contains_key(&key) {
            return Err(IngestError::DuplicateCity { line, city: c.city });
        }
        out.insert(key, c);
    }
    Ok(out)
}

/// Writes census rows in the layout [`parse_census_csv`] reads.
pub fn write_census_csv<W: Write>(sink: W, census: &BTreeMap<String, CityCensus>) -> csv::Result<()> {
    let mut w = WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(CENSUS_FIELDS)?;
    for c in census.values() {
        w.write_record([
            c.city.clone(),
            c.population.to_string(),
            c.density.to_string(),
            c.education_pct.to_string(),
            c.median_income.to_string(),
            c.poverty_pct.to_string(),
            c.age_band_pct.to_string(),
            c.land_area.to_string(),
            c.water_area.to_string(),
            c.schools.to_string(),
            c.hospitals.to_string(),
            c.main_road.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `latitude,longitude,label`. Rows rounding to an already-labelled cell
/// keep the first label and count as warnings.
pub fn parse_context_annotations<R: Read>(
    source: R,
    precision: u8,
) -> Result<(BTreeMap<LocationKey, ContextLabel>, FileReport), IngestError> {
    const FILE: &str = "annotations";
    let (headers, data) = rows(source, FILE)?;
    let cols = named_columns(&headers, FILE, &["latitude", "longitude", "label"])?;
    let mut out = BTreeMap::new();
    let mut report = FileReport::default();
    for (line, row) in data {
        let coord = |name: &str, bound: f64| -> Result<f64, IngestError> {
            let v = cell(&row, &cols, name);
            v.parse::<f64>()
                .ok()
                .filter(|x| x.abs() <= bound)
                .ok_or_else(|| IngestError::MalformedCoordinate { line, value: v.into() })
        };
        let lat = coord("latitude", 90.0)?;
        let lon = coord("longitude", 180.0)?;
        let raw = cell(&row, &cols, "label");
        let label = ContextLabel::parse(raw).ok_or_else(|| IngestError::UnknownLabel {
            line,
            label: raw.into(),
        })?;
        let key = LocationKey::new(lat, lon, precision);
        match out.entry(key) {
            std::collections::btree_map::Entry::Occupied(_) => report.warnings += 1,
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(label);
            }
        }
        report.accepted += 1;
    }
    Ok((out, report))
}
