//! Pipeline configuration: defaults, a `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveTime;
use thiserror::Error;
use traffic_ilp_core::analytics::{Category, CategoryMap, NightWindow, ProfileConfig, DEFAULT_HOTSPOT_THRESHOLD};
use traffic_ilp_core::ilp::LearnConfig;
use traffic_ilp_core::kb::{BandSpecs, DiscretizationSpec, SpecError};
use traffic_ilp_core::model::{AnalysisWindow, ViolationRecord, DEFAULT_PRECISION, DEFAULT_YEAR};

use crate::ingest::ColumnMapping;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("band `{0}` needs both cuts and names")]
    IncompleteBand(String),
    #[error(transparent)]
    Band(#[from] SpecError),
}

/// Which records the analyses and event facts cover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Scope {
    #[default]
    All,
    Category1,
    Category2,
    /// One violation description, matched after normalization.
    Event(String),
}

impl Scope {
    pub fn admits(&self, r: &ViolationRecord, map: &CategoryMap) -> bool {
        match self {
            Scope::All => true,
            Scope::Category1 => map.categorize(&r.description) == Category::Category1,
            Scope::Category2 => map.categorize(&r.description) == Category::Category2,
            Scope::Event(d) => r.normalized_description().eq_ignore_ascii_case(&traffic_ilp_core::text::normalize_description(d)),
        }
    }
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "all" => Ok(Scope::All),
            "category1" => Ok(Scope::Category1),
            "category2" => Ok(Scope::Category2),
            other => match other.strip_prefix("event:") {
                Some(d) if !d.trim().is_empty() => Ok(Scope::Event(d.trim().to_string())),
                _ => Err(format!("unknown scope `{other}` (all, category1, category2, event:<description>)")),
            },
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Category1 => f.write_str("category1"),
            Scope::Category2 => f.write_str("category2"),
            Scope::Event(d) => write!(f, "event:{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub violations: Option<PathBuf>,
    pub weather: Option<PathBuf>,
    pub census: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub out: PathBuf,
    pub year: i32,
    pub precision: u8,
    pub hotspot_threshold: u64,
    pub night_fallback: NightWindow,
    pub bands: BandSpecs,
    pub learn: LearnConfig,
    /// City names whose events are compiled and learned; empty means every
    /// city with a census row.
    pub cities: Vec<String>,
    pub scope: Scope,
    pub strict: bool,
    pub mapping: ColumnMapping,
    /// Denominator of the county-wide per-capita ratio.
    pub county_population: u64,
    pub target: Option<String>,
    pub rules: Option<String>,
    pub facts: Option<PathBuf>,
    pub negatives: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            violations: None,
            weather: None,
            census: None,
            annotations: None,
            out: PathBuf::from("out"),
            year: DEFAULT_YEAR,
            precision: DEFAULT_PRECISION,
            hotspot_threshold: DEFAULT_HOTSPOT_THRESHOLD,
            night_fallback: NightWindow::default(),
            bands: BandSpecs::default(),
            learn: LearnConfig::default(),
            cities: Vec::new(),
            scope: Scope::All,
            strict: false,
            mapping: ColumnMapping::default(),
            county_population: 1_000_000,
            target: None,
            rules: None,
            facts: None,
            negatives: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
    })
}

fn parse_time(key: &str, value: &str) -> Result<NaiveTime, ConfigError> {
    NaiveTime::parse_from_str(value, "%H:%M").map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
    })
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Default)]
struct BandOverride {
    cuts: Option<Vec<f64>>,
    names: Option<Vec<String>>,
}

impl PipelineConfig {
    pub fn window(&self) -> AnalysisWindow {
        AnalysisWindow::for_year(self.year)
    }

    pub fn profile_config(&self) -> ProfileConfig {
        ProfileConfig {
            analysis_year: self.year,
            precision: self.precision,
            hotspot_threshold: self.hotspot_threshold,
            night_fallback: self.night_fallback,
        }
    }

    /// Applies a config file on top of the current values. Relative paths
    /// in the file are taken relative to the file's directory.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        self.apply_str(&text, base)
    }

    pub fn apply_str(&mut self, text: &str, base: &Path) -> Result<(), ConfigError> {
        let mut bands: Vec<(String, BandOverride)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            let path = || Some(base.join(value));
            match key {
                "violations" => self.violations = path(),
                "weather" => self.weather = path(),
                "census" => self.census = path(),
                "annotations" => self.annotations = path(),
                "out" => self.out = base.join(value),
                "facts" => self.facts = path(),
                "negatives" => self.negatives = path(),
                "year" => self.year = parse(key, value)?,
                "precision" => self.precision = parse(key, value)?,
                "hotspot_threshold" => self.hotspot_threshold = parse(key, value)?,
                "night_start" => self.night_fallback.start = parse_time(key, value)?,
                "night_end" => self.night_fallback.end = parse_time(key, value)?,
                "cities" => self.cities = list(value),
                "scope" => {
                    self.scope = value.parse().map_err(|_| ConfigError::InvalidValue {
                        key: key.into(),
                        value: value.into(),
                    })?
                }
                "strict" => self.strict = parse(key, value)?,
                "county_population" => self.county_population = parse(key, value)?,
                "target" => self.target = Some(value.to_string()),
                "rules" => {
                    self.rules = Some(if value == "builtin" {
                        value.to_string()
                    } else {
                        base.join(value).to_string_lossy().into_owned()
                    })
                }
                "learn.max_body_literals" => self.learn.max_body_literals = parse(key, value)?,
                "learn.min_coverage" => self.learn.min_coverage = parse(key, value)?,
                "learn.min_precision" => self.learn.min_precision = parse(key, value)?,
                "learn.beam_width" => self.learn.beam_width = parse(key, value)?,
                "learn.constant_pool_limit" => {
                    self.learn.constant_pool_limit = match value {
                        "all" | "" => None,
                        v => Some(parse(key, v)?),
                    }
                }
                k => {
                    if let Some(field) = k.strip_prefix("column.") {
                        if !self.mapping.set(field, value) {
                            return Err(ConfigError::UnknownKey { line, key: k.into() });
                        }
                    } else if let Some(rest) = k.strip_prefix("band.") {
                        let (name, part) = rest
                            .rsplit_once('.')
                            .ok_or_else(|| ConfigError::UnknownKey { line, key: k.into() })?;
                        let idx = match bands.iter().position(|(n, _)| n == name) {
                            Some(i) => i,
                            None => {
                                bands.push((name.to_string(), BandOverride::default()));
                                bands.len() - 1
                            }
                        };
                        let entry = &mut bands[idx].1;
                        match part {
                            "cuts" => {
                                entry.cuts = Some(
                                    list(value)
                                        .iter()
                                        .map(|c| parse::<f64>(k, c))
                                        .collect::<Result<_, _>>()?,
                                )
                            }
                            "names" => entry.names = Some(list(value)),
                            _ => return Err(ConfigError::UnknownKey { line, key: k.into() }),
                        }
                    } else {
                        return Err(ConfigError::UnknownKey { line, key: k.into() });
                    }
                }
            }
        }
        for (name, o) in bands {
            let (Some(cuts), Some(names)) = (o.cuts, o.names) else {
                return Err(ConfigError::IncompleteBand(name));
            };
            let slot = match name.as_str() {
                "occurrence" => &mut self.bands.occurrence,
                "income" => &mut self.bands.income,
                "education" => &mut self.bands.education,
                "poverty" => &mut self.bands.poverty,
                "density" => &mut self.bands.density,
                "vehicle_year" => &mut self.bands.vehicle_year,
                "past_event_probability" => &mut self.bands.past_event_probability,
                _ => {
                    return Err(ConfigError::InvalidValue {
                        key: format!("band.{name}"),
                        value: name,
                    })
                }
            };
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            *slot = DiscretizationSpec::new(slot.quantity(), &cuts, &refs)?;
        }
        Ok(())
    }

    /// Checks the invariants that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, value: String| ConfigError::InvalidValue { key: key.into(), value };
        if !(1000..=9999).contains(&self.year) {
            return Err(invalid("year", self.year.to_string()));
        }
        if self.precision > 9 {
            return Err(invalid("precision", self.precision.to_string()));
        }
        if self.hotspot_threshold == 0 {
            return Err(invalid("hotspot_threshold", "0".into()));
        }
        if self.county_population == 0 {
            return Err(invalid("county_population", "0".into()));
        }
        self.learn
            .validate()
            .map_err(|e| invalid("learn", e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_override_defaults() {
        let mut c = PipelineConfig::default();
        c.apply_str(
            "# comment\nyear = 2016\nprecision=3\nviolations = data/v.csv\nlearn.min_precision = 1.0\ncolumn.city = City\nscope = category2\nband.density.cuts = 1000, 3000\nband.density.names = low, mid, high\n",
            Path::new("/base"),
        )
        .unwrap();
        assert_eq!(c.year, 2016);
        assert_eq!(c.precision, 3);
        assert_eq!(c.violations, Some(PathBuf::from("/base/data/v.csv")));
        assert_eq!(c.learn.min_precision, 1.0);
        assert_eq!(c.mapping.header("city"), "City");
        assert_eq!(c.scope, Scope::Category2);
        assert_eq!(c.bands.density.band_names(), ["low", "mid", "high"]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn bad_lines() {
        let mut c = PipelineConfig::default();
        assert!(matches!(c.apply_str("nonsense", Path::new("")), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(c.apply_str("colour = red", Path::new("")), Err(ConfigError::UnknownKey { .. })));
        assert!(matches!(c.apply_str("year = soon", Path::new("")), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(c.apply_str("band.income.cuts = 1", Path::new("")), Err(ConfigError::IncompleteBand(_))));
    }

    #[test]
    fn scope_round_trip() {
        for s in ["all", "category1", "category2", "event:Failure to obey stop light signal"] {
            assert_eq!(s.parse::<Scope>().unwrap().to_string(), s);
        }
        assert!("event:".parse::<Scope>().is_err());
    }
}
