use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::model::{BoolFlag, ViolationRecord};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub key: String,
    pub count: u64,
}

/// Rows sorted by count descending, ties by key ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyTable {
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let mut rows: Vec<FrequencyRow> = counts
            .into_iter()
            .map(|(key, count)| FrequencyRow { key, count })
            .collect();
        // BTreeMap iteration already yields keys ascending; a stable sort on
        // count keeps that as the tie order.
        rows.sort_by(|a, b| b.count.cmp(&a.count));
        Self { rows }
    }

    pub fn truncate(mut self, k: usize) -> Self {
        self.rows.truncate(k);
        self
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn get(&self, key: &str) -> Option<u64> {
        self.rows.iter().find(|r| r.key == key).map(|r| r.count)
    }
}

fn count_keys<I: IntoIterator<Item = String>>(keys: I) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    counts
}

/// Most frequent violation descriptions.
pub fn rank_violations<'a, I>(records: I, top_k: usize) -> Result<FrequencyTable, AnalyticsError>
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    if top_k == 0 {
        return Err(AnalyticsError::InvalidTopK);
    }
    let counts = count_keys(records.into_iter().map(|r| r.normalized_description()));
    Ok(FrequencyTable::from_counts(counts).truncate(top_k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Disrespect of road rules.
    Category1,
    /// Missing equipment or documents.
    Category2,
    Uncategorized,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Category1 => "category1",
            Category::Category2 => "category2",
            Category::Uncategorized => "uncategorized",
        }
    }
}

/// Description lists for the two violation categories. Matching is on the
/// normalized description, case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMap {
    category1: BTreeSet<String>,
    category2: BTreeSet<String>,
}

impl CategoryMap {
    pub fn new<A, B, S>(category1: A, category2: B) -> Self
    where
        A: IntoIterator<Item = S>,
        B: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let fold = |s: S| text::normalize_description(s.as_ref()).to_lowercase();
        Self {
            category1: category1.into_iter().map(fold).collect(),
            category2: category2.into_iter().map(fold).collect(),
        }
    }

    /// The ten most frequent 2017 Montgomery County violations, split into
    /// road-rule disrespect (ranks 1, 3, 7, 8, 10) and equipment/documents
    /// (ranks 2, 4, 5, 6, 9).
    pub fn top_ten() -> Self {
        Self::new(
            [
                "Driver failure to obey properly placed traffic control device instructions",
                "Driver using hands to use handheld telephone while motor vehicle is in motion",
                "Driver failure to stop at stop sign line",
                "Failure to obey stop light signal",
                "Exceeding the posted speed limit of 40 mph",
            ],
            [
                "Failure to display registration card upon demand by police officer",
                "Displaying expired registration plate issued by any state",
                "Failure of individual driving on highway to display license to uniformed police on demand",
                "Driving vehicle on highway with suspended registration",
                "Driving vehicle on highway without current registration plates and validation tabs",
            ],
        )
    }

    pub fn categorize(&self, description: &str) -> Category {
        let key = text::normalize_description(description).to_lowercase();
        if self.category1.contains(&key) {
            Category::Category1
        } else if self.category2.contains(&key) {
            Category::Category2
        } else {
            Category::Uncategorized
        }
    }

    pub fn descriptions(&self, category: Category) -> impl Iterator<Item = &str> {
        let set = match category {
            Category::Category1 => Some(&self.category1),
            Category::Category2 => Some(&self.category2),
            Category::Uncategorized => None,
        };
        set.into_iter().flat_map(|s| s.iter().map(String::as_str))
    }
}

impl Default for CategoryMap {
    fn default() -> Self {
        Self::top_ten()
    }
}

pub fn categorize_violation(description: &str, map: &CategoryMap) -> Category {
    map.categorize(description)
}

/// Counts of observed flag-value combinations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossTab {
    pub dimensions: Vec<BoolFlag>,
    pub cells: BTreeMap<Vec<bool>, u64>,
}

impl CrossTab {
    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }
}

pub fn crosstab<'a, I, S>(records: I, flags: &[S]) -> Result<CrossTab, AnalyticsError>
where
    I: IntoIterator<Item = &'a ViolationRecord>,
    S: AsRef<str>,
{
    let dimensions = flags
        .iter()
        .map(|f| {
            BoolFlag::from_name(f.as_ref())
                .ok_or_else(|| AnalyticsError::UnknownFlag(f.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut cells = BTreeMap::new();
    for r in records {
        let key: Vec<bool> = dimensions.iter().map(|&d| r.flag(d)).collect();
        *cells.entry(key).or_insert(0) += 1;
    }
    Ok(CrossTab { dimensions, cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Gender,
    Race,
    VehicleType,
    Make,
    Color,
    ViolationType,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Gender,
        Dimension::Race,
        Dimension::VehicleType,
        Dimension::Make,
        Dimension::Color,
        Dimension::ViolationType,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "gender" => Some(Self::Gender),
            "race" => Some(Self::Race),
            "vehicle_type" | "vehicletype" => Some(Self::VehicleType),
            "make" => Some(Self::Make),
            "color" => Some(Self::Color),
            "violation_type" => Some(Self::ViolationType),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gender => "gender",
            Self::Race => "race",
            Self::VehicleType => "vehicle_type",
            Self::Make => "make",
            Self::Color => "color",
            Self::ViolationType => "violation_type",
        }
    }

    pub fn key(self, r: &ViolationRecord) -> String {
        match self {
            Self::Gender => r.gender.as_str().to_string(),
            Self::Race => r.race.as_str().to_string(),
            Self::VehicleType => r.vehicle_label().to_string(),
            Self::Make => text::collapse_whitespace(&r.make).to_uppercase(),
            Self::Color => text::collapse_whitespace(&r.color).to_uppercase(),
            Self::ViolationType => r.violation_type.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub key: String,
    pub count: u64,
    /// Exact percent of the records in scope.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub dimension: Dimension,
    pub total: u64,
    pub rows: Vec<BreakdownRow>,
}

pub fn dimension_breakdown<'a, I>(records: I, dimension: &str) -> Result<Breakdown, AnalyticsError>
where
    I: IntoIterator<Item = &'a ViolationRecord>,
{
    let dim = Dimension::from_name(dimension)
        .ok_or_else(|| AnalyticsError::UnknownDimension(dimension.to_string()))?;
    let table = FrequencyTable::from_counts(count_keys(records.into_iter().map(|r| dim.key(r))));
    let total = table.total();
    let rows = table
        .rows
        .into_iter()
        .map(|r| BreakdownRow {
            percent: if total == 0 {
                0.0
            } else {
                100.0 * r.count as f64 / total as f64
            },
            key: r.key,
            count: r.count,
        })
        .collect();
    Ok(Breakdown {
        dimension: dim,
        total,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::record;
    use alloc::vec;

    fn with_desc(d: &str) -> ViolationRecord {
        let mut r = record();
        r.description = d.to_string();
        r
    }

    #[test]
    fn ranks_by_count() {
        let rs = [with_desc("a"), with_desc("a"), with_desc("b")];
        let t = rank_violations(&rs, 10).unwrap();
        assert_eq!(
            t.rows,
            [
                FrequencyRow { key: "A".into(), count: 2 },
                FrequencyRow { key: "B".into(), count: 1 }
            ]
        );
    }

    #[test]
    fn ties_break_by_key() {
        let rs = [with_desc("b"), with_desc("a")];
        let t = rank_violations(&rs, 10).unwrap();
        let keys: Vec<_> = t.rows.iter().map(|r| r.key.as_str()).collect();
        assert_eq!(keys, ["A", "B"]);
        assert_eq!(rank_violations(&rs, 1).unwrap().rows.len(), 1);
        assert_eq!(rank_violations(&rs, 0), Err(AnalyticsError::InvalidTopK));
    }

    #[test]
    fn categories() {
        let m = CategoryMap::top_ten();
        assert_eq!(
            m.categorize("DRIVER USING HANDS TO USE HANDHELD TELEPHONE WHILE MOTOR VEHICLE IS IN MOTION"),
            Category::Category1
        );
        assert_eq!(
            m.categorize("Failure to display registration card upon demand by police officer"),
            Category::Category2
        );
        assert_eq!(m.categorize("Jaywalking"), Category::Uncategorized);
    }

    #[test]
    fn top_ten_is_partitioned() {
        let m = CategoryMap::top_ten();
        let c1: BTreeSet<_> = m.descriptions(Category::Category1).collect();
        let c2: BTreeSet<_> = m.descriptions(Category::Category2).collect();
        assert_eq!(c1.len(), 5);
        assert_eq!(c2.len(), 5);
        assert!(c1.is_disjoint(&c2));
    }

    #[test]
    fn crosstab_cells() {
        let mk = |pd, ca, pi| {
            let mut r = record();
            r.property_damage = pd;
            r.contributed_to_accident = ca;
            r.personal_injury = pi;
            r
        };
        let rs = [mk(false, true, false), mk(false, true, false), mk(true, false, false)];
        let flags = ["property_damage", "contributed_to_accident", "personal_injury"];
        let t = crosstab(&rs, &flags).unwrap();
        assert_eq!(t.cells.len(), 2);
        assert_eq!(t.cells[&vec![false, true, false]], 2);
        assert_eq!(t.cells[&vec![true, false, false]], 1);

        let empty: [ViolationRecord; 0] = [];
        assert!(crosstab(&empty, &flags).unwrap().cells.is_empty());
        assert_eq!(
            crosstab(&rs, &["speed"]),
            Err(AnalyticsError::UnknownFlag("speed".into()))
        );
    }

    #[test]
    fn gender_percentages() {
        let mut rs = Vec::new();
        for g in "FFFMMMMM".chars() {
            let mut r = record();
            r.gender = crate::model::Gender::parse(&g.to_string()).unwrap();
            rs.push(r);
        }
        let b = dimension_breakdown(&rs, "gender").unwrap();
        assert_eq!(b.rows[0].key, "M");
        assert_eq!(b.rows[0].percent, 62.5);
        assert_eq!(b.rows[1].percent, 37.5);
        assert!(matches!(
            dimension_breakdown(&rs, "shoe_size"),
            Err(AnalyticsError::UnknownDimension(_))
        ));
    }
}
