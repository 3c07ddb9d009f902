//! Record builders for unit tests.

use alloc::format;
use alloc::string::String;

use chrono::{NaiveDate, NaiveTime};

use crate::model::*;

pub fn record() -> ViolationRecord {
    record_at(2017, 6, 1, 12, 0)
}

pub fn record_at(y: i32, m: u32, d: u32, hh: u32, mm: u32) -> ViolationRecord {
    ViolationRecord {
        record_id: String::from("r"),
        timestamp: NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(hh, mm, 0)
            .unwrap(),
        city: String::from("Bethesda"),
        coordinates: Some(Coordinates {
            latitude: 38.98,
            longitude: -77.09,
        }),
        description: String::from("Failure to obey stop light signal"),
        violation_type: ViolationType::Citation,
        charge: String::from("21-202(h1)"),
        belts: false,
        personal_injury: false,
        property_damage: false,
        contributed_to_accident: false,
        alcohol: false,
        commercial_vehicle: false,
        work_zone: false,
        gender: Gender::M,
        race: Race::White,
        vehicle_type: String::from("02 - Automobile"),
        vehicle_year: Some(2012),
        make: String::from("TOYOTA"),
        color: String::from("BLACK"),
    }
}

pub fn record_near(lat: f64, lon: f64) -> ViolationRecord {
    let mut r = record();
    r.coordinates = Some(Coordinates {
        latitude: lat,
        longitude: lon,
    });
    r
}

pub fn record_in(city: &str, i: usize) -> ViolationRecord {
    let mut r = record_near(39.0 + (i % 7) as f64 * 0.001, -77.0);
    r.city = String::from(city);
    r.record_id = format!("r{i}");
    r
}

pub fn weather_day(y: i32, m: u32, d: u32, rise: (u32, u32), set: (u32, u32)) -> WeatherDay {
    WeatherDay {
        date: NaiveDate::from_ymd_opt(y, m, d).unwrap(),
        sunrise: NaiveTime::from_hms_opt(rise.0, rise.1, 0).unwrap(),
        sunset: NaiveTime::from_hms_opt(set.0, set.1, 0).unwrap(),
        mean_temp: None,
        precipitation: None,
    }
}

pub fn census(city: &str) -> CityCensus {
    CityCensus {
        city: String::from(city),
        population: 60858,
        density: 1624.0,
        education_pct: 83.7,
        median_income: 154559.0,
        poverty_pct: 2.8,
        age_band_pct: 64.8,
        land_area: 13.1,
        water_area: 0.1,
        schools: 18,
        hospitals: 3,
        main_road: String::from("I-495"),
    }
}
