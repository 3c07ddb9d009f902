//! Writes the bundled 1,000-record fixture: violations, weather, census and
//! location annotations for 2017.
//!
//! ```text
//! cargo run -p traffic-ilp --example gen_fixture -- crates/traffic-ilp/fixtures
//! ```
//!
//! Output is a pure function of the seed.

use std::fs;
use std::path::PathBuf;

use chrono::{Datelike, Duration, NaiveDate, NaiveTime};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2017;
const YEAR: i32 = 2017;

const HEADER: &str = "SeqID,Date Of Stop,Time Of Stop,Description,Violation Type,Charge,Latitude,Longitude,\
Belts,Personal Injury,Property Damage,Contributed To Accident,Alcohol,Commercial Vehicle,Work Zone,\
Gender,Race,VehicleType,Year,Make,Color,Driver City";

/// (description, charge, weight)
const DESCRIPTIONS: [(&str, &str, u32); 12] = [
    ("DRIVER FAILURE TO OBEY PROPERLY PLACED TRAFFIC CONTROL DEVICE INSTRUCTIONS", "21-201(a1)", 16),
    ("FAILURE TO DISPLAY REGISTRATION CARD UPON DEMAND BY POLICE OFFICER", "13-409(b)", 9),
    ("DRIVER FAILURE TO STOP AT STOP SIGN LINE", "21-707(a)", 8),
    ("DISPLAYING EXPIRED REGISTRATION PLATE ISSUED BY ANY STATE", "13-411(f)", 7),
    ("FAILURE OF INDIVIDUAL DRIVING ON HIGHWAY TO DISPLAY LICENSE TO UNIFORMED POLICE ON DEMAND", "16-112(c)", 6),
    ("DRIVING VEHICLE ON HIGHWAY WITH SUSPENDED REGISTRATION", "13-401(h)", 5),
    ("DRIVER USING HANDS TO USE HANDHELD TELEPHONE WHILE MOTOR VEHICLE IS IN MOTION", "21-1124.2(d2)", 9),
    ("FAILURE TO OBEY STOP LIGHT SIGNAL", "21-202(h1)", 5),
    ("DRIVING VEHICLE ON HIGHWAY WITHOUT CURRENT REGISTRATION PLATES AND VALIDATION TABS", "13-401(b1)", 4),
    ("EXCEEDING THE POSTED SPEED LIMIT OF 40 MPH", "21-801.1", 6),
    ("FAILURE TO INCLUDE REGISTRATION PLATE LAMP", "22-204(f)", 3),
    ("DRIVER FAILURE TO YIELD RIGHT-OF-WAY TO PED. CROSSING", "21-502(a)", 2),
];

struct City {
    name: &'static str,
    records: usize,
    center: (f64, f64),
    /// (cell latitude, cell longitude, events, label, belts violated, description index)
    hot: &'static [(f64, f64, usize, &'static str, bool, Option<usize>)],
}

const CITIES: [City; 4] = [
    City {
        name: "BETHESDA",
        records: 280,
        center: (38.9847, -77.0947),
        hot: &[
            (38.9901, -77.0962, 24, "intersection", false, Some(0)),
            (38.9968, -77.1112, 18, "main_road", false, None),
            (38.9811, -77.0905, 14, "athletic_center", false, Some(2)),
            (38.9863, -77.0941, 12, "shopping_area", false, Some(6)),
        ],
    },
    City {
        name: "GAITHERSBURG",
        records: 400,
        center: (39.1434, -77.2014),
        hot: &[
            (39.1203, -77.2191, 64, "main_road", true, None),
            (39.1377, -77.1986, 22, "shopping_area", false, Some(0)),
            (39.1465, -77.2102, 13, "community_area", false, Some(1)),
        ],
    },
    City {
        name: "SILVER SPRING",
        records: 190,
        center: (38.9907, -77.0261),
        hot: &[(38.9934, -77.0289, 15, "intersection", false, Some(7))],
    },
    City {
        name: "ROCKVILLE",
        records: 130,
        center: (39.0840, -77.1528),
        hot: &[],
    },
];

const MAKES: [&str; 8] = ["TOYOTA", "HONDA", "FORD", "NISSAN", "CHEVROLET", "BMW", "HYUNDAI", "SUBARU"];
const COLORS: [&str; 6] = ["BLACK", "SILVER", "WHITE", "GRAY", "BLUE", "RED"];
const RACES: [&str; 5] = ["WHITE", "BLACK", "HISPANIC", "ASIAN", "OTHER"];

fn pick_weighted(rng: &mut ChaCha8Rng) -> usize {
    let total: u32 = DESCRIPTIONS.iter().map(|d| d.2).sum();
    let mut x = rng.gen_range(0..total);
    for (i, d) in DESCRIPTIONS.iter().enumerate() {
        if x < d.2 {
            return i;
        }
        x -= d.2;
    }
    unreachable!()
}

fn yes(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

struct Row {
    date: NaiveDate,
    time: NaiveTime,
    description: usize,
    coords: Option<(f64, f64)>,
    belts: bool,
    city: &'static str,
}

fn random_date(rng: &mut ChaCha8Rng) -> NaiveDate {
    NaiveDate::from_ymd_opt(YEAR, 1, 1).unwrap() + Duration::days(rng.gen_range(0..365))
}

/// Rush-hour and late-evening heavy.
fn random_time(rng: &mut ChaCha8Rng) -> NaiveTime {
    const HOUR_WEIGHTS: [u32; 24] = [4, 3, 2, 1, 1, 2, 4, 8, 9, 7, 6, 6, 6, 6, 6, 7, 8, 8, 6, 5, 6, 7, 6, 5];
    let total: u32 = HOUR_WEIGHTS.iter().sum();
    let mut x = rng.gen_range(0..total);
    let mut hour = 0;
    for (h, w) in HOUR_WEIGHTS.iter().enumerate() {
        if x < *w {
            hour = h as u32;
            break;
        }
        x -= w;
    }
    NaiveTime::from_hms_opt(hour, rng.gen_range(0..60), rng.gen_range(0..60)).unwrap()
}

fn rows(rng: &mut ChaCha8Rng) -> Vec<Row> {
    let mut out = Vec::new();
    for city in &CITIES {
        let mut n = 0;
        for &(lat, lon, count, _, belts, desc) in city.hot {
            for _ in 0..count {
                // Jitter stays inside the 4-decimal cell.
                let jl = rng.gen_range(-0.00004..0.00004);
                let jo = rng.gen_range(-0.00004..0.00004);
                out.push(Row {
                    date: random_date(rng),
                    time: random_time(rng),
                    description: desc.unwrap_or_else(|| pick_weighted(rng)),
                    coords: Some((lat + jl, lon + jo)),
                    belts: belts || rng.gen_bool(0.02),
                    city: city.name,
                });
                n += 1;
            }
        }
        while n < city.records {
            let coords = if rng.gen_bool(0.03) {
                None
            } else {
                Some((
                    city.center.0 + rng.gen_range(-0.03..0.03),
                    city.center.1 + rng.gen_range(-0.03..0.03),
                ))
            };
            out.push(Row {
                date: random_date(rng),
                time: random_time(rng),
                description: pick_weighted(rng),
                coords,
                belts: rng.gen_bool(0.03),
                city: city.name,
            });
            n += 1;
        }
    }
    out.shuffle(rng);
    out
}

fn violations(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for (i, r) in rows(rng).iter().enumerate() {
        let (desc, charge, _) = DESCRIPTIONS[r.description];
        let vtype = match rng.gen_range(0..100) {
            0..=44 => "Citation",
            45..=94 => "Warning",
            _ => "ESERO",
        };
        let (lat, lon) = r.coords.map_or((String::new(), String::new()), |(a, b)| (format!("{a:.6}"), format!("{b:.6}")));
        let injury = rng.gen_bool(0.01);
        let damage = rng.gen_bool(0.03);
        let accident = damage && rng.gen_bool(0.5);
        let vehicle = if rng.gen_bool(0.08) { "05 - Light Duty Truck" } else { "02 - Automobile" };
        let year = match rng.gen_range(0..100) {
            0..=2 => "0".to_string(),
            3..=4 => String::new(),
            _ => rng.gen_range(1996..=2018).to_string(),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            40000 + i,
            r.date.format("%m/%d/%Y"),
            r.time.format("%H:%M:%S"),
            desc,
            vtype,
            charge,
            lat,
            lon,
            yes(r.belts),
            yes(injury),
            yes(damage),
            yes(accident),
            yes(rng.gen_bool(0.005)),
            yes(rng.gen_bool(0.02)),
            yes(rng.gen_bool(0.01)),
            if rng.gen_bool(0.62) { "M" } else { "F" },
            RACES.choose(rng).unwrap(),
            vehicle,
            year,
            MAKES.choose(rng).unwrap(),
            COLORS.choose(rng).unwrap(),
            r.city,
        ));
    }
    s
}

/// Sunrise and sunset at the county's latitude from the solar declination,
/// in local clock time (DST from the second Sunday of March to the first
/// Sunday of November).
fn weather() -> String {
    let lat = 39.1_f64.to_radians();
    let lon = -77.2_f64;
    let mut s = String::from("date,sunrise,sunset,mean_temp,precipitation\n");
    let start = NaiveDate::from_ymd_opt(YEAR, 1, 1).unwrap();
    for d in 0..365 {
        let date = start + Duration::days(d);
        let n = date.ordinal() as f64;
        let decl = (-23.44_f64).to_radians() * ((360.0 / 365.0 * (n + 10.0)).to_radians()).cos();
        let cos_h = ((-0.833_f64).to_radians().sin() - lat.sin() * decl.sin()) / (lat.cos() * decl.cos());
        let half_day = cos_h.clamp(-1.0, 1.0).acos().to_degrees() / 15.0;
        let b = (360.0 / 365.0 * (n - 81.0)).to_radians();
        let eot = 9.87 * (2.0 * b).sin() - 7.53 * b.cos() - 1.5 * b.sin();
        let dst = date >= NaiveDate::from_ymd_opt(YEAR, 3, 12).unwrap() && date < NaiveDate::from_ymd_opt(YEAR, 11, 5).unwrap();
        let offset = if dst { -4.0 } else { -5.0 };
        let noon = 12.0 - lon / 15.0 - eot / 60.0 + offset;
        let clock = |h: f64| {
            let m = (h * 60.0).round() as i64;
            format!("{:02}:{:02}", m / 60, m % 60)
        };
        let temp = 12.0 - 13.0 * ((360.0 / 365.0 * (n + 10.0)).to_radians()).cos();
        s.push_str(&format!(
            "{},{},{},{:.1},{:.2}\n",
            date.format("%Y-%m-%d"),
            clock(noon - half_day),
            clock(noon + half_day),
            temp,
            (d % 7) as f64 * 0.05,
        ));
    }
    s
}

fn census() -> &'static str {
    "city,population,density,education_pct,median_income,poverty_pct,age_band_pct,land_area,water_area,schools,hospitals,main_road\n\
Bethesda,60858,1624,83.7,154559,2.8,64.8,13.1,0.1,18,3,I-495\n\
Gaithersburg,59933,2571,53.3,85773,9.5,58.3,26.72,0.3,25,0,I-270\n"
}

fn annotations() -> String {
    let mut s = String::from("latitude,longitude,label\n");
    for city in &CITIES {
        for &(lat, lon, _, label, _, _) in city.hot {
            s.push_str(&format!("{lat:.4},{lon:.4},{label}\n"));
        }
    }
    s
}

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "fixtures".into());
    fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    fs::write(dir.join("violations.csv"), violations(&mut rng))?;
    fs::write(dir.join("weather.csv"), weather())?;
    fs::write(dir.join("census.csv"), census())?;
    fs::write(dir.join("annotations.csv"), annotations())?;
    Ok(())
}
