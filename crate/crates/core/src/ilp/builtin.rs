use alloc::vec::Vec;

use super::{parse_rules, Clause};

/// The four published hypotheses with constants in knowledge-base form.
/// `night_hours(Y, _, _, _, _)` stands for a night_hours fact about `Y` with
/// any values.
pub const BUILTIN_RULES: &str = "\
is_event_inbethesda(X) :- event_time(X, h20), event_period_of_year(X, november), location_context(X, athletic_center), event_previous_occurrence(X, gt_10), vehicle_year(X, gt_2009), driver_characteristics(X, belt_yes).
is_event_ingaithersburg(X) :- main_road(X, i270), event_previous_occurrence(X, gt_20), driver_characteristics(X, belt_no).
safe_location(Y, bethesda) :- event_previous_occurrence(Y, lt_5), location_context(bethesda, Y, community_areas), event_type(X, Y), night_hours(Y, _, _, _, _).
event_happen(X, Y) :- education(Y, gt_80pct), median_income(Y, gt_150000), poverty(Y, lt_3pct), density(Y, lt_2000), past_event_probability(X, band_3pct).
";

pub fn builtin_paper_rules() -> Vec<Clause> {
    parse_rules(BUILTIN_RULES).expect("built-in rules parse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::render_rules;
    use crate::kb::{parse_literal, Schema};

    #[test]
    fn shapes() {
        let r = builtin_paper_rules();
        assert_eq!(r.len(), 4);
        assert_eq!(r[0].head, parse_literal("is_event_inbethesda(X)").unwrap());
        assert_eq!(r[0].body.len(), 6);
        assert!(r[1].body.contains(&parse_literal("main_road(X, i270)").unwrap()));
        assert_eq!(r[3].head, parse_literal("event_happen(X, Y)").unwrap());
    }

    #[test]
    fn round_trip() {
        let r = builtin_paper_rules();
        assert_eq!(render_rules(&r), BUILTIN_RULES);
        assert_eq!(parse_rules(&render_rules(&r)).unwrap(), r);
    }

    #[test]
    fn within_standard_schema() {
        let s = Schema::standard();
        for c in builtin_paper_rules() {
            c.check_schema(&s).unwrap();
        }
    }
}
