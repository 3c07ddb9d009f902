//! String normalization shared by analytics keys and knowledge-base constants.

use alloc::string::String;

pub fn collapse_whitespace(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for word in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Trimmed, whitespace-collapsed, sentence-cased description.
///
/// The source portal ships descriptions in upper case; sentence case makes
/// them compare equal to the mixed-case spelling used in reports.
pub fn normalize_description(raw: &str) -> String {
    let lower = collapse_whitespace(raw).to_lowercase();
    let mut chars = lower.chars();
    match chars.next() {
        Some(first) => {
            let mut out: String = first.to_uppercase().collect();
            out.push_str(chars.as_str());
            out
        }
        None => String::new(),
    }
}

/// Lower-case token matching `[a-z][a-z0-9_]*`.
///
/// Hyphens, dots and apostrophes are dropped (`I-270` becomes `i270`), any
/// other run of non-alphanumerics becomes one underscore.
pub fn symbolize(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_sep = false;
    for c in raw.chars() {
        if c.is_ascii_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.push(c.to_ascii_lowercase());
        } else if matches!(c, '-' | '.' | '\'') {
            continue;
        } else {
            pending_sep = true;
        }
    }
    match out.chars().next() {
        None => String::from("x"),
        Some(c) if c.is_ascii_digit() => {
            out.insert(0, 'n');
            out
        }
        Some(_) => out,
    }
}

/// Drops a leading numeric code such as `02 - ` from source category values.
pub fn strip_code_prefix(raw: &str) -> &str {
    let t = raw.trim();
    if let Some((code, rest)) = t.split_once(" - ") {
        if !code.is_empty() && code.chars().all(|c| c.is_ascii_digit()) {
            return rest.trim();
        }
    }
    t
}
