use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::text;

/// Fixed-point decimal with a non-zero fractional part. Whole values are
/// always represented as [`Constant::Int`], which keeps the text form and
/// the structural form in one-to-one correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Decimal {
    mantissa: i64,
    scale: u8,
}

impl Decimal {
    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 / libm::pow(10.0, self.scale as f64)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let div = 10u64.pow(self.scale as u32);
        let abs = self.mantissa.unsigned_abs();
        let sign = if self.mantissa < 0 { "-" } else { "" };
        write!(
            f,
            "{sign}{}.{:0width$}",
            abs / div,
            abs % div,
            width = self.scale as usize
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Constant {
    /// Token matching `[a-z][a-z0-9_]*`.
    Symbol(String),
    /// Free text, rendered in double quotes.
    Str(String),
    Int(i64),
    Decimal(Decimal),
}

impl Constant {
    /// A symbol from an already-valid token.
    ///
    /// # Panics
    /// If `token` is not a valid symbol; use [`Constant::symbolized`] for
    /// arbitrary text.
    pub fn sym(token: &str) -> Self {
        assert!(is_symbol(token), "invalid symbol `{token}`");
        Constant::Symbol(token.to_string())
    }

    /// Symbol derived from arbitrary text (`I-270` → `i270`).
    pub fn symbolized(raw: &str) -> Self {
        Constant::Symbol(text::symbolize(raw))
    }

    /// Symbol when `raw` is already a token, quoted string otherwise.
    pub fn text(raw: &str) -> Self {
        if is_symbol(raw) {
            Constant::Symbol(raw.to_string())
        } else {
            Constant::Str(raw.to_string())
        }
    }

    /// `value` rounded to `places` decimals, trailing zeros dropped.
    pub fn decimal(value: f64, places: u8) -> Self {
        let scaled = libm::round(value * libm::pow(10.0, places as f64)) as i64;
        Self::from_scaled(scaled, places)
    }

    pub(crate) fn from_scaled(mut mantissa: i64, mut scale: u8) -> Self {
        while scale > 0 && mantissa % 10 == 0 {
            mantissa /= 10;
            scale -= 1;
        }
        if scale == 0 {
            Constant::Int(mantissa)
        } else {
            Constant::Decimal(Decimal { mantissa, scale })
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Constant::Int(_) | Constant::Decimal(_))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Constant::Int(i) => Some(*i as f64),
            Constant::Decimal(d) => Some(d.to_f64()),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Constant::Symbol(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Symbol(s) => f.write_str(s),
            Constant::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Constant::Int(i) => write!(f, "{i}"),
            Constant::Decimal(d) => write!(f, "{d}"),
        }
    }
}

pub fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('A'..='Z' | '_'))
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Logic variable. `_` is anonymous: every occurrence is distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Variable(String);

impl Variable {
    /// # Panics
    /// If `name` does not start with an upper-case letter or underscore.
    pub fn new(name: &str) -> Self {
        assert!(is_variable_name(name), "invalid variable `{name}`");
        Variable(name.to_string())
    }

    pub fn anonymous() -> Self {
        Variable(String::from("_"))
    }

    pub fn is_anonymous(&self) -> bool {
        self.0 == "_"
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Const(Constant),
    Var(Variable),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Variable::new(name))
    }

    pub fn sym(token: &str) -> Self {
        Term::Const(Constant::sym(token))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => v.fmt(f),
        }
    }
}

impl From<Constant> for Term {
    fn from(c: Constant) -> Self {
        Term::Const(c)
    }
}

impl From<Variable> for Term {
    fn from(v: Variable) -> Self {
        Term::Var(v)
    }
}

/// Predicate applied to terms. Ground literals are facts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|a| matches!(a, Term::Const(_)))
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.args.iter().filter_map(Term::as_var)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            a.fmt(f)?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn decimals_drop_trailing_zeros() {
        assert_eq!(Constant::decimal(4.9, 1).to_string(), "4.9");
        assert_eq!(Constant::decimal(122.0, 1), Constant::Int(122));
        assert_eq!(Constant::decimal(2.5298, 1).to_string(), "2.5");
        assert_eq!(Constant::decimal(-0.25, 2).to_string(), "-0.25");
        assert_eq!(Constant::decimal(0.05, 2).to_string(), "0.05");
        assert_eq!(Constant::decimal(-77.5, 1).to_string(), "-77.5");
    }

    #[test]
    fn quoting() {
        assert_eq!(Constant::text("exceeding speed").to_string(), "\"exceeding speed\"");
        assert_eq!(Constant::text("i270").to_string(), "i270");
        assert_eq!(Constant::Str("a\"b\\".into()).to_string(), "\"a\\\"b\\\\\"");
    }

    #[test]
    fn literal_display() {
        let l = Literal::new("main_road", alloc::vec![Term::var("X"), Term::sym("i270")]);
        assert_eq!(format!("{l}"), "main_road(X, i270)");
    }

    #[test]
    fn lexical_classes_are_disjoint() {
        for s in ["abc", "a_1", "X", "_", "Foo", "1a", "", "aB"] {
            assert!(!(is_symbol(s) && is_variable_name(s)), "{s}");
        }
        assert!(is_symbol("a_1"));
        assert!(!is_symbol("aB"));
    }
}
