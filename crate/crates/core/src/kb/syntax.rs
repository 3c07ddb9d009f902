//! Text form of facts and clauses.
//!
//! ```text
//! fact   := name '(' arg (', ' arg)* ').' LF
//! clause := literal [' :- ' literal (', ' literal)*] '.' LF
//! name   := [a-z][a-z0-9_]*
//! arg    := name | integer | decimal | '"' chars '"' | Variable
//! ```
//!
//! `%` starts a comment that runs to the end of the line. The parser accepts
//! any whitespace between tokens; the emitters produce exactly the spacing
//! shown above.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use thiserror::Error;

use super::schema::Schema;
use super::store::{Fact, FactError, KnowledgeBase, Provenance, SchemaPolicy};
use super::term::{Constant, Literal, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Fact { line: usize, source: FactError },
}

/// A clause as written, before any schema checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedClause {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub line: usize,
}

/// Canonical fact file: one fact per line, lines sorted bytewise.
pub fn render_facts(kb: &KnowledgeBase) -> String {
    let mut lines: Vec<String> = kb.facts().map(|f| f.to_string()).collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Writes [`render_facts`] to `sink` and returns the number of bytes.
pub fn emit_facts<W: Write>(kb: &KnowledgeBase, sink: &mut W) -> Result<usize, fmt::Error> {
    let text = render_facts(kb);
    sink.write_str(&text)?;
    Ok(text.len())
}

pub fn parse_facts(
    source: &str,
    schema: Schema,
    policy: SchemaPolicy,
) -> Result<KnowledgeBase, ParseError> {
    let mut kb = KnowledgeBase::new(schema);
    for clause in parse_clauses(source)? {
        if !clause.body.is_empty() {
            return Err(syntax(clause.line, 1, "expected a fact, found a rule"));
        }
        let fact = Fact::from_literal(&clause.head)
            .ok_or_else(|| syntax(clause.line, 1, "facts must be ground"))?;
        kb.insert_with(fact, Provenance::Parsed, policy)
            .map_err(|source| ParseError::Fact {
                line: clause.line,
                source,
            })?;
    }
    Ok(kb)
}

pub fn parse_clauses(source: &str) -> Result<Vec<ParsedClause>, ParseError> {
    let mut p = Parser::new(source);
    let mut out = Vec::new();
    loop {
        p.skip_trivia();
        if p.at_end() {
            return Ok(out);
        }
        out.push(p.clause()?);
    }
}

/// Parses one literal such as `main_road(X, i270)`.
pub fn parse_literal(source: &str) -> Result<Literal, ParseError> {
    let mut p = Parser::new(source);
    p.skip_trivia();
    let lit = p.literal()?;
    p.skip_trivia();
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok(lit)
}

fn syntax(line: usize, column: usize, message: &str) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            line_start: 0,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    fn column(&self) -> usize {
        self.src[self.line_start..self.pos].chars().count() + 1
    }

    fn error(&self, message: &str) -> ParseError {
        syntax(self.line, self.column(), message)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected `{c}`")))
        }
    }

    fn clause(&mut self) -> Result<ParsedClause, ParseError> {
        let line = self.line;
        let head = self.literal()?;
        let mut body = Vec::new();
        self.skip_trivia();
        if self.src[self.pos..].starts_with(":-") {
            self.bump();
            self.bump();
            loop {
                self.skip_trivia();
                body.push(self.literal()?);
                self.skip_trivia();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect('.')?;
        Ok(ParsedClause { head, body, line })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let name = self.name()?;
        self.skip_trivia();
        let (open_line, open_col) = (self.line, self.column());
        if self.peek() != Some('(') {
            return Err(self.error("expected `(`"));
        }
        self.bump();
        let mut args = Vec::new();
        loop {
            self.skip_trivia();
            if self.at_end() {
                return Err(syntax(open_line, open_col, "unclosed `(`"));
            }
            args.push(self.term()?);
            self.skip_trivia();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(')') => {
                    self.bump();
                    break;
                }
                None => return Err(syntax(open_line, open_col, "unclosed `(`")),
                Some(_) => return Err(self.error("expected `,` or `)`")),
            }
        }
        Ok(Literal {
            predicate: name,
            args,
        })
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some('a'..='z') => Ok(self
                .take_while(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
                .to_string()),
            _ => Err(self.error("expected a predicate name")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('a'..='z') => Ok(Term::Const(Constant::Symbol(self.name()?))),
            Some('A'..='Z' | '_') => {
                let v = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                Ok(Term::Var(Variable::new(v)))
            }
            Some('"') => self.string().map(|s| Term::Const(Constant::Str(s))),
            Some('-' | '0'..='9') => self.number().map(Term::Const),
            _ => Err(self.error("expected an argument")),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let (line, col) = (self.line, self.column());
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => out.push(c),
                    _ => return Err(self.error("invalid escape")),
                },
                Some('\n') | None => return Err(syntax(line, col, "unterminated string")),
                Some(c) => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<Constant, ParseError> {
        let err = self.error("malformed number");
        let neg = if self.peek() == Some('-') {
            self.bump();
            true
        } else {
            false
        };
        let whole = self.take_while(|c| c.is_ascii_digit());
        if whole.is_empty() {
            return Err(err);
        }
        let mut digits = String::from(whole);
        let mut scale = 0u8;
        if self.peek() == Some('.') && self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.bump();
            let frac = self.take_while(|c| c.is_ascii_digit());
            if frac.len() > 18 {
                return Err(err);
            }
            digits.push_str(frac);
            scale = frac.len() as u8;
        }
        let mut mantissa: i64 = digits.parse().map_err(|_| err.clone())?;
        if neg {
            mantissa = -mantissa;
        }
        Ok(Constant::from_scaled(mantissa, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parses_quoted_first_argument() {
        let kb = parse_facts(
            "main_road(\"exceeding speed\", i270).\n",
            Schema::standard(),
            SchemaPolicy::Enforce,
        )
        .unwrap();
        let f = kb.facts().next().unwrap();
        assert_eq!(
            *f,
            Fact::new(
                "main_road",
                vec![Constant::Str("exceeding speed".into()), Constant::sym("i270")]
            )
        );
    }

    #[test]
    fn open_paren_error_location() {
        assert_eq!(
            parse_clauses("foo("),
            Err(ParseError::Syntax {
                line: 1,
                column: 4,
                message: "unclosed `(`".into()
            })
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let src = "% header\n\npoverty(bethesda, lt_3pct). % trailing\n";
        let kb = parse_facts(src, Schema::standard(), SchemaPolicy::Enforce).unwrap();
        assert_eq!(kb.len(), 1);
    }

    #[test]
    fn numbers_normalize() {
        let kb = parse_facts(
            "night_hours(bethesda, 4.90, 5.5, 6.4, -2).",
            Schema::standard(),
            SchemaPolicy::Enforce,
        )
        .unwrap();
        assert_eq!(render_facts(&kb), "night_hours(bethesda, 4.9, 5.5, 6.4, -2).\n");
        let kb = parse_facts(
            "population_density(x, 3.0).",
            Schema::standard(),
            SchemaPolicy::Enforce,
        )
        .unwrap();
        assert!(kb.contains(&Fact::new("population_density", vec![Constant::sym("x"), Constant::Int(3)])));
    }

    #[test]
    fn schema_errors_carry_line() {
        let err = parse_facts("poverty(a, b).\nmain_road(a).\n", Schema::standard(), SchemaPolicy::Enforce)
            .unwrap_err();
        assert!(matches!(
            err,
            ParseError::Fact { line: 2, source: FactError::ArityMismatch { .. } }
        ));
        let err = parse_facts("frob(a).", Schema::standard(), SchemaPolicy::Enforce).unwrap_err();
        assert!(matches!(err, ParseError::Fact { source: FactError::UnknownPredicate { .. }, .. }));
    }

    #[test]
    fn rules_parse() {
        let cs = parse_clauses("t(X) :- main_road(X, i270), driver_characteristics(X, belt_no).\n").unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].body.len(), 2);
        assert!(parse_facts("t(X).", Schema::standard(), SchemaPolicy::Extend).is_err());
    }

    #[test]
    fn misc_syntax_errors() {
        for bad in ["Foo(a).", "foo(a)", "foo(a,).", "foo(\"abc).", "foo(1.).", "foo(a b)."] {
            assert!(parse_clauses(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn emit_counts_bytes() {
        let mut kb = KnowledgeBase::standard();
        kb.insert(
            Fact::new("population_density", vec![Constant::sym("bethesda"), Constant::Int(1624)]),
            Provenance::Manual,
        )
        .unwrap();
        let mut out = String::new();
        let n = emit_facts(&kb, &mut out).unwrap();
        assert_eq!(out, "population_density(bethesda, 1624).\n");
        assert_eq!(n, out.len());

        let mut empty = String::new();
        assert_eq!(emit_facts(&KnowledgeBase::standard(), &mut empty), Ok(0));
        assert!(empty.is_empty());
    }
}
