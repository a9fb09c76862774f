//! Reader for the fact-file encoding of layered transaction databases.
//!
//! A fact file is a sequence of ground facts such as
//!
//! ```text
//! % papers, reviews, sentences
//! container(c1).
//! object(r1, c1).
//! transaction(s1, r1).
//! item(paper, s1, 1, 2).
//! transactionUtilityVector(s1, -1, -1, 0, 1, 0, 0, 0, -1).
//! ```
//!
//! Grammar: `fact := name "(" term ("," term)* ")" "."`, where a term is a
//! lowercase name, a double-quoted string or a (possibly negative, possibly
//! decimal) number. `%` starts a comment running to the end of the line.
//! Variables and rules are rejected.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A single ground argument.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Name(String),
    /// Content between the quotes, verbatim.
    Quoted(String),
    Int(i64),
    Decimal(f64),
}

impl Term {
    /// Numeric value, if the term is a number.
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Term::Int(v) => Some(v as f64),
            Term::Decimal(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            Term::Int(v) => Some(v),
            _ => None,
        }
    }

    /// Text used when the term names an entity (item, transaction, ...).
    pub fn symbol(&self) -> String {
        match self {
            Term::Name(s) | Term::Quoted(s) => s.clone(),
            Term::Int(v) => v.to_string(),
            Term::Decimal(_) => self.to_string(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(s) => f.write_str(s),
            Term::Quoted(s) => write!(f, "\"{s}\""),
            Term::Int(v) => write!(f, "{v}"),
            Term::Decimal(v) => {
                let text = v.to_string();
                if text.contains('.') {
                    f.write_str(&text)
                } else {
                    write!(f, "{text}.0")
                }
            }
        }
    }
}

/// Line and column (both 1-based) of the first character of a fact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A parsed fact. Equality ignores the source location.
#[derive(Clone, Debug)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<Term>,
    pub location: Location,
}

impl Fact {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Fact {
            predicate: predicate.into(),
            args,
            location: Location::default(),
        }
    }
}

impl PartialEq for Fact {
    fn eq(&self, other: &Self) -> bool {
        self.predicate == other.predicate && self.args == other.args
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(".")
    }
}

/// Facts grouped by predicate name, in source order within each group.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactSet {
    groups: BTreeMap<String, Vec<Fact>>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, fact: Fact) {
        self.groups
            .entry(fact.predicate.clone())
            .or_default()
            .push(fact);
    }

    /// Facts of one predicate (any arity), in source order.
    pub fn get(&self, predicate: &str) -> &[Fact] {
        self.groups.get(predicate).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.groups.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Appends every fact of `other` after the facts already present.
    pub fn merge(&mut self, other: FactSet) {
        for (name, facts) in other.groups {
            self.groups.entry(name).or_default().extend(facts);
        }
    }

    /// Renames predicates according to `renames`.
    pub fn rename(&mut self, renames: &PredicateRenames) {
        for (from, to) in &renames.0 {
            if from == to {
                continue;
            }
            if let Some(mut facts) = self.groups.remove(from) {
                for fact in &mut facts {
                    fact.predicate = to.clone();
                }
                self.groups.entry(to.clone()).or_default().extend(facts);
            }
        }
    }

    /// Serializes back to the fact-file syntax, one fact per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for fact in self.iter() {
            out.push_str(&fact.to_string());
            out.push('\n');
        }
        out
    }
}

/// Maps source predicate names onto the canonical ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateRenames(pub BTreeMap<String, String>);

impl PredicateRenames {
    /// Parses `old=new` pairs.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[S]) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for pair in pairs {
            let pair = pair.as_ref();
            let (from, to) = pair
                .split_once('=')
                .ok_or_else(|| format!("rename `{pair}` is not of the form old=new"))?;
            let (from, to) = (from.trim(), to.trim());
            if !is_name(from) || !is_name(to) {
                return Err(format!("rename `{pair}` must map a predicate name to a predicate name"));
            }
            map.insert(from.to_string(), to.to_string());
        }
        Ok(PredicateRenames(map))
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Unexpected(char),
    #[error("unexpected end of input, expected {0}")]
    Eof(&'static str),
    #[error("unterminated quoted string")]
    UnterminatedString,
    #[error("bad number `{0}`")]
    BadNumber(String),
    #[error("missing `.` after fact")]
    MissingPeriod,
    #[error("variable `{0}` in fact; only ground facts are accepted")]
    Variable(String),
    #[error("rules are not accepted, only facts")]
    Rule,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Location {
        Location {
            line: self.line,
            column: self.column,
        }
    }

    fn error_at(&self, at: Location, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: at.line,
            column: at.column,
            kind,
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        self.error_at(self.here(), kind)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.here();
        match self.peek() {
            None => Err(self.error(ParseErrorKind::Eof("a term"))),
            Some(c) if c.is_ascii_lowercase() => Ok(Term::Name(self.word())),
            Some(c) if c.is_ascii_uppercase() || c == '_' => {
                let name = self.word();
                Err(self.error_at(start, ParseErrorKind::Variable(name)))
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => return Ok(Term::Quoted(s)),
                        Some('\n') | None => {
                            return Err(self.error_at(start, ParseErrorKind::UnterminatedString))
                        }
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(c) if c == '-' || c.is_ascii_digit() => self.number(start),
            Some(c) => Err(self.error(ParseErrorKind::Unexpected(c))),
        }
    }

    fn digits(&mut self, into: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                into.push(c);
                self.bump();
                n += 1;
            } else {
                break;
            }
        }
        n
    }

    fn number(&mut self, start: Location) -> Result<Term, ParseError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            text.push('-');
            self.bump();
        }
        let bad = |cur: &Self, text: String| cur.error_at(start, ParseErrorKind::BadNumber(text));
        if self.digits(&mut text) == 0 {
            return Err(bad(self, text));
        }
        if self.peek() == Some('.') {
            text.push('.');
            self.bump();
            if self.digits(&mut text) == 0 {
                return Err(bad(self, text));
            }
            return text
                .parse::<f64>()
                .map(Term::Decimal)
                .map_err(|_| bad(self, text.clone()));
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
            text.push_str(&self.word());
            return Err(bad(self, text));
        }
        text.parse::<i64>()
            .map(Term::Int)
            .map_err(|_| bad(self, text.clone()))
    }

    fn fact(&mut self) -> Result<Fact, ParseError> {
        let location = self.here();
        let predicate = match self.peek() {
            Some(c) if c.is_ascii_lowercase() => self.word(),
            Some(c) if c.is_ascii_uppercase() || c == '_' => {
                let name = self.word();
                return Err(self.error_at(location, ParseErrorKind::Variable(name)));
            }
            Some(':') => return Err(self.error(ParseErrorKind::Rule)),
            Some(c) => return Err(self.error(ParseErrorKind::Unexpected(c))),
            None => return Err(self.error(ParseErrorKind::Eof("a fact"))),
        };
        self.skip_trivia();
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.bump();
            loop {
                self.skip_trivia();
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
                    Some(c) => return Err(self.error(ParseErrorKind::Unexpected(c))),
                    None => return Err(self.error(ParseErrorKind::Eof("`,` or `)`"))),
                }
            }
            self.skip_trivia();
        }
        match self.peek() {
            Some('.') => {
                self.bump();
                Ok(Fact {
                    predicate,
                    args,
                    location,
                })
            }
            Some(':') => Err(self.error(ParseErrorKind::Rule)),
            _ => Err(self.error(ParseErrorKind::MissingPeriod)),
        }
    }
}

/// Parses a whole fact file.
pub fn parse_facts(text: &str) -> Result<FactSet, ParseError> {
    let mut cursor = Cursor::new(text);
    let mut set = FactSet::new();
    loop {
        cursor.skip_trivia();
        if cursor.peek().is_none() {
            return Ok(set);
        }
        set.push(cursor.fact()?);
    }
}

/// How many arguments a canonical predicate takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Exact(usize),
    /// The identifier followed by any number of facet values.
    AtLeast(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: &'static str,
    pub arity: Arity,
    pub arguments: &'static str,
}

/// The predicates the dataset assembler understands.
pub fn expected_schema() -> &'static [PredicateSchema] {
    const SCHEMA: &[PredicateSchema] = &[
        PredicateSchema {
            name: "container",
            arity: Arity::Exact(1),
            arguments: "container",
        },
        PredicateSchema {
            name: "object",
            arity: Arity::Exact(2),
            arguments: "object, container",
        },
        PredicateSchema {
            name: "transaction",
            arity: Arity::Exact(2),
            arguments: "transaction, object",
        },
        PredicateSchema {
            name: "item",
            arity: Arity::Exact(4),
            arguments: "item, transaction, position, quantity",
        },
        PredicateSchema {
            name: "item",
            arity: Arity::Exact(2),
            arguments: "transaction, item",
        },
        PredicateSchema {
            name: "itemUtilityVector",
            arity: Arity::AtLeast(1),
            arguments: "item, iu_1, ..., iu_l",
        },
        PredicateSchema {
            name: "transactionUtilityVector",
            arity: Arity::AtLeast(1),
            arguments: "transaction, tu_1, ..., tu_m",
        },
        PredicateSchema {
            name: "objectUtilityVector",
            arity: Arity::AtLeast(1),
            arguments: "object, ou_1, ..., ou_n",
        },
        PredicateSchema {
            name: "containerUtilityVector",
            arity: Arity::AtLeast(1),
            arguments: "container, cu_1, ..., cu_o",
        },
        PredicateSchema {
            name: "itemCategory",
            arity: Arity::Exact(2),
            arguments: "item, category",
        },
        PredicateSchema {
            name: "facetLabel",
            arity: Arity::Exact(3),
            arguments: "level (item|tx|obj|cont), zero-based index, label",
        },
    ];
    SCHEMA
}
