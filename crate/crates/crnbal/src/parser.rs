//! Bidirectional `.crn` text format for reaction networks.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! X1 + 2 X2 -> X3 ; k = 3/2
//! C1 <-> C2 ; kf = 2, kr = 3
//! ```
//!
//! A complex is a `+`-separated list of terms, each an optional positive
//! integer coefficient followed by a species name (`[A-Za-z_][A-Za-z0-9_]*`).
//! Rates are positive `p/q` rationals or terminating decimals, converted to
//! exact rationals by place value. Reversible statements expand to two
//! reactions, forward first. Serialization is canonical: species in first
//! appearance order, coefficients >= 2 printed explicitly, adjacent reverse
//! pairs re-fused into `<->`, single spaces around tokens, `\n` line endings.

use std::fmt;

use thiserror::Error;

use crate::model::{
    ArithmeticMode, NetworkBuilder, ReactionNetwork, ReversiblePair, StructuralError,
};
use crate::rational::{format_rational, parse_rational, Rational};

/// Why a line failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseReason {
    UnknownToken(String),
    Expected(&'static str),
    InvalidNumber,
    NonPositiveRate,
    ZeroCoefficient,
    /// Both sides of a reaction normalize to the same complex.
    IdenticalSides,
    EmptyNetwork,
    Structural(StructuralError),
}

impl fmt::Display for ParseReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseReason::UnknownToken(t) => write!(f, "unknown token `{t}`"),
            ParseReason::Expected(what) => write!(f, "expected {what}"),
            ParseReason::InvalidNumber => write!(f, "invalid number literal"),
            ParseReason::NonPositiveRate => write!(f, "rate constant must be positive"),
            ParseReason::ZeroCoefficient => write!(f, "stoichiometric coefficient must be positive"),
            ParseReason::IdenticalSides => {
                write!(f, "substrate and product normalize to the same complex")
            }
            ParseReason::EmptyNetwork => write!(f, "network contains no reactions"),
            ParseReason::Structural(e) => write!(f, "{e}"),
        }
    }
}

/// Parse failure with 1-based line/column location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub reason: ParseReason,
}

/// Source location of a reaction's statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub line: usize,
    pub column: usize,
}

/// A parsed network together with its source text and per-reaction
/// provenance (both reactions of a `<->` statement share a location).
#[derive(Debug, Clone)]
pub struct NetworkDocument {
    pub source: String,
    pub network: ReactionNetwork,
    pub provenance: Vec<Provenance>,
}

impl NetworkDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_document(text, ArithmeticMode::Exact)
    }

    pub fn parse_with_mode(text: &str, mode: ArithmeticMode) -> Result<Self, ParseError> {
        parse_document(text, mode)
    }
}

/// Parses `.crn` text into a network (exact mode).
pub fn parse_network(text: &str) -> Result<ReactionNetwork, ParseError> {
    NetworkDocument::parse(text).map(|doc| doc.network)
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line_no: usize,
}

impl Cursor {
    fn new(line: &str, line_no: usize) -> Self {
        Cursor { chars: line.chars().collect(), pos: 0, line_no }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, reason: ParseReason) -> ParseError {
        ParseError { line: self.line_no, column: self.column(), reason }
    }

    fn error_at(&self, column: usize, reason: ParseReason) -> ParseError {
        ParseError { line: self.line_no, column, reason }
    }

    fn at_comment_or_end(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn eat(&mut self, literal: &str) -> bool {
        let want: Vec<char> = literal.chars().collect();
        if self.chars[self.pos..].starts_with(&want) {
            self.pos += want.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.pos += 1,
            _ => return None,
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn integer(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().ok()
    }

    /// A rate literal: digits with optional sign, `/q` or `.frac` part.
    fn number(&mut self) -> Result<Rational, ParseError> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if let Some(sep @ ('/' | '.')) = self.peek() {
            self.pos += 1;
            let _ = sep;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if start == self.pos {
            return Err(self.error(ParseReason::Expected("a number")));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        parse_rational(&text).ok_or_else(|| self.error_at(start + 1, ParseReason::InvalidNumber))
    }
}

type ComplexTerms = Vec<(String, u64)>;

fn parse_complex(cur: &mut Cursor) -> Result<ComplexTerms, ParseError> {
    let mut terms = Vec::new();
    loop {
        cur.skip_ws();
        let coeff_col = cur.column();
        let coeff = cur.integer();
        if coeff == Some(0) {
            return Err(cur.error_at(coeff_col, ParseReason::ZeroCoefficient));
        }
        cur.skip_ws();
        let Some(name) = cur.ident() else {
            return Err(cur.error(ParseReason::Expected("a species name")));
        };
        terms.push((name, coeff.unwrap_or(1)));
        cur.skip_ws();
        if cur.peek() == Some('+') {
            cur.bump();
            continue;
        }
        return Ok(terms);
    }
}

fn parse_rate(cur: &mut Cursor, key: &'static str) -> Result<Rational, ParseError> {
    cur.skip_ws();
    let key_col = cur.column();
    match cur.ident() {
        Some(ident) if ident == key => {}
        _ => {
            return Err(cur.error_at(
                key_col,
                ParseReason::Expected(match key {
                    "k" => "`k`",
                    "kf" => "`kf`",
                    _ => "`kr`",
                }),
            ))
        }
    }
    cur.skip_ws();
    if cur.bump() != Some('=') {
        return Err(cur.error(ParseReason::Expected("`=`")));
    }
    cur.skip_ws();
    let value_col = cur.column();
    let value = cur.number()?;
    use num_traits::Signed;
    if !value.is_positive() {
        return Err(cur.error_at(value_col, ParseReason::NonPositiveRate));
    }
    Ok(value)
}

fn parse_document(text: &str, mode: ArithmeticMode) -> Result<NetworkDocument, ParseError> {
    let mut builder = NetworkBuilder::new(mode);
    let mut provenance = Vec::new();
    let mut last_location = Provenance { line: 1, column: 1 };

    for (line_idx, line) in text.lines().enumerate() {
        let mut cur = Cursor::new(line, line_idx + 1);
        cur.skip_ws();
        if cur.at_comment_or_end() {
            continue;
        }
        let stmt_col = cur.column();
        last_location = Provenance { line: line_idx + 1, column: stmt_col };

        let lhs = parse_complex(&mut cur)?;
        cur.skip_ws();
        let reversible = if cur.eat("<->") {
            true
        } else if cur.eat("->") {
            false
        } else {
            return Err(cur.error(ParseReason::Expected("`->` or `<->`")));
        };
        let rhs = parse_complex(&mut cur)?;
        cur.skip_ws();
        if cur.bump() != Some(';') {
            return Err(cur.error(ParseReason::Expected("`;`")));
        }

        let intern = |builder: &mut NetworkBuilder, terms: &ComplexTerms, cur: &Cursor| {
            let refs: Vec<(&str, u64)> =
                terms.iter().map(|(n, c)| (n.as_str(), *c)).collect();
            builder
                .complex(&refs)
                .map_err(|e| cur.error_at(stmt_col, ParseReason::Structural(e)))
        };
        let substrate = intern(&mut builder, &lhs, &cur)?;
        let product = intern(&mut builder, &rhs, &cur)?;
        if substrate == product {
            return Err(cur.error_at(stmt_col, ParseReason::IdenticalSides));
        }

        if reversible {
            let kf = parse_rate(&mut cur, "kf")?;
            cur.skip_ws();
            if cur.bump() != Some(',') {
                return Err(cur.error(ParseReason::Expected("`,`")));
            }
            let kr = parse_rate(&mut cur, "kr")?;
            builder
                .reaction(substrate, product, kf)
                .map_err(|e| cur.error_at(stmt_col, ParseReason::Structural(e)))?;
            builder
                .reaction(product, substrate, kr)
                .map_err(|e| cur.error_at(stmt_col, ParseReason::Structural(e)))?;
            provenance.push(last_location);
            provenance.push(last_location);
        } else {
            let k = parse_rate(&mut cur, "k")?;
            builder
                .reaction(substrate, product, k)
                .map_err(|e| cur.error_at(stmt_col, ParseReason::Structural(e)))?;
            provenance.push(last_location);
        }

        cur.skip_ws();
        if !cur.at_comment_or_end() {
            let rest: String = cur.chars[cur.pos..].iter().take(12).collect();
            return Err(cur.error(ParseReason::UnknownToken(rest)));
        }
    }

    let network = builder.finish().map_err(|e| match e {
        StructuralError::Empty(_) => ParseError {
            line: last_location.line,
            column: last_location.column,
            reason: ParseReason::EmptyNetwork,
        },
        other => ParseError {
            line: last_location.line,
            column: last_location.column,
            reason: ParseReason::Structural(other),
        },
    })?;
    Ok(NetworkDocument { source: text.to_string(), network, provenance })
}

fn complex_to_text(net: &ReactionNetwork, complex: usize) -> String {
    let coeffs = net.complexes()[complex].coefficients();
    let mut parts = Vec::new();
    for (i, &coeff) in coeffs.iter().enumerate() {
        if coeff == 0 {
            continue;
        }
        let name = &net.species()[i].name;
        if coeff == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{coeff} {name}"));
        }
    }
    parts.join(" + ")
}

/// Serializes a network canonically. Adjacent reactions that are exact
/// reverses of each other are fused into one `<->` statement (the parser
/// always emits such adjacent pairs), so parse ∘ serialize is the identity
/// on parsed networks.
pub fn serialize_network(net: &ReactionNetwork) -> String {
    let mut out = String::new();
    let reactions = net.reactions();
    let mut j = 0;
    while j < reactions.len() {
        let rx = &reactions[j];
        let fused = reactions.get(j + 1).is_some_and(|next| {
            next.substrate == rx.product && next.product == rx.substrate
        });
        if fused {
            let rev = &reactions[j + 1];
            out.push_str(&format!(
                "{} <-> {} ; kf = {}, kr = {}\n",
                complex_to_text(net, rx.substrate),
                complex_to_text(net, rx.product),
                format_rational(&rx.rate_constant),
                format_rational(&rev.rate_constant),
            ));
            j += 2;
        } else {
            out.push_str(&format!(
                "{} -> {} ; k = {}\n",
                complex_to_text(net, rx.substrate),
                complex_to_text(net, rx.product),
                format_rational(&rx.rate_constant),
            ));
            j += 1;
        }
    }
    out
}

/// Fuses adjacent reverse pairs the same way serialization does; used by
/// reporting to present reversible networks pair-wise.
pub fn adjacent_reverse_pairs(net: &ReactionNetwork) -> Vec<ReversiblePair> {
    let reactions = net.reactions();
    let mut pairs = Vec::new();
    let mut j = 0;
    while j < reactions.len() {
        let rx = &reactions[j];
        if reactions
            .get(j + 1)
            .is_some_and(|next| next.substrate == rx.product && next.product == rx.substrate)
        {
            pairs.push(ReversiblePair { forward: j, reverse: j + 1 });
            j += 2;
        } else {
            j += 1;
        }
    }
    pairs
}
