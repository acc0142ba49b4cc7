//! The `.cm` model-specification language: parsing and canonical
//! serialization.
//!
//! The format is line-oriented and diff-friendly:
//!
//! ```text
//! # comments run to end of line
//! model coin
//! measurement toss { head tail }
//! circumstance Cecily label "a magician" weight 1/4 {
//!   toss: 1 0
//! }
//! ```
//!
//! Rationals are the only numeric literals (`INT` or `INT/POSINT`); row
//! entries align positionally with the measurement's declared outcome
//! order. Identifiers are any run of characters other than whitespace,
//! braces, `:`, `"` and `#`. Parsing is total: any byte sequence yields
//! either a model that passes [`validate_model`] or a list of errors with
//! source positions, never a panic.

use std::fmt;

use crate::model::{validate_model, Circumstance, CircumstanceModel, Measurement, ProbVector};
use crate::rational::Rational;

/// A position in the parsed text: 1-based line and column (in characters),
/// 0-based byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    DuplicateId,
    BadRational,
    RowNotNormalized,
    WeightsNotNormalized,
    MissingTable,
    UnknownMeasurement,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::DuplicateId => "duplicate-id",
            ParseErrorKind::BadRational => "bad-rational",
            ParseErrorKind::RowNotNormalized => "row-not-normalized",
            ParseErrorKind::WeightsNotNormalized => "weights-not-normalized",
            ParseErrorKind::MissingTable => "missing-table",
            ParseErrorKind::UnknownMeasurement => "unknown-measurement",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    LBrace,
    RBrace,
    Colon,
    Str(String),
    Atom(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    kind: TokenKind,
    span: SourceSpan,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokenKind::LBrace => "'{'".to_string(),
            TokenKind::RBrace => "'}'".to_string(),
            TokenKind::Colon => "':'".to_string(),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::Atom(a) => format!("'{a}'"),
        }
    }
}

struct Tokenizer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(text: &'a str) -> Self {
        Tokenizer {
            chars: text.char_indices().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, ch)) = next {
            if ch == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        next
    }

    fn span_here(&mut self) -> SourceSpan {
        let offset = self.chars.peek().map(|&(o, _)| o).unwrap_or(usize::MAX);
        SourceSpan {
            line: self.line,
            column: self.column,
            offset,
        }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        loop {
            // Skip whitespace and comments.
            loop {
                match self.chars.peek() {
                    Some(&(_, ch)) if ch.is_whitespace() => {
                        self.bump();
                    }
                    Some(&(_, '#')) => {
                        while let Some(&(_, ch)) = self.chars.peek() {
                            if ch == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    }
                    _ => break,
                }
            }
            let span = self.span_here();
            let Some(&(_, ch)) = self.chars.peek() else {
                return Ok(tokens);
            };
            let kind = match ch {
                '{' => {
                    self.bump();
                    TokenKind::LBrace
                }
                '}' => {
                    self.bump();
                    TokenKind::RBrace
                }
                ':' => {
                    self.bump();
                    TokenKind::Colon
                }
                '"' => {
                    self.bump();
                    let mut value = String::new();
                    loop {
                        match self.bump() {
                            None => {
                                return Err(ParseError {
                                    span,
                                    kind: ParseErrorKind::Syntax,
                                    message: "unterminated string literal".to_string(),
                                });
                            }
                            Some((_, '\n')) => {
                                return Err(ParseError {
                                    span,
                                    kind: ParseErrorKind::Syntax,
                                    message: "string literal contains a raw newline".to_string(),
                                });
                            }
                            Some((_, '"')) => break,
                            Some((_, '\\')) => match self.bump() {
                                Some((_, '"')) => value.push('"'),
                                Some((_, '\\')) => value.push('\\'),
                                other => {
                                    return Err(ParseError {
                                        span,
                                        kind: ParseErrorKind::Syntax,
                                        message: format!(
                                            "unsupported escape sequence '\\{}'",
                                            other.map(|(_, c)| c.to_string()).unwrap_or_default()
                                        ),
                                    });
                                }
                            },
                            Some((_, other)) => value.push(other),
                        }
                    }
                    TokenKind::Str(value)
                }
                _ => {
                    let mut atom = String::new();
                    while let Some(&(_, ch)) = self.chars.peek() {
                        if ch.is_whitespace() || matches!(ch, '{' | '}' | ':' | '"' | '#') {
                            break;
                        }
                        atom.push(ch);
                        self.bump();
                    }
                    TokenKind::Atom(atom)
                }
            };
            tokens.push(Token { kind, span });
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof_span: SourceSpan,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn syntax_error(&self, expected: &str) -> ParseError {
        let (span, found) = match self.peek() {
            Some(t) => (t.span, t.describe()),
            None => (self.eof_span, "end of input".to_string()),
        };
        ParseError {
            span,
            kind: ParseErrorKind::Syntax,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect_atom(&mut self, expected: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Atom(_),
                ..
            }) => {
                let t = self.bump().unwrap();
                let TokenKind::Atom(a) = t.kind else {
                    unreachable!()
                };
                Ok((a, t.span))
            }
            _ => Err(self.syntax_error(expected)),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Atom(a),
                span,
            }) if a == word => {
                let span = *span;
                self.bump();
                Ok(span)
            }
            _ => Err(self.syntax_error(&format!("'{word}'"))),
        }
    }

    fn expect_token(&mut self, kind: &TokenKind, expected: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(t) if &t.kind == kind => {
                let span = t.span;
                self.bump();
                Ok(span)
            }
            _ => Err(self.syntax_error(expected)),
        }
    }

    fn at_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Token {
                kind: TokenKind::Atom(_),
                ..
            })
        )
    }

    /// True when the upcoming atom is a row header (`IDENT ':'`).
    fn at_row_header(&self) -> bool {
        self.at_atom()
            && matches!(
                self.peek2(),
                Some(Token {
                    kind: TokenKind::Colon,
                    ..
                })
            )
    }
}

/// Parsed rows keep their source spans for the semantic checks.
struct RawRow {
    measurement: String,
    span: SourceSpan,
    entries: Vec<Rational>,
}

struct RawCircumstance {
    id: String,
    id_span: SourceSpan,
    label: Option<String>,
    weight: Rational,
    weight_span: SourceSpan,
    rows: Vec<RawRow>,
}

/// Parses a `.cm` text into a validated model. On failure returns every
/// error found, each with an accurate source position.
pub fn parse(text: &str) -> Result<CircumstanceModel, Vec<ParseError>> {
    let tokens = Tokenizer::new(text).tokenize().map_err(|e| vec![e])?;
    let eof_span = SourceSpan {
        line: text.lines().count().max(1),
        column: 1,
        offset: text.len(),
    };
    let mut parser = Parser {
        tokens,
        pos: 0,
        eof_span,
        errors: Vec::new(),
    };
    match parse_model(&mut parser) {
        Ok(model) => {
            if parser.errors.is_empty() {
                // Safety net: the checks above mirror validate_model; any
                // residual violation still surfaces as a parse error.
                let residual = validate_model(&model);
                if residual.is_empty() {
                    return Ok(model);
                }
                for v in residual {
                    parser.errors.push(ParseError {
                        span: SourceSpan {
                            line: 1,
                            column: 1,
                            offset: 0,
                        },
                        kind: ParseErrorKind::Syntax,
                        message: v.to_string(),
                    });
                }
            }
            Err(parser.errors)
        }
        Err(e) => {
            parser.errors.push(e);
            Err(parser.errors)
        }
    }
}

fn parse_model(p: &mut Parser) -> Result<CircumstanceModel, ParseError> {
    let model_span = p.expect_keyword("model")?;
    let (name, _) = p.expect_atom("a model name")?;

    let mut measurements: Vec<(Measurement, SourceSpan, Vec<SourceSpan>)> = Vec::new();
    while matches!(p.peek(), Some(Token { kind: TokenKind::Atom(a), .. }) if a == "measurement") {
        p.bump();
        let (id, id_span) = p.expect_atom("a measurement id")?;
        p.expect_token(&TokenKind::LBrace, "'{'")?;
        let mut outcomes = Vec::new();
        let mut outcome_spans = Vec::new();
        while p.at_atom() {
            let (outcome, span) = p.expect_atom("an outcome id")?;
            outcomes.push(outcome);
            outcome_spans.push(span);
        }
        p.expect_token(&TokenKind::RBrace, "an outcome id or '}'")?;
        measurements.push((Measurement { id, outcomes }, id_span, outcome_spans));
    }

    let mut circumstances: Vec<RawCircumstance> = Vec::new();
    while matches!(p.peek(), Some(Token { kind: TokenKind::Atom(a), .. }) if a == "circumstance") {
        p.bump();
        circumstances.push(parse_circumstance(p)?);
    }

    if p.peek().is_some() {
        return Err(p.syntax_error("'measurement', 'circumstance', or end of input"));
    }

    run_semantic_checks(p, model_span, &measurements, &circumstances);

    let model = CircumstanceModel {
        name,
        measurements: measurements.into_iter().map(|(m, _, _)| m).collect(),
        circumstances: circumstances
            .into_iter()
            .map(|raw| {
                let mut c = Circumstance::new(raw.id, raw.weight);
                c.label = raw.label;
                for row in raw.rows {
                    c.tables
                        .insert(row.measurement, ProbVector::new(row.entries));
                }
                c
            })
            .collect(),
    };
    Ok(model)
}

fn parse_circumstance(p: &mut Parser) -> Result<RawCircumstance, ParseError> {
    let (id, id_span) = p.expect_atom("a circumstance id")?;

    let label = if matches!(p.peek(), Some(Token { kind: TokenKind::Atom(a), .. }) if a == "label")
    {
        p.bump();
        match p.peek() {
            Some(Token {
                kind: TokenKind::Str(_),
                ..
            }) => {
                let t = p.bump().unwrap();
                let TokenKind::Str(s) = t.kind else {
                    unreachable!()
                };
                Some(s)
            }
            _ => return Err(p.syntax_error("a quoted label string")),
        }
    } else {
        None
    };

    p.expect_keyword("weight")?;
    let (weight_text, weight_span) = p.expect_atom("a rational weight")?;
    let weight: Rational = weight_text.parse().map_err(|_| ParseError {
        span: weight_span,
        kind: ParseErrorKind::BadRational,
        message: format!("'{weight_text}' is not a rational (INT or INT/POSINT)"),
    })?;

    p.expect_token(&TokenKind::LBrace, "'{'")?;
    let mut rows = Vec::new();
    while p.at_atom() {
        let (measurement, span) = p.expect_atom("a row measurement id")?;
        p.expect_token(&TokenKind::Colon, "':' after the row measurement id")?;
        let mut entries = Vec::new();
        while p.at_atom() && !p.at_row_header() {
            let (text, entry_span) = p.expect_atom("a rational entry")?;
            let value: Rational = text.parse().map_err(|_| ParseError {
                span: entry_span,
                kind: ParseErrorKind::BadRational,
                message: format!("'{text}' is not a rational (INT or INT/POSINT)"),
            })?;
            entries.push(value);
        }
        if entries.is_empty() {
            return Err(p.syntax_error("at least one rational entry"));
        }
        rows.push(RawRow {
            measurement,
            span,
            entries,
        });
    }
    p.expect_token(&TokenKind::RBrace, "a row or '}'")?;

    Ok(RawCircumstance {
        id,
        id_span,
        label,
        weight,
        weight_span,
        rows,
    })
}

fn run_semantic_checks(
    p: &mut Parser,
    model_span: SourceSpan,
    measurements: &[(Measurement, SourceSpan, Vec<SourceSpan>)],
    circumstances: &[RawCircumstance],
) {
    let mut push = |span: SourceSpan, kind: ParseErrorKind, message: String| {
        p.errors.push(ParseError {
            span,
            kind,
            message,
        });
    };

    if measurements.is_empty() {
        push(
            model_span,
            ParseErrorKind::Syntax,
            "model declares no measurements".to_string(),
        );
    }
    for (i, (m, id_span, outcome_spans)) in measurements.iter().enumerate() {
        if measurements[..i].iter().any(|(prev, _, _)| prev.id == m.id) {
            push(
                *id_span,
                ParseErrorKind::DuplicateId,
                format!("duplicate measurement id {}", m.id),
            );
        }
        if m.outcomes.len() < 2 {
            push(
                *id_span,
                ParseErrorKind::Syntax,
                format!(
                    "measurement {} must declare at least 2 outcomes, has {}",
                    m.id,
                    m.outcomes.len()
                ),
            );
        }
        for (j, outcome) in m.outcomes.iter().enumerate() {
            if m.outcomes[..j].contains(outcome) {
                push(
                    outcome_spans[j],
                    ParseErrorKind::DuplicateId,
                    format!("duplicate outcome id {outcome} in measurement {}", m.id),
                );
            }
        }
    }

    if circumstances.is_empty() {
        push(
            model_span,
            ParseErrorKind::Syntax,
            "model declares no circumstances".to_string(),
        );
    }
    let mut weight_sum = Rational::zero();
    for (i, c) in circumstances.iter().enumerate() {
        if circumstances[..i].iter().any(|prev| prev.id == c.id) {
            push(
                c.id_span,
                ParseErrorKind::DuplicateId,
                format!("duplicate circumstance id {}", c.id),
            );
        }
        if c.weight.is_negative() {
            push(
                c.weight_span,
                ParseErrorKind::WeightsNotNormalized,
                format!("negative weight {}", c.weight),
            );
        }
        weight_sum = &weight_sum + &c.weight;

        for (j, row) in c.rows.iter().enumerate() {
            if c.rows[..j]
                .iter()
                .any(|prev| prev.measurement == row.measurement)
            {
                push(
                    row.span,
                    ParseErrorKind::DuplicateId,
                    format!("duplicate row for measurement {}", row.measurement),
                );
                continue;
            }
            let Some((m, _, _)) = measurements
                .iter()
                .find(|(m, _, _)| m.id == row.measurement)
            else {
                push(
                    row.span,
                    ParseErrorKind::UnknownMeasurement,
                    format!("row references unknown measurement {}", row.measurement),
                );
                continue;
            };
            if row.entries.len() != m.outcomes.len() {
                push(
                    row.span,
                    ParseErrorKind::Syntax,
                    format!(
                        "row has {} entries but measurement {} has {} outcomes",
                        row.entries.len(),
                        m.id,
                        m.outcomes.len()
                    ),
                );
                continue;
            }
            if row.entries.iter().any(|e| e.is_negative()) {
                push(
                    row.span,
                    ParseErrorKind::RowNotNormalized,
                    format!("row for {} contains a negative entry", m.id),
                );
                continue;
            }
            let sum: Rational = row.entries.iter().sum();
            if !sum.is_one() {
                push(
                    row.span,
                    ParseErrorKind::RowNotNormalized,
                    format!("row for {} sums to {sum} ≠ 1", m.id),
                );
            }
        }
        for (m, _, _) in measurements {
            if !c.rows.iter().any(|row| row.measurement == m.id) {
                push(
                    c.id_span,
                    ParseErrorKind::MissingTable,
                    format!("circumstance {} has no row for measurement {}", c.id, m.id),
                );
            }
        }
    }
    if !circumstances.is_empty() && !weight_sum.is_one() {
        push(
            model_span,
            ParseErrorKind::WeightsNotNormalized,
            format!("weights sum to {weight_sum} ≠ 1"),
        );
    }
}

fn escape_label(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Canonical serialization: measurements then circumstances in model order,
/// one declaration per line, rows indented two spaces, rationals in lowest
/// terms. `parse(serialize(m))` is structurally equal to `m`, and
/// serialization is idempotent.
pub fn serialize(model: &CircumstanceModel) -> Result<String, crate::error::Error> {
    model.require_valid()?;
    let mut out = String::new();
    out.push_str(&format!("model {}\n", model.name));
    for m in &model.measurements {
        out.push_str(&format!(
            "measurement {} {{ {} }}\n",
            m.id,
            m.outcomes.join(" ")
        ));
    }
    for c in &model.circumstances {
        out.push_str(&format!("circumstance {}", c.id));
        if let Some(label) = &c.label {
            out.push_str(&format!(" label \"{}\"", escape_label(label)));
        }
        out.push_str(&format!(" weight {} {{\n", c.weight));
        for m in &model.measurements {
            let row = c.tables.get(&m.id).expect("validated model");
            let entries: Vec<String> = row.entries().iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("  {}: {}\n", m.id, entries.join(" ")));
        }
        out.push_str("}\n");
    }
    Ok(out)
}
