//! A Turtle subset: `@prefix`/`PREFIX` declarations, IRIs, prefixed names,
//! string and numeric literals, the `a` keyword, `;` and `,` abbreviations and
//! comments. Blank nodes, collections and `@base` are rejected with a clear error.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::model::{Iri, KnowledgeGraph, Origin, Term, Triple, RDF_TYPE};
use super::KgError;

pub fn parse_turtle(text: &str) -> Result<KnowledgeGraph, KgError> {
    let mut parser = Parser::new(text);
    parser.document()?;
    Ok(KnowledgeGraph::from_triples(parser.triples, Origin::TurtleFile))
}

/// Writes one N-Triples style statement per triple; the output is valid input
/// for [`parse_turtle`].
pub fn serialize_turtle(kg: &KnowledgeGraph) -> String {
    let mut out = String::new();
    for t in kg.triples() {
        let _ = write!(out, "<{}> <{}> ", t.subject, t.predicate);
        match &t.object {
            Term::Iri(iri) => {
                let _ = write!(out, "<{iri}>");
            }
            Term::Literal(s) => write_literal(&mut out, s),
        }
        out.push_str(" .\n");
    }
    out
}

fn write_literal(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: usize,
    column: usize,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    prefixes: HashMap<String, String>,
    triples: Vec<Triple>,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            prefixes: HashMap::new(),
            triples: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Mark {
        Mark { pos: self.pos, line: self.line, column: self.column }
    }

    fn reset(&mut self, mark: Mark) {
        self.pos = mark.pos;
        self.line = mark.line;
        self.column = mark.column;
    }

    fn error_at(&self, mark: Mark, message: impl Into<String>) -> KgError {
        KgError::Syntax { line: mark.line, column: mark.column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> KgError {
        self.error_at(self.mark(), message)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn starts_with_keyword_ci(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        kw.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|p| p.eq_ignore_ascii_case(&c)))
            && self.peek_at(n).is_some_and(char::is_whitespace)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
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

    fn expect(&mut self, expected: char) -> Result<(), KgError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{expected}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{expected}`, found end of input"))),
        }
    }

    fn document(&mut self) -> Result<(), KgError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            if self.starts_with("@prefix") {
                for _ in 0.."@prefix".len() {
                    self.bump();
                }
                self.prefix_body()?;
                self.expect('.')?;
            } else if self.starts_with_keyword_ci("PREFIX") {
                for _ in 0.."PREFIX".len() {
                    self.bump();
                }
                self.prefix_body()?;
            } else if self.starts_with("@base") || self.starts_with_keyword_ci("BASE") {
                return Err(self.error("@base is not supported; use absolute IRIs"));
            } else {
                self.statement()?;
            }
        }
    }

    fn prefix_body(&mut self) -> Result<(), KgError> {
        self.skip_ws();
        let start = self.mark();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.') {
                return Err(self.error(format!("invalid character `{c}` in prefix name")));
            }
            prefix.push(c);
            self.bump();
        }
        if self.peek() != Some(':') {
            return Err(self.error_at(start, "expected `prefix:` in prefix declaration"));
        }
        self.bump();
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(prefix, iri.as_str().to_owned());
        Ok(())
    }

    fn statement(&mut self) -> Result<(), KgError> {
        let subject = self.iri_term("subject")?;
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            loop {
                self.skip_ws();
                let object = self.object()?;
                self.triples.push(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() != Some(';') {
                break;
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if self.peek() == Some('.') {
                break;
            }
        }
        self.expect('.')
    }

    fn verb(&mut self) -> Result<Iri, KgError> {
        if self.peek() == Some('a')
            && self.peek_at(1).is_some_and(|c| c.is_whitespace() || c == '<' || c == '"')
        {
            self.bump();
            return Ok(Iri::new(RDF_TYPE).expect("rdf:type is absolute"));
        }
        self.iri_term("predicate")
    }

    fn reject_unsupported(&self) -> Result<(), KgError> {
        match self.peek() {
            Some('[') => Err(self.error("blank node property lists are not supported")),
            Some('(') => Err(self.error("collections are not supported")),
            Some('_') if self.peek_at(1) == Some(':') => Err(self.error("blank nodes are not supported")),
            _ => Ok(()),
        }
    }

    fn iri_term(&mut self, role: &str) -> Result<Iri, KgError> {
        self.skip_ws();
        self.reject_unsupported()?;
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some(_) => self.prefixed_name(role),
            None => Err(self.error(format!("expected {role}, found end of input"))),
        }
    }

    fn object(&mut self) -> Result<Term, KgError> {
        self.reject_unsupported()?;
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('"') | Some('\'') => self.string_literal(),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => self.numeric_literal(),
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.numeric_literal(),
            Some(_) if self.boolean_ahead() => {
                let mut s = String::new();
                while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                    s.push(self.bump().unwrap_or_default());
                }
                Ok(Term::Literal(s))
            }
            Some(_) => Ok(Term::Iri(self.prefixed_name("object")?)),
            None => Err(self.error("expected object, found end of input")),
        }
    }

    fn boolean_ahead(&self) -> bool {
        ["true", "false"].iter().any(|kw| {
            self.starts_with(kw)
                && !self
                    .peek_at(kw.len())
                    .is_some_and(|c| c.is_alphanumeric() || c == ':' || c == '_' || c == '-')
        })
    }

    fn iri_ref(&mut self) -> Result<Iri, KgError> {
        let start = self.mark();
        if self.bump() != Some('<') {
            return Err(self.error_at(start, "expected `<`"));
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.error_at(start, "unterminated or malformed IRI"));
                }
                Some(c) => value.push(c),
                None => return Err(self.error_at(start, "unterminated IRI")),
            }
        }
        Iri::new(value.clone()).map_err(|_| self.error_at(start, format!("relative IRI <{value}> is not supported")))
    }

    fn unicode_escape(&mut self) -> Result<char, KgError> {
        let at = self.mark();
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error_at(at, "invalid escape sequence")),
        };
        let mut code = 0u32;
        for _ in 0..width {
            let digit = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error_at(at, "invalid unicode escape"))?;
            code = code * 16 + digit;
        }
        char::from_u32(code).ok_or_else(|| self.error_at(at, "invalid unicode code point"))
    }

    fn prefixed_name(&mut self, role: &str) -> Result<Iri, KgError> {
        let start = self.mark();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.') {
                return Err(self.error(format!("expected {role}, found `{c}`")));
            }
            prefix.push(c);
            self.bump();
        }
        if self.peek() != Some(':') {
            return Err(self.error_at(start, format!("expected {role}")));
        }
        self.bump();
        let mut local = String::new();
        let mut marks = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%') {
                marks.push((self.mark(), local.len()));
                local.push(c);
                self.bump();
            } else if c == '\\' {
                marks.push((self.mark(), local.len()));
                self.bump();
                match self.bump() {
                    Some(e) if !e.is_alphanumeric() && !e.is_whitespace() => local.push(e),
                    _ => return Err(self.error("invalid escape in local name")),
                }
            } else {
                break;
            }
        }
        // A trailing `.` terminates the statement instead of belonging to the name.
        while local.ends_with('.') {
            let (mark, len) = marks.pop().expect("non-empty local has marks");
            self.reset(mark);
            local.truncate(len);
        }
        let namespace = self
            .prefixes
            .get(&prefix)
            .ok_or_else(|| KgError::UnknownPrefix(prefix.clone()))?;
        Iri::new(format!("{namespace}{local}")).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn string_literal(&mut self) -> Result<Term, KgError> {
        let start = self.mark();
        let quote = self.bump().unwrap_or('"');
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut value = String::new();
        loop {
            let c = self
                .bump()
                .ok_or_else(|| self.error_at(start, "unterminated string literal"))?;
            if c == quote {
                if !long {
                    break;
                }
                if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                    self.bump();
                    self.bump();
                    break;
                }
                value.push(c);
            } else if c == '\\' {
                let at = self.mark();
                let escaped = match self.peek() {
                    Some('t') => '\t',
                    Some('b') => '\u{8}',
                    Some('n') => '\n',
                    Some('r') => '\r',
                    Some('f') => '\u{c}',
                    Some('"') => '"',
                    Some('\'') => '\'',
                    Some('\\') => '\\',
                    Some('u') | Some('U') => {
                        value.push(self.unicode_escape()?);
                        continue;
                    }
                    _ => return Err(self.error_at(at, "invalid escape sequence in string")),
                };
                self.bump();
                value.push(escaped);
            } else if !long && (c == '\n' || c == '\r') {
                return Err(self.error_at(start, "line break in single-quoted string literal"));
            } else {
                value.push(c);
            }
        }
        // Language tags and datatypes are accepted and dropped.
        if self.peek() == Some('@') {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                self.bump();
            }
        } else if self.starts_with("^^") {
            self.bump();
            self.bump();
            self.iri_term("datatype")?;
        }
        Ok(Term::Literal(value))
    }

    fn numeric_literal(&mut self) -> Result<Term, KgError> {
        let start = self.mark();
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        let mut digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
            digits += 1;
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            s.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                s.push(c);
                self.bump();
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(self.error_at(start, "malformed numeric literal"));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            s.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                s.push(c);
                self.bump();
            }
            let mut exp = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                s.push(c);
                self.bump();
                exp += 1;
            }
            if exp == 0 {
                return Err(self.error_at(start, "malformed exponent"));
            }
        }
        Ok(Term::Literal(s))
    }
}
