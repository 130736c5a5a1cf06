//! Canonical N-Triples serialization and parsing.
//!
//! Output is one triple per line, absolute IRIs in angle brackets, sorted
//! by (subject, predicate, object) and deduplicated, so equal triple sets
//! always produce byte-identical files. Parsing accepts only IRIs under
//! the fixed prefix table.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::model::{Datatype, Iri, Literal, ModelError, Term, Triple};
use crate::vocab::Prefix;

#[derive(Debug, Error)]
pub enum NtriplesError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: IRI <{iri}> is outside the registered namespaces")]
    UnknownNamespace { line: usize, iri: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> NtriplesError {
    NtriplesError::Syntax { line, message: message.into() }
}

/// Escape a literal's lexical form per the N-Triples string grammar.
/// Non-ASCII text passes through as UTF-8.
fn escape_literal(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

fn render_object(object: &Term) -> String {
    match object {
        Term::Iri(iri) => format!("<{}>", iri.absolute()),
        Term::Literal(lit) => match lit.datatype() {
            None => format!("\"{}\"", escape_literal(lit.lexical())),
            Some(dt) => format!("\"{}\"^^<{}>", escape_literal(lit.lexical()), dt.xsd_iri()),
        },
    }
}

/// One rendered line, without the trailing newline.
pub fn render_triple(triple: &Triple) -> String {
    format!(
        "<{}> <{}> {} .",
        triple.subject.absolute(),
        triple.predicate.absolute(),
        render_object(&triple.object)
    )
}

/// Canonical line set: rendered, sorted by (subject, predicate, object),
/// deduplicated.
fn canonical_lines(triples: &[Triple]) -> Vec<String> {
    let mut keyed: Vec<(String, String, String)> = triples
        .iter()
        .map(|t| {
            (
                t.subject.absolute(),
                t.predicate.absolute(),
                render_object(&t.object),
            )
        })
        .collect();
    keyed.sort();
    keyed.dedup();
    keyed
        .into_iter()
        .map(|(s, p, o)| format!("<{s}> <{p}> {o} ."))
        .collect()
}

/// Write the canonical serialization; returns the number of bytes written.
pub fn serialize_ntriples<W: Write>(triples: &[Triple], mut sink: W) -> Result<u64, NtriplesError> {
    let mut written = 0u64;
    for line in canonical_lines(triples) {
        sink.write_all(line.as_bytes())?;
        sink.write_all(b"\n")?;
        written += line.len() as u64 + 1;
    }
    sink.flush()?;
    Ok(written)
}

pub fn serialize_to_string(triples: &[Triple]) -> String {
    let mut out = String::new();
    for line in canonical_lines(triples) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_ntriples_file(triples: &[Triple], path: &Path) -> Result<u64, NtriplesError> {
    let file = fs::File::create(path)?;
    serialize_ntriples(triples, io::BufWriter::new(file))
}

pub fn read_ntriples_file(path: &Path) -> Result<Vec<Triple>, NtriplesError> {
    parse_ntriples(&fs::read_to_string(path)?)
}

/// Parse N-Triples text. Blank lines and `#` comment lines are skipped.
pub fn parse_ntriples(source: &str) -> Result<Vec<Triple>, NtriplesError> {
    let mut triples = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        triples.push(parse_line(line, line_no)?);
    }
    Ok(triples)
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn expect_ws(&mut self) -> Result<(), NtriplesError> {
        if !self.rest.starts_with([' ', '\t']) {
            return Err(syntax(self.line, "expected whitespace between terms"));
        }
        self.skip_ws();
        Ok(())
    }

    /// `<...>` → the absolute IRI text inside the brackets.
    fn take_iri_ref(&mut self) -> Result<&'a str, NtriplesError> {
        let body = self
            .rest
            .strip_prefix('<')
            .ok_or_else(|| syntax(self.line, "expected '<'"))?;
        let close = body
            .find('>')
            .ok_or_else(|| syntax(self.line, "unterminated IRI (missing '>')"))?;
        let iri = &body[..close];
        self.rest = &body[close + 1..];
        Ok(iri)
    }

    /// `"..."` with escapes → the unescaped lexical form.
    fn take_string(&mut self) -> Result<String, NtriplesError> {
        let body = self
            .rest
            .strip_prefix('"')
            .ok_or_else(|| syntax(self.line, "expected '\"'"))?;
        let mut out = String::new();
        let mut chars = body.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = &body[i + 1..];
                    return Ok(out);
                }
                '\\' => {
                    let (_, esc) = chars
                        .next()
                        .ok_or_else(|| syntax(self.line, "dangling escape"))?;
                    match esc {
                        't' => out.push('\t'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        '"' => out.push('"'),
                        '\\' => out.push('\\'),
                        'u' | 'U' => {
                            let len = if esc == 'u' { 4 } else { 8 };
                            let mut code = 0u32;
                            for _ in 0..len {
                                let (_, h) = chars.next().ok_or_else(|| {
                                    syntax(self.line, "truncated \\u escape")
                                })?;
                                let digit = h.to_digit(16).ok_or_else(|| {
                                    syntax(self.line, format!("bad hex digit {h:?} in \\u escape"))
                                })?;
                                code = code * 16 + digit;
                            }
                            let decoded = char::from_u32(code).ok_or_else(|| {
                                syntax(self.line, format!("\\u{code:X} is not a scalar value"))
                            })?;
                            out.push(decoded);
                        }
                        other => {
                            return Err(syntax(self.line, format!("unknown escape \\{other}")))
                        }
                    }
                }
                c => out.push(c),
            }
        }
        Err(syntax(self.line, "unterminated string literal"))
    }
}

/// Resolve an absolute IRI against the prefix table.
fn resolve_iri(absolute: &str, line: usize) -> Result<Iri, NtriplesError> {
    for prefix in Prefix::ALL {
        if let Some(local) = absolute.strip_prefix(prefix.base()) {
            return Iri::from_encoded(prefix, local)
                .map_err(|e| syntax(line, format!("invalid IRI local part: {e}")));
        }
    }
    Err(NtriplesError::UnknownNamespace { line, iri: absolute.to_string() })
}

fn parse_line(line: &str, line_no: usize) -> Result<Triple, NtriplesError> {
    let mut cur = Cursor { rest: line, line: line_no };
    let subject = resolve_iri(cur.take_iri_ref()?, line_no)?;
    cur.expect_ws()?;
    let predicate = resolve_iri(cur.take_iri_ref()?, line_no)?;
    cur.expect_ws()?;
    let object = if cur.rest.starts_with('<') {
        Term::Iri(resolve_iri(cur.take_iri_ref()?, line_no)?)
    } else if cur.rest.starts_with('"') {
        let lexical = cur.take_string()?;
        if let Some(rest) = cur.rest.strip_prefix("^^") {
            cur.rest = rest;
            let dt_iri = cur.take_iri_ref()?;
            let datatype = Datatype::from_xsd_iri(dt_iri)
                .ok_or_else(|| syntax(line_no, format!("unsupported datatype <{dt_iri}>")))?;
            let literal = Literal::typed(lexical, datatype)
                .map_err(|e| syntax(line_no, e.to_string()))?;
            Term::Literal(literal)
        } else {
            Term::Literal(Literal::string(lexical))
        }
    } else {
        return Err(syntax(line_no, "expected IRI or literal object"));
    };
    cur.skip_ws();
    let after_dot = cur
        .rest
        .strip_prefix('.')
        .ok_or_else(|| syntax(line_no, "missing terminal '.'"))?;
    if !after_dot.trim().is_empty() {
        return Err(syntax(line_no, "trailing content after terminal '.'"));
    }
    Triple::new(subject, predicate, object).map_err(|e: ModelError| syntax(line_no, e.to_string()))
}
