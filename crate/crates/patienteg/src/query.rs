//! A minimal conjunctive graph-pattern query language over the triple
//! store: `SELECT [DISTINCT] ?vars` or `SELECT COUNT(DISTINCT ?var)`, a
//! `WHERE` block of dot-terminated triple patterns, no prefix
//! declarations (the namespace table is fixed). No OPTIONAL, FILTER,
//! UNION, or paths.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{Iri, Literal, Term};
use crate::store::{Slot, TripleStore};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("selected variable ?{0} does not occur in any pattern")]
    UnboundSelectVariable(String),
    #[error("patterns do not form a connected variable graph")]
    DisconnectedPattern,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> QueryError {
    QueryError::Syntax { line, col, message: message.into() }
}

/// One slot of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Variable(String),
    Iri(Iri),
    Literal(Literal),
}

impl PatternTerm {
    fn variable(&self) -> Option<&str> {
        match self {
            PatternTerm::Variable(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    fn variables(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(PatternTerm::variable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    Vars { distinct: bool, vars: Vec<String> },
    CountDistinct(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub selection: Selection,
    pub patterns: Vec<TriplePattern>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Word(String),
    Variable(String),
    Literal(String),
    Open,
    Close,
    LParen,
    RParen,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) => write!(f, "`{w}`"),
            TokenKind::Variable(v) => write!(f, "`?{v}`"),
            TokenKind::Literal(_) => f.write_str("string literal"),
            TokenKind::Open => f.write_str("`{`"),
            TokenKind::Close => f.write_str("`}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Dot => f.write_str("`.`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            _ if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '#' => {
                for c in chars.by_ref() {
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            '{' | '}' | '(' | ')' | '.' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let kind = match c {
                    '{' => TokenKind::Open,
                    '}' => TokenKind::Close,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    _ => TokenKind::Dot,
                };
                tokens.push(Token { kind, line: tl, col: tc });
            }
            '"' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let mut value = String::new();
                loop {
                    let Some(c) = chars.next() else {
                        return Err(syntax(tl, tc, "unterminated string literal"));
                    };
                    bump(c, &mut line, &mut col);
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(esc) = chars.next() else {
                                return Err(syntax(tl, tc, "unterminated string literal"));
                            };
                            bump(esc, &mut line, &mut col);
                            value.push(match esc {
                                '\\' => '\\',
                                '"' => '"',
                                'n' => '\n',
                                'r' => '\r',
                                't' => '\t',
                                other => {
                                    return Err(syntax(
                                        line,
                                        col,
                                        format!("unsupported escape `\\{other}`"),
                                    ))
                                }
                            });
                        }
                        '\n' => return Err(syntax(tl, tc, "unterminated string literal")),
                        other => value.push(other),
                    }
                }
                tokens.push(Token { kind: TokenKind::Literal(value), line: tl, col: tc });
            }
            '?' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    return Err(syntax(tl, tc, "`?` must be followed by a variable name"));
                }
                tokens.push(Token { kind: TokenKind::Variable(name), line: tl, col: tc });
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '{' | '}' | '(' | ')' | '.' | '"' | '?' | '#')
                    {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    bump(c, &mut line, &mut col);
                }
                tokens.push(Token { kind: TokenKind::Word(word), line: tl, col: tc });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, expected: &str) -> Result<Token, QueryError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(syntax(self.end.0, self.end.1, format!("expected {expected}, found end of query"))),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<(), QueryError> {
        let t = self.next(&format!("`{keyword}`"))?;
        match &t.kind {
            TokenKind::Word(w) if w.eq_ignore_ascii_case(keyword) => Ok(()),
            other => Err(syntax(t.line, t.col, format!("expected `{keyword}`, found {other}"))),
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), QueryError> {
        let t = self.next(what)?;
        if t.kind == *kind {
            Ok(())
        } else {
            Err(syntax(t.line, t.col, format!("expected {what}, found {}", t.kind)))
        }
    }

    fn expect_variable(&mut self) -> Result<String, QueryError> {
        let t = self.next("a variable")?;
        match t.kind {
            TokenKind::Variable(v) => Ok(v),
            other => Err(syntax(t.line, t.col, format!("expected a variable, found {other}"))),
        }
    }

    fn is_keyword(&self, keyword: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Word(w), .. })
            if w.eq_ignore_ascii_case(keyword))
    }
}

fn parse_selection(p: &mut Parser) -> Result<Selection, QueryError> {
    p.expect_keyword("SELECT")?;
    if p.is_keyword("COUNT") {
        p.next("`COUNT`")?;
        p.expect(&TokenKind::LParen, "`(`")?;
        p.expect_keyword("DISTINCT")?;
        let var = p.expect_variable()?;
        p.expect(&TokenKind::RParen, "`)`")?;
        return Ok(Selection::CountDistinct(var));
    }
    let distinct = if p.is_keyword("DISTINCT") {
        p.next("`DISTINCT`")?;
        true
    } else {
        false
    };
    let mut vars = vec![p.expect_variable()?];
    while matches!(p.peek(), Some(Token { kind: TokenKind::Variable(_), .. })) {
        vars.push(p.expect_variable()?);
    }
    Ok(Selection::Vars { distinct, vars })
}

fn parse_term(p: &mut Parser, position: &str, allow_literal: bool) -> Result<PatternTerm, QueryError> {
    let t = p.next(&format!("a {position} term"))?;
    match t.kind {
        TokenKind::Variable(v) => Ok(PatternTerm::Variable(v)),
        TokenKind::Literal(s) => {
            if allow_literal {
                Ok(PatternTerm::Literal(Literal::string(s)))
            } else {
                Err(syntax(t.line, t.col, format!("a literal cannot appear as a {position}")))
            }
        }
        TokenKind::Word(w) => Iri::parse_prefixed(&w).map(PatternTerm::Iri).ok_or_else(|| {
            syntax(t.line, t.col, format!("`{w}` is not a prefixed name under the fixed namespace table"))
        }),
        other => Err(syntax(t.line, t.col, format!("expected {position} term, found {other}"))),
    }
}

fn connected(patterns: &[TriplePattern]) -> bool {
    if patterns.len() <= 1 {
        return true;
    }
    // Union-find over pattern indexes, joined through shared variables.
    let mut parent: Vec<usize> = (0..patterns.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, pattern) in patterns.iter().enumerate() {
        for v in pattern.variables() {
            match owner.get(v) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                None => {
                    owner.insert(v, i);
                }
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..patterns.len()).all(|i| find(&mut parent, i) == root)
}

/// Parse and validate a query.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let tokens = tokenize(text)?;
    let last_line = text.lines().count().max(1);
    let end = (last_line, text.lines().last().map_or(1, |l| l.chars().count() + 1));
    let mut p = Parser { tokens, pos: 0, end };
    let selection = parse_selection(&mut p)?;
    p.expect_keyword("WHERE")?;
    p.expect(&TokenKind::Open, "`{`")?;
    let mut patterns = Vec::new();
    loop {
        if let Some(t) = p.peek() {
            if t.kind == TokenKind::Close {
                p.next("`}`")?;
                break;
            }
        }
        let subject = parse_term(&mut p, "subject", false)?;
        let predicate = parse_term(&mut p, "predicate", false)?;
        let object = parse_term(&mut p, "object", true)?;
        p.expect(&TokenKind::Dot, "`.`")?;
        patterns.push(TriplePattern { subject, predicate, object });
    }
    if let Some(t) = p.peek() {
        return Err(syntax(t.line, t.col, format!("unexpected {} after `}}`", t.kind)));
    }
    if patterns.is_empty() {
        return Err(syntax(end.0, end.1, "WHERE block contains no patterns"));
    }
    let query = Query { selection, patterns };
    validate(&query)?;
    Ok(query)
}

fn validate(query: &Query) -> Result<(), QueryError> {
    let in_patterns: BTreeSet<&str> =
        query.patterns.iter().flat_map(TriplePattern::variables).collect();
    let selected: Vec<&str> = match &query.selection {
        Selection::Vars { vars, .. } => vars.iter().map(String::as_str).collect(),
        Selection::CountDistinct(v) => vec![v],
    };
    for v in selected {
        if !in_patterns.contains(v) {
            return Err(QueryError::UnboundSelectVariable(v.to_string()));
        }
    }
    if !connected(&query.patterns) {
        return Err(QueryError::DisconnectedPattern);
    }
    Ok(())
}

/// Query outcome: a projected table or a distinct count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Table { vars: Vec<String>, rows: Vec<Vec<Term>> },
    Count(usize),
}

type Row = BTreeMap<String, Term>;

fn iri_slot(term: &PatternTerm, row: &Row) -> Option<Slot<Iri>> {
    match term {
        PatternTerm::Iri(iri) => Some(Slot::Bound(iri.clone())),
        PatternTerm::Literal(_) => None,
        PatternTerm::Variable(v) => match row.get(v) {
            Some(Term::Iri(iri)) => Some(Slot::Bound(iri.clone())),
            Some(Term::Literal(_)) => None,
            None => Some(Slot::Any),
        },
    }
}

fn object_slot(term: &PatternTerm, row: &Row) -> Slot<Term> {
    match term {
        PatternTerm::Iri(iri) => Slot::Bound(Term::Iri(iri.clone())),
        PatternTerm::Literal(lit) => Slot::Bound(Term::Literal(lit.clone())),
        PatternTerm::Variable(v) => match row.get(v) {
            Some(t) => Slot::Bound(t.clone()),
            None => Slot::Any,
        },
    }
}

fn bind(row: &mut Row, term: &PatternTerm, actual: Term) -> bool {
    match term {
        PatternTerm::Variable(v) => match row.get(v) {
            Some(existing) => *existing == actual,
            None => {
                row.insert(v.clone(), actual);
                true
            }
        },
        _ => true,
    }
}

/// Static selectivity: matching-triple count with only ground slots bound.
fn pattern_count(store: &TripleStore, pattern: &TriplePattern) -> usize {
    let empty = Row::new();
    let Some(s) = iri_slot(&pattern.subject, &empty) else { return 0 };
    let Some(p) = iri_slot(&pattern.predicate, &empty) else { return 0 };
    let o = object_slot(&pattern.object, &empty);
    store.count_pattern(&s, &p, &o)
}

/// Join order: most selective first, then greedily by the number of
/// already-bound variables, breaking ties by selectivity then position.
fn join_order(store: &TripleStore, patterns: &[TriplePattern]) -> Vec<usize> {
    let counts: Vec<usize> = patterns.iter().map(|p| pattern_count(store, p)).collect();
    let mut remaining: Vec<usize> = (0..patterns.len()).collect();
    let mut order = Vec::with_capacity(patterns.len());
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .copied()
            .min_by_key(|&i| {
                let shared = patterns[i].variables().filter(|v| bound.contains(v)).count();
                (std::cmp::Reverse(if order.is_empty() { 0 } else { shared }), counts[i], i)
            })
            .unwrap();
        remaining.retain(|&i| i != pick);
        bound.extend(patterns[pick].variables());
        order.push(pick);
    }
    order
}

/// Evaluate a validated query against a store.
pub fn evaluate(store: &TripleStore, query: &Query) -> QueryResult {
    let order = join_order(store, &query.patterns);
    let mut rows: Vec<Row> = vec![Row::new()];
    for &i in &order {
        let pattern = &query.patterns[i];
        let mut next = Vec::new();
        for row in &rows {
            let (Some(s), Some(p)) =
                (iri_slot(&pattern.subject, row), iri_slot(&pattern.predicate, row))
            else {
                continue; // a variable bound to a literal can never name a subject or predicate
            };
            let o = object_slot(&pattern.object, row);
            for triple in store.match_pattern(&s, &p, &o) {
                let mut extended = row.clone();
                if bind(&mut extended, &pattern.subject, Term::Iri(triple.subject))
                    && bind(&mut extended, &pattern.predicate, Term::Iri(triple.predicate))
                    && bind(&mut extended, &pattern.object, triple.object)
                {
                    next.push(extended);
                }
            }
        }
        rows = next;
        if rows.is_empty() {
            break;
        }
    }
    match &query.selection {
        Selection::CountDistinct(var) => {
            let values: BTreeSet<&Term> = rows.iter().filter_map(|r| r.get(var)).collect();
            QueryResult::Count(values.len())
        }
        Selection::Vars { distinct, vars } => {
            let mut projected: Vec<Vec<Term>> = rows
                .iter()
                .map(|r| vars.iter().map(|v| r[v].clone()).collect())
                .collect();
            if *distinct {
                let set: BTreeSet<Vec<Term>> = projected.into_iter().collect();
                projected = set.into_iter().collect();
            }
            projected.sort_by(|a, b| render_row(a).cmp(&render_row(b)).then_with(|| a.cmp(b)));
            QueryResult::Table { vars: vars.clone(), rows: projected }
        }
    }
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn render_term(term: &Term) -> String {
    match term {
        Term::Iri(iri) => iri.to_string(),
        Term::Literal(lit) => lit.lexical().to_string(),
    }
}

fn render_row(row: &[Term]) -> String {
    row.iter().map(|t| csv_field(&render_term(t))).collect::<Vec<_>>().join(",")
}

/// Render a result per the output contract: CSV with a variable-name
/// header and lexicographically sorted rows, or a bare count line.
pub fn render_result(result: &QueryResult) -> String {
    match result {
        QueryResult::Count(n) => format!("{n}\n"),
        QueryResult::Table { vars, rows } => {
            let mut out = vars.join(",");
            out.push('\n');
            for row in rows {
                out.push_str(&render_row(row));
                out.push('\n');
            }
            out
        }
    }
}
