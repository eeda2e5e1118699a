//! Line-oriented text formats for incidence structures, designs, ovoids and
//! local resolution systems.
//!
//! Indices are 0-based, `#` starts a comment line, blank lines are skipped
//! and lines end in LF. [`print`] output parses back to the same value and
//! prints to the same bytes.

use std::fmt::Write as _;

use gqdesign::structures::{Design, IncidenceStructure, LocalResolutionSystem, Ovoid};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub enum Document {
    Incidence(IncidenceStructure),
    Design(Design),
    Ovoid(Ovoid),
    Lrs(LocalResolutionSystem),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Incidence(_) => "inc",
            Document::Design(_) => "design",
            Document::Ovoid(_) => "ovoid",
            Document::Lrs(_) => "lrs",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    /// Column just past the last character, for "missing value" errors.
    end: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, column, message: message.into() }
}

fn lex(input: &str) -> Result<Vec<Line<'_>>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in input.split('\n').enumerate() {
        let number = i + 1;
        if let Some(pos) = raw.find('\r') {
            return Err(err(number, pos + 1, "carriage return; lines must end in LF"));
        }
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
            if ch == ' ' || ch == '\t' {
                if let Some(s) = start.take() {
                    tokens.push(Token { text: &raw[s..pos], line: number, column: s + 1 });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if !tokens.is_empty() {
            out.push(Line { number, tokens, end: raw.len() + 1 });
        }
    }
    Ok(out)
}

fn number(t: Token) -> Result<usize, FormatError> {
    t.text.parse().map_err(|_| err(t.line, t.column, format!("expected a non-negative integer, found `{}`", t.text)))
}

/// Strictly increasing indices below `bound`.
fn index_list(tokens: &[Token], bound: usize, what: &str) -> Result<Vec<usize>, FormatError> {
    let mut out: Vec<usize> = Vec::with_capacity(tokens.len());
    for &t in tokens {
        let x = number(t)?;
        if x >= bound {
            return Err(err(t.line, t.column, format!("{what} {x} out of range (must be below {bound})")));
        }
        if out.last().is_some_and(|&prev| prev >= x) {
            return Err(err(t.line, t.column, format!("{what} {x} is not in strictly increasing order")));
        }
        out.push(x);
    }
    Ok(out)
}

fn header<'a>(lines: &[Line<'a>], keyword: &str, arity: usize) -> Result<Vec<usize>, FormatError> {
    let first = lines.first().ok_or_else(|| err(1, 1, format!("empty file; expected a `{keyword}` header")))?;
    let head = first.tokens[0];
    if head.text != keyword {
        return Err(err(head.line, head.column, format!("expected `{keyword}` header, found `{}`", head.text)));
    }
    if first.tokens.len() != arity + 1 {
        let col = first.tokens.get(arity + 1).map_or(first.end, |t| t.column);
        return Err(err(first.number, col, format!("`{keyword}` header takes {arity} numbers")));
    }
    first.tokens[1..].iter().map(|&t| number(t)).collect()
}

fn expect_rows<'a>(lines: &'a [Line<'a>], count: usize, last_line: usize) -> Result<&'a [Line<'a>], FormatError> {
    let rows = &lines[1..];
    if rows.len() < count {
        return Err(err(last_line, 1, format!("expected {count} rows after the header, found {}", rows.len())));
    }
    if rows.len() > count {
        let extra = &rows[count];
        return Err(err(extra.number, 1, format!("unexpected row; header declares {count}")));
    }
    Ok(rows)
}

fn line_count(input: &str) -> usize {
    input.split('\n').count()
}

pub fn parse_incidence(input: &str) -> Result<IncidenceStructure, FormatError> {
    let lines = lex(input)?;
    let h = header(&lines, "inc", 2)?;
    let rows = expect_rows(&lines, h[1], line_count(input))?;
    let blocks = rows
        .iter()
        .map(|r| index_list(&r.tokens, h[0], "point"))
        .collect::<Result<Vec<_>, _>>()?;
    IncidenceStructure::new(h[0], blocks).map_err(|e| err(1, 1, e.to_string()))
}

pub fn parse_design(input: &str) -> Result<Design, FormatError> {
    let lines = lex(input)?;
    let h = header(&lines, "design", 2)?;
    let rows = expect_rows(&lines, h[1], line_count(input))?;
    let blocks = rows
        .iter()
        .map(|r| index_list(&r.tokens, h[0], "point"))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(r) = rows.iter().find(|r| r.tokens.len() != rows[0].tokens.len()) {
        return Err(err(r.number, 1, "blocks must all have the same size"));
    }
    Design::new(h[0], blocks).map_err(|e| err(1, 1, e.to_string()))
}

pub fn parse_ovoid(input: &str) -> Result<Ovoid, FormatError> {
    let lines = lex(input)?;
    let h = header(&lines, "ovoid", 1)?;
    let rows = expect_rows(&lines, 1, line_count(input))?;
    let row = &rows[0];
    if row.tokens.len() != h[0] {
        return Err(err(row.number, 1, format!("header declares {} points, row has {}", h[0], row.tokens.len())));
    }
    Ok(Ovoid::new(index_list(&row.tokens, usize::MAX, "point")?))
}

pub fn parse_lrs(input: &str) -> Result<LocalResolutionSystem, FormatError> {
    let lines = lex(input)?;
    let h = header(&lines, "lrs", 1)?;
    let v = h[0];
    let mut classes: Vec<Vec<Vec<usize>>> = Vec::with_capacity(v);
    for line in &lines[1..] {
        let head = line.tokens[0];
        match head.text {
            "point" => {
                if line.tokens.len() != 2 {
                    return Err(err(line.number, line.end, "`point` takes one index"));
                }
                let p = number(line.tokens[1])?;
                if p != classes.len() || p >= v {
                    let want = if classes.len() < v { format!("point {}", classes.len()) } else { "no more points".into() };
                    return Err(err(line.number, line.tokens[1].column, format!("found point {p}, expected {want}")));
                }
                classes.push(Vec::new());
            }
            "class" => {
                let current = classes
                    .last_mut()
                    .ok_or_else(|| err(head.line, head.column, "`class` before any `point` section"))?;
                if line.tokens.len() == 1 {
                    return Err(err(line.number, line.end, "empty class"));
                }
                current.push(index_list(&line.tokens[1..], usize::MAX, "instance")?);
            }
            other => {
                return Err(err(head.line, head.column, format!("expected `point` or `class`, found `{other}`")));
            }
        }
    }
    if classes.len() != v {
        return Err(err(line_count(input), 1, format!("header declares {v} points, found {} sections", classes.len())));
    }
    if let Some(p) = classes.iter().position(|c| c.is_empty()) {
        return Err(err(line_count(input), 1, format!("point {p} has no classes")));
    }
    Ok(LocalResolutionSystem::new(classes))
}

/// Dispatches on the header keyword.
pub fn parse_any(input: &str) -> Result<Document, FormatError> {
    let lines = lex(input)?;
    let head = lines.first().map(|l| l.tokens[0]).ok_or_else(|| err(1, 1, "empty file"))?;
    match head.text {
        "inc" => parse_incidence(input).map(Document::Incidence),
        "design" => parse_design(input).map(Document::Design),
        "ovoid" => parse_ovoid(input).map(Document::Ovoid),
        "lrs" => parse_lrs(input).map(Document::Lrs),
        other => Err(err(head.line, head.column, format!("unknown header `{other}`"))),
    }
}

fn push_row(out: &mut String, row: &[usize]) {
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{x}").unwrap();
    }
    out.push('\n');
}

pub fn print_incidence(s: &IncidenceStructure) -> String {
    let mut out = format!("inc {} {}\n", s.point_count(), s.line_count());
    s.lines().iter().for_each(|l| push_row(&mut out, l));
    out
}

pub fn print_design(d: &Design) -> String {
    let mut out = format!("design {} {}\n", d.point_count(), d.block_count());
    d.blocks().iter().for_each(|b| push_row(&mut out, b));
    out
}

pub fn print_ovoid(o: &Ovoid) -> String {
    let mut out = format!("ovoid {}\n", o.len());
    push_row(&mut out, o.points());
    out
}

pub fn print_lrs(lrs: &LocalResolutionSystem) -> String {
    let mut out = format!("lrs {}\n", lrs.point_count());
    for (p, classes) in lrs.classes().iter().enumerate() {
        writeln!(out, "point {p}").unwrap();
        for class in classes {
            out.push_str("class ");
            push_row(&mut out, class);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn print(doc: &Document) -> String {
        match doc {
            Document::Incidence(s) => print_incidence(s),
            Document::Design(d) => print_design(d),
            Document::Ovoid(o) => print_ovoid(o),
            Document::Lrs(l) => print_lrs(l),
        }
    }

    fn roundtrip(text: &str) {
        let doc = parse_any(text).unwrap();
        assert_eq!(print(&doc), text);
    }

    #[test]
    fn printed_documents_parse_back_byte_exact() {
        roundtrip("inc 4 2\n0 1\n2 3\n");
        roundtrip("design 3 4\n0 1\n0 1\n0 2\n1 2\n");
        roundtrip("ovoid 3\n0 4 8\n");
        roundtrip("lrs 2\npoint 0\nclass 0 1\nclass 2\npoint 1\nclass 3\n");
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let d = parse_design("# a comment\ndesign 3 1\n\n  # indented comment\n0 1 2\n").unwrap();
        assert_eq!(print_design(&d), "design 3 1\n0 1 2\n");
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_incidence("inc 3 1\n0 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_incidence("inc 3 1\n0 5\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_incidence("inc 3 1\n2 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_design("design 3 2\n0 1\n").unwrap_err();
        assert!(e.message.contains("expected 2 rows"));
        let e = parse_design("inc 3 1\n0 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_ovoid("ovoid 2\n0 1\r\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        let e = parse_lrs("lrs 2\npoint 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 7));
        let e = parse_lrs("lrs 1\nclass 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        let e = parse_any("graph 1\n").unwrap_err();
        assert!(e.message.contains("unknown header"));
        assert!(parse_any("").is_err());
    }
}
