//! Plain-text matrix files and the row-stream line protocol.
//!
//! Matrix file:
//!
//! ```text
//! # comment lines start with '#'; blank lines are ignored
//! 3 3
//! 0 0,-3 0
//! 0,2 1 -1
//! 0,4 2,-3 -2
//! ```
//!
//! The header holds the row and column counts. Each entry is `re` or `re,im`
//! with no interior whitespace.
//!
//! Stream: a header `n <count>`, then one line per row with `count` entries,
//! a `|`, and one right-hand-side entry, then a terminating `END` line.

use std::fmt::Write as _;

use rowortho_core::{ComplexMatrix, C64};
use thiserror::Error;

/// Parse failure with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses one `re` or `re,im` entry.
pub fn parse_entry(token: &str) -> Result<C64, String> {
    let bad = || format!("malformed entry '{token}', expected re or re,im");
    match token.split_once(',') {
        None => parse_real(token)
            .map(|re| C64::new(re, 0.0))
            .ok_or_else(bad),
        Some((re, im)) => match (parse_real(re), parse_real(im)) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(bad()),
        },
    }
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (idx, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col, idx)),
            (true, Some((c0, i0))) => {
                out.push((c0 + 1, &line[i0..idx]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c0, i0)) = start {
        out.push((c0 + 1, &line[i0..]));
    }
    out.into_iter()
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

fn parse_count(token: &str, line: usize, column: usize, what: &str) -> Result<usize, ParseError> {
    match token.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(ParseError::new(
            line,
            column,
            format!("{what} must be a positive integer, got '{token}'"),
        )),
    }
}

fn parse_row(line_no: usize, line: &str, n: usize, offset: usize) -> Result<Vec<C64>, ParseError> {
    let toks: Vec<_> = tokens(line).collect();
    if toks.len() != n {
        return Err(ParseError::new(
            line_no,
            toks.get(n).map_or(1, |t| t.0 + offset),
            format!("expected {n} entries, found {}", toks.len()),
        ));
    }
    toks.into_iter()
        .map(|(col, tok)| parse_entry(tok).map_err(|m| ParseError::new(line_no, col + offset, m)))
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !is_skippable(l));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, 1, "missing header 'rows cols'"))?;
    let head: Vec<_> = tokens(header).collect();
    if head.len() != 2 {
        return Err(ParseError::new(hline, 1, "header must be 'rows cols'"));
    }
    let m = parse_count(head[0].1, hline, head[0].0, "row count")?;
    let n = parse_count(head[1].1, hline, head[1].0, "column count")?;

    let mut data = Vec::with_capacity(m * n);
    let mut last_line = hline;
    for _ in 0..m {
        let (no, line) = lines.next().ok_or_else(|| {
            ParseError::new(
                last_line + 1,
                1,
                format!("expected {m} rows, found {}", data.len() / n),
            )
        })?;
        data.extend(parse_row(no, line, n, 0)?);
        last_line = no;
    }
    if let Some((no, _)) = lines.next() {
        return Err(ParseError::new(
            no,
            1,
            format!("unexpected content after {m} rows"),
        ));
    }
    ComplexMatrix::new(m, n, data).map_err(|e| ParseError::new(hline, 1, e.to_string()))
}

/// Serializes `m` in the matrix file format. Entries use the shortest
/// representation that parses back to the same bits.
pub fn write_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{},{}", z.re, z.im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// One line of the stream protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamLine {
    Row { a: Vec<C64>, b: C64 },
    End,
    Skip,
}

/// Parses the `n <count>` header line. Returns `None` for comments and blanks.
pub fn parse_stream_header(line_no: usize, line: &str) -> Result<Option<usize>, ParseError> {
    if is_skippable(line) {
        return Ok(None);
    }
    let toks: Vec<_> = tokens(line).collect();
    match toks.as_slice() {
        [(_, "n"), (col, count)] => parse_count(count, line_no, *col, "column count").map(Some),
        _ => Err(ParseError::new(line_no, 1, "expected header 'n <count>'")),
    }
}

pub fn parse_stream_line(line_no: usize, line: &str, n: usize) -> Result<StreamLine, ParseError> {
    if is_skippable(line) {
        return Ok(StreamLine::Skip);
    }
    if line.trim() == "END" {
        return Ok(StreamLine::End);
    }
    let Some((lhs, rhs)) = line.split_once('|') else {
        return Err(ParseError::new(
            line_no,
            1,
            "missing '|': expected '<entries> | <rhs>' or END",
        ));
    };
    let a = parse_row(line_no, lhs, n, 0)?;
    let offset = lhs.chars().count() + 1;
    let rhs_toks: Vec<_> = tokens(rhs).collect();
    match rhs_toks.as_slice() {
        [(col, tok)] => {
            let b = parse_entry(tok).map_err(|m| ParseError::new(line_no, col + offset, m))?;
            Ok(StreamLine::Row { a, b })
        }
        _ => Err(ParseError::new(
            line_no,
            offset,
            format!(
                "expected exactly one rhs entry after '|', found {}",
                rhs_toks.len()
            ),
        )),
    }
}
