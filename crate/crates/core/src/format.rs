//! The `.shg` text format.
//!
//! ```text
//! shg 1
//! points 2
//! names e a          # optional
//! conv 0 0 : 0=1/1
//! conv 1 1 : 0=1/2 1=1/2
//! ```
//!
//! One `conv x y` line per ordered pair, listing the nonzero entries of
//! `p_x * p_y`. `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::structure::{ConvolutionTensor, FiniteSemihypergroup, StructureError};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("expected header `shg {FORMAT_VERSION}` at line {line}")]
    Header { line: usize },
    #[error("expected `points N` at line {line}")]
    Points { line: usize },
    #[error("structure must have at least one point (line {line})")]
    NoPoints { line: usize },
    #[error("expected {expected} names, found {found} at line {line}")]
    Names { line: usize, expected: usize, found: usize },
    #[error("malformed conv line at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("point index {index} out of range for {n} points at line {line}")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("malformed rational `{text}` at line {line}")]
    MalformedRational { line: usize, text: String },
    #[error("negative entry {value} at line {line}")]
    NegativeEntry { line: usize, value: Rational },
    #[error("duplicate row for ({x}, {y}) at line {line} (first at line {first})")]
    DuplicateRow { line: usize, x: usize, y: usize, first: usize },
    #[error("duplicate entry for point {z} at line {line}")]
    DuplicateEntry { line: usize, z: usize },
    #[error("row sum {sum} ≠ 1 at line {line}")]
    RowSum { line: usize, sum: Rational },
    #[error("missing row for ({x}, {y})")]
    MissingRow { x: usize, y: usize },
    #[error("unexpected content at line {line}: `{text}`")]
    Unexpected { line: usize, text: String },
    #[error("empty input")]
    Empty,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTensor {
    pub tensor: ConvolutionTensor,
    pub names: Option<Vec<String>>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_index(line: usize, token: &str, n: usize) -> Result<usize, ParseError> {
    let index: usize = token.parse().map_err(|_| ParseError::MalformedRow {
        line,
        reason: format!("`{token}` is not a point index"),
    })?;
    if index >= n {
        return Err(ParseError::IndexOutOfRange { line, index, n });
    }
    Ok(index)
}

/// Parses the tensor without checking associativity.
pub fn parse_tensor(text: &str) -> Result<ParsedTensor, ParseError> {
    let mut lines = content_lines(text).peekable();
    let (line, header) = lines.next().ok_or(ParseError::Empty)?;
    if header.split_whitespace().collect::<Vec<_>>() != ["shg", FORMAT_VERSION] {
        return Err(ParseError::Header { line });
    }
    let (line, points) = lines.next().ok_or(ParseError::Points { line: line + 1 })?;
    let n = match points.split_whitespace().collect::<Vec<_>>()[..] {
        ["points", count] => count.parse::<usize>().map_err(|_| ParseError::Points { line })?,
        _ => return Err(ParseError::Points { line }),
    };
    if n == 0 {
        return Err(ParseError::NoPoints { line });
    }

    let mut names = None;
    if let Some((line, text)) = lines.peek().copied() {
        let mut tokens = text.split_whitespace();
        if tokens.next() == Some("names") {
            let list: Vec<String> = tokens.map(str::to_string).collect();
            if list.len() != n {
                return Err(ParseError::Names { line, expected: n, found: list.len() });
            }
            names = Some(list);
            lines.next();
        }
    }

    let mut entries = vec![Rational::zero(); n * n * n];
    let mut seen: Vec<Option<usize>> = vec![None; n * n];
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.first() != Some(&"conv") {
            return Err(ParseError::Unexpected { line, text: text.to_string() });
        }
        if tokens.len() < 5 || tokens[3] != ":" {
            return Err(ParseError::MalformedRow { line, reason: "expected `conv x y : z=p/q ...`".into() });
        }
        let x = parse_index(line, tokens[1], n)?;
        let y = parse_index(line, tokens[2], n)?;
        if let Some(first) = seen[x * n + y] {
            return Err(ParseError::DuplicateRow { line, x, y, first });
        }
        seen[x * n + y] = Some(line);
        let mut row = vec![None::<Rational>; n];
        for entry in &tokens[4..] {
            let (z, value) = entry.split_once('=').ok_or_else(|| ParseError::MalformedRow {
                line,
                reason: format!("`{entry}` is not z=p/q"),
            })?;
            let z = parse_index(line, z, n)?;
            let value = rational::parse(value)
                .ok_or_else(|| ParseError::MalformedRational { line, text: value.to_string() })?;
            if value.is_negative() {
                return Err(ParseError::NegativeEntry { line, value });
            }
            if row[z].replace(value).is_some() {
                return Err(ParseError::DuplicateEntry { line, z });
            }
        }
        let sum = row.iter().flatten().fold(Rational::zero(), |acc, v| acc + v);
        if !sum.is_one() {
            return Err(ParseError::RowSum { line, sum });
        }
        for (z, value) in row.into_iter().enumerate() {
            if let Some(value) = value {
                entries[(x * n + y) * n + z] = value;
            }
        }
    }
    if let Some(missing) = seen.iter().position(Option::is_none) {
        return Err(ParseError::MissingRow { x: missing / n, y: missing % n });
    }
    Ok(ParsedTensor { tensor: ConvolutionTensor::new(n, entries)?, names })
}

/// Parses and validates the semihypergroup axioms.
pub fn parse_structure(text: &str) -> Result<FiniteSemihypergroup, ParseError> {
    let parsed = parse_tensor(text)?;
    Ok(FiniteSemihypergroup::new(parsed.tensor, parsed.names)?)
}

/// Canonical text: rows in lexicographic `(x, y)` order, entries by increasing
/// `z`, every value written as `p/q`.
pub fn emit_tensor(tensor: &ConvolutionTensor, names: Option<&[String]>) -> String {
    let n = tensor.points();
    let mut out = format!("shg {FORMAT_VERSION}\npoints {n}\n");
    if let Some(names) = names {
        let _ = writeln!(out, "names {}", names.join(" "));
    }
    for x in 0..n {
        for y in 0..n {
            let _ = write!(out, "conv {x} {y} :");
            for (z, value) in tensor.row(x, y).iter().enumerate() {
                if !value.is_zero() {
                    let _ = write!(out, " {z}={}", rational::format_fraction(value));
                }
            }
            out.push('\n');
        }
    }
    out
}

pub fn emit_structure(k: &FiniteSemihypergroup) -> String {
    emit_tensor(k.tensor(), k.names())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::rational::ratio;

    const TP: &str = "shg 1\npoints 2\n# two-point\nconv 0 0 : 0=1/1\nconv 0 1 : 1=1\n\nconv 1 0 : 1=1/1\nconv 1 1 : 0=1/2 1=1/2   # mixed\n";

    #[test]
    fn parses_commented_input() {
        let k = parse_structure(TP).unwrap();
        assert_eq!(k.tensor(), builders::two_point(&ratio(1, 2)).unwrap().tensor());
        assert!(emit_structure(&k).contains("conv 0 1 : 1=1/1\n"));
    }

    #[test]
    fn round_trip_builders() {
        for k in [builders::s3_classes().unwrap(), builders::left_zero(3).unwrap()] {
            let text = emit_structure(&k);
            let back = parse_structure(&text).unwrap();
            assert_eq!(back, k);
            assert_eq!(emit_structure(&back), text);
        }
    }

    #[test]
    fn row_sum_error_names_line() {
        let text = TP.replace("0=1/2 1=1/2", "0=1/2 1=1/3");
        let err = parse_tensor(&text).unwrap_err();
        assert_eq!(err.to_string(), "row sum 5/6 ≠ 1 at line 8");
    }

    #[test]
    fn structural_errors() {
        let missing = TP.replace("conv 1 0 : 1=1/1\n", "");
        assert_eq!(parse_tensor(&missing).unwrap_err(), ParseError::MissingRow { x: 1, y: 0 });
        let dup = format!("{TP}conv 0 0 : 0=1\n");
        assert!(matches!(parse_tensor(&dup).unwrap_err(), ParseError::DuplicateRow { line: 9, x: 0, y: 0, first: 4 }));
        let bad = TP.replace("1=1/2 ", "1=1/x ");
        assert!(matches!(parse_tensor(&bad).unwrap_err(), ParseError::MalformedRational { line: 8, .. }));
        assert_eq!(parse_tensor("shg 1\npoints 0\n").unwrap_err(), ParseError::NoPoints { line: 2 });
        assert_eq!(parse_tensor("shg 2\n").unwrap_err(), ParseError::Header { line: 1 });
        assert_eq!(parse_tensor("").unwrap_err(), ParseError::Empty);
        let oob = TP.replace("conv 1 0 : 1=1/1", "conv 1 0 : 2=1/1");
        assert!(matches!(parse_tensor(&oob).unwrap_err(), ParseError::IndexOutOfRange { index: 2, .. }));
        let names = TP.replace("points 2\n", "points 2\nnames e\n");
        assert!(matches!(parse_tensor(&names).unwrap_err(), ParseError::Names { expected: 2, found: 1, .. }));
    }

    #[test]
    fn non_associative_rejected() {
        let text = "shg 1\npoints 2\nconv 0 0 : 1=1\nconv 0 1 : 0=1\nconv 1 0 : 0=1\nconv 1 1 : 0=1\n";
        assert!(parse_tensor(text).is_ok());
        assert!(matches!(parse_structure(text), Err(ParseError::Structure(StructureError::Axioms(_)))));
    }
}
