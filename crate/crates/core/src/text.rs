//! The line-oriented point-set format: one point per line, coordinates as
//! base-10 integers separated by spaces. Blank lines and `#` comments are
//! skipped; the first data line fixes the dimension.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::point::{Point, PointSet};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_pointset_str(input: &str) -> Result<PointSet> {
    parse_pointset(input.as_bytes())
}

pub fn parse_pointset<R: BufRead>(input: R) -> Result<PointSet> {
    let mut dim = None;
    let mut seen = HashSet::new();
    let mut points = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u64>().map_err(|_| match tok.parse::<i128>() {
                    Ok(v) if v < 0 => parse_err(lineno, format!("negative coordinate {tok}")),
                    Ok(_) => parse_err(lineno, format!("coordinate {tok} does not fit in 64 bits")),
                    Err(_) => parse_err(lineno, format!("not an integer: {tok:?}")),
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        let n = *dim.get_or_insert(coords.len());
        if coords.len() != n {
            return Err(parse_err(lineno, format!("expected {n} coordinates, found {}", coords.len())));
        }
        if !seen.insert(coords.clone()) {
            return Err(parse_err(lineno, format!("duplicate point {coords:?}")));
        }
        points.push(Point::new(coords)?);
    }
    let dim = dim.ok_or_else(|| parse_err(0, "no points; dimension cannot be inferred"))?;
    PointSet::new(dim, points)
}

/// Renders a set in the text format, points in cube order.
pub fn format_pointset(a: &PointSet) -> String {
    let mut out = String::new();
    for p in a {
        let mut first = true;
        for c in p.coords() {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::initial_segment;

    #[test]
    fn parses_small_segment() {
        let a = parse_pointset_str("0 0\n1 0\n0 1\n").unwrap();
        assert_eq!(a, initial_segment(2, 3).unwrap());
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let a = parse_pointset_str("# header\n\n0 0 0\n  # indented comment\n1 0 0\n").unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn reports_line_numbers() {
        let line_of = |s: &str| match parse_pointset_str(s) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("0 0\n0 0\n"), 2);
        assert_eq!(line_of("0 0\n1 0 0\n"), 2);
        assert_eq!(line_of("# c\n0 x\n"), 2);
        assert_eq!(line_of("0 0\n\n0 -1\n"), 3);
        assert_eq!(line_of(""), 0);
    }

    #[test]
    fn negative_values_have_their_own_message() {
        let err = parse_pointset_str("1 -2\n").unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");
        let err = parse_pointset_str("1 2.5\n").unwrap_err();
        assert!(err.to_string().contains("not an integer"), "{err}");
    }

    #[test]
    fn formatted_segment_reparses() {
        for (n, m) in [(1, 5), (2, 10), (3, 17), (4, 40)] {
            let seg = initial_segment(n, m).unwrap();
            assert_eq!(parse_pointset_str(&format_pointset(&seg)).unwrap(), seg);
        }
    }
}
