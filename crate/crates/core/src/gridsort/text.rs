//! Plain-text grids: one row per line, entries separated by spaces or tabs,
//! blank lines ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::Grid;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Token is not a decimal signed 64-bit integer.
    InvalidEntry(String),
    /// Row length differs from the first row.
    Ragged { expected: usize, found: usize },
    NoRows,
}

/// Positions are one-based; `column` counts characters on the line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {}", describe(.kind))]
pub struct GridParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::InvalidEntry(tok) => format!("invalid entry {tok:?}"),
        ParseErrorKind::Ragged { expected, found } => {
            format!("row has {found} entries, expected {expected}")
        }
        ParseErrorKind::NoRows => "no rows".to_string(),
    }
}

/// Split a line into `(column, token)` pairs.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line.char_indices().peekable();
    std::iter::from_fn(move || {
        while let Some(&(_, c)) = rest.peek() {
            if c == ' ' || c == '\t' {
                rest.next();
            } else {
                break;
            }
        }
        let (start, _) = *rest.peek()?;
        let mut end = line.len();
        while let Some(&(i, c)) = rest.peek() {
            if c == ' ' || c == '\t' {
                end = i;
                break;
            }
            rest.next();
        }
        Some((line[..start].chars().count() + 1, &line[start..end]))
    })
}

pub fn parse_grid(input: &str) -> Result<Grid, GridParseError> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let mut row = Vec::new();
        for (column, tok) in tokens(line) {
            let value = tok.parse::<i64>().map_err(|_| GridParseError {
                line: line_no,
                column,
                kind: ParseErrorKind::InvalidEntry(tok.to_string()),
            })?;
            row.push(value);
        }
        if row.is_empty() {
            continue;
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                let column = if row.len() > first.len() {
                    tokens(line).nth(first.len()).map_or(1, |(c, _)| c)
                } else {
                    line.trim_end_matches([' ', '\t']).chars().count() + 1
                };
                return Err(GridParseError {
                    line: line_no,
                    column,
                    kind: ParseErrorKind::Ragged { expected: first.len(), found: row.len() },
                });
            }
        }
        rows.push(row);
    }
    Grid::from_rows(&rows).map_err(|_| GridParseError {
        line: last_line.max(1),
        column: 1,
        kind: ParseErrorKind::NoRows,
    })
}

/// Right-aligned columns separated by one space, newline after each row.
pub fn format_grid(g: &Grid) -> String {
    let widths: Vec<usize> = (0..g.cols())
        .map(|j| (0..g.rows()).map(|i| g.get(i, j).to_string().len()).max().unwrap_or(1))
        .collect();
    let mut out = String::new();
    for i in 0..g.rows() {
        for (j, w) in widths.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{:>w$}", g.get(i, j), w = w).expect("write to String");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_with_mixed_whitespace() {
        let g = parse_grid("\n  1 8\t3  4 8 \n\n0\t\t9 2 7 14\n20 3 6 7 7\n\n").unwrap();
        assert_eq!(g.to_rows(), [[1, 8, 3, 4, 8], [0, 9, 2, 7, 14], [20, 3, 6, 7, 7]]);
        let g = parse_grid("-5 +3\r\n4 -0\r\n").unwrap();
        assert_eq!(g.to_rows(), [[-5, 3], [4, 0]]);
    }

    #[test]
    fn reports_bad_tokens() {
        let err = parse_grid("1 2 3\n4 x5 6\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 3);
        assert_eq!(err.kind, ParseErrorKind::InvalidEntry("x5".into()));
        let err = parse_grid("1 2.5\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        let err = parse_grid("99999999999999999999\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::InvalidEntry(_)));
    }

    #[test]
    fn reports_ragged_rows() {
        let err = parse_grid("1 2 3\n\n4 5\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.column, 4);
        assert_eq!(err.kind, ParseErrorKind::Ragged { expected: 3, found: 2 });
        let err = parse_grid("1 2\n3  4  5\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 7));
        assert_eq!(err.to_string(), "line 2, column 7: row has 3 entries, expected 2");
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_grid("").unwrap_err().kind, ParseErrorKind::NoRows);
        assert_eq!(parse_grid("  \n\t\n").unwrap_err().kind, ParseErrorKind::NoRows);
    }

    #[test]
    fn formats_aligned() {
        let g = Grid::from_rows(&[[0, 2, 4, 7, 8], [1, 3, 7, 8, 14], [3, 6, 7, 9, 20]]).unwrap();
        assert_eq!(format_grid(&g), "0 2 4 7  8\n1 3 7 8 14\n3 6 7 9 20\n");
    }

    proptest! {
        #[test]
        fn format_then_parse(r in 1usize..6, c in 1usize..6, seed in prop::collection::vec(any::<i64>(), 36)) {
            let g = Grid::new(r, c, seed[..r * c].to_vec()).unwrap();
            prop_assert_eq!(parse_grid(&format_grid(&g)).unwrap(), g);
        }
    }
}
