//! Cayley-table file format: a small structured text format with strict
//! validation and line/position error reporting.
//!
//! ```text
//! # comments start with '#'
//! name: klein4          (optional)
//! order: 4
//! table:
//! 0 1 2 3
//! 1 0 3 2
//! 2 3 0 1
//! 3 2 1 0
//! ```
//!
//! Entries are row-major 0-based element indices; row i, column j holds the
//! index of `x_i * x_j`.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{GroupError, GroupLimits, GroupTable};

#[derive(Debug, Error)]
pub enum CayleyError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `{expected}`")]
    Expected { line: usize, expected: &'static str },
    #[error("line {line}, field {col}: invalid index {text:?}")]
    BadIndex { line: usize, col: usize, text: String },
    #[error("line {line}: row has {got} entries, expected {expected}")]
    RowWidth { line: usize, got: usize, expected: usize },
    #[error("line {line}: duplicate `{key}` directive")]
    Duplicate { line: usize, key: &'static str },
    #[error("table ended after {got} of {expected} rows")]
    Truncated { got: usize, expected: usize },
    #[error("line {line}: unexpected content after the table")]
    Trailing { line: usize },
}

/// Parse the format into `(name, order, row-major table)`.
pub fn parse(text: &str) -> Result<(Option<String>, usize, Vec<u32>), CayleyError> {
    let mut name: Option<String> = None;
    let mut order: Option<usize> = None;
    let mut table: Vec<u32> = Vec::new();
    let mut rows_seen = 0usize;
    let mut in_table = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !in_table {
            if let Some(rest) = content.strip_prefix("name:") {
                if name.is_some() {
                    return Err(CayleyError::Duplicate { line, key: "name" });
                }
                name = Some(rest.trim().to_string());
            } else if let Some(rest) = content.strip_prefix("order:") {
                if order.is_some() {
                    return Err(CayleyError::Duplicate { line, key: "order" });
                }
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| CayleyError::Expected { line, expected: "order: <positive integer>" })?;
                if n == 0 {
                    return Err(CayleyError::Expected { line, expected: "order: <positive integer>" });
                }
                order = Some(n);
            } else if content == "table:" {
                if order.is_none() {
                    return Err(CayleyError::Expected { line, expected: "order: before table:" });
                }
                in_table = true;
            } else {
                return Err(CayleyError::Expected { line, expected: "name:, order:, or table:" });
            }
            continue;
        }
        let n = order.unwrap();
        if rows_seen == n {
            return Err(CayleyError::Trailing { line });
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != n {
            return Err(CayleyError::RowWidth { line, got: fields.len(), expected: n });
        }
        for (col, f) in fields.iter().enumerate() {
            let v: u32 = f.parse().map_err(|_| CayleyError::BadIndex {
                line,
                col: col + 1,
                text: f.to_string(),
            })?;
            table.push(v);
        }
        rows_seen += 1;
    }
    let order = order.ok_or(CayleyError::Expected { line: 0, expected: "order: <n>" })?;
    if rows_seen != order {
        return Err(CayleyError::Truncated { got: rows_seen, expected: order });
    }
    Ok((name, order, table))
}

/// Parse and validate into a [`GroupTable`] (the validation also checks
/// associativity, identity, and inverses).
pub fn from_str(text: &str, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    let (name, order, table) = parse(text)?;
    if order > limits.max_order {
        return Err(GroupError::OrderCap(order, limits.max_order));
    }
    GroupTable::validated(name.unwrap_or_else(|| format!("file-group-{order}")), order, table)
}

pub fn load_file(path: &Path, limits: &GroupLimits) -> Result<GroupTable, GroupError> {
    let text = std::fs::read_to_string(path).map_err(|source| CayleyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_str(&text, limits)
}

/// Render a group in the file format.
pub fn to_string(g: &GroupTable) -> String {
    let n = g.order();
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", g.name);
    let _ = writeln!(out, "order: {n}");
    let _ = writeln!(out, "table:");
    for i in 0..n {
        let row: Vec<String> =
            (0..n).map(|j| g.op(i as u32, j as u32).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::construct;

    const KLEIN: &str = "\
# the Klein four-group
name: klein4
order: 4
table:
0 1 2 3
1 0 3 2
2 3 0 1
3 2 1 0
";

    #[test]
    fn parse_and_validate_klein() {
        let g = from_str(KLEIN, &GroupLimits::default()).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.name, "klein4");
        assert_eq!(g.identity(), 0);
    }

    #[test]
    fn roundtrip_through_text() {
        let g = construct::dihedral(8, &GroupLimits::default()).unwrap();
        let text = to_string(&g);
        let back = from_str(&text, &GroupLimits::default()).unwrap();
        assert_eq!(back.raw_table(), g.raw_table());
        assert_eq!(back.name, g.name);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("order: 2\ntable:\n0 1\n1\n").unwrap_err();
        assert!(matches!(err, CayleyError::RowWidth { line: 4, got: 1, expected: 2 }));

        let err = parse("order: 2\ntable:\n0 x\n1 0\n").unwrap_err();
        assert!(matches!(err, CayleyError::BadIndex { line: 3, col: 2, .. }));

        let err = parse("order: 2\ntable:\n0 1\n").unwrap_err();
        assert!(matches!(err, CayleyError::Truncated { got: 1, expected: 2 }));

        let err = parse("table:\n0\n").unwrap_err();
        assert!(matches!(err, CayleyError::Expected { line: 1, .. }));

        let err = parse("order: 1\ntable:\n0\n0\n").unwrap_err();
        assert!(matches!(err, CayleyError::Trailing { line: 4 }));
    }

    #[test]
    fn non_associative_table_rejected_on_load() {
        // latin square (Z5 with a twist) that is not associative
        let text = "order: 5\ntable:\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
        match from_str(text, &GroupLimits::default()) {
            Err(GroupError::Invalid(msg)) => assert!(msg.contains("associativity"), "{msg}"),
            other => panic!("expected associativity failure, got {other:?}"),
        }
    }
}
