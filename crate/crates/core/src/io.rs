//! Reading and writing point sets.
//!
//! The text format has a header line listing the labels of `I`, then one point
//! per line as a 0/1 string whose leftmost character is the coordinate of the
//! smallest label:
//!
//! ```text
//! # optional comments
//! labels: 1 2 3
//! 000
//! 100
//! 110
//! ```
//!
//! When `I` is empty the single point is written as `-`. The JSON form is
//! `{"labels": [1, 2, 3], "points": ["000", "100", "110"]}`. Writers emit points
//! in lex order, so equal sets produce identical files.

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{IndexSet, Point, PointSet};

const EMPTY_POINT: &str = "-";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_point(s: &str, n: usize, line: usize) -> Result<Point> {
    if n == 0 && s == EMPTY_POINT {
        return Ok(Point::ZERO);
    }
    if s.len() != n {
        return Err(parse_err(
            line,
            format!("expected {n} coordinates, found {}", s.len()),
        ));
    }
    let mut bits = 0u64;
    for (k, c) in s.bytes().enumerate() {
        match c {
            b'0' => {}
            b'1' => bits |= 1 << k,
            _ => {
                return Err(parse_err(
                    line,
                    format!("unexpected character {:?}", c as char),
                ))
            }
        }
    }
    Ok(Point(bits))
}

fn format_point(p: Point, n: usize) -> String {
    if n == 0 {
        EMPTY_POINT.to_string()
    } else {
        p.to_bit_string(n)
    }
}

fn parse_labels(s: &str, line: usize) -> Result<Vec<u32>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(line, format!("bad label {t:?}")))
        })
        .collect()
}

fn build(
    labels: Vec<u32>,
    header_line: usize,
    points: impl IntoIterator<Item = (usize, String)>,
) -> Result<PointSet> {
    let ctx = Arc::new(IndexSet::new(labels).map_err(|e| parse_err(header_line, e.to_string()))?);
    let n = ctx.dim();
    let mut seen = HashSet::new();
    let mut pts = Vec::new();
    for (line, s) in points {
        let p = parse_point(&s, n, line)?;
        if !seen.insert(p) {
            return Err(parse_err(line, format!("duplicate point {s}")));
        }
        pts.push(p);
    }
    PointSet::from_points(ctx, pts)
}

pub fn parse_set_text(text: &str) -> Result<PointSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `labels:` header"))?;
    let rest = header
        .strip_prefix("labels:")
        .ok_or_else(|| parse_err(hline, "first line must start with `labels:`"))?;
    let labels = parse_labels(rest, hline)?;
    build(labels, hline, lines.map(|(i, l)| (i, l.to_string())))
}

pub fn write_set_text(a: &PointSet) -> String {
    let n = a.dim();
    let labels: Vec<String> = a.ctx().labels().iter().map(u32::to_string).collect();
    let mut out = format!("labels: {}\n", labels.join(" "));
    for p in a.iter() {
        out.push_str(&format_point(p, n));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct SetJson {
    labels: Vec<u32>,
    points: Vec<String>,
}

pub fn parse_set_json(text: &str) -> Result<PointSet> {
    let doc: SetJson =
        serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    build(doc.labels, 0, doc.points.into_iter().map(|p| (0, p)))
}

pub fn write_set_json(a: &PointSet) -> String {
    let n = a.dim();
    let doc = SetJson {
        labels: a.ctx().labels().to_vec(),
        points: a.iter().map(|p| format_point(p, n)).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// Parses either format, choosing JSON when the first non-blank character is `{`.
pub fn parse_set(text: &str) -> Result<PointSet> {
    if text.trim_start().starts_with('{') {
        parse_set_json(text)
    } else {
        parse_set_text(text)
    }
}

pub fn read_set_file(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    parse_set(&text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}
