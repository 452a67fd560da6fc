// SPDX-License-Identifier: Apache-2.0

//! Plain-text graph format.
//!
//! ```text
//! <n> <m_input> <bidirectional:0|1>
//! <node-id> <x> <y>            (n lines)
//! <from> <to> <cost>           (m_input lines)
//! ```
//!
//! `#` starts a comment that runs to end of line; blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, Graph, Point};
use crate::error::{Error, Result};

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_graph(&text, path)
}

/// Parses graph text; `origin` is only used in error messages.
pub fn parse_graph(text: &str, origin: impl AsRef<Path>) -> Result<Graph> {
    let origin = origin.as_ref();
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };

    let mut records = text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then(|| (i + 1, body))
    });

    let (hline, header) = records
        .next()
        .ok_or_else(|| err(1, "missing header line".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(err(hline, format!("header needs 3 fields, found {}", h.len())));
    }
    let n: usize = h[0]
        .parse()
        .map_err(|_| err(hline, format!("bad node count {:?}", h[0])))?;
    let m: usize = h[1]
        .parse()
        .map_err(|_| err(hline, format!("bad edge count {:?}", h[1])))?;
    let bidir = match h[2] {
        "0" => false,
        "1" => true,
        other => return Err(err(hline, format!("bidirectional flag must be 0 or 1, got {other:?}"))),
    };

    let mut coords: Vec<Option<Point>> = vec![None; n];
    for _ in 0..n {
        let (line, rec) = records
            .next()
            .ok_or_else(|| err(hline, format!("expected {n} node lines")))?;
        let f: Vec<&str> = rec.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(line, "node line needs <id> <x> <y>".into()));
        }
        let id = parse_id(f[0], n).map_err(|m| err(line, m))?;
        let x = parse_real(f[1]).map_err(|m| err(line, m))?;
        let y = parse_real(f[2]).map_err(|m| err(line, m))?;
        if coords[id].is_some() {
            return Err(err(line, format!("node {id} listed twice")));
        }
        coords[id] = Some(Point::new(x, y));
    }
    let coords: Vec<Point> = coords.into_iter().map(|p| p.expect("all ids seen")).collect();

    let mut edges = Vec::with_capacity(if bidir { 2 * m } else { m });
    for _ in 0..m {
        let (line, rec) = records
            .next()
            .ok_or_else(|| err(hline, format!("expected {m} edge lines")))?;
        let f: Vec<&str> = rec.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(line, "edge line needs <from> <to> <cost>".into()));
        }
        let from = parse_id(f[0], n).map_err(|m| err(line, m))?;
        let to = parse_id(f[1], n).map_err(|m| err(line, m))?;
        let cost = parse_real(f[2]).map_err(|m| err(line, m))?;
        if cost < 0.0 {
            return Err(err(line, format!("negative cost {cost}")));
        }
        edges.push(Edge { from: from.into(), to: to.into(), cost });
        if bidir {
            edges.push(Edge { from: to.into(), to: from.into(), cost });
        }
    }
    if let Some((line, _)) = records.next() {
        return Err(err(line, "trailing data after the edge section".into()));
    }
    Graph::from_edges(coords, &edges)
}

fn parse_id(s: &str, n: usize) -> std::result::Result<usize, String> {
    let id: usize = s.parse().map_err(|_| format!("bad node id {s:?}"))?;
    if id >= n {
        return Err(format!("node id {id} out of range (n = {n})"));
    }
    Ok(id)
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite number {s:?}"));
    }
    Ok(v)
}

/// Serialises `g` as a directed edge list. Rust's shortest round-trip float
/// formatting makes `parse_graph(write_graph(g))` reproduce `g` exactly.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} 0", g.node_count(), g.edge_count());
    for v in g.nodes() {
        let p = g.coord(v);
        let _ = writeln!(out, "{} {:?} {:?}", v, p.x, p.y);
    }
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {:?}", e.from, e.to, e.cost);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "3 2 1\n0 0 0\n1 1 0\n2 2 0\n0 1 5.0\n1 2 7.0\n";

    #[test]
    fn bidirectional_flag_doubles_edges() {
        let g = parse_graph(SAMPLE, "sample").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn single_isolated_node() {
        let g = parse_graph("1 0 0\n0 3.5 -1\n", "one").unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header next\n2 1 0\n\n0 0 0 # origin\n1 1 1\n0 1 2\n";
        let g = parse_graph(text, "c").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let neg = "2 1 0\n0 0 0\n1 1 1\n0 1 -2\n";
        match parse_graph(neg, "neg") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let range = "2 1 0\n0 0 0\n1 1 1\n\n0 7 2\n";
        match parse_graph(range, "range") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("out of range"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let garbage = "2 1 0\n0 0 0\n1 1 1\n0 one 2\n";
        assert!(matches!(parse_graph(garbage, "g"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn missing_node_lines() {
        assert!(matches!(
            parse_graph("3 0 0\n0 0 0\n", "short"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let g = parse_graph(SAMPLE, "sample").unwrap();
        let again = parse_graph(&write_graph(&g), "rt").unwrap();
        assert_eq!(g, again);
    }
}
