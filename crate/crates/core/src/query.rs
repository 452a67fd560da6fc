// SPDX-License-Identifier: Apache-2.0

//! Trip queries: ordered `(source, destination)` pairs.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuerySet {
    pub pairs: Vec<(NodeId, NodeId)>,
}

impl QuerySet {
    pub fn new(pairs: Vec<(NodeId, NodeId)>) -> Self {
        QuerySet { pairs }
    }

    pub fn from_indices(pairs: &[(usize, usize)]) -> Self {
        QuerySet::new(pairs.iter().map(|&(s, d)| (s.into(), d.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> Vec<NodeId> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn destinations(&self) -> Vec<NodeId> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// Checks every id against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for &(s, d) in &self.pairs {
            g.check_node(s)?;
            g.check_node(d)?;
        }
        Ok(())
    }

    /// One `"<s> <d>"` line per query.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, d) in &self.pairs {
            let _ = writeln!(out, "{s} {d}");
        }
        out
    }

    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<QuerySet> {
        let origin = origin.as_ref();
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                msg,
            };
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 2 {
                return Err(err("query line needs <s> <d>".into()));
            }
            let s: u32 = f[0].parse().map_err(|_| err(format!("bad node id {:?}", f[0])))?;
            let d: u32 = f[1].parse().map_err(|_| err(format!("bad node id {:?}", f[1])))?;
            pairs.push((NodeId(s), NodeId(d)));
        }
        Ok(QuerySet { pairs })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<QuerySet> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        QuerySet::parse(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let qs = QuerySet::from_indices(&[(0, 4), (3, 2)]);
        assert_eq!(QuerySet::parse(&qs.to_text(), "q").unwrap(), qs);
    }

    #[test]
    fn parse_error_line() {
        assert!(matches!(
            QuerySet::parse("0 1\n\n2\n", "q"),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
