// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use crate::graph::NodeId;

/// Which ride constraint made an instance infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// No route connects the required nodes at all.
    Disconnected,
    /// Some rider's solo leg exceeds the walking limit.
    SoloLimit,
    /// The vehicle route exceeds the allowed stretch over the direct route.
    RouteStretch,
    /// An intermediate stop serves too few boardings/alightings.
    MinActivity,
    /// The plan has too many stops.
    MaxStops,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Violation::Disconnected => "disconnected",
            Violation::SoloLimit => "solo-leg limit (R1)",
            Violation::RouteStretch => "route length limit (R2)",
            Violation::MinActivity => "minimum stop activity (R3)",
            Violation::MaxStops => "maximum stop count (R4)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("node {0} is not in the graph")]
    InvalidNode(NodeId),
    #[error("query set is empty")]
    EmptyQuerySet,
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible instance: {violation}")]
    Infeasible { violation: Violation },
    #[error("state space of {states} states exceeds the budget of {budget}")]
    Capacity { states: u64, budget: u64 },
    #[error("revisit cap hit: node {node} extracted more than {cap} times")]
    RevisitCap { node: NodeId, cap: usize },
    #[error("instance generation failed: {0}")]
    Generation(String),
}

impl Error {
    pub fn infeasible(violation: Violation) -> Self {
        Error::Infeasible { violation }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
