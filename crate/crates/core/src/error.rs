use std::path::PathBuf;

use thiserror::Error;

/// Vertex pair or edge blamed when a gadget family is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetWitness {
    /// No `(u, v)`-bowtie exists for an ordered pair that needs one.
    BowtiePair(u32, u32),
    /// No pinwheel sits on this edge.
    PinwheelEdge(u32, u32),
    /// The edge lies in no triangle, so no triangle-based gadget can touch it.
    CoverEdge(u32, u32),
}

impl std::fmt::Display for GadgetWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GadgetWitness::BowtiePair(u, v) => write!(f, "no ({u},{v})-bowtie"),
            GadgetWitness::PinwheelEdge(u, v) => write!(f, "no pinwheel on edge {u}-{v}"),
            GadgetWitness::CoverEdge(u, v) => write!(f, "edge {u}-{v} lies in no triangle"),
        }
    }
}

#[derive(Debug, Error)]
pub enum FtdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0}-{1} is not an edge of the graph")]
    InvalidEdge(u32, u32),

    #[error("graph has {edges} edges but no triangles")]
    NoTriangles { edges: usize },

    #[error("gadget missing: {0}")]
    GadgetMissing(GadgetWitness),

    #[error("pattern has {free} free vertices, limit is {limit}")]
    SizeLimit { free: usize, limit: usize },

    #[error("instance too large: {triangles} triangles exceeds oracle capacity {capacity}")]
    Capacity { triangles: usize, capacity: usize },

    #[error("{}:{line}: {msg}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },

    #[error("size mismatch: {0}")]
    Mismatch(String),

    #[error("LP backend: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl FtdError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        FtdError::Parse {
            path: None,
            line,
            msg: msg.into(),
        }
    }

    /// Attaches a file path to a parse error; other variants pass through.
    pub fn with_path(self, p: impl Into<PathBuf>) -> Self {
        match self {
            FtdError::Parse { line, msg, .. } => FtdError::Parse {
                path: Some(p.into()),
                line,
                msg,
            },
            other => other,
        }
    }
}

pub type Result<T, E = FtdError> = std::result::Result<T, E>;
