//! Fractional triangle decompositions of graphs.
//!
//! The crate builds triangle weightings whose edge sums are all one, using a
//! uniform start, vertex balancing through bowtie gadgets and iterated edge
//! correction through wheel ("pinwheel") gadgets. It also decides feasibility
//! of the underlying linear system with checkable certificates, verifies
//! rooted density conditions of small pattern graphs exhaustively and runs
//! random-graph experiments.

pub mod error;
pub mod experiments;
pub mod gadgets;
pub mod graph;
pub mod lp;
pub mod numeric;
pub mod rng;
pub mod solver;
pub mod triangles;
pub mod verify;
pub mod weighting;

pub use error::{FtdError, GadgetWitness, Result};
pub use gadgets::pattern::RootedPattern;
pub use graph::{gen_gnp, gen_process, graph_stats, Edge, Graph, GraphStats, ProcessTrace};
pub use lp::{decide_ftd, verify_certificate, Decision, FeasibilityResult};
pub use solver::{solve, Operator, SolveOptions, SolveReport, SolveStatus};
pub use triangles::{uncovered_edges, TriangleIndex};
pub use weighting::{DiscrepancyReport, Weighting};
