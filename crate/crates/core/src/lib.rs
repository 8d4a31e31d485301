//! Graph property recognition by dynamic programming over tree decompositions.

pub mod base;
pub mod cli;
pub mod combinators;
pub mod decomp;
pub mod error;
pub mod expr;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod state;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Vertex};
pub use combinators::BoxedCore;
pub use decomp::RootedTreeDecomposition;
pub use expr::{parse_problem, ProblemExpr};
pub use model::{run, run_with, DynamicCore, RunOptions, Verdict};
