//! Finite instantiations of the block-permutation lower-bound arguments and
//! of coloring extraction from bipartiteness certificates.

use crate::graph::GraphError;
use crate::harness::HarnessError;
use crate::schemes::SchemeError;

pub mod blocks;
pub mod coloring;
pub mod counting;
pub mod fooling;

pub use blocks::{make_blocks, Block, BlockFamily, LabeledBlock, PermInstance, Variant};
pub use coloring::{analyze_gc, build_gc, coloring_table, ColoringTable, Gc, GcAnalysis};
pub use counting::{counting_bound, counting_bound_odd, min_local_width};
pub use fooling::{
    build_block_graph, fooling_attack, junction_accepts, odd_cycle_attack, AttackConfig, AttackReport, BlockGraph,
    Harvest,
};

/// Block graphs with more labeled blocks than this are refused.
pub const MAX_BLOCK_GRAPH_VERTICES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LowerBoundError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{0:?} is not a permutation of the ordinary blocks")]
    NotAPermutation(Vec<usize>),
    #[error("{0:?} does not alternate between the two block colors")]
    NotAlternating(Vec<usize>),
    #[error("verifier radius {verifier} exceeds the block radius {r}")]
    RadiusMismatch { verifier: usize, r: usize },
    #[error("a junction needs two different blocks, got block {0} twice")]
    SameBlock(usize),
    #[error("{what} of size {size} exceeds the limit {limit}")]
    BudgetTooLarge { what: &'static str, size: u128, limit: u128 },
    #[error("certificate {row} does not induce a 2-coloring of the blocks")]
    MissingColoring { row: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
