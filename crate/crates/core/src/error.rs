use alloc::boxed::Box;
use alloc::string::String;

use crate::geometry::NodeId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown anchor `{0}`")]
    UnknownAnchor(String),
    #[error("named configuration {label} is defined for 2 pairs, got {pairs}")]
    NamedConfigPairs { label: &'static str, pairs: usize },
    #[error("configuration {label} must place E at {eve} and the IRS at {irs}")]
    AnchorMismatch {
        label: &'static str,
        eve: &'static str,
        irs: &'static str,
    },
    #[error("node {0:?} is not placed")]
    UnplacedNode(NodeId),
    #[error("nodes {0:?} and {1:?} are at the same position")]
    ZeroDistance(NodeId, NodeId),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian positive semidefinite: {0}")]
    NotPsd(String),
    #[error("log argument is not positive in {0}")]
    Domain(String),
    #[error("reference (last) entry of the phase vector is zero")]
    ZeroReference,
    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u128 },
    #[error("corner search needs exactly one pair, got {0}")]
    CornerSearchPairs(usize),
    #[error("solver reports the problem infeasible")]
    Infeasible,
    #[error("numerical trouble: {0}")]
    NumericalTrouble(String),
    #[error("outer iteration {outer}, {stage} sub-iteration {inner}: {source}")]
    Iteration {
        outer: usize,
        stage: &'static str,
        inner: usize,
        source: Box<Error>,
    },
}
