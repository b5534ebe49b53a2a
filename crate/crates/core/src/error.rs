use alloc::string::String;

use crate::circuit::NodeId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid circuit: {0}")]
    Validation(String),
    #[error("inconsistent circuit: division by the zero function at node {0}")]
    InconsistentCircuit(NodeId),
    #[error("division by zero at node {0}")]
    DivisionByZero(NodeId),
    #[error("final result at node {0} is not polynomial in the inputs")]
    NotPolynomialInInputs(NodeId),
    #[error("term budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("circuit is not robust: {0}")]
    NotRobust(String),
}
