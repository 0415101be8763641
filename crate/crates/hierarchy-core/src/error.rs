//! Error type for hierarchy construction and pass execution.

use crate::graph::{NodeId, ValidationReport};
use crate::Pass;

/// Why an operation on a hierarchy was refused.
#[derive(Debug, thiserror::Error)]
pub enum HierarchyError {
    /// Structural validation failed; the report lists every violation.
    #[error("invalid hierarchy: {0}")]
    Invalid(ValidationReport),

    /// A node id outside the hierarchy was named.
    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    /// A caller-supplied order is not a valid schedule for the pass.
    #[error("invalid {pass:?} order: {reason}")]
    InvalidOrder {
        /// Pass the order was offered for.
        pass: Pass,
        /// What disqualifies it.
        reason: String,
    },
}
