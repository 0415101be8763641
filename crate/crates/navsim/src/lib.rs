//! Five-room gridworld navigation with a layered agent.
//!
//! The agent is a three-node hierarchy built on `hierarchy-core`: a simulated
//! world node (stochastic room grid), a model-learning value-iteration node
//! over room-agnostic projected cells, and a symbolic route planner over
//! (room, feature) states whose action costs come from the learner's value
//! tables. A flat baseline (one learner over global states, no planner)
//! shares the same machinery. `exact` computes ground-truth expectations
//! from the real dynamics for evaluation, independent of anything learned.

pub mod exact;
pub mod experiment;
pub mod grid;
pub mod learner;
pub mod nav;
pub mod planner;
pub mod scenario;

/// Scalar abstraction for the numeric kernels (value iteration, exact
/// solvers), letting them run at f32 or f64.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Concrete scalar used by the domain types.
pub type Scalar = f64;
