//! Runtime for layered agents organized as a directed acyclic graph of
//! reasoning nodes.
//!
//! Sensing flows up the graph (from the world node toward abstract layers),
//! while context and task parameters flow down. Every node carries the same
//! six state slots (transition model, policy, current / predicted / corrected
//! belief, planning state) over a caller-chosen value domain `V`, and the
//! whole agent advances by a fixed cycle of five passes:
//!
//! 1. prediction (downward): roll each node's belief forward through its
//!    transition model under context from above,
//! 2. correction (upward): fold in observations sensed from below,
//! 3. transition learning (upward): update each model from the
//!    prediction/correction pair,
//! 4. utility (upward): absorb utility signals from below into planning state,
//! 5. action (downward): re-plan under task parameters from above and commit
//!    the corrected belief as current.
//!
//! Within a pass, a node reads only neighbor slots that the pass direction
//! has already finalized, so any topological order of the right direction
//! produces the same result; [`ActiveHierarchy::update_pass`] accepts custom
//! orders and this invariance is checked by the test suite.
//!
//! The world node is the unique source of the sensing graph. It skips the
//! prediction, correction, transition learning, and utility passes; its
//! action pass is where the environment itself advances, via the
//! [`NodeContract::actuate`] hook (identity for ordinary nodes).

mod active;
mod error;
mod graph;
pub mod mock;

pub use active::{ActiveHierarchy, NodeState};
pub use error::HierarchyError;
pub use graph::{Hierarchy, Link, NodeId, ValidationReport, Violation};

use std::fmt::Debug;

/// Value domain for node state slots and link messages.
///
/// Blanket-implemented; any cloneable, comparable, thread-safe type works.
/// Nodes in one hierarchy share a single `V`, typically an enum over the
/// concrete per-layer state types.
pub trait Value: Clone + PartialEq + Debug + Send + Sync + 'static {}

impl<T: Clone + PartialEq + Debug + Send + Sync + 'static> Value for T {}

/// Behavior of one node, as pure functions over the value domain.
///
/// The runtime owns all state and sequencing; implementations only map old
/// slot values (plus gathered neighbor messages) to new ones. Functions must
/// be deterministic in their arguments, since pass-order invariance and
/// replayability depend on it. Message slices arrive deduplicated, in
/// ascending neighbor-id order.
pub trait NodeContract<V: Value>: Send + Sync {
    /// Starting value for the current, predicted, and corrected belief slots.
    fn initial_belief(&self) -> V;
    /// Starting policy slot value.
    fn initial_policy(&self) -> V;
    /// Starting transition model slot value.
    fn initial_transition_model(&self) -> V;
    /// Starting planning state slot value.
    fn initial_planning_state(&self) -> V;

    /// Fold observations sensed from lower neighbors into a belief.
    ///
    /// Must leave the belief unchanged when `observations` is empty.
    fn observation_update(&self, belief: &V, observations: &[V]) -> V;

    /// Predict the successor belief from the current one, under context from
    /// upper neighbors and the actions the policy selects in it.
    fn transition_apply(&self, model: &V, belief: &V, context: &[V], actions: &[V]) -> V;

    /// Update the transition model after observing `corrected`, the corrected
    /// successor of `belief` under the same context and actions that
    /// [`NodeContract::transition_apply`] saw this cycle.
    fn transition_learn(
        &self,
        model: &V,
        belief: &V,
        context: &[V],
        actions: &[V],
        corrected: &V,
    ) -> V;

    /// Absorb utility signals from lower neighbors into the planning state.
    ///
    /// Must leave the planning state unchanged when `utilities` is empty.
    fn utility_absorb(&self, planning: &V, utilities: &[V]) -> V;

    /// Produce the next (policy, planning state) pair given task parameters
    /// from upper neighbors and the corrected belief.
    fn plan(&self, policy: &V, model: &V, tasks: &[V], planning: &V, belief: &V) -> (V, V);

    /// Actions the policy selects in a belief. Read-only; the runtime calls
    /// this wherever an action set is needed, so it must not be stateful.
    fn policy_apply(&self, policy: &V, belief: &V) -> Vec<V>;

    /// Commit step at the end of the action pass: the value returned becomes
    /// both the current and corrected belief. The default keeps the corrected
    /// belief as is, which is the right behavior for every ordinary node; a
    /// world node overrides this to advance the environment under the task
    /// parameters (commands) sent down to it.
    fn actuate(&self, belief: &V, tasks: &[V]) -> V {
        let _ = tasks;
        belief.clone()
    }
}

/// The five passes of one update cycle, in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pass {
    /// Downward: write predicted and corrected beliefs from the model.
    Prediction,
    /// Upward: fold sensed observations into corrected beliefs.
    Correction,
    /// Upward: update transition models from this cycle's evidence.
    TransitionLearn,
    /// Upward: absorb utility signals into planning states.
    Utility,
    /// Downward: re-plan, then commit corrected beliefs as current.
    Action,
}

/// Direction a pass sweeps through the sensing DAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Sources of the sensing graph first (world before abstract layers).
    Up,
    /// Sinks of the sensing graph first (abstract layers before world).
    Down,
}

impl Pass {
    /// Sweep direction of this pass.
    pub fn direction(self) -> Direction {
        match self {
            Pass::Prediction | Pass::Action => Direction::Down,
            Pass::Correction | Pass::TransitionLearn | Pass::Utility => Direction::Up,
        }
    }

    /// All passes in cycle order.
    pub const ALL: [Pass; 5] = [
        Pass::Prediction,
        Pass::Correction,
        Pass::TransitionLearn,
        Pass::Utility,
        Pass::Action,
    ];
}
