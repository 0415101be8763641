//! Live hierarchy: per-node state slots plus the five-pass update cycle.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::graph::{Hierarchy, NodeId};
use crate::{Direction, HierarchyError, Pass, Value};

/// The six state slots of one live node.
///
/// `current_belief` is the belief the node last committed to acting from;
/// `predicted_belief` and `corrected_belief` are this cycle's forecast of its
/// successor, before and after folding in observations.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeState<V> {
    /// Learned or fixed dynamics the prediction pass applies.
    pub transition_model: V,
    /// Decision rule the planner maintains.
    pub policy: V,
    /// Belief the node is currently acting from.
    pub current_belief: V,
    /// Model-predicted successor belief.
    pub predicted_belief: V,
    /// Predicted successor, corrected by observations.
    pub corrected_belief: V,
    /// Planner working state (value estimates, utility accumulators).
    pub planning_state: V,
}

/// A validated hierarchy bound to live node states.
///
/// Constructed only from a hierarchy that passes validation; topological
/// orders are computed once and reused by every cycle. All update methods
/// take `self` by value and return the successor, so a cycle costs no clones
/// and old snapshots can be kept by cloning first.
#[derive(Clone)]
pub struct ActiveHierarchy<V: Value> {
    hierarchy: Arc<Hierarchy<V>>,
    states: Vec<NodeState<V>>,
    order_up: Vec<NodeId>,
    order_down: Vec<NodeId>,
}

/// Compares node states only; the static structure is assumed shared.
impl<V: Value> PartialEq for ActiveHierarchy<V> {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
    }
}

impl<V: Value> fmt::Debug for ActiveHierarchy<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActiveHierarchy")
            .field("states", &self.states)
            .finish_non_exhaustive()
    }
}

impl<V: Value> ActiveHierarchy<V> {
    /// Validate `hierarchy`, initialize every node's slots from its
    /// contract, and cache both topological orders.
    pub fn new(hierarchy: Hierarchy<V>) -> Result<Self, HierarchyError> {
        let report = hierarchy.validate();
        if !report.is_valid() {
            return Err(HierarchyError::Invalid(report));
        }
        let order_up = hierarchy.topo_up().expect("validated graph is acyclic");
        let order_down = hierarchy.topo_down().expect("validated graph is acyclic");
        let states = (0..hierarchy.len())
            .map(|i| {
                let c = hierarchy.contract(NodeId(i));
                let belief = c.initial_belief();
                NodeState {
                    transition_model: c.initial_transition_model(),
                    policy: c.initial_policy(),
                    current_belief: belief.clone(),
                    predicted_belief: belief.clone(),
                    corrected_belief: belief,
                    planning_state: c.initial_planning_state(),
                }
            })
            .collect();
        Ok(ActiveHierarchy {
            hierarchy: Arc::new(hierarchy),
            states,
            order_up,
            order_down,
        })
    }

    /// The static structure this state is bound to.
    pub fn hierarchy(&self) -> &Arc<Hierarchy<V>> {
        &self.hierarchy
    }

    /// All node states, indexed by node id.
    pub fn states(&self) -> &[NodeState<V>] {
        &self.states
    }

    /// State of node `id`. Panics if `id` is out of range.
    pub fn state(&self, id: NodeId) -> &NodeState<V> {
        &self.states[id.0]
    }

    /// Mutable state of node `id`, for external resets and instrumentation.
    /// Panics if `id` is out of range.
    pub fn state_mut(&mut self, id: NodeId) -> &mut NodeState<V> {
        &mut self.states[id.0]
    }

    /// Cached upward order (world first).
    pub fn order_up(&self) -> &[NodeId] {
        &self.order_up
    }

    /// Cached downward order (world last).
    pub fn order_down(&self) -> &[NodeId] {
        &self.order_down
    }

    /// Run one full cycle: prediction, correction, transition learning,
    /// utility, action, each over the cached order for its direction.
    pub fn process_update(mut self) -> Self {
        let up = self.order_up.clone();
        let down = self.order_down.clone();
        for pass in Pass::ALL {
            let order = match pass.direction() {
                Direction::Up => &up,
                Direction::Down => &down,
            };
            for &id in order {
                self.step(pass, id);
            }
        }
        self
    }

    /// Run one pass over a caller-supplied order, after checking that the
    /// order schedules every node exactly once and respects the pass
    /// direction. Any accepted order yields the same result.
    pub fn update_pass(mut self, pass: Pass, order: &[NodeId]) -> Result<Self, HierarchyError> {
        self.check_order(pass, order)?;
        for &id in order {
            self.step(pass, id);
        }
        Ok(self)
    }

    /// Apply one pass's per-node update to a single node, leaving the rest
    /// untouched. Building block for custom schedules.
    pub fn node_update(mut self, pass: Pass, id: NodeId) -> Result<Self, HierarchyError> {
        if id.0 >= self.hierarchy.len() {
            return Err(HierarchyError::UnknownNode(id));
        }
        self.step(pass, id);
        Ok(self)
    }

    /// One line per node, ascending id, with the four belief-facing slots:
    /// `node <id> CS=<current> PUS=<predicted> CUS=<corrected> PS=<planning>`.
    pub fn dump(&self) -> String
    where
        V: fmt::Display,
    {
        let mut out = String::new();
        for (i, st) in self.states.iter().enumerate() {
            writeln!(
                out,
                "node {} CS={} PUS={} CUS={} PS={}",
                i, st.current_belief, st.predicted_belief, st.corrected_belief, st.planning_state
            )
            .expect("write to String cannot fail");
        }
        out
    }

    fn check_order(&self, pass: Pass, order: &[NodeId]) -> Result<(), HierarchyError> {
        let n = self.hierarchy.len();
        let fail = |reason: String| HierarchyError::InvalidOrder { pass, reason };
        if order.len() != n {
            return Err(fail(format!(
                "{} nodes listed, hierarchy has {n}",
                order.len()
            )));
        }
        let mut pos = vec![usize::MAX; n];
        for (p, &id) in order.iter().enumerate() {
            if id.0 >= n {
                return Err(fail(format!("unknown node {id}")));
            }
            if pos[id.0] != usize::MAX {
                return Err(fail(format!("node {id} listed twice")));
            }
            pos[id.0] = p;
        }
        for link in self.hierarchy.links() {
            let (first, second) = match pass.direction() {
                Direction::Up => (link.lower, link.upper),
                Direction::Down => (link.upper, link.lower),
            };
            if pos[first.0] > pos[second.0] {
                return Err(fail(format!("node {first} must precede node {second}")));
            }
        }
        Ok(())
    }

    /// Deduplicated union of `f(slot)` over the given links, in link order
    /// (ascending neighbor id). First occurrence wins, so the result is
    /// deterministic for fixed slot values.
    fn gather<'a>(
        links: impl Iterator<Item = &'a crate::graph::Link<V>>,
        mut produce: impl FnMut(&crate::graph::Link<V>) -> Vec<V>,
    ) -> Vec<V>
    where
        V: 'a,
    {
        let mut set: Vec<V> = Vec::new();
        for link in links {
            for item in produce(link) {
                if !set.contains(&item) {
                    set.push(item);
                }
            }
        }
        set
    }

    /// Context for node `id`: union of upper neighbors' predicted beliefs
    /// pushed through their context maps.
    fn gather_context(&self, id: NodeId) -> Vec<V> {
        let h = &self.hierarchy;
        Self::gather(h.links_up(id), |link| {
            (link.context)(&self.states[link.upper.0].predicted_belief)
        })
    }

    /// Observations for node `id`: union of lower neighbors' corrected
    /// beliefs pushed through their sensing maps.
    fn gather_observations(&self, id: NodeId) -> Vec<V> {
        let h = &self.hierarchy;
        Self::gather(h.links_down(id), |link| {
            (link.sensing)(&self.states[link.lower.0].corrected_belief)
        })
    }

    /// Utility signals for node `id`: union of lower neighbors' planning
    /// states pushed through their utility maps.
    fn gather_utilities(&self, id: NodeId) -> Vec<V> {
        let h = &self.hierarchy;
        Self::gather(h.links_down(id), |link| {
            (link.utility)(&self.states[link.lower.0].planning_state)
        })
    }

    /// Task parameters for node `id`: union of upper neighbors' current
    /// action sets pushed through their task-parameter maps. In the downward
    /// action pass the uppers have already re-planned, so this reads their
    /// fresh policies.
    fn gather_tasks(&self, id: NodeId) -> Vec<V> {
        let h = Arc::clone(&self.hierarchy);
        Self::gather(h.links_up(id), |link| {
            let up = &self.states[link.upper.0];
            let actions = h
                .contract(link.upper)
                .policy_apply(&up.policy, &up.current_belief);
            (link.task_params)(&actions)
        })
    }

    /// One pass's update on one node. Skip rules: the world node only moves
    /// in the action pass, and correction skips nodes with nothing below
    /// them to sense.
    fn step(&mut self, pass: Pass, id: NodeId) {
        let h = Arc::clone(&self.hierarchy);
        let world = h.world();
        let i = id.0;
        match pass {
            Pass::Prediction => {
                if id == world {
                    return;
                }
                let context = self.gather_context(id);
                let predicted = {
                    let st = &self.states[i];
                    let c = h.contract(id);
                    let actions = c.policy_apply(&st.policy, &st.current_belief);
                    c.transition_apply(&st.transition_model, &st.current_belief, &context, &actions)
                };
                let st = &mut self.states[i];
                st.predicted_belief = predicted.clone();
                st.corrected_belief = predicted;
            }
            Pass::Correction => {
                if id == world || h.links_down(id).next().is_none() {
                    return;
                }
                let observations = self.gather_observations(id);
                let corrected = h
                    .contract(id)
                    .observation_update(&self.states[i].corrected_belief, &observations);
                self.states[i].corrected_belief = corrected;
            }
            Pass::TransitionLearn => {
                if id == world {
                    return;
                }
                let context = self.gather_context(id);
                let model = {
                    let st = &self.states[i];
                    let c = h.contract(id);
                    let actions = c.policy_apply(&st.policy, &st.current_belief);
                    c.transition_learn(
                        &st.transition_model,
                        &st.current_belief,
                        &context,
                        &actions,
                        &st.corrected_belief,
                    )
                };
                self.states[i].transition_model = model;
            }
            Pass::Utility => {
                if id == world {
                    return;
                }
                let utilities = self.gather_utilities(id);
                let planning = h
                    .contract(id)
                    .utility_absorb(&self.states[i].planning_state, &utilities);
                self.states[i].planning_state = planning;
            }
            Pass::Action => {
                let tasks = self.gather_tasks(id);
                let (policy, planning, belief) = {
                    let st = &self.states[i];
                    let c = h.contract(id);
                    let (policy, planning) = c.plan(
                        &st.policy,
                        &st.transition_model,
                        &tasks,
                        &st.planning_state,
                        &st.corrected_belief,
                    );
                    let belief = c.actuate(&st.corrected_belief, &tasks);
                    (policy, planning, belief)
                };
                let st = &mut self.states[i];
                st.policy = policy;
                st.planning_state = planning;
                st.current_belief = belief.clone();
                st.corrected_belief = belief;
            }
        }
    }
}
