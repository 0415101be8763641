//! Room-level symbolic planner: a fixed connectivity model over (room,
//! feature) states, integer cost tables absorbed from the layer below, and a
//! bounded-horizon minimum-cost search.
//!
//! Invariants: every returned plan is executable (applying its actions in
//! order never hits an inapplicable one) and ends by moving onto the goal;
//! plan length never exceeds the horizon; the planner state's cursor never
//! exceeds the plan length. Cost entries absent from the tables exclude the
//! action from plans entirely.

use std::collections::BTreeMap;
use std::fmt;

use crate::grid::{Door, RoomId, WorldMap};

/// Room-level feature a belief can sit on: a door, the goal, or no feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    /// On a door cell.
    Door(Door),
    /// On the goal cell.
    Goal,
    /// Anywhere else in the room.
    Unknown,
}

impl Feature {
    /// All eight feature values, in order.
    pub const ALL: [Feature; 8] = [
        Feature::Door(Door(1)),
        Feature::Door(Door(2)),
        Feature::Door(Door(3)),
        Feature::Door(Door(4)),
        Feature::Door(Door(5)),
        Feature::Door(Door(6)),
        Feature::Goal,
        Feature::Unknown,
    ];
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::Door(d) => write!(f, "{d}"),
            Feature::Goal => write!(f, "goal"),
            Feature::Unknown => write!(f, "unkn"),
        }
    }
}

/// Symbolic belief: the room the robot is in and the feature it is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymState {
    pub room: RoomId,
    pub feature: Feature,
}

impl SymState {
    pub fn new(room: RoomId, feature: Feature) -> Self {
        SymState { room, feature }
    }
}

/// Room-level action: traverse a door out of the current room, or move to
/// the goal inside it. The derived order (doors ascending, then the goal
/// move) is the tie-break order for equal-cost plans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymAction {
    Traverse(Door),
    MoveGoal,
}

impl SymAction {
    /// The in-room feature this action heads for.
    pub fn target(self) -> Feature {
        match self {
            SymAction::Traverse(d) => Feature::Door(d),
            SymAction::MoveGoal => Feature::Goal,
        }
    }
}

impl fmt::Display for SymAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymAction::Traverse(d) => write!(f, "trv({d})"),
            SymAction::MoveGoal => write!(f, "mv_goal"),
        }
    }
}

/// Fixed inter-room structure: symmetric connection facts between (room,
/// door) sides, and the room holding the goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoomGraph {
    /// One fact per doorway side: leaving `.0` through door `.1` arrives in
    /// room `.2` on door `.3`. Stored symmetrically.
    pub conn: Vec<(RoomId, Door, RoomId, Door)>,
    /// The room containing the goal.
    pub goal_in: RoomId,
    n_rooms: usize,
}

impl RoomGraph {
    /// Build a graph from one-directional facts; the symmetric counterparts
    /// are added automatically.
    pub fn new(facts: Vec<(RoomId, Door, RoomId, Door)>, goal_in: RoomId, n_rooms: usize) -> Self {
        let mut conn = Vec::with_capacity(facts.len() * 2);
        for (r1, d1, r2, d2) in facts {
            conn.push((r1, d1, r2, d2));
            conn.push((r2, d2, r1, d1));
        }
        conn.sort();
        conn.dedup();
        RoomGraph {
            conn,
            goal_in,
            n_rooms,
        }
    }

    /// Extract the symbolic structure from a full map.
    pub fn from_map(map: &WorldMap) -> Self {
        let mut conn = Vec::with_capacity(map.doorways.len() * 2);
        for w in &map.doorways {
            conn.push((w.a.0, w.a.1, w.b.0, w.b.1));
            conn.push((w.b.0, w.b.1, w.a.0, w.a.1));
        }
        conn.sort();
        RoomGraph {
            conn,
            goal_in: map.goal.0,
            n_rooms: map.room_count(),
        }
    }

    /// Where leaving `room` through `door` arrives, if that doorway exists.
    pub fn traverse(&self, room: RoomId, door: Door) -> Option<(RoomId, Door)> {
        self.conn
            .iter()
            .find(|&&(r, d, _, _)| r == room && d == door)
            .map(|&(_, _, r2, d2)| (r2, d2))
    }

    /// Doors leading out of `room`, ascending.
    pub fn doors_of(&self, room: RoomId) -> Vec<Door> {
        self.conn
            .iter()
            .filter(|&&(r, _, _, _)| r == room)
            .map(|&(_, d, _, _)| d)
            .collect()
    }

    /// Every (room, feature) state, rooms outer, features in order.
    pub fn states(&self) -> impl Iterator<Item = SymState> + '_ {
        (0..self.n_rooms).flat_map(|r| {
            Feature::ALL
                .iter()
                .map(move |&f| SymState::new(RoomId(r), f))
        })
    }
}

/// Integer action costs for the planner, absorbed from the learner's
/// value estimates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostTables {
    /// Cost from the robot's current in-room position to a feature.
    pub ctf: BTreeMap<Feature, u64>,
    /// Cost from one feature's cell to another feature.
    pub cbf: BTreeMap<(Feature, Feature), u64>,
}

/// Apply `action` to `state`; `None` means the action is inapplicable
/// (no such doorway from this room, or a goal move outside the goal's room
/// or while already on the goal).
pub fn symbolic_transition(
    graph: &RoomGraph,
    state: SymState,
    action: SymAction,
) -> Option<SymState> {
    match action {
        SymAction::Traverse(d) => {
            let (room, door) = graph.traverse(state.room, d)?;
            Some(SymState::new(room, Feature::Door(door)))
        }
        SymAction::MoveGoal => {
            if state.room == graph.goal_in && state.feature != Feature::Goal {
                Some(SymState::new(state.room, Feature::Goal))
            } else {
                None
            }
        }
    }
}

/// Cost of taking `action` from `state`: from the robot's current position
/// when it sits on no feature, between features otherwise. `None` when the
/// tables carry no entry, which excludes the action from plans.
pub fn action_cost(tables: &CostTables, state: SymState, action: SymAction) -> Option<u64> {
    let target = action.target();
    match state.feature {
        Feature::Unknown => tables.ctf.get(&target).copied(),
        f => tables.cbf.get(&(f, target)).copied(),
    }
}

/// A bounded-horizon plan: actions tagged with consecutive times from 0,
/// their total cost, and the horizon they were planned under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<(SymAction, u32)>,
    pub total_cost: u64,
    pub horizon: u32,
}

impl Plan {
    /// The actions alone, in order.
    pub fn actions(&self) -> impl Iterator<Item = SymAction> + '_ {
        self.steps.iter().map(|&(a, _)| a)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The symbolic states along a plan: element 0 is `from`, element i the
/// state after the first i actions. Panics on an inexecutable plan, which
/// [`plan_min_cost`] never returns.
pub fn expected_states(graph: &RoomGraph, from: SymState, plan: &Plan) -> Vec<SymState> {
    let mut states = vec![from];
    for &(action, _) in &plan.steps {
        let cur = *states.last().expect("starts nonempty");
        let succ = symbolic_transition(graph, cur, action).expect("plans are executable");
        states.push(succ);
    }
    states
}

/// Composite plan order: cheaper, then shorter, then lexicographically
/// smaller action sequence.
fn better(a: &(u64, Vec<SymAction>), b: &(u64, Vec<SymAction>)) -> bool {
    (a.0, a.1.len(), &a.1) < (b.0, b.1.len(), &b.1)
}

/// Minimum-cost sequence of applicable actions reaching the goal feature
/// within `horizon` steps, or `None` when no such sequence exists.
///
/// Search is layered over exact step counts, keeping one best (cost, action
/// sequence) candidate per symbolic state per layer; sequences stop at the
/// first goal arrival, which the composite order makes optimal because
/// costs are non-negative.
pub fn plan_min_cost(
    graph: &RoomGraph,
    tables: &CostTables,
    from: SymState,
    horizon: u32,
) -> Option<Plan> {
    if from.feature == Feature::Goal {
        return Some(Plan {
            steps: Vec::new(),
            total_cost: 0,
            horizon,
        });
    }
    let mut best: Option<(u64, Vec<SymAction>)> = None;
    let mut layer: BTreeMap<SymState, (u64, Vec<SymAction>)> = BTreeMap::new();
    layer.insert(from, (0, Vec::new()));
    for _ in 0..horizon {
        let mut next: BTreeMap<SymState, (u64, Vec<SymAction>)> = BTreeMap::new();
        for (&state, cand) in &layer {
            let mut actions: Vec<SymAction> = graph
                .doors_of(state.room)
                .into_iter()
                .map(SymAction::Traverse)
                .collect();
            actions.push(SymAction::MoveGoal);
            for action in actions {
                let Some(succ) = symbolic_transition(graph, state, action) else {
                    continue;
                };
                let Some(cost) = action_cost(tables, state, action) else {
                    continue;
                };
                let mut seq = cand.1.clone();
                seq.push(action);
                let offer = (cand.0 + cost, seq);
                if succ.feature == Feature::Goal {
                    if best.as_ref().is_none_or(|b| better(&offer, b)) {
                        best = Some(offer);
                    }
                } else {
                    match next.get(&succ) {
                        Some(held) if !better(&offer, held) => {}
                        _ => {
                            next.insert(succ, offer);
                        }
                    }
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    best.map(|(total_cost, seq)| Plan {
        steps: seq
            .into_iter()
            .enumerate()
            .map(|(t, a)| (a, t as u32))
            .collect(),
        total_cost,
        horizon,
    })
}

/// Mutable planner-node state: the last absorbed cost tables, the active
/// plan with the symbolic states it expects along the way, and a cursor for
/// execution progress.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlannerState {
    /// Cost tables from the latest utility update; `None` until one arrives.
    pub tables: Option<CostTables>,
    /// Set when genuinely new tables arrive; forces the next plan call to
    /// replan.
    pub dirty: bool,
    /// The active plan, if the last planning attempt found one.
    pub plan: Option<Plan>,
    /// States the plan expects: element 0 where it was made, element i after
    /// i actions. Empty exactly when `plan` is `None`.
    pub expected: Vec<SymState>,
    /// Index into `expected` of the state execution has reached.
    pub cursor: usize,
}

impl PlannerState {
    pub fn new() -> Self {
        PlannerState::default()
    }
}

/// Policy emitted by the planner: the action to take now, valid for the
/// belief it planned against. `action` is `None` when the belief is on the
/// goal or no plan exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanPolicy {
    /// The belief the action was chosen for.
    pub expected: Option<SymState>,
    /// The plan's current action.
    pub action: Option<SymAction>,
}

impl PlanPolicy {
    /// Policy that emits nothing.
    pub fn idle() -> Self {
        PlanPolicy {
            expected: None,
            action: None,
        }
    }
}

/// Install cost tables into the planner state. Tables identical to the
/// current ones change nothing; genuinely new ones mark the state dirty so
/// the next plan call replans.
pub fn absorb_tables(state: &PlannerState, tables: CostTables) -> PlannerState {
    let mut next = state.clone();
    if next.tables.as_ref() != Some(&tables) {
        next.tables = Some(tables);
        next.dirty = true;
    }
    next
}

/// One planning step: keep following the active plan while the belief
/// tracks its expected states (same state re-emits the current action, the
/// next state advances the cursor), and replan from the belief when new
/// tables arrived, no plan is active, or the belief left the expected
/// course. Before any tables arrive the planner does nothing.
pub fn plan_planner(
    state: &PlannerState,
    graph: &RoomGraph,
    belief: SymState,
    horizon: u32,
) -> (PlanPolicy, PlannerState) {
    let mut next = state.clone();
    let Some(tables) = next.tables.clone() else {
        return (PlanPolicy::idle(), next);
    };
    let on_course = next.plan.is_some()
        && if next.expected.get(next.cursor) == Some(&belief) {
            true
        } else if next.expected.get(next.cursor + 1) == Some(&belief) {
            next.cursor += 1;
            true
        } else {
            false
        };
    if next.dirty || !on_course {
        next.dirty = false;
        next.cursor = 0;
        match plan_min_cost(graph, &tables, belief, horizon) {
            Some(plan) => {
                next.expected = expected_states(graph, belief, &plan);
                next.plan = Some(plan);
            }
            None => {
                next.expected.clear();
                next.plan = None;
            }
        }
    }
    let policy = match &next.plan {
        Some(plan) => PlanPolicy {
            expected: next.expected.get(next.cursor).copied(),
            action: plan.steps.get(next.cursor).map(|&(a, _)| a),
        },
        None => PlanPolicy {
            expected: Some(belief),
            action: None,
        },
    };
    (policy, next)
}
