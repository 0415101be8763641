//! Assembly of the navigation hierarchies: the shared value domain, node
//! contracts wrapping the world, the projected learner, the flat learner,
//! and the symbolic planner, the link function tuples between them, and
//! episode runners.
//!
//! Node ids: 0 is the world, 1 the learner, 2 the planner (absent in the
//! flat baseline). Sensing carries the robot's location up; the learner's
//! value estimates travel up as integer cost tables; symbolic actions
//! travel down as learner tasks; learner moves travel down as motor
//! vectors. Context maps and the world-to-learner utility map are empty.

use std::fmt;
use std::sync::Arc;

use hierarchy_core::{
    ActiveHierarchy, Hierarchy, HierarchyError, Link, NodeContract, NodeId, Pass,
};

use crate::exact::global_index;
use crate::grid::{
    proj_cells, proj_index, step_world, Cell, Dir, RoomId, WorldMap, WorldState, FREE_CELLS,
};
use crate::learner::{
    plan_learner, predict_next, splitmix64, tally_learn, GlobalSpace, GreedyPolicy, ProjSpace,
    QState, StateSpace, TallyModel, Task, Terminal,
};
use crate::planner::{
    absorb_tables, plan_planner, symbolic_transition, CostTables, Feature, PlanPolicy,
    PlannerState, RoomGraph, SymAction, SymState,
};
use crate::scenario::Scenario;
use crate::Scalar;

/// The world node's id in both assemblies.
pub const WORLD: NodeId = NodeId(0);
/// The learner node's id in both assemblies.
pub const LEARNER: NodeId = NodeId(1);
/// The planner node's id in the three-level assembly.
pub const PLANNER: NodeId = NodeId(2);

/// Value domain shared by every node and link in the navigation
/// hierarchies. Accessors panic on the wrong variant: a mismatch means the
/// wiring is wrong, and silence would only move the failure downstream.
#[derive(Clone, Debug, PartialEq)]
pub enum NavValue {
    /// Full world state (world node belief).
    World(WorldState),
    /// Robot location as room and cell (learner belief, sensed upward).
    At(RoomId, Cell),
    /// Symbolic location (planner belief, sensed upward).
    Sym(SymState),
    /// A grid move (learner policy output).
    Move(Dir),
    /// A motor vector (move translated for the world).
    Motor(i16, i16),
    /// A learner task (symbolic action translated downward).
    Task(Task),
    /// A symbolic action (planner policy output).
    SymAct(SymAction),
    /// Transition tallies (learner model).
    Tally(TallyModel),
    /// Q-tables and hyperparameters (learner planning state).
    Q(QState),
    /// Greedy policy snapshot (learner policy).
    Greedy(GreedyPolicy),
    /// Integer cost tables (utility flowing up to the planner).
    Tables(CostTables),
    /// Room connectivity (planner model).
    Graph(Arc<RoomGraph>),
    /// Planner working state.
    PlanState(PlannerState),
    /// Planner policy.
    PlanPol(PlanPolicy),
    /// Placeholder for slots a node does not use.
    Unit,
}

impl NavValue {
    pub fn world(&self) -> &WorldState {
        match self {
            NavValue::World(w) => w,
            other => panic!("expected a world state, found {other}"),
        }
    }

    pub fn at(&self) -> (RoomId, Cell) {
        match self {
            NavValue::At(r, c) => (*r, *c),
            other => panic!("expected a location, found {other}"),
        }
    }

    pub fn sym(&self) -> SymState {
        match self {
            NavValue::Sym(s) => *s,
            other => panic!("expected a symbolic state, found {other}"),
        }
    }

    pub fn tally(&self) -> &TallyModel {
        match self {
            NavValue::Tally(t) => t,
            other => panic!("expected tallies, found {other}"),
        }
    }

    pub fn q(&self) -> &QState {
        match self {
            NavValue::Q(q) => q,
            other => panic!("expected a learner planning state, found {other}"),
        }
    }

    pub fn greedy(&self) -> &GreedyPolicy {
        match self {
            NavValue::Greedy(g) => g,
            other => panic!("expected a greedy policy, found {other}"),
        }
    }

    pub fn graph(&self) -> &Arc<RoomGraph> {
        match self {
            NavValue::Graph(g) => g,
            other => panic!("expected a room graph, found {other}"),
        }
    }

    pub fn tables(&self) -> &CostTables {
        match self {
            NavValue::Tables(t) => t,
            other => panic!("expected cost tables, found {other}"),
        }
    }

    pub fn planner_state(&self) -> &PlannerState {
        match self {
            NavValue::PlanState(p) => p,
            other => panic!("expected a planner state, found {other}"),
        }
    }

    pub fn plan_policy(&self) -> &PlanPolicy {
        match self {
            NavValue::PlanPol(p) => p,
            other => panic!("expected a planner policy, found {other}"),
        }
    }
}

impl fmt::Display for NavValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavValue::World(w) => {
                write!(f, "world(#{} ({},{}))", w.room.0, w.cell.x, w.cell.y)
            }
            NavValue::At(r, c) => write!(f, "at(#{} ({},{}))", r.0, c.x, c.y),
            NavValue::Sym(s) => write!(f, "sym(#{} {})", s.room.0, s.feature),
            NavValue::Move(d) => write!(f, "move({d})"),
            NavValue::Motor(dx, dy) => write!(f, "motor({dx},{dy})"),
            NavValue::Task(t) => write!(f, "task({t})"),
            NavValue::SymAct(a) => write!(f, "act({a})"),
            NavValue::Tally(t) => write!(f, "tally({} states)", t.n_states()),
            NavValue::Q(q) => {
                write!(f, "q({} tables", q.tables.len())?;
                match q.active {
                    Some(t) => write!(f, " active {t})"),
                    None => write!(f, ")"),
                }
            }
            NavValue::Greedy(g) => match g.task {
                Some(t) => write!(f, "greedy({t})"),
                None => write!(f, "greedy(idle)"),
            },
            NavValue::Tables(t) => {
                write!(f, "tables({} ctf, {} cbf)", t.ctf.len(), t.cbf.len())
            }
            NavValue::Graph(g) => write!(f, "graph({} conns)", g.conn.len()),
            NavValue::PlanState(p) => match &p.plan {
                Some(plan) => write!(f, "plan({} steps @ {})", plan.steps.len(), p.cursor),
                None => write!(f, "plan(none)"),
            },
            NavValue::PlanPol(p) => match p.action {
                Some(a) => write!(f, "policy({a})"),
                None => write!(f, "policy(idle)"),
            },
            NavValue::Unit => write!(f, "()"),
        }
    }
}

/// The feature of the map under (room, cell): a door, the goal, or nothing.
pub fn feature_at(map: &WorldMap, room: RoomId, cell: Cell) -> Feature {
    if let Some(d) = map.room(room).door_at(cell) {
        Feature::Door(d)
    } else if map.goal == (room, cell) {
        Feature::Goal
    } else {
        Feature::Unknown
    }
}

fn dir_from_motor(dx: i16, dy: i16) -> Option<Dir> {
    Dir::ALL.into_iter().find(|d| d.delta() == (dx, dy))
}

/// World node: holds the live environment and advances it with the motor
/// commands sent down. All passes except action skip it; its belief moves
/// only when the action pass actuates.
pub struct WorldNode {
    map: Arc<WorldMap>,
    p_intended: Scalar,
    seed: u64,
}

impl NodeContract<NavValue> for WorldNode {
    fn initial_belief(&self) -> NavValue {
        NavValue::World(WorldState::at_start(&self.map, self.seed))
    }

    fn initial_policy(&self) -> NavValue {
        NavValue::Unit
    }

    fn initial_transition_model(&self) -> NavValue {
        NavValue::Unit
    }

    fn initial_planning_state(&self) -> NavValue {
        NavValue::Unit
    }

    fn observation_update(&self, belief: &NavValue, _observations: &[NavValue]) -> NavValue {
        belief.clone()
    }

    fn transition_apply(
        &self,
        _model: &NavValue,
        belief: &NavValue,
        _context: &[NavValue],
        _actions: &[NavValue],
    ) -> NavValue {
        belief.clone()
    }

    fn transition_learn(
        &self,
        model: &NavValue,
        _belief: &NavValue,
        _context: &[NavValue],
        _actions: &[NavValue],
        _corrected: &NavValue,
    ) -> NavValue {
        model.clone()
    }

    fn utility_absorb(&self, planning: &NavValue, _utilities: &[NavValue]) -> NavValue {
        planning.clone()
    }

    fn plan(
        &self,
        policy: &NavValue,
        _model: &NavValue,
        _tasks: &[NavValue],
        planning: &NavValue,
        _belief: &NavValue,
    ) -> (NavValue, NavValue) {
        (policy.clone(), planning.clone())
    }

    fn policy_apply(&self, _policy: &NavValue, _belief: &NavValue) -> Vec<NavValue> {
        Vec::new()
    }

    fn actuate(&self, belief: &NavValue, tasks: &[NavValue]) -> NavValue {
        let command = tasks.iter().find_map(|t| match t {
            NavValue::Motor(dx, dy) => dir_from_motor(*dx, *dy),
            _ => None,
        });
        NavValue::World(step_world(&self.map, belief.world(), command, self.p_intended))
    }
}

/// Learner node over the projected room template: 90 states shared by all
/// rooms, door crossings folded to self-loops.
pub struct LearnerNode {
    map: Arc<WorldMap>,
    space: ProjSpace,
    cells: Vec<Cell>,
    epsilon: Scalar,
    gamma: Scalar,
    vi_tolerance: Scalar,
    vi_sweeps: u32,
    explore_seed: u64,
}

impl LearnerNode {
    fn new(map: Arc<WorldMap>, scenario: &Scenario) -> Self {
        let p = &scenario.params;
        LearnerNode {
            map,
            space: ProjSpace::new(),
            cells: proj_cells(),
            epsilon: p.epsilon,
            gamma: p.gamma,
            vi_tolerance: p.vi_tolerance,
            vi_sweeps: p.vi_sweeps,
            explore_seed: p.seed,
        }
    }

    fn terminal_of(&self, task: Task) -> Terminal {
        match task {
            Task::Door(d) => {
                let cell = self
                    .map
                    .door_position(d)
                    .expect("tasks only name doors on the map");
                Terminal::CrossSelfAt(proj_index(cell))
            }
            Task::Goal => Terminal::Reach(proj_index(self.map.goal.1)),
        }
    }
}

impl NodeContract<NavValue> for LearnerNode {
    fn initial_belief(&self) -> NavValue {
        NavValue::At(self.map.start.0, self.map.start.1)
    }

    fn initial_policy(&self) -> NavValue {
        NavValue::Greedy(GreedyPolicy::idle())
    }

    fn initial_transition_model(&self) -> NavValue {
        NavValue::Tally(TallyModel::new(self.space.n_states()))
    }

    fn initial_planning_state(&self) -> NavValue {
        NavValue::Q(QState::new(
            self.epsilon,
            self.gamma,
            self.vi_tolerance,
            self.vi_sweeps,
            self.explore_seed,
            proj_index(self.map.start.1),
        ))
    }

    fn observation_update(&self, belief: &NavValue, observations: &[NavValue]) -> NavValue {
        observations.first().unwrap_or(belief).clone()
    }

    fn transition_apply(
        &self,
        model: &NavValue,
        belief: &NavValue,
        _context: &[NavValue],
        actions: &[NavValue],
    ) -> NavValue {
        let (room, cell) = belief.at();
        match actions.first() {
            Some(NavValue::Move(d)) => {
                let next = predict_next(model.tally(), &self.space, proj_index(cell), *d);
                NavValue::At(room, self.cells[next])
            }
            _ => belief.clone(),
        }
    }

    fn transition_learn(
        &self,
        model: &NavValue,
        belief: &NavValue,
        _context: &[NavValue],
        actions: &[NavValue],
        corrected: &NavValue,
    ) -> NavValue {
        match actions.first() {
            Some(NavValue::Move(d)) => {
                let before = proj_index(belief.at().1);
                let after = proj_index(corrected.at().1);
                NavValue::Tally(tally_learn(model.tally(), &self.space, before, *d, after))
            }
            _ => model.clone(),
        }
    }

    fn utility_absorb(&self, planning: &NavValue, _utilities: &[NavValue]) -> NavValue {
        planning.clone()
    }

    fn plan(
        &self,
        _policy: &NavValue,
        model: &NavValue,
        tasks: &[NavValue],
        planning: &NavValue,
        belief: &NavValue,
    ) -> (NavValue, NavValue) {
        let offered: Vec<Task> = tasks
            .iter()
            .filter_map(|t| match t {
                NavValue::Task(task) => Some(*task),
                _ => None,
            })
            .collect();
        let (policy, q) = plan_learner(
            planning.q(),
            model.tally(),
            &self.space,
            &|t| self.terminal_of(t),
            &offered,
            proj_index(belief.at().1),
        );
        (NavValue::Greedy(policy), NavValue::Q(q))
    }

    fn policy_apply(&self, policy: &NavValue, belief: &NavValue) -> Vec<NavValue> {
        match policy.greedy().action(proj_index(belief.at().1)) {
            Some(d) => vec![NavValue::Move(d)],
            None => Vec::new(),
        }
    }
}

/// Flat baseline learner over all (room, cell) states of the map. No node
/// above it exists, so it assigns itself the goal task.
pub struct FlatLearnerNode {
    map: Arc<WorldMap>,
    space: GlobalSpace,
    cells: Vec<Cell>,
    epsilon: Scalar,
    gamma: Scalar,
    vi_tolerance: Scalar,
    vi_sweeps: u32,
    explore_seed: u64,
}

impl FlatLearnerNode {
    fn new(map: Arc<WorldMap>, scenario: &Scenario) -> Self {
        let p = &scenario.params;
        FlatLearnerNode {
            space: GlobalSpace::new(&map),
            cells: proj_cells(),
            epsilon: p.epsilon,
            gamma: p.gamma,
            vi_tolerance: p.vi_tolerance,
            vi_sweeps: p.vi_sweeps,
            explore_seed: p.seed,
            map,
        }
    }

    fn split(&self, state: usize) -> (RoomId, Cell) {
        (RoomId(state / FREE_CELLS), self.cells[state % FREE_CELLS])
    }

    fn terminal_of(&self, task: Task) -> Terminal {
        match task {
            Task::Goal => Terminal::Reach(global_index(self.map.goal.0, self.map.goal.1)),
            Task::Door(_) => unreachable!("the flat learner only ever holds the goal task"),
        }
    }
}

impl NodeContract<NavValue> for FlatLearnerNode {
    fn initial_belief(&self) -> NavValue {
        NavValue::At(self.map.start.0, self.map.start.1)
    }

    fn initial_policy(&self) -> NavValue {
        NavValue::Greedy(GreedyPolicy::idle())
    }

    fn initial_transition_model(&self) -> NavValue {
        NavValue::Tally(TallyModel::new(self.space.n_states()))
    }

    fn initial_planning_state(&self) -> NavValue {
        NavValue::Q(QState::new(
            self.epsilon,
            self.gamma,
            self.vi_tolerance,
            self.vi_sweeps,
            self.explore_seed,
            global_index(self.map.start.0, self.map.start.1),
        ))
    }

    fn observation_update(&self, belief: &NavValue, observations: &[NavValue]) -> NavValue {
        observations.first().unwrap_or(belief).clone()
    }

    fn transition_apply(
        &self,
        model: &NavValue,
        belief: &NavValue,
        _context: &[NavValue],
        actions: &[NavValue],
    ) -> NavValue {
        let (room, cell) = belief.at();
        match actions.first() {
            Some(NavValue::Move(d)) => {
                let next =
                    predict_next(model.tally(), &self.space, global_index(room, cell), *d);
                let (r, c) = self.split(next);
                NavValue::At(r, c)
            }
            _ => belief.clone(),
        }
    }

    fn transition_learn(
        &self,
        model: &NavValue,
        belief: &NavValue,
        _context: &[NavValue],
        actions: &[NavValue],
        corrected: &NavValue,
    ) -> NavValue {
        match actions.first() {
            Some(NavValue::Move(d)) => {
                let (rb, cb) = belief.at();
                let (ra, ca) = corrected.at();
                NavValue::Tally(tally_learn(
                    model.tally(),
                    &self.space,
                    global_index(rb, cb),
                    *d,
                    global_index(ra, ca),
                ))
            }
            _ => model.clone(),
        }
    }

    fn utility_absorb(&self, planning: &NavValue, _utilities: &[NavValue]) -> NavValue {
        planning.clone()
    }

    fn plan(
        &self,
        _policy: &NavValue,
        model: &NavValue,
        tasks: &[NavValue],
        planning: &NavValue,
        belief: &NavValue,
    ) -> (NavValue, NavValue) {
        debug_assert!(tasks.is_empty(), "nothing sits above the flat learner");
        let (room, cell) = belief.at();
        let (policy, q) = plan_learner(
            planning.q(),
            model.tally(),
            &self.space,
            &|t| self.terminal_of(t),
            &[Task::Goal],
            global_index(room, cell),
        );
        (NavValue::Greedy(policy), NavValue::Q(q))
    }

    fn policy_apply(&self, policy: &NavValue, belief: &NavValue) -> Vec<NavValue> {
        let (room, cell) = belief.at();
        match policy.greedy().action(global_index(room, cell)) {
            Some(d) => vec![NavValue::Move(d)],
            None => Vec::new(),
        }
    }
}

/// Planner node: fixed room graph as its model, cost tables absorbed from
/// the learner's utility, bounded-horizon plans followed by cursor.
pub struct PlannerNode {
    graph: Arc<RoomGraph>,
    horizon: u32,
    initial: SymState,
}

impl NodeContract<NavValue> for PlannerNode {
    fn initial_belief(&self) -> NavValue {
        NavValue::Sym(self.initial)
    }

    fn initial_policy(&self) -> NavValue {
        NavValue::PlanPol(PlanPolicy::idle())
    }

    fn initial_transition_model(&self) -> NavValue {
        NavValue::Graph(Arc::clone(&self.graph))
    }

    fn initial_planning_state(&self) -> NavValue {
        NavValue::PlanState(PlannerState::new())
    }

    fn observation_update(&self, belief: &NavValue, observations: &[NavValue]) -> NavValue {
        observations.first().unwrap_or(belief).clone()
    }

    fn transition_apply(
        &self,
        model: &NavValue,
        belief: &NavValue,
        _context: &[NavValue],
        actions: &[NavValue],
    ) -> NavValue {
        let sym = belief.sym();
        match actions.first() {
            Some(NavValue::SymAct(a)) => {
                NavValue::Sym(symbolic_transition(model.graph(), sym, *a).unwrap_or(sym))
            }
            _ => belief.clone(),
        }
    }

    fn transition_learn(
        &self,
        model: &NavValue,
        _belief: &NavValue,
        _context: &[NavValue],
        _actions: &[NavValue],
        _corrected: &NavValue,
    ) -> NavValue {
        model.clone()
    }

    fn utility_absorb(&self, planning: &NavValue, utilities: &[NavValue]) -> NavValue {
        let mut state = planning.planner_state().clone();
        for u in utilities {
            state = absorb_tables(&state, u.tables().clone());
        }
        NavValue::PlanState(state)
    }

    fn plan(
        &self,
        _policy: &NavValue,
        model: &NavValue,
        _tasks: &[NavValue],
        planning: &NavValue,
        belief: &NavValue,
    ) -> (NavValue, NavValue) {
        let (policy, state) = plan_planner(
            planning.planner_state(),
            model.graph(),
            belief.sym(),
            self.horizon,
        );
        (NavValue::PlanPol(policy), NavValue::PlanState(state))
    }

    fn policy_apply(&self, policy: &NavValue, belief: &NavValue) -> Vec<NavValue> {
        let p = policy.plan_policy();
        match (p.expected, p.action) {
            (Some(expected), Some(action)) if expected == belief.sym() => {
                vec![NavValue::SymAct(action)]
            }
            _ => Vec::new(),
        }
    }
}

/// The world-to-learner sensing map: the robot's location triple.
fn sense_0_1(belief: &NavValue) -> Vec<NavValue> {
    let w = belief.world();
    vec![NavValue::At(w.room, w.cell)]
}

/// The learner-to-planner sensing map: the feature under the robot.
fn sense_1_2(map: &WorldMap, belief: &NavValue) -> Vec<NavValue> {
    let (room, cell) = belief.at();
    vec![NavValue::Sym(SymState::new(room, feature_at(map, room, cell)))]
}

/// Round a nonnegative expected step count to the nearest integer, halves
/// up. Tasks with no table yet read as zero cost, which is what sends the
/// planner through unexplored legs first.
fn round_cost(q: Option<Scalar>) -> u64 {
    q.map(|v| v.round() as u64).unwrap_or(0)
}

fn task_of(feature: Feature) -> Task {
    match feature {
        Feature::Door(d) => Task::Door(d),
        Feature::Goal => Task::Goal,
        Feature::Unknown => unreachable!("cost tables only cover real features"),
    }
}

/// The learner-to-planner utility map: total integer cost tables over the
/// map's features, read from the learner's Q-values. Cost-to-feature is
/// valued at the cell the learner last planned from, so it runs one cycle
/// behind the robot.
fn util_1_2(map: &WorldMap, planning: &NavValue) -> Vec<NavValue> {
    let q = planning.q();
    let mut features: Vec<(Feature, Cell)> = map
        .door_ids()
        .into_iter()
        .map(|d| {
            let cell = map.door_position(d).expect("listed doors have positions");
            (Feature::Door(d), cell)
        })
        .collect();
    features.push((Feature::Goal, map.goal.1));

    let mut tables = CostTables::default();
    for &(f, _) in &features {
        tables
            .ctf
            .insert(f, round_cost(q.min_q(task_of(f), q.cur_state)));
    }
    for &(f1, c1) in &features {
        for &(f2, _) in &features {
            tables
                .cbf
                .insert((f1, f2), round_cost(q.min_q(task_of(f2), proj_index(c1))));
        }
    }
    vec![NavValue::Tables(tables)]
}

/// The planner-to-learner task map: symbolic actions become learner tasks.
fn task_2_1(actions: &[NavValue]) -> Vec<NavValue> {
    actions
        .iter()
        .filter_map(|a| match a {
            NavValue::SymAct(SymAction::Traverse(d)) => Some(NavValue::Task(Task::Door(*d))),
            NavValue::SymAct(SymAction::MoveGoal) => Some(NavValue::Task(Task::Goal)),
            _ => None,
        })
        .collect()
}

/// The learner-to-world task map: moves become motor vectors.
fn task_1_0(actions: &[NavValue]) -> Vec<NavValue> {
    actions
        .iter()
        .filter_map(|a| match a {
            NavValue::Move(d) => {
                let (dx, dy) = d.delta();
                Some(NavValue::Motor(dx, dy))
            }
            _ => None,
        })
        .collect()
}

/// Assemble the three-level hierarchy for a scenario: world, projected
/// learner, symbolic planner, with the function tuples of both links.
pub fn build_hierarchy(scenario: &Scenario) -> Result<ActiveHierarchy<NavValue>, HierarchyError> {
    let map = Arc::new(scenario.map.clone());
    let graph = Arc::new(RoomGraph::from_map(&map));
    let p = &scenario.params;

    let world = Arc::new(WorldNode {
        map: Arc::clone(&map),
        p_intended: p.p_intended,
        seed: p.seed,
    });
    let learner = Arc::new(LearnerNode::new(Arc::clone(&map), scenario));
    let planner = Arc::new(PlannerNode {
        graph,
        horizon: p.horizon,
        initial: SymState::new(map.start.0, feature_at(&map, map.start.0, map.start.1)),
    });

    let sense_map = Arc::clone(&map);
    let util_map = Arc::clone(&map);
    let links = vec![
        Link::new(WORLD, LEARNER)
            .with_sensing(sense_0_1)
            .with_task_params(task_1_0),
        Link::new(LEARNER, PLANNER)
            .with_sensing(move |b: &NavValue| sense_1_2(&sense_map, b))
            .with_utility(move |p: &NavValue| util_1_2(&util_map, p))
            .with_task_params(task_2_1),
    ];
    ActiveHierarchy::new(Hierarchy::new(vec![world, learner, planner], links, WORLD))
}

/// Assemble the two-level flat baseline: world and the global learner,
/// wired with the same sensing and motor maps and no planner above.
pub fn build_flat(scenario: &Scenario) -> Result<ActiveHierarchy<NavValue>, HierarchyError> {
    let map = Arc::new(scenario.map.clone());
    let p = &scenario.params;

    let world = Arc::new(WorldNode {
        map: Arc::clone(&map),
        p_intended: p.p_intended,
        seed: p.seed,
    });
    let learner = Arc::new(FlatLearnerNode::new(Arc::clone(&map), scenario));

    let links = vec![Link::new(WORLD, LEARNER)
        .with_sensing(sense_0_1)
        .with_task_params(task_1_0)];
    ActiveHierarchy::new(Hierarchy::new(vec![world, learner], links, WORLD))
}

/// True when the assembly has a planner node.
pub fn is_hierarchical(ah: &ActiveHierarchy<NavValue>) -> bool {
    ah.hierarchy().len() > 2
}

/// The robot's current (room, cell) in the live world.
pub fn world_position(ah: &ActiveHierarchy<NavValue>) -> (RoomId, Cell) {
    let w = ah.state(WORLD).current_belief.world();
    (w.room, w.cell)
}

/// World noise seed for one episode of a run.
pub fn episode_seed(base: u64, episode: u32) -> u64 {
    splitmix64(base ^ (episode as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Seed base for evaluation episodes, kept apart from training noise.
pub fn eval_seed(base: u64) -> u64 {
    splitmix64(base ^ 0x5851_f42d_4c95_7f2d)
}

/// Whether the learner explores during an episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Learning,
    Evaluation,
}

/// Set the learner's evaluation flag (exploration off) in place.
pub fn set_evaluation(ah: &mut ActiveHierarchy<NavValue>, on: bool) {
    if let NavValue::Q(q) = &mut ah.state_mut(LEARNER).planning_state {
        q.evaluation = on;
    }
}

/// Rewind the hierarchy to the start of a fresh episode: the world is
/// reseeded from (base seed, episode), all beliefs return to the start, and
/// both decision nodes drop their policies and active plans. Learned
/// tallies, Q-tables, and absorbed cost tables persist. Policies must be
/// dropped: a held policy would claim an action for the teleported start
/// belief and the next transition-learn pass would tally a move the world
/// never made.
pub fn reset_episode(
    ah: &mut ActiveHierarchy<NavValue>,
    map: &WorldMap,
    base_seed: u64,
    episode: u32,
) {
    let hierarchical = is_hierarchical(ah);

    let ws = WorldState::at_start(map, episode_seed(base_seed, episode));
    let world = ah.state_mut(WORLD);
    world.current_belief = NavValue::World(ws.clone());
    world.predicted_belief = NavValue::World(ws.clone());
    world.corrected_belief = NavValue::World(ws);

    let start = NavValue::At(map.start.0, map.start.1);
    let start_index = if hierarchical {
        proj_index(map.start.1)
    } else {
        global_index(map.start.0, map.start.1)
    };
    let learner = ah.state_mut(LEARNER);
    learner.current_belief = start.clone();
    learner.predicted_belief = start.clone();
    learner.corrected_belief = start;
    learner.policy = NavValue::Greedy(GreedyPolicy::idle());
    if let NavValue::Q(q) = &mut learner.planning_state {
        q.active = None;
        q.cur_state = start_index;
    }

    if hierarchical {
        let sym = NavValue::Sym(SymState::new(
            map.start.0,
            feature_at(map, map.start.0, map.start.1),
        ));
        let planner = ah.state_mut(PLANNER);
        planner.current_belief = sym.clone();
        planner.predicted_belief = sym.clone();
        planner.corrected_belief = sym;
        planner.policy = NavValue::PlanPol(PlanPolicy::idle());
        if let NavValue::PlanState(p) = &mut planner.planning_state {
            p.plan = None;
            p.expected.clear();
            p.cursor = 0;
            p.dirty = true;
        }
    }
}

/// Sense and learn the final world step: one correction and one learning
/// pass, with no action pass so nothing actuates. The move that ends an
/// episode lands in the world during the action pass, after the upward
/// passes have already run; without this epilogue the arrival transition
/// would never reach the tallies, and a terminal cell would look
/// unenterable to the model once every approach had been sampled.
fn absorb_final_step(ah: ActiveHierarchy<NavValue>) -> ActiveHierarchy<NavValue> {
    let order: Vec<NodeId> = (0..ah.hierarchy().len()).map(NodeId).collect();
    ah.update_pass(Pass::Correction, &order)
        .and_then(|ah| ah.update_pass(Pass::TransitionLearn, &order))
        .expect("ascending ids run lower nodes first")
}

/// Run update cycles until the world robot stands on the goal cell or
/// `max_steps` cycles have passed; each cycle issues at most one world
/// step, and the last step's transition is still absorbed into the models
/// before returning. Returns the cycle count and the final hierarchy. A
/// robot already on the goal runs zero cycles.
pub fn run_episode(
    mut ah: ActiveHierarchy<NavValue>,
    map: &WorldMap,
    max_steps: u32,
    mode: Mode,
) -> (u32, ActiveHierarchy<NavValue>) {
    set_evaluation(&mut ah, mode == Mode::Evaluation);
    let mut steps = 0;
    while steps < max_steps && world_position(&ah) != map.goal {
        ah = ah.process_update();
        steps += 1;
    }
    if steps > 0 {
        ah = absorb_final_step(ah);
    }
    (steps, ah)
}

/// One recorded step of a trajectory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub t: u32,
    pub room: RoomId,
    pub cell: Cell,
    pub command: Option<Dir>,
    pub actual: Option<Dir>,
}

/// Like [`run_episode`], also recording the world state after every cycle.
pub fn run_episode_traced(
    mut ah: ActiveHierarchy<NavValue>,
    map: &WorldMap,
    max_steps: u32,
    mode: Mode,
) -> (u32, Vec<TraceRow>, ActiveHierarchy<NavValue>) {
    set_evaluation(&mut ah, mode == Mode::Evaluation);
    let mut steps = 0;
    let mut rows = Vec::new();
    while steps < max_steps && world_position(&ah) != map.goal {
        ah = ah.process_update();
        steps += 1;
        let w = ah.state(WORLD).current_belief.world();
        rows.push(TraceRow {
            t: steps,
            room: w.room,
            cell: w.cell,
            command: w.last_command,
            actual: w.last_actual,
        });
    }
    if steps > 0 {
        ah = absorb_final_step(ah);
    }
    (steps, rows, ah)
}

/// Render a trajectory as CSV `t,room,x,y,command,actual_dir`; rests render
/// their direction columns as `-`.
pub fn render_trajectory_csv(map: &WorldMap, rows: &[TraceRow]) -> String {
    let mut out = String::from("t,room,x,y,command,actual_dir\n");
    let dir = |d: Option<Dir>| d.map_or_else(|| "-".to_string(), |d| d.to_string());
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.t,
            map.room(r.room).name,
            r.cell.x,
            r.cell.y,
            dir(r.command),
            dir(r.actual),
        ));
    }
    out
}

/// Render the projected learner's Q-tables as CSV `task,x,y,action,q`,
/// tasks in task order, cells in projection order, actions in direction
/// order.
pub fn render_qtable_csv(q: &QState) -> String {
    let cells = proj_cells();
    let mut out = String::from("task,x,y,action,q\n");
    for (task, table) in &q.tables {
        for (s, row) in table.iter().enumerate() {
            let c = cells[s];
            for d in Dir::ALL {
                out.push_str(&format!(
                    "{},{},{},{},{:.6}\n",
                    task,
                    c.x,
                    c.y,
                    d,
                    row[d.index()],
                ));
            }
        }
    }
    out
}

/// Render projected transition tallies as CSV `x,y,action,nx,ny,count`,
/// one row per observed successor, cells in projection order.
pub fn render_tally_csv(model: &TallyModel) -> String {
    let space = ProjSpace::new();
    let cells = proj_cells();
    let mut out = String::from("x,y,action,nx,ny,count\n");
    for (s, &cell) in cells.iter().enumerate() {
        for d in Dir::ALL {
            for (succ, count) in model.successor_counts(&space, s, d) {
                let n = cells[succ];
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    cell.x, cell.y, d, n.x, n.y, count,
                ));
            }
        }
    }
    out
}
