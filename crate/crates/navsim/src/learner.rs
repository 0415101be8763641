//! Learning machinery: tallied transition model, per-task Q-tables refreshed
//! by value iteration on the learned model, and greedy action choice with
//! seeded exploration.
//!
//! The machinery is parameterized by a [`StateSpace`] so the same code
//! drives the projected room-template learner (90 states, crossings are
//! self-loops) and the flat global learner (room count x 90 states,
//! crossings land in other rooms). Q-values are step counts: nonnegative,
//! zero exactly at task completion, clamped at a ceiling far above any
//! reachable cost so value iteration stays convergent while parts of the
//! state space are disconnected under the optimistic prior.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::grid::{Dir, Door};
use crate::{Real, Scalar};

/// A navigation task the learner can hold a Q-table for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    /// Complete a crossing of this door.
    Door(Door),
    /// Reach the goal cell.
    Goal,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Door(d) => write!(f, "{d}"),
            Task::Goal => write!(f, "goal"),
        }
    }
}

/// Where a task completes, in state-space terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// Arriving at this state completes the task.
    Reach(usize),
    /// A self-transition at this state completes the task (a door crossing
    /// in the projected space, where both sides share one cell).
    CrossSelfAt(usize),
}

/// A finite state space with per-state neighbor structure. Successors of any
/// state are the state itself, a neighbor, or its door successor; that is
/// what lets tallies use a fixed six-slot encoding.
pub trait StateSpace {
    fn n_states(&self) -> usize;
    /// Free neighbor of `s` in direction `d`, if any.
    fn neighbor(&self, s: usize, d: Dir) -> Option<usize>;
    /// The state a door crossing from `s` lands in, when that is a distinct
    /// state. None where crossings are self-loops or `s` has no door.
    fn door_successor(&self, s: usize) -> Option<usize>;
    /// The direction whose press crosses the door at `s`, for spaces where
    /// crossings are distinct states. None without a door or where
    /// crossings are self-loops.
    fn door_exit(&self, _s: usize) -> Option<Dir> {
        None
    }
}

/// Successor slots per (state, action): the state itself, its four
/// neighbors in direction order, and its door successor.
const SLOT_SELF: usize = 0;
const SLOT_DOOR: usize = 5;
const N_SLOTS: usize = 6;

/// Transition counts per (state, action, successor slot). A pure value:
/// learning clones and increments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TallyModel {
    counts: Vec<[[u32; N_SLOTS]; 4]>,
}

impl TallyModel {
    /// All-zero tallies over `n_states` states.
    pub fn new(n_states: usize) -> Self {
        TallyModel { counts: vec![[[0; N_SLOTS]; 4]; n_states] }
    }

    pub fn n_states(&self) -> usize {
        self.counts.len()
    }

    /// Raw count for (state, action, slot).
    fn count(&self, s: usize, a: Dir, slot: usize) -> u32 {
        self.counts[s][a.index()][slot]
    }

    /// Total observations of (state, action).
    pub fn total(&self, s: usize, a: Dir) -> u32 {
        self.counts[s][a.index()].iter().sum()
    }

    /// Observed successors of (state, action) with their counts, slot order.
    pub fn successor_counts(
        &self,
        space: &dyn StateSpace,
        s: usize,
        a: Dir,
    ) -> Vec<(usize, u32)> {
        (0..N_SLOTS)
            .filter_map(|slot| {
                let c = self.count(s, a, slot);
                (c > 0).then(|| (slot_state(space, s, slot), c))
            })
            .collect()
    }
}

/// The slot `after` occupies among the successors of `before`, if it is a
/// legal one-step successor.
fn slot_of(space: &dyn StateSpace, before: usize, after: usize) -> Option<usize> {
    if after == before {
        return Some(SLOT_SELF);
    }
    for d in Dir::ALL {
        if space.neighbor(before, d) == Some(after) {
            return Some(1 + d.index());
        }
    }
    if space.door_successor(before) == Some(after) {
        return Some(SLOT_DOOR);
    }
    None
}

/// The state a slot refers to. Panics if the slot was never countable for
/// this state (counts are only written through `tally_learn`).
fn slot_state(space: &dyn StateSpace, s: usize, slot: usize) -> usize {
    match slot {
        SLOT_SELF => s,
        SLOT_DOOR => space.door_successor(s).expect("door slot counted only when present"),
        d => space
            .neighbor(s, Dir::ALL[d - 1])
            .expect("neighbor slot counted only when present"),
    }
}

/// One observed transition folded into the model. Unchanged (with a debug
/// assertion) if `after` is not a legal successor of `before`; correct runs
/// never produce such a pair.
pub fn tally_learn(
    model: &TallyModel,
    space: &dyn StateSpace,
    before: usize,
    action: Dir,
    after: usize,
) -> TallyModel {
    let mut next = model.clone();
    match slot_of(space, before, after) {
        Some(slot) => next.counts[before][action.index()][slot] += 1,
        None => debug_assert!(false, "successor {after} unreachable in one step from {before}"),
    }
    next
}

/// The optimistic prior's successor for an unobserved (state, action): the
/// intended neighbor, the door crossing when the intended direction exits
/// through `s`'s door, or the state itself when blocked. This matches the
/// true slip-free dynamics, so fresh value estimates are reachability-aware
/// lower bounds rather than walls.
fn prior_successor(space: &dyn StateSpace, s: usize, a: Dir) -> usize {
    space
        .neighbor(s, a)
        .or_else(|| (space.door_exit(s) == Some(a)).then(|| space.door_successor(s)).flatten())
        .unwrap_or(s)
}

/// Outcome distribution for (state, action) written into `out`; returns the
/// number of outcomes. Zero observations fall back to the optimistic prior
/// successor with probability one.
fn outcome_probs<R: Real>(
    model: &TallyModel,
    space: &dyn StateSpace,
    s: usize,
    a: Dir,
    out: &mut [(usize, R); N_SLOTS],
) -> usize {
    let total = model.total(s, a);
    if total == 0 {
        out[0] = (prior_successor(space, s, a), R::one());
        return 1;
    }
    let total_r = R::from_u32(total).expect("count fits the scalar");
    let mut n = 0;
    for slot in 0..N_SLOTS {
        let c = model.count(s, a, slot);
        if c > 0 {
            let p = R::from_u32(c).expect("count fits the scalar") / total_r;
            out[n] = (slot_state(space, s, slot), p);
            n += 1;
        }
    }
    n
}

/// Empirical successor distribution for (state, action), with the
/// optimistic prior standing in for unobserved pairs.
pub fn empirical_probs(
    model: &TallyModel,
    space: &dyn StateSpace,
    s: usize,
    a: Dir,
) -> Vec<(usize, Scalar)> {
    let mut buf = [(0usize, 0.0 as Scalar); N_SLOTS];
    let n = outcome_probs(model, space, s, a, &mut buf);
    buf[..n].to_vec()
}

/// Most likely successor of (state, action) under the model; ties pick the
/// smallest state index. The prior's successor when unobserved.
pub fn predict_next(model: &TallyModel, space: &dyn StateSpace, s: usize, a: Dir) -> usize {
    if model.total(s, a) == 0 {
        return prior_successor(space, s, a);
    }
    let mut best = (0u32, usize::MAX);
    for slot in 0..N_SLOTS {
        let c = model.count(s, a, slot);
        if c > 0 {
            let state = slot_state(space, s, slot);
            if c > best.0 || (c == best.0 && state < best.1) {
                best = (c, state);
            }
        }
    }
    best.1
}

/// Value-iteration cost ceiling for an `n`-state space.
fn cost_ceiling<R: Real>(n: usize) -> R {
    R::from_usize(n * 10).expect("ceiling fits the scalar")
}

fn min4<R: Real>(row: [R; 4]) -> R {
    row.iter().copied().fold(R::infinity(), R::min)
}

/// Gauss-Seidel value iteration for one task's Q-table over the model.
/// Sweeps in ascending state order until the largest update falls below
/// `tol` or `max_sweeps` is reached; returns the sweeps used. Terminal
/// contributions are zero; every update costs one step plus the discounted
/// successor value, clamped at the cost ceiling.
pub fn value_iterate<R: Real>(
    q: &mut [[R; 4]],
    space: &dyn StateSpace,
    model: &TallyModel,
    terminal: Terminal,
    gamma: R,
    tol: R,
    max_sweeps: u32,
) -> u32 {
    let n = space.n_states();
    debug_assert_eq!(q.len(), n, "table sized to the space");
    let ceiling = cost_ceiling::<R>(n);
    let mut buf = [(0usize, R::zero()); N_SLOTS];
    for sweep in 1..=max_sweeps {
        let mut delta = R::zero();
        for s in 0..n {
            if terminal == Terminal::Reach(s) {
                q[s] = [R::zero(); 4];
                continue;
            }
            for (ai, &a) in Dir::ALL.iter().enumerate() {
                let n_out = outcome_probs(model, space, s, a, &mut buf);
                let mut v = R::one();
                for &(succ, p) in &buf[..n_out] {
                    let done = match terminal {
                        Terminal::Reach(t) => succ == t,
                        Terminal::CrossSelfAt(c) => s == c && succ == s,
                    };
                    if !done {
                        v = v + gamma * p * min4(q[succ]);
                    }
                }
                let v = v.min(ceiling);
                let change = (v - q[s][ai]).abs();
                if change > delta {
                    delta = change;
                }
                q[s][ai] = v;
            }
        }
        if delta < tol {
            return sweep;
        }
    }
    max_sweeps
}

/// One task's Q-table: per-state, per-direction expected steps to complete.
pub type QTable = Vec<[Scalar; 4]>;

/// The learner's planning state: Q-tables per task, the active task, the
/// state the robot was last planned from, hyperparameters, and the
/// exploration stream. A pure value; the exploration counter advancing
/// inside `plan_learner` is what keeps draws replayable.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    pub tables: BTreeMap<Task, QTable>,
    pub active: Option<Task>,
    /// State index the last plan call saw; read by the utility map, so it
    /// is one cycle stale there by construction.
    pub cur_state: usize,
    pub epsilon: Scalar,
    pub gamma: Scalar,
    pub vi_tolerance: Scalar,
    pub vi_sweeps: u32,
    /// Limit each refresh to a single sweep (one-step temporal-difference
    /// flavor) instead of sweeping to tolerance.
    pub one_step: bool,
    /// Evaluation mode: exploration off.
    pub evaluation: bool,
    explore_base: u64,
    explore_counter: u64,
}

impl QState {
    /// Fresh planning state: no tables, no active task.
    pub fn new(
        epsilon: Scalar,
        gamma: Scalar,
        vi_tolerance: Scalar,
        vi_sweeps: u32,
        explore_seed: u64,
        start_state: usize,
    ) -> Self {
        QState {
            tables: BTreeMap::new(),
            active: None,
            cur_state: start_state,
            epsilon,
            gamma,
            vi_tolerance,
            vi_sweeps,
            one_step: false,
            evaluation: false,
            explore_base: explore_seed,
            explore_counter: 0,
        }
    }

    /// Lowest Q-value at `state` for `task`, if that table exists.
    pub fn min_q(&self, task: Task, state: usize) -> Option<Scalar> {
        self.tables.get(&task).map(|t| min4(t[state]))
    }

    /// Next value from the exploration stream, in [0, 1).
    fn draw(&mut self) -> Scalar {
        let x = splitmix64(self.explore_base.wrapping_add(self.explore_counter));
        self.explore_counter += 1;
        (x >> 11) as Scalar / (1u64 << 53) as Scalar
    }
}

/// SplitMix64 bit mixer; drives the exploration stream and episode seed
/// derivation, independent of the world's noise generator.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Greedy policy over a Q-table snapshot. The snapshot (not a live
/// reference) keeps the policy stable when later passes reuse it; the
/// exploration override, rolled at plan time, keeps application pure.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyPolicy {
    pub task: Option<Task>,
    pub table: Arc<QTable>,
    pub explore: Option<Dir>,
}

impl GreedyPolicy {
    /// The do-nothing policy a fresh learner starts with.
    pub fn idle() -> Self {
        GreedyPolicy { task: None, table: Arc::new(Vec::new()), explore: None }
    }

    /// The action at `state`: the exploration override if one was rolled,
    /// else the argmin direction (ties in direction order). None without an
    /// active task.
    pub fn action(&self, state: usize) -> Option<Dir> {
        self.task?;
        if let Some(d) = self.explore {
            return Some(d);
        }
        let row = self.table.get(state)?;
        let mut best = Dir::North;
        for d in Dir::ALL {
            if row[d.index()] < row[best.index()] {
                best = d;
            }
        }
        Some(best)
    }
}

/// The learner's planning step: adopt the first offered task (keeping the
/// previous one when none arrive), refresh every adopted task's Q-table by
/// value iteration on the model, roll the exploration override, and emit
/// the greedy policy. Pure in (state, inputs) -> (policy, state).
///
/// All tables are refreshed, not just the active one, so the cost tables
/// derived from them keep tracking the model as it improves; a task priced
/// once and then dropped would otherwise stay frozen at its early, badly
/// sampled estimate. Tables warm-start from their previous values, which
/// keeps the steady-state refresh to a sweep or two.
pub fn plan_learner(
    qstate: &QState,
    model: &TallyModel,
    space: &dyn StateSpace,
    terminal_of: &dyn Fn(Task) -> Terminal,
    tasks: &[Task],
    belief_state: usize,
) -> (GreedyPolicy, QState) {
    let mut q = qstate.clone();
    q.cur_state = belief_state;
    if let Some(&t) = tasks.first() {
        q.active = Some(t);
    }
    let Some(task) = q.active else {
        return (GreedyPolicy::idle(), q);
    };

    let n = space.n_states();
    q.tables.entry(task).or_insert_with(|| vec![[0.0; 4]; n]);
    let sweeps = if q.one_step { 1 } else { q.vi_sweeps };
    for (&t, table) in q.tables.iter_mut() {
        value_iterate(
            table,
            space,
            model,
            terminal_of(t),
            q.gamma,
            q.vi_tolerance,
            sweeps,
        );
    }
    let snapshot = Arc::new(q.tables[&task].clone());

    let explore = if !q.evaluation && q.epsilon > 0.0 && q.draw() < q.epsilon {
        let pick = (q.draw() * 4.0) as usize;
        Some(Dir::ALL[pick.min(3)])
    } else {
        None
    };
    (GreedyPolicy { task: Some(task), table: snapshot, explore }, q)
}

/// The room-projected space: the template's 90 free cells, door crossings
/// projected to self-loops.
#[derive(Clone, Debug)]
pub struct ProjSpace {
    neighbors: Vec<[Option<usize>; 4]>,
}

impl ProjSpace {
    pub fn new() -> Self {
        let cells = crate::grid::proj_cells();
        let neighbors = cells
            .iter()
            .map(|&c| {
                let mut row = [None; 4];
                for d in Dir::ALL {
                    row[d.index()] =
                        crate::grid::free_neighbor(c, d).map(crate::grid::proj_index);
                }
                row
            })
            .collect();
        ProjSpace { neighbors }
    }
}

impl Default for ProjSpace {
    fn default() -> Self {
        Self::new()
    }
}

impl StateSpace for ProjSpace {
    fn n_states(&self) -> usize {
        self.neighbors.len()
    }

    fn neighbor(&self, s: usize, d: Dir) -> Option<usize> {
        self.neighbors[s][d.index()]
    }

    fn door_successor(&self, _s: usize) -> Option<usize> {
        None
    }
}

/// The global space over (room, cell) states of a map; door crossings land
/// on the paired door's state in the other room.
#[derive(Clone, Debug)]
pub struct GlobalSpace {
    neighbors: Vec<[Option<usize>; 4]>,
    doors: Vec<Option<usize>>,
    exits: Vec<Option<Dir>>,
}

impl GlobalSpace {
    pub fn new(map: &crate::grid::WorldMap) -> Self {
        let cells = crate::grid::proj_cells();
        let n = map.room_count() * cells.len();
        let mut neighbors = vec![[None; 4]; n];
        let mut doors = vec![None; n];
        let mut exits = vec![None; n];
        for room in 0..map.room_count() {
            let rid = crate::grid::RoomId(room);
            for &cell in &cells {
                let here = crate::exact::global_index(rid, cell);
                for d in Dir::ALL {
                    neighbors[here][d.index()] = crate::grid::free_neighbor(cell, d)
                        .map(|c| crate::exact::global_index(rid, c));
                }
                if let Some(door) = map.room(rid).door_at(cell) {
                    let (to_room, to_door) =
                        map.crossing(rid, door).expect("every door is paired");
                    let landing = map
                        .room(to_room)
                        .door_cell(to_door)
                        .expect("paired door exists in its room");
                    doors[here] = Some(crate::exact::global_index(to_room, landing));
                    exits[here] = crate::grid::exit_dir(cell);
                }
            }
        }
        GlobalSpace { neighbors, doors, exits }
    }
}

impl StateSpace for GlobalSpace {
    fn n_states(&self) -> usize {
        self.neighbors.len()
    }

    fn neighbor(&self, s: usize, d: Dir) -> Option<usize> {
        self.neighbors[s][d.index()]
    }

    fn door_successor(&self, s: usize) -> Option<usize> {
        self.doors[s]
    }

    fn door_exit(&self, s: usize) -> Option<Dir> {
        self.exits[s]
    }
}
