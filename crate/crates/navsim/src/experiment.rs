//! Experiment drivers shared by the command-line front end and the
//! acceptance suite: seeded training runs, fixed-probe convergence
//! detection, evaluation trials, visitation counts, and the CSV renderings
//! of their results.
//!
//! Every driver derives all randomness from the scenario's base seed
//! through splitmix streams, so a rerun with the same inputs reproduces
//! every output byte. Run streams, episode streams, and evaluation streams
//! are separated by distinct mixing constants.

use std::fmt::Write as _;

use hierarchy_core::{ActiveHierarchy, HierarchyError, Pass};

use crate::exact::{expected_steps, global_index, ideal_route};
use crate::grid::{cell_free, Cell, RoomId, WorldMap, GRID_H, GRID_W};
use crate::learner::splitmix64;
use crate::nav::{
    build_flat, build_hierarchy, eval_seed, reset_episode, run_episode, run_episode_traced,
    set_evaluation, Mode, NavValue, PLANNER,
};
use crate::planner::{
    action_cost, expected_states, CostTables, Plan, RoomGraph, SymState,
};
use crate::scenario::Scenario;
use crate::Scalar;

/// Which agent assembly an experiment drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Agent {
    Hierarchical,
    Flat,
}

impl Agent {
    /// The name used in CSV output and command-line flags.
    pub fn name(self) -> &'static str {
        match self {
            Agent::Hierarchical => "hierarchical",
            Agent::Flat => "flat",
        }
    }

    /// Assemble this agent for a scenario.
    pub fn build(self, scenario: &Scenario) -> Result<ActiveHierarchy<NavValue>, HierarchyError> {
        match self {
            Agent::Hierarchical => build_hierarchy(scenario),
            Agent::Flat => build_flat(scenario),
        }
    }
}

/// Seed for one run of a multi-run experiment; distinct from the episode
/// and evaluation streams derived from it.
pub fn run_seed(base: u64, run: u32) -> u64 {
    splitmix64(base ^ (run as u64).wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// The scenario re-seeded for one run.
fn run_scenario(scenario: &Scenario, run: u32) -> Scenario {
    let mut sc = scenario.clone();
    sc.params.seed = run_seed(scenario.params.seed, run);
    sc
}

/// One training episode's record in a learning curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnRow {
    pub agent: Agent,
    pub run: u32,
    pub episode: u32,
    /// World steps this episode took; the cap itself when it expired.
    pub steps: u32,
    /// Cumulative world steps over the run up to and including this episode.
    pub cum_steps: u64,
}

/// Train one seeded run for `episodes` fresh episodes, recording the
/// learning curve row by row.
pub fn learn_run(
    scenario: &Scenario,
    agent: Agent,
    run: u32,
    episodes: u32,
) -> Result<(Vec<LearnRow>, ActiveHierarchy<NavValue>), HierarchyError> {
    let sc = run_scenario(scenario, run);
    let mut ah = agent.build(&sc)?;
    let mut rows = Vec::with_capacity(episodes as usize);
    let mut cum = 0u64;
    for episode in 0..episodes {
        reset_episode(&mut ah, &sc.map, sc.params.seed, episode);
        let (steps, next) = run_episode(ah, &sc.map, sc.params.max_steps, Mode::Learning);
        ah = next;
        cum += steps as u64;
        rows.push(LearnRow { agent, run, episode, steps, cum_steps: cum });
    }
    Ok((rows, ah))
}

/// Greedy steps from the start on a clone of `ah` under the fixed probe
/// world seed derived from `base`. Exploration is off; what the clone
/// learns during the probe is discarded with it.
pub fn eval_probe(ah: &ActiveHierarchy<NavValue>, map: &WorldMap, base: u64, cap: u32) -> u32 {
    let mut probe = ah.clone();
    reset_episode(&mut probe, map, eval_seed(base), 0);
    run_episode(probe, map, cap, Mode::Evaluation).0
}

/// Mean steps over `k` evaluation trials on clones of `ah`, each trial's
/// world drawn from the evaluation stream of `base` and capped at `cap`.
pub fn eval_mean(
    ah: &ActiveHierarchy<NavValue>,
    map: &WorldMap,
    base: u64,
    k: u32,
    cap: u32,
) -> Scalar {
    let mut total = 0u64;
    for trial in 0..k {
        let mut t = ah.clone();
        reset_episode(&mut t, map, eval_seed(base), trial);
        total += run_episode(t, map, cap, Mode::Evaluation).0 as u64;
    }
    total as Scalar / k as Scalar
}

/// Train until the fixed-seed evaluation probe is stable: the probes after
/// each of the last `window` episodes span at most one step. Returns the
/// trained hierarchy and `Some(episodes used)`, or `None` when
/// `max_episodes` pass without stabilizing.
pub fn train_to_convergence(
    scenario: &Scenario,
    agent: Agent,
    window: u32,
    max_episodes: u32,
) -> Result<(ActiveHierarchy<NavValue>, Option<u32>), HierarchyError> {
    let mut ah = agent.build(scenario)?;
    let map = &scenario.map;
    let base = scenario.params.seed;
    let cap = scenario.params.max_steps;
    let mut probes: Vec<u32> = Vec::new();
    for episode in 0..max_episodes {
        reset_episode(&mut ah, map, base, episode);
        ah = run_episode(ah, map, cap, Mode::Learning).1;
        probes.push(eval_probe(&ah, map, base, cap));
        if probes.len() >= window as usize {
            let tail = &probes[probes.len() - window as usize..];
            let lo = tail.iter().min().expect("window is nonempty");
            let hi = tail.iter().max().expect("window is nonempty");
            if hi - lo <= 1 {
                return Ok((ah, Some(episode + 1)));
            }
        }
    }
    Ok((ah, None))
}

/// Per-episode `k`-trial evaluation means for one seeded training run:
/// element i is the mean after training episode i.
pub fn eval_curve(
    scenario: &Scenario,
    agent: Agent,
    run: u32,
    k: u32,
    cap: u32,
    episodes: u32,
) -> Result<Vec<Scalar>, HierarchyError> {
    let sc = run_scenario(scenario, run);
    let mut ah = agent.build(&sc)?;
    let mut curve = Vec::with_capacity(episodes as usize);
    for episode in 0..episodes {
        reset_episode(&mut ah, &sc.map, sc.params.seed, episode);
        ah = run_episode(ah, &sc.map, sc.params.max_steps, Mode::Learning).1;
        curve.push(eval_mean(&ah, &sc.map, sc.params.seed, k, cap));
    }
    Ok(curve)
}

/// Train the hierarchical agent for `episodes`, then run one utility pass
/// and one action pass in evaluation mode from a fresh episode start, and
/// return the plan the planner committed together with the cost tables it
/// planned under.
pub fn plan_after_training(
    scenario: &Scenario,
    episodes: u32,
) -> Result<(Option<Plan>, CostTables), HierarchyError> {
    let map = &scenario.map;
    let base = scenario.params.seed;
    let mut ah = build_hierarchy(scenario)?;
    for episode in 0..episodes {
        reset_episode(&mut ah, map, base, episode);
        ah = run_episode(ah, map, scenario.params.max_steps, Mode::Learning).1;
    }
    reset_episode(&mut ah, map, eval_seed(base), 0);
    set_evaluation(&mut ah, true);
    let up: Vec<_> = ah.order_up().to_vec();
    let down: Vec<_> = ah.order_down().to_vec();
    ah = ah.update_pass(Pass::Utility, &up)?;
    ah = ah.update_pass(Pass::Action, &down)?;
    let ps = ah.state(PLANNER).planning_state.planner_state();
    let tables = ps.tables.clone().expect("the utility pass delivered tables");
    Ok((ps.plan.clone(), tables))
}

/// The room sequence a plan visits from `from`: the start room, then each
/// room entered, consecutive repeats collapsed.
pub fn plan_route(graph: &RoomGraph, from: SymState, plan: &Plan) -> Vec<RoomId> {
    let mut rooms: Vec<RoomId> =
        expected_states(graph, from, plan).iter().map(|s| s.room).collect();
    rooms.dedup();
    rooms
}

/// Render a committed plan as the plan-command text: one `t:action:cost`
/// line per step, then `cost:<total>`.
pub fn render_plan_text(
    graph: &RoomGraph,
    tables: &CostTables,
    from: SymState,
    plan: &Plan,
) -> String {
    let states = expected_states(graph, from, plan);
    let mut out = String::new();
    for &(action, t) in &plan.steps {
        let cost = action_cost(tables, states[t as usize], action)
            .expect("committed plans price every step");
        writeln!(out, "{t}:{action}:{cost}").expect("string writes are infallible");
    }
    writeln!(out, "cost:{}", plan.total_cost).expect("string writes are infallible");
    out
}

/// Per-(room, cell) visit counts over `trials` evaluation episodes on
/// clones of a trained hierarchy, indexed by global state. The robot's
/// position after each world step counts once, so the grand total equals
/// the summed trajectory lengths.
pub fn visitation_counts(
    ah: &ActiveHierarchy<NavValue>,
    map: &WorldMap,
    trials: u32,
    cap: u32,
    base: u64,
) -> Vec<u64> {
    let mut counts = vec![0u64; map.room_count() * crate::grid::FREE_CELLS];
    for trial in 0..trials {
        let mut t = ah.clone();
        reset_episode(&mut t, map, eval_seed(base), trial);
        let (_, rows, _) = run_episode_traced(t, map, cap, Mode::Evaluation);
        for row in rows {
            counts[global_index(row.room, row.cell)] += 1;
        }
    }
    counts
}

/// Exact-dynamics sweep row: the optimal route and its expected steps at
/// one slippage setting.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p_intended: Scalar,
    pub route: Vec<RoomId>,
    pub expected_steps: Scalar,
}

/// Solve the true dynamics at each slippage setting, in the given order.
pub fn sweep(map: &WorldMap, ps: &[Scalar]) -> Vec<SweepRow> {
    ps.iter()
        .map(|&p| SweepRow {
            p_intended: p,
            route: ideal_route(map, p),
            expected_steps: expected_steps(map, p),
        })
        .collect()
}

/// Render learning-curve rows as CSV `agent,run,episode,steps,cum_steps`,
/// sorted by (agent, run, episode) so parallel production is unobservable.
pub fn render_learn_csv(rows: &[LearnRow]) -> String {
    let mut sorted: Vec<&LearnRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.agent.name(), r.run, r.episode));
    let mut out = String::from("agent,run,episode,steps,cum_steps\n");
    for r in sorted {
        writeln!(out, "{},{},{},{},{}", r.agent.name(), r.run, r.episode, r.steps, r.cum_steps)
            .expect("string writes are infallible");
    }
    out
}

/// Render visit counts as CSV `room,x,y,count` over every grid cell of
/// every room; wall cells carry 0. Rows are ordered by room, then x, then
/// y, matching the column order.
pub fn render_heatmap_csv(map: &WorldMap, counts: &[u64]) -> String {
    let mut out = String::from("room,x,y,count\n");
    for (ri, room) in map.rooms.iter().enumerate() {
        for x in 0..GRID_W {
            for y in 0..GRID_H {
                let cell = Cell::new(x, y);
                let n = if cell_free(cell) {
                    counts[global_index(RoomId(ri), cell)]
                } else {
                    0
                };
                writeln!(out, "{},{},{},{}", room.name, x, y, n)
                    .expect("string writes are infallible");
            }
        }
    }
    out
}

/// Render sweep rows as CSV `p_intended,route,expected_steps`: the route
/// dash-joins room names, expected steps carry three decimals.
pub fn render_sweep_csv(map: &WorldMap, rows: &[SweepRow]) -> String {
    let mut out = String::from("p_intended,route,expected_steps\n");
    for r in rows {
        let route: Vec<&str> =
            r.route.iter().map(|&id| map.room(id).name.as_str()).collect();
        writeln!(out, "{},{},{:.3}", r.p_intended, route.join("-"), r.expected_steps)
            .expect("string writes are infallible");
    }
    out
}
