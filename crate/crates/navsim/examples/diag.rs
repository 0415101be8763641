//! Scratch diagnostic: learned leg costs vs true projected values.

use navsim::exact::{proj_task_values, ProjTask};
use navsim::experiment::plan_after_training;
use navsim::grid::proj_index;
use navsim::planner::{action_cost, expected_states, plan_min_cost, Feature, RoomGraph, SymAction, SymState};
use navsim::scenario::canonical_scenario;
use navsim::Scalar;

fn main() {
    let mut sc = canonical_scenario();
    let p = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.8);
    let episodes: u32 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(30);
    sc.params.p_intended = p;
    if let Some(s) = std::env::args().nth(3).and_then(|s| s.parse().ok()) { sc.params.seed = s; }
    let map = sc.map.clone();
    let graph = RoomGraph::from_map(&map);
    let (plan, tables) = plan_after_training(&sc, episodes).expect("training runs");

    println!("p={p} episodes={episodes}");
    for state in graph.states() {
        let entry = match state.feature {
            Feature::Door(d) => map.door_position(d),
            Feature::Goal => Some(map.goal.1),
            Feature::Unknown => (state.room == map.start.0).then_some(map.start.1),
        };
        let Some(entry) = entry else { continue };
        let mut actions: Vec<SymAction> =
            graph.doors_of(state.room).into_iter().map(SymAction::Traverse).collect();
        if state.room == map.goal.0 {
            actions.push(SymAction::MoveGoal);
        }
        for a in actions {
            let learned = action_cost(&tables, state, a);
            let task = match a {
                SymAction::Traverse(d) => {
                    ProjTask::Cross(map.door_position(d).expect("door on map"))
                }
                SymAction::MoveGoal => ProjTask::Reach(map.goal.1),
            };
            let truth: Vec<Scalar> = proj_task_values(task, p);
            println!(
                "  r{}/{} {:?}: learned={:?} true={:.2}",
                state.room.0 + 1, state.feature, a, learned, truth[proj_index(entry)]
            );
        }
    }
    {
        use navsim::grid::{Cell, Dir};
        use navsim::learner::Task;
        use navsim::nav::{build_hierarchy, reset_episode, run_episode, Mode, LEARNER};
        let mut ah = build_hierarchy(&sc).expect("builds");
        for episode in 0..episodes {
            reset_episode(&mut ah, &sc.map, sc.params.seed, episode);
            ah = run_episode(ah, &sc.map, sc.params.max_steps, navsim::nav::Mode::Learning).1;
        }
        let _ = Mode::Learning;
        let learner = ah.state(LEARNER);
        let model = learner.transition_model.tally();
        let q = learner.planning_state.q();
        let cells = navsim::grid::proj_cells();
        for cell in [Cell::new(7, 3), Cell::new(8, 3), Cell::new(6, 3)] {
            for d in Dir::ALL {
                let sc_counts: Vec<(Cell, u32)> = model
                    .successor_counts(&navsim::learner::ProjSpace::new(), proj_index(cell), d)
                    .into_iter()
                    .map(|(s, c)| (cells[s], c))
                    .collect();
                println!("  tallies {cell:?} {d:?}: {sc_counts:?}");
            }
        }
        for cell in [Cell::new(7, 3), Cell::new(7, 2), Cell::new(7, 4), Cell::new(8, 3), Cell::new(6, 3)] {
            println!(
                "  V_d1({cell:?}) = {:?}",
                q.min_q(Task::Door(navsim::grid::Door(1)), proj_index(cell))
            );
        }
    }
    {
        use navsim::grid::{step_world, Cell, Dir, RoomId, WorldState};
        let mut s = WorldState::at_start(&map, 7);
        s.room = RoomId(3);
        s.cell = Cell::new(8, 3);
        let mut hist: std::collections::BTreeMap<(usize, u8, u8), u32> = Default::default();
        for _ in 0..10_000 {
            let next = step_world(&map, &s, Some(Dir::East), 0.8);
            *hist.entry((next.room.0, next.cell.x, next.cell.y)).or_default() += 1;
            s.rng = next.rng;
        }
        println!("world East@(r4,(8,3)) 10k: {hist:?}");
    }
    let from = SymState::new(map.start.0, Feature::Unknown);
    match plan {
        Some(plan) => {
            let rooms: Vec<String> =
                expected_states(&graph, from, &plan).iter().map(|s| format!("r{}", s.room.0 + 1)).collect();
            println!("committed plan rooms: {}", rooms.join("-"));
        }
        None => println!("no committed plan"),
    }
    let best = plan_min_cost(&graph, &tables, from, 10);
    println!("replan from start over final tables: {:?}", best.map(|pl| pl.actions().collect::<Vec<_>>()));
}
