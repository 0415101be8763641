//! Scratch diagnostic: flat-agent training collapse.

use navsim::exact::global_index;
use navsim::experiment::eval_probe;
use navsim::grid::{proj_cells, Dir};
use navsim::learner::{GlobalSpace, StateSpace, Task};
use navsim::nav::{build_flat, reset_episode, run_episode, Mode, LEARNER};
use navsim::scenario::canonical_scenario;
use navsim::Scalar;

fn main() {
    let mut sc = canonical_scenario();
    let episodes: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(14);
    if let Some(s) = std::env::args().nth(2).and_then(|s| s.parse().ok()) {
        sc.params.seed = s;
    }
    let run: u32 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(0);
    if let Some(p) = std::env::args().nth(4).and_then(|s| s.parse().ok()) {
        sc.params.p_intended = p;
    }
    sc.params.seed = navsim::experiment::run_seed(sc.params.seed, run);
    let map = sc.map.clone();
    let space = GlobalSpace::new(&map);
    let n = space.n_states();
    let ceiling = (n * 10) as Scalar;
    let goal = global_index(map.goal.0, map.goal.1);
    let start = global_index(map.start.0, map.start.1);
    let cells = proj_cells();
    let name = |s: usize| format!("r{}({},{})", s / 90 + 1, cells[s % 90].x, cells[s % 90].y);

    let mut ah = build_flat(&sc).expect("builds");
    for ep in 0..episodes {
        reset_episode(&mut ah, &map, sc.params.seed, ep);
        let (steps, back) = run_episode(ah, &map, sc.params.max_steps, Mode::Learning);
        ah = back;
        let probe = eval_probe(&ah, &map, sc.params.seed, 2000);
        let q = ah.state(LEARNER).planning_state.q();
        let table = &q.tables[&Task::Goal];
        let minv = |s: usize| table[s].iter().copied().fold(Scalar::INFINITY, Scalar::min);
        let at_ceiling = (0..n).filter(|&s| minv(s) >= ceiling - 0.5).count();
        println!(
            "ep {ep}: train {steps} eval {probe} V(start)={:.1} ceil_states={at_ceiling}",
            minv(start)
        );
        let model = ah.state(LEARNER).transition_model.tally();
        for d in Dir::ALL {
            let Some(nb) = space.neighbor(goal, d) else { continue };
            let toward = Dir::ALL
                .into_iter()
                .find(|&a| space.neighbor(nb, a) == Some(goal))
                .unwrap();
            let counts: Vec<(String, u32)> = model
                .successor_counts(&space, nb, toward)
                .into_iter()
                .map(|(t, c)| (name(t), c))
                .collect();
            println!(
                "   goal-nb {} V={:.1} toward={toward:?} q={:.1} tallies {counts:?}",
                name(nb),
                minv(nb),
                table[nb][Dir::ALL.iter().position(|&a| a == toward).unwrap()]
            );
        }
    }

    let q = ah.state(LEARNER).planning_state.q();
    let table = &q.tables[&Task::Goal];
    let model = ah.state(LEARNER).transition_model.tally();
    let mut s = start;
    let mut visited = Vec::new();
    println!("greedy walk under slip-free dynamics:");
    for _ in 0..50 {
        if s == goal {
            println!("  GOAL");
            break;
        }
        let row = &table[s];
        let mut best = 0usize;
        for a in 1..4 {
            if row[a] < row[best] {
                best = a;
            }
        }
        let dir = Dir::ALL[best];
        println!("  {} press {dir:?} row {:?}", name(s), row.map(|v| (v * 10.0).round() / 10.0));
        visited.push(s);
        s = space
            .neighbor(s, dir)
            .or_else(|| (space.door_exit(s) == Some(dir)).then(|| space.door_successor(s)).flatten())
            .unwrap_or(s);
        if visited.contains(&s) {
            println!("  LOOP back to {}", name(s));
            break;
        }
    }
    for &v in visited.iter().rev().take(3) {
        for d in Dir::ALL {
            let counts: Vec<(String, u32)> = model
                .successor_counts(&space, v, d)
                .into_iter()
                .map(|(t, c)| (name(t), c))
                .collect();
            println!("tallies {} {d:?}: {counts:?}", name(v));
        }
    }
    use navsim::grid::{Cell, RoomId};
    let minv = |s: usize| table[s].iter().copied().fold(Scalar::INFINITY, Scalar::min);
    for (room, cell, d) in [
        (RoomId(3), Cell::new(8, 3), Dir::East),
        (RoomId(3), Cell::new(0, 3), Dir::West),
        (RoomId(0), Cell::new(8, 3), Dir::East),
        (RoomId(0), Cell::new(0, 3), Dir::West),
        (RoomId(1), Cell::new(8, 3), Dir::East),
        (RoomId(1), Cell::new(0, 3), Dir::West),
        (RoomId(4), Cell::new(8, 7), Dir::East),
        (RoomId(2), Cell::new(8, 3), Dir::East),
    ] {
        let s = global_index(room, cell);
        let counts: Vec<(String, u32)> = model
            .successor_counts(&space, s, d)
            .into_iter()
            .map(|(t, c)| (name(t), c))
            .collect();
        println!("door {} {d:?}: V={:.1} tallies {counts:?}", name(s), minv(s));
    }
}
