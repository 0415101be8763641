#![allow(dead_code)]
//! Independent oracles shared by the navsim test suites. Everything here is
//! deliberately naive (breadth-first search, exhaustive enumeration) so it
//! cannot share bugs with the value-iteration and planning code under test.

use navsim::grid::{
    exit_dir, free_neighbor, proj_cells, proj_index, Cell, Dir, RoomId, WorldMap, FREE_CELLS,
};
use std::collections::VecDeque;

/// Steps to the goal from every global (room, cell) state under no-slip
/// motion, by backward breadth-first search. `None` marks unreachable states.
pub fn bfs_global(map: &WorldMap) -> Vec<Option<u32>> {
    let cells = proj_cells();
    let n = map.room_count() * FREE_CELLS;
    let index = |room: RoomId, cell: Cell| room.0 * FREE_CELLS + proj_index(cell);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for room in 0..map.room_count() {
        for &cell in &cells {
            let here = index(RoomId(room), cell);
            for dir in Dir::ALL {
                let door = map.room(RoomId(room)).door_at(cell);
                let succ = match door {
                    Some(d) if exit_dir(cell) == Some(dir) => {
                        let (to_room, to_door) =
                            map.crossing(RoomId(room), d).expect("door is paired");
                        let landing =
                            map.room(to_room).door_cell(to_door).expect("paired door");
                        index(to_room, landing)
                    }
                    _ => match free_neighbor(cell, dir) {
                        Some(to) => index(RoomId(room), to),
                        None => here,
                    },
                };
                if succ != here {
                    preds[succ].push(here);
                }
            }
        }
    }
    let mut dist = vec![None; n];
    let goal = index(map.goal.0, map.goal.1);
    dist[goal] = Some(0);
    let mut queue = VecDeque::from([goal]);
    while let Some(s) = queue.pop_front() {
        let d = dist[s].unwrap();
        for &prev in &preds[s] {
            if dist[prev].is_none() {
                dist[prev] = Some(d + 1);
                queue.push_back(prev);
            }
        }
    }
    dist
}

/// Walking steps to `target` from every cell of the room template (rooms and
/// doors erased), by breadth-first search. Every free cell is reachable.
pub fn bfs_proj_reach(target: Cell) -> Vec<u32> {
    let mut dist = vec![u32::MAX; FREE_CELLS];
    dist[proj_index(target)] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(cell) = queue.pop_front() {
        let d = dist[proj_index(cell)];
        for dir in Dir::ALL {
            if let Some(to) = free_neighbor(cell, dir) {
                if dist[proj_index(to)] == u32::MAX {
                    dist[proj_index(to)] = d + 1;
                    queue.push_back(to);
                }
            }
        }
    }
    dist
}

/// Steps to walk to a door cell and then complete the crossing kick, under
/// no-slip motion: reach distance plus one.
pub fn bfs_proj_cross(door: Cell) -> Vec<u32> {
    bfs_proj_reach(door).into_iter().map(|d| d + 1).collect()
}

use navsim::grid::{Door, Doorway, Room};
use navsim::scenario::{render_scenario, Params, Scenario, ScenarioErrorKind};
use navsim::Scalar;
use rand::seq::SliceRandom as _;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

/// Template cells where a door has a unique exit: the wall-adjacent strips
/// minus the two-wall corners.
pub fn door_strip_cells() -> Vec<Cell> {
    let mut v = Vec::new();
    for y in 2..=9 {
        v.push(Cell::new(0, y));
        v.push(Cell::new(8, y));
    }
    for x in 1..=7 {
        v.push(Cell::new(x, 1));
        v.push(Cell::new(x, 10));
    }
    v
}

/// A random valid scenario: 2..=5 rooms connected by a doorway spanning tree
/// plus a few extra doorways, random start/goal, varied parameters. Each
/// doorway uses one door id on both sides (ids stay position-consistent).
pub fn gen_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n_rooms = rng.gen_range(2..=5usize);
    let mut rooms: Vec<Room> = (0..n_rooms)
        .map(|i| Room { name: format!("r{}", i + 1), doors: Vec::new() })
        .collect();
    let strips = door_strip_cells();

    let mut doorways = Vec::new();
    let mut edges: Vec<(usize, usize)> = (1..n_rooms).map(|b| (rng.gen_range(0..b), b)).collect();
    let n_extra = rng.gen_range(0..=3.min(9 - edges.len()));
    for _ in 0..n_extra {
        let a = rng.gen_range(0..n_rooms);
        let b = rng.gen_range(0..n_rooms);
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    for (k, &(a, b)) in edges.iter().enumerate() {
        let door = Door(k as u8 + 1);
        let cell = loop {
            let c = *strips.choose(&mut rng).expect("strips nonempty");
            let free = |r: usize| rooms[r].doors.iter().all(|&(_, dc)| dc != c);
            if free(a) && free(b) {
                break c;
            }
        };
        rooms[a].doors.push((door, cell));
        rooms[b].doors.push((door, cell));
        doorways.push(Doorway { a: (RoomId(a), door), b: (RoomId(b), door) });
    }
    for room in &mut rooms {
        room.doors.sort();
    }

    fn open_cell(
        rng: &mut ChaCha8Rng,
        room: usize,
        rooms: &[Room],
        avoid: Option<(RoomId, Cell)>,
    ) -> (RoomId, Cell) {
        loop {
            let c = Cell::new(rng.gen_range(0..=8), rng.gen_range(1..=10));
            let is_door = rooms[room].doors.iter().any(|&(_, dc)| dc == c);
            if !is_door && avoid != Some((RoomId(room), c)) {
                break (RoomId(room), c);
            }
        }
    }
    let start_room = rng.gen_range(0..n_rooms);
    let goal_room = rng.gen_range(0..n_rooms);
    let start = open_cell(&mut rng, start_room, &rooms, None);
    let goal = open_cell(&mut rng, goal_room, &rooms, Some(start));

    let params = Params {
        p_intended: *[0.3, 0.5, 0.8, 1.0].choose(&mut rng).expect("nonempty"),
        epsilon: *[0.0, 0.1, 0.25].choose(&mut rng).expect("nonempty"),
        gamma: *[0.9, 1.0].choose(&mut rng).expect("nonempty"),
        horizon: *[5, 10, 12].choose(&mut rng).expect("nonempty"),
        seed: rng.gen::<u32>() as u64,
        max_steps: *[500, 10_000].choose(&mut rng).expect("nonempty"),
        vi_tolerance: *[1e-6, 1e-4].choose(&mut rng).expect("nonempty"),
        vi_sweeps: *[50, 1000].choose(&mut rng).expect("nonempty"),
    };
    let _: Scalar = params.p_intended;
    Scenario { map: WorldMap { rooms, doorways, start, goal }, params }
}

/// A malformed scenario text plus the error it must produce.
pub struct MalformedCase {
    pub label: &'static str,
    pub text: String,
    pub kind: ScenarioErrorKind,
    pub line: usize,
    pub col: usize,
}

/// Twenty-plus corrupted variants of the canonical scenario with the exact
/// error position each must report. Canonical layout: line 1 `[map]`, line 2
/// the rooms header, lines 3-13 the rows for y = 0..=10, lines 14-18 pair
/// lines, line 19 blank, line 20 `[params]`, lines 21-28 commented defaults.
/// Room block i spans columns i*11+1 ..= i*11+10; cell x is at i*11+1+x.
pub fn malformed_cases() -> Vec<MalformedCase> {
    use ScenarioErrorKind as K;
    let base = render_scenario(&navsim::scenario::canonical_scenario());

    let replace_at = |text: &str, line: usize, col: usize, c: char| -> String {
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let mut chars: Vec<char> = lines[line - 1].chars().collect();
        chars[col - 1] = c;
        lines[line - 1] = chars.into_iter().collect();
        lines.join("\n") + "\n"
    };
    let set_line = |text: &str, line: usize, new: &str| -> String {
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        lines[line - 1] = new.to_string();
        lines.join("\n") + "\n"
    };
    let drop_line = |text: &str, line: usize| -> String {
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        lines.remove(line - 1);
        lines.join("\n") + "\n"
    };

    let r5_row7 = |block: &str| {
        let mut blocks: Vec<&str> =
            base.lines().nth(9).expect("row line").split('|').collect();
        blocks[4] = block;
        blocks.join("|")
    };

    vec![
        MalformedCase {
            label: "letter in the free region",
            text: replace_at(&base, 8, 4, 'X'),
            kind: K::UnknownChar,
            line: 8,
            col: 4,
        },
        MalformedCase {
            label: "punctuation in another room block",
            text: replace_at(&base, 5, 23, '?'),
            kind: K::UnknownChar,
            line: 5,
            col: 23,
        },
        MalformedCase {
            label: "wall inside the free region",
            text: replace_at(&base, 7, 14, '#'),
            kind: K::TopologyMismatch,
            line: 7,
            col: 14,
        },
        MalformedCase {
            label: "free cell on the wall row",
            text: replace_at(&base, 3, 1, '.'),
            kind: K::TopologyMismatch,
            line: 3,
            col: 1,
        },
        MalformedCase {
            label: "room block one cell short",
            text: set_line(
                &base,
                9,
                &base.lines().nth(8).expect("row line").replacen(".........#", ".........", 1),
            ),
            kind: K::TopologyMismatch,
            line: 9,
            col: 10,
        },
        MalformedCase {
            label: "room block one cell long",
            text: set_line(
                &base,
                9,
                &base.lines().nth(8).expect("row line").replacen(".........#", ".........##", 1),
            ),
            kind: K::TopologyMismatch,
            line: 9,
            col: 11,
        },
        MalformedCase {
            label: "a map row missing entirely",
            text: drop_line(&base, 13),
            kind: K::UnknownChar,
            line: 13,
            col: 1,
        },
        MalformedCase {
            label: "extra room block on one row",
            text: set_line(
                &base,
                3,
                &format!("{}|##########", base.lines().nth(2).expect("row line")),
            ),
            kind: K::TopologyMismatch,
            line: 3,
            col: 55,
        },
        MalformedCase {
            label: "pair line naming an unknown room",
            text: set_line(&base, 14, "pair: rX.d6 r4.d1"),
            kind: K::BadPairing,
            line: 14,
            col: 7,
        },
        MalformedCase {
            label: "pair line naming an undeclared door",
            text: set_line(&base, 14, "pair: r1.d9 r4.d1"),
            kind: K::BadPairing,
            line: 14,
            col: 7,
        },
        MalformedCase {
            label: "pair side without the dot",
            text: set_line(&base, 14, "pair: r1d6 r4.d1"),
            kind: K::BadPairing,
            line: 14,
            col: 7,
        },
        MalformedCase {
            label: "pair side with a bad door name",
            text: set_line(&base, 14, "pair: r1.x6 r4.d1"),
            kind: K::BadPairing,
            line: 14,
            col: 10,
        },
        MalformedCase {
            label: "door paired with itself",
            text: set_line(&base, 14, "pair: r1.d6 r1.d6"),
            kind: K::BadPairing,
            line: 14,
            col: 13,
        },
        MalformedCase {
            label: "door side used in two pairings",
            text: set_line(&base, 15, "pair: r1.d6 r2.d3"),
            kind: K::BadPairing,
            line: 15,
            col: 7,
        },
        MalformedCase {
            label: "door drawn but never paired",
            text: drop_line(&base, 18),
            kind: K::BadPairing,
            line: 10,
            col: 31,
        },
        MalformedCase {
            label: "paired doors on different cells",
            text: set_line(&base, 10, &r5_row7("2........#")),
            kind: K::BadPairing,
            line: 10,
            col: 31,
        },
        MalformedCase {
            label: "door away from every wall",
            text: replace_at(&base, 8, 5, '7'),
            kind: K::BadPairing,
            line: 8,
            col: 5,
        },
        MalformedCase {
            label: "goal deleted",
            text: replace_at(&base, 6, 27, '.'),
            kind: K::MissingGoal,
            line: 1,
            col: 1,
        },
        MalformedCase {
            label: "robot deleted",
            text: replace_at(&base, 6, 41, '.'),
            kind: K::MissingRobot,
            line: 1,
            col: 1,
        },
        MalformedCase {
            label: "unknown parameter key",
            text: set_line(&base, 21, "eps = 0.1"),
            kind: K::BadParamValue,
            line: 21,
            col: 1,
        },
        MalformedCase {
            label: "non-numeric parameter value",
            text: set_line(&base, 21, "epsilon = high"),
            kind: K::BadParamValue,
            line: 21,
            col: 11,
        },
        MalformedCase {
            label: "probability out of range",
            text: set_line(&base, 21, "p_intended = 1.5"),
            kind: K::BadParamValue,
            line: 21,
            col: 14,
        },
        MalformedCase {
            label: "parameter set twice",
            text: {
                let t = set_line(&base, 21, "seed = 4");
                set_line(&t, 22, "seed = 5")
            },
            kind: K::BadParamValue,
            line: 22,
            col: 1,
        },
        MalformedCase {
            label: "second goal marker",
            text: replace_at(&base, 5, 2, 'G'),
            kind: K::TopologyMismatch,
            line: 6,
            col: 27,
        },
        MalformedCase {
            label: "duplicate room name in header",
            text: set_line(&base, 2, "rooms: r1 r2 r3 r4 r1"),
            kind: K::TopologyMismatch,
            line: 2,
            col: 20,
        },
    ]
}

/// Exhaustive plan oracle: walk every applicable action sequence of length
/// at most `horizon` by depth-first search and keep the best (cost, action
/// sequence) whose final state sits on the goal, ordered by cost, then
/// length, then lexicographic action sequence. `None` when no sequence
/// reaches the goal.
pub fn enumerate_best_plan(
    graph: &navsim::planner::RoomGraph,
    tables: &navsim::planner::CostTables,
    from: navsim::planner::SymState,
    horizon: u32,
) -> Option<(u64, Vec<navsim::planner::SymAction>)> {
    use navsim::planner::{action_cost, symbolic_transition, Feature, SymAction, SymState};

    fn walk(
        graph: &navsim::planner::RoomGraph,
        tables: &navsim::planner::CostTables,
        state: SymState,
        depth: u32,
        cost: u64,
        seq: &mut Vec<SymAction>,
        best: &mut Option<(u64, Vec<SymAction>)>,
    ) {
        if state.feature == Feature::Goal {
            let candidate = (cost, seq.len(), seq.clone());
            let replace = match best {
                None => true,
                Some((bc, bs)) => candidate < (*bc, bs.len(), bs.clone()),
            };
            if replace {
                *best = Some((candidate.0, candidate.2));
            }
        }
        if depth == 0 {
            return;
        }
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
            let Some(c) = action_cost(tables, state, action) else {
                continue;
            };
            seq.push(action);
            walk(graph, tables, succ, depth - 1, cost + c, seq, best);
            seq.pop();
        }
    }

    let mut best = None;
    if from.feature == Feature::Goal {
        best = Some((0, Vec::new()));
    }
    walk(graph, tables, from, horizon, 0, &mut Vec::new(), &mut best);
    best
}

/// Random cost tables over the seven real features, entries uniform in
/// 0..=20, each entry present with probability `keep`. `keep = 1.0` gives a
/// total table.
pub fn random_cost_tables(rng: &mut rand_chacha::ChaCha8Rng, keep: f64) -> navsim::planner::CostTables {
    use navsim::planner::{CostTables, Feature};
    use rand::Rng;

    let real: Vec<Feature> = Feature::ALL
        .into_iter()
        .filter(|&f| f != Feature::Unknown)
        .collect();
    let mut tables = CostTables::default();
    for &f in &real {
        if rng.gen_bool(keep) {
            tables.ctf.insert(f, rng.gen_range(0..=20));
        }
    }
    for &f1 in &real {
        for &f2 in &real {
            if rng.gen_bool(keep) {
                tables.cbf.insert((f1, f2), rng.gen_range(0..=20));
            }
        }
    }
    tables
}
