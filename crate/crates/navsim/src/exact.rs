//! Ground-truth expectations computed directly from the world dynamics,
//! independent of anything the agent learns. Used for evaluation baselines,
//! map calibration, and the sweep report.

use crate::grid::{
    cell_free, exit_dir, free_neighbor, proj_cells, proj_index, Cell, Dir, Door, RoomId, WorldMap,
    FREE_CELLS,
};
use crate::{Real, Scalar};

/// The three possible actual directions for an intended command, with their
/// probabilities: intended at `p`, each perpendicular at `(1-p)/2`.
pub fn actual_dirs(intended: Dir, p: Scalar) -> [(Dir, Scalar); 3] {
    let (lat1, lat2) = intended.laterals();
    let slip = (1.0 - p) / 2.0;
    [(intended, p), (lat1, slip), (lat2, slip)]
}

/// Dense index of a global (room, cell) state.
pub fn global_index(room: RoomId, cell: Cell) -> usize {
    room.0 * FREE_CELLS + proj_index(cell)
}

/// Outcome distribution of one command in the true world, merged over actual
/// directions. `allowed` can veto specific doorway crossings, in which case
/// the exit step behaves as blocked; pass `|_, _| true` for the real world.
pub fn global_transition(
    map: &WorldMap,
    room: RoomId,
    cell: Cell,
    intended: Dir,
    p: Scalar,
    allowed: &dyn Fn(RoomId, Door) -> bool,
) -> Vec<((RoomId, Cell), Scalar)> {
    let mut out: Vec<((RoomId, Cell), Scalar)> = Vec::with_capacity(3);
    let mut push = |state: (RoomId, Cell), prob: Scalar| {
        if let Some(entry) = out.iter_mut().find(|(s, _)| *s == state) {
            entry.1 += prob;
        } else {
            out.push((state, prob));
        }
    };
    let door = map.room(room).door_at(cell);
    for (actual, prob) in actual_dirs(intended, p) {
        if let Some(d) = door {
            if exit_dir(cell) == Some(actual) && allowed(room, d) {
                let (to_room, to_door) = map.crossing(room, d).expect("door is paired");
                let landing = map.room(to_room).door_cell(to_door).expect("paired door");
                push((to_room, landing), prob);
                continue;
            }
        }
        match free_neighbor(cell, actual) {
            Some(to) => push((room, to), prob),
            None => push((room, cell), prob),
        }
    }
    out
}

/// Expected optimal steps-to-goal for every global state, with crossings
/// restricted to `allowed` doorway sides.
pub fn global_values_constrained<R: Real>(
    map: &WorldMap,
    p: Scalar,
    allowed: &dyn Fn(RoomId, Door) -> bool,
) -> Vec<R> {
    let n = map.room_count() * FREE_CELLS;
    let goal = global_index(map.goal.0, map.goal.1);
    let cells = proj_cells();

    // Transition table once: per (state, dir), merged successor list.
    let mut trans: Vec<[Vec<(usize, R)>; 4]> = Vec::with_capacity(n);
    for room in 0..map.room_count() {
        for &cell in &cells {
            let mut per_dir: [Vec<(usize, R)>; 4] = Default::default();
            for dir in Dir::ALL {
                per_dir[dir.index()] = global_transition(map, RoomId(room), cell, dir, p, allowed)
                    .into_iter()
                    .map(|((r, c), pr)| (global_index(r, c), R::from_f64(pr).unwrap()))
                    .collect();
            }
            trans.push(per_dir);
        }
    }

    let one = R::one();
    let tol = R::from_f64(1e-10).unwrap();
    let mut v = vec![R::zero(); n];
    for _ in 0..100_000 {
        let mut delta = R::zero();
        for s in 0..n {
            if s == goal {
                continue;
            }
            let mut best = R::infinity();
            for dir in Dir::ALL {
                let mut q = one;
                for &(succ, pr) in &trans[s][dir.index()] {
                    q = q + pr * v[succ];
                }
                if q < best {
                    best = q;
                }
            }
            let diff = (best - v[s]).abs();
            if diff > delta {
                delta = diff;
            }
            v[s] = best;
        }
        if delta < tol {
            break;
        }
    }
    v
}

/// Expected optimal steps-to-goal for every global state in the real world.
pub fn global_values<R: Real>(map: &WorldMap, p: Scalar) -> Vec<R> {
    global_values_constrained(map, p, &|_, _| true)
}

/// Expected optimal steps from the start state.
pub fn expected_steps(map: &WorldMap, p: Scalar) -> Scalar {
    let v: Vec<Scalar> = global_values(map, p);
    v[global_index(map.start.0, map.start.1)]
}

/// Expected steps from the start when only the given doorway sides may be
/// crossed (both sides of each doorway on the route should be allowed).
pub fn expected_steps_via(map: &WorldMap, p: Scalar, allowed: &dyn Fn(RoomId, Door) -> bool) -> Scalar {
    let v: Vec<Scalar> = global_values_constrained(map, p, allowed);
    v[global_index(map.start.0, map.start.1)]
}

/// Room sequence the optimal policy visits from the start when motion never
/// slips: start room first, then each room entered, ending at the goal room.
pub fn ideal_route(map: &WorldMap, p: Scalar) -> Vec<RoomId> {
    let v: Vec<Scalar> = global_values(map, p);
    let mut route = vec![map.start.0];
    let (mut room, mut cell) = map.start;
    for _ in 0..10_000 {
        if (room, cell) == map.goal {
            break;
        }
        let mut best = (Scalar::INFINITY, Dir::North);
        for dir in Dir::ALL {
            let q: Scalar = 1.0
                + global_transition(map, room, cell, dir, p, &|_, _| true)
                    .into_iter()
                    .map(|((r, c), pr)| pr * v[global_index(r, c)])
                    .sum::<Scalar>();
            if q < best.0 {
                best = (q, dir);
            }
        }
        let intended = best.1;
        let door = map.room(room).door_at(cell);
        if let (Some(d), Some(exit)) = (door, exit_dir(cell)) {
            if exit == intended {
                let (to_room, to_door) = map.crossing(room, d).expect("door is paired");
                cell = map.room(to_room).door_cell(to_door).expect("paired door");
                room = to_room;
                route.push(room);
                continue;
            }
        }
        if let Some(to) = free_neighbor(cell, intended) {
            cell = to;
        } else {
            break;
        }
    }
    route
}

/// Task completion rule in the projected room template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjTask {
    /// Complete on reaching this cell.
    Reach(Cell),
    /// Complete on a self-loop transition at this (door) cell, which in the
    /// projection is exactly a crossing.
    Cross(Cell),
}

/// Outcome distribution of one command in the projected template (rooms
/// erased: crossings and blocked steps are both stays).
pub fn proj_transition(cell: Cell, intended: Dir, p: Scalar) -> Vec<(Cell, Scalar)> {
    let mut out: Vec<(Cell, Scalar)> = Vec::with_capacity(3);
    for (actual, prob) in actual_dirs(intended, p) {
        let to = free_neighbor(cell, actual).unwrap_or(cell);
        if let Some(entry) = out.iter_mut().find(|(c, _)| *c == to) {
            entry.1 += prob;
        } else {
            out.push((to, prob));
        }
    }
    out
}

/// Expected steps to complete `task` from every projected cell under true
/// motion noise, acting optimally.
pub fn proj_task_values<R: Real>(task: ProjTask, p: Scalar) -> Vec<R> {
    let cells = proj_cells();
    let mut trans: Vec<[Vec<(usize, R)>; 4]> = Vec::with_capacity(FREE_CELLS);
    for &cell in &cells {
        let mut per_dir: [Vec<(usize, R)>; 4] = Default::default();
        for dir in Dir::ALL {
            per_dir[dir.index()] = proj_transition(cell, dir, p)
                .into_iter()
                .map(|(c, pr)| (proj_index(c), R::from_f64(pr).unwrap()))
                .collect();
        }
        trans.push(per_dir);
    }

    let terminal_state = match task {
        ProjTask::Reach(c) => {
            debug_assert!(cell_free(c));
            Some(proj_index(c))
        }
        ProjTask::Cross(_) => None,
    };
    let cross_at = match task {
        ProjTask::Cross(c) => {
            debug_assert!(exit_dir(c).is_some(), "cross task needs a door cell");
            Some(proj_index(c))
        }
        ProjTask::Reach(_) => None,
    };

    let one = R::one();
    let tol = R::from_f64(1e-10).unwrap();
    let mut v = vec![R::zero(); FREE_CELLS];
    for _ in 0..100_000 {
        let mut delta = R::zero();
        for s in 0..FREE_CELLS {
            if Some(s) == terminal_state {
                continue;
            }
            let mut best = R::infinity();
            for dir in Dir::ALL {
                let mut q = one;
                for &(succ, pr) in &trans[s][dir.index()] {
                    let terminal = Some(succ) == terminal_state
                        || (cross_at == Some(s) && succ == s);
                    if !terminal {
                        q = q + pr * v[succ];
                    }
                }
                if q < best {
                    best = q;
                }
            }
            let diff = (best - v[s]).abs();
            if diff > delta {
                delta = diff;
            }
            v[s] = best;
        }
        if delta < tol {
            break;
        }
    }
    v
}
