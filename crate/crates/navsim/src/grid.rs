//! Room template, world map, and stochastic world dynamics.
//!
//! Every room is the same 10x11 grid: wall row y=0, wall column x=9, free
//! region x in 0..=8, y in 1..=10 (90 cells). Doors are free cells with
//! exactly one blocked neighbor; that direction is the door's exit. Moving in
//! the exit direction from a door cell crosses into the paired room, landing
//! on the paired door's cell. Paired doors share the same (x, y), so in the
//! room-projected view a crossing is a self-loop, indistinguishable from a
//! blocked step; consequently all rooms have identical projected dynamics.

use std::fmt;

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::Scalar;

/// Full grid width (x in 0..10; x=9 is the wall column).
pub const GRID_W: u8 = 10;
/// Full grid height (y in 0..11; y=0 is the wall row).
pub const GRID_H: u8 = 11;
/// Free cells per room.
pub const FREE_CELLS: usize = 90;

/// One grid position inside a room.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub x: u8,
    pub y: u8,
}

impl Cell {
    pub fn new(x: u8, y: u8) -> Self {
        Cell { x, y }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// True if `c` is inside the free region of the room template.
pub fn cell_free(c: Cell) -> bool {
    c.x <= 8 && (1..=10).contains(&c.y)
}

/// Dense index of a free cell, in 0..FREE_CELLS.
pub fn proj_index(c: Cell) -> usize {
    debug_assert!(cell_free(c));
    (c.y as usize - 1) * 9 + c.x as usize
}

/// All free cells in index order.
pub fn proj_cells() -> Vec<Cell> {
    let mut v = Vec::with_capacity(FREE_CELLS);
    for y in 1..=10 {
        for x in 0..=8 {
            v.push(Cell::new(x, y));
        }
    }
    v
}

/// Movement direction. Declaration order is the deterministic tie-break
/// order used everywhere an argmin over directions can tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    North,
    South,
    East,
    West,
}

impl Dir {
    /// All directions in tie-break order.
    pub const ALL: [Dir; 4] = [Dir::North, Dir::South, Dir::East, Dir::West];

    /// Grid delta (dx, dy); north decreases y.
    pub fn delta(self) -> (i16, i16) {
        match self {
            Dir::North => (0, -1),
            Dir::South => (0, 1),
            Dir::East => (1, 0),
            Dir::West => (-1, 0),
        }
    }

    /// The two perpendicular slip directions, as (rotate-left, rotate-right)
    /// of the delta: for (dx, dy) they are (dy, dx) and (-dy, -dx).
    pub fn laterals(self) -> (Dir, Dir) {
        match self {
            Dir::North => (Dir::West, Dir::East),
            Dir::South => (Dir::East, Dir::West),
            Dir::East => (Dir::South, Dir::North),
            Dir::West => (Dir::North, Dir::South),
        }
    }

    /// Index in tie-break order.
    pub fn index(self) -> usize {
        match self {
            Dir::North => 0,
            Dir::South => 1,
            Dir::East => 2,
            Dir::West => 3,
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Dir::North => 'N',
            Dir::South => 'S',
            Dir::East => 'E',
            Dir::West => 'W',
        };
        write!(f, "{c}")
    }
}

/// Neighbor in direction `d`, or None if it leaves the grid entirely.
pub fn neighbor(c: Cell, d: Dir) -> Option<Cell> {
    let (dx, dy) = d.delta();
    let x = c.x as i16 + dx;
    let y = c.y as i16 + dy;
    if x < 0 || y < 0 || x >= GRID_W as i16 || y >= GRID_H as i16 {
        None
    } else {
        Some(Cell::new(x as u8, y as u8))
    }
}

/// Free neighbor in direction `d`, or None if blocked (wall or off-grid).
pub fn free_neighbor(c: Cell, d: Dir) -> Option<Cell> {
    neighbor(c, d).filter(|&n| cell_free(n))
}

/// Exit direction of a door placed at `c`: the unique blocked neighbor
/// direction. None if `c` has zero or several blocked neighbors.
pub fn exit_dir(c: Cell) -> Option<Dir> {
    let mut blocked = Dir::ALL.into_iter().filter(|&d| free_neighbor(c, d).is_none());
    match (blocked.next(), blocked.next()) {
        (Some(d), None) => Some(d),
        _ => None,
    }
}

/// Door identifier (the digit used on maps, 1..=9).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Door(pub u8);

impl fmt::Display for Door {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Room index within a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoomId(pub usize);

/// One room: a name and the doors it contains. The grid shape is the shared
/// template; rooms differ only in door placement and markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Room {
    pub name: String,
    /// Doors in this room, ascending by door id; positions distinct.
    pub doors: Vec<(Door, Cell)>,
}

impl Room {
    /// The door at `cell`, if any.
    pub fn door_at(&self, cell: Cell) -> Option<Door> {
        self.doors.iter().find(|&&(_, c)| c == cell).map(|&(d, _)| d)
    }

    /// Position of door `d` in this room, if present.
    pub fn door_cell(&self, d: Door) -> Option<Cell> {
        self.doors.iter().find(|&&(door, _)| door == d).map(|&(_, c)| c)
    }
}

/// An undirected doorway between two (room, door) sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Doorway {
    pub a: (RoomId, Door),
    pub b: (RoomId, Door),
}

/// Static world description: rooms, doorways, start, goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldMap {
    pub rooms: Vec<Room>,
    pub doorways: Vec<Doorway>,
    pub start: (RoomId, Cell),
    pub goal: (RoomId, Cell),
}

impl WorldMap {
    /// Number of rooms.
    pub fn room_count(&self) -> usize {
        self.rooms.len()
    }

    /// Room by id. Panics if out of range.
    pub fn room(&self, r: RoomId) -> &Room {
        &self.rooms[r.0]
    }

    /// Room id by name.
    pub fn room_by_name(&self, name: &str) -> Option<RoomId> {
        self.rooms.iter().position(|r| r.name == name).map(RoomId)
    }

    /// All distinct door ids on the map, ascending.
    pub fn door_ids(&self) -> Vec<Door> {
        let mut ids: Vec<Door> = self
            .rooms
            .iter()
            .flat_map(|r| r.doors.iter().map(|&(d, _)| d))
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// The shared projected position of door `d` (same in every room that
    /// has it; the scenario validator enforces this).
    pub fn door_position(&self, d: Door) -> Option<Cell> {
        self.rooms.iter().find_map(|r| r.door_cell(d))
    }

    /// Where crossing door `d` out of room `r` lands: the paired side.
    pub fn crossing(&self, r: RoomId, d: Door) -> Option<(RoomId, Door)> {
        for w in &self.doorways {
            if w.a == (r, d) {
                return Some(w.b);
            }
            if w.b == (r, d) {
                return Some(w.a);
            }
        }
        None
    }
}

/// Dynamic world state: where the robot is, a trace of the last step, and
/// the motion-noise generator. A value type: comparing states compares the
/// full generator state too, so two equal states produce identical futures.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub room: RoomId,
    pub cell: Cell,
    /// Command of the most recent step; None after a rest.
    pub last_command: Option<Dir>,
    /// Actual (post-slip) direction of the most recent step; None after a
    /// rest. With `last_command`, this is the trajectory-log trace; sensing
    /// exposes only room and cell.
    pub last_actual: Option<Dir>,
    pub rng: ChaCha8Rng,
}

impl WorldState {
    /// Robot at the map's start with a fresh seeded generator.
    pub fn at_start(map: &WorldMap, seed: u64) -> Self {
        WorldState {
            room: map.start.0,
            cell: map.start.1,
            last_command: None,
            last_actual: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// Advance the world by one command.
///
/// No command: the robot rests; the noise generator does not advance. With a
/// command, the actual direction is the intended one with probability
/// `p_intended`, else one of the two perpendicular directions (equal split,
/// never the reverse). If the robot stands on a door cell and the actual
/// direction is that door's exit, it crosses: it lands on the paired door's
/// cell (the same projected position) in the paired room. Otherwise it moves
/// to the free neighbor in the actual direction, or stays put if blocked.
pub fn step_world(
    map: &WorldMap,
    state: &WorldState,
    command: Option<Dir>,
    p_intended: Scalar,
) -> WorldState {
    let mut next = state.clone();
    next.last_command = None;
    next.last_actual = None;
    let Some(intended) = command else {
        return next;
    };

    let u: Scalar = next.rng.gen();
    let (lat1, lat2) = intended.laterals();
    let slip = (1.0 - p_intended) / 2.0;
    let actual = if u < p_intended {
        intended
    } else if u < p_intended + slip {
        lat1
    } else {
        lat2
    };
    next.last_command = Some(intended);
    next.last_actual = Some(actual);

    if let Some(door) = map.room(state.room).door_at(state.cell) {
        let exit = exit_dir(state.cell).expect("door cells have a unique exit");
        if actual == exit {
            let (to_room, to_door) = map
                .crossing(state.room, door)
                .expect("every door is paired");
            let landing = map
                .room(to_room)
                .door_cell(to_door)
                .expect("paired door exists in its room");
            next.room = to_room;
            next.cell = landing;
            return next;
        }
    }

    if let Some(to) = free_neighbor(state.cell, actual) {
        next.cell = to;
    }
    next
}

/// Five-room map with adjustable geometry, used for calibration studies.
/// Door row y=3 carries the start, the goal, and the east/west door columns;
/// `start_x` places the start on it, `pc_y` is the row of the third door
/// position (east wall), `goal_x` the goal column.
pub fn five_rooms(start_x: u8, pc_y: u8, goal_x: u8) -> WorldMap {
    let pa = Cell::new(8, 3);
    let pb = Cell::new(0, 3);
    let pc = Cell::new(8, pc_y);
    let (d1, d2, d3, d4, d5, d6) = (Door(1), Door(2), Door(3), Door(4), Door(5), Door(6));
    let room = |name: &str, doors: Vec<(Door, Cell)>| {
        let mut doors = doors;
        doors.sort();
        Room { name: name.to_string(), doors }
    };
    let rooms = vec![
        room("r1", vec![(d6, pa), (d4, pb)]),
        room("r2", vec![(d3, pb), (d6, pa)]),
        room("r3", vec![(d1, pa), (d5, pc)]),
        room("r4", vec![(d1, pa), (d4, pb)]),
        room("r5", vec![(d3, pb), (d2, pc)]),
    ];
    let (r1, r2, r3, r4, r5) = (RoomId(0), RoomId(1), RoomId(2), RoomId(3), RoomId(4));
    WorldMap {
        rooms,
        doorways: vec![
            Doorway { a: (r1, d6), b: (r4, d1) },
            Doorway { a: (r1, d4), b: (r2, d3) },
            Doorway { a: (r2, d6), b: (r3, d1) },
            Doorway { a: (r4, d4), b: (r5, d3) },
            Doorway { a: (r5, d2), b: (r3, d5) },
        ],
        start: (r4, Cell::new(start_x, 3)),
        goal: (r3, Cell::new(goal_x, 3)),
    }
}

/// The standard five-room benchmark map. Door placements are calibrated so
/// the three-doorway route r4-r1-r2-r3 is shorter in distance and optimal in
/// expected steps at p_intended 0.8, while the two-doorway route r4-r5-r3
/// becomes optimal at 0.4 (kick retries at doors outweigh its longer walk).
pub fn canonical_map() -> WorldMap {
    five_rooms(7, 7, 4)
}
