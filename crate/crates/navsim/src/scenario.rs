//! Textual scenario format: ASCII room maps plus a key-value parameter block.
//!
//! A `.chs` file has a `[map]` section (a `rooms:` header naming the room
//! blocks left to right, eleven rows of 10-character blocks joined by `|`,
//! then `pair:` lines declaring doorways) and an optional `[params]` section
//! of `key = value` lines. Parsing is total: any input yields a Scenario or
//! a structured error carrying a 1-based line:column inside the input.
//! `parse_scenario(render_scenario(s))` structurally equals `s`.

use std::collections::BTreeMap;
use std::fmt;

use crate::grid::{
    cell_free, exit_dir, Cell, Door, Doorway, Room, RoomId, WorldMap, GRID_H, GRID_W,
};
use crate::Scalar;

/// Experiment parameters with their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    /// Probability the commanded direction is executed; remainder splits
    /// evenly between the two perpendicular directions.
    pub p_intended: Scalar,
    /// Exploration rate during learning (0 at evaluation).
    pub epsilon: Scalar,
    /// Discount factor for value iteration.
    pub gamma: Scalar,
    /// Symbolic plan length bound.
    pub horizon: u32,
    /// Base seed for world noise and exploration draws.
    pub seed: u64,
    /// Per-episode world step cap.
    pub max_steps: u32,
    /// Value-iteration convergence tolerance.
    pub vi_tolerance: Scalar,
    /// Value-iteration sweep cap per refresh.
    pub vi_sweeps: u32,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            p_intended: 0.8,
            epsilon: 0.1,
            gamma: 1.0,
            horizon: 10,
            seed: 0,
            max_steps: 10_000,
            vi_tolerance: 1e-6,
            vi_sweeps: 1000,
        }
    }
}

/// A parsed scenario: the world plus experiment parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub map: WorldMap,
    pub params: Params,
}

/// The benchmark scenario: the standard five-room map with default params.
pub fn canonical_scenario() -> Scenario {
    Scenario { map: crate::grid::canonical_map(), params: Params::default() }
}

/// What went wrong, structurally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioErrorKind {
    /// A character outside the map alphabet.
    UnknownChar,
    /// Door or doorway declarations are inconsistent: an endpoint is
    /// missing, a door is unpaired or re-paired, paired doors sit on
    /// different cells, or a door cell has no unique exit.
    BadPairing,
    /// The grid does not match the room template, or the file structure
    /// around it is malformed.
    TopologyMismatch,
    /// No goal cell in the map.
    MissingGoal,
    /// No robot start cell in the map.
    MissingRobot,
    /// Unknown key, unparsable value, or out-of-range value in `[params]`.
    BadParamValue,
}

impl fmt::Display for ScenarioErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScenarioErrorKind::UnknownChar => "unknown character",
            ScenarioErrorKind::BadPairing => "bad door pairing",
            ScenarioErrorKind::TopologyMismatch => "topology mismatch",
            ScenarioErrorKind::MissingGoal => "missing goal",
            ScenarioErrorKind::MissingRobot => "missing robot",
            ScenarioErrorKind::BadParamValue => "bad parameter value",
        };
        f.write_str(s)
    }
}

/// A parse failure at a specific place in the input. Lines and columns are
/// 1-based; columns count characters, not bytes.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {kind}: {detail}")]
pub struct ScenarioError {
    pub kind: ScenarioErrorKind,
    pub line: usize,
    pub col: usize,
    pub detail: String,
}

impl ScenarioError {
    fn new(kind: ScenarioErrorKind, line: usize, col: usize, detail: impl Into<String>) -> Self {
        ScenarioError { kind, line, col, detail: detail.into() }
    }
}

const PARAM_KEYS: [&str; 8] = [
    "epsilon",
    "gamma",
    "horizon",
    "max_steps",
    "p_intended",
    "seed",
    "vi_sweeps",
    "vi_tolerance",
];

/// One room block still under construction during parsing.
struct RoomDraft {
    name: String,
    /// (door, cell, source line, source column), in scan order.
    doors: Vec<(Door, Cell, usize, usize)>,
}

/// Where the parser is within the file.
enum Section {
    Preamble,
    MapHeader,
    MapRows,
    MapPairs,
    Params,
}

/// Parse a scenario document. Returns the first error in reading order.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    use ScenarioErrorKind as K;

    let mut section = Section::Preamble;
    let mut map_header_pos = (0usize, 0usize);
    let mut rooms: Vec<RoomDraft> = Vec::new();
    let mut rows_read = 0usize;
    let mut start: Option<(RoomId, Cell)> = None;
    let mut goal: Option<(RoomId, Cell)> = None;
    let mut doorways: Vec<Doorway> = Vec::new();
    let mut used_sides: Vec<(RoomId, Door)> = Vec::new();
    let mut params = Params::default();
    let mut seen_keys: Vec<String> = Vec::new();
    let mut saw_map = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim_start();
        let indent = line.chars().count() - trimmed.chars().count();

        if trimmed == "[map]" {
            if saw_map {
                return Err(ScenarioError::new(
                    K::TopologyMismatch,
                    lineno,
                    indent + 1,
                    "duplicate [map] section",
                ));
            }
            saw_map = true;
            map_header_pos = (lineno, indent + 1);
            section = Section::MapHeader;
            continue;
        }
        if trimmed == "[params]" {
            finish_map_section(&section, rows_read, lineno)?;
            section = Section::Params;
            continue;
        }

        match section {
            Section::Preamble => {
                return Err(ScenarioError::new(
                    K::TopologyMismatch,
                    lineno,
                    indent + 1,
                    "expected a [map] section header",
                ));
            }
            Section::MapHeader => {
                parse_rooms_header(line, lineno, &mut rooms)?;
                section = Section::MapRows;
            }
            Section::MapRows => {
                parse_map_row(
                    line, lineno, rows_read, &mut rooms, &mut start, &mut goal,
                )?;
                rows_read += 1;
                if rows_read == GRID_H as usize {
                    section = Section::MapPairs;
                }
            }
            Section::MapPairs => {
                let (a, b) =
                    parse_pair_line(line, lineno, &rooms, &mut used_sides)?;
                doorways.push(Doorway { a, b });
            }
            Section::Params => {
                if trimmed.starts_with('#') {
                    continue;
                }
                parse_param_line(line, lineno, &mut params, &mut seen_keys)?;
            }
        }
    }

    if !saw_map {
        return Err(ScenarioError::new(
            K::TopologyMismatch,
            1,
            1,
            "missing [map] section",
        ));
    }
    finish_map_section(&section, rows_read, text.lines().count() + 1)?;
    validate_doors(&rooms)?;
    let goal = goal.ok_or_else(|| {
        ScenarioError::new(
            K::MissingGoal,
            map_header_pos.0,
            map_header_pos.1,
            "map places no goal cell (G)",
        )
    })?;
    let start = start.ok_or_else(|| {
        ScenarioError::new(
            K::MissingRobot,
            map_header_pos.0,
            map_header_pos.1,
            "map places no robot start cell (R)",
        )
    })?;
    validate_pair_cover(&rooms, &used_sides)?;
    validate_pair_positions(&rooms, &doorways)?;

    let rooms = rooms
        .into_iter()
        .map(|d| {
            let mut doors: Vec<(Door, Cell)> =
                d.doors.into_iter().map(|(door, cell, _, _)| (door, cell)).collect();
            doors.sort();
            Room { name: d.name, doors }
        })
        .collect();
    Ok(Scenario { map: WorldMap { rooms, doorways, start, goal }, params })
}

/// Error unless the map section was completed (header, 11 rows).
fn finish_map_section(
    section: &Section,
    rows_read: usize,
    lineno: usize,
) -> Result<(), ScenarioError> {
    use ScenarioErrorKind as K;
    match section {
        Section::MapHeader => Err(ScenarioError::new(
            K::TopologyMismatch,
            lineno,
            1,
            "expected a rooms: header before the end of [map]",
        )),
        Section::MapRows => Err(ScenarioError::new(
            K::TopologyMismatch,
            lineno,
            1,
            format!("map has {rows_read} rows, expected {GRID_H}"),
        )),
        _ => Ok(()),
    }
}

fn parse_rooms_header(
    line: &str,
    lineno: usize,
    rooms: &mut Vec<RoomDraft>,
) -> Result<(), ScenarioError> {
    use ScenarioErrorKind as K;
    let trimmed = line.trim_start();
    let indent = line.chars().count() - trimmed.chars().count();
    let Some(rest) = trimmed.strip_prefix("rooms:") else {
        return Err(ScenarioError::new(
            K::TopologyMismatch,
            lineno,
            indent + 1,
            "expected a rooms: header after [map]",
        ));
    };
    let mut col = indent + "rooms:".chars().count();
    for token in SplitTokens::new(rest, col) {
        let (name, tcol) = token;
        col = tcol;
        let mut chars = name.chars();
        let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !head_ok || !tail_ok {
            return Err(ScenarioError::new(
                K::TopologyMismatch,
                lineno,
                tcol,
                format!("invalid room name `{name}`"),
            ));
        }
        if rooms.iter().any(|r| r.name == name) {
            return Err(ScenarioError::new(
                K::TopologyMismatch,
                lineno,
                tcol,
                format!("duplicate room name `{name}`"),
            ));
        }
        rooms.push(RoomDraft { name: name.to_string(), doors: Vec::new() });
    }
    if rooms.is_empty() {
        return Err(ScenarioError::new(
            K::TopologyMismatch,
            lineno,
            col + 1,
            "rooms: header names no rooms",
        ));
    }
    Ok(())
}

/// Whitespace-separated tokens with their 1-based start column.
struct SplitTokens<'a> {
    rest: std::str::CharIndices<'a>,
    src: &'a str,
    base_col: usize,
}

impl<'a> SplitTokens<'a> {
    fn new(src: &'a str, base_col: usize) -> Self {
        SplitTokens { rest: src.char_indices(), src, base_col }
    }
}

impl<'a> Iterator for SplitTokens<'a> {
    type Item = (&'a str, usize);

    fn next(&mut self) -> Option<(&'a str, usize)> {
        let mut col = self.base_col;
        let (start, start_col) = loop {
            let (idx, c) = self.rest.next()?;
            col += 1;
            if !c.is_whitespace() {
                break (idx, col);
            }
        };
        let mut end = self.src.len();
        for (idx, c) in self.rest.by_ref() {
            col += 1;
            if c.is_whitespace() {
                end = idx;
                break;
            }
        }
        self.base_col = col;
        Some((&self.src[start..end], start_col))
    }
}

fn parse_map_row(
    line: &str,
    lineno: usize,
    y: usize,
    rooms: &mut Vec<RoomDraft>,
    start: &mut Option<(RoomId, Cell)>,
    goal: &mut Option<(RoomId, Cell)>,
) -> Result<(), ScenarioError> {
    use ScenarioErrorKind as K;
    let err = |kind, col: usize, detail: String| Err(ScenarioError::new(kind, lineno, col, detail));

    let mut room = 0usize;
    let mut x = 0usize;
    let mut col = 0usize;
    for c in line.chars() {
        col += 1;
        if c == '|' {
            if x != GRID_W as usize {
                return err(
                    K::TopologyMismatch,
                    col,
                    format!("room block has {x} cells, expected {GRID_W}"),
                );
            }
            room += 1;
            x = 0;
            if room == rooms.len() {
                return err(
                    K::TopologyMismatch,
                    col,
                    format!("row has more blocks than the {} declared rooms", rooms.len()),
                );
            }
            continue;
        }
        if x == GRID_W as usize {
            return err(
                K::TopologyMismatch,
                col,
                format!("room block longer than {GRID_W} cells"),
            );
        }
        let on_wall = y == 0 || x == GRID_W as usize - 1;
        match c {
            '#' => {
                if !on_wall {
                    return err(
                        K::TopologyMismatch,
                        col,
                        "wall inside the free region; the template walls are \
                         the top row and the east column"
                            .to_string(),
                    );
                }
            }
            '.' | '1'..='9' | 'G' | 'R' => {
                if on_wall {
                    return err(
                        K::TopologyMismatch,
                        col,
                        "free cell on the template wall".to_string(),
                    );
                }
                let cell = Cell::new(x as u8, y as u8);
                debug_assert!(cell_free(cell));
                let rid = RoomId(room);
                match c {
                    'G' => {
                        if goal.is_some() {
                            return err(
                                K::TopologyMismatch,
                                col,
                                "goal already placed".to_string(),
                            );
                        }
                        *goal = Some((rid, cell));
                    }
                    'R' => {
                        if start.is_some() {
                            return err(
                                K::TopologyMismatch,
                                col,
                                "robot start already placed".to_string(),
                            );
                        }
                        *start = Some((rid, cell));
                    }
                    '.' => {}
                    d => {
                        let door = Door(d as u8 - b'0');
                        rooms[room].doors.push((door, cell, lineno, col));
                    }
                }
            }
            _ => {
                return err(K::UnknownChar, col, format!("`{c}` is not a map character"));
            }
        }
        x += 1;
    }
    if x != GRID_W as usize {
        return err(
            K::TopologyMismatch,
            col + 1,
            format!("room block has {x} cells, expected {GRID_W}"),
        );
    }
    if room + 1 != rooms.len() {
        return err(
            K::TopologyMismatch,
            col + 1,
            format!("row has {} blocks, expected {}", room + 1, rooms.len()),
        );
    }
    Ok(())
}

/// Door-level checks that need the whole grid: per-room uniqueness, a valid
/// exit, and one shared position per door id across rooms.
fn validate_doors(rooms: &[RoomDraft]) -> Result<(), ScenarioError> {
    use ScenarioErrorKind as K;
    let mut positions: BTreeMap<Door, Cell> = BTreeMap::new();
    for draft in rooms {
        for (idx, &(door, cell, line, col)) in draft.doors.iter().enumerate() {
            if draft.doors[..idx].iter().any(|&(d, ..)| d == door) {
                return Err(ScenarioError::new(
                    K::BadPairing,
                    line,
                    col,
                    format!("door {door} appears twice in room {}", draft.name),
                ));
            }
            if exit_dir(cell).is_none() {
                return Err(ScenarioError::new(
                    K::BadPairing,
                    line,
                    col,
                    format!(
                        "door {door} at {cell} has no unique exit; doors must \
                         touch exactly one wall"
                    ),
                ));
            }
            match positions.get(&door) {
                None => {
                    positions.insert(door, cell);
                }
                Some(&prev) if prev != cell => {
                    return Err(ScenarioError::new(
                        K::BadPairing,
                        line,
                        col,
                        format!(
                            "door {door} sits at {cell} here but at {prev} \
                             elsewhere; a door id keeps one position in every room"
                        ),
                    ));
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

fn parse_pair_line(
    line: &str,
    lineno: usize,
    rooms: &[RoomDraft],
    used_sides: &mut Vec<(RoomId, Door)>,
) -> Result<((RoomId, Door), (RoomId, Door)), ScenarioError> {
    use ScenarioErrorKind as K;
    let trimmed = line.trim_start();
    let indent = line.chars().count() - trimmed.chars().count();
    let Some(rest) = trimmed.strip_prefix("pair:") else {
        return Err(ScenarioError::new(
            K::TopologyMismatch,
            lineno,
            indent + 1,
            "expected a pair: line after the map rows",
        ));
    };
    let base = indent + "pair:".chars().count();
    let mut tokens = SplitTokens::new(rest, base);
    let side = |tokens: &mut SplitTokens| -> Result<((RoomId, Door), usize), ScenarioError> {
        let Some((token, tcol)) = tokens.next() else {
            return Err(ScenarioError::new(
                K::BadPairing,
                lineno,
                base + 1,
                "pair: needs two room.door sides",
            ));
        };
        let Some((room_name, door_name)) = token.split_once('.') else {
            return Err(ScenarioError::new(
                K::BadPairing,
                lineno,
                tcol,
                format!("`{token}` is not of the form room.dN"),
            ));
        };
        let Some(rid) = rooms.iter().position(|r| r.name == room_name) else {
            return Err(ScenarioError::new(
                K::BadPairing,
                lineno,
                tcol,
                format!("unknown room `{room_name}`"),
            ));
        };
        let door = match door_name.strip_prefix('d').map(str::parse::<u8>) {
            Some(Ok(n @ 1..=9)) => Door(n),
            _ => {
                return Err(ScenarioError::new(
                    K::BadPairing,
                    lineno,
                    tcol + room_name.chars().count() + 1,
                    format!("`{door_name}` is not a door name (d1..d9)"),
                ));
            }
        };
        if !rooms[rid].doors.iter().any(|&(d, ..)| d == door) {
            return Err(ScenarioError::new(
                K::BadPairing,
                lineno,
                tcol,
                format!("room `{room_name}` has no door {door}"),
            ));
        }
        Ok(((RoomId(rid), door), tcol))
    };
    let (a, acol) = side(&mut tokens)?;
    let (b, bcol) = side(&mut tokens)?;
    if let Some((extra, ecol)) = tokens.next() {
        return Err(ScenarioError::new(
            K::BadPairing,
            lineno,
            ecol,
            format!("unexpected trailing `{extra}` on pair line"),
        ));
    }
    if a == b {
        return Err(ScenarioError::new(
            K::BadPairing,
            lineno,
            bcol,
            "a door cannot pair with itself",
        ));
    }
    for (side, col) in [(a, acol), (b, bcol)] {
        if used_sides.contains(&side) {
            return Err(ScenarioError::new(
                K::BadPairing,
                lineno,
                col,
                format!(
                    "{}.{} already belongs to another pairing",
                    rooms[side.0 .0].name, side.1
                ),
            ));
        }
        used_sides.push(side);
    }
    Ok((a, b))
}

/// Every door drawn on the grid must belong to exactly one pair line.
fn validate_pair_cover(
    rooms: &[RoomDraft],
    used_sides: &[(RoomId, Door)],
) -> Result<(), ScenarioError> {
    for (rid, draft) in rooms.iter().enumerate() {
        for &(door, _, line, col) in &draft.doors {
            if !used_sides.contains(&(RoomId(rid), door)) {
                return Err(ScenarioError::new(
                    ScenarioErrorKind::BadPairing,
                    line,
                    col,
                    format!("door {door} in room {} has no pairing", draft.name),
                ));
            }
        }
    }
    Ok(())
}

/// Paired doors must occupy the same projected cell (crossings land on the
/// same position in the other room).
fn validate_pair_positions(
    rooms: &[RoomDraft],
    doorways: &[Doorway],
) -> Result<(), ScenarioError> {
    let cell_of = |(rid, door): (RoomId, Door)| {
        rooms[rid.0]
            .doors
            .iter()
            .find(|&&(d, ..)| d == door)
            .map(|&(_, c, line, col)| (c, line, col))
            .expect("pair sides were checked against declared doors")
    };
    for w in doorways {
        let (ca, ..) = cell_of(w.a);
        let (cb, line, col) = cell_of(w.b);
        if ca != cb {
            return Err(ScenarioError::new(
                ScenarioErrorKind::BadPairing,
                line,
                col,
                format!(
                    "paired doors sit at {ca} and {cb}; both sides of a \
                     doorway share one position"
                ),
            ));
        }
    }
    Ok(())
}

fn parse_param_line(
    line: &str,
    lineno: usize,
    params: &mut Params,
    seen: &mut Vec<String>,
) -> Result<(), ScenarioError> {
    use ScenarioErrorKind as K;
    let trimmed = line.trim_start();
    let indent = line.chars().count() - trimmed.chars().count();
    let Some(eq_idx) = trimmed.find('=') else {
        return Err(ScenarioError::new(
            K::BadParamValue,
            lineno,
            indent + 1,
            "expected `key = value`",
        ));
    };
    let key_part = &trimmed[..eq_idx];
    let val_part = &trimmed[eq_idx + 1..];
    let key = key_part.trim();
    let key_col = indent + 1 + key_part.chars().take_while(|c| c.is_whitespace()).count();
    let value = val_part.trim();
    let val_col = indent
        + eq_idx
        + 2
        + val_part.chars().take_while(|c| c.is_whitespace()).count();

    if !PARAM_KEYS.contains(&key) {
        return Err(ScenarioError::new(
            K::BadParamValue,
            lineno,
            key_col,
            format!("unknown parameter `{key}`"),
        ));
    }
    if seen.iter().any(|k| k == key) {
        return Err(ScenarioError::new(
            K::BadParamValue,
            lineno,
            key_col,
            format!("parameter `{key}` set twice"),
        ));
    }
    seen.push(key.to_string());

    let bad = |detail: String| ScenarioError::new(K::BadParamValue, lineno, val_col, detail);
    let float = |range: &str| -> Result<Scalar, ScenarioError> {
        value
            .parse::<Scalar>()
            .map_err(|_| bad(format!("`{value}` is not a number")))
            .and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(bad(format!("`{value}` is not finite")))
                }
            })
            .and_then(|v| {
                let ok = match range {
                    "unit" => (0.0..=1.0).contains(&v),
                    "unit-open-low" => v > 0.0 && v <= 1.0,
                    "positive" => v > 0.0,
                    _ => unreachable!("known range names"),
                };
                if ok {
                    Ok(v)
                } else {
                    Err(bad(format!("`{value}` is outside the valid range")))
                }
            })
    };
    match key {
        "p_intended" => params.p_intended = float("unit")?,
        "epsilon" => params.epsilon = float("unit")?,
        "gamma" => params.gamma = float("unit-open-low")?,
        "vi_tolerance" => params.vi_tolerance = float("positive")?,
        "horizon" => {
            params.horizon = value
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| bad(format!("`{value}` is not a positive integer")))?;
        }
        "max_steps" => {
            params.max_steps = value
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| bad(format!("`{value}` is not a positive integer")))?;
        }
        "vi_sweeps" => {
            params.vi_sweeps = value
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| bad(format!("`{value}` is not a positive integer")))?;
        }
        "seed" => {
            params.seed = value
                .parse::<u64>()
                .map_err(|_| bad(format!("`{value}` is not an unsigned integer")))?;
        }
        _ => unreachable!("key checked against PARAM_KEYS"),
    }
    Ok(())
}

/// Serialize a scenario canonically: map rows from the template plus the
/// scenario's markers, pair lines in doorway order, params sorted by key
/// with defaults written as comment lines.
pub fn render_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    out.push_str("[map]\n");
    out.push_str("rooms:");
    for room in &s.map.rooms {
        out.push(' ');
        out.push_str(&room.name);
    }
    out.push('\n');

    for y in 0..GRID_H {
        let mut row = String::new();
        for (rid, room) in s.map.rooms.iter().enumerate() {
            if rid > 0 {
                row.push('|');
            }
            for x in 0..GRID_W {
                let cell = Cell::new(x, y);
                let c = if !cell_free(cell) {
                    '#'
                } else if s.map.goal == (RoomId(rid), cell) {
                    'G'
                } else if s.map.start == (RoomId(rid), cell) {
                    'R'
                } else if let Some(door) = room.door_at(cell) {
                    (b'0' + door.0) as char
                } else {
                    '.'
                };
                row.push(c);
            }
        }
        out.push_str(&row);
        out.push('\n');
    }

    for w in &s.map.doorways {
        let side = |(rid, door): (RoomId, Door)| format!("{}.{}", s.map.rooms[rid.0].name, door);
        out.push_str(&format!("pair: {} {}\n", side(w.a), side(w.b)));
    }

    out.push_str("\n[params]\n");
    let d = Params::default();
    let entries: [(&str, String, bool); 8] = [
        ("epsilon", format!("{}", s.params.epsilon), s.params.epsilon == d.epsilon),
        ("gamma", format!("{}", s.params.gamma), s.params.gamma == d.gamma),
        ("horizon", format!("{}", s.params.horizon), s.params.horizon == d.horizon),
        ("max_steps", format!("{}", s.params.max_steps), s.params.max_steps == d.max_steps),
        ("p_intended", format!("{}", s.params.p_intended), s.params.p_intended == d.p_intended),
        ("seed", format!("{}", s.params.seed), s.params.seed == d.seed),
        ("vi_sweeps", format!("{}", s.params.vi_sweeps), s.params.vi_sweeps == d.vi_sweeps),
        (
            "vi_tolerance",
            format!("{}", s.params.vi_tolerance),
            s.params.vi_tolerance == d.vi_tolerance,
        ),
    ];
    for (key, value, is_default) in entries {
        if is_default {
            out.push_str(&format!("# {key} = {value}\n"));
        } else {
            out.push_str(&format!("{key} = {value}\n"));
        }
    }
    out
}
