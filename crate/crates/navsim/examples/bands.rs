//! Scratch: route costs vs the 10% band across slippage settings.

use navsim::exact::{expected_steps_via, ideal_route};
use navsim::grid::canonical_map;
use navsim::grid::{Door, RoomId};

fn main() {
    let map = canonical_map();
    // Route A crosses d1/d6 and d4/d3 pairs; route B crosses d4/d3 in r4/r5
    // plus d2/d5. Allow both sides of each doorway on the route.
    let a = |room: RoomId, door: Door| {
        matches!(
            (room.0, door.0),
            (3, 1) | (0, 6) | (0, 4) | (1, 3) | (1, 6) | (2, 1)
        )
    };
    let b = |room: RoomId, door: Door| {
        matches!((room.0, door.0), (3, 4) | (4, 3) | (4, 2) | (2, 5))
    };
    for p in [1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7, 0.65, 0.6, 0.55, 0.52, 0.5, 0.45, 0.4] {
        let va = expected_steps_via(&map, p, &a);
        let vb = expected_steps_via(&map, p, &b);
        let best = va.min(vb);
        let band = 1.1 * best;
        let ideal = ideal_route(&map, p);
        let names: Vec<String> = ideal.iter().map(|r| format!("r{}", r.0 + 1)).collect();
        println!(
            "p={p:<4} A={va:8.3} B={vb:8.3} best={best:8.3} band={band:8.3} \
             inA={} inB={} ideal={}",
            va <= band,
            vb <= band,
            names.join("-")
        );
    }
}
