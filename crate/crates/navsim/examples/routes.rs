//! Throwaway: committed plan routes after training at several slippage levels.

use navsim::exact::ideal_route;
use navsim::experiment::{plan_after_training, plan_route};
use navsim::planner::{Feature, RoomGraph, SymState};
use navsim::scenario::canonical_scenario;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let p: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.8);
    let episodes: u32 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(800);
    let seed: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0);

    let mut sc = canonical_scenario();
    sc.params.p_intended = p;
    sc.params.seed = seed;

    let ideal = ideal_route(&sc.map, p);
    println!("p={p} episodes={episodes} seed={seed} ideal={ideal:?}");

    let t0 = Instant::now();
    let (plan, _tables) = plan_after_training(&sc, episodes).expect("plan");
    let plan = plan.expect("committed plan");
    let start = SymState::new(sc.map.start.0, Feature::Unknown);
    let route = plan_route(&RoomGraph::from_map(&sc.map), start, &plan);
    println!(
        "committed route {:?}  match={}  ({:.1}s)",
        route,
        route == ideal,
        t0.elapsed().as_secs_f64()
    );
}
