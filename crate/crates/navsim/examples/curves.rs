//! Scratch: learning-curve comparison for the two agents.

use navsim::exact::expected_steps;
use navsim::experiment::{eval_curve, Agent};
use navsim::scenario::canonical_scenario;

fn main() {
    let mut sc = canonical_scenario();
    let runs: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let episodes: u32 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let k: u32 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(3);
    if let Some(p) = std::env::args().nth(4).and_then(|s| s.parse().ok()) {
        sc.params.p_intended = p;
    }
    let opt = expected_steps(&sc.map, sc.params.p_intended);
    let threshold = 1.1 * opt;
    let cap = (3.5 * opt).ceil() as u32;
    println!("opt {opt:.3} threshold {threshold:.2} cap {cap}");
    for agent in [Agent::Hierarchical, Agent::Flat] {
        let mut mean = vec![0.0; episodes as usize];
        for run in 0..runs {
            let t0 = std::time::Instant::now();
            let curve = eval_curve(&sc, agent, run, k, cap, episodes).expect("runs");
            let first = curve.iter().position(|&m| m <= threshold);
            let tail: Vec<String> = curve.iter().step_by(10).map(|m| format!("{m:.0}")).collect();
            println!(
                "{} run {run}: first {first:?} every10 {} ({:.1}s)",
                agent.name(),
                tail.join(" "),
                t0.elapsed().as_secs_f64()
            );
            for (m, c) in mean.iter_mut().zip(&curve) {
                *m += c / runs as f64;
            }
        }
        let first = mean.iter().position(|&m| m <= threshold);
        let tail: Vec<String> = mean.iter().step_by(5).map(|m| format!("{m:.1}")).collect();
        println!("{} MEAN: first {first:?} every5 {}", agent.name(), tail.join(" "));
    }
}
