//! Planner tests: symbolic transitions and costs against hand-worked
//! examples, plan search against exhaustive enumeration, and the
//! follow/replan execution logic.

mod common;

use navsim::grid::{canonical_map, Door, RoomId};
use navsim::planner::{
    absorb_tables, action_cost, expected_states, plan_min_cost, plan_planner, symbolic_transition,
    CostTables, Feature, Plan, PlanPolicy, PlannerState, RoomGraph, SymAction, SymState,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn canonical_graph() -> RoomGraph {
    RoomGraph::from_map(&canonical_map())
}

fn room(name: &str) -> RoomId {
    canonical_map().room_by_name(name).expect("canonical room")
}

fn at(name: &str, feature: Feature) -> SymState {
    SymState::new(room(name), feature)
}

/// Tables with every entry equal to `v`.
fn uniform_tables(v: u64) -> CostTables {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut t = common::random_cost_tables(&mut rng, 1.0);
    for c in t.ctf.values_mut() {
        *c = v;
    }
    for c in t.cbf.values_mut() {
        *c = v;
    }
    t
}

#[test]
fn traversal_follows_the_connection_facts() {
    let graph = canonical_graph();
    assert_eq!(
        symbolic_transition(&graph, at("r1", Feature::Unknown), SymAction::Traverse(Door(6))),
        Some(at("r4", Feature::Door(Door(1)))),
        "leaving r1 through d6 arrives in r4 on d1"
    );
    assert_eq!(
        symbolic_transition(&graph, at("r3", Feature::Door(Door(5))), SymAction::MoveGoal),
        Some(at("r3", Feature::Goal)),
        "the goal sits in r3"
    );
    assert_eq!(
        symbolic_transition(&graph, at("r4", Feature::Unknown), SymAction::MoveGoal),
        None,
        "no goal move outside the goal's room"
    );
    assert_eq!(
        symbolic_transition(&graph, at("r3", Feature::Goal), SymAction::MoveGoal),
        None,
        "no goal move while already on the goal"
    );
    assert_eq!(
        symbolic_transition(&graph, at("r4", Feature::Unknown), SymAction::Traverse(Door(5))),
        None,
        "r4 has no door d5"
    );
}

#[test]
fn costs_come_from_position_or_feature_tables() {
    let mut tables = CostTables::default();
    tables.ctf.insert(Feature::Door(Door(1)), 7);
    tables
        .cbf
        .insert((Feature::Door(Door(6)), Feature::Door(Door(4))), 11);
    assert_eq!(
        action_cost(&tables, at("r4", Feature::Unknown), SymAction::Traverse(Door(1))),
        Some(7),
        "off-feature positions are costed from the robot's location"
    );
    assert_eq!(
        action_cost(
            &tables,
            at("r1", Feature::Door(Door(6))),
            SymAction::Traverse(Door(4))
        ),
        Some(11),
        "on a feature the between-feature table applies"
    );
    assert_eq!(
        action_cost(&tables, at("r4", Feature::Unknown), SymAction::MoveGoal),
        None,
        "a missing entry yields no cost and excludes the action"
    );
}

#[test]
fn one_step_plan_moves_straight_to_the_goal() {
    let graph = canonical_graph();
    let mut tables = uniform_tables(9);
    tables.ctf.insert(Feature::Goal, 4);
    let plan = plan_min_cost(&graph, &tables, at("r3", Feature::Unknown), 10)
        .expect("goal is in reach");
    assert_eq!(
        plan.steps,
        vec![(SymAction::MoveGoal, 0)],
        "inside the goal room one move suffices"
    );
    assert_eq!(plan.total_cost, 4, "cost read from the position table");
}

#[test]
fn uniform_costs_pick_the_fewest_doorways() {
    let graph = canonical_graph();
    let plan = plan_min_cost(&graph, &uniform_tables(1), at("r4", Feature::Unknown), 10)
        .expect("reachable");
    let actions: Vec<SymAction> = plan.actions().collect();
    assert_eq!(
        actions,
        vec![
            SymAction::Traverse(Door(4)),
            SymAction::Traverse(Door(2)),
            SymAction::MoveGoal,
        ],
        "two doorways via r5 beat three via r1 and r2"
    );
    assert_eq!(plan.total_cost, 3, "three unit-cost actions");
}

#[test]
fn tight_horizons_report_no_plan() {
    let graph = canonical_graph();
    let tables = uniform_tables(1);
    let from = at("r4", Feature::Unknown);
    assert_eq!(plan_min_cost(&graph, &tables, from, 1), None, "one step is too few");
    assert_eq!(plan_min_cost(&graph, &tables, from, 2), None, "two steps still short");
    assert!(
        plan_min_cost(&graph, &tables, from, 3).is_some(),
        "three steps reach the goal"
    );
}

#[test]
fn standing_on_the_goal_plans_nothing() {
    let graph = canonical_graph();
    let plan = plan_min_cost(&graph, &uniform_tables(5), at("r3", Feature::Goal), 10)
        .expect("already done");
    assert!(plan.is_empty(), "no actions needed");
    assert_eq!(plan.total_cost, 0, "nothing costs nothing");
}

#[test]
fn equal_cost_plans_break_ties_toward_lower_door_ids() {
    // Two parallel doorways between the same pair of rooms.
    let graph = RoomGraph::new(
        vec![
            (RoomId(0), Door(1), RoomId(1), Door(3)),
            (RoomId(0), Door(2), RoomId(1), Door(4)),
        ],
        RoomId(1),
        2,
    );
    let tables = uniform_tables(0);
    let plan = plan_min_cost(
        &graph,
        &tables,
        SymState::new(RoomId(0), Feature::Unknown),
        10,
    )
    .expect("reachable");
    let actions: Vec<SymAction> = plan.actions().collect();
    assert_eq!(
        actions,
        vec![SymAction::Traverse(Door(1)), SymAction::MoveGoal],
        "equal cost and length fall back to the smaller door id"
    );
}

#[test]
fn search_matches_exhaustive_enumeration() {
    let graph = canonical_graph();
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keep = if seed % 3 == 0 { 0.7 } else { 1.0 };
        let tables = common::random_cost_tables(&mut rng, keep);
        for from in graph.states() {
            let got = plan_min_cost(&graph, &tables, from, 10);
            let want = common::enumerate_best_plan(&graph, &tables, from, 10);
            match (got, want) {
                (None, None) => {}
                (Some(plan), Some((cost, seq))) => {
                    assert_eq!(
                        plan.total_cost, cost,
                        "search and enumeration agree on cost (seed {seed}, from {from:?})"
                    );
                    let actions: Vec<SymAction> = plan.actions().collect();
                    assert_eq!(
                        actions, seq,
                        "and on the tie-broken sequence (seed {seed}, from {from:?})"
                    );
                }
                (got, want) => {
                    panic!("reachability disagrees (seed {seed}, from {from:?}): {got:?} vs {want:?}")
                }
            }
        }
    }
}

#[test]
fn plans_are_executable_and_well_formed() {
    let graph = canonical_graph();
    for seed in 100..140u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tables = common::random_cost_tables(&mut rng, 0.8);
        for from in graph.states() {
            let Some(plan) = plan_min_cost(&graph, &tables, from, 10) else {
                continue;
            };
            assert!(plan.steps.len() <= 10, "length bounded by the horizon");
            for (i, &(_, t)) in plan.steps.iter().enumerate() {
                assert_eq!(t as usize, i, "times run consecutively from zero");
            }
            let states = expected_states(&graph, from, &plan);
            assert_eq!(states.len(), plan.steps.len() + 1, "one state per step plus start");
            assert_eq!(states[0], from, "plans start where asked");
            assert_eq!(
                states.last().expect("nonempty").feature,
                Feature::Goal,
                "plans end on the goal"
            );
            if let Some(&(last, _)) = plan.steps.last() {
                assert_eq!(last, SymAction::MoveGoal, "the final action moves onto the goal");
            }
        }
    }
}

#[test]
fn planner_idles_until_tables_arrive_then_plans() {
    let graph = canonical_graph();
    let start = at("r4", Feature::Unknown);
    let s0 = PlannerState::new();
    let (policy, s1) = plan_planner(&s0, &graph, start, 10);
    assert_eq!(policy, PlanPolicy::idle(), "no costs yet, nothing to do");
    assert_eq!(s1.plan, None, "and no plan was formed");

    let s2 = absorb_tables(&s1, uniform_tables(1));
    assert!(s2.dirty, "new tables mark the state for replanning");
    let (policy, s3) = plan_planner(&s2, &graph, start, 10);
    assert_eq!(
        policy.action,
        Some(SymAction::Traverse(Door(4))),
        "with costs installed the first plan action comes out"
    );
    assert_eq!(policy.expected, Some(start), "the policy is tagged with its belief");
    assert!(!s3.dirty, "planning consumed the dirty mark");
    assert_eq!(s3.cursor, 0, "execution starts at the plan head");
}

#[test]
fn absorbing_identical_tables_changes_nothing() {
    let graph = canonical_graph();
    let start = at("r4", Feature::Unknown);
    let planned = {
        let s = absorb_tables(&PlannerState::new(), uniform_tables(1));
        plan_planner(&s, &graph, start, 10).1
    };
    let re_absorbed = absorb_tables(&planned, uniform_tables(1));
    assert_eq!(re_absorbed, planned, "same tables leave the state untouched");
    let (p1, n1) = plan_planner(&planned, &graph, start, 10);
    let (p2, n2) = plan_planner(&re_absorbed, &graph, start, 10);
    assert_eq!(p1, p2, "and the emitted action is unchanged");
    assert_eq!(n1, n2, "planning is idempotent for a fixed belief and costs");
}

#[test]
fn cursor_holds_on_slip_advances_on_progress_and_replans_off_course() {
    let graph = canonical_graph();
    let start = at("r4", Feature::Unknown);
    let s = absorb_tables(&PlannerState::new(), uniform_tables(1));
    let (p0, s) = plan_planner(&s, &graph, start, 10);
    assert_eq!(p0.action, Some(SymAction::Traverse(Door(4))));

    // A slip that leaves the symbolic belief unchanged re-emits the action.
    let (p1, s_held) = plan_planner(&s, &graph, start, 10);
    assert_eq!(p1, p0, "same belief, same action");
    assert_eq!(s_held.cursor, 0, "no progress, no cursor movement");
    assert_eq!(s_held.plan, s.plan, "the plan object is untouched");

    // Arriving at the next expected state advances without replanning.
    let after_cross = at("r5", Feature::Door(Door(3)));
    let (p2, s_adv) = plan_planner(&s_held, &graph, after_cross, 10);
    assert_eq!(s_adv.cursor, 1, "progress moves the cursor");
    assert_eq!(s_adv.plan, s.plan, "still the same plan");
    assert_eq!(
        p2.action,
        Some(SymAction::Traverse(Door(2))),
        "the next leg is emitted"
    );
    assert_eq!(p2.expected, Some(after_cross), "tagged with the advanced state");

    // A belief off the expected course replans from wherever we are.
    let off_course = at("r5", Feature::Unknown);
    let (p3, s_re) = plan_planner(&s_adv, &graph, off_course, 10);
    assert_eq!(s_re.cursor, 0, "replanning restarts the cursor");
    assert_eq!(s_re.expected[0], off_course, "the new plan starts at the belief");
    assert_eq!(
        p3.action,
        Some(SymAction::Traverse(Door(2))),
        "the fresh plan still heads for the goal"
    );
}

#[test]
fn reaching_the_goal_emits_nothing() {
    let graph = canonical_graph();
    let s = absorb_tables(&PlannerState::new(), uniform_tables(1));
    let goal = at("r3", Feature::Goal);
    let (policy, s) = plan_planner(&s, &graph, goal, 10);
    assert_eq!(policy.action, None, "done means idle");
    assert_eq!(policy.expected, Some(goal), "but the belief is acknowledged");
    assert!(s.plan.as_ref().is_some_and(Plan::is_empty), "the plan is empty, not absent");
}

#[test]
fn continuing_a_plan_matches_replanning_from_the_same_belief() {
    let graph = canonical_graph();
    for seed in 200..230u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tables = common::random_cost_tables(&mut rng, 1.0);
        for from in graph.states() {
            if from.feature == Feature::Goal {
                continue;
            }
            let s = absorb_tables(&PlannerState::new(), tables.clone());
            let (_, mut s) = plan_planner(&s, &graph, from, 10);
            let expected = s.expected.clone();
            for belief in expected.into_iter().skip(1) {
                let (continued, next) = plan_planner(&s, &graph, belief, 10);
                let fresh = plan_min_cost(&graph, &tables, belief, 10).expect("still reachable");
                assert_eq!(
                    continued.action,
                    fresh.steps.first().map(|&(a, _)| a),
                    "following the plan and replanning agree (seed {seed}, at {belief:?})"
                );
                s = next;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raising_any_cost_never_cheapens_the_plan(seed in 0u64..500, bump in 1u64..10) {
        let graph = canonical_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tables = common::random_cost_tables(&mut rng, 1.0);
        let from = at("r4", Feature::Unknown);
        let base = plan_min_cost(&graph, &tables, from, 10).expect("total tables reach the goal");

        let mut raised = tables.clone();
        let n_ctf = raised.ctf.len();
        let pick = (seed as usize) % (n_ctf + raised.cbf.len());
        if pick < n_ctf {
            let key = *raised.ctf.keys().nth(pick).expect("in range");
            *raised.ctf.get_mut(&key).expect("present") += bump;
        } else {
            let key = *raised.cbf.keys().nth(pick - n_ctf).expect("in range");
            *raised.cbf.get_mut(&key).expect("present") += bump;
        }
        let after = plan_min_cost(&graph, &raised, from, 10).expect("still reachable");
        prop_assert!(
            after.total_cost >= base.total_cost,
            "raising a cost entry cannot lower the optimum ({} -> {})",
            base.total_cost,
            after.total_cost
        );
    }
}
