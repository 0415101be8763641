//! Pass-order invariance and slot-discipline properties, checked over
//! randomly generated hierarchies whose nodes hash all their inputs: any
//! difference in what a schedule feeds a node shows up as a different state.

use hierarchy_core::mock::{random_hierarchy, random_order, SplitMix64};
use hierarchy_core::{ActiveHierarchy, NodeId, Pass};

/// Build a random case, run one canonical cycle to desynchronize the slots,
/// and return it with its edge list.
fn warmed_case(rng: &mut SplitMix64) -> (ActiveHierarchy<u64>, Vec<(NodeId, NodeId)>, usize) {
    let (h, edges) = random_hierarchy(rng);
    let n = h.len();
    let ah = ActiveHierarchy::new(h).expect("generated hierarchy must validate");
    (ah.process_update(), edges, n)
}

#[test]
fn every_valid_pass_order_yields_the_same_cycle() {
    let mut rng = SplitMix64(0x5EED_0001);
    for case in 0..200 {
        let (warmed, edges, n) = warmed_case(&mut rng);
        let baseline = warmed.clone().process_update();
        for variant in 0..5 {
            let mut cur = warmed.clone();
            for pass in Pass::ALL {
                let order = random_order(n, &edges, pass.direction(), &mut rng);
                cur = cur
                    .update_pass(pass, &order)
                    .unwrap_or_else(|e| panic!("case {case}: rejected {pass:?} order: {e}"));
            }
            assert!(
                cur == baseline,
                "case {case} variant {variant}: cycle result depends on pass order\n\
                 got {cur:?}\nexpected {baseline:?}"
            );
        }
    }
}

#[test]
fn process_update_is_deterministic() {
    let mut rng = SplitMix64(0xD3_7E51);
    for _ in 0..50 {
        let (warmed, _, _) = warmed_case(&mut rng);
        let a = warmed.clone().process_update();
        let b = warmed.process_update();
        assert!(a == b, "same state, same cycle, different result");
    }
}

#[test]
fn passes_write_only_their_slots() {
    let mut rng = SplitMix64(0xF4A_3E5);
    for case in 0..50 {
        let (warmed, edges, n) = warmed_case(&mut rng);
        let mut cur = warmed;
        for pass in Pass::ALL {
            let before: Vec<_> = cur.states().to_vec();
            let order = random_order(n, &edges, pass.direction(), &mut rng);
            cur = cur.update_pass(pass, &order).unwrap();
            for (i, (old, new)) in before.iter().zip(cur.states()).enumerate() {
                let ctx = |slot: &str| format!("case {case}: {pass:?} touched {slot} of node {i}");
                match pass {
                    Pass::Prediction => {
                        assert_eq!(old.current_belief, new.current_belief, "{}", ctx("current"));
                        assert_eq!(old.policy, new.policy, "{}", ctx("policy"));
                        assert_eq!(old.transition_model, new.transition_model, "{}", ctx("model"));
                        assert_eq!(old.planning_state, new.planning_state, "{}", ctx("planning"));
                    }
                    Pass::Correction => {
                        assert_eq!(old.current_belief, new.current_belief, "{}", ctx("current"));
                        assert_eq!(old.predicted_belief, new.predicted_belief, "{}", ctx("predicted"));
                        assert_eq!(old.policy, new.policy, "{}", ctx("policy"));
                        assert_eq!(old.transition_model, new.transition_model, "{}", ctx("model"));
                        assert_eq!(old.planning_state, new.planning_state, "{}", ctx("planning"));
                    }
                    Pass::TransitionLearn => {
                        assert_eq!(old.current_belief, new.current_belief, "{}", ctx("current"));
                        assert_eq!(old.predicted_belief, new.predicted_belief, "{}", ctx("predicted"));
                        assert_eq!(old.corrected_belief, new.corrected_belief, "{}", ctx("corrected"));
                        assert_eq!(old.policy, new.policy, "{}", ctx("policy"));
                        assert_eq!(old.planning_state, new.planning_state, "{}", ctx("planning"));
                    }
                    Pass::Utility => {
                        assert_eq!(old.current_belief, new.current_belief, "{}", ctx("current"));
                        assert_eq!(old.predicted_belief, new.predicted_belief, "{}", ctx("predicted"));
                        assert_eq!(old.corrected_belief, new.corrected_belief, "{}", ctx("corrected"));
                        assert_eq!(old.policy, new.policy, "{}", ctx("policy"));
                        assert_eq!(old.transition_model, new.transition_model, "{}", ctx("model"));
                    }
                    Pass::Action => {
                        assert_eq!(old.predicted_belief, new.predicted_belief, "{}", ctx("predicted"));
                        assert_eq!(old.transition_model, new.transition_model, "{}", ctx("model"));
                    }
                }
            }
        }
    }
}

#[test]
fn world_state_only_moves_in_the_action_pass() {
    let mut rng = SplitMix64(0x0B5E_55ED);
    for _ in 0..50 {
        let (warmed, edges, n) = warmed_case(&mut rng);
        let world = warmed.hierarchy().world();
        let before = warmed.state(world).clone();
        let mut cur = warmed;
        for pass in [Pass::Prediction, Pass::Correction, Pass::TransitionLearn, Pass::Utility] {
            let order = random_order(n, &edges, pass.direction(), &mut rng);
            cur = cur.update_pass(pass, &order).unwrap();
            assert_eq!(
                &before,
                cur.state(world),
                "{pass:?} modified the world node's state"
            );
        }
    }
}
