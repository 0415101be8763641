//! Deterministic test doubles over a `u64` value domain.
//!
//! [`HashNode`] implements every contract function as a keyed hash of its
//! arguments, so two execution orders agree only if they fed every function
//! exactly the same inputs; any scheduling bug shows up as a value mismatch.
//! [`random_hierarchy`] generates small valid hierarchies with randomized
//! shapes and link maps, and [`random_order`] draws uniform random
//! topological orders, both from a tiny self-contained generator so this
//! module adds no dependencies.

use std::sync::Arc;

use crate::{Direction, Hierarchy, Link, NodeContract, NodeId};

/// Mix two words into one, splitmix64-style. Not cryptographic; collisions
/// are vanishingly unlikely over test-sized inputs, which is all the
/// invariance checks need.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(b)
        .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a tagged sequence of word slices.
pub fn fold(tag: u64, parts: &[&[u64]]) -> u64 {
    let mut h = mix(0xA076_1D64_78BD_642F, tag);
    for part in parts {
        for &x in *part {
            h = mix(h, x);
        }
    }
    h
}

/// Tiny deterministic pseudo-random generator for test-case construction.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    /// Next raw word.
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n` (`n` clamped up to 1).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    /// True with probability `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Node behavior where every function is a distinct keyed hash of all its
/// arguments. The identity obligations of the contract are honored:
/// absorbing no observations or utilities leaves the slot unchanged, and
/// `actuate` is identity except on a world node, where it hashes belief and
/// commands so environment stepping is order-sensitive too.
pub struct HashNode {
    /// Per-node key, so distinct nodes compute distinct functions.
    pub salt: u64,
    /// Overrides `actuate` to hash instead of pass through.
    pub world: bool,
}

impl NodeContract<u64> for HashNode {
    fn initial_belief(&self) -> u64 {
        mix(self.salt, 1)
    }

    fn initial_policy(&self) -> u64 {
        mix(self.salt, 2)
    }

    fn initial_transition_model(&self) -> u64 {
        mix(self.salt, 3)
    }

    fn initial_planning_state(&self) -> u64 {
        mix(self.salt, 4)
    }

    fn observation_update(&self, belief: &u64, observations: &[u64]) -> u64 {
        if observations.is_empty() {
            *belief
        } else {
            fold(5, &[&[self.salt, *belief], observations])
        }
    }

    fn transition_apply(&self, model: &u64, belief: &u64, context: &[u64], actions: &[u64]) -> u64 {
        fold(6, &[&[self.salt, *model, *belief], context, actions])
    }

    fn transition_learn(
        &self,
        model: &u64,
        belief: &u64,
        context: &[u64],
        actions: &[u64],
        corrected: &u64,
    ) -> u64 {
        fold(7, &[&[self.salt, *model, *belief], context, actions, &[*corrected]])
    }

    fn utility_absorb(&self, planning: &u64, utilities: &[u64]) -> u64 {
        if utilities.is_empty() {
            *planning
        } else {
            fold(8, &[&[self.salt, *planning], utilities])
        }
    }

    fn plan(&self, policy: &u64, model: &u64, tasks: &[u64], planning: &u64, belief: &u64) -> (u64, u64) {
        let p = fold(9, &[&[self.salt, *policy, *model], tasks, &[*planning, *belief]]);
        let r = fold(10, &[&[self.salt, *policy, *model], tasks, &[*planning, *belief]]);
        (p, r)
    }

    fn policy_apply(&self, policy: &u64, belief: &u64) -> Vec<u64> {
        let h = fold(11, &[&[self.salt, *policy, *belief]]);
        vec![h, mix(h, 11)]
    }

    fn actuate(&self, belief: &u64, tasks: &[u64]) -> u64 {
        if self.world {
            fold(12, &[&[self.salt, *belief], tasks])
        } else {
            *belief
        }
    }
}

/// Random link map over one value: empty, single, or double output.
fn unary_map(rng: &mut SplitMix64) -> impl Fn(&u64) -> Vec<u64> + Send + Sync + 'static {
    let salt = rng.next_u64();
    let kind = rng.below(4);
    move |v| match kind {
        0 => Vec::new(),
        1 => vec![mix(salt, *v), mix(salt ^ 0xDEAD_BEEF, *v)],
        _ => vec![mix(salt, *v)],
    }
}

/// Random link map over an action set: empty, single, or double output.
fn actions_map(rng: &mut SplitMix64) -> impl Fn(&[u64]) -> Vec<u64> + Send + Sync + 'static {
    let salt = rng.next_u64();
    let kind = rng.below(4);
    move |actions| {
        if kind == 0 {
            return Vec::new();
        }
        let h = actions.iter().fold(mix(salt, 13), |h, &a| mix(h, a));
        if kind == 1 {
            vec![h, mix(h, 17)]
        } else {
            vec![h]
        }
    }
}

/// Generate a valid hierarchy of 1..=6 [`HashNode`]s with node 0 as world.
/// Every non-world node gets at least one lower link; extra forward links
/// and the four maps of each link are randomized. Also returns the link
/// endpoint pairs for order generation.
pub fn random_hierarchy(rng: &mut SplitMix64) -> (Hierarchy<u64>, Vec<(NodeId, NodeId)>) {
    let n = 1 + rng.below(6) as usize;
    let nodes: Vec<Arc<dyn NodeContract<u64>>> = (0..n)
        .map(|i| {
            Arc::new(HashNode {
                salt: rng.next_u64(),
                world: i == 0,
            }) as Arc<dyn NodeContract<u64>>
        })
        .collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 1..n {
        pairs.push((rng.below(j as u64) as usize, j));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !pairs.contains(&(i, j)) && rng.chance(1, 3) {
                pairs.push((i, j));
            }
        }
    }

    let links: Vec<Link<u64>> = pairs
        .iter()
        .map(|&(i, j)| {
            Link::new(NodeId(i), NodeId(j))
                .with_sensing(unary_map(rng))
                .with_context(unary_map(rng))
                .with_utility(unary_map(rng))
                .with_task_params(actions_map(rng))
        })
        .collect();

    let ids = pairs.iter().map(|&(i, j)| (NodeId(i), NodeId(j))).collect();
    (Hierarchy::new(nodes, links, NodeId(0)), ids)
}

/// Uniformly random topological order of `n` nodes for the given sweep
/// direction over `edges` (as (lower, upper) pairs).
pub fn random_order(
    n: usize,
    edges: &[(NodeId, NodeId)],
    direction: Direction,
    rng: &mut SplitMix64,
) -> Vec<NodeId> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for &(lower, upper) in edges {
        let (from, to) = match direction {
            Direction::Up => (lower.0, upper.0),
            Direction::Down => (upper.0, lower.0),
        };
        out[from].push(to);
        indegree[to] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let pick = rng.below(ready.len() as u64) as usize;
        let i = ready.swap_remove(pick);
        order.push(NodeId(i));
        for &j in &out[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(j);
            }
        }
    }
    order
}
