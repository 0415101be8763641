//! Static structure of a hierarchy: nodes, typed links, validation, and
//! topological orders over the sensing DAG.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::{NodeContract, Value};

/// Index of a node within its hierarchy. Dense, starting at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Map from one neighbor slot value to a set of messages.
pub type SetFn<V> = Arc<dyn Fn(&V) -> Vec<V> + Send + Sync>;

/// Map from an upper node's action set to task parameters for the lower node.
pub type ActionSetFn<V> = Arc<dyn Fn(&[V]) -> Vec<V> + Send + Sync>;

/// One edge of the sensing DAG, from `lower` up to `upper`, bundling the four
/// translation maps that cross it. Upward maps read lower-node slots; the
/// downward maps read upper-node slots. Maps default to constant-empty, so a
/// link can carry only the channels that exist between a given pair.
#[derive(Clone)]
pub struct Link<V> {
    /// Node closer to the world.
    pub lower: NodeId,
    /// Node further from the world.
    pub upper: NodeId,
    /// Upward: lower corrected belief to observations for `upper`.
    pub sensing: SetFn<V>,
    /// Downward: upper predicted belief to context for `lower`.
    pub context: SetFn<V>,
    /// Upward: lower planning state to utility signals for `upper`.
    pub utility: SetFn<V>,
    /// Downward: upper action set to task parameters for `lower`.
    pub task_params: ActionSetFn<V>,
}

impl<V: Value> Link<V> {
    /// Link with all four maps constant-empty.
    pub fn new(lower: NodeId, upper: NodeId) -> Self {
        Link {
            lower,
            upper,
            sensing: Arc::new(|_| Vec::new()),
            context: Arc::new(|_| Vec::new()),
            utility: Arc::new(|_| Vec::new()),
            task_params: Arc::new(|_: &[V]| Vec::new()),
        }
    }

    /// Replace the sensing map.
    pub fn with_sensing(mut self, f: impl Fn(&V) -> Vec<V> + Send + Sync + 'static) -> Self {
        self.sensing = Arc::new(f);
        self
    }

    /// Replace the context map.
    pub fn with_context(mut self, f: impl Fn(&V) -> Vec<V> + Send + Sync + 'static) -> Self {
        self.context = Arc::new(f);
        self
    }

    /// Replace the utility map.
    pub fn with_utility(mut self, f: impl Fn(&V) -> Vec<V> + Send + Sync + 'static) -> Self {
        self.utility = Arc::new(f);
        self
    }

    /// Replace the task-parameter map.
    pub fn with_task_params(mut self, f: impl Fn(&[V]) -> Vec<V> + Send + Sync + 'static) -> Self {
        self.task_params = Arc::new(f);
        self
    }
}

/// A structural problem that makes a hierarchy unusable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A link endpoint names a node outside `0..len`.
    UnknownNode { link: usize, id: NodeId },
    /// A link connects a node to itself.
    SelfLoop { link: usize, id: NodeId },
    /// Two links share the same (lower, upper) pair.
    DuplicateLink { lower: NodeId, upper: NodeId },
    /// The designated world node is outside `0..len`.
    UnknownWorld { id: NodeId },
    /// The world node has lower neighbors, so it is not a source of the
    /// sensing graph.
    WorldNotSource { lowers: Vec<NodeId> },
    /// A non-world node has no lower neighbors, so no sensing reaches it and
    /// the world is not the unique source.
    UnsensedNode { id: NodeId },
    /// Nodes the sensing graph cannot topologically order (on a directed
    /// cycle, or reachable only through one), ascending.
    Cycle { members: Vec<NodeId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownNode { link, id } => {
                write!(f, "link {link} references unknown node {id}")
            }
            Violation::SelfLoop { link, id } => {
                write!(f, "link {link} connects node {id} to itself")
            }
            Violation::DuplicateLink { lower, upper } => {
                write!(f, "duplicate link {lower} -> {upper}")
            }
            Violation::UnknownWorld { id } => write!(f, "world node {id} does not exist"),
            Violation::WorldNotSource { lowers } => {
                write!(f, "world node has lower neighbors {lowers:?}")
            }
            Violation::UnsensedNode { id } => {
                write!(f, "node {id} has no lower neighbors and is not the world")
            }
            Violation::Cycle { members } => write!(f, "cycle through nodes {members:?}"),
        }
    }
}

/// Outcome of structural validation: empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Every violation found, in detection order.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// True when no violations were found.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

/// Immutable description of a hierarchy: node behaviors, links, and which
/// node is the world. Construction does not validate; see
/// [`Hierarchy::validate`] or build an
/// [`ActiveHierarchy`](crate::ActiveHierarchy), which insists on validity.
pub struct Hierarchy<V: Value> {
    nodes: Vec<Arc<dyn NodeContract<V>>>,
    links: Vec<Link<V>>,
    world: NodeId,
    /// Per node: indices into `links` where the node is the lower endpoint,
    /// ascending by upper id. Gather order for context and task parameters.
    ups: Vec<Vec<usize>>,
    /// Per node: indices into `links` where the node is the upper endpoint,
    /// ascending by lower id. Gather order for observations and utilities.
    downs: Vec<Vec<usize>>,
}

impl<V: Value> Hierarchy<V> {
    /// Bundle nodes and links with `world` as the designated world node.
    pub fn new(nodes: Vec<Arc<dyn NodeContract<V>>>, links: Vec<Link<V>>, world: NodeId) -> Self {
        let n = nodes.len();
        let mut ups: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut downs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, link) in links.iter().enumerate() {
            if link.lower.0 < n {
                ups[link.lower.0].push(k);
            }
            if link.upper.0 < n {
                downs[link.upper.0].push(k);
            }
        }
        for list in &mut ups {
            list.sort_by_key(|&k| links[k].upper);
        }
        for list in &mut downs {
            list.sort_by_key(|&k| links[k].lower);
        }
        Hierarchy {
            nodes,
            links,
            world,
            ups,
            downs,
        }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the hierarchy has no nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The designated world node.
    pub fn world(&self) -> NodeId {
        self.world
    }

    /// Behavior of node `id`.
    pub fn contract(&self, id: NodeId) -> &Arc<dyn NodeContract<V>> {
        &self.nodes[id.0]
    }

    /// All links.
    pub fn links(&self) -> &[Link<V>] {
        &self.links
    }

    /// Links where `id` is the lower endpoint, ascending by upper id.
    pub fn links_up(&self, id: NodeId) -> impl Iterator<Item = &Link<V>> {
        self.ups[id.0].iter().map(move |&k| &self.links[k])
    }

    /// Links where `id` is the upper endpoint, ascending by lower id.
    pub fn links_down(&self, id: NodeId) -> impl Iterator<Item = &Link<V>> {
        self.downs[id.0].iter().map(move |&k| &self.links[k])
    }

    /// Check every structural requirement: known endpoints, no self loops,
    /// no duplicate links, acyclic sensing graph, and the world node as its
    /// unique source.
    pub fn validate(&self) -> ValidationReport {
        let n = self.nodes.len();
        let mut violations = Vec::new();

        let mut sound: Vec<usize> = Vec::new();
        for (k, link) in self.links.iter().enumerate() {
            let mut ok = true;
            for id in [link.lower, link.upper] {
                if id.0 >= n {
                    violations.push(Violation::UnknownNode { link: k, id });
                    ok = false;
                }
            }
            if ok && link.lower == link.upper {
                violations.push(Violation::SelfLoop { link: k, id: link.lower });
                ok = false;
            }
            if ok {
                sound.push(k);
            }
        }

        let mut seen = BTreeSet::new();
        for &k in &sound {
            let link = &self.links[k];
            if !seen.insert((link.lower, link.upper)) {
                violations.push(Violation::DuplicateLink {
                    lower: link.lower,
                    upper: link.upper,
                });
            }
        }

        if self.world.0 >= n {
            violations.push(Violation::UnknownWorld { id: self.world });
        }

        // Source and cycle checks run on the sound links only, so one bad
        // endpoint does not drown the report in follow-on noise.
        if self.world.0 < n {
            let lowers: Vec<NodeId> = {
                let mut v: Vec<NodeId> = sound
                    .iter()
                    .map(|&k| &self.links[k])
                    .filter(|l| l.upper == self.world)
                    .map(|l| l.lower)
                    .collect();
                v.sort();
                v.dedup();
                v
            };
            if !lowers.is_empty() {
                violations.push(Violation::WorldNotSource { lowers });
            }
        }

        let mut has_lower = vec![false; n];
        for &k in &sound {
            has_lower[self.links[k].upper.0] = true;
        }
        for i in 0..n {
            if NodeId(i) != self.world && !has_lower[i] {
                violations.push(Violation::UnsensedNode { id: NodeId(i) });
            }
        }

        let edges: Vec<(NodeId, NodeId)> = sound
            .iter()
            .map(|&k| (self.links[k].lower, self.links[k].upper))
            .collect();
        if let Err(members) = kahn(n, &edges, false) {
            violations.push(Violation::Cycle { members });
        }

        ValidationReport { violations }
    }

    /// Upward topological order: every link's lower endpoint before its
    /// upper. Ties broken toward ascending ids. Errs with the unorderable
    /// nodes if the sensing graph is cyclic.
    pub fn topo_up(&self) -> Result<Vec<NodeId>, Vec<NodeId>> {
        let edges: Vec<(NodeId, NodeId)> =
            self.links.iter().map(|l| (l.lower, l.upper)).collect();
        kahn(self.nodes.len(), &edges, false)
    }

    /// Downward topological order: every link's upper endpoint before its
    /// lower. Ties broken toward ascending ids.
    pub fn topo_down(&self) -> Result<Vec<NodeId>, Vec<NodeId>> {
        let edges: Vec<(NodeId, NodeId)> =
            self.links.iter().map(|l| (l.lower, l.upper)).collect();
        kahn(self.nodes.len(), &edges, true)
    }
}

/// Kahn's algorithm with a BTreeSet ready set, so equal-depth nodes emerge in
/// ascending id order. `reversed` walks edges upper-to-lower. Errs with the
/// ascending list of nodes left unordered.
fn kahn(
    n: usize,
    edges: &[(NodeId, NodeId)],
    reversed: bool,
) -> Result<Vec<NodeId>, Vec<NodeId>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for &(lower, upper) in edges {
        let (from, to) = if reversed {
            (upper.0, lower.0)
        } else {
            (lower.0, upper.0)
        };
        if from < n && to < n {
            out[from].push(to);
            indegree[to] += 1;
        }
    }

    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        order.push(NodeId(i));
        for &j in &out[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert(j);
            }
        }
    }

    if order.len() == n {
        Ok(order)
    } else {
        let mut members: Vec<NodeId> = (0..n)
            .filter(|&i| indegree[i] > 0)
            .map(NodeId)
            .collect();
        members.sort();
        Err(members)
    }
}
