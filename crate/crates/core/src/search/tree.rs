use std::collections::VecDeque;
use std::fmt;

use indexmap::IndexMap;

use crate::model::{ActionId, GoalSet, State};

use super::uct::uct;
use super::SearchConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub action: Option<ActionId>,
    pub state: State,
    /// Sub-goals achieved on the path from the root to this node.
    pub achieved: GoalSet,
    pub w: f64,
    pub n: u64,
    pub beta_n: usize,
    /// Priority level; 0 is the unprioritized pool.
    pub level: usize,
    /// 1 + occurrences of this node's action among its ancestors.
    pub sigma: u32,
    pub depth: usize,
    pub expanded: bool,
}

/// Frontier nodes of one level, grouped by parent and then by their
/// (frozen) statistics. Members of a class always score the same, so
/// selection only compares the lowest id of each class.
#[derive(Clone, Debug, Default)]
struct Level {
    groups: IndexMap<NodeId, Group>,
    len: usize,
}

#[derive(Clone, Debug, Default)]
struct Group {
    classes: Vec<Class>,
    /// Best (score, id, class index) at a given parent visit count.
    best: Option<(u64, f64, NodeId, usize)>,
}

#[derive(Clone, Debug)]
struct Class {
    w: f64,
    n: u64,
    sigma: u32,
    /// Ascending ids.
    ids: VecDeque<NodeId>,
}

impl Level {
    fn push(&mut self, parent: NodeId, node: &SearchNode) {
        let group = self.groups.entry(parent).or_default();
        group.best = None;
        let classes = &mut group.classes;
        match classes
            .iter_mut()
            .find(|c| c.w == node.w && c.n == node.n && c.sigma == node.sigma)
        {
            Some(c) => {
                let at = c.ids.partition_point(|id| *id < node.id);
                c.ids.insert(at, node.id);
            }
            None => classes.push(Class {
                w: node.w,
                n: node.n,
                sigma: node.sigma,
                ids: VecDeque::from([node.id]),
            }),
        }
        self.len += 1;
    }

    fn members(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self
            .groups
            .values()
            .flat_map(|g| g.classes.iter().flat_map(|c| c.ids.iter().copied()))
            .collect();
        ids.sort();
        ids
    }
}

/// Arena of search nodes plus the partition of the frontier into priority levels.
///
/// Frontier statistics must not change while a node sits in a level set;
/// the search guarantees this since only expanded nodes gain visits.
#[derive(Clone, Debug)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    levels: Vec<Level>,
    p: usize,
}

impl SearchTree {
    /// A tree holding only the root, on level 1 with one visit.
    pub fn new(state: State, achieved: GoalSet) -> Self {
        let root = SearchNode {
            id: NodeId(0),
            parent: None,
            action: None,
            state,
            achieved,
            w: 0.0,
            n: 1,
            beta_n: 0,
            level: 1,
            sigma: 1,
            depth: 0,
            expanded: false,
        };
        let mut tree = SearchTree {
            nodes: vec![root],
            levels: vec![Level::default(), Level::default()],
            p: 1,
        };
        tree.levels[1].push(NodeId(0), &tree.nodes[0]);
        tree
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id.0]
    }

    pub fn get(&self, id: NodeId) -> Option<&SearchNode> {
        self.nodes.get(id.0)
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest non-empty prioritized level, or 0 when only the pool is left.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level_len(&self, level: usize) -> usize {
        self.levels.get(level).map_or(0, |l| l.len)
    }

    /// Members of a level set in ascending id order.
    pub fn level_set(&self, level: usize) -> Vec<NodeId> {
        self.levels.get(level).map_or_else(Vec::new, Level::members)
    }

    pub fn frontier_len(&self) -> usize {
        self.levels.iter().map(|l| l.len).sum()
    }

    /// Appends a child with zero visits and reward; it joins no level set yet.
    pub fn add_child(&mut self, parent: NodeId, action: ActionId, state: State, achieved: GoalSet) -> NodeId {
        let id = NodeId(self.nodes.len());
        let mut sigma = 1;
        let mut cursor = Some(parent);
        while let Some(a) = cursor {
            let anc = &self.nodes[a.0];
            if anc.action == Some(action) {
                sigma += 1;
            }
            cursor = anc.parent;
        }
        let depth = self.nodes[parent.0].depth + 1;
        self.nodes.push(SearchNode {
            id,
            parent: Some(parent),
            action: Some(action),
            state,
            achieved,
            w: 0.0,
            n: 0,
            beta_n: 0,
            level: 0,
            sigma,
            depth,
            expanded: false,
        });
        id
    }

    /// Places a frontier node on `level`, opening empty levels up to it as needed.
    pub fn insert(&mut self, id: NodeId, level: usize, beta_n: usize) {
        if self.levels.len() <= level {
            self.levels.resize_with(level + 1, Level::default);
        }
        let node = &mut self.nodes[id.0];
        node.level = level;
        node.beta_n = beta_n;
        let parent = node.parent.unwrap_or(id);
        self.levels[level].push(parent, &self.nodes[id.0]);
    }

    /// Recomputes `p` as the highest non-empty level (0 if none above the pool).
    pub fn refresh_p(&mut self) {
        self.p = (1..self.levels.len())
            .rev()
            .find(|&l| self.levels[l].len > 0)
            .unwrap_or(0);
    }

    /// `n += 1`, `w += reward` on `id` and every ancestor.
    pub fn backpropagate(&mut self, id: NodeId, reward: f64) {
        let mut cursor = Some(id);
        while let Some(c) = cursor {
            let node = &mut self.nodes[c.0];
            node.n += 1;
            node.w += reward;
            cursor = node.parent;
        }
    }

    pub fn score(&self, id: NodeId, config: &SearchConfig) -> f64 {
        let node = &self.nodes[id.0];
        let parent_visits = node.parent.map_or(node.n, |p| self.nodes[p.0].n);
        let prioritized = config.beta > 0 && node.level >= 1;
        uct(node.w, node.n, parent_visits as f64, node.sigma, config, prioritized)
    }

    /// Removes and returns the best frontier node of the highest non-empty
    /// level, falling back to the pool. Ties go to the lowest id.
    ///
    /// Per-parent results are cached by parent visit count, so `config` must
    /// stay the same over the lifetime of the tree.
    pub fn choose_node(&mut self, config: &SearchConfig) -> Option<NodeId> {
        let level = if self.levels[self.p].len == 0 { 0 } else { self.p };
        let prioritized = config.beta > 0 && level >= 1;
        let nodes = &self.nodes;
        let set = &mut self.levels[level];
        let mut best: Option<(f64, NodeId, usize)> = None;
        for (g, (parent, group)) in set.groups.iter_mut().enumerate() {
            let visits = nodes[parent.0].n;
            let (s, id) = match group.best {
                Some((n, s, id, _)) if n == visits => (s, id),
                _ => {
                    let mut local: Option<(f64, NodeId, usize)> = None;
                    for (k, c) in group.classes.iter().enumerate() {
                        let id = c.ids[0];
                        let s = uct(c.w, c.n, visits as f64, c.sigma, config, prioritized);
                        if better(s, id, local.map(|(s, id, _)| (s, id))) {
                            local = Some((s, id, k));
                        }
                    }
                    let (s, id, k) = local.expect("groups are never empty");
                    group.best = Some((visits, s, id, k));
                    (s, id)
                }
            };
            if better(s, id, best.map(|(s, id, _)| (s, id))) {
                best = Some((s, id, g));
            }
        }
        let (_, id, g) = best?;
        let group = &mut set.groups[g];
        let k = group.best.expect("scored above").3;
        group.best = None;
        let classes = &mut group.classes;
        classes[k].ids.pop_front();
        if classes[k].ids.is_empty() {
            classes.swap_remove(k);
            if classes.is_empty() {
                set.groups.swap_remove_index(g);
            }
        }
        set.len -= 1;
        self.nodes[id.0].expanded = true;
        Some(id)
    }

    /// Actions from the root to `id`, root first.
    pub fn path(&self, id: NodeId) -> Vec<ActionId> {
        let mut steps = Vec::with_capacity(self.nodes[id.0].depth);
        let mut cursor = Some(id);
        while let Some(c) = cursor {
            let node = &self.nodes[c.0];
            if let Some(a) = node.action {
                steps.push(a);
            }
            cursor = node.parent;
        }
        steps.reverse();
        steps
    }

    /// Brute-force σ by scanning the path; equals the cached value.
    pub fn sigma_of(&self, id: NodeId) -> u32 {
        let node = &self.nodes[id.0];
        let Some(action) = node.action else { return 1 };
        let path = self.path(id);
        1 + path[..path.len() - 1].iter().filter(|a| **a == action).count() as u32
    }
}

/// Higher score wins; equal scores go to the lower id.
fn better(score: f64, id: NodeId, incumbent: Option<(f64, NodeId)>) -> bool {
    match incumbent {
        None => true,
        Some((s, i)) => score > s || (score == s && id < i),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn tree() -> SearchTree {
        SearchTree::new(State::empty(1), GoalSet::new(Arc::from(vec![])))
    }

    fn child(t: &mut SearchTree, parent: NodeId, action: usize) -> NodeId {
        rewarded(t, parent, action, 0.0)
    }

    fn rewarded(t: &mut SearchTree, parent: NodeId, action: usize, w: f64) -> NodeId {
        let id = t.add_child(
            parent,
            ActionId(action),
            State::empty(1),
            GoalSet::new(Arc::from(vec![])),
        );
        t.backpropagate(id, w);
        id
    }

    #[test]
    fn sigma_counts_path_repetitions() {
        let mut t = tree();
        let pick = child(&mut t, NodeId(0), 0);
        let place = child(&mut t, pick, 1);
        let pick2 = child(&mut t, place, 0);
        assert_eq!(t.node(pick).sigma, 1);
        assert_eq!(t.node(place).sigma, 1);
        assert_eq!(t.node(pick2).sigma, 2);
        assert_eq!(t.sigma_of(pick2), 2);
        assert_eq!(t.sigma_of(t.root()), 1);
    }

    #[test]
    fn backpropagation_reaches_the_root() {
        let mut t = tree();
        let a = child(&mut t, NodeId(0), 0);
        let b = child(&mut t, a, 1);
        let before: Vec<_> = [t.root(), a, b].iter().map(|&i| (t.node(i).n, t.node(i).w)).collect();
        t.backpropagate(b, 1.0);
        for (i, id) in [t.root(), a, b].into_iter().enumerate() {
            assert_eq!(t.node(id).n, before[i].0 + 1);
            assert_eq!(t.node(id).w, before[i].1 + 1.0);
        }
        t.backpropagate(b, 0.0);
        assert_eq!(t.node(t.root()).w, 1.0);
        t.backpropagate(a, 1.0);
        assert_eq!(t.node(t.root()).w, 2.0);
    }

    #[test]
    fn choose_prefers_reward_then_lowest_id() {
        let cfg = SearchConfig::default();
        let mut t = tree();
        assert_eq!(t.choose_node(&cfg), Some(t.root()));
        let a = child(&mut t, NodeId(0), 0);
        let b = child(&mut t, NodeId(0), 1);
        let c = rewarded(&mut t, NodeId(0), 2, 1.0);
        for id in [c, b, a] {
            t.insert(id, 1, 0);
        }
        assert_eq!(t.level_set(1), [a, b, c]);
        assert_eq!(t.choose_node(&cfg), Some(c));
        assert_eq!(t.choose_node(&cfg), Some(a));
        assert_eq!(t.choose_node(&cfg), Some(b));
        assert_eq!(t.choose_node(&cfg), None);
    }

    #[test]
    fn pool_is_used_only_when_levels_are_empty() {
        let cfg = SearchConfig::default();
        let mut t = tree();
        t.choose_node(&cfg);
        let a = child(&mut t, NodeId(0), 0);
        let b = child(&mut t, NodeId(0), 1);
        t.insert(a, 0, 0);
        t.insert(b, 2, 0);
        t.refresh_p();
        assert_eq!(t.p(), 2);
        assert_eq!(t.choose_node(&cfg), Some(b));
        t.refresh_p();
        assert_eq!(t.p(), 0);
        assert_eq!(t.choose_node(&cfg), Some(a));
    }

    #[test]
    fn path_is_root_first() {
        let mut t = tree();
        let a = child(&mut t, NodeId(0), 3);
        let b = child(&mut t, a, 1);
        let c = child(&mut t, b, 2);
        assert_eq!(t.path(c), [ActionId(3), ActionId(1), ActionId(2)]);
        assert!(t.path(t.root()).is_empty());
    }
}
