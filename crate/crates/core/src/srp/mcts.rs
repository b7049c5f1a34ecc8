use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{unpackable_items, Operation, RearrangementPlan, SrpConfig, SrpFailure};
use crate::binstate::{BinState, Item};
use crate::error::{Error, Result};
use crate::placement::{rank_items_detailed, value_estimate, PolicyProvider};

/// A tree node: the items taken out so far and the bin that is left.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub unpacked: Vec<Item>,
    pub state: BinState,
    pub visits: u32,
    pub value_sum: f64,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    tried: Vec<Item>,
    exhausted: bool,
}

impl SearchNode {
    fn new(state: BinState, unpacked: Vec<Item>, parent: Option<usize>) -> Self {
        Self {
            unpacked,
            state,
            visits: 0,
            value_sum: 0.0,
            children: Vec::new(),
            parent,
            tried: Vec::new(),
            exhausted: false,
        }
    }

    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.value_sum / f64::from(self.visits)
        }
    }

    pub fn depth(&self) -> usize {
        self.unpacked.len()
    }
}

/// Arena-backed search tree; node 0 is the root.
#[derive(Clone, Debug)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
    cfg: SrpConfig,
}

impl SearchTree {
    pub fn new(root: BinState, cfg: SrpConfig) -> Self {
        Self { nodes: alloc::vec![SearchNode::new(root, Vec::new(), None)], cfg }
    }

    /// Unpackable items of `node` that have no child edge yet.
    fn untried(&self, node: usize) -> Vec<Item> {
        let n = &self.nodes[node];
        unpackable_items(&n.state)
            .into_iter()
            .filter(|id| !n.tried.iter().any(|t| t.id == *id))
            .filter_map(|id| n.state.get(id).map(|p| p.item))
            .collect()
    }

    fn expandable(&self, node: usize) -> bool {
        let n = &self.nodes[node];
        n.depth() < self.cfg.max_depth
            && n.depth() < self.cfg.staging_capacity
            && n.children.len() < self.cfg.max_branch
            && !self.untried(node).is_empty()
    }

    /// Adds a child that unpacks one untried item, picked uniformly at random.
    pub fn expand(&mut self, node: usize, rng: &mut impl Rng) -> Result<usize> {
        if !self.expandable(node) {
            return Err(Error::NoExpandableMove);
        }
        let options = self.untried(node);
        let item = options[rng.random_range(0..options.len())];
        let parent = &mut self.nodes[node];
        parent.tried.push(item);
        let mut state = parent.state.clone();
        state.apply_unpack(item.id)?;
        let mut unpacked = parent.unpacked.clone();
        unpacked.push(item);
        let child = self.nodes.len();
        self.nodes.push(SearchNode::new(state, unpacked, Some(node)));
        self.nodes[node].children.push(child);
        Ok(child)
    }

    /// Walks down by UCB1 to a node that can still grow; `None` once the
    /// whole tree is exhausted.
    fn select(&mut self) -> Option<usize> {
        loop {
            if self.nodes[0].exhausted {
                return None;
            }
            let mut cur = 0;
            loop {
                if self.expandable(cur) {
                    return Some(cur);
                }
                let n = &self.nodes[cur];
                let parent_visits = n.visits.max(1);
                let best = n
                    .children
                    .iter()
                    .copied()
                    .filter(|&c| !self.nodes[c].exhausted)
                    .map(|c| (c, ucb1(&self.nodes[c], parent_visits, self.cfg.eta)))
                    .fold(None, |acc: Option<(usize, f64)>, (c, u)| match acc {
                        Some((_, bu)) if bu >= u => acc,
                        _ => Some((c, u)),
                    });
                match best {
                    Some((c, _)) => cur = c,
                    None => {
                        self.nodes[cur].exhausted = true;
                        break;
                    }
                }
            }
        }
    }
}

/// `mean + eta * sqrt(ln parent_visits / visits)`, infinite when `visits` is 0.
pub fn ucb1_score(mean: f64, parent_visits: f64, visits: f64, eta: f64) -> f64 {
    if visits <= 0.0 {
        return f64::INFINITY;
    }
    mean + eta * libm::sqrt(libm::log(parent_visits) / visits)
}

/// UCB1 of a tree node; unvisited nodes come first.
pub fn ucb1(node: &SearchNode, parent_visits: u32, eta: f64) -> f64 {
    ucb1_score(node.mean(), f64::from(parent_visits), f64::from(node.visits), eta)
}

/// Reward of a finished rollout: `w_v * value + utilization`.
pub fn rollout_reward(value: f64, utilization: f64, w_v: f64) -> f64 {
    w_v * value + utilization
}

/// Adds `reward` to `node` and all its ancestors.
pub fn backpropagate(tree: &mut SearchTree, node: usize, reward: f64) {
    let mut cur = Some(node);
    while let Some(i) = cur {
        let n = &mut tree.nodes[i];
        n.visits += 1;
        n.value_sum += reward;
        cur = n.parent;
    }
}

/// Outcome of a greedy policy rollout.
#[derive(Clone, Debug)]
pub struct Rollout {
    pub reward: f64,
    /// Pack operations in execution order.
    pub tail: Vec<Operation>,
    pub state: BinState,
    pub new_item_packed: bool,
    /// Items from `pending` left outside the bin.
    pub left_out: Vec<Item>,
}

impl Rollout {
    pub fn utilization(&self) -> f64 {
        self.state.utilization()
    }
}

/// Repeatedly places the best-ranked packable item among `pending` and the
/// new item until nothing fits, everything is in, or the bin reaches the
/// target utilization with the new item inside.
pub fn rollout(
    state: &BinState,
    pending: &[Item],
    new_item: &Item,
    cfg: &SrpConfig,
    provider: &mut dyn PolicyProvider,
) -> Rollout {
    let mut state = state.clone();
    let mut todo: Vec<Item> = pending.to_vec();
    todo.push(*new_item);
    let mut tail = Vec::new();
    let mut new_item_packed = false;
    let mut last = None;

    while !todo.is_empty() {
        if new_item_packed && state.utilization() >= cfg.t_uti {
            break;
        }
        let ranked = rank_items_detailed(&state, &todo, &cfg.candidates, provider);
        let Some((item, choice)) = ranked.into_iter().find_map(|r| r.choice.map(|c| (r.item, c))) else {
            break;
        };
        state
            .apply_pack(item, choice.placement, choice.result.support_polygon)
            .expect("stable candidate must pack");
        tail.push(Operation::pack(item, choice.placement));
        todo.retain(|i| i.id != item.id);
        new_item_packed |= item.id == new_item.id;
        last = Some(item);
    }

    let u = state.utilization();
    let reward = match last {
        Some(item) => rollout_reward(value_estimate(&state, &item, &cfg.candidates, provider), u, cfg.w_v),
        None => u,
    };
    Rollout { reward, tail, state, new_item_packed, left_out: todo }
}

/// Searches unpacking sequences until a rollout packs the new item and either
/// puts every unpacked item back or reaches the target utilization without
/// losing volume. Deterministic for a given seed.
pub fn mcts_search(
    state: &BinState,
    new_item: &Item,
    cfg: &SrpConfig,
    seed: u64,
    provider: &mut dyn PolicyProvider,
) -> core::result::Result<RearrangementPlan, SrpFailure> {
    let start_u = state.utilization();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = SearchTree::new(state.clone(), *cfg);
    let mut best_utilization = start_u;

    while tree.nodes.len() - 1 < cfg.max_nodes {
        let Some(leaf) = tree.select() else { break };
        let child = match tree.expand(leaf, &mut rng) {
            Ok(c) => c,
            Err(_) => {
                tree.nodes[leaf].exhausted = true;
                continue;
            }
        };
        let node = &tree.nodes[child];
        let r = rollout(&node.state, &node.unpacked, new_item, cfg, provider);
        backpropagate(&mut tree, child, r.reward);

        let u = r.utilization();
        if r.new_item_packed {
            best_utilization = best_utilization.max(u);
        }
        let all_back = r.left_out.is_empty();
        let good_enough = u >= cfg.t_uti && u >= start_u;
        if r.new_item_packed && (all_back || good_enough) {
            let node = &tree.nodes[child];
            let mut operations: Vec<Operation> = node.unpacked.iter().map(|&i| Operation::unpack(i)).collect();
            operations.extend(r.tail);
            let raw_len = operations.len();
            return Ok(RearrangementPlan {
                operations,
                achieved_utilization: u,
                target: r.state,
                new_item_packed: true,
                left_out: r.left_out.iter().map(|i| i.id).collect(),
                raw_len,
            });
        }
    }
    Err(SrpFailure { best_utilization, nodes: tree.nodes.len() - 1 })
}
