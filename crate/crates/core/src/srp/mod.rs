//! Stable rearrangement planning.
//!
//! When a new item has no stable placement, [`plan`] searches for a short
//! sequence of unpack / pack / repack operations after which the new item is
//! in the bin and every intermediate state is stable.
//!
//! [`mcts_search`] explores unpack-only edges with policy rollouts, and
//! [`astar_refine`] shortens the resulting sequence over the same states.

mod astar;
mod mcts;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::binstate::{BinState, Item, ItemId, Placement};
use crate::error::{Error, Result};
use crate::placement::{CandidateOptions, PolicyProvider};
use crate::stability::validate_with;

pub use astar::astar_refine;
pub use mcts::{backpropagate, mcts_search, rollout, rollout_reward, ucb1, ucb1_score, Rollout, SearchNode, SearchTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Unpack,
    Pack,
    Repack,
}

/// One step of a plan. `target` is set for `Pack` and `Repack`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub kind: OpKind,
    pub item: Item,
    pub target: Option<Placement>,
}

impl Operation {
    pub fn unpack(item: Item) -> Self {
        Self { kind: OpKind::Unpack, item, target: None }
    }

    pub fn pack(item: Item, target: Placement) -> Self {
        Self { kind: OpKind::Pack, item, target: Some(target) }
    }

    pub fn repack(item: Item, target: Placement) -> Self {
        Self { kind: OpKind::Repack, item, target: Some(target) }
    }

    /// Total order used for deterministic tie-breaking.
    pub(crate) fn key(&self) -> (u8, u32, Placement) {
        let kind = match self.kind {
            OpKind::Unpack => 0,
            OpKind::Pack => 1,
            OpKind::Repack => 2,
        };
        (kind, self.item.id.0, self.target.unwrap_or(Placement::new(0, 0, 0)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementPlan {
    pub operations: Vec<Operation>,
    pub target: BinState,
    pub achieved_utilization: f64,
    pub new_item_packed: bool,
    /// Items taken out and never put back.
    pub left_out: Vec<ItemId>,
    /// Length of the search plan before refinement.
    pub raw_len: usize,
}

impl RearrangementPlan {
    pub fn len(&self) -> usize {
        self.operations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }
}

/// Why a search came back empty-handed.
#[derive(Clone, Debug, PartialEq)]
pub struct SrpFailure {
    /// Highest utilization any rollout reached with the new item packed, or
    /// the start utilization.
    pub best_utilization: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrpConfig {
    pub max_nodes: usize,
    pub max_branch: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub w_v: f64,
    pub t_uti: f64,
    pub staging_capacity: usize,
    pub candidates: CandidateOptions,
}

impl Default for SrpConfig {
    fn default() -> Self {
        Self {
            max_nodes: 100,
            max_branch: 3,
            max_depth: 6,
            eta: 1.0,
            w_v: 5.0,
            t_uti: 0.8,
            staging_capacity: 6,
            candidates: CandidateOptions::default(),
        }
    }
}

impl SrpConfig {
    pub fn check(&self) -> Result<()> {
        let positive = self.max_nodes > 0 && self.max_branch > 0 && self.max_depth > 0 && self.staging_capacity > 0;
        let reals = self.eta >= 0.0 && self.w_v >= 0.0 && self.t_uti > 0.0 && self.t_uti <= 1.0;
        if positive && reals {
            Ok(())
        } else {
            Err(Error::InvalidOperation("config out of range"))
        }
    }
}

/// Movement-block graph: an edge `a -> b` means `a` lies above `b`'s
/// footprint and must be moved first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceGraph {
    pub nodes: Vec<ItemId>,
    pub edges: Vec<(ItemId, ItemId)>,
}

impl PrecedenceGraph {
    /// Items with no incoming edge, in node order.
    pub fn roots(&self) -> Vec<ItemId> {
        let blocked: BTreeSet<ItemId> = self.edges.iter().map(|&(_, b)| b).collect();
        self.nodes.iter().copied().filter(|n| !blocked.contains(n)).collect()
    }

    /// Kahn order, or `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<ItemId>> {
        let idx = |id: ItemId| self.nodes.iter().position(|&n| n == id);
        let mut indeg = alloc::vec![0usize; self.nodes.len()];
        for &(_, b) in &self.edges {
            indeg[idx(b)?] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop() {
            order.push(self.nodes[i]);
            for &(a, b) in &self.edges {
                if a == self.nodes[i] {
                    let j = idx(b)?;
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }
}

pub fn build_precedence(state: &BinState) -> Result<PrecedenceGraph> {
    let packed = state.packed();
    let mut graph = PrecedenceGraph {
        nodes: packed.iter().map(|p| p.id()).collect(),
        edges: Vec::new(),
    };
    for a in packed {
        for b in packed {
            if a.blocks(b) {
                graph.edges.push((a.id(), b.id()));
            }
        }
    }
    if graph.topological_order().is_none() {
        return Err(Error::PrecedenceCycle);
    }
    Ok(graph)
}

/// Items nothing rests on, in pack order.
pub fn unpackable_items(state: &BinState) -> Vec<ItemId> {
    let packed = state.packed();
    packed
        .iter()
        .filter(|b| !packed.iter().any(|a| a.blocks(b)))
        .map(|p| p.id())
        .collect()
}

/// Applies one operation, re-validating it against the current state.
pub fn apply_operation(state: &mut BinState, op: &Operation, opts: &CandidateOptions) -> Result<()> {
    match op.kind {
        OpKind::Unpack => state.apply_unpack(op.item.id).map(|_| ()),
        OpKind::Pack => place(state, &op.item, op.target, opts),
        OpKind::Repack => {
            let mut next = state.clone();
            let old = next.apply_unpack(op.item.id)?;
            if Some(old.placement) == op.target {
                return Err(Error::InvalidOperation("repack to the same placement"));
            }
            place(&mut next, &op.item, op.target, opts)?;
            *state = next;
            Ok(())
        }
    }
}

fn place(state: &mut BinState, item: &Item, target: Option<Placement>, opts: &CandidateOptions) -> Result<()> {
    let t = target.ok_or(Error::InvalidOperation("pack without a target"))?;
    let v = validate_with(state, item, t.x, t.y, &opts.validate)?;
    if v.support_height > t.z {
        return Err(Error::Collision(item.id, t.z));
    }
    if v.support_height < t.z {
        return Err(Error::Floating(item.id, t.z));
    }
    if !v.valid {
        return Err(Error::Unstable(item.id));
    }
    state.apply_pack(*item, t, v.support_polygon)
}

/// Runs `ops` from `start`, validating every step, and returns the final state.
pub fn execute_plan(start: &BinState, ops: &[Operation], opts: &CandidateOptions) -> Result<BinState> {
    let mut state = start.clone();
    for op in ops {
        apply_operation(&mut state, op, opts)?;
    }
    Ok(state)
}

/// Placements by id, the layout a plan is judged against.
pub fn layout(state: &BinState) -> Vec<(ItemId, Placement)> {
    let mut v: Vec<_> = state.packed().iter().map(|p| (p.id(), p.placement)).collect();
    v.sort_unstable();
    v
}

/// Search then refinement.
pub fn plan(
    state: &BinState,
    new_item: &Item,
    cfg: &SrpConfig,
    seed: u64,
    provider: &mut dyn PolicyProvider,
) -> core::result::Result<RearrangementPlan, SrpFailure> {
    let raw = mcts_search(state, new_item, cfg, seed, provider)?;
    Ok(astar_refine(state, &raw, new_item, cfg))
}
