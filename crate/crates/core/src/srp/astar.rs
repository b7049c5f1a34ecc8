use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use super::{apply_operation, layout, Operation, RearrangementPlan, SrpConfig};
use crate::binstate::{BinState, Item, Placement};

/// Where one of the plan's items currently is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Loc {
    In(Placement),
    Staged,
    /// The new item, still waiting outside.
    Pending,
}

/// What a plan's item must end as.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Goal {
    In(Placement),
    Out,
}

impl Goal {
    fn met_by(self, loc: Loc) -> bool {
        match (self, loc) {
            (Goal::In(t), Loc::In(p)) => t == p,
            (Goal::Out, Loc::Staged | Loc::Pending) => true,
            _ => false,
        }
    }
}

/// The items a plan touches, where they start and where they must end.
#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub items: Vec<Item>,
    pub start: Vec<Loc>,
    pub goal: Vec<Goal>,
}

impl Problem {
    pub fn new(start: &BinState, plan: &RearrangementPlan, new_item: &Item) -> Self {
        let mut items: Vec<Item> = Vec::new();
        for op in &plan.operations {
            if !items.iter().any(|i| i.id == op.item.id) {
                items.push(op.item);
            }
        }
        if !items.iter().any(|i| i.id == new_item.id) {
            items.push(*new_item);
        }
        items.sort_by_key(|i| i.id);
        let start_locs = items
            .iter()
            .map(|i| match start.get(i.id) {
                Some(p) => Loc::In(p.placement),
                None if i.id == new_item.id => Loc::Pending,
                None => Loc::Staged,
            })
            .collect();
        let goal = items
            .iter()
            .map(|i| plan.target.get(i.id).map_or(Goal::Out, |p| Goal::In(p.placement)))
            .collect();
        Self { items, start: start_locs, goal }
    }

    pub fn h(&self, locs: &[Loc]) -> usize {
        locs.iter().zip(&self.goal).filter(|(l, g)| !g.met_by(**l)).count()
    }

    /// Legal operations from `locs`, each with its successor state.
    pub fn successors(&self, state: &BinState, locs: &[Loc], cfg: &SrpConfig) -> Vec<(Operation, Vec<Loc>, BinState)> {
        let staged = locs.iter().filter(|l| **l == Loc::Staged).count();
        let mut out = Vec::new();
        for (k, (&item, &loc)) in self.items.iter().zip(locs).enumerate() {
            let target = match self.goal[k] {
                Goal::In(t) => Some(t),
                Goal::Out => None,
            };
            let mut moves = Vec::with_capacity(2);
            match loc {
                Loc::In(p) => {
                    if staged < cfg.staging_capacity {
                        moves.push((Operation::unpack(item), Loc::Staged));
                    }
                    if let Some(t) = target.filter(|&t| t != p) {
                        moves.push((Operation::repack(item, t), Loc::In(t)));
                    }
                }
                Loc::Staged | Loc::Pending => {
                    if let Some(t) = target {
                        moves.push((Operation::pack(item, t), Loc::In(t)));
                    }
                }
            }
            for (op, next_loc) in moves {
                let mut next = state.clone();
                if apply_operation(&mut next, &op, &cfg.candidates).is_ok() {
                    let mut l = locs.to_vec();
                    l[k] = next_loc;
                    out.push((op, l, next));
                }
            }
        }
        out
    }
}

struct Entry {
    f: usize,
    h: usize,
    staged: usize,
    keys: Vec<(u8, u32, Placement)>,
    ops: Vec<Operation>,
    locs: Vec<Loc>,
    state: BinState,
}

impl Entry {
    fn rank(&self) -> (usize, usize, usize, &[(u8, u32, Placement)]) {
        (self.f, self.h, self.staged, &self.keys)
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.rank() == other.rank()
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// Shortest operation sequence from `start` to the plan's layout, or `None`
/// when the search space has no path.
pub(crate) fn shortest(start: &BinState, problem: &Problem, cfg: &SrpConfig) -> Option<(Vec<Operation>, BinState)> {
    let mut open = BinaryHeap::new();
    let mut best_g: BTreeMap<Vec<Loc>, usize> = BTreeMap::new();
    let h0 = problem.h(&problem.start);
    best_g.insert(problem.start.clone(), 0);
    open.push(Reverse(Entry {
        f: h0,
        h: h0,
        staged: 0,
        keys: Vec::new(),
        ops: Vec::new(),
        locs: problem.start.clone(),
        state: start.clone(),
    }));
    while let Some(Reverse(e)) = open.pop() {
        if e.h == 0 {
            return Some((e.ops, e.state));
        }
        let g = e.ops.len();
        if best_g.get(&e.locs).is_some_and(|&b| b < g) {
            continue;
        }
        for (op, locs, state) in problem.successors(&e.state, &e.locs, cfg) {
            let g2 = g + 1;
            if best_g.get(&locs).is_some_and(|&b| b <= g2) {
                continue;
            }
            best_g.insert(locs.clone(), g2);
            let h = problem.h(&locs);
            let mut keys = e.keys.clone();
            keys.push(op.key());
            let mut ops = e.ops.clone();
            ops.push(op);
            open.push(Reverse(Entry {
                f: g2 + h,
                h,
                staged: locs.iter().filter(|l| **l == Loc::Staged).count(),
                keys,
                ops,
                locs,
                state,
            }));
        }
    }
    None
}

/// Shortens `plan` to a minimum-length sequence of unpack, pack and repack
/// operations reaching the same layout. Falls back to `plan` if no shorter
/// path is found.
pub fn astar_refine(start: &BinState, plan: &RearrangementPlan, new_item: &Item, cfg: &SrpConfig) -> RearrangementPlan {
    let problem = Problem::new(start, plan, new_item);
    match shortest(start, &problem, cfg) {
        Some((ops, state)) if ops.len() <= plan.operations.len() && layout(&state) == layout(&plan.target) => {
            RearrangementPlan {
                operations: ops,
                target: state,
                raw_len: plan.raw_len,
                ..plan.clone()
            }
        }
        _ => plan.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binstate::{BinDims, ItemId};
    use crate::srp::tests::pack;
    use crate::srp::{execute_plan, OpKind};

    fn bin() -> BinState {
        BinState::new(BinDims::new(6, 4, 6), 0.1).unwrap()
    }

    fn raw(start: &BinState, ops: Vec<Operation>) -> RearrangementPlan {
        let cfg = SrpConfig::default();
        let target = execute_plan(start, &ops, &cfg.candidates).unwrap();
        RearrangementPlan {
            achieved_utilization: target.utilization(),
            target,
            new_item_packed: true,
            left_out: Vec::new(),
            raw_len: ops.len(),
            operations: ops,
        }
    }

    #[test]
    fn unpack_then_put_back_collapses() {
        let mut s = bin();
        pack(&mut s, Item::new(1, 2, 4, 2), 0, 0);
        let b = s.get(ItemId(1)).unwrap().item;
        let new = Item::new(9, 2, 4, 2);
        let ops = alloc::vec![
            Operation::unpack(b),
            Operation::pack(new, Placement::new(3, 0, 0)),
            Operation::pack(b, Placement::new(0, 0, 0)),
        ];
        let p = astar_refine(&s, &raw(&s, ops), &new, &SrpConfig::default());
        assert_eq!(p.operations, [Operation::pack(new, Placement::new(3, 0, 0))]);
        assert_eq!(p.raw_len, 3);
    }

    #[test]
    fn unpack_pack_pair_becomes_repack() {
        let mut s = bin();
        pack(&mut s, Item::new(1, 2, 4, 2), 0, 0);
        let b = s.get(ItemId(1)).unwrap().item;
        let new = Item::new(9, 2, 4, 2);
        let ops = alloc::vec![
            Operation::unpack(b),
            Operation::pack(b, Placement::new(4, 0, 0)),
            Operation::pack(new, Placement::new(0, 0, 0)),
        ];
        let p = astar_refine(&s, &raw(&s, ops), &new, &SrpConfig::default());
        assert_eq!(p.len(), 2);
        assert_eq!(p.operations[0].kind, OpKind::Repack);
    }

    #[test]
    fn minimal_plan_unchanged() {
        let s = bin();
        let new = Item::new(9, 2, 4, 2);
        let ops = alloc::vec![Operation::pack(new, Placement::new(0, 0, 0))];
        let plan = raw(&s, ops);
        assert_eq!(astar_refine(&s, &plan, &new, &SrpConfig::default()).operations, plan.operations);
    }
}
