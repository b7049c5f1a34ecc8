//! Refined plans against breadth-first search over the same operations.

mod common;

use std::collections::{BTreeMap, VecDeque};

use lbcp_core::placement::{has_stable_placement, Heuristic};
use lbcp_core::srp::{apply_operation, astar_refine, execute_plan, layout, mcts_search, OpKind};
use lbcp_core::{BinDims, BinState, Item, ItemId, Operation, Placement, RearrangementPlan, SrpConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Where {
    In(Placement),
    Out,
}

/// Minimum number of operations from `start` to the plan's layout, moving only
/// the plan's items and holding at most `capacity` of them outside.
fn bfs_min(start: &BinState, plan: &RearrangementPlan, new_item: &Item, capacity: usize) -> Option<usize> {
    let mut items: Vec<Item> = plan.operations.iter().map(|o| o.item).collect();
    items.push(*new_item);
    items.sort_by_key(|i| i.id);
    items.dedup_by_key(|i| i.id);
    let goal: Vec<Where> = items
        .iter()
        .map(|i| plan.target.get(i.id).map_or(Where::Out, |p| Where::In(p.placement)))
        .collect();
    let locate = |s: &BinState| -> Vec<Where> {
        items.iter().map(|i| s.get(i.id).map_or(Where::Out, |p| Where::In(p.placement))).collect()
    };
    let opts = SrpConfig::default().candidates;
    let mut seen: BTreeMap<Vec<Where>, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(locate(start), 0);
    queue.push_back((start.clone(), 0usize));
    while let Some((s, g)) = queue.pop_front() {
        let here = locate(&s);
        if here == goal {
            return Some(g);
        }
        let outside = items
            .iter()
            .zip(&here)
            .filter(|(i, w)| **w == Where::Out && i.id != new_item.id)
            .count();
        for (k, item) in items.iter().enumerate() {
            let mut ops = Vec::new();
            match (here[k], goal[k]) {
                (Where::In(p), g) => {
                    if outside < capacity {
                        ops.push(Operation::unpack(*item));
                    }
                    if let Where::In(t) = g {
                        if t != p {
                            ops.push(Operation::repack(*item, t));
                        }
                    }
                }
                (Where::Out, Where::In(t)) => ops.push(Operation::pack(*item, t)),
                (Where::Out, Where::Out) => {}
            }
            for op in ops {
                let mut next = s.clone();
                if apply_operation(&mut next, &op, &opts).is_ok() {
                    let key = locate(&next);
                    if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
                        e.insert(g + 1);
                        queue.push_back((next, g + 1));
                    }
                }
            }
        }
    }
    None
}

fn instances() -> Vec<(BinState, Item)> {
    let mut out = Vec::new();
    let dims = BinDims::new(6, 6, 6);
    for seed in 0..400u64 {
        let s = common::random_stable_bin(seed, dims, 0.1, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
        let new = common::rs_item(&mut rng, 100);
        if !has_stable_placement(&s, &new, &Default::default()) {
            out.push((s, new));
        }
    }
    out
}

#[test]
fn refined_length_is_optimal_on_small_bins() {
    let cfg = SrpConfig::default();
    let mut checked = 0;
    for (k, (s, new)) in instances().into_iter().enumerate() {
        let Ok(raw) = mcts_search(&s, &new, &cfg, k as u64, &mut Heuristic) else { continue };
        let refined = astar_refine(&s, &raw, &new, &cfg);
        assert!(refined.len() <= raw.len());
        let end = execute_plan(&s, &refined.operations, &cfg.candidates).unwrap();
        assert_eq!(layout(&end), layout(&raw.target));
        let best = bfs_min(&s, &raw, &new, cfg.staging_capacity).expect("raw plan is a witness");
        assert_eq!(refined.len(), best, "instance {k}");
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} solvable instances");
}

#[test]
fn heuristic_never_overestimates() {
    let cfg = SrpConfig::default();
    for (k, (s, new)) in instances().into_iter().enumerate().take(60) {
        let Ok(raw) = mcts_search(&s, &new, &cfg, k as u64, &mut Heuristic) else { continue };
        let target: BTreeMap<ItemId, Placement> = layout(&raw.target).into_iter().collect();
        let mut involved: Vec<ItemId> = raw.operations.iter().map(|o| o.item.id).collect();
        involved.sort();
        involved.dedup();
        let h = involved
            .iter()
            .filter(|id| s.get(**id).map(|p| p.placement) != target.get(id).copied())
            .count();
        let best = bfs_min(&s, &raw, &new, cfg.staging_capacity).unwrap();
        // each misplaced item needs at least one operation
        assert!(h <= best);
        assert!(raw.operations.iter().all(|o| o.kind != OpKind::Repack));
    }
}
