//! Constructed rearrangement instances with known solutions.

use lbcp_core::placement::{enumerate_candidates, has_stable_placement, mask, policy_select, CandidateOptions, Heuristic};
use lbcp_core::srp::execute_plan;
use lbcp_core::{BinDims, BinState, Item, Operation, Placement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A bin where `new_item` has no stable placement, plus a verified witness
/// plan that unpacks only `blockers`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub state: BinState,
    pub new_item: Item,
    pub blockers: Vec<Item>,
    pub witness: Vec<Operation>,
}

fn random_item(rng: &mut impl Rng, id: u32, lo: u32, hi: u32) -> Item {
    Item::new(id, rng.random_range(lo..=hi), rng.random_range(lo..=hi), rng.random_range(lo..=hi))
}

/// Packs random items with the built-in policy.
fn heuristic_fill(rng: &mut impl Rng, dims: BinDims, delta: f64, n: usize, opts: &CandidateOptions) -> BinState {
    let mut s = BinState::new(dims, delta).expect("valid dims");
    for id in 1..=n as u32 {
        let item = random_item(rng, id, 2, 5);
        let c = mask(enumerate_candidates(&s, &item, opts));
        let Ok(d) = policy_select(&s, &item, &c, &mut Heuristic) else { continue };
        s.apply_pack(item, c[d.chosen].placement, c[d.chosen].result.support_polygon.clone())
            .expect("stable candidate packs");
    }
    s
}

/// Places `items` one after another with the built-in policy.
fn replace_all(state: &BinState, items: &[Item], opts: &CandidateOptions) -> Option<Vec<Operation>> {
    let mut s = state.clone();
    let mut ops = Vec::new();
    for item in items {
        let c = mask(enumerate_candidates(&s, item, opts));
        let d = policy_select(&s, item, &c, &mut Heuristic).ok()?;
        let chosen = &c[d.chosen];
        s.apply_pack(*item, chosen.placement, chosen.result.support_polygon.clone()).ok()?;
        ops.push(Operation::pack(*item, chosen.placement));
    }
    Some(ops)
}

/// Tries to build one instance: a partly filled bin, a new item with a spot,
/// and one to `max_blockers` small items stacked over that spot until the new
/// item fits nowhere. Returns `None` when the attempt does not work out.
pub fn try_blocker_instance(seed: u64, dims: BinDims, delta: f64, max_blockers: usize) -> Option<Instance> {
    let opts = CandidateOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fill = rng.random_range(3..=10);
    let base = heuristic_fill(&mut rng, dims, delta, fill, &opts);

    let new_item = random_item(&mut rng, 1000, 3, 5);
    let spots = mask(enumerate_candidates(&base, &new_item, &opts));
    if spots.is_empty() {
        return None;
    }
    let spot: Placement = spots[rng.random_range(0..spots.len())].placement;
    let spot_rect = new_item.footprint(spot.x, spot.y);

    let mut state = base.clone();
    let mut blockers = Vec::new();
    for k in 0..max_blockers {
        let b = random_item(&mut rng, 2000 + k as u32, 2, 3);
        let over: Vec<_> = mask(enumerate_candidates(&state, &b, &opts))
            .into_iter()
            .filter(|c| b.footprint(c.placement.x, c.placement.y).overlaps(&spot_rect))
            .collect();
        if over.is_empty() {
            return None;
        }
        let c = &over[rng.random_range(0..over.len())];
        state.apply_pack(b, c.placement, c.result.support_polygon.clone()).ok()?;
        blockers.push(b);
        if !has_stable_placement(&state, &new_item, &opts) {
            break;
        }
    }
    if has_stable_placement(&state, &new_item, &opts) {
        return None;
    }

    let mut witness: Vec<Operation> = blockers.iter().rev().map(|&b| Operation::unpack(b)).collect();
    witness.push(Operation::pack(new_item, spot));
    let cleared = execute_plan(&state, &witness, &opts).ok()?;
    witness.extend(replace_all(&cleared, &blockers, &opts)?);
    execute_plan(&state, &witness, &opts).ok()?;
    Some(Instance { state, new_item, blockers, witness })
}

/// The first `n` instances found from consecutive seeds.
pub fn blocker_suite(n: usize, base_seed: u64, dims: BinDims, delta: f64, max_blockers: usize) -> Vec<Instance> {
    (0u64..)
        .take(n * 200)
        .filter_map(|k| try_blocker_instance(base_seed.wrapping_add(k), dims, delta, max_blockers))
        .take(n)
        .collect()
}

/// Small random bins where a random new item has no stable placement.
pub fn dead_end_suite(n: usize, base_seed: u64, dims: BinDims, delta: f64, max_items: usize) -> Vec<(BinState, Item)> {
    let opts = CandidateOptions::default();
    (0u64..)
        .take(n * 200)
        .filter_map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(k));
            let count = rng.random_range(1..=max_items);
            let s = heuristic_fill(&mut rng, dims, delta, count, &opts);
            let item = random_item(&mut rng, 1000, 2, 5);
            (!has_stable_placement(&s, &item, &opts)).then_some((s, item))
        })
        .take(n)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessBucket {
    pub utilization_lo: f64,
    pub utilization_hi: f64,
    pub runs: usize,
    pub successes: usize,
}

impl SuccessBucket {
    pub fn rate(&self) -> Option<f64> {
        (self.runs > 0).then(|| self.successes as f64 / self.runs as f64)
    }
}

/// Success counts bucketed by start utilization into `n` equal bins on [0, 1].
pub fn success_buckets(samples: &[(f64, bool)], n: usize) -> Vec<SuccessBucket> {
    let n = n.max(1);
    let mut out: Vec<SuccessBucket> = (0..n)
        .map(|i| SuccessBucket {
            utilization_lo: i as f64 / n as f64,
            utilization_hi: (i + 1) as f64 / n as f64,
            runs: 0,
            successes: 0,
        })
        .collect();
    for &(u, ok) in samples {
        let i = ((u * n as f64) as usize).min(n - 1);
        out[i].runs += 1;
        out[i].successes += usize::from(ok);
    }
    out
}
