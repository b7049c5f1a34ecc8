//! Placement candidates, stability masking and the policy/value seam.
//!
//! Candidates come from the corners of the empty maximal spaces (EMS) of the
//! heightmap world. Each one is validated and carries its stability bit; a
//! policy may only ever pick a stable one.
//!
//! The built-in actor is a deepest-bottom-left rule with a support-area
//! tie-break and the built-in critic is utilization plus a probe term. An
//! external [`PolicyProvider`] can override either; whatever it returns,
//! unstable candidates are scored `-inf`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::binstate::{BinState, Item, ItemId, Placement};
use crate::error::{Error, Result};
use crate::stability::{validate_with, ValidateOptions, ValidationResult};

/// A maximal empty box of the heightmap world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ems {
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub w: u32,
    pub d: u32,
    pub h: u32,
}

impl Ems {
    pub fn fits(&self, item: &Item) -> bool {
        item.w <= self.w && item.d <= self.d && item.h <= self.h
    }
}

/// All maximal empty boxes, sorted by origin then extents.
///
/// Everything under the heightmap surface counts as solid, so every empty box
/// reaches the ceiling and a maximal one is a maximal free rectangle of some
/// level set `{height <= z}` whose highest cell is exactly `z`.
pub fn generate_ems(state: &BinState) -> Vec<Ems> {
    let dims = state.dims();
    let (l, w) = (dims.l as usize, dims.w as usize);
    let hm = state.heightmap();
    let mut levels: Vec<u32> = hm.iter().copied().filter(|&h| h < dims.h).collect();
    levels.sort_unstable();
    levels.dedup();

    let mut out = Vec::new();
    let mut free = alloc::vec![false; l * w];
    let mut run = alloc::vec![0usize; l];
    // prefix[y][x] = free cells in row y before column x
    let mut prefix = alloc::vec![0usize; w * (l + 1)];
    for &z in &levels {
        for (f, &h) in free.iter_mut().zip(hm) {
            *f = h <= z;
        }
        for y in 0..w {
            for x in 0..l {
                prefix[y * (l + 1) + x + 1] = prefix[y * (l + 1) + x] + usize::from(free[y * l + x]);
            }
        }
        let row_free = |y: usize, a: usize, b: usize| prefix[y * (l + 1) + b + 1] - prefix[y * (l + 1) + a] == b + 1 - a;

        run.iter_mut().for_each(|r| *r = 0);
        for y1 in 0..w {
            for x in 0..l {
                run[x] = if free[y1 * l + x] { run[x] + 1 } else { 0 };
            }
            for a in 0..l {
                let mut m = usize::MAX;
                for b in a..l {
                    m = m.min(run[b]);
                    if m == 0 {
                        break;
                    }
                    if b + 1 < l && run[b + 1] >= m {
                        continue;
                    }
                    if a > 0 && run[a - 1] >= m {
                        continue;
                    }
                    if y1 + 1 < w && row_free(y1 + 1, a, b) {
                        continue;
                    }
                    let y0 = y1 + 1 - m;
                    let top = (y0..=y1)
                        .flat_map(|y| hm[y * l + a..=y * l + b].iter().copied())
                        .max()
                        .unwrap_or(0);
                    if top == z {
                        out.push(Ems {
                            x: a as u32,
                            y: y0 as u32,
                            z,
                            w: (b + 1 - a) as u32,
                            d: m as u32,
                            h: dims.h - z,
                        });
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CandidateMode {
    /// The four base corners of every EMS the item fits in.
    #[default]
    EmsCorners,
    /// Every in-bounds position of the grid.
    FullGrid,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CandidateOptions {
    pub mode: CandidateMode,
    pub validate: ValidateOptions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub placement: Placement,
    /// Index into the EMS list the candidate came from; `None` in grid mode.
    pub ems_id: Option<usize>,
    pub stable: bool,
    pub result: ValidationResult,
}

/// Validated placement candidates for `item`, deduplicated by position.
pub fn enumerate_candidates(state: &BinState, item: &Item, opts: &CandidateOptions) -> Vec<Candidate> {
    match opts.mode {
        CandidateMode::EmsCorners => candidates_from_ems(state, item, &generate_ems(state), opts, false),
        CandidateMode::FullGrid => grid_candidates(state, item, opts, false),
    }
}

fn candidates_from_ems(state: &BinState, item: &Item, ems: &[Ems], opts: &CandidateOptions, first_stable: bool) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    let mut seen: Vec<(u32, u32)> = Vec::new();
    for (i, e) in ems.iter().enumerate().filter(|(_, e)| e.fits(item)) {
        let (x1, y1) = (e.x + e.w - item.w, e.y + e.d - item.d);
        for xy in [(e.x, e.y), (x1, e.y), (e.x, y1), (x1, y1)] {
            if seen.contains(&xy) {
                continue;
            }
            seen.push(xy);
            if let Some(c) = candidate_at(state, item, xy, Some(i), opts) {
                let stop = first_stable && c.stable;
                out.push(c);
                if stop {
                    return out;
                }
            }
        }
    }
    out
}

fn grid_candidates(state: &BinState, item: &Item, opts: &CandidateOptions, first_stable: bool) -> Vec<Candidate> {
    let dims = state.dims();
    let mut out = Vec::new();
    if !item.fits_in(&dims) {
        return out;
    }
    for y in 0..=dims.w - item.d {
        for x in 0..=dims.l - item.w {
            if let Some(c) = candidate_at(state, item, (x, y), None, opts) {
                let stop = first_stable && c.stable;
                out.push(c);
                if stop {
                    return out;
                }
            }
        }
    }
    out
}

fn candidate_at(state: &BinState, item: &Item, (x, y): (u32, u32), ems_id: Option<usize>, opts: &CandidateOptions) -> Option<Candidate> {
    let result = validate_with(state, item, x, y, &opts.validate).ok()?;
    Some(Candidate {
        placement: result.placement,
        ems_id,
        stable: result.valid,
        result,
    })
}

/// Whether `item` has at least one stable candidate.
pub fn has_stable_placement(state: &BinState, item: &Item, opts: &CandidateOptions) -> bool {
    match opts.mode {
        CandidateMode::EmsCorners => has_stable_in(state, item, &generate_ems(state), opts),
        CandidateMode::FullGrid => grid_candidates(state, item, opts, true).iter().any(|c| c.stable),
    }
}

fn has_stable_in(state: &BinState, item: &Item, ems: &[Ems], opts: &CandidateOptions) -> bool {
    candidates_from_ems(state, item, ems, opts, true).iter().any(|c| c.stable)
}

/// Order-preserving filter on the stability bit.
pub fn mask(candidates: Vec<Candidate>) -> Vec<Candidate> {
    candidates.into_iter().filter(|c| c.stable).collect()
}

/// External actor/critic. Returning `None` falls back to the built-in rule.
pub trait PolicyProvider {
    /// One score per candidate.
    fn scores(&mut self, _state: &BinState, _item: &Item, _candidates: &[Candidate]) -> Option<Vec<f64>> {
        None
    }

    /// Estimated value of `state` after `item` was handled.
    fn value(&mut self, _state: &BinState, _item: &Item) -> Option<f64> {
        None
    }
}

/// The built-in heuristics, with no overrides.
#[derive(Clone, Copy, Debug, Default)]
pub struct Heuristic;

impl PolicyProvider for Heuristic {}

impl<P: PolicyProvider + ?Sized> PolicyProvider for &mut P {
    fn scores(&mut self, state: &BinState, item: &Item, candidates: &[Candidate]) -> Option<Vec<f64>> {
        (**self).scores(state, item, candidates)
    }

    fn value(&mut self, state: &BinState, item: &Item) -> Option<f64> {
        (**self).value(state, item)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyDecision {
    pub chosen: usize,
    pub scores: Vec<f64>,
}

/// Built-in preference: lower z, then larger support area, then lower y, then lower x.
pub fn heuristic_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.placement
        .z
        .cmp(&b.placement.z)
        .then_with(|| b.result.support_polygon.area().cmp(&a.result.support_polygon.area()))
        .then_with(|| a.placement.y.cmp(&b.placement.y))
        .then_with(|| a.placement.x.cmp(&b.placement.x))
}

/// Built-in scores: stable candidates get `n, n-1, ..., 1` in preference
/// order, unstable ones `-inf`.
pub fn heuristic_scores(candidates: &[Candidate]) -> Vec<f64> {
    let mut stable: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].stable).collect();
    stable.sort_by(|&a, &b| heuristic_order(&candidates[a], &candidates[b]).then(a.cmp(&b)));
    let mut scores = alloc::vec![f64::NEG_INFINITY; candidates.len()];
    let n = stable.len();
    for (rank, &i) in stable.iter().enumerate() {
        scores[i] = (n - rank) as f64;
    }
    scores
}

/// Picks the best stable candidate. Provider scores replace the built-in ones
/// when they are well-formed; instability always wins over any score.
pub fn policy_select(
    state: &BinState,
    item: &Item,
    candidates: &[Candidate],
    provider: &mut dyn PolicyProvider,
) -> Result<PolicyDecision> {
    if !candidates.iter().any(|c| c.stable) {
        return Err(Error::EmptyCandidateSet);
    }
    let builtin = heuristic_scores(candidates);
    let mut scores = match provider.scores(state, item, candidates) {
        Some(s) if s.len() == candidates.len() => s,
        _ => builtin.clone(),
    };
    for (s, c) in scores.iter_mut().zip(candidates) {
        if !c.stable || s.is_nan() {
            *s = f64::NEG_INFINITY;
        }
    }
    // argmax over stable candidates; ties resolved by the built-in order
    let chosen = (0..candidates.len())
        .filter(|&i| candidates[i].stable)
        .max_by(|&a, &b| {
            scores[a]
                .partial_cmp(&scores[b])
                .unwrap_or(Ordering::Equal)
                .then_with(|| builtin[a].partial_cmp(&builtin[b]).unwrap_or(Ordering::Equal))
        })
        .ok_or(Error::EmptyCandidateSet)?;
    Ok(PolicyDecision { chosen, scores })
}

/// Probe items for the built-in critic: every `{2, 5}^3` combination.
pub const PROBE_DIMS: [(u32, u32, u32); 8] = [
    (2, 2, 2),
    (2, 2, 5),
    (2, 5, 2),
    (2, 5, 5),
    (5, 2, 2),
    (5, 2, 5),
    (5, 5, 2),
    (5, 5, 5),
];

/// Fraction of [`PROBE_DIMS`] that still has a stable placement.
pub fn probe_fraction(state: &BinState, opts: &CandidateOptions) -> f64 {
    let ems = match opts.mode {
        CandidateMode::EmsCorners => generate_ems(state),
        CandidateMode::FullGrid => Vec::new(),
    };
    let placeable = PROBE_DIMS
        .iter()
        .map(|&(w, d, h)| Item::new(u32::MAX, w, d, h))
        .filter(|probe| match opts.mode {
            CandidateMode::EmsCorners => has_stable_in(state, probe, &ems, opts),
            CandidateMode::FullGrid => has_stable_placement(state, probe, opts),
        })
        .count();
    placeable as f64 / PROBE_DIMS.len() as f64
}

/// Critic: provider value, else `utilization + 0.5 * probe_fraction`.
pub fn value_estimate(state: &BinState, item: &Item, opts: &CandidateOptions, provider: &mut dyn PolicyProvider) -> f64 {
    provider
        .value(state, item)
        .unwrap_or_else(|| state.utilization() + 0.5 * probe_fraction(state, opts))
}

/// An item with its policy placement and the critic value after packing it.
#[derive(Clone, Debug)]
pub struct RankedItem {
    pub item: Item,
    /// `None` when the item has no stable placement right now.
    pub choice: Option<Candidate>,
    pub value: f64,
}

/// Ranks `items` by the critic value of the state each would produce at its
/// policy placement. Items without a stable placement go last; ties are
/// broken by id, so the result does not depend on input order.
pub fn rank_items_detailed(
    state: &BinState,
    items: &[Item],
    opts: &CandidateOptions,
    provider: &mut dyn PolicyProvider,
) -> Vec<RankedItem> {
    let mut ranked: Vec<RankedItem> = items
        .iter()
        .map(|item| {
            let candidates = mask(enumerate_candidates(state, item, opts));
            match policy_select(state, item, &candidates, provider) {
                Ok(decision) => {
                    let choice = candidates[decision.chosen].clone();
                    let mut next = state.clone();
                    next.apply_pack(*item, choice.placement, choice.result.support_polygon.clone())
                        .expect("masked candidate must pack");
                    let value = value_estimate(&next, item, opts, provider);
                    RankedItem { item: *item, choice: Some(choice), value }
                }
                Err(_) => RankedItem { item: *item, choice: None, value: f64::NEG_INFINITY },
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.choice
            .is_some()
            .cmp(&a.choice.is_some())
            .then_with(|| b.value.partial_cmp(&a.value).unwrap_or(Ordering::Equal))
            .then_with(|| a.item.id.cmp(&b.item.id))
    });
    ranked
}

pub fn rank_items(state: &BinState, items: &[Item], opts: &CandidateOptions, provider: &mut dyn PolicyProvider) -> Vec<ItemId> {
    rank_items_detailed(state, items, opts, provider)
        .into_iter()
        .map(|r| r.item.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binstate::BinDims;
    use crate::stability::validate;

    fn bin(l: u32, w: u32, h: u32) -> BinState {
        BinState::new(BinDims::new(l, w, h), 0.1).unwrap()
    }

    fn pack(state: &mut BinState, item: Item, x: u32, y: u32) {
        let v = validate(state, &item, x, y).unwrap();
        assert!(v.valid);
        state.apply_pack(item, v.placement, v.support_polygon).unwrap();
    }

    #[test]
    fn empty_bin_single_ems() {
        assert_eq!(generate_ems(&bin(10, 10, 10)), [Ems { x: 0, y: 0, z: 0, w: 10, d: 10, h: 10 }]);
    }

    #[test]
    fn corner_item_ems() {
        let mut s = bin(10, 10, 10);
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        let ems = generate_ems(&s);
        assert_eq!(
            ems,
            [
                Ems { x: 0, y: 0, z: 4, w: 10, d: 10, h: 6 },
                Ems { x: 0, y: 4, z: 0, w: 10, d: 6, h: 10 },
                Ems { x: 4, y: 0, z: 0, w: 6, d: 10, h: 10 },
            ]
        );
    }

    #[test]
    fn full_bin_no_ems() {
        let mut s = bin(10, 10, 10);
        pack(&mut s, Item::new(1, 10, 10, 10), 0, 0);
        assert!(generate_ems(&s).is_empty());
    }

    #[test]
    fn empty_bin_four_corners() {
        let s = bin(10, 10, 10);
        let c = enumerate_candidates(&s, &Item::new(1, 4, 4, 4), &CandidateOptions::default());
        let xy: Vec<_> = c.iter().map(|c| (c.placement.x, c.placement.y, c.placement.z)).collect();
        assert_eq!(xy, [(0, 0, 0), (6, 0, 0), (0, 6, 0), (6, 6, 0)]);
        assert!(c.iter().all(|c| c.stable));
    }

    #[test]
    fn oversized_item_has_no_candidates() {
        let s = bin(10, 10, 10);
        let opts = CandidateOptions::default();
        assert!(enumerate_candidates(&s, &Item::new(1, 11, 4, 4), &opts).is_empty());
        let grid = CandidateOptions { mode: CandidateMode::FullGrid, ..Default::default() };
        assert!(enumerate_candidates(&s, &Item::new(1, 4, 4, 11), &grid).is_empty());
    }

    #[test]
    fn unstable_candidate_over_void() {
        // a narrow top leaves EMS corners where the item would overhang
        let mut s = bin(6, 4, 10);
        pack(&mut s, Item::new(1, 4, 4, 3), 0, 0);
        let c = enumerate_candidates(&s, &Item::new(2, 4, 4, 2), &CandidateOptions::default());
        assert!(c.iter().any(|c| !c.stable));
        assert!(c.iter().any(|c| c.stable));
        let masked = mask(c.clone());
        assert!(masked.iter().all(|c| c.stable));
        assert_eq!(masked.len(), c.iter().filter(|c| c.stable).count());
    }

    #[test]
    fn mask_identity_and_empty() {
        let s = bin(10, 10, 10);
        let c = enumerate_candidates(&s, &Item::new(1, 4, 4, 4), &CandidateOptions::default());
        assert_eq!(mask(c.clone()), c);
        let mut none = c;
        none.iter_mut().for_each(|c| c.stable = false);
        assert!(mask(none).is_empty());
    }

    #[test]
    fn deepest_first_then_bottom_left() {
        let mut s = bin(10, 10, 10);
        pack(&mut s, Item::new(1, 4, 4, 4), 0, 0);
        let it = Item::new(2, 4, 4, 2);
        let c = mask(enumerate_candidates(&s, &it, &CandidateOptions::default()));
        let d = policy_select(&s, &it, &c, &mut Heuristic).unwrap();
        let p = c[d.chosen].placement;
        assert_eq!(p.z, 0);
        assert_eq!((p.y, p.x), (0, 4));
    }

    struct Reversed;
    impl PolicyProvider for Reversed {
        fn scores(&mut self, _: &BinState, _: &Item, c: &[Candidate]) -> Option<Vec<f64>> {
            Some((0..c.len()).map(|i| i as f64).collect())
        }
    }

    #[test]
    fn provider_scores_override_but_never_unmask() {
        let s = bin(10, 10, 10);
        let it = Item::new(1, 4, 4, 4);
        let mut c = enumerate_candidates(&s, &it, &CandidateOptions::default());
        assert_eq!(policy_select(&s, &it, &c, &mut Reversed).unwrap().chosen, 3);
        c[3].stable = false;
        let d = policy_select(&s, &it, &c, &mut Reversed).unwrap();
        assert_eq!(d.chosen, 2);
        assert_eq!(d.scores[3], f64::NEG_INFINITY);
        c.iter_mut().for_each(|c| c.stable = false);
        assert_eq!(policy_select(&s, &it, &c, &mut Reversed), Err(Error::EmptyCandidateSet));
    }

    #[test]
    fn critic_defaults() {
        let opts = CandidateOptions::default();
        assert_eq!(value_estimate(&bin(10, 10, 10), &Item::new(1, 2, 2, 2), &opts, &mut Heuristic), 0.5);
        let mut full = bin(10, 10, 10);
        pack(&mut full, Item::new(1, 10, 10, 10), 0, 0);
        assert_eq!(value_estimate(&full, &Item::new(1, 2, 2, 2), &opts, &mut Heuristic), 1.0);
    }

    #[test]
    fn ranking_puts_unplaceable_last() {
        let s = bin(10, 10, 10);
        let items = [Item::new(7, 11, 1, 1), Item::new(3, 2, 2, 2)];
        let opts = CandidateOptions::default();
        assert_eq!(rank_items(&s, &items, &opts, &mut Heuristic), [ItemId(3), ItemId(7)]);
        assert_eq!(rank_items(&s, &items[1..], &opts, &mut Heuristic), [ItemId(3)]);
    }
}
