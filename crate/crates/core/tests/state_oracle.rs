//! Incremental state updates against a from-scratch rebuild.

mod common;

use lbcp_core::placement::{enumerate_candidates, mask, CandidateMode, CandidateOptions};
use lbcp_core::srp::unpackable_items;
use lbcp_core::stability::{geometric_support_polygon, support_polygon_clipped, support_polygon_from_lbcps, validate};
use lbcp_core::{BinDims, BinState, Item, Rect2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_consistent(s: &BinState) {
    let r = s.rebuilt().expect("incremental state must replay");
    assert_eq!(&r, s);
}

/// Random packs with occasional unpacks; the state must equal its rebuild
/// after every step.
fn run(seed: u64, delta: f64, steps: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = BinState::new(BinDims::new(10, 10, 10), delta).unwrap();
    let opts = CandidateOptions { mode: CandidateMode::FullGrid, ..Default::default() };
    let mut next_id = 1;
    for _ in 0..steps {
        if !s.packed().is_empty() && rng.random_bool(0.25) {
            let free = unpackable_items(&s);
            let id = free[rng.random_range(0..free.len())];
            s.apply_unpack(id).unwrap();
        } else {
            let item = common::rs_item(&mut rng, next_id);
            next_id += 1;
            let c = mask(enumerate_candidates(&s, &item, &opts));
            if c.is_empty() {
                continue;
            }
            let pick = &c[rng.random_range(0..c.len())];
            s.apply_pack(item, pick.placement, pick.result.support_polygon.clone()).unwrap();
        }
        check_consistent(&s);
    }
}

#[test]
fn seeded_episodes_match_rebuild() {
    for seed in 0..40 {
        run(seed, 0.1, 40);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_equals_rebuild(seed in any::<u64>(), delta in 0.0f64..0.49) {
        run(seed, delta, 30);
    }

    #[test]
    fn cell_polygon_matches_lbcp_form(seed in any::<u64>(), w in 1u32..=5, d in 1u32..=5, x in 0u32..10, y in 0u32..10) {
        let s = common::random_stable_bin(seed, BinDims::new(10, 10, 10), 0.1, 12);
        prop_assume!(x + w <= 10 && y + d <= 10);
        let item = Item::new(999, w, d, 1);
        let r = Rect2::new(x.into(), y.into(), w.into(), d.into());
        let v = match validate(&s, &item, x, y) { Ok(v) => v, Err(_) => return Ok(()) };
        let hs = v.support_height;
        let oracle = support_polygon_from_lbcps(s.lbcps(), &r, hs);
        prop_assert_eq!(&v.support_polygon, &oracle);
        prop_assert!(support_polygon_clipped(s.lbcps(), &r, hs).contains_polygon(&v.support_polygon));
        prop_assert!(geometric_support_polygon(&s, &r, hs).contains_polygon(&v.support_polygon));
    }

    #[test]
    fn larger_uncertainty_never_accepts_more(seed in any::<u64>(), w in 1u32..=5, d in 1u32..=5, x in 0u32..10, y in 0u32..10, lo in 0.0f64..0.49, hi in 0.0f64..0.49) {
        prop_assume!(x + w <= 10 && y + d <= 10);
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let base = common::random_stable_bin(seed, BinDims::new(10, 10, 10), 0.0, 12);
        let items = base.packed().to_vec();
        let a = BinState::rebuild(&items, base.dims(), lbcp_core::DeltaCog::from_f64(lo).unwrap());
        let b = BinState::rebuild(&items, base.dims(), lbcp_core::DeltaCog::from_f64(hi).unwrap());
        // a history valid under the larger ratio is valid under the smaller one
        if b.is_ok() {
            prop_assert!(a.is_ok());
        }
        if let (Ok(a), Ok(b)) = (a, b) {
            let item = Item::new(999, w, d, 1);
            if let (Ok(va), Ok(vb)) = (validate(&a, &item, x, y), validate(&b, &item, x, y)) {
                prop_assert!(!vb.valid || va.valid);
            }
        }
    }
}
