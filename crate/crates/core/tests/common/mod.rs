#![allow(dead_code)]

use lbcp_core::placement::{enumerate_candidates, mask, CandidateMode, CandidateOptions};
use lbcp_core::{BinDims, BinState, Item};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rs_item(rng: &mut impl Rng, id: u32) -> Item {
    Item::new(id, rng.random_range(2..=5), rng.random_range(2..=5), rng.random_range(2..=5))
}

/// Packs items at uniformly random stable grid positions until one does not fit.
pub fn random_stable_bin(seed: u64, dims: BinDims, delta: f64, max_items: usize) -> BinState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = BinState::new(dims, delta).unwrap();
    let opts = CandidateOptions { mode: CandidateMode::FullGrid, ..Default::default() };
    for id in 1..=max_items as u32 {
        let item = rs_item(&mut rng, id);
        let c = mask(enumerate_candidates(&s, &item, &opts));
        if c.is_empty() {
            break;
        }
        let pick = &c[rng.random_range(0..c.len())];
        s.apply_pack(item, pick.placement, pick.result.support_polygon.clone()).unwrap();
    }
    s
}
