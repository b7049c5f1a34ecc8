//! Validation timing under random stable packing.
//!
//! Two ways of validating the full candidate set are timed side by side:
//! the incremental path reads the maintained heightmap and feasibility map,
//! while the rebuild comparator rebuilds the whole state from the pack
//! history for every candidate.

use std::time::Instant;

use lbcp_core::placement::{enumerate_candidates, mask, CandidateMode, CandidateOptions};
use lbcp_core::stability::validate;
use lbcp_core::{BinDims, BinState, DeltaCog, Item, PackedItem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::stream::{gen_stream, StreamSpec};

/// Lower edges of the packed-count buckets.
pub const BUCKET_EDGES: [usize; 5] = [0, 4, 10, 20, 30];

pub fn bucket_of(packed: usize) -> usize {
    BUCKET_EDGES.iter().rposition(|&e| packed >= e).unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub bucket: usize,
    pub min_packed: usize,
    /// Exclusive upper edge; `None` for the last bucket.
    pub max_packed: Option<usize>,
    pub samples: usize,
    pub comparator_samples: usize,
    pub incremental_mean_ns: f64,
    pub rebuild_mean_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub spec: StreamSpec,
    pub rows: Vec<BucketRow>,
}

impl BenchTable {
    pub fn first(&self) -> Option<&BucketRow> {
        self.rows.iter().find(|r| r.samples > 0)
    }

    pub fn last(&self) -> Option<&BucketRow> {
        self.rows.iter().rev().find(|r| r.samples > 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchOptions {
    /// Time the candidate set every `every` iterations.
    pub every: usize,
    /// Also time the rebuild comparator.
    pub comparator: bool,
    /// Time the comparator on every `comparator_stride`-th sequence only.
    pub comparator_stride: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { every: 3, comparator: true, comparator_stride: 1 }
    }
}

/// Stability of every grid position for `item` as a validator without any
/// maintained state would compute it: each query replays the pack history
/// from scratch and validates against the result. Returns the number of
/// stable positions.
pub fn rebuild_validate(history: &[PackedItem], dims: BinDims, delta: DeltaCog, item: &Item) -> usize {
    let mut stable = 0;
    for y in 0..=dims.w.saturating_sub(item.d) {
        for x in 0..=dims.l.saturating_sub(item.w) {
            let Ok(replayed) = BinState::rebuild(history, dims, delta) else {
                return 0;
            };
            if validate(&replayed, item, x, y).is_ok_and(|v| v.valid) {
                stable += 1;
            }
        }
    }
    stable
}

/// Runs `spec.count` random-stable packing sequences and buckets the timings
/// by the number of items in the bin.
pub fn bench_validation(spec: &StreamSpec, opts: &BenchOptions) -> anyhow::Result<BenchTable> {
    let grid = CandidateOptions { mode: CandidateMode::FullGrid, ..Default::default() };
    let n = BUCKET_EDGES.len();
    let mut inc = vec![(0u128, 0usize); n];
    let mut reb = vec![(0u128, 0usize); n];
    let every = opts.every.max(1);

    for s in 0..spec.count {
        let stream = gen_stream(spec, s);
        let mut state = BinState::new(spec.dims, spec.delta_cog)?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.stream_seed(s) ^ 0x5eed);
        for (k, item) in stream.iter().enumerate() {
            let sample = k % every == 0;
            let b = bucket_of(state.packed().len());

            let t0 = Instant::now();
            let candidates = mask(enumerate_candidates(&state, item, &grid));
            let dt = t0.elapsed().as_nanos();
            if sample {
                inc[b].0 += dt;
                inc[b].1 += 1;
                if opts.comparator && s % opts.comparator_stride.max(1) == 0 {
                    let t1 = Instant::now();
                    let stable = rebuild_validate(state.packed(), spec.dims, state.delta_cog(), item);
                    reb[b].0 += t1.elapsed().as_nanos();
                    reb[b].1 += 1;
                    anyhow::ensure!(stable == candidates.len(), "comparator disagrees with the incremental path");
                }
            }
            if candidates.is_empty() {
                continue;
            }
            let pick = &candidates[rng.random_range(0..candidates.len())];
            state.apply_pack(*item, pick.placement, pick.result.support_polygon.clone())?;
        }
    }

    let mean = |(t, c): (u128, usize)| if c == 0 { 0.0 } else { t as f64 / c as f64 };
    let rows = (0..n)
        .map(|b| BucketRow {
            bucket: b,
            min_packed: BUCKET_EDGES[b],
            max_packed: BUCKET_EDGES.get(b + 1).copied(),
            samples: inc[b].1,
            comparator_samples: reb[b].1,
            incremental_mean_ns: mean(inc[b]),
            rebuild_mean_ns: mean(reb[b]),
        })
        .collect();
    Ok(BenchTable { spec: *spec, rows })
}
