//! Seeded item streams.

use std::io::{BufRead, Write};

use lbcp_core::{BinDims, Item, ItemId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum StreamKind {
    #[default]
    Rs,
    RsSameHeight,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Each run of `family size` items is a shuffled copy of the family.
    #[default]
    Block,
    Iid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StreamSpec {
    pub kind: StreamKind,
    pub dims: BinDims,
    pub seq_len: usize,
    pub count: usize,
    pub seed: u64,
    pub delta_cog: f64,
    /// Inclusive range for every item dimension.
    pub dim_min: u32,
    pub dim_max: u32,
    /// Height used by the same-height variant.
    pub same_height: u32,
    pub sampling: Sampling,
}

impl Default for StreamSpec {
    fn default() -> Self {
        Self {
            kind: StreamKind::Rs,
            dims: BinDims::new(10, 10, 10),
            seq_len: 100,
            count: 1,
            seed: 0,
            delta_cog: 0.1,
            dim_min: 2,
            dim_max: 5,
            same_height: 2,
            sampling: Sampling::Block,
        }
    }
}

impl StreamSpec {
    /// Size classes `(w, d, h)` the stream draws from.
    pub fn family(&self) -> Vec<(u32, u32, u32)> {
        let r = self.dim_min..=self.dim_max;
        let mut out = Vec::new();
        for w in r.clone() {
            for d in r.clone() {
                match self.kind {
                    StreamKind::Rs => out.extend(r.clone().map(|h| (w, d, h))),
                    StreamKind::RsSameHeight => out.push((w, d, self.same_height)),
                }
            }
        }
        out
    }

    /// Seed of stream `index`.
    pub fn stream_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)
    }
}

/// Stream `index` of `spec`; ids are `1..=seq_len`.
pub fn gen_stream(spec: &StreamSpec, index: usize) -> Vec<Item> {
    let family = spec.family();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.stream_seed(index));
    let mut out = Vec::with_capacity(spec.seq_len);
    let mut block: Vec<(u32, u32, u32)> = Vec::new();
    for k in 0..spec.seq_len {
        let (w, d, h) = match spec.sampling {
            Sampling::Iid => family[rng.random_range(0..family.len())],
            Sampling::Block => {
                if block.is_empty() {
                    block = family.clone();
                    block.shuffle(&mut rng);
                }
                block.pop().expect("family is not empty")
            }
        };
        out.push(Item::new(k as u32 + 1, w, d, h));
    }
    out
}

pub fn gen_streams(spec: &StreamSpec) -> Vec<Vec<Item>> {
    (0..spec.count).map(|i| gen_stream(spec, i)).collect()
}

#[derive(Serialize, Deserialize)]
struct Line {
    id: ItemId,
    w: u32,
    d: u32,
    h: u32,
}

/// One `{id, w, d, h}` object per line.
pub fn write_jsonl(mut out: impl Write, items: &[Item]) -> std::io::Result<()> {
    for i in items {
        serde_json::to_writer(&mut out, &Line { id: i.id, w: i.w, d: i.d, h: i.h })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(input: impl BufRead) -> anyhow::Result<Vec<Item>> {
    let mut items = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let l: Line = serde_json::from_str(&line).map_err(|e| anyhow::anyhow!("line {}: {e}", n + 1))?;
        items.push(Item { id: l.id, w: l.w, d: l.d, h: l.h });
    }
    Ok(items)
}
