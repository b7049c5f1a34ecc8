//! Conformance fixtures: recorded built-in policy decisions that an external
//! provider must reproduce.

use std::io::Write;

use lbcp_core::binstate::BinSnapshot;
use lbcp_core::placement::{enumerate_candidates, heuristic_scores, policy_select, CandidateOptions, Heuristic};
use lbcp_core::{BinDims, BinState, Item};
use serde::{Deserialize, Serialize};

use crate::bridge::WireCandidate;
use crate::stream::{gen_stream, StreamSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub state: BinSnapshot,
    pub item: Item,
    pub candidates: Vec<WireCandidate>,
    pub scores: Vec<f64>,
    pub chosen: usize,
}

/// One fixture per placement decision of built-in episodes over `spec`'s streams.
pub fn collect_fixtures(spec: &StreamSpec) -> anyhow::Result<Vec<Fixture>> {
    let opts = CandidateOptions::default();
    let mut out = Vec::new();
    for s in 0..spec.count {
        let mut state = BinState::new(spec.dims, spec.delta_cog)?;
        for item in gen_stream(spec, s) {
            let all = enumerate_candidates(&state, &item, &opts);
            let Ok(d) = policy_select(&state, &item, &all, &mut Heuristic) else { break };
            out.push(Fixture {
                state: (&state).into(),
                item,
                candidates: all.iter().map(WireCandidate::from).collect(),
                scores: heuristic_scores(&all),
                chosen: d.chosen,
            });
            let c = &all[d.chosen];
            state.apply_pack(item, c.placement, c.result.support_polygon.clone())?;
        }
    }
    Ok(out)
}

pub fn write_fixtures(mut out: impl Write, fixtures: &[Fixture]) -> anyhow::Result<()> {
    for f in fixtures {
        serde_json::to_writer(&mut out, f)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn default_spec() -> StreamSpec {
    StreamSpec { dims: BinDims::new(10, 10, 10), seq_len: 40, count: 10, ..Default::default() }
}
