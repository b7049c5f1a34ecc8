//! Episode execution with and without rearrangement.

use std::time::Instant;

use lbcp_core::placement::{enumerate_candidates, mask, policy_select, PolicyProvider};
use lbcp_core::srp::{execute_plan, plan};
use lbcp_core::stability::validate_placement;
use lbcp_core::{BinDims, BinState, Item, SrpConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Mode {
    #[default]
    #[serde(rename = "no_srp")]
    #[value(name = "no_srp")]
    NoSrp,
    #[serde(rename = "srp")]
    #[value(name = "srp")]
    Srp,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::NoSrp => "no_srp",
            Mode::Srp => "srp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeConfig {
    pub dims: BinDims,
    pub delta_cog: f64,
    pub mode: Mode,
    pub srp: SrpConfig,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self { dims: BinDims::new(10, 10, 10), delta_cog: 0.1, mode: Mode::NoSrp, srp: SrpConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub episode: usize,
    pub seed: u64,
    pub mode: Mode,
    pub utilization: f64,
    pub items_packed: usize,
    pub items_seen: usize,
    pub operations: usize,
    pub srp_invocations: usize,
    /// One flag per SRP invocation.
    pub srp_success: Vec<bool>,
    /// Utilization at each SRP invocation, aligned with `srp_success`.
    pub srp_start_utilization: Vec<f64>,
    pub plan_raw_lens: Vec<usize>,
    pub plan_refined_lens: Vec<usize>,
    /// Wall time of each candidate-set validation, in nanoseconds.
    pub validation_ns: Vec<u64>,
    /// Executed placements whose re-validation failed. Always zero unless
    /// something is broken.
    pub revalidation_failures: usize,
    pub final_state: BinState,
}

/// Packs `stream` in order. With [`Mode::NoSrp`] the episode ends at the first
/// item without a stable placement; with [`Mode::Srp`] a rearrangement is
/// planned and executed instead, and the episode ends when planning fails or
/// the bin reaches the target utilization.
pub fn run_episode(
    stream: &[Item],
    cfg: &EpisodeConfig,
    seed: u64,
    provider: &mut dyn PolicyProvider,
) -> anyhow::Result<EpisodeReport> {
    let mut state = BinState::new(cfg.dims, cfg.delta_cog)?;
    let opts = cfg.srp.candidates;
    let mut report = EpisodeReport {
        episode: 0,
        seed,
        mode: cfg.mode,
        utilization: 0.0,
        items_packed: 0,
        items_seen: 0,
        operations: 0,
        srp_invocations: 0,
        srp_success: Vec::new(),
        srp_start_utilization: Vec::new(),
        plan_raw_lens: Vec::new(),
        plan_refined_lens: Vec::new(),
        validation_ns: Vec::new(),
        revalidation_failures: 0,
        final_state: state.clone(),
    };

    for (k, item) in stream.iter().enumerate() {
        report.items_seen += 1;
        let t0 = Instant::now();
        let candidates = mask(enumerate_candidates(&state, item, &opts));
        report.validation_ns.push(t0.elapsed().as_nanos() as u64);

        if !candidates.is_empty() {
            let d = policy_select(&state, item, &candidates, provider)?;
            let c = &candidates[d.chosen];
            match validate_placement(&state, item, c.placement) {
                Ok(v) if v.valid => {}
                _ => report.revalidation_failures += 1,
            }
            state.apply_pack(*item, c.placement, c.result.support_polygon.clone())?;
            report.operations += 1;
            continue;
        }
        if cfg.mode == Mode::NoSrp {
            break;
        }

        report.srp_invocations += 1;
        report.srp_start_utilization.push(state.utilization());
        let seed_k = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        match plan(&state, item, &cfg.srp, seed_k, provider) {
            Ok(p) => {
                report.srp_success.push(true);
                report.plan_raw_lens.push(p.raw_len);
                report.plan_refined_lens.push(p.len());
                match execute_plan(&state, &p.operations, &opts) {
                    Ok(next) => state = next,
                    Err(e) => {
                        report.revalidation_failures += 1;
                        anyhow::bail!("plan for item {} failed to execute: {e}", item.id);
                    }
                }
                report.operations += p.len();
                if state.utilization() >= cfg.srp.t_uti {
                    break;
                }
            }
            Err(_) => {
                report.srp_success.push(false);
                break;
            }
        }
    }

    let rebuilt = state.rebuilt()?;
    anyhow::ensure!(rebuilt == state, "incremental state diverged from its rebuild");
    report.utilization = state.utilization();
    report.items_packed = state.packed().len();
    report.final_state = state;
    Ok(report)
}

/// Runs `streams` in parallel; the result depends only on the inputs.
pub fn run_batch<P, F>(streams: &[Vec<Item>], cfg: &EpisodeConfig, base_seed: u64, make_provider: F) -> anyhow::Result<Vec<EpisodeReport>>
where
    P: PolicyProvider,
    F: Fn(usize) -> anyhow::Result<P> + Sync,
{
    streams
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut provider = make_provider(i)?;
            let mut r = run_episode(s, cfg, base_seed.wrapping_add(i as u64), &mut provider)?;
            r.episode = i;
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lbcp_core::placement::Heuristic;

    #[test]
    fn filling_stream_reaches_full() {
        let stream: Vec<Item> = (0..8).map(|i| Item::new(i + 1, 5, 5, 5)).collect();
        let r = run_episode(&stream, &EpisodeConfig::default(), 0, &mut Heuristic).unwrap();
        assert_eq!(r.utilization, 1.0);
        assert_eq!(r.srp_invocations, 0);
        assert_eq!(r.operations, 8);
    }

    #[test]
    fn no_srp_stops_at_first_dead_end() {
        let stream = [Item::new(1, 10, 10, 8), Item::new(2, 5, 5, 5), Item::new(3, 2, 2, 2)];
        let r = run_episode(&stream, &EpisodeConfig::default(), 0, &mut Heuristic).unwrap();
        assert_eq!((r.items_packed, r.items_seen), (1, 2));
    }

    #[test]
    fn srp_counts_operations() {
        let stream = [Item::new(1, 10, 10, 4), Item::new(2, 2, 2, 2), Item::new(3, 10, 10, 6)];
        let cfg = EpisodeConfig { mode: Mode::Srp, ..Default::default() };
        let r = run_episode(&stream, &cfg, 0, &mut Heuristic).unwrap();
        assert_eq!(r.srp_invocations, 1);
        assert!(r.srp_success[0]);
        assert!(r.final_state.contains(lbcp_core::ItemId(3)));
        assert!(r.operations >= r.items_packed);
        assert_eq!(r.revalidation_failures, 0);
    }
}
