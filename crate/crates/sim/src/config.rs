//! Run configuration: a TOML or JSON file, overridden by command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use lbcp_core::placement::{CandidateMode, CandidateOptions};
use lbcp_core::{BinDims, SrpConfig, ValidateOptions};
use serde::{Deserialize, Serialize};

use crate::episode::{EpisodeConfig, Mode};
use crate::report::Format;
use crate::stream::{Sampling, StreamKind, StreamSpec};

/// `LxWxH`, e.g. `10x10x10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BinArg(pub BinDims);

impl FromStr for BinArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        let [l, w, h] = parts[..] else {
            return Err(format!("bin `{s}` is not LxWxH"));
        };
        let n = |p: &str| p.trim().parse::<u32>().map_err(|e| format!("bin `{s}`: {e}"));
        let dims = BinDims::new(n(l)?, n(w)?, n(h)?);
        if dims.l == 0 || dims.w == 0 || dims.h == 0 {
            return Err(format!("bin `{s}` has a zero extent"));
        }
        Ok(Self(dims))
    }
}

impl TryFrom<String> for BinArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<BinArg> for String {
    fn from(b: BinArg) -> String {
        format!("{}x{}x{}", b.0.l, b.0.w, b.0.h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bin: BinArg,
    pub delta_cog: f64,
    pub episodes: usize,
    pub seq_len: usize,
    pub seed: u64,
    pub mode: Mode,
    pub t_uti: f64,
    pub max_nodes: usize,
    pub max_branch: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub w_v: f64,
    pub staging_capacity: usize,
    /// `builtin` or `bridge:HOST:PORT`.
    pub policy: String,
    pub bridge_timeout_ms: u64,
    pub out: PathBuf,
    pub format: Format,
    pub stream: StreamKind,
    pub sampling: Sampling,
    pub dim_min: u32,
    pub dim_max: u32,
    pub same_height: u32,
    pub robust_shrink: u32,
    /// Bin used by the validation benchmark.
    pub bench_bin: BinArg,
    pub bench_every: usize,
    pub bench_comparator_stride: usize,
}

impl Default for Config {
    fn default() -> Self {
        let srp = SrpConfig::default();
        Self {
            bin: BinArg(BinDims::new(10, 10, 10)),
            delta_cog: 0.1,
            episodes: 100,
            seq_len: 100,
            seed: 0,
            mode: Mode::NoSrp,
            t_uti: srp.t_uti,
            max_nodes: srp.max_nodes,
            max_branch: srp.max_branch,
            max_depth: srp.max_depth,
            eta: srp.eta,
            w_v: srp.w_v,
            staging_capacity: srp.staging_capacity,
            policy: "builtin".into(),
            bridge_timeout_ms: 2000,
            out: PathBuf::from("out"),
            format: Format::Csv,
            stream: StreamKind::Rs,
            sampling: Sampling::Block,
            dim_min: 2,
            dim_max: 5,
            same_height: 2,
            robust_shrink: 0,
            bench_bin: BinArg(BinDims::new(20, 20, 20)),
            bench_every: 3,
            bench_comparator_stride: 1,
        }
    }
}

impl Config {
    /// Reads `.json` as JSON and anything else as TOML.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)?
        };
        Ok(cfg)
    }

    pub fn srp(&self) -> SrpConfig {
        SrpConfig {
            max_nodes: self.max_nodes,
            max_branch: self.max_branch,
            max_depth: self.max_depth,
            eta: self.eta,
            w_v: self.w_v,
            t_uti: self.t_uti,
            staging_capacity: self.staging_capacity,
            candidates: CandidateOptions {
                mode: CandidateMode::EmsCorners,
                validate: ValidateOptions { robust_shrink: self.robust_shrink, contact_tolerance: 0 },
            },
        }
    }

    pub fn episode(&self, mode: Mode) -> EpisodeConfig {
        EpisodeConfig { dims: self.bin.0, delta_cog: self.delta_cog, mode, srp: self.srp() }
    }

    pub fn stream_spec(&self) -> StreamSpec {
        StreamSpec {
            kind: self.stream,
            dims: self.bin.0,
            seq_len: self.seq_len,
            count: self.episodes,
            seed: self.seed,
            delta_cog: self.delta_cog,
            dim_min: self.dim_min,
            dim_max: self.dim_max,
            same_height: self.same_height,
            sampling: self.sampling,
        }
    }

    pub fn check(&self) -> anyhow::Result<()> {
        lbcp_core::DeltaCog::from_f64(self.delta_cog)?;
        self.srp().check()?;
        anyhow::ensure!(self.dim_min >= 1 && self.dim_min <= self.dim_max, "item dimension range is empty");
        crate::bridge::parse_policy(&self.policy).map_err(anyhow::Error::msg)?;
        Ok(())
    }
}
