use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lbcp_core::placement::Heuristic;
use lbcp_core::Item;
use lbcp_sim::bench::{bench_validation, BenchOptions};
use lbcp_sim::bridge::{parse_policy, BridgeProvider};
use lbcp_sim::config::{BinArg, Config};
use lbcp_sim::episode::{run_batch, EpisodeReport, Mode};
use lbcp_sim::report::{export_bench, export_report, Format};
use lbcp_sim::stats::{mean, paired_t_test};
use lbcp_sim::stream::{gen_streams, read_jsonl, write_jsonl, Sampling, StreamKind};
use lbcp_sim::suite::success_buckets;
use lbcp_sim::fixtures;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lbcp", version, about = "Stable online 3D bin packing simulator")]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run episodes in one mode and export per-episode reports.
    Pack {
        /// Read the item stream from a JSON-lines file instead of generating one.
        #[arg(long)]
        stream_file: Option<PathBuf>,
    },
    /// Run paired episodes with and without rearrangement and compare them.
    SrpEval,
    /// Time full candidate-set validation against the rebuild comparator.
    BenchSsv {
        /// Skip the rebuild comparator.
        #[arg(long)]
        no_comparator: bool,
    },
    /// Write item streams as JSON lines.
    GenStream,
    /// Export built-in policy decisions for external conformance checks.
    Fixtures,
}

#[derive(Args)]
struct Overrides {
    /// TOML or JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    bin: Option<BinArg>,
    #[arg(long, global = true)]
    delta_cog: Option<f64>,
    #[arg(long, global = true)]
    episodes: Option<usize>,
    #[arg(long, global = true)]
    seq_len: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[arg(long, global = true)]
    t_uti: Option<f64>,
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    /// `builtin` or `bridge:HOST:PORT`.
    #[arg(long, global = true)]
    policy: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    stream: Option<StreamKind>,
    #[arg(long, global = true, value_enum)]
    sampling: Option<Sampling>,
}

impl Overrides {
    fn resolve(&self) -> anyhow::Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => Config::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f.clone() { c.$f = v; } )* };
        }
        set!(bin, delta_cog, episodes, seq_len, seed, mode, t_uti, max_nodes, policy, out, format, stream, sampling);
        c.check()?;
        Ok(c)
    }
}

enum Provider {
    Builtin(Heuristic),
    Bridge(BridgeProvider),
}

impl lbcp_core::PolicyProvider for Provider {
    fn scores(&mut self, s: &lbcp_core::BinState, i: &Item, c: &[lbcp_core::Candidate]) -> Option<Vec<f64>> {
        match self {
            Provider::Builtin(h) => h.scores(s, i, c),
            Provider::Bridge(b) => b.scores(s, i, c),
        }
    }

    fn value(&mut self, s: &lbcp_core::BinState, i: &Item) -> Option<f64> {
        match self {
            Provider::Builtin(h) => h.value(s, i),
            Provider::Bridge(b) => b.value(s, i),
        }
    }
}

fn run(cfg: &Config, streams: &[Vec<Item>], mode: Mode) -> anyhow::Result<Vec<EpisodeReport>> {
    let addr = parse_policy(&cfg.policy).map_err(anyhow::Error::msg)?;
    let timeout = Duration::from_millis(cfg.bridge_timeout_ms);
    run_batch(streams, &cfg.episode(mode), cfg.seed, |_| match &addr {
        None => Ok(Provider::Builtin(Heuristic)),
        Some(a) => Ok(Provider::Bridge(
            BridgeProvider::connect(a.as_str(), timeout).with_context(|| format!("connecting to bridge {a}"))?,
        )),
    })
}

#[derive(Serialize)]
struct SrpSummary {
    schema_version: u32,
    episodes: usize,
    mean_utilization_no_srp: f64,
    mean_utilization_srp: f64,
    mean_difference: f64,
    t: f64,
    p_value: f64,
    srp_invocations: usize,
    srp_successes: usize,
    mean_raw_plan_len: f64,
    mean_refined_plan_len: f64,
    success_by_utilization: Vec<lbcp_sim::suite::SuccessBucket>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let cfg = cli.opts.resolve()?;
    match cli.cmd {
        Cmd::Pack { stream_file } => {
            let streams = match stream_file {
                Some(p) => vec![read_jsonl(BufReader::new(File::open(&p)?))?],
                None => gen_streams(&cfg.stream_spec()),
            };
            let reports = run(&cfg, &streams, cfg.mode)?;
            let path = export_report(&cfg.out, &reports, cfg.format)?;
            let u: Vec<f64> = reports.iter().map(|r| r.utilization).collect();
            println!("{} episodes, mean utilization {:.4} -> {}", reports.len(), mean(&u), path.display());
        }
        Cmd::SrpEval => {
            let streams = gen_streams(&cfg.stream_spec());
            let base = run(&cfg, &streams, Mode::NoSrp)?;
            let srp = run(&cfg, &streams, Mode::Srp)?;
            export_report(&cfg.out.join("no_srp"), &base, cfg.format)?;
            export_report(&cfg.out.join("srp"), &srp, cfg.format)?;
            let ub: Vec<f64> = base.iter().map(|r| r.utilization).collect();
            let us: Vec<f64> = srp.iter().map(|r| r.utilization).collect();
            let test = paired_t_test(&us, &ub);
            let raw: Vec<f64> = srp.iter().flat_map(|r| r.plan_raw_lens.iter().map(|&l| l as f64)).collect();
            let refined: Vec<f64> = srp.iter().flat_map(|r| r.plan_refined_lens.iter().map(|&l| l as f64)).collect();
            let samples: Vec<(f64, bool)> = srp
                .iter()
                .flat_map(|r| r.srp_start_utilization.iter().copied().zip(r.srp_success.iter().copied()))
                .collect();
            let summary = SrpSummary {
                schema_version: lbcp_sim::report::SCHEMA_VERSION,
                episodes: streams.len(),
                mean_utilization_no_srp: mean(&ub),
                mean_utilization_srp: mean(&us),
                mean_difference: mean(&us) - mean(&ub),
                t: test.map_or(f64::NAN, |t| t.t),
                p_value: test.map_or(f64::NAN, |t| t.p_greater),
                srp_invocations: samples.len(),
                srp_successes: samples.iter().filter(|s| s.1).count(),
                mean_raw_plan_len: mean(&raw),
                mean_refined_plan_len: mean(&refined),
                success_by_utilization: success_buckets(&samples, 10),
            };
            let path = cfg.out.join("srp_summary.json");
            serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &summary)?;
            println!(
                "utilization no_srp {:.4}, srp {:.4}, p = {:.3e}; plan length {:.2} -> {:.2}; summary in {}",
                summary.mean_utilization_no_srp,
                summary.mean_utilization_srp,
                summary.p_value,
                summary.mean_raw_plan_len,
                summary.mean_refined_plan_len,
                path.display()
            );
        }
        Cmd::BenchSsv { no_comparator } => {
            let opts = BenchOptions {
                every: cfg.bench_every,
                comparator: !no_comparator,
                comparator_stride: cfg.bench_comparator_stride,
            };
            let mut tables = Vec::new();
            for kind in [StreamKind::Rs, StreamKind::RsSameHeight] {
                let spec = lbcp_sim::StreamSpec { kind, dims: cfg.bench_bin.0, ..cfg.stream_spec() };
                let t = bench_validation(&spec, &opts)?;
                for r in &t.rows {
                    println!(
                        "{kind:?} bucket {} (>= {} items): {} samples, incremental {:.0} ns, rebuild {:.0} ns",
                        r.bucket, r.min_packed, r.samples, r.incremental_mean_ns, r.rebuild_mean_ns
                    );
                }
                tables.push(t);
            }
            for p in export_bench(&cfg.out, &tables, cfg.format)? {
                println!("wrote {}", p.display());
            }
        }
        Cmd::GenStream => {
            std::fs::create_dir_all(&cfg.out)?;
            for (i, s) in gen_streams(&cfg.stream_spec()).iter().enumerate() {
                let path = cfg.out.join(format!("stream_{i:04}.jsonl"));
                write_jsonl(BufWriter::new(File::create(&path)?), s)?;
            }
            println!("wrote {} streams to {}", cfg.episodes, cfg.out.display());
        }
        Cmd::Fixtures => {
            let spec = lbcp_sim::StreamSpec { count: cfg.episodes, ..cfg.stream_spec() };
            let fx = fixtures::collect_fixtures(&spec)?;
            std::fs::create_dir_all(&cfg.out)?;
            let path = cfg.out.join("fixtures.jsonl");
            fixtures::write_fixtures(BufWriter::new(File::create(&path)?), &fx)?;
            println!("wrote {} fixtures to {}", fx.len(), path.display());
        }
    }
    Ok(())
}
