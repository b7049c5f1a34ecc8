//! Report files.
//!
//! Episode CSV columns, in order:
//! `schema_version, episode, seed, mode, utilization, items_packed, items_seen,
//! operations, srp_invocations, srp_successes, plan_raw_len_sum,
//! plan_refined_len_sum, validation_mean_ns, revalidation_failures`.
//!
//! Bench CSV columns: `schema_version, bucket, min_packed, max_packed,
//! samples, comparator_samples, incremental_mean_ns, rebuild_mean_ns`.
//!
//! JSON files wrap the full records in `{"schema_version": .., ...}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::BenchTable;
use crate::episode::EpisodeReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Serialize)]
struct EpisodeRow<'a> {
    schema_version: u32,
    episode: usize,
    seed: u64,
    mode: &'a str,
    utilization: f64,
    items_packed: usize,
    items_seen: usize,
    operations: usize,
    srp_invocations: usize,
    srp_successes: usize,
    plan_raw_len_sum: usize,
    plan_refined_len_sum: usize,
    validation_mean_ns: f64,
    revalidation_failures: usize,
}

const EPISODE_HEADER: [&str; 14] = [
    "schema_version",
    "episode",
    "seed",
    "mode",
    "utilization",
    "items_packed",
    "items_seen",
    "operations",
    "srp_invocations",
    "srp_successes",
    "plan_raw_len_sum",
    "plan_refined_len_sum",
    "validation_mean_ns",
    "revalidation_failures",
];

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeFile {
    pub schema_version: u32,
    pub episodes: Vec<EpisodeReport>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchFile {
    pub schema_version: u32,
    pub tables: Vec<BenchTable>,
}

pub fn write_episodes_csv(out: impl Write, reports: &[EpisodeReport]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(EPISODE_HEADER)?;
    for r in reports {
        let n = r.validation_ns.len().max(1) as f64;
        w.serialize(EpisodeRow {
            schema_version: SCHEMA_VERSION,
            episode: r.episode,
            seed: r.seed,
            mode: r.mode.as_str(),
            utilization: r.utilization,
            items_packed: r.items_packed,
            items_seen: r.items_seen,
            operations: r.operations,
            srp_invocations: r.srp_invocations,
            srp_successes: r.srp_success.iter().filter(|&&s| s).count(),
            plan_raw_len_sum: r.plan_raw_lens.iter().sum(),
            plan_refined_len_sum: r.plan_refined_lens.iter().sum(),
            validation_mean_ns: r.validation_ns.iter().sum::<u64>() as f64 / n,
            revalidation_failures: r.revalidation_failures,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bench_csv(out: impl Write, table: &BenchTable) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["schema_version", "bucket", "min_packed", "max_packed", "samples", "comparator_samples", "incremental_mean_ns", "rebuild_mean_ns"])?;
    for r in &table.rows {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            r.bucket.to_string(),
            r.min_packed.to_string(),
            r.max_packed.map_or(String::new(), |m| m.to_string()),
            r.samples.to_string(),
            r.comparator_samples.to_string(),
            format!("{:.1}", r.incremental_mean_ns),
            format!("{:.1}", r.rebuild_mean_ns),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `reports` under `dir` as `episodes.csv` or `episodes.json`.
pub fn export_report(dir: &Path, reports: &[EpisodeReport], format: Format) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    match format {
        Format::Csv => {
            let path = dir.join("episodes.csv");
            write_episodes_csv(BufWriter::new(File::create(&path)?), reports)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join("episodes.json");
            let file = EpisodeFile { schema_version: SCHEMA_VERSION, episodes: reports.to_vec() };
            serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &file)?;
            Ok(path)
        }
    }
}

pub fn import_episodes_json(path: &Path) -> anyhow::Result<Vec<EpisodeReport>> {
    let file: EpisodeFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    anyhow::ensure!(file.schema_version == SCHEMA_VERSION, "unsupported schema version {}", file.schema_version);
    Ok(file.episodes)
}

pub fn export_bench(dir: &Path, tables: &[BenchTable], format: Format) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    match format {
        Format::Csv => tables
            .iter()
            .map(|t| {
                let name = match t.spec.kind {
                    crate::stream::StreamKind::Rs => "bench_rs.csv",
                    crate::stream::StreamKind::RsSameHeight => "bench_rs_same_height.csv",
                };
                let path = dir.join(name);
                write_bench_csv(BufWriter::new(File::create(&path)?), t)?;
                Ok(path)
            })
            .collect(),
        Format::Json => {
            let path = dir.join("bench.json");
            let file = BenchFile { schema_version: SCHEMA_VERSION, tables: tables.to_vec() };
            serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &file)?;
            Ok(vec![path])
        }
    }
}
