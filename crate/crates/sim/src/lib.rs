//! Experiment harness for `lbcp-core`: item streams, episodes with and
//! without rearrangement, validation timing, reports and the external policy
//! bridge.

pub mod bench;
pub mod bridge;
pub mod config;
pub mod episode;
pub mod fixtures;
pub mod report;
pub mod stats;
pub mod stream;
pub mod suite;

pub use bench::{bench_validation, BenchOptions, BenchTable};
pub use config::Config;
pub use episode::{run_batch, run_episode, EpisodeConfig, EpisodeReport, Mode};
pub use stream::{gen_stream, StreamSpec};
