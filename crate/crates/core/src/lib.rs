//! NASA-TLX workload assessment: scoring, durable experiment storage, and
//! result export.
//!
//! - [`scoring`]: ratings, pairwise comparisons, weights and workload scores.
//! - [`store`]: file-backed experiments, participants and session progress.
//! - [`export`]: CSV/JSON serialization and experiment-level summaries.

pub mod dimension;
pub mod export;
pub mod rounding;
pub mod scoring;
pub mod store;
pub mod timestamp;

pub use dimension::{Dimension, DimensionDescriptor, PerDimension};
pub use timestamp::Timestamp;

/// `u64` carried as a decimal string.
pub(crate) mod serde_u64_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<u64, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
