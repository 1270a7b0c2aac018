//! Re-ingestion of JSON exports, for round-trip tests.

use serde::Deserialize;
use thiserror::Error;

use super::EXPORT_FORMAT_VERSION;
use crate::scoring::WorkloadResult;
use crate::store::{ExperimentRecord, StoredResult};

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("malformed export: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported export format version {0}")]
    Version(u32),
    #[error("stored result for {0} does not match its ratings and comparisons")]
    Inconsistent(String),
}

#[derive(Deserialize)]
struct Document {
    format_version: u32,
    experiment: ExperimentRecord,
    results: Vec<StoredResult>,
}

/// Parses a JSON export, recomputing every result at full precision and
/// checking it against the exported (rounded) scores.
pub fn import_json(bytes: &[u8]) -> Result<(ExperimentRecord, Vec<StoredResult>), ImportError> {
    let doc: Document = serde_json::from_slice(bytes)?;
    if doc.format_version != EXPORT_FORMAT_VERSION {
        return Err(ImportError::Version(doc.format_version));
    }
    let results = doc
        .results
        .into_iter()
        .map(|mut stored| {
            let recomputed = WorkloadResult::new(&stored.ratings, &stored.comparisons);
            if !stored.result.agrees_with(&recomputed) {
                return Err(ImportError::Inconsistent(stored.participant_id));
            }
            stored.result = recomputed;
            Ok(stored)
        })
        .collect::<Result<_, _>>()?;
    Ok((doc.experiment, results))
}
