//! Result export (CSV and JSON) and experiment summaries.
//!
//! Both exports list completed sessions ordered by completion time, then
//! participant id, and round scores half-up to two decimals. Output bytes
//! depend only on the input records.

#[cfg(feature = "import")]
mod import;
mod summary;

use serde::Serialize;

use crate::dimension::Dimension;
use crate::rounding::fixed2;
use crate::store::{ExperimentRecord, StoredResult};

#[cfg(feature = "import")]
pub use import::{import_json, ImportError};
pub use summary::{summarize, DimensionSummary, ExperimentSummary, Stat};

pub const EXPORT_FORMAT_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 23] = [
    "experiment_id",
    "participant_id",
    "completed_at",
    "rating_mental",
    "rating_physical",
    "rating_temporal",
    "rating_performance",
    "rating_effort",
    "rating_frustration",
    "weight_mental",
    "weight_physical",
    "weight_temporal",
    "weight_performance",
    "weight_effort",
    "weight_frustration",
    "adjusted_mental",
    "adjusted_physical",
    "adjusted_temporal",
    "adjusted_performance",
    "adjusted_effort",
    "adjusted_frustration",
    "weighted_score",
    "raw_score",
];

fn ordered(results: &[StoredResult]) -> Vec<&StoredResult> {
    let mut out: Vec<_> = results.iter().collect();
    out.sort_by(|x, y| (x.recorded_at, &x.participant_id).cmp(&(y.recorded_at, &y.participant_id)));
    out
}

/// UTF-8 CSV with LF line endings and a fixed 23-column header.
pub fn to_csv(experiment: &ExperimentRecord, results: &[StoredResult]) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("write to Vec");
    for stored in ordered(results) {
        let r = &stored.result;
        let mut row = Vec::with_capacity(CSV_HEADER.len());
        row.push(experiment.experiment_id.clone());
        row.push(stored.participant_id.clone());
        row.push(stored.recorded_at.to_string());
        row.extend(Dimension::ALL.iter().map(|&d| r.ratings.get(d).to_string()));
        row.extend(Dimension::ALL.iter().map(|&d| r.weights.get(d).to_string()));
        row.extend(Dimension::ALL.iter().map(|&d| r.adjusted[d].to_string()));
        row.push(fixed2(r.weighted_score));
        row.push(fixed2(r.raw_score));
        writer.write_record(&row).expect("write to Vec");
    }
    writer.into_inner().expect("flush to Vec")
}

#[derive(Serialize)]
struct ExportDocument<'a> {
    format_version: u32,
    experiment: &'a ExperimentRecord,
    results: Vec<&'a StoredResult>,
}

/// Pretty-printed JSON document `{format_version, experiment, results}` with
/// a trailing newline.
pub fn to_json(experiment: &ExperimentRecord, results: &[StoredResult]) -> Vec<u8> {
    let doc = ExportDocument {
        format_version: EXPORT_FORMAT_VERSION,
        experiment,
        results: ordered(results),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("records serialize");
    out.push(b'\n');
    out
}
