//! On-disk layout: one `<experiment_id>.jsonl` file per experiment.
//!
//! Line 1 is a header, `{"format_version":1,"experiment":{...}}`. Every
//! following line holds one participant in creation order:
//! `{"participant":{...},"ratings":{...},"comparisons":[...],"result":{...}}`,
//! where the last three keys appear once the matching step is complete.
//!
//! A file is only ever replaced whole: the new contents go to
//! `<experiment_id>.jsonl.tmp`, are fsynced, and renamed over the old file.
//! Leftover `.tmp` files belong to writes that never committed.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::records::{
    ExperimentRecord, ExperimentSnapshot, ParticipantRecord, ParticipantSnapshot, SessionState,
    StoredResult,
};
use super::StoreError;
use crate::scoring::{ComparisonSet, RatingSheet, WorkloadResult};

pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "jsonl";
pub const TEMP_EXTENSION: &str = "tmp";

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    experiment: ExperimentRecord,
}

#[derive(Serialize, Deserialize)]
struct ParticipantLine {
    participant: ParticipantRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratings: Option<RatingSheet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comparisons: Option<ComparisonSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    result: Option<WorkloadResult>,
}

pub(crate) fn encode(snapshot: &ExperimentSnapshot) -> Vec<u8> {
    let mut out = Vec::new();
    let header = Header {
        format_version: FORMAT_VERSION,
        experiment: snapshot.experiment.clone(),
    };
    serde_json::to_writer(&mut out, &header).expect("records serialize");
    out.push(b'\n');
    for p in &snapshot.participants {
        let line = ParticipantLine {
            participant: p.record.clone(),
            ratings: p.ratings,
            comparisons: p.result.as_ref().map(|r| r.comparisons),
            result: p.result.as_ref().map(|r| r.result),
        };
        serde_json::to_writer(&mut out, &line).expect("records serialize");
        out.push(b'\n');
    }
    out
}

pub(crate) fn decode(path: &Path, bytes: &[u8]) -> Result<ExperimentSnapshot, StoreError> {
    let corrupt = |line: usize, reason: String| StoreError::Corrupt {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let text = std::str::from_utf8(bytes).map_err(|e| corrupt(0, e.to_string()))?;
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| corrupt(0, "file does not end with a newline".into()))?;
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (_, first) = lines.next().expect("split yields at least one item");
    let version = serde_json::from_str::<serde_json::Value>(first)
        .map_err(|e| corrupt(1, e.to_string()))?
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| corrupt(1, "missing format_version".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(StoreError::UnsupportedFormat {
            path: path.to_path_buf(),
            version,
        });
    }
    let header: Header = serde_json::from_str(first).map_err(|e| corrupt(1, e.to_string()))?;
    let experiment_id = header.experiment.experiment_id.clone();

    let mut seen = HashSet::new();
    let mut participants = Vec::new();
    for (n, line) in lines {
        let p: ParticipantLine =
            serde_json::from_str(line).map_err(|e| corrupt(n, e.to_string()))?;
        if p.participant.experiment_id != experiment_id {
            return Err(corrupt(
                n,
                "participant belongs to another experiment".into(),
            ));
        }
        if !seen.insert(p.participant.participant_id.clone()) {
            return Err(corrupt(n, "duplicate participant id".into()));
        }
        participants.push(participant_from_line(p).map_err(|reason| corrupt(n, reason))?);
    }

    Ok(ExperimentSnapshot {
        experiment: header.experiment,
        participants,
    })
}

fn participant_from_line(line: ParticipantLine) -> Result<ParticipantSnapshot, String> {
    let ParticipantLine {
        participant,
        ratings,
        comparisons,
        result,
    } = line;
    let shape = (
        participant.state,
        ratings,
        comparisons,
        result,
        participant.completed_at,
    );
    let result = match shape {
        (SessionState::Created, None, None, None, None) => None,
        (SessionState::RatingsSubmitted, Some(_), None, None, None) => None,
        (SessionState::Complete, Some(r), Some(c), Some(stored), Some(completed_at)) => {
            // Scores are kept rounded on disk; rebuild them at full precision.
            let recomputed = WorkloadResult::new(&r, &c);
            if !stored.agrees_with(&recomputed) {
                return Err("stored result does not match its ratings and comparisons".into());
            }
            Some(StoredResult {
                participant_id: participant.participant_id.clone(),
                ratings: r,
                comparisons: c,
                result: recomputed,
                recorded_at: completed_at,
            })
        }
        (state, ..) => return Err(format!("fields inconsistent with state {state}")),
    };
    Ok(ParticipantSnapshot {
        record: participant,
        ratings,
        result,
    })
}

/// Replaces `path` with `bytes`: write temp file, fsync, rename, fsync directory.
pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = temp_path(path);
    let mut file = File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path)?;
    sync_dir(path.parent().unwrap_or(Path::new(".")))
}

pub(crate) fn temp_path(path: &Path) -> std::path::PathBuf {
    let mut name = path
        .file_name()
        .expect("store paths name a file")
        .to_os_string();
    name.push(".");
    name.push(TEMP_EXTENSION);
    path.with_file_name(name)
}

#[cfg(unix)]
fn sync_dir(dir: &Path) -> io::Result<()> {
    File::open(dir)?.sync_all()
}

#[cfg(not(unix))]
fn sync_dir(_dir: &Path) -> io::Result<()> {
    Ok(())
}
