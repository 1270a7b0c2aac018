use serde::{Deserialize, Serialize};

use crate::scoring::{ComparisonSet, RatingSheet, WorkloadResult};
use crate::timestamp::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentStatus {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment_id: String,
    pub name: String,
    pub created_at: Timestamp,
    pub join_code: String,
    pub status: ExperimentStatus,
}

/// Progress through the two-step protocol. Only moves forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Created,
    RatingsSubmitted,
    Complete,
}

impl SessionState {
    pub fn as_str(self) -> &'static str {
        match self {
            SessionState::Created => "created",
            SessionState::RatingsSubmitted => "ratings_submitted",
            SessionState::Complete => "complete",
        }
    }
}

impl std::fmt::Display for SessionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub participant_id: String,
    pub experiment_id: String,
    pub session_token: String,
    #[serde(with = "crate::serde_u64_string")]
    pub schedule_seed: u64,
    pub state: SessionState,
    pub created_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completed_at: Option<Timestamp>,
}

/// A completed session with the inputs its scores were computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredResult {
    pub participant_id: String,
    pub ratings: RatingSheet,
    pub comparisons: ComparisonSet,
    pub result: WorkloadResult,
    pub recorded_at: Timestamp,
}

/// A participant together with whatever inputs they have submitted so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantSnapshot {
    pub record: ParticipantRecord,
    pub ratings: Option<RatingSheet>,
    pub result: Option<StoredResult>,
}

/// Full committed state of one experiment; used to compare stores across restarts.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSnapshot {
    pub experiment: ExperimentRecord,
    pub participants: Vec<ParticipantSnapshot>,
}
