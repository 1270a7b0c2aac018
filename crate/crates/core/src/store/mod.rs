//! Durable experiment storage.
//!
//! Each experiment lives in its own file (see [`file`] for the layout) and has
//! its own lock: writes to one experiment are serialized, reads proceed
//! concurrently, and different experiments never contend. Every mutation
//! builds the next state, writes it to disk atomically, and only then makes it
//! visible in memory, so a crash at any point leaves either the old or the new
//! state on disk.

pub mod file;
mod ids;
mod records;

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::RwLock;
use thiserror::Error;

use crate::scoring::{
    comparison_schedule, validate_ratings, ComparisonChoice, ComparisonSchedule, ComparisonSet,
    RatingInput, ScoringError, WorkloadResult,
};
use crate::timestamp::Timestamp;

pub use ids::{normalize_join_code, JOIN_CODE_ALPHABET, JOIN_CODE_LEN};
pub use records::{
    ExperimentRecord, ExperimentSnapshot, ExperimentStatus, ParticipantRecord, ParticipantSnapshot,
    SessionState, StoredResult,
};

pub const MAX_NAME_CHARS: usize = 200;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("experiment name must be between 1 and {MAX_NAME_CHARS} characters")]
    InvalidName,
    #[error("unknown experiment {0}")]
    UnknownExperiment(String),
    #[error("unknown participant {0}")]
    UnknownParticipant(String),
    #[error("no open experiment has join code {0}")]
    UnknownJoinCode(String),
    #[error("experiment {0} is closed")]
    ExperimentClosed(String),
    #[error("participant {participant_id} is in state {actual}, expected {expected}")]
    WrongState {
        participant_id: String,
        actual: SessionState,
        expected: SessionState,
    },
    #[error("participant {participant_id} already submitted different {step}")]
    ConflictingResubmission {
        participant_id: String,
        step: &'static str,
    },
    #[error(transparent)]
    Validation(#[from] ScoringError),
    #[error("storage failure at {}: {source}", path.display())]
    Storage {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt store file {} (line {line}): {reason}", path.display())]
    Corrupt {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("unsupported format version {version} in {}", path.display())]
    UnsupportedFormat { path: PathBuf, version: u64 },
}

fn storage(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Storage {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ExperimentState {
    snapshot: ExperimentSnapshot,
    positions: HashMap<String, usize>,
}

impl ExperimentState {
    fn new(snapshot: ExperimentSnapshot) -> Self {
        let positions = snapshot
            .participants
            .iter()
            .enumerate()
            .map(|(i, p)| (p.record.participant_id.clone(), i))
            .collect();
        ExperimentState {
            snapshot,
            positions,
        }
    }

    fn participant(&self, id: &str) -> Result<&ParticipantSnapshot, StoreError> {
        self.positions
            .get(id)
            .map(|&i| &self.snapshot.participants[i])
            .ok_or_else(|| StoreError::UnknownParticipant(id.to_owned()))
    }

    fn participant_mut(&mut self, id: &str) -> Result<&mut ParticipantSnapshot, StoreError> {
        match self.positions.get(id) {
            Some(&i) => Ok(&mut self.snapshot.participants[i]),
            None => Err(StoreError::UnknownParticipant(id.to_owned())),
        }
    }

    fn push(&mut self, record: ParticipantRecord) {
        self.positions.insert(
            record.participant_id.clone(),
            self.snapshot.participants.len(),
        );
        self.snapshot.participants.push(ParticipantSnapshot {
            record,
            ratings: None,
            result: None,
        });
    }

    fn results(&self) -> Vec<StoredResult> {
        let mut out: Vec<_> = self
            .snapshot
            .participants
            .iter()
            .filter_map(|p| p.result.clone())
            .collect();
        out.sort_by(|x, y| {
            (x.recorded_at, &x.participant_id).cmp(&(y.recorded_at, &y.participant_id))
        });
        out
    }
}

type Handle = Arc<RwLock<ExperimentState>>;

#[derive(Default)]
struct Index {
    experiments: HashMap<String, Handle>,
    /// participant id -> experiment id
    participants: HashMap<String, String>,
    /// join code -> experiment id, open experiments only
    join_codes: HashMap<String, String>,
}

pub struct Store {
    dir: PathBuf,
    index: RwLock<Index>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("dir", &self.dir)
            .finish_non_exhaustive()
    }
}

impl Store {
    /// Opens (creating if needed) the store in `dir` and loads every
    /// experiment file. Uncommitted temp files are discarded.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(storage(&dir))?;
        let mut index = Index::default();

        let mut paths = Vec::new();
        for entry in fs::read_dir(&dir).map_err(storage(&dir))? {
            let path = entry.map_err(storage(&dir))?.path();
            match path.extension().and_then(|e| e.to_str()) {
                Some(file::TEMP_EXTENSION) => fs::remove_file(&path).map_err(storage(&path))?,
                Some(file::FILE_EXTENSION) => paths.push(path),
                _ => {}
            }
        }
        paths.sort();

        for path in paths {
            let bytes = fs::read(&path).map_err(storage(&path))?;
            let snapshot = file::decode(&path, &bytes)?;
            let corrupt = |reason: &str| StoreError::Corrupt {
                path: path.clone(),
                line: 1,
                reason: reason.to_owned(),
            };
            let id = snapshot.experiment.experiment_id.clone();
            if path.file_stem().and_then(|s| s.to_str()) != Some(id.as_str()) {
                return Err(corrupt("file name does not match experiment id"));
            }
            for p in &snapshot.participants {
                let pid = p.record.participant_id.clone();
                if index.participants.insert(pid, id.clone()).is_some() {
                    return Err(corrupt("participant id appears in two experiments"));
                }
            }
            if snapshot.experiment.status == ExperimentStatus::Open {
                let code = snapshot.experiment.join_code.clone();
                if index.join_codes.insert(code, id.clone()).is_some() {
                    return Err(corrupt("join code shared by two open experiments"));
                }
            }
            let state = ExperimentState::new(snapshot);
            index.experiments.insert(id, Arc::new(RwLock::new(state)));
        }

        Ok(Store {
            dir,
            index: RwLock::new(index),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, experiment_id: &str) -> PathBuf {
        self.dir
            .join(format!("{experiment_id}.{}", file::FILE_EXTENSION))
    }

    fn persist(&self, snapshot: &ExperimentSnapshot) -> Result<(), StoreError> {
        let path = self.path_for(&snapshot.experiment.experiment_id);
        file::atomic_write(&path, &file::encode(snapshot)).map_err(storage(&path))
    }

    fn experiment_handle(&self, experiment_id: &str) -> Result<Handle, StoreError> {
        self.index
            .read()
            .experiments
            .get(experiment_id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownExperiment(experiment_id.to_owned()))
    }

    fn participant_handle(&self, participant_id: &str) -> Result<Handle, StoreError> {
        let index = self.index.read();
        index
            .participants
            .get(participant_id)
            .and_then(|eid| index.experiments.get(eid))
            .cloned()
            .ok_or_else(|| StoreError::UnknownParticipant(participant_id.to_owned()))
    }

    /// Applies `f` to a copy of the experiment, persists the copy if it
    /// changed, then publishes it. On any error the committed state is untouched.
    fn mutate<R>(
        &self,
        handle: &Handle,
        f: impl FnOnce(&mut ExperimentState) -> Result<R, StoreError>,
    ) -> Result<R, StoreError> {
        let mut guard = handle.write();
        let mut next = guard.clone();
        let out = f(&mut next)?;
        if next != *guard {
            self.persist(&next.snapshot)?;
            *guard = next;
        }
        Ok(out)
    }

    pub fn create_experiment(&self, name: &str) -> Result<ExperimentRecord, StoreError> {
        let name = name.trim();
        if name.is_empty() || name.chars().count() > MAX_NAME_CHARS {
            return Err(StoreError::InvalidName);
        }

        let mut index = self.index.write();
        let experiment_id = loop {
            let id = ids::new_id();
            if !index.experiments.contains_key(&id) && !self.path_for(&id).exists() {
                break id;
            }
        };
        let join_code = loop {
            let code = ids::new_join_code();
            if !index.join_codes.contains_key(&code) {
                break code;
            }
        };
        let record = ExperimentRecord {
            experiment_id: experiment_id.clone(),
            name: name.to_owned(),
            created_at: Timestamp::now(),
            join_code: join_code.clone(),
            status: ExperimentStatus::Open,
        };
        let state = ExperimentState::new(ExperimentSnapshot {
            experiment: record.clone(),
            participants: Vec::new(),
        });
        self.persist(&state.snapshot)?;
        index
            .experiments
            .insert(experiment_id.clone(), Arc::new(RwLock::new(state)));
        index.join_codes.insert(join_code, experiment_id);
        Ok(record)
    }

    pub fn get_experiment(&self, experiment_id: &str) -> Result<ExperimentRecord, StoreError> {
        Ok(self
            .experiment_handle(experiment_id)?
            .read()
            .snapshot
            .experiment
            .clone())
    }

    /// All experiments, oldest first.
    pub fn list_experiments(&self) -> Vec<ExperimentRecord> {
        let handles: Vec<Handle> = self.index.read().experiments.values().cloned().collect();
        let mut out: Vec<_> = handles
            .iter()
            .map(|h| h.read().snapshot.experiment.clone())
            .collect();
        out.sort_by(|x, y| (x.created_at, &x.experiment_id).cmp(&(y.created_at, &y.experiment_id)));
        out
    }

    /// Closes the experiment to new participants. Sessions already started
    /// may still finish. Closing twice is a no-op.
    pub fn close_experiment(&self, experiment_id: &str) -> Result<ExperimentRecord, StoreError> {
        let handle = self.experiment_handle(experiment_id)?;
        let record = self.mutate(&handle, |exp| {
            exp.snapshot.experiment.status = ExperimentStatus::Closed;
            Ok(exp.snapshot.experiment.clone())
        })?;
        let mut index = self.index.write();
        if index.join_codes.get(&record.join_code).map(String::as_str) == Some(experiment_id) {
            index.join_codes.remove(&record.join_code);
        }
        Ok(record)
    }

    /// Resolves a join code to its open experiment. A code that only belongs
    /// to closed experiments yields [`StoreError::ExperimentClosed`].
    pub fn find_by_join_code(&self, code: &str) -> Result<ExperimentRecord, StoreError> {
        let code = normalize_join_code(code);
        let index = self.index.read();
        if let Some(id) = index.join_codes.get(&code) {
            let handle = index.experiments.get(id).cloned();
            drop(index);
            return match handle {
                Some(h) => Ok(h.read().snapshot.experiment.clone()),
                None => Err(StoreError::UnknownJoinCode(code)),
            };
        }
        let closed = index
            .experiments
            .values()
            .map(|h| h.read().snapshot.experiment.clone())
            .find(|e| e.join_code == code);
        match closed {
            Some(e) => Err(StoreError::ExperimentClosed(e.experiment_id)),
            None => Err(StoreError::UnknownJoinCode(code)),
        }
    }

    /// Enrolls a new participant in the open experiment with this join code.
    pub fn join(&self, code: &str) -> Result<(ExperimentRecord, ParticipantRecord), StoreError> {
        let experiment = self.find_by_join_code(code)?;
        let participant = self.add_participant(&experiment.experiment_id)?;
        Ok((experiment, participant))
    }

    pub fn add_participant(&self, experiment_id: &str) -> Result<ParticipantRecord, StoreError> {
        let handle = self.experiment_handle(experiment_id)?;
        if handle.read().snapshot.experiment.status == ExperimentStatus::Closed {
            return Err(StoreError::ExperimentClosed(experiment_id.to_owned()));
        }

        // Reserve the id before committing so concurrent inserts cannot collide.
        let participant_id = {
            let mut index = self.index.write();
            loop {
                let id = ids::new_id();
                if let std::collections::hash_map::Entry::Vacant(slot) =
                    index.participants.entry(id.clone())
                {
                    slot.insert(experiment_id.to_owned());
                    break id;
                }
            }
        };

        let outcome = self.mutate(&handle, |exp| {
            if exp.snapshot.experiment.status == ExperimentStatus::Closed {
                return Err(StoreError::ExperimentClosed(experiment_id.to_owned()));
            }
            let record = ParticipantRecord {
                participant_id: participant_id.clone(),
                experiment_id: experiment_id.to_owned(),
                session_token: ids::new_token(),
                schedule_seed: ids::new_seed(),
                state: SessionState::Created,
                created_at: Timestamp::now(),
                completed_at: None,
            };
            exp.push(record.clone());
            Ok(record)
        });
        if outcome.is_err() {
            self.index.write().participants.remove(&participant_id);
        }
        outcome
    }

    pub fn get_participant(&self, participant_id: &str) -> Result<ParticipantRecord, StoreError> {
        let handle = self.participant_handle(participant_id)?;
        let exp = handle.read();
        Ok(exp.participant(participant_id)?.record.clone())
    }

    /// Participants in enrollment order, whatever their state.
    pub fn list_participants(
        &self,
        experiment_id: &str,
    ) -> Result<Vec<ParticipantRecord>, StoreError> {
        let handle = self.experiment_handle(experiment_id)?;
        let exp = handle.read();
        Ok(exp
            .snapshot
            .participants
            .iter()
            .map(|p| p.record.clone())
            .collect())
    }

    pub fn schedule(&self, participant_id: &str) -> Result<ComparisonSchedule, StoreError> {
        Ok(comparison_schedule(
            self.get_participant(participant_id)?.schedule_seed,
        ))
    }

    /// First step: store the six ratings. An identical retry succeeds without
    /// change; different ratings after submission are rejected.
    pub fn save_ratings(
        &self,
        participant_id: &str,
        ratings: &RatingInput,
    ) -> Result<ParticipantRecord, StoreError> {
        let handle = self.participant_handle(participant_id)?;
        let sheet = validate_ratings(ratings)?;
        self.mutate(&handle, |exp| {
            let p = exp.participant_mut(participant_id)?;
            match p.record.state {
                SessionState::Created => {
                    p.ratings = Some(sheet);
                    p.record.state = SessionState::RatingsSubmitted;
                }
                SessionState::RatingsSubmitted if p.ratings == Some(sheet) => {}
                SessionState::RatingsSubmitted => {
                    return Err(StoreError::ConflictingResubmission {
                        participant_id: participant_id.to_owned(),
                        step: "ratings",
                    })
                }
                actual @ SessionState::Complete => {
                    return Err(StoreError::WrongState {
                        participant_id: participant_id.to_owned(),
                        actual,
                        expected: SessionState::Created,
                    })
                }
            }
            Ok(p.record.clone())
        })
    }

    /// Second step: store the fifteen choices, score the session, and mark it
    /// complete, all in one commit. An identical retry returns the stored result.
    pub fn save_comparisons(
        &self,
        participant_id: &str,
        choices: &[ComparisonChoice],
    ) -> Result<StoredResult, StoreError> {
        let handle = self.participant_handle(participant_id)?;
        let set = ComparisonSet::from_choices(choices)?;
        self.mutate(&handle, |exp| {
            let p = exp.participant_mut(participant_id)?;
            match (p.record.state, p.ratings, &p.result) {
                (SessionState::RatingsSubmitted, Some(ratings), None) => {
                    let now = Timestamp::now();
                    let stored = StoredResult {
                        participant_id: participant_id.to_owned(),
                        ratings,
                        comparisons: set,
                        result: WorkloadResult::new(&ratings, &set),
                        recorded_at: now,
                    };
                    p.record.state = SessionState::Complete;
                    p.record.completed_at = Some(now);
                    p.result = Some(stored.clone());
                    Ok(stored)
                }
                (SessionState::Complete, _, Some(stored)) if stored.comparisons == set => {
                    Ok(stored.clone())
                }
                (SessionState::Complete, ..) => Err(StoreError::ConflictingResubmission {
                    participant_id: participant_id.to_owned(),
                    step: "comparisons",
                }),
                (actual, ..) => Err(StoreError::WrongState {
                    participant_id: participant_id.to_owned(),
                    actual,
                    expected: SessionState::RatingsSubmitted,
                }),
            }
        })
    }

    pub fn get_result(&self, participant_id: &str) -> Result<StoredResult, StoreError> {
        let handle = self.participant_handle(participant_id)?;
        let exp = handle.read();
        let p = exp.participant(participant_id)?;
        p.result.clone().ok_or_else(|| StoreError::WrongState {
            participant_id: participant_id.to_owned(),
            actual: p.record.state,
            expected: SessionState::Complete,
        })
    }

    /// Completed sessions only, ordered by completion time then participant id.
    pub fn list_results(&self, experiment_id: &str) -> Result<Vec<StoredResult>, StoreError> {
        Ok(self.experiment_handle(experiment_id)?.read().results())
    }

    /// Every committed experiment, ordered by id.
    pub fn snapshot(&self) -> Vec<ExperimentSnapshot> {
        let mut handles: Vec<(String, Handle)> = self
            .index
            .read()
            .experiments
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        handles.sort_by(|x, y| x.0.cmp(&y.0));
        handles
            .iter()
            .map(|(_, h)| h.read().snapshot.clone())
            .collect()
    }
}
