//! NASA-TLX scoring.
//!
//! Participants rate six dimensions on a 0..=100 scale, then make fifteen
//! forced choices, one for each pair of dimensions. A dimension's weight is the
//! number of comparisons it won (0..=5, summing to 15). The weighted workload is
//! the sum of rating × weight divided by 15; the raw workload is the plain mean
//! of the ratings. Both lie on the 0..=100 rating scale.
//!
//! Everything here is pure and operates on immutable values.

mod pairs;
mod schedule;

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dimension::{Dimension, PerDimension};
use crate::rounding::{self, serialize_score};

pub use pairs::{all_pairs, DimensionPair, PAIR_COUNT};
pub use schedule::{comparison_schedule, ComparisonSchedule, ScheduleItem};

pub const RATING_MIN: i64 = 0;
pub const RATING_MAX: i64 = 100;
/// Sum of all weights in a complete comparison set.
pub const WEIGHT_TOTAL: u32 = PAIR_COUNT as u32;
/// Most comparisons a single dimension takes part in.
pub const WEIGHT_MAX: u8 = (Dimension::COUNT - 1) as u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("rating for {dimension} is {value}, expected a value from 0 to 100")]
    OutOfRange { dimension: Dimension, value: i64 },
    #[error("no rating given for {0}")]
    MissingDimension(Dimension),
    #[error("{0} was rated more than once")]
    DuplicateDimension(Dimension),
    #[error("pair {0} was compared more than once")]
    DuplicatePair(DimensionPair),
    #[error("pair {0} was never compared")]
    MissingPair(DimensionPair),
    #[error("{chosen} is not part of pair {pair}")]
    InvalidChoice {
        pair: DimensionPair,
        chosen: Dimension,
    },
    #[error("{0} cannot be compared with itself")]
    SelfComparison(Dimension),
    #[error("weights {0:?} are not a valid tally of fifteen comparisons")]
    InvalidWeights([u8; Dimension::COUNT]),
}

impl ScoringError {
    /// Stable machine-readable code, used verbatim by the HTTP API.
    pub fn code(&self) -> &'static str {
        match self {
            ScoringError::OutOfRange { .. } => "rating_out_of_range",
            ScoringError::MissingDimension(_) => "missing_dimension",
            ScoringError::DuplicateDimension(_) => "duplicate_dimension",
            ScoringError::DuplicatePair(_) => "duplicate_pair",
            ScoringError::MissingPair(_) => "missing_pair",
            ScoringError::InvalidChoice { .. } => "invalid_choice",
            ScoringError::SelfComparison(_) => "self_comparison",
            ScoringError::InvalidWeights(_) => "invalid_weights",
        }
    }
}

/// Unvalidated ratings as submitted: `(dimension, value)` entries in the order
/// received, duplicates and out-of-range values preserved for validation.
///
/// Deserializes from a JSON object keyed by dimension id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatingInput(pub Vec<(Dimension, i64)>);

impl RatingInput {
    /// Six values in canonical dimension order.
    pub fn from_values(values: [i64; Dimension::COUNT]) -> Self {
        RatingInput(Dimension::ALL.iter().copied().zip(values).collect())
    }
}

impl Serialize for RatingInput {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (d, v) in &self.0 {
            map.serialize_entry(d.id(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for RatingInput {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = RatingInput;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping dimension ids to integer ratings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RatingInput, A::Error> {
                let mut entries = Vec::with_capacity(map.size_hint().unwrap_or(6));
                while let Some(entry) = map.next_entry::<Dimension, i64>()? {
                    entries.push(entry);
                }
                Ok(RatingInput(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

/// A complete, validated set of six ratings in 0..=100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RatingInput")]
pub struct RatingSheet(PerDimension<u8>);

impl RatingSheet {
    /// Six values in canonical dimension order.
    pub fn from_values(values: [i64; Dimension::COUNT]) -> Result<Self, ScoringError> {
        validate_ratings(&RatingInput::from_values(values))
    }

    pub fn get(&self, d: Dimension) -> u8 {
        self.0[d]
    }

    pub fn values(&self) -> &PerDimension<u8> {
        &self.0
    }

    pub fn to_input(&self) -> RatingInput {
        RatingInput(self.0.iter().map(|(d, &v)| (d, i64::from(v))).collect())
    }
}

impl TryFrom<RatingInput> for RatingSheet {
    type Error = ScoringError;

    fn try_from(input: RatingInput) -> Result<Self, Self::Error> {
        validate_ratings(&input)
    }
}

/// Checks that every dimension is rated exactly once within 0..=100.
///
/// Entries are checked in submission order; the first problem found is
/// reported. Missing dimensions are reported last, in canonical order.
pub fn validate_ratings(input: &RatingInput) -> Result<RatingSheet, ScoringError> {
    let mut slots: [Option<u8>; Dimension::COUNT] = [None; Dimension::COUNT];
    for &(dimension, value) in &input.0 {
        if slots[dimension.index()].is_some() {
            return Err(ScoringError::DuplicateDimension(dimension));
        }
        if !(RATING_MIN..=RATING_MAX).contains(&value) {
            return Err(ScoringError::OutOfRange { dimension, value });
        }
        slots[dimension.index()] = Some(value as u8);
    }
    let mut values = [0u8; Dimension::COUNT];
    for (d, slot) in Dimension::ALL.iter().zip(slots) {
        values[d.index()] = slot.ok_or(ScoringError::MissingDimension(*d))?;
    }
    Ok(RatingSheet(PerDimension(values)))
}

/// One forced choice as submitted. `a` and `b` may arrive in either order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComparisonChoice {
    pub a: Dimension,
    pub b: Dimension,
    pub chosen: Dimension,
}

impl ComparisonChoice {
    pub fn new(pair: DimensionPair, chosen: Dimension) -> Self {
        ComparisonChoice {
            a: pair.a(),
            b: pair.b(),
            chosen,
        }
    }

    pub fn pair(&self) -> Result<DimensionPair, ScoringError> {
        DimensionPair::new(self.a, self.b)
    }
}

/// A validated answer for each of the fifteen pairs.
///
/// Winners are held in [`all_pairs`] order, so two sets that record the same
/// choices compare equal regardless of submission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComparisonChoice>", into = "Vec<ComparisonChoice>")]
pub struct ComparisonSet {
    winners: [Dimension; PAIR_COUNT],
}

impl ComparisonSet {
    pub fn from_choices(choices: &[ComparisonChoice]) -> Result<Self, ScoringError> {
        let mut winners: [Option<Dimension>; PAIR_COUNT] = [None; PAIR_COUNT];
        for choice in choices {
            let pair = choice.pair()?;
            if !pair.contains(choice.chosen) {
                return Err(ScoringError::InvalidChoice {
                    pair,
                    chosen: choice.chosen,
                });
            }
            let slot = &mut winners[pair.index()];
            if slot.is_some() {
                return Err(ScoringError::DuplicatePair(pair));
            }
            *slot = Some(choice.chosen);
        }
        let pairs = all_pairs();
        let mut out = [Dimension::MentalDemand; PAIR_COUNT];
        for (k, slot) in winners.iter().enumerate() {
            out[k] = slot.ok_or(ScoringError::MissingPair(pairs[k]))?;
        }
        Ok(ComparisonSet { winners: out })
    }

    pub fn winner(&self, pair: DimensionPair) -> Dimension {
        self.winners[pair.index()]
    }

    /// Choices in canonical pair order.
    pub fn choices(&self) -> Vec<ComparisonChoice> {
        all_pairs()
            .iter()
            .zip(self.winners)
            .map(|(&pair, chosen)| ComparisonChoice::new(pair, chosen))
            .collect()
    }

    pub fn weights(&self) -> WeightVector {
        let mut counts = PerDimension([0u8; Dimension::COUNT]);
        for &w in &self.winners {
            counts[w] += 1;
        }
        WeightVector(counts)
    }
}

impl TryFrom<Vec<ComparisonChoice>> for ComparisonSet {
    type Error = ScoringError;

    fn try_from(choices: Vec<ComparisonChoice>) -> Result<Self, Self::Error> {
        ComparisonSet::from_choices(&choices)
    }
}

impl From<ComparisonSet> for Vec<ComparisonChoice> {
    fn from(set: ComparisonSet) -> Self {
        set.choices()
    }
}

/// Per-dimension tally of comparison wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PerDimension<u8>")]
pub struct WeightVector(PerDimension<u8>);

impl WeightVector {
    /// Accepts counts in canonical order that sum to 15 with each at most 5.
    pub fn from_counts(counts: [u8; Dimension::COUNT]) -> Result<Self, ScoringError> {
        let total: u32 = counts.iter().map(|&c| u32::from(c)).sum();
        if total != WEIGHT_TOTAL || counts.iter().any(|&c| c > WEIGHT_MAX) {
            return Err(ScoringError::InvalidWeights(counts));
        }
        Ok(WeightVector(PerDimension(counts)))
    }

    pub fn get(&self, d: Dimension) -> u8 {
        self.0[d]
    }

    pub fn values(&self) -> &PerDimension<u8> {
        &self.0
    }
}

impl TryFrom<PerDimension<u8>> for WeightVector {
    type Error = ScoringError;

    fn try_from(counts: PerDimension<u8>) -> Result<Self, Self::Error> {
        WeightVector::from_counts(counts.0)
    }
}

/// Tallies how often each dimension was chosen.
pub fn derive_weights(choices: &[ComparisonChoice]) -> Result<WeightVector, ScoringError> {
    Ok(ComparisonSet::from_choices(choices)?.weights())
}

/// Sum of rating × weight; 15 × the weighted workload, held exactly.
fn weighted_sum(sheet: &RatingSheet, weights: &WeightVector) -> u32 {
    Dimension::ALL
        .iter()
        .map(|&d| u32::from(sheet.get(d)) * u32::from(weights.get(d)))
        .sum()
}

/// Overall weighted workload, `Σ rating × weight / 15`, in 0..=100.
pub fn weighted_workload(sheet: &RatingSheet, weights: &WeightVector) -> f64 {
    f64::from(weighted_sum(sheet, weights)) / f64::from(WEIGHT_TOTAL)
}

/// Unweighted mean of the six ratings, in 0..=100.
pub fn raw_workload(sheet: &RatingSheet) -> f64 {
    let sum: u32 = sheet.values().values().iter().map(|&v| u32::from(v)).sum();
    f64::from(sum) / Dimension::COUNT as f64
}

/// Scores for one completed session.
///
/// Scores are kept at full precision; they are rounded to two decimals only
/// when serialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadResult {
    pub ratings: RatingSheet,
    pub weights: WeightVector,
    pub adjusted: PerDimension<u16>,
    #[serde(serialize_with = "serialize_score")]
    pub weighted_score: f64,
    #[serde(serialize_with = "serialize_score")]
    pub raw_score: f64,
}

impl WorkloadResult {
    pub fn new(ratings: &RatingSheet, comparisons: &ComparisonSet) -> Self {
        let weights = comparisons.weights();
        WorkloadResult {
            ratings: *ratings,
            weights,
            adjusted: PerDimension::from_fn(|d| {
                u16::from(ratings.get(d)) * u16::from(weights.get(d))
            }),
            weighted_score: weighted_workload(ratings, &weights),
            raw_score: raw_workload(ratings),
        }
    }

    /// Sum of adjusted ratings (15 × weighted score), exact.
    pub fn adjusted_total(&self) -> u32 {
        self.adjusted.values().iter().map(|&a| u32::from(a)).sum()
    }

    /// Whether `other` serializes to the same values as `self`: integer
    /// fields equal, scores equal after two-decimal rounding.
    pub fn agrees_with(&self, other: &WorkloadResult) -> bool {
        self.ratings == other.ratings
            && self.weights == other.weights
            && self.adjusted == other.adjusted
            && rounding::fixed2(self.weighted_score) == rounding::fixed2(other.weighted_score)
            && rounding::fixed2(self.raw_score) == rounding::fixed2(other.raw_score)
    }
}

/// Validates the comparisons and scores the session. Nothing is returned
/// unless every input is valid.
pub fn compute_result(
    ratings: &RatingSheet,
    choices: &[ComparisonChoice],
) -> Result<WorkloadResult, ScoringError> {
    let set = ComparisonSet::from_choices(choices)?;
    Ok(WorkloadResult::new(ratings, &set))
}
