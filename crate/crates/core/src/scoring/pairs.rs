use std::fmt;

use serde::{Deserialize, Serialize};

use super::ScoringError;
use crate::dimension::Dimension;

/// Number of unordered dimension pairs, C(6, 2).
pub const PAIR_COUNT: usize = 15;

/// An unordered pair of distinct dimensions, held with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DimensionPair {
    a: Dimension,
    b: Dimension,
}

impl DimensionPair {
    pub fn new(x: Dimension, y: Dimension) -> Result<Self, ScoringError> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(DimensionPair { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(DimensionPair { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(ScoringError::SelfComparison(x)),
        }
    }

    pub fn a(&self) -> Dimension {
        self.a
    }

    pub fn b(&self) -> Dimension {
        self.b
    }

    pub fn contains(&self, d: Dimension) -> bool {
        self.a == d || self.b == d
    }

    /// Position of this pair in [`all_pairs`].
    pub fn index(&self) -> usize {
        // Pairs starting with dimension i occupy 5 + 4 + ... slots before it.
        let (i, j) = (self.a.index(), self.b.index());
        let n = Dimension::COUNT;
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }
}

impl fmt::Display for DimensionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl<'de> Deserialize<'de> for DimensionPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: Dimension,
            b: Dimension,
        }
        let raw = Raw::deserialize(deserializer)?;
        DimensionPair::new(raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

/// All fifteen pairs, lexicographic over canonical dimension order.
pub fn all_pairs() -> [DimensionPair; PAIR_COUNT] {
    let mut out = [DimensionPair {
        a: Dimension::MentalDemand,
        b: Dimension::PhysicalDemand,
    }; PAIR_COUNT];
    let mut k = 0;
    for (i, &a) in Dimension::ALL.iter().enumerate() {
        for &b in &Dimension::ALL[i + 1..] {
            out[k] = DimensionPair { a, b };
            k += 1;
        }
    }
    out
}
