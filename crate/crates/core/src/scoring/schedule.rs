use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::pairs::{all_pairs, DimensionPair, PAIR_COUNT};
use crate::dimension::Dimension;

/// One comparison card: the pair and which side each dimension is shown on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScheduleItem {
    pub pair: DimensionPair,
    /// When set, `b` is shown on the left.
    pub side_flip: bool,
}

impl ScheduleItem {
    pub fn left(&self) -> Dimension {
        if self.side_flip {
            self.pair.b()
        } else {
            self.pair.a()
        }
    }

    pub fn right(&self) -> Dimension {
        if self.side_flip {
            self.pair.a()
        } else {
            self.pair.b()
        }
    }
}

impl Serialize for ScheduleItem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            a: Dimension,
            b: Dimension,
            side_flip: bool,
            left: Dimension,
            right: Dimension,
        }
        Wire {
            a: self.pair.a(),
            b: self.pair.b(),
            side_flip: self.side_flip,
            left: self.left(),
            right: self.right(),
        }
        .serialize(serializer)
    }
}

/// Per-participant presentation order of the fifteen comparison cards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonSchedule {
    /// Decimal string on the wire; JavaScript numbers cannot hold 64 bits.
    #[serde(serialize_with = "crate::serde_u64_string::serialize")]
    pub seed: u64,
    pub items: Vec<ScheduleItem>,
}

/// Shuffles [`all_pairs`] and flips sides, driven entirely by `seed`.
///
/// Uses ChaCha8 output words directly with a local Fisher-Yates and rejection
/// sampler so a stored seed keeps replaying the same schedule when `rand`
/// changes its sampling algorithms.
pub fn comparison_schedule(seed: u64) -> ComparisonSchedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = all_pairs();
    for i in (1..PAIR_COUNT).rev() {
        let j = bounded(&mut rng, i as u32 + 1) as usize;
        pairs.swap(i, j);
    }
    let items = pairs
        .iter()
        .map(|&pair| ScheduleItem {
            pair,
            side_flip: rng.next_u32() & 1 == 1,
        })
        .collect();
    ComparisonSchedule { seed, items }
}

/// Uniform value in `0..n` by rejection.
fn bounded(rng: &mut ChaCha8Rng, n: u32) -> u32 {
    debug_assert!(n > 0);
    let zone = (1u64 << 32) / u64::from(n) * u64::from(n);
    loop {
        let x = rng.next_u32();
        if u64::from(x) < zone {
            return x % n;
        }
    }
}
