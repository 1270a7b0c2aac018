use serde::Serialize;

use crate::dimension::{Dimension, PerDimension};
use crate::rounding::serialize_opt_score;
use crate::store::StoredResult;

/// Mean and sample (n − 1) standard deviation. `mean` is null with no
/// samples, `sd` is null with fewer than two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    #[serde(serialize_with = "serialize_opt_score")]
    pub mean: Option<f64>,
    #[serde(serialize_with = "serialize_opt_score")]
    pub sd: Option<f64>,
}

impl Stat {
    /// Statistics of `x / scale` for integer samples `x`.
    ///
    /// Every summarized quantity is an integer (ratings, weights, adjusted
    /// ratings) or an integer over a fixed divisor (15 × weighted score,
    /// 6 × raw score), so sums are exact and independent of sample order.
    fn of_scaled(samples: impl Iterator<Item = i64>, scale: i64) -> Stat {
        let (mut n, mut sum, mut sum_sq) = (0i128, 0i128, 0i128);
        for x in samples {
            let x = i128::from(x);
            n += 1;
            sum += x;
            sum_sq += x * x;
        }
        let scale = i128::from(scale);
        let mean = (n > 0).then(|| sum as f64 / (n * scale) as f64);
        let sd = (n > 1).then(|| {
            let numerator = n * sum_sq - sum * sum;
            let denominator = n * (n - 1) * scale * scale;
            (numerator as f64 / denominator as f64).sqrt()
        });
        Stat { mean, sd }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionSummary {
    pub rating: Stat,
    pub weight: Stat,
    pub adjusted: Stat,
}

/// Experiment-level aggregates over completed sessions; the dashboard's data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub n_complete: usize,
    pub dimensions: PerDimension<DimensionSummary>,
    pub weighted_score: Stat,
    pub raw_score: Stat,
}

pub fn summarize(results: &[StoredResult]) -> ExperimentSummary {
    let dimension = |d: Dimension| DimensionSummary {
        rating: Stat::of_scaled(
            results.iter().map(|r| i64::from(r.result.ratings.get(d))),
            1,
        ),
        weight: Stat::of_scaled(
            results.iter().map(|r| i64::from(r.result.weights.get(d))),
            1,
        ),
        adjusted: Stat::of_scaled(results.iter().map(|r| i64::from(r.result.adjusted[d])), 1),
    };
    let rating_total = |r: &StoredResult| -> i64 {
        r.result
            .ratings
            .values()
            .values()
            .iter()
            .map(|&v| i64::from(v))
            .sum()
    };
    ExperimentSummary {
        n_complete: results.len(),
        dimensions: PerDimension::from_fn(dimension),
        weighted_score: Stat::of_scaled(
            results.iter().map(|r| i64::from(r.result.adjusted_total())),
            crate::scoring::WEIGHT_TOTAL.into(),
        ),
        raw_score: Stat::of_scaled(results.iter().map(rating_total), Dimension::COUNT as i64),
    }
}
