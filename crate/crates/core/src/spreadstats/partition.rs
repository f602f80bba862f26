use std::collections::BTreeSet;

use rand::seq::index;

use super::{RepetitionTable, StatsError};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionConfig {
    /// Counts at or above this are highly repeated.
    pub high_threshold: u64,
    pub low_min: u64,
    pub low_max: u64,
    /// Highly repeated messages at or above this count are dropped as outliers.
    pub outlier_cutoff: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            high_threshold: 700,
            low_min: 100,
            low_max: 400,
            outlier_cutoff: 10_000,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.low_min > self.low_max {
            return Err(StatsError::InvalidThresholds(format!(
                "low_min {} exceeds low_max {}",
                self.low_min, self.low_max
            )));
        }
        if self.low_max >= self.high_threshold {
            return Err(StatsError::InvalidThresholds(format!(
                "low_max {} must be below high_threshold {}",
                self.low_max, self.high_threshold
            )));
        }
        if self.outlier_cutoff < self.high_threshold {
            return Err(StatsError::InvalidThresholds(format!(
                "outlier_cutoff {} below high_threshold {}",
                self.outlier_cutoff, self.high_threshold
            )));
        }
        Ok(())
    }
}

/// Messages split by repetition count. Messages seen once belong to no set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessagePartition {
    pub high: BTreeSet<String>,
    pub low: BTreeSet<String>,
    /// Repeated messages outside both bands.
    pub discarded: BTreeSet<String>,
    /// `(message_id, count)` removed from the high band, by descending count.
    pub outliers_removed: Vec<(String, u64)>,
}

pub fn partition_messages(table: &RepetitionTable, config: &PartitionConfig) -> Result<MessagePartition, StatsError> {
    config.validate()?;
    let mut p = MessagePartition::default();
    for (id, &count) in &table.counts {
        if count <= 1 {
            continue;
        }
        if count >= config.outlier_cutoff {
            p.outliers_removed.push((id.clone(), count));
        } else if count >= config.high_threshold {
            p.high.insert(id.clone());
        } else if (config.low_min..=config.low_max).contains(&count) {
            p.low.insert(id.clone());
        } else {
            p.discarded.insert(id.clone());
        }
    }
    p.outliers_removed
        .sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(p)
}

/// Down-samples the larger of the two bands to the size of the smaller one.
///
/// Deterministic for a given seed; callers repeat with several seeds to
/// check that the random choice does not drive their results.
pub fn equalize_groups(partition: &MessagePartition, rng_seed: u64) -> Result<(Vec<String>, Vec<String>), StatsError> {
    let high: Vec<String> = partition.high.iter().cloned().collect();
    let low: Vec<String> = partition.low.iter().cloned().collect();
    if high.is_empty() || low.is_empty() {
        return Err(StatsError::EmptyGroup {
            high: high.len(),
            low: low.len(),
        });
    }
    let size = high.len().min(low.len());
    let mut rng = rng_from_seed(rng_seed);
    let mut shrink = |group: Vec<String>| -> Vec<String> {
        if group.len() == size {
            return group;
        }
        let mut keep = index::sample(&mut rng, group.len(), size).into_vec();
        keep.sort_unstable();
        keep.into_iter().map(|i| group[i].clone()).collect()
    };
    let high = shrink(high);
    let low = shrink(low);
    Ok((high, low))
}
