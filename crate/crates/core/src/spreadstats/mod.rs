//! Analytics over message logs: repetition counts, power-law fits,
//! high/low repetition partitions, earliest-spreader recurrence curves and
//! per-user spread statistics.

mod partition;
mod powerlaw;
mod recurrence;
mod users;

use std::collections::BTreeMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::tweetlog::MessageLog;

pub use partition::{equalize_groups, partition_messages, MessagePartition, PartitionConfig};
pub use powerlaw::{fit_power_law, fit_power_law_samples, FitMethod, PowerLawFit};
pub use recurrence::{
    earliest_spreaders, recurrence_curve, recurrence_rate, sample_spreaders, user_repetition_histogram,
    write_curve_csv, CurvePoint, RecurrenceCurve, SpreaderIndex,
};
pub use users::{user_stats, write_user_stats_csv, UserStatRow};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} observations in [{xmin}, {xmax}], found {found}")]
    InsufficientData {
        needed: usize,
        found: usize,
        xmin: u64,
        xmax: u64,
    },
    #[error("invalid fit window [{xmin}, {xmax}]")]
    InvalidWindow { xmin: u64, xmax: u64 },
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("message '{0}' does not occur in the log")]
    UnknownMessage(String),
    #[error("record vector is empty")]
    EmptyVector,
    #[error("both groups must be non-empty (high {high}, low {low})")]
    EmptyGroup { high: usize, low: usize },
    #[error("m must be at least 1")]
    ZeroM,
}

/// Occurrence count per message id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepetitionTable {
    pub counts: BTreeMap<String, u64>,
}

impl RepetitionTable {
    /// Count value -> number of messages with that count.
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for &c in self.counts.values() {
            *hist.entry(c).or_insert(0) += 1;
        }
        hist
    }

    pub fn total_records(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn message_count(&self) -> usize {
        self.counts.len()
    }

    /// Messages that occur more than once.
    pub fn repeated_messages(&self) -> usize {
        self.counts.values().filter(|&&c| c > 1).count()
    }

    pub fn count(&self, message_id: &str) -> Option<u64> {
        self.counts.get(message_id).copied()
    }
}

pub fn repetition_counts(log: &MessageLog) -> RepetitionTable {
    let mut counts = BTreeMap::new();
    for r in log.iter() {
        *counts.entry(r.message_id.clone()).or_insert(0) += 1;
    }
    RepetitionTable { counts }
}

/// `value,count` rows in ascending value order.
pub fn write_histogram_csv<W: Write>(hist: &BTreeMap<u64, u64>, mut out: W) -> io::Result<()> {
    writeln!(out, "value,count")?;
    for (v, c) in hist {
        writeln!(out, "{v},{c}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tweetlog::MessageRecord;

    pub(crate) fn log_of(ids: &[&str]) -> MessageLog {
        MessageLog::new(
            ids.iter()
                .enumerate()
                .map(|(i, id)| MessageRecord {
                    message_id: id.to_string(),
                    text: String::new(),
                    user: format!("user{i}"),
                    timestamp: i as i64,
                    is_retweet: false,
                    origin_user: None,
                })
                .collect(),
        )
    }

    #[test]
    fn single_record() {
        let t = repetition_counts(&log_of(&["x"]));
        assert_eq!(t.count("x"), Some(1));
        assert_eq!(t.repeated_messages(), 0);
    }

    #[test]
    fn small_fixture() {
        let t = repetition_counts(&log_of(&["A", "B", "A", "C", "A"]));
        assert_eq!(t.count("A"), Some(3));
        assert_eq!(t.count("B"), Some(1));
        assert_eq!(t.count("C"), Some(1));
        assert_eq!(t.repeated_messages(), 1);
        let h = t.histogram();
        assert_eq!(h.get(&1), Some(&2));
        assert_eq!(h.get(&3), Some(&1));
        let mass: u64 = h.iter().map(|(v, c)| v * c).sum();
        assert_eq!(mass, 5);
    }

    #[test]
    fn histogram_csv() {
        let mut buf = Vec::new();
        write_histogram_csv(&BTreeMap::from([(1, 4), (7, 1)]), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value,count\n1,4\n7,1\n");
    }
}
