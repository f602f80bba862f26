//! Earliest-spreader records and the rate of repeated names in them.
//!
//! For a set of messages, the record vector at depth `m` concatenates the
//! first `m` users (by timestamp, then log order) of every message. Its
//! recurrence rate is `(len - distinct) / len`: zero when every entry is a
//! different user, close to one when a few accounts start everything.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{self, Write};

use rand::seq::index;

use super::StatsError;
use crate::seed::rng_from_seed;
use crate::tweetlog::MessageLog;

/// Users of each message ordered by (timestamp, position in the log).
#[derive(Debug, Clone, Default)]
pub struct SpreaderIndex<'a> {
    by_message: HashMap<&'a str, Vec<&'a str>>,
}

impl<'a> SpreaderIndex<'a> {
    pub fn new(log: &'a MessageLog) -> Self {
        let mut grouped: HashMap<&str, Vec<(i64, usize, &str)>> = HashMap::new();
        for (pos, r) in log.iter().enumerate() {
            grouped
                .entry(r.message_id.as_str())
                .or_default()
                .push((r.timestamp, pos, r.user.as_str()));
        }
        let by_message = grouped
            .into_iter()
            .map(|(id, mut occ)| {
                occ.sort_unstable_by_key(|&(t, pos, _)| (t, pos));
                (id, occ.into_iter().map(|(_, _, u)| u).collect())
            })
            .collect();
        Self { by_message }
    }

    pub fn spreaders(&self, message_id: &str) -> Result<&[&'a str], StatsError> {
        self.by_message
            .get(message_id)
            .map(Vec::as_slice)
            .ok_or_else(|| StatsError::UnknownMessage(message_id.to_string()))
    }
}

/// The record vector of the `m` earliest spreaders of each message, in the
/// order the messages are given.
pub fn earliest_spreaders<S: AsRef<str>>(
    log: &MessageLog,
    messages: &[S],
    m: usize,
) -> Result<Vec<String>, StatsError> {
    if m == 0 {
        return Err(StatsError::ZeroM);
    }
    let index = SpreaderIndex::new(log);
    let mut out = Vec::new();
    for id in messages {
        let users = index.spreaders(id.as_ref())?;
        out.extend(users.iter().take(m).map(|u| u.to_string()));
    }
    Ok(out)
}

pub fn recurrence_rate<S: AsRef<str>>(vector: &[S]) -> Result<f64, StatsError> {
    if vector.is_empty() {
        return Err(StatsError::EmptyVector);
    }
    let distinct: HashSet<&str> = vector.iter().map(AsRef::as_ref).collect();
    Ok((vector.len() - distinct.len()) as f64 / vector.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub m: usize,
    pub rate: f64,
    pub vector_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCurve {
    pub group: String,
    pub points: Vec<CurvePoint>,
}

impl RecurrenceCurve {
    pub fn rate_at(&self, m: usize) -> Option<f64> {
        self.points.get(m.checked_sub(1)?).map(|p| p.rate)
    }
}

/// Recurrence rate for every depth `m = 1..=m_max`, built incrementally:
/// depth `m` adds the `m`-th spreader of each message that has one.
pub fn recurrence_curve<S: AsRef<str>>(
    log: &MessageLog,
    messages: &[S],
    m_max: usize,
    group: &str,
) -> Result<RecurrenceCurve, StatsError> {
    if m_max == 0 {
        return Err(StatsError::ZeroM);
    }
    let index = SpreaderIndex::new(log);
    let lists = messages
        .iter()
        .map(|id| index.spreaders(id.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    if lists.is_empty() {
        return Err(StatsError::EmptyVector);
    }

    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut len = 0usize;
    let mut points = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        for users in &lists {
            if let Some(&u) = users.get(m - 1) {
                *seen.entry(u).or_insert(0) += 1;
                len += 1;
            }
        }
        points.push(CurvePoint {
            m,
            rate: (len - seen.len()) as f64 / len as f64,
            vector_len: len,
        });
    }
    Ok(RecurrenceCurve {
        group: group.to_string(),
        points,
    })
}

/// `m,R,group,vector_len` rows for each curve in turn.
pub fn write_curve_csv<W: Write>(curves: &[RecurrenceCurve], mut out: W) -> io::Result<()> {
    writeln!(out, "m,R,group,vector_len")?;
    for curve in curves {
        for p in &curve.points {
            writeln!(out, "{},{},{},{}", p.m, p.rate, curve.group, p.vector_len)?;
        }
    }
    Ok(())
}

/// Draws `per_message` distinct spreaders from each of `message_count`
/// randomly chosen messages (fewer when a message has fewer users).
pub fn sample_spreaders<S: AsRef<str>>(
    log: &MessageLog,
    messages: &[S],
    message_count: usize,
    per_message: usize,
    rng_seed: u64,
) -> Result<Vec<String>, StatsError> {
    let index = SpreaderIndex::new(log);
    let mut rng = rng_from_seed(rng_seed);
    let mut chosen = index::sample(&mut rng, messages.len(), message_count.min(messages.len())).into_vec();
    chosen.sort_unstable();
    let mut users = Vec::new();
    for i in chosen {
        let mut distinct: Vec<&str> = index.spreaders(messages[i].as_ref())?.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let mut picks = index::sample(&mut rng, distinct.len(), per_message.min(distinct.len())).into_vec();
        picks.sort_unstable();
        users.extend(picks.into_iter().map(|p| distinct[p].to_string()));
    }
    Ok(users)
}

/// For each sampled user, the repetition counts of every message the user
/// took part in, keeping only repeated messages; summed into one histogram
/// of count value -> occurrences.
pub fn user_repetition_histogram<S: AsRef<str>>(log: &MessageLog, sampled_users: &[S]) -> BTreeMap<u64, u64> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut by_user: HashMap<&str, HashSet<&str>> = HashMap::new();
    for r in log.iter() {
        *counts.entry(r.message_id.as_str()).or_insert(0) += 1;
        by_user
            .entry(r.user.as_str())
            .or_default()
            .insert(r.message_id.as_str());
    }
    let mut hist = BTreeMap::new();
    for user in sampled_users {
        let Some(messages) = by_user.get(user.as_ref()) else {
            continue;
        };
        for id in messages {
            let c = counts[id];
            if c > 1 {
                *hist.entry(c).or_insert(0) += 1;
            }
        }
    }
    hist
}
