use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::tweetlog::MessageLog;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserStatRow {
    pub user: String,
    /// Original (non-retweet) records by the user.
    pub tweets: u64,
    /// Retweet records crediting the user as origin.
    pub retweets: u64,
    /// `retweets / tweets` rounded half up; `None` when the user has no tweets.
    pub avg: Option<u64>,
}

fn round_half_up(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

/// Tweets, attributed retweets and their rounded ratio per user, sorted by
/// descending average (undefined averages last, then by name).
pub fn user_stats(log: &MessageLog) -> Vec<UserStatRow> {
    let mut acc: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in log.iter() {
        if r.is_retweet {
            if let Some(origin) = r.origin_user.as_deref() {
                acc.entry(origin).or_default().1 += 1;
            }
        } else {
            acc.entry(r.user.as_str()).or_default().0 += 1;
        }
    }
    let mut rows: Vec<UserStatRow> = acc
        .into_iter()
        .map(|(user, (tweets, retweets))| UserStatRow {
            user: user.to_string(),
            tweets,
            retweets,
            avg: (tweets > 0).then(|| round_half_up(retweets, tweets)),
        })
        .collect();
    rows.sort_by(|a, b| match (a.avg, b.avg) {
        (Some(x), Some(y)) => y.cmp(&x).then_with(|| a.user.cmp(&b.user)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.user.cmp(&b.user),
    });
    rows
}

/// `user,tweets,retweets,avg`; an undefined average is written as `NA`.
pub fn write_user_stats_csv<W: Write>(rows: &[UserStatRow], mut out: W) -> io::Result<()> {
    writeln!(out, "user,tweets,retweets,avg")?;
    for r in rows {
        let avg = r.avg.map_or_else(|| "NA".to_string(), |a| a.to_string());
        writeln!(out, "{},{},{},{}", r.user, r.tweets, r.retweets, avg)?;
    }
    Ok(())
}
