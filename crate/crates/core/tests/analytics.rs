use std::collections::HashSet;

use cascadelab::spreadstats::{
    earliest_spreaders, partition_messages, recurrence_curve, recurrence_rate, repetition_counts, PartitionConfig,
};
use cascadelab::tweetlog::{
    cashtag_filter, has_cashtag, parse_log, write_log, LogFormat, MessageLog, MessageRecord, ParseOptions,
};
use proptest::prelude::*;

fn record() -> impl Strategy<Value = MessageRecord> {
    (
        "m[0-9]{1,2}",
        "[ -~\n\"]{0,30}",
        "[a-z]{1,6}",
        -1_000i64..1_000_000,
        proptest::option::of("[a-z]{1,6}"),
    )
        .prop_map(|(message_id, text, user, timestamp, origin)| MessageRecord {
            message_id,
            text,
            user,
            timestamp,
            is_retweet: origin.is_some(),
            origin_user: origin,
        })
}

fn log() -> impl Strategy<Value = MessageLog> {
    proptest::collection::vec(record(), 0..60).prop_map(MessageLog::new)
}

fn tweet_text() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            Just("$AAPL".to_string()),
            Just("$msft".to_string()),
            Just("x$AAPL".to_string()),
            Just("$TSLA".to_string()),
            Just("$".to_string()),
            "[a-z]{1,5}",
        ],
        0..6,
    )
    .prop_map(|words| words.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trip(log in log()) {
        for format in [LogFormat::Csv, LogFormat::Jsonl] {
            let mut buf = Vec::new();
            write_log(&log, format, &mut buf).unwrap();
            let opts = ParseOptions { format, ..ParseOptions::default() };
            let back = parse_log(buf.as_slice(), &opts).unwrap();
            prop_assert!(back.skipped.is_empty());
            prop_assert_eq!(&back.log, &log);

            let mut again = Vec::new();
            write_log(&back.log, format, &mut again).unwrap();
            prop_assert_eq!(&again, &buf);
        }
    }

    #[test]
    fn cashtag_filter_is_an_idempotent_subset(texts in proptest::collection::vec(tweet_text(), 0..30)) {
        let log = MessageLog::new(
            texts
                .into_iter()
                .enumerate()
                .map(|(i, text)| MessageRecord {
                    message_id: format!("m{i}"),
                    text,
                    user: "u".into(),
                    timestamp: i as i64,
                    is_retweet: false,
                    origin_user: None,
                })
                .collect(),
        );
        let symbols = vec!["AAPL".to_string(), "MSFT".to_string()];
        let once = cashtag_filter(&log, &symbols);
        prop_assert_eq!(&cashtag_filter(&once, &symbols), &once);
        let mut rest = log.iter();
        for kept in once.iter() {
            prop_assert!(rest.any(|r| r == kept));
        }
        let set: HashSet<String> = symbols.into_iter().collect();
        let expected = log.iter().filter(|r| {
            r.text.split(' ').any(|w| w.eq_ignore_ascii_case("$AAPL") || w.eq_ignore_ascii_case("$MSFT"))
        }).count();
        prop_assert_eq!(once.len(), expected);
        prop_assert!(once.iter().all(|r| has_cashtag(&r.text, &set)));
    }

    #[test]
    fn repetition_counts_conserve_records(log in log()) {
        let table = repetition_counts(&log);
        prop_assert_eq!(table.total_records(), log.len() as u64);
        let hist = table.histogram();
        prop_assert_eq!(hist.iter().map(|(v, c)| v * c).sum::<u64>(), log.len() as u64);
        prop_assert_eq!(hist.values().sum::<u64>() as usize, table.message_count());
    }

    #[test]
    fn partition_covers_repeated_messages(
        counts in proptest::collection::btree_map("[a-z]{1,4}", 1u64..20_000, 0..80),
    ) {
        let table = cascadelab::spreadstats::RepetitionTable { counts: counts.clone() };
        let cfg = PartitionConfig::default();
        let p = partition_messages(&table, &cfg).unwrap();
        let outliers: HashSet<&String> = p.outliers_removed.iter().map(|(id, _)| id).collect();
        for (id, &c) in &counts {
            let memberships = [
                p.high.contains(id),
                p.low.contains(id),
                p.discarded.contains(id),
                outliers.contains(id),
            ]
            .iter()
            .filter(|&&b| b)
            .count();
            prop_assert_eq!(memberships, usize::from(c > 1), "{} with count {}", id, c);
            if p.high.contains(id) {
                prop_assert!((700..10_000).contains(&c));
            }
            if p.low.contains(id) {
                prop_assert!((100..=400).contains(&c));
            }
        }
    }

    #[test]
    fn incremental_curve_matches_recomputation(log in log(), m_max in 1usize..12) {
        prop_assume!(!log.is_empty());
        let ids: Vec<String> = repetition_counts(&log).counts.into_keys().collect();
        let curve = recurrence_curve(&log, &ids, m_max, "g").unwrap();
        prop_assert_eq!(curve.points.len(), m_max);
        for p in &curve.points {
            let v = earliest_spreaders(&log, &ids, p.m).unwrap();
            prop_assert_eq!(v.len(), p.vector_len);
            prop_assert_eq!(recurrence_rate(&v).unwrap(), p.rate);
            prop_assert!((0.0..1.0).contains(&p.rate));
        }
    }
}
