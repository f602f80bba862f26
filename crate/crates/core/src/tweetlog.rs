//! Message-log data model, CSV/JSON-lines I/O, cashtag filtering and export
//! of simulated cascades into the same schema.
//!
//! A record is one occurrence of a message. Originals have `is_retweet =
//! false` and no origin; retweets name the user who started the cascade (not
//! the account they retweeted from).

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cascade::CascadeTrace;

pub const CSV_HEADER: [&str; 6] = ["message_id", "text", "user", "timestamp", "is_retweet", "origin_user"];

#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("missing column '{0}' in CSV header")]
    MissingColumn(&'static str),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub message_id: String,
    /// Empty for simulated records.
    pub text: String,
    pub user: String,
    /// Epoch seconds or simulation step.
    pub timestamp: i64,
    pub is_retweet: bool,
    pub origin_user: Option<String>,
}

impl MessageRecord {
    fn check(&self) -> Result<(), String> {
        if self.user.is_empty() {
            return Err("empty user".into());
        }
        match (self.is_retweet, &self.origin_user) {
            (true, None) => Err("retweet without origin_user".into()),
            (false, Some(_)) => Err("original message with origin_user".into()),
            _ => Ok(()),
        }
    }
}

/// Records in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessageLog {
    pub records: Vec<MessageRecord>,
}

impl MessageLog {
    pub fn new(records: Vec<MessageRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MessageRecord> {
        self.records.iter()
    }

    pub fn extend(&mut self, other: MessageLog) {
        self.records.extend(other.records);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    Csv,
    Jsonl,
}

impl LogFormat {
    /// Guesses from a file extension; anything but `.jsonl`/`.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => LogFormat::Jsonl,
            _ => LogFormat::Csv,
        }
    }
}

impl std::str::FromStr for LogFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(LogFormat::Csv),
            "jsonl" | "json" | "ndjson" => Ok(LogFormat::Jsonl),
            other => Err(format!("unknown log format '{other}' (csv, jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub format: LogFormat,
    /// Skip malformed rows instead of failing on the first one.
    pub lenient: bool,
    /// Drop a leading `RT @name:` before hashing text into a message id.
    pub strip_rt_prefix: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            format: LogFormat::Csv,
            lenient: false,
            strip_rt_prefix: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub log: MessageLog,
    /// Rows skipped in lenient mode, with line number and reason.
    pub skipped: Vec<(u64, String)>,
}

/// Lowercases, collapses whitespace and optionally removes a leading
/// `rt @name:` token.
pub fn normalize_text(text: &str, strip_rt_prefix: bool) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    if strip_rt_prefix {
        if let Some(rest) = collapsed.strip_prefix("rt @") {
            let name_len = rest
                .find(|ch: char| !(ch.is_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            if name_len > 0 && rest[name_len..].starts_with(':') {
                return rest[name_len + 1..].trim_start().to_string();
            }
        }
    }
    collapsed
}

/// Stable id for a message text: hex SHA-256 prefix of the normalized text.
pub fn message_id_for(text: &str, strip_rt_prefix: bool) -> String {
    let digest = Sha256::digest(normalize_text(text, strip_rt_prefix).as_bytes());
    digest[..12].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_log<R: Read>(mut input: R, options: &ParseOptions) -> Result<ParseOutcome, LogError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    match options.format {
        LogFormat::Csv => parse_csv(&text, options),
        LogFormat::Jsonl => parse_jsonl(&text, options),
    }
}

fn finish_record(mut rec: MessageRecord, options: &ParseOptions) -> Result<MessageRecord, String> {
    if rec.message_id.is_empty() {
        if rec.text.trim().is_empty() {
            return Err("record has neither message_id nor text".into());
        }
        rec.message_id = message_id_for(&rec.text, options.strip_rt_prefix);
    }
    rec.check()?;
    Ok(rec)
}

fn parse_csv(text: &str, options: &ParseOptions) -> Result<ParseOutcome, LogError> {
    // Metadata comment lines may precede the header.
    let mut offset = 0u64;
    let mut body = text;
    while body.starts_with('#') {
        offset += 1;
        body = body.find('\n').map_or("", |i| &body[i + 1..]);
    }
    let mut outcome = ParseOutcome::default();
    if body.trim().is_empty() {
        return Ok(outcome);
    }

    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(body.as_bytes());
    let headers = reader.headers()?.clone();
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(CSV_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(LogError::MissingColumn(name))?;
    }

    for result in reader.records() {
        let (line, parsed) = match result {
            Ok(row) => {
                let line = row.position().map_or(0, |p| p.line()) + offset;
                (
                    line,
                    csv_row(&row, &columns).and_then(|rec| finish_record(rec, options)),
                )
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line()) + offset;
                (line, Err(e.to_string()))
            }
        };
        match parsed {
            Ok(rec) => outcome.log.records.push(rec),
            Err(message) if options.lenient => outcome.skipped.push((line, message)),
            Err(message) => return Err(LogError::Row { line, message }),
        }
    }
    Ok(outcome)
}

fn csv_row(row: &csv::StringRecord, columns: &[usize; 6]) -> Result<MessageRecord, String> {
    if row.len() != CSV_HEADER.len() {
        return Err(format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()));
    }
    let field = |i: usize| row.get(columns[i]).unwrap_or("");
    let timestamp = field(3)
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("bad timestamp '{}'", field(3)))?;
    let is_retweet = match field(4).trim().to_ascii_lowercase().as_str() {
        "1" | "true" => true,
        "0" | "false" => false,
        other => return Err(format!("is_retweet must be 0/1 or true/false, found '{other}'")),
    };
    let origin = field(5);
    Ok(MessageRecord {
        message_id: field(0).to_string(),
        text: field(1).to_string(),
        user: field(2).to_string(),
        timestamp,
        is_retweet,
        origin_user: (!origin.is_empty()).then(|| origin.to_string()),
    })
}

#[derive(Deserialize)]
struct JsonRecord {
    #[serde(default)]
    message_id: Option<String>,
    #[serde(default)]
    text: Option<String>,
    user: String,
    timestamp: i64,
    is_retweet: bool,
    #[serde(default)]
    origin_user: Option<String>,
}

fn parse_jsonl(text: &str, options: &ParseOptions) -> Result<ParseOutcome, LogError> {
    let mut outcome = ParseOutcome::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed = serde_json::from_str::<JsonRecord>(trimmed)
            .map_err(|e| e.to_string())
            .and_then(|j| {
                finish_record(
                    MessageRecord {
                        message_id: j.message_id.unwrap_or_default(),
                        text: j.text.unwrap_or_default(),
                        user: j.user,
                        timestamp: j.timestamp,
                        is_retweet: j.is_retweet,
                        origin_user: j.origin_user.filter(|o| !o.is_empty()),
                    },
                    options,
                )
            });
        match parsed {
            Ok(rec) => outcome.log.records.push(rec),
            Err(message) if options.lenient => outcome.skipped.push((line, message)),
            Err(message) => return Err(LogError::Row { line, message }),
        }
    }
    Ok(outcome)
}

pub fn write_log<W: Write>(log: &MessageLog, format: LogFormat, out: W) -> Result<(), LogError> {
    match format {
        LogFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in &log.records {
                let ts = r.timestamp.to_string();
                w.write_record([
                    r.message_id.as_str(),
                    r.text.as_str(),
                    r.user.as_str(),
                    ts.as_str(),
                    if r.is_retweet { "1" } else { "0" },
                    r.origin_user.as_deref().unwrap_or(""),
                ])?;
            }
            w.flush()?;
        }
        LogFormat::Jsonl => {
            let mut out = out;
            for r in &log.records {
                serde_json::to_writer(&mut out, r).map_err(std::io::Error::other)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// One ticker per line; blank lines and `#` comments are ignored.
pub fn read_symbols<R: BufRead>(input: R) -> Result<Vec<String>, LogError> {
    let mut symbols = Vec::new();
    for line in input.lines() {
        let line = line?;
        let s = line.trim().trim_start_matches('$');
        if !s.is_empty() && !s.starts_with('#') {
            symbols.push(s.to_ascii_uppercase());
        }
    }
    Ok(symbols)
}

/// Whether `text` contains `$TICKER` for one of `symbols` (uppercase), with
/// the ticker ending at a token boundary and the `$` not glued to a word.
pub fn has_cashtag(text: &str, symbols: &HashSet<String>) -> bool {
    let bytes = text.as_bytes();
    for (i, _) in text.match_indices('$') {
        if i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_') {
            continue;
        }
        let token: String = text[i + 1..]
            .chars()
            .take_while(|ch| ch.is_ascii_alphanumeric())
            .collect();
        if !token.is_empty() && symbols.contains(&token.to_ascii_uppercase()) {
            return true;
        }
    }
    false
}

/// Keeps records whose text carries one of the cashtags; order is preserved.
pub fn cashtag_filter(log: &MessageLog, symbols: &[String]) -> MessageLog {
    let set: HashSet<String> = symbols.iter().map(|s| s.to_ascii_uppercase()).collect();
    MessageLog::new(
        log.records
            .iter()
            .filter(|r| has_cashtag(&r.text, &set))
            .cloned()
            .collect(),
    )
}

/// Converts a cascade trace into log records for message `run_id`.
///
/// Users are named `<prefix><node id>`; retweets credit the cascade root.
pub fn export_trace(trace: &CascadeTrace, run_id: &str, user_prefix: &str) -> MessageLog {
    MessageLog::new(
        trace
            .events
            .iter()
            .map(|e| {
                let is_retweet = e.source.is_some();
                MessageRecord {
                    message_id: run_id.to_string(),
                    text: String::new(),
                    user: format!("{user_prefix}{}", e.target),
                    timestamp: i64::from(e.step),
                    is_retweet,
                    origin_user: is_retweet.then(|| format!("{user_prefix}{}", e.root)),
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::Exposure;

    fn csv_opts(lenient: bool) -> ParseOptions {
        ParseOptions {
            lenient,
            ..ParseOptions::default()
        }
    }

    #[test]
    fn empty_input_is_empty_log() {
        assert!(parse_log("".as_bytes(), &csv_opts(false)).unwrap().log.is_empty());
        let header_only = "message_id,text,user,timestamp,is_retweet,origin_user\n";
        assert!(parse_log(header_only.as_bytes(), &csv_opts(false))
            .unwrap()
            .log
            .is_empty());
        let jsonl = ParseOptions {
            format: LogFormat::Jsonl,
            ..ParseOptions::default()
        };
        assert!(parse_log("".as_bytes(), &jsonl).unwrap().log.is_empty());
    }

    #[test]
    fn identical_normalized_text_shares_id() {
        let data = "message_id,text,user,timestamp,is_retweet,origin_user\n\
                    ,Buy  $AAPL now,alice,1,0,\n\
                    ,RT @alice: buy $aapl   NOW,bob,2,1,alice\n\
                    ,something else,carol,3,0,\n";
        let log = parse_log(data.as_bytes(), &csv_opts(false)).unwrap().log;
        assert_eq!(log.records[0].message_id, log.records[1].message_id);
        assert_ne!(log.records[0].message_id, log.records[2].message_id);
        assert_eq!(log.records[1].origin_user.as_deref(), Some("alice"));

        let no_strip = ParseOptions {
            strip_rt_prefix: false,
            ..csv_opts(false)
        };
        let log = parse_log(data.as_bytes(), &no_strip).unwrap().log;
        assert_ne!(log.records[0].message_id, log.records[1].message_id);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_text("  A\tB \n C ", false), "a b c");
        assert_eq!(normalize_text("RT @some_user: Hello", true), "hello");
        assert_eq!(normalize_text("RT @: Hello", true), "rt @: hello");
        assert_eq!(normalize_text("rt @x hello", true), "rt @x hello");
    }

    #[test]
    fn lenient_mode_skips_malformed_row() {
        let mut data = String::from("message_id,text,user,timestamp,is_retweet,origin_user\n");
        for i in 0..10 {
            if i == 4 {
                data.push_str("m4,broken,user4,not-a-number,0,\n");
            } else {
                data.push_str(&format!("m{i},hello,user{i},{i},0,\n"));
            }
        }
        let out = parse_log(data.as_bytes(), &csv_opts(true)).unwrap();
        assert_eq!(out.log.len(), 9);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].0, 6);

        match parse_log(data.as_bytes(), &csv_opts(false)) {
            Err(LogError::Row { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn origin_invariant_enforced() {
        let data = "message_id,text,user,timestamp,is_retweet,origin_user\nm,t,u,1,1,\n";
        assert!(parse_log(data.as_bytes(), &csv_opts(false)).is_err());
        let data = "message_id,text,user,timestamp,is_retweet,origin_user\nm,t,u,1,0,v\n";
        assert!(parse_log(data.as_bytes(), &csv_opts(false)).is_err());
        let data = "message_id,text,user,timestamp,is_retweet,origin_user\n,,u,1,0,\n";
        assert!(parse_log(data.as_bytes(), &csv_opts(false)).is_err());
    }

    #[test]
    fn metadata_lines_and_column_order() {
        let data = "# cascadelab 0.1.0 seed=3\n\
                    user,timestamp,message_id,is_retweet,origin_user,text\n\
                    bob,5,m1,1,alice,\"hi, there\"\n";
        let log = parse_log(data.as_bytes(), &csv_opts(false)).unwrap().log;
        assert_eq!(log.records[0].text, "hi, there");
        assert_eq!(log.records[0].user, "bob");
        let bad = "# meta\nmessage_id,text\nm,t\n";
        assert!(matches!(
            parse_log(bad.as_bytes(), &csv_opts(false)),
            Err(LogError::MissingColumn("user"))
        ));
    }

    #[test]
    fn jsonl_parses_and_writes() {
        let data = "{\"message_id\":\"a\",\"user\":\"x\",\"timestamp\":1,\"is_retweet\":false}\n\
                    \n\
                    {\"text\":\"Hi\",\"user\":\"y\",\"timestamp\":2,\"is_retweet\":true,\"origin_user\":\"x\"}\n\
                    {\"user\":1}\n";
        let opts = ParseOptions {
            format: LogFormat::Jsonl,
            lenient: true,
            ..ParseOptions::default()
        };
        let out = parse_log(data.as_bytes(), &opts).unwrap();
        assert_eq!(out.log.len(), 2);
        assert_eq!(out.skipped[0].0, 4);
        assert_eq!(out.log.records[1].message_id, message_id_for("hi", true));

        let mut buf = Vec::new();
        write_log(&out.log, LogFormat::Jsonl, &mut buf).unwrap();
        let again = parse_log(buf.as_slice(), &opts).unwrap().log;
        assert_eq!(again, out.log);
    }

    #[test]
    fn cashtags() {
        let symbols = vec!["AAPL".to_string(), "MSFT".to_string()];
        let set: HashSet<String> = symbols.iter().cloned().collect();
        assert!(has_cashtag("buy $AAPL now", &set));
        assert!(has_cashtag("$aapl", &set));
        assert!(has_cashtag("($MSFT).", &set));
        assert!(!has_cashtag("apple pie recipe", &set));
        assert!(!has_cashtag("$AAPLE rocks", &set));
        assert!(!has_cashtag("US$AAPL", &set));
        assert!(!has_cashtag("AAPL without sign", &set));
        assert!(has_cashtag("$AAPLE and $AAPL", &set));

        let rec = |t: &str| MessageRecord {
            message_id: t.into(),
            text: t.into(),
            user: "u".into(),
            timestamp: 0,
            is_retweet: false,
            origin_user: None,
        };
        let log = MessageLog::new(vec![rec("buy $AAPL now"), rec("apple pie"), rec("$MSFT up")]);
        let filtered = cashtag_filter(&log, &symbols);
        assert_eq!(filtered.len(), 2);
        assert_eq!(filtered.records[1].text, "$MSFT up");
    }

    #[test]
    fn symbols_file() {
        let s = read_symbols("AAPL\n\n# comment\n msft \n$GOOG\n".as_bytes()).unwrap();
        assert_eq!(s, vec!["AAPL", "MSFT", "GOOG"]);
    }

    #[test]
    fn export_maps_schema() {
        let trace = CascadeTrace {
            events: vec![
                Exposure {
                    step: 0,
                    source: None,
                    target: 7,
                    root: 7,
                },
                Exposure {
                    step: 3,
                    source: Some(9),
                    target: 12,
                    root: 7,
                },
            ],
            final_step: 5,
            truncated: false,
        };
        let log = export_trace(&trace, "run-1", "u");
        assert_eq!(log.len(), trace.exposed_count());
        let seed = &log.records[0];
        assert_eq!(
            (seed.user.as_str(), seed.is_retweet, seed.origin_user.as_deref()),
            ("u7", false, None)
        );
        let rt = &log.records[1];
        assert_eq!(
            (rt.user.as_str(), rt.timestamp, rt.is_retweet, rt.origin_user.as_deref()),
            ("u12", 3, true, Some("u7"))
        );
        assert!(log.iter().all(|r| r.message_id == "run-1"));
    }
}
