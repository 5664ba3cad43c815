//! Trace parsing and cleaning.
//!
//! The trace format is plain UTF-8 text with one record per line and four
//! TAB-separated columns: `user`, `item`, `tag`, `timestamp` (base-10 epoch
//! seconds). Empty lines and lines starting with `#` are skipped. There is no
//! quoting, so labels cannot contain TAB or newline.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Community, Labels, TagAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub user: String,
    pub item: String,
    pub tag: String,
    pub timestamp: u64,
    pub source_line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Abort on the first malformed line.
    #[default]
    Strict,
    /// Skip malformed lines and count them.
    Lenient,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedTrace {
    pub records: Vec<RawRecord>,
    /// Malformed lines skipped in lenient mode, as `(line, reason)`.
    pub skipped: Vec<(usize, String)>,
}

fn parse_line(line: &str, line_no: usize) -> std::result::Result<RawRecord, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 4 {
        return Err(format!("expected 4 tab-separated columns, found {}", cols.len()));
    }
    let label = |name: &str, raw: &str| {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            Err(format!("empty {name} label"))
        } else {
            Ok(trimmed.to_owned())
        }
    };
    let ts_raw = cols[3].trim();
    let timestamp = ts_raw
        .parse::<u64>()
        .map_err(|_| format!("unparseable timestamp {ts_raw:?}"))?;
    Ok(RawRecord {
        user: label("user", cols[0])?,
        item: label("item", cols[1])?,
        tag: label("tag", cols[2])?,
        timestamp,
        source_line: line_no,
    })
}

/// Reads a trace. Malformed lines are either fatal or skipped depending on
/// `mode`; read failures and invalid UTF-8 are always fatal.
pub fn parse_trace<R: BufRead>(reader: R, mode: ParseMode) -> Result<ParsedTrace> {
    let mut out = ParsedTrace::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Io(e.to_string()))?;
        let line_no = idx + 1;
        let body = line.strip_suffix('\r').unwrap_or(&line);
        if body.trim().is_empty() || body.starts_with('#') {
            continue;
        }
        match parse_line(body, line_no) {
            Ok(rec) => out.records.push(rec),
            Err(reason) => match mode {
                ParseMode::Strict => return Err(Error::MalformedLine { line: line_no, reason }),
                ParseMode::Lenient => out.skipped.push((line_no, reason)),
            },
        }
    }
    Ok(out)
}

/// Convenience wrapper for in-memory text.
pub fn parse_str(text: &str, mode: ParseMode) -> Result<ParsedTrace> {
    parse_trace(text.as_bytes(), mode)
}

/// Reads a trace file and builds its community without cleaning.
pub fn read_community<P: AsRef<Path>>(path: P, mode: ParseMode) -> Result<Community> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("cannot open {}: {e}", path.display())))?;
    let parsed = parse_trace(BufReader::new(file), mode)?;
    let (assignments, labels) = intern_records(&parsed.records);
    Ok(Community::with_labels(assignments, labels))
}

/// Writes records in the trace format, one line each.
pub fn write_trace<'a, W, I>(mut w: W, records: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RawRecord>,
{
    for r in records {
        writeln!(w, "{}\t{}\t{}\t{}", r.user, r.item, r.tag, r.timestamp)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningConfig {
    pub reserved_tags: BTreeSet<String>,
    pub burst_count: usize,
    /// Seconds. A user is a robot if `burst_count` of their records fall in a
    /// half-open window `[s, s + burst_window)`.
    pub burst_window: u64,
    pub min_timestamp: Option<u64>,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        Self {
            reserved_tags: ["no-tag", "bibtex-import"].into_iter().map(String::from).collect(),
            burst_count: 3000,
            burst_window: 300,
            min_timestamp: None,
        }
    }
}

impl CleaningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burst_count == 0 {
            return Err(Error::InvalidConfig("burst_count must be >= 1".into()));
        }
        if self.burst_window == 0 {
            return Err(Error::InvalidConfig("burst_window must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CleaningReport {
    pub input_records: usize,
    pub input_users: usize,
    pub users_removed_reserved: usize,
    pub users_removed_robot: usize,
    pub records_dropped_timestamp: usize,
    /// Records removed together with reserved-tag and robot users.
    pub assignments_removed: usize,
    pub fraction_users_removed: f64,
    pub fraction_records_removed: f64,
}

/// True when some half-open window of `window` seconds holds `count` of the
/// given timestamps.
fn has_burst(timestamps: &mut [u64], count: usize, window: u64) -> bool {
    if timestamps.len() < count {
        return false;
    }
    timestamps.sort_unstable();
    timestamps.windows(count).any(|w| w[count - 1] - w[0] < window)
}

/// Applies the cleaning rules in order: timestamp floor, reserved-tag-only
/// users, then burst (robot) users. Burst windows are evaluated on the
/// timestamp-filtered records.
pub fn clean_records(records: &[RawRecord], config: &CleaningConfig) -> Result<(Vec<RawRecord>, CleaningReport)> {
    config.validate()?;
    let input_users: HashSet<&str> = records.iter().map(|r| r.user.as_str()).collect();

    let kept: Vec<&RawRecord> = records
        .iter()
        .filter(|r| config.min_timestamp.is_none_or(|min| r.timestamp >= min))
        .collect();
    let records_dropped_timestamp = records.len() - kept.len();

    let mut by_user: HashMap<&str, Vec<&RawRecord>> = HashMap::new();
    for r in &kept {
        by_user.entry(r.user.as_str()).or_default().push(r);
    }

    let mut reserved_users = HashSet::new();
    let mut robot_users = HashSet::new();
    for (user, recs) in &by_user {
        if recs.iter().all(|r| config.reserved_tags.contains(&r.tag)) {
            reserved_users.insert(*user);
            continue;
        }
        let mut ts: Vec<u64> = recs.iter().map(|r| r.timestamp).collect();
        if has_burst(&mut ts, config.burst_count, config.burst_window) {
            robot_users.insert(*user);
        }
    }

    let out: Vec<RawRecord> = kept
        .iter()
        .filter(|r| {
            let u = r.user.as_str();
            !reserved_users.contains(u) && !robot_users.contains(u)
        })
        .map(|r| (*r).clone())
        .collect();

    let assignments_removed = kept.len() - out.len();
    let users_removed = reserved_users.len() + robot_users.len();
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let report = CleaningReport {
        input_records: records.len(),
        input_users: input_users.len(),
        users_removed_reserved: reserved_users.len(),
        users_removed_robot: robot_users.len(),
        records_dropped_timestamp,
        assignments_removed,
        fraction_users_removed: ratio(users_removed, input_users.len()),
        fraction_records_removed: ratio(records.len() - out.len(), records.len()),
    };
    Ok((out, report))
}

/// Output of [`clean`]: interned assignments in input order (not collapsed)
/// together with the label tables needed to print them.
#[derive(Debug, Clone)]
pub struct CleanedTrace {
    pub assignments: Vec<TagAssignment>,
    pub labels: Labels,
    pub report: CleaningReport,
}

impl CleanedTrace {
    pub fn into_community(self) -> Community {
        Community::with_labels(self.assignments, self.labels)
    }
}

pub fn clean(records: &[RawRecord], config: &CleaningConfig) -> Result<CleanedTrace> {
    let (kept, report) = clean_records(records, config)?;
    let (assignments, labels) = intern_records(&kept);
    Ok(CleanedTrace {
        assignments,
        labels,
        report,
    })
}

/// Interns records without any cleaning.
pub fn intern_records(records: &[RawRecord]) -> (Vec<TagAssignment>, Labels) {
    let mut labels = Labels::new();
    let assignments = records
        .iter()
        .map(|r| labels.assignment(&r.user, &r.item, &r.tag, r.timestamp))
        .collect();
    (assignments, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(user: &str, item: &str, tag: &str, ts: u64) -> RawRecord {
        RawRecord {
            user: user.into(),
            item: item.into(),
            tag: tag.into(),
            timestamp: ts,
            source_line: 0,
        }
    }

    #[test]
    fn parses_single_line() {
        let t = parse_str("u1\ti1\tt1\t100\n", ParseMode::Strict).unwrap();
        assert_eq!(
            t.records,
            vec![RawRecord {
                user: "u1".into(),
                item: "i1".into(),
                tag: "t1".into(),
                timestamp: 100,
                source_line: 1
            }]
        );
    }

    #[test]
    fn wrong_column_count_is_malformed() {
        let err = parse_str("u1\ti1\n", ParseMode::Strict).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let t = parse_str("# header\n\n#u\ti\tt\t1\n", ParseMode::Strict).unwrap();
        assert!(t.records.is_empty());
    }

    #[test]
    fn bad_timestamp_reports_line() {
        let text = "u\ti\tt\t1\nu\ti\tt\tsoon\n";
        let err = parse_str(text, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }));
        let err = parse_str("u\ti\tt\t-5\n", ParseMode::Strict).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn lenient_mode_counts_skips() {
        let text = "u\ti\tt\t1\nbroken\nu\t \tt\t2\nv\ti\tt\t3\n";
        let t = parse_str(text, ParseMode::Lenient).unwrap();
        assert_eq!(t.records.len(), 2);
        assert_eq!(t.skipped.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn crlf_line_endings() {
        let t = parse_str("u\ti\tt\t7\r\n", ParseMode::Strict).unwrap();
        assert_eq!(t.records[0].timestamp, 7);
    }

    #[test]
    fn reserved_only_user_removed() {
        let mut recs: Vec<_> = (0..5).map(|i| rec("bot", &format!("p{i}"), "no-tag", i)).collect();
        recs.push(rec("alice", "p0", "graphs", 9));
        let (out, report) = clean_records(&recs, &CleaningConfig::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(report.users_removed_reserved, 1);
        assert_eq!(report.assignments_removed, 5);
        assert!((report.fraction_users_removed - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixed_vocabulary_user_retained() {
        let recs = vec![rec("alice", "p0", "no-tag", 1), rec("alice", "p1", "graphs", 2)];
        let (out, report) = clean_records(&recs, &CleaningConfig::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(report.users_removed_reserved, 0);
    }

    #[test]
    fn robot_burst_removed() {
        let mut recs: Vec<_> = (0..3000u64)
            .map(|i| rec("robot", &format!("p{i}"), "x", 1000 + i / 10))
            .collect();
        recs.push(rec("alice", "p0", "x", 5));
        let (out, report) = clean_records(&recs, &CleaningConfig::default()).unwrap();
        assert_eq!(report.users_removed_robot, 1);
        assert_eq!(report.assignments_removed, 3000);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn burst_window_is_half_open() {
        let cfg = CleaningConfig {
            burst_count: 3,
            burst_window: 10,
            ..CleaningConfig::default()
        };
        let spread = vec![rec("a", "p", "x", 0), rec("a", "q", "x", 5), rec("a", "r", "x", 10)];
        assert_eq!(clean_records(&spread, &cfg).unwrap().1.users_removed_robot, 0);
        let tight = vec![rec("a", "p", "x", 0), rec("a", "q", "x", 5), rec("a", "r", "x", 9)];
        assert_eq!(clean_records(&tight, &cfg).unwrap().1.users_removed_robot, 1);
    }

    #[test]
    fn min_timestamp_drops_records_first() {
        let cfg = CleaningConfig {
            min_timestamp: Some(100),
            ..CleaningConfig::default()
        };
        // without the old record this user is reserved-only
        let recs = vec![
            rec("a", "p", "graphs", 50),
            rec("a", "q", "no-tag", 150),
            rec("b", "p", "x", 200),
        ];
        let (out, report) = clean_records(&recs, &cfg).unwrap();
        assert_eq!(report.records_dropped_timestamp, 1);
        assert_eq!(report.users_removed_reserved, 1);
        assert_eq!(out, vec![rec("b", "p", "x", 200)]);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = CleaningConfig {
            burst_window: 0,
            ..CleaningConfig::default()
        };
        assert!(matches!(clean_records(&[], &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let recs = vec![rec("a", "p", "x", 1), rec("b", "q", "y", 2)];
        let mut buf = Vec::new();
        write_trace(&mut buf, &recs).unwrap();
        let back = parse_str(std::str::from_utf8(&buf).unwrap(), ParseMode::Strict).unwrap();
        let strip = |v: Vec<RawRecord>| {
            v.into_iter()
                .map(|r| (r.user, r.item, r.tag, r.timestamp))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(back.records), strip(recs));
    }
}
