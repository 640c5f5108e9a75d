//! From web-usage logs to formal contexts.
//!
//! Input logs are session-aggregated CSV: one row per (user, site)
//! pair with first/last visit timestamps and a session count; internal
//! logs carry an extra page column and the page becomes the attribute.
//! Three reductions turn the raw rows into a context worth looking at:
//!
//! 1. a merge map fuses families of pages or sites into one attribute
//!    (all `/personal/...` pages become "a personal web-page"),
//! 2. an optional allowlist scopes the attributes to a thematic group,
//! 3. a session threshold plus an observation window keeps only pairs
//!    with real, in-period activity.
//!
//! Users and attributes that lose all their incidences are dropped, so
//! the resulting context never has empty rows or columns.

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::context::FormalContext;
use crate::error::{Error, Result};

/// Which log layout to expect.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LogKind {
    /// `user_id,site,first_visit,last_visit,sessions` — the attribute
    /// is the site.
    External,
    /// `user_id,site,page,first_visit,last_visit,sessions` — the
    /// attribute is the page.
    Internal,
}

impl LogKind {
    fn header(self) -> &'static [&'static str] {
        match self {
            LogKind::External => &["user_id", "site", "first_visit", "last_visit", "sessions"],
            LogKind::Internal => {
                &["user_id", "site", "page", "first_visit", "last_visit", "sessions"]
            }
        }
    }
}

/// One aggregated log row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UsageRecord {
    pub user_id: String,
    /// Site hostname for external data, URL page for internal data.
    pub site_or_page: String,
    /// UTC seconds.
    pub first_visit: i64,
    /// UTC seconds; never before `first_visit`.
    pub last_visit: i64,
    /// Number of sessions in the logged period; at least 1.
    pub sessions: u64,
}

/// A row the parser refused, with the file line and the reason.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

/// Parse result: the good rows and a report of the bad ones.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParsedLog {
    pub records: Vec<UsageRecord>,
    pub rejected: Vec<RejectedRow>,
}

/// Parses a usage log. A missing or wrong header is fatal; a malformed
/// data row (bad number, reversed interval, zero sessions, missing
/// field) lands in the rejects report and parsing continues.
pub fn parse_usage_log(input: &mut impl Read, kind: LogKind) -> Result<ParsedLog> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let expected = kind.header();
    let headers = reader
        .headers()
        .map_err(|e| Error::LogFormat(format!("unreadable header: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::LogFormat(format!(
            "expected header {:?}, found {:?}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut out = ParsedLog::default();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.rejected.push(RejectedRow {
                    line,
                    reason: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&record, kind) {
            Ok(rec) => out.records.push(rec),
            Err(reason) => out.rejected.push(RejectedRow { line, reason }),
        }
    }
    Ok(out)
}

/// Reads a usage log from `path`.
pub fn parse_usage_log_file(path: impl AsRef<Path>, kind: LogKind) -> Result<ParsedLog> {
    parse_usage_log(&mut fs::File::open(path)?, kind)
}

fn parse_row(record: &csv::StringRecord, kind: LogKind) -> std::result::Result<UsageRecord, String> {
    let width = kind.header().len();
    if record.len() != width {
        return Err(format!("expected {width} fields, found {}", record.len()));
    }
    let field = |i: usize, name: &str| -> std::result::Result<&str, String> {
        let v = record.get(i).unwrap_or("");
        if v.is_empty() {
            Err(format!("empty {name}"))
        } else {
            Ok(v)
        }
    };
    let (attr_index, attr_name) = match kind {
        LogKind::External => (1, "site"),
        LogKind::Internal => (2, "page"),
    };
    let user_id = field(0, "user_id")?.to_owned();
    if kind == LogKind::Internal {
        field(1, "site")?; // present and non-empty, even though the page names the attribute
    }
    let site_or_page = field(attr_index, attr_name)?.to_owned();
    let ts = |i: usize, name: &str| -> std::result::Result<i64, String> {
        field(i, name)?
            .parse()
            .map_err(|_| format!("invalid {name} {:?}", record.get(i).unwrap_or("")))
    };
    let first_visit = ts(width - 3, "first_visit")?;
    let last_visit = ts(width - 2, "last_visit")?;
    if first_visit > last_visit {
        return Err(format!(
            "first_visit {first_visit} is after last_visit {last_visit}"
        ));
    }
    let sessions: u64 = field(width - 1, "sessions")?
        .parse()
        .map_err(|_| format!("invalid sessions {:?}", record.get(width - 1).unwrap_or("")))?;
    if sessions == 0 {
        return Err("sessions must be at least 1".into());
    }
    Ok(UsageRecord {
        user_id,
        site_or_page,
        first_visit,
        last_visit,
        sessions,
    })
}

/// One merge rule: records whose site/page starts with `prefix` take
/// `name` as their attribute.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergeRule {
    pub prefix: String,
    pub name: String,
}

/// An ordered list of merge rules, applied first-match-wins.
///
/// Construction checks that every merged name is a fixed point of the
/// map (no rule rewrites another rule's output), which is what makes
/// [`apply_merge_map`] idempotent.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MergeMap {
    rules: Vec<MergeRule>,
}

impl MergeMap {
    /// A map with no rules; leaves every attribute name unchanged.
    pub fn empty() -> Self {
        MergeMap::default()
    }

    pub fn new(rules: Vec<MergeRule>) -> Result<Self> {
        let map = MergeMap { rules };
        for rule in &map.rules {
            let out = map.merged(&rule.name);
            if out != rule.name {
                return Err(Error::InvalidMergeMap(format!(
                    "merged name {:?} is itself rewritten to {:?}; merge maps must be idempotent",
                    rule.name, out
                )));
            }
        }
        Ok(map)
    }

    /// Parses the merge-map file format: one `PREFIX<TAB>MERGED_NAME`
    /// rule per line, `#` lines as comments. A single trailing `*` on
    /// the prefix is allowed and ignored, so `/personal/*` reads as
    /// the prefix `/personal/`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((prefix, name)) = line.split_once('\t') else {
                return Err(Error::InvalidMergeMap(format!(
                    "line {}: expected PREFIX<TAB>MERGED_NAME, found {line:?}",
                    i + 1
                )));
            };
            let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
            if name.is_empty() {
                return Err(Error::InvalidMergeMap(format!(
                    "line {}: empty merged name",
                    i + 1
                )));
            }
            rules.push(MergeRule {
                prefix: prefix.to_owned(),
                name: name.to_owned(),
            });
        }
        MergeMap::new(rules)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        MergeMap::parse(&fs::read_to_string(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The attribute name a raw site/page maps to.
    pub fn merged<'a>(&'a self, raw: &'a str) -> &'a str {
        self.rules
            .iter()
            .find(|r| raw.starts_with(&r.prefix))
            .map(|r| r.name.as_str())
            .unwrap_or(raw)
    }
}

/// Rewrites every record's attribute through the merge map, then
/// combines records that now coincide on (user, attribute): sessions
/// add up, the activity interval widens to the union. Input order is
/// kept (a combined group sits where its first member was), so the
/// operation is deterministic.
pub fn apply_merge_map(records: Vec<UsageRecord>, map: &MergeMap) -> Vec<UsageRecord> {
    let mut out: Vec<UsageRecord> = Vec::with_capacity(records.len());
    let mut slot: std::collections::HashMap<(String, String), usize> =
        std::collections::HashMap::new();
    for mut rec in records {
        let merged = map.merged(&rec.site_or_page);
        if merged != rec.site_or_page {
            rec.site_or_page = merged.to_owned();
        }
        let key = (rec.user_id.clone(), rec.site_or_page.clone());
        match slot.get(&key) {
            Some(&i) => {
                let prev = &mut out[i];
                prev.sessions += rec.sessions;
                prev.first_visit = prev.first_visit.min(rec.first_visit);
                prev.last_visit = prev.last_visit.max(rec.last_visit);
            }
            None => {
                slot.insert(key, out.len());
                out.push(rec);
            }
        }
    }
    out
}

/// Filters and thresholds applied when a context is built.
#[derive(Clone, PartialEq, Debug)]
pub struct IngestConfig {
    /// Keep a (user, attribute) pair only with strictly more sessions
    /// than this. The default of 20 reflects the "visited more than 20
    /// times" cut that makes month-scale portal logs tractable.
    pub min_sessions: u64,
    /// Observation window, half-open `[window_start, window_end)` in
    /// UTC seconds. A pair counts if its activity interval
    /// `[first_visit, last_visit]` intersects the window.
    pub window_start: i64,
    pub window_end: i64,
    pub merge_map: MergeMap,
    /// If set, only these (merged) attribute names are kept.
    pub site_filter: Option<BTreeSet<String>>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            min_sessions: 20,
            window_start: i64::MIN,
            window_end: i64::MAX,
            merge_map: MergeMap::empty(),
            site_filter: None,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_start >= self.window_end {
            return Err(Error::InvalidConfig(format!(
                "window_start {} is not before window_end {}",
                self.window_start, self.window_end
            )));
        }
        Ok(())
    }
}

/// Parses an allowlist file: one attribute name per line, `#` lines as
/// comments.
pub fn parse_site_filter(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

pub fn read_site_filter(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    Ok(parse_site_filter(&fs::read_to_string(path)?))
}

/// Builds the formal context of `records` under `cfg`: merge map,
/// allowlist, session threshold, and observation window, in that
/// order. Objects are the surviving user ids and attributes the
/// surviving site/page names, both sorted lexicographically, so equal
/// inputs always produce byte-identical CXT serializations.
///
/// Errors with [`Error::EmptyContext`] when nothing survives.
pub fn build_context(records: &[UsageRecord], cfg: &IngestConfig) -> Result<FormalContext> {
    cfg.validate()?;
    let merged = apply_merge_map(records.to_vec(), &cfg.merge_map);
    let mut pairs: Vec<(String, String)> = Vec::new();
    for rec in merged {
        if let Some(filter) = &cfg.site_filter {
            if !filter.contains(&rec.site_or_page) {
                continue;
            }
        }
        if rec.sessions <= cfg.min_sessions {
            continue;
        }
        // [first, last] ∩ [start, end) ≠ ∅
        if rec.first_visit >= cfg.window_end || rec.last_visit < cfg.window_start {
            continue;
        }
        pairs.push((rec.user_id, rec.site_or_page));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyContext);
    }

    let objects: Vec<String> = pairs
        .iter()
        .map(|(u, _)| u.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let attributes: Vec<String> = pairs
        .iter()
        .map(|(_, s)| s.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let object_index = |u: &str| objects.binary_search_by(|o| o.as_str().cmp(u)).unwrap();
    let attribute_index = |s: &str| attributes.binary_search_by(|a| a.as_str().cmp(s)).unwrap();
    let index_pairs: Vec<(usize, usize)> = pairs
        .iter()
        .map(|(u, s)| (object_index(u), attribute_index(s)))
        .collect();
    FormalContext::new(objects, attributes, &index_pairs)
}
