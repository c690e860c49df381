//! Search-log and tweet-corpus ingestion, time windows and weekly
//! histograms.
//!
//! Two file formats enter here: monitor search logs as CSV (required
//! columns `URL` and `TIME`, optional keyword metadata columns) and tweet
//! corpora as JSONL, one object per line. Everything is immutable after
//! construction and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Datelike, Duration, FixedOffset, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{GeoBox, GeoPoint};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing required column {0}")]
    MissingColumn(String),
    #[error("malformed line {line}: {message}")]
    MalformedLine { line: u64, message: String },
    #[error("duplicate tweet id {0}")]
    DuplicateId(String),
    #[error("empty log partition {0}")]
    EmptyPartition(String),
    #[error("invalid time window: start {start} after end {end}")]
    InvalidWindow {
        start: DateTime<Utc>,
        end: DateTime<Utc>,
    },
    #[error("unparseable timestamp {0:?}")]
    BadTimestamp(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which predefined search a log row came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SearchSet {
    Narcotics,
    Terror,
    LeTerms,
    Other(String),
}

impl fmt::Display for SearchSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchSet::Narcotics => write!(f, "narcotics"),
            SearchSet::Terror => write!(f, "terror"),
            SearchSet::LeTerms => write!(f, "le-terms"),
            SearchSet::Other(s) => write!(f, "other:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Platform {
    Twitter,
    Facebook,
    Instagram,
    Other(String),
}

impl Platform {
    /// Best-effort platform from a post URL's host.
    pub fn from_url(url: &str) -> Self {
        let lower = url.to_lowercase();
        let host = lower
            .split("://")
            .nth(1)
            .unwrap_or(&lower)
            .split('/')
            .next()
            .unwrap_or("");
        if host.contains("twitter.com") || host.contains("x.com") {
            Platform::Twitter
        } else if host.contains("facebook.com") {
            Platform::Facebook
        } else if host.contains("instagram.com") {
            Platform::Instagram
        } else {
            Platform::Other(host.to_string())
        }
    }
}

/// One row of a monitor search log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostRecord {
    pub url: String,
    pub time: DateTime<Utc>,
    pub search_set: SearchSet,
    /// Lowercased keyword metadata, when the log carries keyword columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta_keywords: Option<BTreeSet<String>>,
    pub platform: Platform,
    /// Whether the post was still available when re-checked; absent when
    /// the log has no such column. Filtering on it is the caller's job.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub available: Option<bool>,
}

/// Geotag attached to a tweet: a coordinate point, a bounding polygon
/// (modeled as its rectangle), or an unresolved place name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeoTag {
    Point(GeoPoint),
    Box(GeoBox),
    PlaceName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountRef {
    pub handle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_location: Option<String>,
    #[serde(default)]
    pub protected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geotag: Option<GeoTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub account: Option<AccountRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default)]
    pub is_retweet: bool,
}

/// An ordered tweet collection: sorted by `created_at`, ids unique.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corpus {
    label: String,
    tweets: Vec<Tweet>,
}

impl Corpus {
    /// Sorts by timestamp (stable) and rejects duplicate ids.
    pub fn new(label: impl Into<String>, mut tweets: Vec<Tweet>) -> Result<Self, CorpusError> {
        tweets.sort_by_key(|t| t.created_at);
        let mut seen = BTreeSet::new();
        for t in &tweets {
            if !seen.insert(t.id.clone()) {
                return Err(CorpusError::DuplicateId(t.id.clone()));
            }
        }
        Ok(Self {
            label: label.into(),
            tweets,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.tweets.iter().map(|t| t.id.as_str()).collect()
    }

    /// Sub-corpus of tweets passing the predicate, order preserved.
    pub fn filter(&self, mut pred: impl FnMut(&Tweet) -> bool) -> Corpus {
        Corpus {
            label: self.label.clone(),
            tweets: self.tweets.iter().filter(|t| pred(t)).cloned().collect(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Corpus {
        self.label = label.into();
        self
    }
}

/// Closed time interval; boundary instants are inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, CorpusError> {
        if start <= end {
            Ok(Self { start, end })
        } else {
            Err(CorpusError::InvalidWindow { start, end })
        }
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t <= self.end
    }
}

/// ISO week-year and week number, the bin of the weekly histograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeekKey {
    pub year: i32,
    pub week: u32,
}

impl WeekKey {
    pub fn of(t: DateTime<Utc>) -> Self {
        let iso = t.iso_week();
        Self {
            year: iso.year(),
            week: iso.week(),
        }
    }
}

impl fmt::Display for WeekKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-W{:02}", self.year, self.week)
    }
}

/// Non-fatal problem found while parsing a log; rows with diagnostics are
/// reported, never silently dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SearchLogParse {
    pub records: Vec<PostRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Candidate header names for keyword metadata columns, case-insensitive.
pub const DEFAULT_KEYWORD_HEADERS: &[&str] = &["KEYWORDS", "TERMS"];

/// Parse a timestamp in ISO-8601 or `MM/DD/YYYY HH:MM` form. Zoneless
/// values are interpreted at `zoneless_offset_minutes` east of UTC
/// (default 0, i.e. UTC).
pub fn parse_timestamp(s: &str, zoneless_offset_minutes: i32) -> Result<DateTime<Utc>, CorpusError> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.with_timezone(&Utc));
    }
    // RFC 3339 without seconds, explicit Z.
    if let Some(stripped) = s.strip_suffix('Z').or_else(|| s.strip_suffix('z')) {
        for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(stripped, fmt) {
                return Ok(Utc.from_utc_datetime(&naive));
            }
        }
    }
    let offset = FixedOffset::east_opt(zoneless_offset_minutes * 60)
        .ok_or_else(|| CorpusError::BadTimestamp(s.to_string()))?;
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%d %H:%M",
        "%m/%d/%Y %H:%M:%S",
        "%m/%d/%Y %H:%M",
    ] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            let local = offset
                .from_local_datetime(&naive)
                .single()
                .ok_or_else(|| CorpusError::BadTimestamp(s.to_string()))?;
            return Ok(local.with_timezone(&Utc));
        }
    }
    for fmt in ["%Y-%m-%d", "%m/%d/%Y"] {
        if let Ok(date) = NaiveDate::parse_from_str(s, fmt) {
            let naive = date.and_hms_opt(0, 0, 0).expect("midnight exists");
            let local = offset
                .from_local_datetime(&naive)
                .single()
                .ok_or_else(|| CorpusError::BadTimestamp(s.to_string()))?;
            return Ok(local.with_timezone(&Utc));
        }
    }
    Err(CorpusError::BadTimestamp(s.to_string()))
}

/// Options for [`parse_search_log`].
#[derive(Debug, Clone)]
pub struct LogParseOptions {
    pub keyword_headers: Vec<String>,
    pub zoneless_offset_minutes: i32,
}

impl Default for LogParseOptions {
    fn default() -> Self {
        Self {
            keyword_headers: DEFAULT_KEYWORD_HEADERS.iter().map(|s| s.to_string()).collect(),
            zoneless_offset_minutes: 0,
        }
    }
}

/// Parse a search-log CSV. Rows with an unparseable `TIME` or empty `URL`
/// become diagnostics alongside the good records; a missing required
/// column fails the whole file.
pub fn parse_search_log(
    bytes: &[u8],
    search_set: SearchSet,
    opts: &LogParseOptions,
) -> Result<SearchLogParse, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(bytes);

    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Option<usize> {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let url_col = col("URL").ok_or_else(|| CorpusError::MissingColumn("URL".into()))?;
    let time_col = col("TIME").ok_or_else(|| CorpusError::MissingColumn("TIME".into()))?;
    let keyword_col = opts.keyword_headers.iter().find_map(|h| col(h));
    let available_col = col("AVAILABLE");
    let platform_col = col("PLATFORM");

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();

    for (idx, row) in reader.records().enumerate() {
        // Data rows start on line 2; fall back to ordinal when the reader
        // cannot say (e.g. after a mid-file error).
        let line = (idx + 2) as u64;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    line,
                    message: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(line);

        let url = row.get(url_col).unwrap_or("").trim().to_string();
        if url.is_empty() {
            diagnostics.push(Diagnostic {
                line,
                message: "empty URL".into(),
            });
            continue;
        }
        let time = match parse_timestamp(row.get(time_col).unwrap_or(""), opts.zoneless_offset_minutes)
        {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };

        let meta_keywords = keyword_col.and_then(|c| {
            let raw = row.get(c).unwrap_or("");
            let set: BTreeSet<String> = raw
                .split(|ch: char| ch == ',' || ch.is_whitespace())
                .map(|w| w.trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect();
            if set.is_empty() {
                None
            } else {
                Some(set)
            }
        });

        let available = available_col.and_then(|c| parse_bool(row.get(c).unwrap_or("")));
        let platform = match platform_col.map(|c| row.get(c).unwrap_or("").trim()) {
            Some(p) if !p.is_empty() => match p.to_lowercase().as_str() {
                "twitter" => Platform::Twitter,
                "facebook" => Platform::Facebook,
                "instagram" => Platform::Instagram,
                other => Platform::Other(other.to_string()),
            },
            _ => Platform::from_url(&url),
        };

        records.push(PostRecord {
            url,
            time,
            search_set: search_set.clone(),
            meta_keywords,
            platform,
            available,
        });
    }

    Ok(SearchLogParse {
        records,
        diagnostics,
    })
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Some(true),
        "false" | "0" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// JSONL wire form of a tweet. Unknown fields are ignored.
#[derive(Debug, Serialize, Deserialize)]
struct TweetLine {
    id: String,
    #[serde(default)]
    text: String,
    created_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geo: Option<GeoLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    user: Option<UserLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lang: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    retweet: bool,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct GeoLine {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bbox: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    place: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct UserLine {
    handle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    location: Option<String>,
    #[serde(default)]
    protected: bool,
}

/// Parse a JSONL tweet corpus: one object per line, sorted on the way in,
/// duplicate ids rejected.
pub fn parse_tweet_corpus(bytes: &[u8], label: &str) -> Result<Corpus, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::MalformedLine {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut tweets = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = (idx + 1) as u64;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TweetLine =
            serde_json::from_str(line).map_err(|e| CorpusError::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
        if !seen.insert(parsed.id.clone()) {
            return Err(CorpusError::DuplicateId(parsed.id));
        }
        let created_at =
            parse_timestamp(&parsed.created_at, 0).map_err(|e| CorpusError::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
        let geotag = match parsed.geo {
            None => None,
            Some(g) => geotag_from_line(g, line_no)?,
        };
        let account = parsed.user.map(|u| AccountRef {
            handle: u.handle,
            profile_location: u.location,
            protected: u.protected,
        });
        if let Some(a) = &account {
            if a.handle.trim().is_empty() {
                return Err(CorpusError::MalformedLine {
                    line: line_no,
                    message: "empty user handle".into(),
                });
            }
        }
        tweets.push(Tweet {
            id: parsed.id,
            text: parsed.text,
            created_at,
            geotag,
            account,
            language: parsed.lang,
            is_retweet: parsed.retweet,
        });
    }
    Corpus::new(label, tweets)
}

fn geotag_from_line(g: GeoLine, line: u64) -> Result<Option<GeoTag>, CorpusError> {
    if let (Some(lat), Some(lon)) = (g.lat, g.lon) {
        let p = GeoPoint::new(lat, lon).ok_or_else(|| CorpusError::MalformedLine {
            line,
            message: format!("coordinates out of range: ({lat}, {lon})"),
        })?;
        return Ok(Some(GeoTag::Point(p)));
    }
    if let Some([s, w, n, e]) = g.bbox {
        let b = GeoBox::new(s, w, n, e).ok_or_else(|| CorpusError::MalformedLine {
            line,
            message: format!("invalid bbox: [{s}, {w}, {n}, {e}]"),
        })?;
        return Ok(Some(GeoTag::Box(b)));
    }
    if let Some(place) = g.place {
        return Ok(Some(GeoTag::PlaceName(place)));
    }
    Ok(None)
}

/// Serialize a corpus back to the JSONL wire form; parsing the output
/// reproduces the corpus exactly.
pub fn write_tweet_corpus(c: &Corpus) -> String {
    let mut out = String::new();
    for t in c.tweets() {
        let geo = t.geotag.as_ref().map(|g| match g {
            GeoTag::Point(p) => GeoLine {
                lat: Some(p.lat),
                lon: Some(p.lon),
                ..Default::default()
            },
            GeoTag::Box(b) => GeoLine {
                bbox: Some([b.south, b.west, b.north, b.east]),
                ..Default::default()
            },
            GeoTag::PlaceName(name) => GeoLine {
                place: Some(name.clone()),
                ..Default::default()
            },
        });
        let line = TweetLine {
            id: t.id.clone(),
            text: t.text.clone(),
            created_at: t.created_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            geo,
            user: t.account.as_ref().map(|a| UserLine {
                handle: a.handle.clone(),
                location: a.profile_location.clone(),
                protected: a.protected,
            }),
            lang: t.language.clone(),
            retweet: t.is_retweet,
        };
        out.push_str(&serde_json::to_string(&line).expect("tweet serializes"));
        out.push('\n');
    }
    out
}

/// One window per log partition: `[min TIME, max TIME]`, never merged
/// across partitions.
pub fn time_windows(partitions: &[(String, Vec<PostRecord>)]) -> Result<Vec<TimeWindow>, CorpusError> {
    partitions
        .iter()
        .map(|(name, records)| {
            let min = records.iter().map(|r| r.time).min();
            let max = records.iter().map(|r| r.time).max();
            match (min, max) {
                (Some(start), Some(end)) => TimeWindow::new(start, end),
                _ => Err(CorpusError::EmptyPartition(name.clone())),
            }
        })
        .collect()
}

/// Keep exactly the tweets whose timestamp lies in the closed union of
/// the windows.
pub fn downsample_by_windows(c: &Corpus, windows: &[TimeWindow]) -> Corpus {
    c.filter(|t| windows.iter().any(|w| w.contains(t.created_at)))
}

/// Posts per ISO week. Counts partition the input.
pub fn weekly_histogram<I>(times: I) -> BTreeMap<WeekKey, u64>
where
    I: IntoIterator<Item = DateTime<Utc>>,
{
    let mut out = BTreeMap::new();
    for t in times {
        *out.entry(WeekKey::of(t)).or_insert(0) += 1;
    }
    out
}

pub fn weekly_histogram_corpus(c: &Corpus) -> BTreeMap<WeekKey, u64> {
    weekly_histogram(c.tweets().iter().map(|t| t.created_at))
}

pub fn weekly_histogram_records(records: &[PostRecord]) -> BTreeMap<WeekKey, u64> {
    weekly_histogram(records.iter().map(|r| r.time))
}

/// Convenience constructor used by tests and the simulator.
pub fn utc(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, mo, d, h, mi, s).single().expect("valid utc timestamp")
}
