//! Reverse engineering a monitor's keyword list from its input and output
//! corpora.
//!
//! Given `T_in` (everything the monitor could have seen) and `T_out` (what
//! it flagged), the engine derives:
//!
//! * `P`, the *possible* keywords: words of `T_out` absent from every
//!   unflagged tweet. With perfect data a keyword must be in `P`.
//! * `N`, the *necessary* keywords: the sole `P`-word of some flagged
//!   tweet. With perfect data every word of `N` must be a keyword.
//! * `L`, the *likely* keyword variant groups: a greedy frequency-first
//!   pick over the tweets `N` leaves unexplained — a heuristic for the
//!   underlying hitting-set problem, kept only when a group explains at
//!   least `threshold` tweets.
//!
//! Word comparison for `P` and `N` is exact token surface; variant
//! semantics enter only when deciding what a keyword *explains* and when
//! grouping candidates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, PostRecord};
use crate::textmatch::{
    group_variants, matches_with_stems, stem_word, tweet_word_set, MatchConfig, StemSet, Token,
    VariantGroup,
};

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("threshold must be at least 1, got {0}")]
    InvalidThreshold(u32),
    #[error("no record carries keyword metadata")]
    NoKeywordMetadata,
}

/// Everything the engine recovers in one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordInferenceResult {
    #[serde(rename = "P")]
    pub possible: BTreeSet<String>,
    #[serde(rename = "N")]
    pub necessary: BTreeSet<String>,
    #[serde(rename = "L")]
    pub likely: Vec<VariantGroup>,
    /// Flagged tweets containing no word (or variant) of `N`.
    pub unexplained: BTreeSet<String>,
    /// Flagged tweets containing no `P`-word at all — impossible with
    /// perfect data, so reported separately rather than fed to `L`.
    pub anomalous: BTreeSet<String>,
    #[serde(rename = "coverage_N")]
    pub coverage_n: f64,
    #[serde(rename = "coverage_NL")]
    pub coverage_nl: f64,
    pub threshold: u32,
    /// For each known keyword, how many unflagged tweets contain it;
    /// empty unless known keywords were supplied.
    pub leakage: BTreeMap<String, u64>,
}

/// Explained fractions for named keyword sets over one corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub fractions: BTreeMap<String, f64>,
    pub union_fraction: f64,
    /// Tweets matched per keyword, across all named sets.
    pub keyword_tweet_counts: BTreeMap<String, u64>,
}

/// Tokenized view of a corpus, stems cached per distinct word.
struct MatchView<'a> {
    cfg: &'a MatchConfig,
    /// (tweet id, word forms) in corpus order.
    tweets: Vec<(String, BTreeSet<String>)>,
    stems: HashMap<String, StemSet>,
}

impl<'a> MatchView<'a> {
    fn new(c: &Corpus, cfg: &'a MatchConfig) -> Self {
        let tweets: Vec<(String, BTreeSet<String>)> = c
            .tweets()
            .iter()
            .map(|t| (t.id.clone(), tweet_word_set(&t.text)))
            .collect();
        let mut view = Self {
            cfg,
            tweets,
            stems: HashMap::new(),
        };
        let words: BTreeSet<String> = view
            .tweets
            .iter()
            .flat_map(|(_, ws)| ws.iter().cloned())
            .collect();
        for w in words {
            view.intern(&w);
        }
        view
    }

    fn intern(&mut self, word: &str) {
        if !self.stems.contains_key(word) {
            let s = stem_word(word.strip_prefix('#').unwrap_or(word));
            self.stems.insert(word.to_string(), s);
        }
    }

    fn stem(&self, word: &str) -> &StemSet {
        &self.stems[word]
    }

    /// Does keyword `kw` match word `w` under the corpus's match config?
    fn kw_matches_word(&self, kw: &str, w: &str) -> bool {
        let token = Token::from_word(w);
        matches_with_stems(self.stem(kw), &token, self.stem(w), self.cfg)
    }

    /// Does the tweet (by word set) contain a token matching any keyword?
    fn explained(&self, words: &BTreeSet<String>, keywords: &BTreeSet<String>) -> bool {
        keywords
            .iter()
            .any(|k| words.iter().any(|w| self.kw_matches_word(k, w)))
    }
}

/// Words appearing in some flagged tweet and in no unflagged tweet.
/// Membership of "unflagged" is by tweet id; exact token surfaces.
pub fn possible_keywords(t_in: &Corpus, t_out: &Corpus) -> BTreeSet<String> {
    let out_ids = t_out.ids();
    let mut out_words: BTreeSet<String> = BTreeSet::new();
    for t in t_out.tweets() {
        out_words.extend(tweet_word_set(&t.text));
    }
    let mut complement_words: BTreeSet<String> = BTreeSet::new();
    for t in t_in.tweets() {
        if !out_ids.contains(t.id.as_str()) {
            complement_words.extend(tweet_word_set(&t.text));
        }
    }
    out_words.difference(&complement_words).cloned().collect()
}

/// Words that are the sole `P`-word of some flagged tweet (distinct words
/// per tweet, exact surfaces).
pub fn necessary_keywords(t_out: &Corpus, possible: &BTreeSet<String>) -> BTreeSet<String> {
    let mut necessary = BTreeSet::new();
    for t in t_out.tweets() {
        let words = tweet_word_set(&t.text);
        let mut in_p = words.iter().filter(|w| possible.contains(*w));
        if let (Some(w), None) = (in_p.next(), in_p.next()) {
            necessary.insert(w.clone());
        }
    }
    necessary
}

/// Split of the flagged tweets that `N` does not explain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnexplainedSplit {
    /// Contain a `P`-word but no token matching any word of `N`.
    pub unexplained: BTreeSet<String>,
    /// Contain no `P`-word at all.
    pub anomalous: BTreeSet<String>,
}

pub fn unexplained_tweets(
    t_out: &Corpus,
    necessary: &BTreeSet<String>,
    possible: &BTreeSet<String>,
    cfg: &MatchConfig,
) -> UnexplainedSplit {
    let mut view = MatchView::new(t_out, cfg);
    for k in necessary {
        view.intern(k);
    }
    split_unexplained(&view, necessary, possible)
}

fn split_unexplained(
    view: &MatchView<'_>,
    necessary: &BTreeSet<String>,
    possible: &BTreeSet<String>,
) -> UnexplainedSplit {
    let mut split = UnexplainedSplit::default();
    for (id, words) in &view.tweets {
        if words.is_disjoint(possible) {
            split.anomalous.insert(id.clone());
        } else if !view.explained(words, necessary) {
            split.unexplained.insert(id.clone());
        }
    }
    split
}

/// The greedy frequency-first pick of variant groups over `P \ N` (minus
/// `N`'s variant closure). For each tweet `N` leaves unexplained, the
/// group with a member in the tweet and maximal frequency is selected,
/// ties to the lexicographically smallest root; selected groups survive
/// when they explain at least `threshold` such tweets.
pub fn likely_keywords(
    t_out: &Corpus,
    possible: &BTreeSet<String>,
    necessary: &BTreeSet<String>,
    threshold: u32,
    cfg: &MatchConfig,
) -> Result<Vec<VariantGroup>, InferenceError> {
    if threshold < 1 {
        return Err(InferenceError::InvalidThreshold(threshold));
    }
    let mut view = MatchView::new(t_out, cfg);
    for k in necessary.iter().chain(possible.iter()) {
        view.intern(k);
    }
    let split = split_unexplained(&view, necessary, possible);
    Ok(likely_from_split(&view, &split, possible, necessary, threshold))
}

fn likely_from_split(
    view: &MatchView<'_>,
    split: &UnexplainedSplit,
    possible: &BTreeSet<String>,
    necessary: &BTreeSet<String>,
    threshold: u32,
) -> Vec<VariantGroup> {
    // Candidates: possible words outside N and N's variant closure.
    let candidates: BTreeSet<String> = possible
        .iter()
        .filter(|w| {
            !necessary.contains(*w)
                && !necessary
                    .iter()
                    .any(|n| view.kw_matches_word(n, w) || view.kw_matches_word(w, n))
        })
        .cloned()
        .collect();
    if candidates.is_empty() || split.unexplained.is_empty() {
        return Vec::new();
    }

    let mut groups = group_variants(&candidates, view.cfg);
    for g in &mut groups {
        g.frequency = view
            .tweets
            .iter()
            .filter(|(_, words)| g.members.iter().any(|m| words.contains(m)))
            .count() as u64;
    }

    // Which unexplained tweets does each group have a member in?
    let mut explains: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); groups.len()];
    for (id, words) in &view.tweets {
        if !split.unexplained.contains(id) {
            continue;
        }
        for (gi, g) in groups.iter().enumerate() {
            if g.members.iter().any(|m| words.contains(m)) {
                explains[gi].insert(id);
            }
        }
    }

    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    for (id, _) in &view.tweets {
        if !split.unexplained.contains(id) {
            continue;
        }
        let best = groups
            .iter()
            .enumerate()
            .filter(|(gi, _)| explains[*gi].contains(id.as_str()))
            .max_by(|(_, a), (_, b)| {
                a.frequency
                    .cmp(&b.frequency)
                    .then_with(|| b.root.cmp(&a.root))
            });
        if let Some((gi, _)) = best {
            chosen.insert(gi);
        }
    }

    let mut likely: Vec<VariantGroup> = chosen
        .into_iter()
        .filter(|gi| explains[*gi].len() as u64 >= u64::from(threshold))
        .map(|gi| groups[gi].clone())
        .collect();
    likely.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.root.cmp(&b.root)));
    likely
}

/// Fraction of tweets explained per named keyword set, plus per-keyword
/// tweet counts (variant semantics throughout).
pub fn coverage(
    t_out: &Corpus,
    sets: &BTreeMap<String, BTreeSet<String>>,
    cfg: &MatchConfig,
) -> CoverageReport {
    let mut view = MatchView::new(t_out, cfg);
    let all_keywords: BTreeSet<String> = sets.values().flatten().cloned().collect();
    for k in &all_keywords {
        view.intern(k);
    }

    let total = view.tweets.len();
    let frac = |hits: usize| {
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    };

    let mut fractions = BTreeMap::new();
    for (name, keywords) in sets {
        let hits = view
            .tweets
            .iter()
            .filter(|(_, words)| view.explained(words, keywords))
            .count();
        fractions.insert(name.clone(), frac(hits));
    }
    let union_hits = view
        .tweets
        .iter()
        .filter(|(_, words)| view.explained(words, &all_keywords))
        .count();

    let mut keyword_tweet_counts = BTreeMap::new();
    for k in &all_keywords {
        let hits = view
            .tweets
            .iter()
            .filter(|(_, words)| words.iter().any(|w| view.kw_matches_word(k, w)))
            .count();
        keyword_tweet_counts.insert(k.clone(), hits as u64);
    }

    CoverageReport {
        fractions,
        union_fraction: frac(union_hits),
        keyword_tweet_counts,
    }
}

/// For each known keyword, the number of unflagged tweets containing a
/// matching token — the count that explains why a true keyword escaped
/// `P`.
pub fn keyword_leakage(
    known: &BTreeSet<String>,
    t_in: &Corpus,
    t_out: &Corpus,
    cfg: &MatchConfig,
) -> BTreeMap<String, u64> {
    let out_ids = t_out.ids();
    let complement = t_in.filter(|t| !out_ids.contains(t.id.as_str()));
    let mut view = MatchView::new(&complement, cfg);
    for k in known {
        view.intern(k);
    }
    known
        .iter()
        .map(|k| {
            let hits = view
                .tweets
                .iter()
                .filter(|(_, words)| words.iter().any(|w| view.kw_matches_word(k, w)))
                .count();
            (k.clone(), hits as u64)
        })
        .collect()
}

/// Union of the log's keyword metadata plus its variant grouping.
pub fn extract_known_keywords(
    log: &[PostRecord],
    cfg: &MatchConfig,
) -> Result<(BTreeSet<String>, Vec<VariantGroup>), InferenceError> {
    let mut known: BTreeSet<String> = BTreeSet::new();
    let mut any = false;
    for r in log {
        if let Some(kws) = &r.meta_keywords {
            any = true;
            known.extend(kws.iter().cloned());
        }
    }
    if !any {
        return Err(InferenceError::NoKeywordMetadata);
    }
    let groups = group_variants(&known, cfg);
    Ok((known, groups))
}

/// Run the whole pipeline. Pure in its inputs: byte-identical results
/// across runs.
pub fn infer(
    t_in: &Corpus,
    t_out: &Corpus,
    threshold: u32,
    cfg: &MatchConfig,
) -> Result<KeywordInferenceResult, InferenceError> {
    if threshold < 1 {
        return Err(InferenceError::InvalidThreshold(threshold));
    }
    let possible = possible_keywords(t_in, t_out);
    let necessary = necessary_keywords(t_out, &possible);

    let mut view = MatchView::new(t_out, cfg);
    for k in possible.iter().chain(necessary.iter()) {
        view.intern(k);
    }
    let split = split_unexplained(&view, &necessary, &possible);
    let likely = likely_from_split(&view, &split, &possible, &necessary, threshold);

    let total = view.tweets.len();
    let frac = |hits: usize| {
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    };
    let coverage_n = frac(
        view.tweets
            .iter()
            .filter(|(_, words)| view.explained(words, &necessary))
            .count(),
    );
    let mut nl: BTreeSet<String> = necessary.clone();
    for g in &likely {
        nl.extend(g.members.iter().cloned());
    }
    for k in &nl {
        view.intern(k);
    }
    let coverage_nl = frac(
        view.tweets
            .iter()
            .filter(|(_, words)| view.explained(words, &nl))
            .count(),
    );

    Ok(KeywordInferenceResult {
        possible,
        necessary,
        likely,
        unexplained: split.unexplained,
        anomalous: split.anomalous,
        coverage_n,
        coverage_nl,
        threshold,
        leakage: BTreeMap::new(),
    })
}

/// Table-style TSV of the recovered groups: `set<TAB>root<TAB>f`, sorted
/// by frequency descending then root.
pub fn result_tsv(result: &KeywordInferenceResult, t_out: &Corpus, cfg: &MatchConfig) -> String {
    let mut rows: Vec<(String, String, u64)> = Vec::new();
    let n_groups = group_variants(&result.necessary, cfg);
    for mut g in n_groups {
        g.frequency = crate::textmatch::group_frequency(&g, t_out);
        rows.push(("necessary".into(), g.root, g.frequency));
    }
    for g in &result.likely {
        rows.push(("likely".into(), g.root.clone(), g.frequency));
    }
    rows.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.1.cmp(&b.1)));
    let mut out = String::from("set\troot\tf\n");
    for (set, root, f) in rows {
        out.push_str(&format!("{set}\t{root}\t{f}\n"));
    }
    out
}
