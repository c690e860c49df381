//! Synthetic monitor with known keywords, so recovery quality is a
//! measured quantity instead of a guess.
//!
//! [`generate_corpus`] draws tweets from a weighted vocabulary,
//! [`run_monitor`] flags the ones matching a hidden keyword — honoring a
//! weekly result cap and a dropout rate that models pipeline losses — and
//! [`recovery_experiment`] scores what the inference engine gets back
//! against the hidden ground truth.

use std::collections::{BTreeMap, BTreeSet};

use chrono::Duration;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{parse_timestamp, Corpus, CorpusError, TimeWindow, Tweet, WeekKey};
use crate::inference::{infer, InferenceError};
use crate::textmatch::{group_variants, matches, stem_word, MatchConfig, Token};

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("hidden keywords must be drawn from the vocabulary; missing: {0:?}")]
    HiddenNotInVocabulary(Vec<String>),
    #[error("hidden keyword set is empty")]
    NoHiddenKeywords,
    #[error("dropout rate {0} outside [0, 1)")]
    BadDropout(f64),
    #[error("weekly cap must be at least 1")]
    BadCap,
    #[error("words-per-tweet range is empty")]
    EmptyWordRange,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// The monitor under simulation: its hidden keywords and loss behavior.
#[derive(Debug, Clone)]
pub struct MonitorConfig {
    pub hidden_keywords: BTreeSet<String>,
    /// Per ISO week, collection stops after this many matches.
    pub weekly_cap: Option<u32>,
    /// Each collected match is independently dropped with this
    /// probability, modeling API or service downtime.
    pub dropout_rate: f64,
    pub seed: u64,
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<(), SimulateError> {
        if self.hidden_keywords.is_empty() {
            return Err(SimulateError::NoHiddenKeywords);
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(SimulateError::BadDropout(self.dropout_rate));
        }
        if self.weekly_cap == Some(0) {
            return Err(SimulateError::BadCap);
        }
        Ok(())
    }
}

/// How well a recovery run did against the hidden keyword groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryMetrics {
    /// Fraction of recovered necessary words that really are keywords
    /// (or variants of keywords).
    pub precision_n: f64,
    /// Fraction of discoverable hidden variant groups hit by the
    /// necessary or likely sets.
    pub recall_nl: f64,
    pub coverage_nl: f64,
    /// Recovered words/roots that match no hidden keyword.
    pub false_roots: Vec<String>,
}

/// Draw `n_tweets` tweets of `words_per_tweet` words each from the
/// weighted vocabulary, timestamps uniform over the window. Deterministic
/// given the seed.
pub fn generate_corpus(
    vocab: &[(String, f64)],
    n_tweets: usize,
    words_per_tweet: std::ops::RangeInclusive<usize>,
    span: TimeWindow,
    seed: u64,
) -> Result<Corpus, SimulateError> {
    if vocab.is_empty() {
        return Err(SimulateError::EmptyVocabulary);
    }
    if words_per_tweet.is_empty() {
        return Err(SimulateError::EmptyWordRange);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = WeightedIndex::new(vocab.iter().map(|(_, w)| *w))
        .map_err(|_| SimulateError::EmptyVocabulary)?;
    let span_secs = (span.end - span.start).num_seconds().max(0);

    let n_accounts = (n_tweets / 20).max(4);
    let mut tweets = Vec::with_capacity(n_tweets);
    for i in 0..n_tweets {
        let k = rng.gen_range(words_per_tweet.clone());
        let words: Vec<&str> = (0..k).map(|_| vocab[dist.sample(&mut rng)].0.as_str()).collect();
        let at = span.start + Duration::seconds(rng.gen_range(0..=span_secs));
        let account = rng.gen_range(0..n_accounts);
        tweets.push(Tweet {
            id: format!("t{i:06}"),
            text: words.join(" "),
            created_at: at,
            geotag: None,
            account: Some(crate::corpus::AccountRef {
                handle: format!("user{account:03}"),
                profile_location: None,
                protected: false,
            }),
            language: Some("en".to_string()),
            is_retweet: false,
        });
    }
    Ok(Corpus::new("T_in", tweets)?)
}

/// Flag the tweets matching a hidden keyword, in timestamp order. Within
/// each ISO week collection stops once `weekly_cap` matches were taken
/// (the cap counts collected matches, before dropout); each collected
/// match is then dropped with `dropout_rate`.
pub fn run_monitor(c: &Corpus, cfg: &MonitorConfig) -> Result<Corpus, SimulateError> {
    cfg.validate()?;
    let match_cfg = MatchConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut week_counts: BTreeMap<WeekKey, u32> = BTreeMap::new();

    let out = c.filter(|t| {
        let tokens = crate::textmatch::tokenize(&t.text);
        let hit = cfg
            .hidden_keywords
            .iter()
            .any(|k| tokens.iter().any(|tok| matches(k, tok, &match_cfg)));
        if !hit {
            return false;
        }
        let week = WeekKey::of(t.created_at);
        let count = week_counts.entry(week).or_insert(0);
        if let Some(cap) = cfg.weekly_cap {
            if *count >= cap {
                return false;
            }
        }
        *count += 1;
        // Drawn for every collected match so the stream stays aligned
        // across dropout settings.
        let u: f64 = rng.gen();
        u >= cfg.dropout_rate
    });
    Ok(out.with_label("T_out"))
}

/// Scale knobs for a recovery experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// `[word, weight]` pairs.
    pub vocab: Vec<(String, f64)>,
    pub hidden: Vec<String>,
    pub n_tweets: usize,
    /// Weekly cap; absent means unlimited.
    #[serde(default)]
    pub cap: Option<u32>,
    #[serde(default)]
    pub dropout: f64,
    #[serde(default = "default_threshold")]
    pub threshold: u32,
    pub seed: u64,
    #[serde(default = "default_words_per_tweet")]
    pub words_per_tweet: [usize; 2],
    #[serde(default = "default_start")]
    pub start: String,
    #[serde(default = "default_end")]
    pub end: String,
}

fn default_threshold() -> u32 {
    2
}

fn default_words_per_tweet() -> [usize; 2] {
    [4, 9]
}

fn default_start() -> String {
    "2017-01-02T00:00:00Z".to_string()
}

fn default_end() -> String {
    "2017-06-30T00:00:00Z".to_string()
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), SimulateError> {
        if self.vocab.is_empty() {
            return Err(SimulateError::EmptyVocabulary);
        }
        let vocab_words: BTreeSet<&str> = self.vocab.iter().map(|(w, _)| w.as_str()).collect();
        let missing: Vec<String> = self
            .hidden
            .iter()
            .filter(|h| !vocab_words.contains(h.as_str()))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(SimulateError::HiddenNotInVocabulary(missing));
        }
        if self.hidden.is_empty() {
            return Err(SimulateError::NoHiddenKeywords);
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(SimulateError::BadDropout(self.dropout));
        }
        if self.cap == Some(0) {
            return Err(SimulateError::BadCap);
        }
        if self.words_per_tweet[0] > self.words_per_tweet[1] || self.words_per_tweet[0] == 0 {
            return Err(SimulateError::EmptyWordRange);
        }
        Ok(())
    }
}

/// Symmetric variant-level link between two words.
fn words_linked(a: &str, b: &str, cfg: &MatchConfig) -> bool {
    matches(a, &Token::from_word(b), cfg) || matches(b, &Token::from_word(a), cfg)
}

/// Generate a corpus, run the monitor, run recovery, and score the result
/// against the hidden keywords' variant groups.
pub fn recovery_experiment(spec: &ExperimentSpec) -> Result<RecoveryMetrics, SimulateError> {
    spec.validate()?;
    let match_cfg = MatchConfig::default();
    let span = TimeWindow::new(
        parse_timestamp(&spec.start, 0)?,
        parse_timestamp(&spec.end, 0)?,
    )?;
    let t_in = generate_corpus(
        &spec.vocab,
        spec.n_tweets,
        spec.words_per_tweet[0]..=spec.words_per_tweet[1],
        span,
        spec.seed,
    )?;
    let monitor = MonitorConfig {
        hidden_keywords: spec.hidden.iter().cloned().collect(),
        weekly_cap: spec.cap,
        dropout_rate: spec.dropout,
        seed: spec.seed ^ 0x9e37_79b9_7f4a_7c15,
    };
    let t_out = run_monitor(&t_in, &monitor)?;
    let result = infer(&t_in, &t_out, spec.threshold, &match_cfg)?;

    let hidden_set: BTreeSet<String> = spec.hidden.iter().cloned().collect();
    let hidden_groups = group_variants(&hidden_set, &match_cfg);

    // A hidden group is discoverable only if some flagged tweet matches
    // one of its keywords; keywords that never made it into the output
    // cannot be recovered and leave the denominator.
    let discoverable: Vec<_> = hidden_groups
        .iter()
        .filter(|g| {
            t_out.tweets().iter().any(|t| {
                let tokens = crate::textmatch::tokenize(&t.text);
                g.members
                    .iter()
                    .any(|k| tokens.iter().any(|tok| matches(k, tok, &match_cfg)))
            })
        })
        .collect();

    let mut recovered_words: BTreeSet<String> = result.necessary.clone();
    for g in &result.likely {
        recovered_words.extend(g.members.iter().cloned());
    }

    let hit = |group: &crate::textmatch::VariantGroup| {
        group
            .members
            .iter()
            .any(|k| recovered_words.iter().any(|w| words_linked(k, w, &match_cfg)))
    };
    let recalled = discoverable.iter().filter(|g| hit(g)).count();
    let recall_nl = if discoverable.is_empty() {
        1.0
    } else {
        recalled as f64 / discoverable.len() as f64
    };

    let is_true_word = |w: &str| {
        hidden_set
            .iter()
            .any(|k| words_linked(k, w, &match_cfg))
    };
    let precision_n = if result.necessary.is_empty() {
        1.0
    } else {
        result.necessary.iter().filter(|w| is_true_word(w)).count() as f64
            / result.necessary.len() as f64
    };

    let mut false_roots: Vec<String> = result
        .necessary
        .iter()
        .filter(|w| !is_true_word(w))
        .map(|w| stem_word(w.strip_prefix('#').unwrap_or(w)).base)
        .chain(
            result
                .likely
                .iter()
                .filter(|g| !g.members.iter().any(|m| is_true_word(m)))
                .map(|g| g.root.clone()),
        )
        .collect();
    false_roots.sort();
    false_roots.dedup();

    Ok(RecoveryMetrics {
        precision_n,
        recall_nl,
        coverage_nl: result.coverage_nl,
        false_roots,
    })
}

/// A small benign vocabulary with heavily weighted weather-report words,
/// so simulations reproduce the frequency skew of bot-dominated streams.
pub fn default_vocab() -> Vec<(String, f64)> {
    let heavy = [
        ("broken", 40.0),
        ("clouds", 40.0),
        ("rain", 25.0),
        ("wind", 20.0),
        ("forecast", 18.0),
        ("tonight", 15.0),
    ];
    let common = [
        "today", "campus", "game", "coffee", "river", "music", "friends", "study", "weekend",
        "again", "happy", "home", "street", "really", "lunch", "spring", "never", "always",
        "morning", "night", "great", "little", "people", "photo", "where", "there", "downtown",
        "sunny", "cold", "warm", "team", "class", "finals", "beer", "pizza", "trail", "run",
        "bike", "dog", "cat", "show", "live", "love", "good", "time", "week", "year", "store",
    ];
    let mut vocab: Vec<(String, f64)> = heavy
        .iter()
        .map(|(w, x)| (w.to_string(), *x))
        .collect();
    for (i, w) in common.iter().enumerate() {
        vocab.push((w.to_string(), 8.0 / (1.0 + i as f64 * 0.2)));
    }
    vocab
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::utc;

    fn window() -> TimeWindow {
        TimeWindow::new(utc(2017, 1, 2, 0, 0, 0), utc(2017, 3, 31, 0, 0, 0)).unwrap()
    }

    fn small_vocab() -> Vec<(String, f64)> {
        let mut v = default_vocab();
        v.push(("snow".into(), 2.0));
        v.push(("hop".into(), 2.0));
        v.push(("hops".into(), 1.0));
        v
    }

    #[test]
    fn generate_empty_and_single_word() {
        let v = small_vocab();
        let c = generate_corpus(&v, 0, 4..=9, window(), 1).unwrap();
        assert!(c.is_empty());

        let single = vec![("snow".to_string(), 1.0)];
        let c = generate_corpus(&single, 10, 3..=3, window(), 1).unwrap();
        for t in c.tweets() {
            assert_eq!(t.text, "snow snow snow");
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let v = small_vocab();
        let a = generate_corpus(&v, 200, 4..=9, window(), 7).unwrap();
        let b = generate_corpus(&v, 200, 4..=9, window(), 7).unwrap();
        assert_eq!(a, b);
        let c = generate_corpus(&v, 200, 4..=9, window(), 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn monitor_without_cap_or_dropout_flags_exactly_matches() {
        let v = small_vocab();
        let c = generate_corpus(&v, 400, 4..=9, window(), 3).unwrap();
        let cfg = MonitorConfig {
            hidden_keywords: BTreeSet::from(["snow".to_string(), "hop".to_string()]),
            weekly_cap: None,
            dropout_rate: 0.0,
            seed: 3,
        };
        let out = run_monitor(&c, &cfg).unwrap();
        let match_cfg = MatchConfig::default();
        for t in c.tweets() {
            let hit = cfg.hidden_keywords.iter().any(|k| {
                crate::textmatch::tokenize(&t.text)
                    .iter()
                    .any(|tok| matches(k, tok, &match_cfg))
            });
            let flagged = out.ids().contains(t.id.as_str());
            assert_eq!(hit, flagged, "tweet {} ({:?})", t.id, t.text);
        }
    }

    #[test]
    fn monitor_weekly_cap_keeps_earliest() {
        // 150 matching tweets inside one ISO week, cap 100: the first
        // 100 by timestamp survive.
        let tweets: Vec<Tweet> = (0..150)
            .map(|i| Tweet {
                id: format!("m{i:03}"),
                text: "snow falls".into(),
                created_at: utc(2017, 7, 3, 0, 0, 0) + Duration::minutes(i),
                geotag: None,
                account: None,
                language: None,
                is_retweet: false,
            })
            .collect();
        let c = Corpus::new("in", tweets).unwrap();
        let cfg = MonitorConfig {
            hidden_keywords: BTreeSet::from(["snow".to_string()]),
            weekly_cap: Some(100),
            dropout_rate: 0.0,
            seed: 0,
        };
        let out = run_monitor(&c, &cfg).unwrap();
        assert_eq!(out.len(), 100);
        let expected: Vec<String> = (0..100).map(|i| format!("m{i:03}")).collect();
        let got: Vec<&str> = out.tweets().iter().map(|t| t.id.as_str()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn monitor_cap_resets_each_week() {
        let tweets: Vec<Tweet> = (0..10)
            .map(|i| Tweet {
                id: format!("w{i}"),
                text: "snow".into(),
                // Five in one ISO week, five in the next.
                created_at: utc(2017, 7, 3, 0, 0, 0) + Duration::days(if i < 5 { 0 } else { 7 }),
                geotag: None,
                account: None,
                language: None,
                is_retweet: false,
            })
            .collect();
        let c = Corpus::new("in", tweets).unwrap();
        let cfg = MonitorConfig {
            hidden_keywords: BTreeSet::from(["snow".to_string()]),
            weekly_cap: Some(3),
            dropout_rate: 0.0,
            seed: 0,
        };
        let out = run_monitor(&c, &cfg).unwrap();
        assert_eq!(out.len(), 6);
    }

    #[test]
    fn monitor_dropout_is_reproducible() {
        let v = small_vocab();
        let c = generate_corpus(&v, 500, 4..=9, window(), 11).unwrap();
        let cfg = MonitorConfig {
            hidden_keywords: BTreeSet::from(["snow".to_string()]),
            weekly_cap: None,
            dropout_rate: 0.5,
            seed: 21,
        };
        let a = run_monitor(&c, &cfg).unwrap();
        let b = run_monitor(&c, &cfg).unwrap();
        assert_eq!(a, b);
        let full = run_monitor(
            &c,
            &MonitorConfig {
                dropout_rate: 0.0,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert!(a.len() < full.len());
        assert!(a.ids().is_subset(&full.ids()));
    }

    fn perfect_spec(seed: u64) -> ExperimentSpec {
        let mut vocab = default_vocab();
        let hidden = ["snow", "hop", "blaze", "stash", "kush", "dank"];
        for h in hidden {
            vocab.push((h.to_string(), 2.5));
        }
        vocab.push(("hops".into(), 1.2));
        vocab.push(("stashes".into(), 1.0));
        ExperimentSpec {
            vocab,
            hidden: hidden.iter().map(|s| s.to_string()).collect(),
            n_tweets: 800,
            cap: None,
            dropout: 0.0,
            threshold: 2,
            seed,
            words_per_tweet: [4, 9],
            start: default_start(),
            end: default_end(),
        }
    }

    #[test]
    fn perfect_data_gives_perfect_necessary_precision() {
        for seed in 0..5 {
            let m = recovery_experiment(&perfect_spec(seed)).unwrap();
            assert_eq!(m.precision_n, 1.0, "seed {seed}: {m:?}");
        }
    }

    #[test]
    fn spec_validation_rejects_hidden_outside_vocab() {
        let mut spec = perfect_spec(1);
        spec.hidden.push("notaword".into());
        assert!(matches!(
            spec.validate(),
            Err(SimulateError::HiddenNotInVocabulary(m)) if m == vec!["notaword".to_string()]
        ));
    }

    #[test]
    fn undiscoverable_keywords_leave_the_denominator() {
        // "kush" gets weight so low it never appears; recall denominator
        // shrinks rather than punishing the run.
        let mut spec = perfect_spec(5);
        for (w, weight) in spec.vocab.iter_mut() {
            if w == "kush" {
                *weight = 1e-12;
            }
        }
        let m = recovery_experiment(&spec).unwrap();
        assert_eq!(m.precision_n, 1.0);
        assert!(m.recall_nl > 0.0);
    }
}
