//! Tokenization, suffix stripping and keyword-match semantics.
//!
//! The matcher models a search engine's "keyword" search, which is looser
//! than exact word equality: the keyword `hop` should hit `hopped` and
//! `hops` but never `hope`. The stripper is deliberately tiny — inflection
//! suffixes only — because a fuller stemmer collides exactly those pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

/// A single word as it occurs in a post. Hashtags are stored without the
/// leading `#` but keep the flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub is_hashtag: bool,
}

impl Token {
    pub fn word(surface: &str) -> Self {
        Self {
            surface: surface.to_string(),
            is_hashtag: false,
        }
    }

    pub fn hashtag(surface: &str) -> Self {
        Self {
            surface: surface.to_string(),
            is_hashtag: true,
        }
    }

    /// Render back to word form, `#`-prefixed for hashtags.
    pub fn as_word(&self) -> String {
        if self.is_hashtag {
            format!("#{}", self.surface)
        } else {
            self.surface.clone()
        }
    }

    /// Parse a word form produced by [`Token::as_word`].
    pub fn from_word(w: &str) -> Self {
        match w.strip_prefix('#') {
            Some(rest) => Self::hashtag(rest),
            None => Self::word(w),
        }
    }
}

/// The stripped base of a word plus the surface forms it is allowed to
/// stand for (the base, and at most one e-restored form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemSet {
    pub base: String,
    pub variants_allowed: BTreeSet<String>,
}

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

fn is_vowel(c: char) -> bool {
    VOWELS.contains(&c)
}

/// Stems that survive a strip must still look like a word: a vowel
/// somewhere before the last character, or a non-`e` vowel at the end.
/// This keeps `seed`/`need` intact (stripping would leave `se`/`ne`)
/// while letting `fried -> fri` through.
fn plausible_base(base: &str) -> bool {
    let chars: Vec<char> = base.chars().collect();
    if chars.is_empty() {
        return false;
    }
    let (last, prefix) = chars.split_last().unwrap();
    prefix.iter().any(|c| is_vowel(*c)) || matches!(last, 'a' | 'i' | 'o' | 'u' | 'y')
}

fn ends_in_doubled_consonant(s: &str) -> Option<char> {
    let mut it = s.chars().rev();
    let (a, b) = (it.next()?, it.next()?);
    // l/s/z double naturally at word ends (roll, miss, buzz); undoubling
    // those would invent bases no surface form shares.
    if a == b && !is_vowel(a) && !matches!(a, 'l' | 's' | 'z') {
        Some(a)
    } else {
        None
    }
}

/// Strip the first matching inflection suffix of `ing`, `ed`, `s` and
/// report which surfaces the result may stand for:
///
/// * stripping `ing`/`ed` may have eaten a stem-final `e` (`lining` ->
///   `lin` + `line`), so the e-restored form is allowed too;
/// * a doubled consonant created by inflection is undoubled (`hopped` ->
///   `hop`) and then no `e` is restored — that is the rule keeping `hop`
///   away from `hope`;
/// * a trailing `i` left by stripping normalizes to `y` (`fried` -> `fry`);
/// * plural `s` keeps whatever `e` the word had (`hopes` -> `hope`), so it
///   never invents one.
pub fn stem(token: &Token) -> StemSet {
    stem_word(&token.surface)
}

/// [`stem`] on a bare lowercase surface (no `#`).
pub fn stem_word(surface: &str) -> StemSet {
    let single = |s: &str| StemSet {
        base: s.to_string(),
        variants_allowed: BTreeSet::from([s.to_string()]),
    };

    for suffix in ["ing", "ed", "s"] {
        let Some(rest) = surface.strip_suffix(suffix) else {
            continue;
        };
        if rest.chars().count() < 2 || !plausible_base(rest) {
            continue;
        }
        // "ss" is not a plural ending.
        if suffix == "s" && rest.ends_with('s') {
            continue;
        }

        let mut base = rest.to_string();
        let mut restored = None;
        if suffix == "s" {
            // plural strip: base already carries any stem-final e
        } else if ends_in_doubled_consonant(&base).is_some() {
            base.pop();
        } else {
            restored = Some(format!("{base}e"));
        }
        if base.ends_with('i') {
            base.pop();
            base.push('y');
        }

        let mut variants = BTreeSet::from([base.clone()]);
        if let Some(r) = restored {
            variants.insert(r);
        }
        return StemSet {
            base,
            variants_allowed: variants,
        };
    }
    single(surface)
}

/// Knobs for the substring-containment link used by hashtag matching and
/// variant grouping. A contained base must either be reasonably long on
/// its own, or short-but-embedded in a clearly compound word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchConfig {
    /// Minimum base length for unconditional containment (`zone` in
    /// `calzone`, `high` in `skyhigh`).
    pub min_base_len: usize,
    /// Shorter bases are allowed down to this length...
    pub compound_min_base_len: usize,
    /// ...but only inside containers at least this long (`pot` in
    /// `pothead`, not `hop` in `hope`).
    pub compound_min_container_len: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            min_base_len: 4,
            compound_min_base_len: 3,
            compound_min_container_len: 6,
        }
    }
}

impl MatchConfig {
    /// Stable identifier for provenance sidecars; two runs with equal
    /// fingerprints used the same matching semantics.
    pub fn fingerprint(&self) -> String {
        format!(
            "match-v1:{}:{}:{}",
            self.min_base_len, self.compound_min_base_len, self.compound_min_container_len
        )
    }

    fn containment_link(&self, base: &str, container: &str) -> bool {
        let blen = base.chars().count();
        if blen >= self.min_base_len {
            container.contains(base) && container != base
        } else if blen >= self.compound_min_base_len {
            container.chars().count() >= self.compound_min_container_len
                && container.contains(base)
        } else {
            false
        }
    }
}

/// Does `keyword` (a single lowercase word, optionally `#`-prefixed) hit
/// this token? True when the stem variant sets intersect, or when the
/// token is a hashtag embedding the keyword's base (length-gated so `hop`
/// cannot ride along inside unrelated tags).
pub fn matches(keyword: &str, token: &Token, cfg: &MatchConfig) -> bool {
    let kw = keyword.strip_prefix('#').unwrap_or(keyword);
    matches_with_stems(&stem_word(kw), token, &stem(token), cfg)
}

/// [`matches`] with both stems precomputed, for callers matching many
/// keywords against many tokens.
pub fn matches_with_stems(
    keyword_stem: &StemSet,
    token: &Token,
    token_stem: &StemSet,
    cfg: &MatchConfig,
) -> bool {
    if !keyword_stem
        .variants_allowed
        .is_disjoint(&token_stem.variants_allowed)
    {
        return true;
    }
    token.is_hashtag
        && keyword_stem.base.chars().count() >= cfg.min_base_len
        && token.surface.contains(&keyword_stem.base)
}

/// A root plus the surface forms clustered under it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantGroup {
    /// Representative: the lexicographically smallest of the shortest
    /// stem bases in the group. Not necessarily a linguistic root.
    pub root: String,
    pub members: BTreeSet<String>,
    /// Tweets containing at least one member, against whichever corpus
    /// the caller counted; zero until counted.
    pub frequency: u64,
}

/// Partition `words` into variant groups: connected components under
/// symmetric [`matches`], plus a containment link so compounds cluster
/// with their embedded word (`calzone` with `zone`).
pub fn group_variants(words: &BTreeSet<String>, cfg: &MatchConfig) -> Vec<VariantGroup> {
    let words: Vec<&String> = words.iter().collect();
    let n = words.len();

    let stems: Vec<StemSet> = words
        .iter()
        .map(|w| stem_word(w.strip_prefix('#').unwrap_or(w)))
        .collect();
    let surfaces: Vec<&str> = words
        .iter()
        .map(|w| w.strip_prefix('#').unwrap_or(w))
        .collect();
    let tokens: Vec<Token> = words.iter().map(|w| Token::from_word(w)).collect();

    // Union-find over word indices.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };

    // Invert variant -> word indices so stem-intersection links cost
    // O(total variants) instead of O(n^2) stem comparisons.
    let mut by_variant: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, s) in stems.iter().enumerate() {
        for v in &s.variants_allowed {
            by_variant.entry(v.as_str()).or_default().push(i);
        }
    }
    for idxs in by_variant.values() {
        for w in idxs.windows(2) {
            union(&mut parent, w[0], w[1]);
        }
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            let linked = matches(words[i], &tokens[j], cfg)
                || matches(words[j], &tokens[i], cfg)
                || cfg.containment_link(&stems[i].base, surfaces[j])
                || cfg.containment_link(&stems[j].base, surfaces[i]);
            if linked {
                union(&mut parent, i, j);
            }
        }
    }

    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        components.entry(r).or_default().push(i);
    }

    let mut groups: Vec<VariantGroup> = components
        .into_values()
        .map(|idxs| {
            let root = idxs
                .iter()
                .map(|&i| stems[i].base.as_str())
                .min_by(|a, b| a.chars().count().cmp(&b.chars().count()).then(a.cmp(b)))
                .expect("component is non-empty")
                .to_string();
            VariantGroup {
                root,
                members: idxs.iter().map(|&i| words[i].clone()).collect(),
                frequency: 0,
            }
        })
        .collect();
    groups.sort_by(|a, b| a.root.cmp(&b.root));
    groups
}

/// Number of tweets in `c` containing at least one member of the group
/// (each tweet counted once, by exact word form).
pub fn group_frequency(g: &VariantGroup, c: &crate::corpus::Corpus) -> u64 {
    c.tweets()
        .iter()
        .filter(|t| {
            let words = tweet_word_set(&t.text);
            g.members.iter().any(|m| words.contains(m))
        })
        .count() as u64
}

/// Lowercase, drop URLs, `@`-mentions and pure-number tokens, split on
/// punctuation, flag hashtags.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let lower = chunk.to_lowercase();
        if lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
        {
            continue;
        }
        if lower.starts_with('@') {
            continue;
        }
        let mut current = String::new();
        let mut hashtag = false;
        let mut flush = |current: &mut String, hashtag: &mut bool, out: &mut Vec<Token>| {
            if !current.is_empty() && !current.chars().all(|c| c.is_ascii_digit()) {
                out.push(Token {
                    surface: std::mem::take(current),
                    is_hashtag: *hashtag,
                });
            } else {
                current.clear();
            }
            *hashtag = false;
        };
        for ch in lower.chars() {
            if ch.is_alphanumeric() {
                current.push(ch);
            } else if ch == '#' && current.is_empty() {
                hashtag = true;
            } else {
                flush(&mut current, &mut hashtag, &mut out);
                if ch == '#' {
                    hashtag = true;
                }
            }
        }
        flush(&mut current, &mut hashtag, &mut out);
    }
    out
}

/// The distinct word forms of a text, hashtags `#`-prefixed.
pub fn tweet_word_set(text: &str) -> BTreeSet<String> {
    tokenize(text).iter().map(Token::as_word).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stems(w: &str) -> Vec<String> {
        stem_word(w).variants_allowed.into_iter().collect()
    }

    #[test]
    fn tokenize_plain_words() {
        let toks = tokenize("Broken clouds today");
        let words: Vec<String> = toks.iter().map(Token::as_word).collect();
        assert_eq!(words, ["broken", "clouds", "today"]);
    }

    #[test]
    fn tokenize_drops_urls_numbers_and_flags_hashtags() {
        let toks = tokenize("#PizzaParty at 5 http://t.co/x");
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0], Token::hashtag("pizzaparty"));
        assert_eq!(toks[1], Token::word("at"));
    }

    #[test]
    fn tokenize_splits_on_punctuation() {
        let words: Vec<String> = tokenize("hop, hopped; HOPS!")
            .iter()
            .map(Token::as_word)
            .collect();
        assert_eq!(words, ["hop", "hopped", "hops"]);
    }

    #[test]
    fn tokenize_drops_mentions() {
        let words: Vec<String> = tokenize("@someone hello").iter().map(Token::as_word).collect();
        assert_eq!(words, ["hello"]);
    }

    #[test]
    fn stem_undoubles_without_restoring_e() {
        let s = stem_word("hopped");
        assert_eq!(s.base, "hop");
        assert_eq!(stems("hopped"), ["hop"]);
    }

    #[test]
    fn stem_restores_e_after_ing() {
        let s = stem_word("lining");
        assert_eq!(s.base, "lin");
        assert_eq!(stems("lining"), ["lin", "line"]);
    }

    #[test]
    fn stem_leaves_unsuffixed_words_alone() {
        assert_eq!(stems("hope"), ["hope"]);
        assert_eq!(stems("broken"), ["broken"]);
    }

    #[test]
    fn stem_plural_keeps_stem_final_e() {
        assert_eq!(stems("hopes"), ["hope"]);
        assert_eq!(stems("hops"), ["hop"]);
    }

    #[test]
    fn stem_trailing_i_normalizes_to_y() {
        let s = stem_word("fried");
        assert_eq!(s.base, "fry");
        assert!(s.variants_allowed.contains("frie"));
    }

    #[test]
    fn stem_keeps_vowelless_and_e_only_bases_intact() {
        assert_eq!(stems("seed"), ["seed"]);
        assert_eq!(stems("bring"), ["bring"]);
        assert_eq!(stems("tweed"), ["tweed"]);
    }

    #[test]
    fn stem_does_not_undouble_l_s_z() {
        let s = stem_word("rolled");
        assert_eq!(s.base, "roll");
    }

    #[test]
    fn stem_is_idempotent_on_fixture_bases() {
        for (_, members) in crate::fixtures::variant_rows() {
            for m in members {
                let s = stem_word(m.strip_prefix('#').unwrap_or(m));
                let again = stem_word(&s.base);
                assert_eq!(again.base, s.base, "base of {m:?} not stable: {s:?}");
            }
        }
    }

    #[test]
    fn matches_variant_positive_and_negative() {
        let cfg = MatchConfig::default();
        assert!(matches("hop", &Token::word("hops"), &cfg));
        assert!(matches("hop", &Token::word("hopped"), &cfg));
        assert!(!matches("hop", &Token::word("hope"), &cfg));
        assert!(!matches("hope", &Token::word("hops"), &cfg));
    }

    #[test]
    fn matches_hashtag_containment() {
        let cfg = MatchConfig::default();
        assert!(matches("party", &Token::hashtag("pizzaparty"), &cfg));
        // Too short a base to ride inside hashtags.
        assert!(!matches("hop", &Token::hashtag("shopfront"), &cfg));
        // Plain words do not get the containment treatment in matches().
        assert!(!matches("party", &Token::word("pizzaparty"), &cfg));
    }

    fn grp(words: &[&str]) -> Vec<VariantGroup> {
        let set: BTreeSet<String> = words.iter().map(|w| w.to_string()).collect();
        group_variants(&set, &MatchConfig::default())
    }

    #[test]
    fn group_rock_family() {
        let g = grp(&["rock", "rocked", "rocking", "rocks"]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].root, "rock");
    }

    #[test]
    fn group_zone_calzone() {
        let g = grp(&["zone", "calzone"]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].root, "zone");
    }

    #[test]
    fn group_hop_hope_stay_apart() {
        let g = grp(&["hop", "hope"]);
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn group_compound_containment() {
        // Short base + long container links; short base + short container not.
        let g = grp(&["pot", "#pothead"]);
        assert_eq!(g.len(), 1);
        let g = grp(&["hip", "hippie", "hipster"]);
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn group_variants_is_a_partition() {
        let words: BTreeSet<String> = ["rock", "rocks", "hop", "hope", "zone", "calzone", "party"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let groups = group_variants(&words, &MatchConfig::default());
        let mut seen = BTreeSet::new();
        for g in &groups {
            for m in &g.members {
                assert!(seen.insert(m.clone()), "{m} appears in two groups");
            }
        }
        assert_eq!(seen, words);
    }
}
