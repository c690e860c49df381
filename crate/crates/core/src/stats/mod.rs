//! The statistical audit battery: chance-corrected agreement between
//! coders, chi-squared comparison of demographic distributions, weighted
//! account sampling and language shares.

pub mod gamma;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no unit has two or more ratings")]
    NoPairableUnits,
    #[error("all ratings fall in one category; expected disagreement is zero and alpha is undefined")]
    DegenerateDistribution,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("duplicate rating for unit {unit} by rater {rater}")]
    DuplicateRating { unit: String, rater: String },
    #[error("contingency table needs at least 2 rows and 2 columns")]
    TableShape,
    #[error("{kind} {label:?} sums to zero")]
    ZeroMarginal { kind: &'static str, label: String },
    #[error("category {0:?} has no mapping")]
    UnmappedCategory(String),
    #[error("sample size {k} exceeds population {n}")]
    InvalidK { k: usize, n: usize },
    #[error("weight for {0:?} is not positive")]
    NonpositiveWeight(String),
}

/// Units × raters nominal codes with missing cells allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingMatrix {
    units: Vec<String>,
    raters: Vec<String>,
    ratings: BTreeMap<(String, String), String>,
}

impl RatingMatrix {
    /// Build from `(unit, rater, category)` records; id orders follow
    /// first appearance. A second rating for the same cell is an error.
    pub fn from_records<I, S>(records: I) -> Result<Self, StatsError>
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let mut units = Vec::new();
        let mut raters = Vec::new();
        let mut ratings = BTreeMap::new();
        for (u, r, c) in records {
            let (u, r, c) = (u.into(), r.into(), c.into());
            if !units.contains(&u) {
                units.push(u.clone());
            }
            if !raters.contains(&r) {
                raters.push(r.clone());
            }
            if ratings.insert((u.clone(), r.clone()), c).is_some() {
                return Err(StatsError::DuplicateRating { unit: u, rater: r });
            }
        }
        Ok(Self {
            units,
            raters,
            ratings,
        })
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn rating(&self, unit: &str, rater: &str) -> Option<&str> {
        self.ratings
            .get(&(unit.to_string(), rater.to_string()))
            .map(|s| s.as_str())
    }

    /// Ratings per unit, in unit order, missing cells skipped.
    fn unit_ratings(&self) -> Vec<Vec<&str>> {
        self.units
            .iter()
            .map(|u| {
                self.raters
                    .iter()
                    .filter_map(|r| self.ratings.get(&(u.clone(), r.clone())))
                    .map(|s| s.as_str())
                    .collect()
            })
            .collect()
    }
}

/// Landis–Koch agreement bands, lowest to highest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgreementLevel {
    Poor,
    Slight,
    Fair,
    Moderate,
    Substantial,
    AlmostPerfect,
}

impl std::fmt::Display for AgreementLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AgreementLevel::Poor => "poor",
            AgreementLevel::Slight => "slight",
            AgreementLevel::Fair => "fair",
            AgreementLevel::Moderate => "moderate",
            AgreementLevel::Substantial => "substantial",
            AgreementLevel::AlmostPerfect => "almost-perfect",
        };
        write!(f, "{s}")
    }
}

/// Lower thresholds of the bands above Poor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkScale {
    pub slight: f64,
    pub fair: f64,
    pub moderate: f64,
    pub substantial: f64,
    pub almost_perfect: f64,
}

impl Default for BenchmarkScale {
    fn default() -> Self {
        Self {
            slight: 0.0,
            fair: 0.2,
            moderate: 0.4,
            substantial: 0.6,
            almost_perfect: 0.8,
        }
    }
}

impl BenchmarkScale {
    fn bands(&self) -> [(AgreementLevel, f64); 5] {
        [
            (AgreementLevel::Slight, self.slight),
            (AgreementLevel::Fair, self.fair),
            (AgreementLevel::Moderate, self.moderate),
            (AgreementLevel::Substantial, self.substantial),
            (AgreementLevel::AlmostPerfect, self.almost_perfect),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityResult {
    pub alpha: f64,
    pub d_o: f64,
    pub d_e: f64,
    /// Pairable values: sum of ratings over units rated at least twice.
    pub n_pairable: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benchmark_level: Option<AgreementLevel>,
}

/// Krippendorff's alpha for nominal data, alpha = 1 − D_o/D_e.
///
/// Each unit with `m >= 2` ratings contributes its ordered rating pairs
/// at weight `1/(m−1)` to the coincidence matrix; `D_o` is the
/// off-diagonal mass over `n`, `D_e` the chance disagreement from the
/// marginals.
pub fn krippendorff_alpha(m: &RatingMatrix) -> Result<ReliabilityResult, StatsError> {
    let pairable: Vec<Vec<&str>> = m
        .unit_ratings()
        .into_iter()
        .filter(|r| r.len() >= 2)
        .collect();
    if pairable.is_empty() {
        return Err(StatsError::NoPairableUnits);
    }
    alpha_of_units(&pairable).map(|(alpha, d_o, d_e, n)| ReliabilityResult {
        alpha,
        d_o,
        d_e,
        n_pairable: n,
        benchmark_level: None,
    })
}

fn alpha_of_units(pairable: &[Vec<&str>]) -> Result<(f64, f64, f64, u64), StatsError> {
    let categories: BTreeSet<&str> = pairable.iter().flatten().copied().collect();
    let cat_index: BTreeMap<&str, usize> =
        categories.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let k = categories.len();

    let mut coincidence = vec![vec![0.0_f64; k]; k];
    for ratings in pairable {
        let m_u = ratings.len();
        let w = 1.0 / (m_u as f64 - 1.0);
        for (i, a) in ratings.iter().enumerate() {
            for (j, b) in ratings.iter().enumerate() {
                if i != j {
                    coincidence[cat_index[a]][cat_index[b]] += w;
                }
            }
        }
    }

    let n: f64 = coincidence.iter().flatten().sum();
    let marginals: Vec<f64> = (0..k).map(|c| coincidence[c].iter().sum()).collect();

    let observed_disagreement: f64 = (0..k)
        .flat_map(|c| (0..k).map(move |d| (c, d)))
        .filter(|(c, d)| c != d)
        .map(|(c, d)| coincidence[c][d])
        .sum::<f64>()
        / n;
    let expected_disagreement: f64 = (0..k)
        .flat_map(|c| (0..k).map(move |d| (c, d)))
        .filter(|(c, d)| c != d)
        .map(|(c, d)| marginals[c] * marginals[d])
        .sum::<f64>()
        / (n * (n - 1.0));

    if expected_disagreement <= 0.0 {
        return Err(StatsError::DegenerateDistribution);
    }
    Ok((
        1.0 - observed_disagreement / expected_disagreement,
        observed_disagreement,
        expected_disagreement,
        n.round() as u64,
    ))
}

/// Bootstrap the Landis–Koch level met with the given confidence: resample
/// units with replacement, recompute alpha, and return the highest band
/// whose lower threshold is exceeded by at least `confidence` of the
/// resamples. Deterministic given the seed.
pub fn benchmark_level(
    m: &RatingMatrix,
    scale: &BenchmarkScale,
    confidence: f64,
    resamples: u32,
    seed: u64,
) -> Result<AgreementLevel, StatsError> {
    if resamples == 0 {
        return Err(StatsError::InvalidParameter("resamples must be positive".into()));
    }
    if !(0.0..=1.0).contains(&confidence) {
        return Err(StatsError::InvalidParameter(format!(
            "confidence {confidence} outside [0, 1]"
        )));
    }
    let pairable: Vec<Vec<&str>> = m
        .unit_ratings()
        .into_iter()
        .filter(|r| r.len() >= 2)
        .collect();
    if pairable.is_empty() {
        return Err(StatsError::NoPairableUnits);
    }
    // The full matrix must have a defined alpha before benchmarking it.
    alpha_of_units(&pairable)?;

    let bands = scale.bands();
    let mut exceed_counts = [0u32; 5];
    let n_units = pairable.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..resamples {
        let sample: Vec<Vec<&str>> = (0..n_units)
            .map(|_| pairable[rng.gen_range(0..n_units)].clone())
            .collect();
        // A single-category resample has zero disagreement both observed
        // and expected; score it as perfect agreement.
        let alpha = match alpha_of_units(&sample) {
            Ok((alpha, ..)) => alpha,
            Err(StatsError::DegenerateDistribution) => 1.0,
            Err(e) => return Err(e),
        };
        for (i, (_, lower)) in bands.iter().enumerate() {
            if alpha > *lower {
                exceed_counts[i] += 1;
            }
        }
    }

    let needed = ((confidence * f64::from(resamples)).ceil() as u32).max(1);
    let mut level = AgreementLevel::Poor;
    for (i, (band, _)) in bands.iter().enumerate() {
        if exceed_counts[i] >= needed {
            level = *band;
        }
    }
    Ok(level)
}

/// [`krippendorff_alpha`] plus a bootstrap [`benchmark_level`].
pub fn reliability_with_benchmark(
    m: &RatingMatrix,
    scale: &BenchmarkScale,
    confidence: f64,
    resamples: u32,
    seed: u64,
) -> Result<ReliabilityResult, StatsError> {
    let mut result = krippendorff_alpha(m)?;
    result.benchmark_level = Some(benchmark_level(m, scale, confidence, resamples, seed)?);
    Ok(result)
}

/// Observed counts of categories (columns) across groups (rows).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub n: u64,
}

impl ContingencyTable {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self, StatsError> {
        if row_labels.len() < 2
            || col_labels.len() < 2
            || counts.len() != row_labels.len()
            || counts.iter().any(|r| r.len() != col_labels.len())
        {
            return Err(StatsError::TableShape);
        }
        let n = counts.iter().flatten().sum();
        Ok(Self {
            row_labels,
            col_labels,
            counts,
            n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Pearson chi-squared test of independence: statistic Σ(O−E)²/E with
/// expectations from the marginals, df = (r−1)(c−1), upper-tail p from
/// the regularized incomplete gamma. No continuity correction.
pub fn pearson_chi2(t: &ContingencyTable) -> Result<ChiSquareResult, StatsError> {
    let r = t.row_labels.len();
    let c = t.col_labels.len();
    let row_sums: Vec<u64> = t.counts.iter().map(|row| row.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..c).map(|j| t.counts.iter().map(|row| row[j]).sum()).collect();
    for (i, s) in row_sums.iter().enumerate() {
        if *s == 0 {
            return Err(StatsError::ZeroMarginal {
                kind: "row",
                label: t.row_labels[i].clone(),
            });
        }
    }
    for (j, s) in col_sums.iter().enumerate() {
        if *s == 0 {
            return Err(StatsError::ZeroMarginal {
                kind: "column",
                label: t.col_labels[j].clone(),
            });
        }
    }

    let n = t.n as f64;
    let mut statistic = 0.0;
    for i in 0..r {
        for j in 0..c {
            let expected = row_sums[i] as f64 * col_sums[j] as f64 / n;
            let diff = t.counts[i][j] as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    let df = ((r - 1) * (c - 1)) as u32;
    let p_value = gamma::gamma_q(f64::from(df) / 2.0, statistic / 2.0);
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value,
    })
}

/// Chi-squared goodness of fit of observed counts against expected
/// probabilities (df = k − 1).
pub fn chi2_goodness_of_fit(observed: &[u64], probabilities: &[f64]) -> Result<ChiSquareResult, StatsError> {
    if observed.len() != probabilities.len() || observed.len() < 2 {
        return Err(StatsError::InvalidParameter(
            "observed counts and probabilities must align, length >= 2".into(),
        ));
    }
    if probabilities.iter().any(|p| *p <= 0.0) {
        return Err(StatsError::InvalidParameter("probabilities must be positive".into()));
    }
    let n: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    for (o, p) in observed.iter().zip(probabilities) {
        let e = n as f64 * p;
        let diff = *o as f64 - e;
        statistic += diff * diff / e;
    }
    let df = (observed.len() - 1) as u32;
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value: gamma::gamma_q(f64::from(df) / 2.0, statistic / 2.0),
    })
}

/// Sum counts into super-categories; totals are preserved exactly.
pub fn collapse_categories(
    dist: &BTreeMap<String, u64>,
    mapping: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, u64>, StatsError> {
    let mut out: BTreeMap<String, u64> = BTreeMap::new();
    for (cat, count) in dist {
        let target = mapping
            .get(cat)
            .ok_or_else(|| StatsError::UnmappedCategory(cat.clone()))?;
        *out.entry(target.clone()).or_insert(0) += count;
    }
    Ok(out)
}

/// Reconstruct integer counts from published percentages: round to
/// nearest, then repair the cells with the largest remainders until the
/// counts sum to `n` exactly.
pub fn counts_from_percents(n: u64, percents: &[f64]) -> Vec<u64> {
    let raw: Vec<f64> = percents.iter().map(|p| p / 100.0 * n as f64).collect();
    let mut counts: Vec<i64> = raw.iter().map(|x| x.round() as i64).collect();
    let mut delta = n as i64 - counts.iter().sum::<i64>();
    while delta != 0 {
        let step = delta.signum();
        // The cell whose rounding error most favors the needed direction.
        let idx = (0..counts.len())
            .max_by(|&a, &b| {
                let ea = (raw[a] - counts[a] as f64) * step as f64;
                let eb = (raw[b] - counts[b] as f64) * step as f64;
                ea.partial_cmp(&eb).expect("finite remainders")
            })
            .expect("non-empty percents");
        counts[idx] += step;
        delta -= step;
    }
    counts.into_iter().map(|c| c.max(0) as u64).collect()
}

/// Sample `k` distinct ids without replacement, each draw proportional to
/// the remaining weights. Deterministic given the seed.
pub fn weighted_sample(
    accounts: &[(String, f64)],
    k: usize,
    seed: u64,
) -> Result<Vec<String>, StatsError> {
    if k > accounts.len() {
        return Err(StatsError::InvalidK {
            k,
            n: accounts.len(),
        });
    }
    for (id, w) in accounts {
        if !(w.is_finite() && *w > 0.0) {
            return Err(StatsError::NonpositiveWeight(id.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(usize, f64)> = accounts.iter().map(|(_, w)| *w).enumerate().collect();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = pool.iter().map(|(_, w)| w).sum();
        let mut x = rng.gen::<f64>() * total;
        let mut chosen = pool.len() - 1;
        for (pos, (_, w)) in pool.iter().enumerate() {
            if x < *w {
                chosen = pos;
                break;
            }
            x -= w;
        }
        let (idx, _) = pool.remove(chosen);
        picked.push(accounts[idx].0.clone());
    }
    Ok(picked)
}

/// Fraction of tweets labeled `code` among tweets carrying any language
/// label; `None` when nothing is labeled.
pub fn language_share(c: &Corpus, code: &str) -> Option<f64> {
    let labeled: Vec<&str> = c
        .tweets()
        .iter()
        .filter_map(|t| t.language.as_deref())
        .collect();
    if labeled.is_empty() {
        return None;
    }
    let hits = labeled.iter().filter(|l| **l == code).count();
    Some(hits as f64 / labeled.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{utc, Tweet};

    fn matrix(cells: &[(&str, &str, &str)]) -> RatingMatrix {
        RatingMatrix::from_records(cells.iter().map(|(u, r, c)| (*u, *r, *c))).unwrap()
    }

    #[test]
    fn alpha_perfect_agreement_is_one() {
        let m = matrix(&[
            ("1", "a", "x"),
            ("1", "b", "x"),
            ("2", "a", "y"),
            ("2", "b", "y"),
        ]);
        let r = krippendorff_alpha(&m).unwrap();
        assert_eq!(r.alpha, 1.0);
        assert_eq!(r.d_o, 0.0);
    }

    #[test]
    fn alpha_hand_computed_fixture() {
        // Two raters, four units: (x,x), (y,y), (x,y), (y,y).
        // Coincidences: o_xx=2, o_yy=4, o_xy=o_yx=1, n=8, n_x=3, n_y=5.
        // D_o = 2/8, D_e = 30/56, alpha = 1 - (2/8)/(30/56) = 8/15.
        let m = matrix(&[
            ("1", "a", "x"),
            ("1", "b", "x"),
            ("2", "a", "y"),
            ("2", "b", "y"),
            ("3", "a", "x"),
            ("3", "b", "y"),
            ("4", "a", "y"),
            ("4", "b", "y"),
        ]);
        let r = krippendorff_alpha(&m).unwrap();
        assert!((r.alpha - 8.0 / 15.0).abs() < 1e-12);
        assert!((r.d_o - 0.25).abs() < 1e-12);
        assert!((r.d_e - 30.0 / 56.0).abs() < 1e-12);
        assert_eq!(r.n_pairable, 8);
    }

    #[test]
    fn alpha_degenerate_single_category() {
        let m = matrix(&[("1", "a", "x"), ("1", "b", "x"), ("2", "a", "x"), ("2", "b", "x")]);
        assert!(matches!(
            krippendorff_alpha(&m),
            Err(StatsError::DegenerateDistribution)
        ));
    }

    #[test]
    fn alpha_requires_pairable_units() {
        let m = matrix(&[("1", "a", "x"), ("2", "b", "y")]);
        assert!(matches!(
            krippendorff_alpha(&m),
            Err(StatsError::NoPairableUnits)
        ));
    }

    #[test]
    fn alpha_drops_single_rating_units() {
        // Unit 3 has one rating; dropping it leaves the perfect pairs.
        let m = matrix(&[
            ("1", "a", "x"),
            ("1", "b", "x"),
            ("2", "a", "y"),
            ("2", "b", "y"),
            ("3", "a", "x"),
        ]);
        assert_eq!(krippendorff_alpha(&m).unwrap().alpha, 1.0);
    }

    #[test]
    fn alpha_invariant_under_relabeling() {
        let m1 = matrix(&[
            ("1", "a", "x"),
            ("1", "b", "x"),
            ("2", "a", "y"),
            ("2", "b", "y"),
            ("3", "a", "x"),
            ("3", "b", "y"),
        ]);
        // Swap category names and rater order.
        let m2 = matrix(&[
            ("3", "b", "q"),
            ("3", "a", "p"),
            ("2", "b", "p"),
            ("2", "a", "p"),
            ("1", "b", "q"),
            ("1", "a", "q"),
        ]);
        let a1 = krippendorff_alpha(&m1).unwrap().alpha;
        let a2 = krippendorff_alpha(&m2).unwrap().alpha;
        assert!((a1 - a2).abs() < 1e-12);
    }

    #[test]
    fn benchmark_perfect_matrix_is_almost_perfect() {
        let m = matrix(&[
            ("1", "a", "x"),
            ("1", "b", "x"),
            ("2", "a", "y"),
            ("2", "b", "y"),
            ("3", "a", "x"),
            ("3", "b", "x"),
        ]);
        let level = benchmark_level(&m, &BenchmarkScale::default(), 0.95, 200, 7).unwrap();
        assert_eq!(level, AgreementLevel::AlmostPerfect);
    }

    #[test]
    fn benchmark_rejects_zero_resamples() {
        let m = matrix(&[("1", "a", "x"), ("1", "b", "y")]);
        assert!(matches!(
            benchmark_level(&m, &BenchmarkScale::default(), 0.95, 0, 1),
            Err(StatsError::InvalidParameter(_))
        ));
    }

    #[test]
    fn benchmark_is_deterministic_per_seed() {
        let m = matrix(&[
            ("1", "a", "x"),
            ("1", "b", "x"),
            ("2", "a", "y"),
            ("2", "b", "y"),
            ("3", "a", "x"),
            ("3", "b", "y"),
            ("4", "a", "y"),
            ("4", "b", "y"),
        ]);
        let l1 = benchmark_level(&m, &BenchmarkScale::default(), 0.95, 500, 11).unwrap();
        let l2 = benchmark_level(&m, &BenchmarkScale::default(), 0.95, 500, 11).unwrap();
        assert_eq!(l1, l2);
        // Small fixture, wide bootstrap spread: never above Moderate.
        assert!(l1 <= AgreementLevel::Moderate);
    }

    fn table2x2(a: u64, b: u64, c: u64, d: u64) -> ContingencyTable {
        ContingencyTable::new(
            vec!["g1".into(), "g2".into()],
            vec!["c1".into(), "c2".into()],
            vec![vec![a, b], vec![c, d]],
        )
        .unwrap()
    }

    #[test]
    fn chi2_independent_table() {
        let r = pearson_chi2(&table2x2(10, 10, 10, 10)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.df, 1);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn chi2_hand_computed_2x2() {
        // Expectations are 15 in every cell; statistic = 4 * 25/15 = 20/3.
        let r = pearson_chi2(&table2x2(20, 10, 10, 20)).unwrap();
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.df, 1);
        // Cross-check via the normal tail: p = 2(1 - Phi(sqrt(chi2))),
        // with Phi integrated numerically (independent of gamma code).
        let z = (20.0_f64 / 3.0).sqrt();
        let p_oracle = 2.0 * normal_upper_tail(z);
        assert!((r.p_value - p_oracle).abs() < 1e-4);
        assert!((r.p_value - 0.00982).abs() < 5e-5);
    }

    fn normal_upper_tail(z: f64) -> f64 {
        // Simpson's rule on the standard normal density over [z, z+12].
        let n = 120_000;
        let h = 12.0 / n as f64;
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = phi(z) + phi(z + 12.0);
        for i in 1..n {
            s += phi(z + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn chi2_zero_marginal_rejected() {
        let t = ContingencyTable::new(
            vec!["g1".into(), "g2".into()],
            vec!["c1".into(), "c2".into()],
            vec![vec![0, 10], vec![0, 20]],
        )
        .unwrap();
        assert!(matches!(
            pearson_chi2(&t),
            Err(StatsError::ZeroMarginal { kind: "column", .. })
        ));
    }

    #[test]
    fn chi2_invariant_under_transpose() {
        let t = ContingencyTable::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![12, 7, 9], vec![5, 11, 6]],
        )
        .unwrap();
        let tt = ContingencyTable::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["a".into(), "b".into()],
            vec![vec![12, 5], vec![7, 11], vec![9, 6]],
        )
        .unwrap();
        let r1 = pearson_chi2(&t).unwrap();
        let r2 = pearson_chi2(&tt).unwrap();
        assert!((r1.statistic - r2.statistic).abs() < 1e-12);
        assert_eq!(r1.df, r2.df);
    }

    #[test]
    fn collapse_preserves_totals() {
        let dist: BTreeMap<String, u64> = [("Asian", 2u64), ("MiddleEastern", 4)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let mapping: BTreeMap<String, String> = [("Asian", "Other"), ("MiddleEastern", "Other")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let out = collapse_categories(&dist, &mapping).unwrap();
        assert_eq!(out["Other"], 6);

        let identity: BTreeMap<String, String> = dist
            .keys()
            .map(|k| (k.clone(), k.clone()))
            .collect();
        assert_eq!(collapse_categories(&dist, &identity).unwrap(), dist);

        let partial: BTreeMap<String, String> =
            [("Asian".to_string(), "Other".to_string())].into_iter().collect();
        assert!(matches!(
            collapse_categories(&dist, &partial),
            Err(StatsError::UnmappedCategory(c)) if c == "MiddleEastern"
        ));
    }

    #[test]
    fn counts_from_percents_repairs_to_n() {
        // 3 cells at 1/3 of 100: naive rounding gives 99.
        let counts = counts_from_percents(100, &[33.333, 33.333, 33.334]);
        assert_eq!(counts.iter().sum::<u64>(), 100);
        let counts = counts_from_percents(788, &[71.8, 6.5, 11.7, 10.0]);
        assert_eq!(counts.iter().sum::<u64>(), 788);
        assert_eq!(counts, vec![566, 51, 92, 79]);
    }

    #[test]
    fn weighted_sample_edge_cases() {
        let accounts: Vec<(String, f64)> =
            (0..5).map(|i| (format!("a{i}"), 1.0 + i as f64)).collect();
        let all = weighted_sample(&accounts, 5, 3).unwrap();
        assert_eq!(all.len(), 5);
        let distinct: BTreeSet<&String> = all.iter().collect();
        assert_eq!(distinct.len(), 5);

        assert!(weighted_sample(&accounts, 0, 3).unwrap().is_empty());
        assert!(matches!(
            weighted_sample(&accounts, 6, 3),
            Err(StatsError::InvalidK { k: 6, n: 5 })
        ));
        let bad = vec![("a".to_string(), 0.0)];
        assert!(matches!(
            weighted_sample(&bad, 1, 3),
            Err(StatsError::NonpositiveWeight(_))
        ));
    }

    #[test]
    fn weighted_sample_respects_weights() {
        // One heavy account against nine light ones; analytic pick
        // probability 1e6/(1e6+9). Monte Carlo over seeds.
        let mut accounts = vec![("heavy".to_string(), 1e6)];
        for i in 0..9 {
            accounts.push((format!("light{i}"), 1.0));
        }
        let trials = 10_000;
        let mut heavy = 0;
        for seed in 0..trials {
            if weighted_sample(&accounts, 1, seed).unwrap()[0] == "heavy" {
                heavy += 1;
            }
        }
        assert!(heavy as f64 >= 0.99 * trials as f64, "heavy picked {heavy}/{trials}");
    }

    #[test]
    fn weighted_sample_deterministic_per_seed() {
        let accounts: Vec<(String, f64)> =
            (0..20).map(|i| (format!("a{i}"), 1.0 + (i % 7) as f64)).collect();
        assert_eq!(
            weighted_sample(&accounts, 10, 42).unwrap(),
            weighted_sample(&accounts, 10, 42).unwrap()
        );
    }

    fn lang_corpus(langs: &[Option<&str>]) -> Corpus {
        let tweets = langs
            .iter()
            .enumerate()
            .map(|(i, l)| Tweet {
                id: format!("t{i}"),
                text: "words".into(),
                created_at: utc(2018, 1, 1, 0, 0, i as u32 % 60),
                geotag: None,
                account: None,
                language: l.map(|s| s.to_string()),
                is_retweet: false,
            })
            .collect();
        Corpus::new("c", tweets).unwrap()
    }

    #[test]
    fn language_share_fractions() {
        assert_eq!(
            language_share(&lang_corpus(&[Some("en"), Some("en")]), "en"),
            Some(1.0)
        );
        let mut langs = vec![Some("en"); 96];
        langs.extend([Some("es"), Some("es"), Some("fr"), Some("de")]);
        let share = language_share(&lang_corpus(&langs), "en").unwrap();
        assert!((share - 0.96).abs() < 1e-12);
        assert_eq!(language_share(&lang_corpus(&[None, None]), "en"), None);
    }
}
