//! Flat key-value run configuration.
//!
//! Grammar: one `key = value` per line, `#` starts a comment, blank lines
//! ignored. Unknown keys are rejected so typos fail loudly. Every key can
//! be overridden by an environment variable named `AUDIT_` plus the key
//! uppercased with dots as underscores (`geo.center_lat` →
//! `AUDIT_GEO_CENTER_LAT`).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::stats::BenchmarkScale;
use crate::textmatch::MatchConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {0}: expected 'key = value'")]
    BadLine(usize),
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("key {key}: {message}")]
    BadValue { key: String, message: String },
}

pub const ENV_PREFIX: &str = "AUDIT_";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geo_center_lat: f64,
    pub geo_center_lon: f64,
    pub geo_radius_miles: f64,
    /// `[south, west, north, east]`, unset unless configured.
    pub geo_bbox: Option<[f64; 4]>,
    /// Offset applied to zoneless log timestamps, minutes east of UTC.
    pub zoneless_offset_minutes: i32,
    /// Candidate header names for keyword metadata columns.
    pub keyword_headers: Vec<String>,
    pub match_config: MatchConfig,
    pub infer_threshold: u32,
    pub irr_resamples: u32,
    pub irr_confidence: f64,
    pub landis_koch: BenchmarkScale,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geo_center_lat: 44.5646,
            geo_center_lon: -123.2620,
            geo_radius_miles: 5.0,
            geo_bbox: None,
            zoneless_offset_minutes: 0,
            keyword_headers: crate::corpus::DEFAULT_KEYWORD_HEADERS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            match_config: MatchConfig::default(),
            infer_threshold: 2,
            irr_resamples: 1000,
            irr_confidence: 0.95,
            landis_koch: BenchmarkScale::default(),
            seed: 0,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "geo.center_lat",
    "geo.center_lon",
    "geo.radius_miles",
    "geo.bbox",
    "corpus.zoneless_offset_minutes",
    "corpus.keyword_headers",
    "match.min_base_len",
    "match.compound_min_base_len",
    "match.compound_min_container_len",
    "infer.threshold",
    "irr.resamples",
    "irr.confidence",
    "landis.slight",
    "landis.fair",
    "landis.moderate",
    "landis.substantial",
    "landis.almost_perfect",
    "seed",
];

impl RunConfig {
    /// Parse config text over the defaults, then apply any `AUDIT_*`
    /// environment overrides.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_pairs(parse_pairs(text)?)?;
        cfg.apply_env_overrides()?;
        Ok(cfg)
    }

    /// Defaults plus environment overrides only.
    pub fn from_env() -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_env_overrides()?;
        Ok(cfg)
    }

    fn apply_env_overrides(&mut self) -> Result<(), ConfigError> {
        let mut pairs = Vec::new();
        for key in KNOWN_KEYS {
            let env_key = format!(
                "{ENV_PREFIX}{}",
                key.to_uppercase().replace(['.', '-'], "_")
            );
            if let Ok(v) = std::env::var(&env_key) {
                pairs.push((key.to_string(), v));
            }
        }
        self.apply_pairs(pairs)
    }

    fn apply_pairs(&mut self, pairs: Vec<(String, String)>) -> Result<(), ConfigError> {
        for (key, value) in pairs {
            self.apply(&key, &value)?;
        }
        Ok(())
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |message: &str| ConfigError::BadValue {
            key: key.to_string(),
            message: message.to_string(),
        };
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.trim().parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                message: format!("cannot parse {value:?}"),
            })
        }
        match key {
            "geo.center_lat" => self.geo_center_lat = num(key, value)?,
            "geo.center_lon" => self.geo_center_lon = num(key, value)?,
            "geo.radius_miles" => self.geo_radius_miles = num(key, value)?,
            "geo.bbox" => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("expected four comma-separated numbers"))?;
                if parts.len() != 4 {
                    return Err(bad("expected four comma-separated numbers"));
                }
                self.geo_bbox = Some([parts[0], parts[1], parts[2], parts[3]]);
            }
            "corpus.zoneless_offset_minutes" => self.zoneless_offset_minutes = num(key, value)?,
            "corpus.keyword_headers" => {
                self.keyword_headers = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if self.keyword_headers.is_empty() {
                    return Err(bad("expected at least one header name"));
                }
            }
            "match.min_base_len" => self.match_config.min_base_len = num(key, value)?,
            "match.compound_min_base_len" => {
                self.match_config.compound_min_base_len = num(key, value)?
            }
            "match.compound_min_container_len" => {
                self.match_config.compound_min_container_len = num(key, value)?
            }
            "infer.threshold" => self.infer_threshold = num(key, value)?,
            "irr.resamples" => self.irr_resamples = num(key, value)?,
            "irr.confidence" => self.irr_confidence = num(key, value)?,
            "landis.slight" => self.landis_koch.slight = num(key, value)?,
            "landis.fair" => self.landis_koch.fair = num(key, value)?,
            "landis.moderate" => self.landis_koch.moderate = num(key, value)?,
            "landis.substantial" => self.landis_koch.substantial = num(key, value)?,
            "landis.almost_perfect" => self.landis_koch.almost_perfect = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::BadLine(idx + 1))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Keys → values for reproducibility headers in reports.
pub fn to_map(cfg: &RunConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("geo.center_lat".into(), cfg.geo_center_lat.to_string());
    m.insert("geo.center_lon".into(), cfg.geo_center_lon.to_string());
    m.insert("geo.radius_miles".into(), cfg.geo_radius_miles.to_string());
    if let Some([s, w, n, e]) = cfg.geo_bbox {
        m.insert("geo.bbox".into(), format!("{s},{w},{n},{e}"));
    }
    m.insert(
        "corpus.zoneless_offset_minutes".into(),
        cfg.zoneless_offset_minutes.to_string(),
    );
    m.insert(
        "corpus.keyword_headers".into(),
        cfg.keyword_headers.join(","),
    );
    m.insert("match".into(), cfg.match_config.fingerprint());
    m.insert("infer.threshold".into(), cfg.infer_threshold.to_string());
    m.insert("seed".into(), cfg.seed.to_string());
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys_and_comments() {
        let text = "\
# geometry
geo.center_lat = 44.60
geo.radius_miles = 3.5
geo.bbox = 44.2, -123.8, 44.8, -123.0
infer.threshold = 3
seed = 17
";
        let cfg = RunConfig::from_text(text).unwrap();
        assert_eq!(cfg.geo_center_lat, 44.60);
        assert_eq!(cfg.geo_radius_miles, 3.5);
        assert_eq!(cfg.geo_bbox, Some([44.2, -123.8, 44.8, -123.0]));
        assert_eq!(cfg.infer_threshold, 3);
        assert_eq!(cfg.seed, 17);
        // Untouched keys keep defaults.
        assert_eq!(cfg.irr_resamples, 1000);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            RunConfig::from_text("geo.centre_lat = 1.0"),
            Err(ConfigError::UnknownKey(k)) if k == "geo.centre_lat"
        ));
    }

    #[test]
    fn bad_line_and_bad_value() {
        assert!(matches!(
            RunConfig::from_text("just words"),
            Err(ConfigError::BadLine(1))
        ));
        assert!(matches!(
            RunConfig::from_text("seed = notanumber"),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn env_override_applies() {
        // Avoid cross-test interference: pick a key unused elsewhere.
        std::env::set_var("AUDIT_IRR_RESAMPLES", "123");
        let cfg = RunConfig::from_text("seed = 5").unwrap();
        std::env::remove_var("AUDIT_IRR_RESAMPLES");
        assert_eq!(cfg.irr_resamples, 123);
        assert_eq!(cfg.seed, 5);
    }
}
