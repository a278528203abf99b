use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::data::AlignedFrame;
use crate::error::{Error, Result};
use crate::nn::LstmConfig;
use crate::train::TrainConfig;

pub const OHLC_FIELDS: [&str; 4] = ["open", "high", "low", "close"];

/// Which inputs the model sees besides the target's own bars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Variant {
    /// The target's open/high/low/close.
    Main,
    /// Main plus one comparison instrument (its close, or its OHLC when augmenting).
    With(String),
    /// Main plus arbitrary extra columns.
    Custom(Vec<String>),
}

impl Variant {
    pub fn label(&self) -> String {
        match self {
            Variant::Main => "Main".into(),
            Variant::With(asset) => format!("+{asset}"),
            Variant::Custom(cols) => format!("custom({})", cols.join(",")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("main") {
            Ok(Variant::Main)
        } else if let Some(asset) = s.strip_prefix('+') {
            if asset.is_empty() {
                return Err(Error::Config("variant `+` needs an instrument name".into()));
            }
            Ok(Variant::With(asset.to_string()))
        } else {
            Err(Error::Config(format!("unknown variant `{s}` (expected `Main` or `+SYMBOL`)")))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum VariantRepr {
    Name(String),
    Columns(Vec<String>),
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Variant::Custom(cols) => VariantRepr::Columns(cols.clone()).serialize(s),
            other => VariantRepr::Name(other.label()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match VariantRepr::deserialize(d)? {
            VariantRepr::Name(name) => name.parse().map_err(serde::de::Error::custom),
            VariantRepr::Columns(cols) => Ok(Variant::Custom(cols)),
        }
    }
}

/// Network shape apart from the input width, which follows from the feature set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub hidden_dim: usize,
    pub dense_dim: usize,
    pub lookback: usize,
    pub dropout_rate: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        let c = LstmConfig::default();
        ModelSpec {
            hidden_dim: c.hidden_dim,
            dense_dim: c.dense_dim,
            lookback: c.lookback,
            dropout_rate: c.dropout_rate,
        }
    }
}

impl ModelSpec {
    pub fn config(&self, input_dim: usize) -> LstmConfig {
        LstmConfig {
            input_dim,
            hidden_dim: self.hidden_dim,
            lookback: self.lookback,
            dense_dim: self.dense_dim,
            dropout_rate: self.dropout_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Instrument symbol; its columns are `<target>.open` .. `<target>.close`.
    pub target: String,
    pub variant: Variant,
    /// Add the comparison instrument's full OHLC instead of only its close.
    #[serde(default)]
    pub augment_ohlc: bool,
    pub train_last: NaiveDate,
    pub test_first: NaiveDate,
    pub test_last: NaiveDate,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub training: TrainConfig,
}

impl ExperimentSpec {
    /// Content hash of the canonical JSON form (which includes the seed).
    pub fn run_id(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }

    /// Seed for this job, derived from the global seed and the variant label so
    /// variants run in parallel never share a random stream.
    pub fn job_seed(&self) -> u64 {
        let digest = Sha256::digest(format!("{}:{}", self.training.seed, self.variant.label()).as_bytes());
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    pub fn with_variant(&self, variant: Variant) -> ExperimentSpec {
        ExperimentSpec { variant, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> ExperimentSpec {
        let mut s = self.clone();
        s.training.seed = seed;
        s
    }
}

/// Resolves the feature columns and target column for a spec.
pub fn compose_features(frame: &AlignedFrame, spec: &ExperimentSpec) -> Result<(Vec<String>, String)> {
    let mut features: Vec<String> = OHLC_FIELDS.iter().map(|f| format!("{}.{f}", spec.target)).collect();
    match &spec.variant {
        Variant::Main => {}
        Variant::With(asset) => {
            if spec.augment_ohlc {
                features.extend(OHLC_FIELDS.iter().map(|f| format!("{asset}.{f}")));
            } else {
                features.push(format!("{asset}.close"));
            }
        }
        Variant::Custom(cols) => {
            for c in cols {
                if !features.contains(c) {
                    features.push(c.clone());
                }
            }
        }
    }
    for c in &features {
        if !frame.has_column(c) {
            return Err(Error::MissingColumn(c.clone()));
        }
    }
    Ok((features, format!("{}.close", spec.target)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{business_days, demo_universe};

    fn frame() -> AlignedFrame {
        let series = demo_universe(30, 1).unwrap();
        crate::data::align(&series).unwrap()
    }

    fn spec(variant: Variant) -> ExperimentSpec {
        let d = business_days(NaiveDate::from_ymd_opt(2013, 6, 24).unwrap(), 30);
        ExperimentSpec {
            target: "BP".into(),
            variant,
            augment_ohlc: false,
            train_last: d[19],
            test_first: d[20],
            test_last: d[29],
            model: ModelSpec::default(),
            training: TrainConfig::default(),
        }
    }

    #[test]
    fn feature_counts_per_variant() {
        let f = frame();
        let (main, target) = compose_features(&f, &spec(Variant::Main)).unwrap();
        assert_eq!(main, ["BP.open", "BP.high", "BP.low", "BP.close"]);
        assert_eq!(target, "BP.close");
        let (wti, _) = compose_features(&f, &spec(Variant::With("WTI".into()))).unwrap();
        assert_eq!(wti.len(), 5);
        assert_eq!(wti[4], "WTI.close");
        let mut aug = spec(Variant::With("WTI".into()));
        aug.augment_ohlc = true;
        let (cols, _) = compose_features(&f, &aug).unwrap();
        assert_eq!(cols.len(), 8);
        assert!(cols[..4].iter().all(|c| c.starts_with("BP.")));
    }

    #[test]
    fn missing_instrument_is_named() {
        let err = compose_features(&frame(), &spec(Variant::With("XOM".into()))).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "XOM.close"));
    }

    #[test]
    fn variant_text_forms() {
        assert_eq!("main".parse::<Variant>().unwrap(), Variant::Main);
        assert_eq!("+GOLD".parse::<Variant>().unwrap(), Variant::With("GOLD".into()));
        assert!("GOLD".parse::<Variant>().is_err());
        assert!("+".parse::<Variant>().is_err());
        for v in [Variant::Main, Variant::With("USD".into()), Variant::Custom(vec!["a".into(), "b".into()])] {
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<Variant>(&json).unwrap(), v);
        }
    }

    #[test]
    fn run_id_tracks_content_and_seed() {
        let a = spec(Variant::Main);
        assert_eq!(a.run_id(), a.clone().run_id());
        assert_eq!(a.run_id().len(), 16);
        assert_ne!(a.run_id(), a.with_seed(1).run_id());
        assert_ne!(a.run_id(), a.with_variant(Variant::With("WTI".into())).run_id());
        assert_ne!(a.job_seed(), a.with_variant(Variant::With("WTI".into())).job_seed());
        assert_ne!(a.job_seed(), a.with_seed(1).job_seed());
    }
}
