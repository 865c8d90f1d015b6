//! Experiment configuration: JSON-loadable, fully defaulted, hashed into
//! every output artifact.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::NgramUnit;
use crate::models::LearnerSpec;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct NormalizeConfig {
    /// Treat input as FEnglish and transliterate before normalizing.
    pub fenglish: bool,
    /// Override the shipped character rule table.
    pub table: Option<PathBuf>,
    /// Override the shipped affix list.
    pub affixes: Option<PathBuf>,
}


#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizeConfig {
    pub stem: bool,
    pub stopwords: bool,
    pub stopword_file: Option<PathBuf>,
    pub stem_rules_file: Option<PathBuf>,
}

impl Default for TokenizeConfig {
    fn default() -> Self {
        TokenizeConfig {
            stem: true,
            stopwords: true,
            stopword_file: None,
            stem_rules_file: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterFeatureMode {
    /// Distances to each center replace the row.
    Distances,
    /// The assigned center replaces the row.
    Centers,
    /// Distances, centers, and the base features side by side.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KMeansSpace {
    /// Cluster the PCA-reduced matrix (pipeline order).
    Pca,
    /// Cluster the raw TF-IDF matrix.
    Tfidf,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct KMeansConfig {
    pub k: usize,
    pub features: ClusterFeatureMode,
    pub space: KMeansSpace,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            k: 37,
            features: ClusterFeatureMode::Distances,
            space: KMeansSpace::Pca,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub unit: NgramUnit,
    pub n: usize,
    pub tfidf: bool,
    pub min_df: usize,
    /// Explained-variance ratio to retain; `None` skips PCA.
    pub pca_ratio: Option<f64>,
    /// KMeans-derived features; off by default.
    pub kmeans: Option<KMeansConfig>,
    /// Forest-importance feature selection; off by default.
    pub select_features: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            unit: NgramUnit::Word,
            n: 1,
            tfidf: true,
            min_df: 1,
            pca_ratio: Some(0.99),
            kmeans: None,
            select_features: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Cross-validate the learner on the training split.
    pub cv_folds: Option<usize>,
    /// Learning-curve training fractions; empty skips the curve.
    pub learning_curve_fractions: Vec<f64>,
    /// Tune the decision threshold to reach this recall on the test split.
    pub tune_recall: Option<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            cv_folds: None,
            learning_curve_fractions: vec![0.1, 0.25, 0.5, 0.75, 1.0],
            tune_recall: None,
        }
    }
}

/// The complete experiment description. The default value is the standard
/// preset: normalize, tokenize with stemming and stopwords, word-unigram
/// TF-IDF, PCA at 0.99 retained variance, SGD-SVM.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub test_fraction: f64,
    pub normalize: NormalizeConfig,
    pub tokenize: TokenizeConfig,
    pub features: FeatureConfig,
    pub learner: LearnerSpec,
    pub eval: EvalConfig,
    /// Dataset columns and label mapping.
    pub text_col: String,
    pub label_col: String,
    pub label_map: BTreeMap<String, usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            test_fraction: 0.2,
            normalize: NormalizeConfig::default(),
            tokenize: TokenizeConfig::default(),
            features: FeatureConfig::default(),
            learner: LearnerSpec::svm(),
            eval: EvalConfig::default(),
            text_col: "text".to_owned(),
            label_col: "label".to_owned(),
            label_map: crate::dataset::default_label_map(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidFraction(self.test_fraction));
        }
        if self.features.n == 0 {
            return Err(Error::InvalidConfig("n-gram order must be >= 1".into()));
        }
        if let Some(r) = self.features.pca_ratio {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "pca ratio {r} not in (0, 1]"
                )));
            }
        }
        if let Some(k) = &self.features.kmeans {
            if k.k == 0 {
                return Err(Error::InvalidConfig("kmeans k must be >= 1".into()));
            }
        }
        for &f in &self.eval.learning_curve_fractions {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidFraction(f));
            }
        }
        if let Some((k, &v)) = self.label_map.iter().find(|(_, &v)| v > 1) {
            return Err(Error::InvalidConfig(format!(
                "label map entry {k:?} -> {v}: labels must be 0 or 1"
            )));
        }
        Ok(())
    }

    /// Canonical JSON used for `config.resolved.json` and hashing.
    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON; embedded in every artifact.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(
            self.to_canonical_json()?.as_bytes(),
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_the_standard_preset() {
        let c = ExperimentConfig::default();
        assert_eq!(c.features.unit, NgramUnit::Word);
        assert_eq!(c.features.n, 1);
        assert_eq!(c.features.pca_ratio, Some(0.99));
        assert!(c.features.kmeans.is_none());
        assert!(!c.features.select_features);
        assert!(matches!(c.learner, LearnerSpec::Svm { .. }));
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"seed": 7, "learner": {"kind": "mnb"}}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(matches!(cfg.learner, LearnerSpec::Mnb { alpha } if alpha == 1.0));
        assert_eq!(cfg.test_fraction, 0.2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"sede": 7}"#);
        assert!(r.is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 43;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn validation_catches_bad_values() {
        let c = ExperimentConfig {
            test_fraction: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            features: FeatureConfig {
                pca_ratio: Some(1.5),
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            features: FeatureConfig {
                n: 0,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
