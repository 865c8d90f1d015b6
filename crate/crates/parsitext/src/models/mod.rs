//! Classifiers with a uniform train / score / proba / predict contract.

pub mod lda;
pub mod linear;
pub mod naive_bayes;
mod persist;
pub mod tree;

pub use lda::{train_lda, LdaModel};
pub use linear::{
    linear_objective, logistic_gradient, train_linear, LinearModel, LossKind, SgdOptions,
};
pub use naive_bayes::{train_gnb, train_mnb, GnbModel, MnbModel};
pub use persist::{load_model, model_from_document, model_to_document, save_model, ModelDocument,
    SCHEMA_VERSION};
pub use tree::{
    train_random_forest, train_stump, DecisionTree, ForestModel, ForestOptions, MaxFeatures,
    StumpModel, TreeNode,
};

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::ensemble::{self, EnsembleKind, EnsembleModel};
use crate::error::{Error, Result};

/// Any trained classifier, including the ensembles.
///
/// All kinds expose a real-valued score, a two-column probability row, and a
/// hard prediction. Predictions are positive strictly above the decision
/// threshold, so a tie goes to class 0.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Linear(LinearModel),
    Mnb(MnbModel),
    Gnb(GnbModel),
    Forest(ForestModel),
    Lda(LdaModel),
    Stump(StumpModel),
    Ensemble(EnsembleModel),
}

impl TrainedModel {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TrainedModel::Linear(m) => match m.loss {
                LossKind::Hinge => "linear_hinge",
                LossKind::Logistic => "linear_logistic",
            },
            TrainedModel::Mnb(_) => "multinomial_nb",
            TrainedModel::Gnb(_) => "gaussian_nb",
            TrainedModel::Forest(_) => "random_forest",
            TrainedModel::Lda(_) => "lda",
            TrainedModel::Stump(_) => "stump",
            TrainedModel::Ensemble(e) => match e.kind {
                EnsembleKind::Voting => "voting",
                EnsembleKind::Pasting => "pasting",
                EnsembleKind::AdaBoost => "adaboost",
            },
        }
    }

    /// Natural threshold on [`Self::predict_score`] output: 0.0 for margin
    /// and log-odds scales, 0.5 for probability scales.
    pub fn default_threshold(&self) -> f64 {
        match self {
            TrainedModel::Linear(m) => m.threshold,
            TrainedModel::Mnb(_) | TrainedModel::Gnb(_) | TrainedModel::Lda(_) => 0.0,
            TrainedModel::Forest(_) | TrainedModel::Stump(_) => 0.5,
            TrainedModel::Ensemble(e) => match e.kind {
                EnsembleKind::AdaBoost => 0.0,
                _ => 0.5,
            },
        }
    }

    /// Ranking score per row: margin (linear), log-odds (naive Bayes),
    /// vote fraction (forest, stump), mean positive probability (voting,
    /// pasting), or the signed boosted sum (AdaBoost).
    pub fn predict_score(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        match self {
            TrainedModel::Linear(m) => m.score_rows(x),
            TrainedModel::Mnb(m) => Ok(naive_bayes::log_odds(&m.log_joint(x)?)),
            TrainedModel::Gnb(m) => Ok(naive_bayes::log_odds(&m.log_joint(x)?)),
            TrainedModel::Forest(m) => Ok(Array1::from(m.vote_fractions(x)?)),
            TrainedModel::Lda(m) => m.score_rows(x),
            TrainedModel::Stump(m) => {
                let mut buf = vec![0.0; x.ncols()];
                Ok(Array1::from_iter(x.rows().into_iter().map(|row| {
                    for (b, v) in buf.iter_mut().zip(row.iter()) {
                        *b = *v;
                    }
                    m.proba_pos_row(&buf)
                })))
            }
            TrainedModel::Ensemble(e) => e.predict_score(x),
        }
    }

    /// Two-column probability matrix; rows sum to 1.
    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        match self {
            TrainedModel::Linear(m) => {
                let scores = m.score_rows(x)?;
                Ok(two_column(scores.iter().map(|&s| m.proba_pos(s))))
            }
            TrainedModel::Mnb(m) => Ok(naive_bayes::posteriors_from_log_joint(&m.log_joint(x)?)),
            TrainedModel::Gnb(m) => Ok(naive_bayes::posteriors_from_log_joint(&m.log_joint(x)?)),
            TrainedModel::Forest(m) => {
                Ok(two_column(m.vote_fractions(x)?.into_iter()))
            }
            TrainedModel::Lda(m) => {
                let scores = m.score_rows(x)?;
                Ok(two_column(scores.iter().map(|&s| m.proba_pos(s))))
            }
            TrainedModel::Stump(_) => {
                let scores = self.predict_score(x)?;
                Ok(two_column(scores.iter().copied()))
            }
            TrainedModel::Ensemble(e) => e.predict_proba(x),
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        self.predict_with_threshold(x, self.default_threshold())
    }

    /// Hard labels at an explicit threshold on the score scale.
    pub fn predict_with_threshold(
        &self,
        x: ArrayView2<f64>,
        threshold: f64,
    ) -> Result<Vec<usize>> {
        Ok(self
            .predict_score(x)?
            .iter()
            .map(|&s| usize::from(s > threshold))
            .collect())
    }
}

fn two_column(pos: impl Iterator<Item = f64>) -> Array2<f64> {
    let p: Vec<f64> = pos.collect();
    let mut out = Array2::<f64>::zeros((p.len(), 2));
    for (i, v) in p.into_iter().enumerate() {
        out[[i, 0]] = 1.0 - v;
        out[[i, 1]] = v;
    }
    out
}

fn default_l2() -> f64 {
    1e-4
}
fn default_epochs() -> usize {
    50
}
fn default_eta0() -> f64 {
    0.1
}
fn default_alpha() -> f64 {
    1.0
}
fn default_var_floor() -> f64 {
    1e-9
}
fn default_ridge() -> f64 {
    1e-6
}
fn default_n_trees() -> usize {
    100
}
fn default_n_estimators() -> usize {
    10
}
fn default_sample_size() -> usize {
    200
}
fn default_n_rounds() -> usize {
    100
}

/// Declarative learner configuration; `train` dispatches to the matching
/// trainer with seeds derived from the experiment seed.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    /// Hinge-loss SGD linear SVM with L2 regularization.
    Svm {
        #[serde(default = "default_l2")]
        l2_lambda: f64,
        #[serde(default = "default_epochs")]
        epochs: usize,
        #[serde(default = "default_eta0")]
        eta0: f64,
    },
    /// SGD logistic regression.
    Logistic {
        #[serde(default = "default_l2")]
        l2_lambda: f64,
        #[serde(default = "default_epochs")]
        epochs: usize,
        #[serde(default = "default_eta0")]
        eta0: f64,
    },
    RandomForest {
        #[serde(default = "default_n_trees")]
        n_trees: usize,
        #[serde(default)]
        max_depth: Option<usize>,
    },
    Lda {
        #[serde(default = "default_ridge")]
        ridge: f64,
    },
    Mnb {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Gnb {
        #[serde(default = "default_var_floor")]
        var_floor: f64,
    },
    Stump,
    /// Soft voting; `members: None` means the standard roster of
    /// SVM, logistic, random forest, Gaussian NB, and multinomial NB.
    Voting {
        #[serde(default)]
        members: Option<Vec<LearnerSpec>>,
    },
    /// Fixed-size sampling without replacement for each member.
    Pasting {
        #[serde(default)]
        base: Option<Box<LearnerSpec>>,
        #[serde(default = "default_n_estimators")]
        n_estimators: usize,
        #[serde(default = "default_sample_size")]
        sample_size: usize,
    },
    AdaBoost {
        #[serde(default = "default_n_rounds")]
        n_rounds: usize,
    },
}

impl LearnerSpec {
    pub fn svm() -> Self {
        LearnerSpec::Svm {
            l2_lambda: default_l2(),
            epochs: default_epochs(),
            eta0: default_eta0(),
        }
    }

    pub fn logistic() -> Self {
        LearnerSpec::Logistic {
            l2_lambda: default_l2(),
            epochs: default_epochs(),
            eta0: default_eta0(),
        }
    }

    /// Parse a short CLI name like `svm`, `lg`, `rnd`.
    pub fn from_cli_name(name: &str) -> Result<Self> {
        Ok(match name {
            "svm" => LearnerSpec::svm(),
            "lg" | "logistic" => LearnerSpec::logistic(),
            "rnd" | "random_forest" => LearnerSpec::RandomForest {
                n_trees: default_n_trees(),
                max_depth: None,
            },
            "lda" => LearnerSpec::Lda {
                ridge: default_ridge(),
            },
            "mnb" => LearnerSpec::Mnb {
                alpha: default_alpha(),
            },
            "gnb" => LearnerSpec::Gnb {
                var_floor: default_var_floor(),
            },
            "stump" => LearnerSpec::Stump,
            "voting" => LearnerSpec::Voting { members: None },
            "pasting" => LearnerSpec::Pasting {
                base: None,
                n_estimators: default_n_estimators(),
                sample_size: default_sample_size(),
            },
            "adaboost" => LearnerSpec::AdaBoost {
                n_rounds: default_n_rounds(),
            },
            other => {
                return Err(Error::InvalidConfig(format!("unknown learner {other:?}")))
            }
        })
    }

    pub fn train(&self, x: ArrayView2<f64>, y: &[usize], seed: u64) -> Result<TrainedModel> {
        Ok(match self {
            LearnerSpec::Svm {
                l2_lambda,
                epochs,
                eta0,
            } => TrainedModel::Linear(train_linear(
                x,
                y,
                LossKind::Hinge,
                &SgdOptions {
                    l2_lambda: *l2_lambda,
                    epochs: *epochs,
                    eta0: *eta0,
                    seed,
                },
            )?),
            LearnerSpec::Logistic {
                l2_lambda,
                epochs,
                eta0,
            } => TrainedModel::Linear(train_linear(
                x,
                y,
                LossKind::Logistic,
                &SgdOptions {
                    l2_lambda: *l2_lambda,
                    epochs: *epochs,
                    eta0: *eta0,
                    seed,
                },
            )?),
            LearnerSpec::RandomForest { n_trees, max_depth } => {
                TrainedModel::Forest(train_random_forest(
                    x,
                    y,
                    &ForestOptions {
                        n_trees: *n_trees,
                        max_depth: *max_depth,
                        seed,
                        ..Default::default()
                    },
                )?)
            }
            LearnerSpec::Lda { ridge } => TrainedModel::Lda(train_lda(x, y, *ridge)?),
            LearnerSpec::Mnb { alpha } => TrainedModel::Mnb(train_mnb(x, y, *alpha)?),
            LearnerSpec::Gnb { var_floor } => TrainedModel::Gnb(train_gnb(x, y, *var_floor)?),
            LearnerSpec::Stump => TrainedModel::Stump(train_stump(x, y, None)?),
            LearnerSpec::Voting { members } => {
                let roster = members
                    .clone()
                    .unwrap_or_else(ensemble::default_voting_roster);
                TrainedModel::Ensemble(ensemble::train_voting(&roster, x, y, seed)?)
            }
            LearnerSpec::Pasting {
                base,
                n_estimators,
                sample_size,
            } => {
                let base_spec = base
                    .as_deref()
                    .cloned()
                    .unwrap_or(LearnerSpec::Voting { members: None });
                TrainedModel::Ensemble(ensemble::train_pasting(
                    &base_spec,
                    x,
                    y,
                    *n_estimators,
                    *sample_size,
                    seed,
                )?)
            }
            LearnerSpec::AdaBoost { n_rounds } => {
                TrainedModel::Ensemble(ensemble::train_adaboost(x, y, *n_rounds, seed)?)
            }
        })
    }
}
