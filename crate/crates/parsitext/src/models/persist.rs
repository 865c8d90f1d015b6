//! Versioned JSON persistence for trained models.
//!
//! Every model serializes to `{schema_version, model_kind, hyperparams,
//! parameters}` with full-precision decimal floats. Ensembles nest their
//! members as complete documents, so a single file round-trips any model.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ensemble::{EnsembleKind, EnsembleModel};
use crate::error::{Error, Result};
use crate::models::{
    ForestModel, GnbModel, LdaModel, LinearModel, MnbModel, StumpModel, TrainedModel,
};

pub const SCHEMA_VERSION: u32 = 1;

/// The on-disk document shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub model_kind: String,
    pub hyperparams: Value,
    pub parameters: Value,
}

pub fn model_to_document(model: &TrainedModel) -> Result<ModelDocument> {
    let (model_kind, hyperparams, parameters) = match model {
        TrainedModel::Linear(m) => (
            "linear",
            json!({ "loss": m.loss, "l2_lambda": m.l2_lambda }),
            json!({
                "weights": m.weights,
                "bias": m.bias,
                "threshold": m.threshold,
                "score_min": m.score_min,
                "score_max": m.score_max,
            }),
        ),
        TrainedModel::Mnb(m) => (
            "multinomial_nb",
            json!({ "alpha": m.alpha }),
            json!({
                "class_log_prior": m.class_log_prior,
                "feature_log_prob": m.feature_log_prob,
            }),
        ),
        TrainedModel::Gnb(m) => (
            "gaussian_nb",
            json!({ "var_floor": m.var_floor }),
            json!({
                "class_log_prior": m.class_log_prior,
                "means": m.means,
                "variances": m.variances,
            }),
        ),
        TrainedModel::Forest(m) => (
            "random_forest",
            serde_json::to_value(&m.options)?,
            json!({
                "trees": m.trees,
                "feature_importances": m.feature_importances,
                "n_features": m.n_features,
            }),
        ),
        TrainedModel::Lda(m) => (
            "lda",
            json!({ "ridge": m.ridge }),
            json!({
                "mean0": m.mean0,
                "mean1": m.mean1,
                "w": m.w,
                "threshold": m.threshold,
                "projected_std": m.projected_std,
            }),
        ),
        TrainedModel::Stump(m) => ("stump", json!({}), serde_json::to_value(m)?),
        TrainedModel::Ensemble(e) => {
            let members: Vec<ModelDocument> = e
                .members
                .iter()
                .map(model_to_document)
                .collect::<Result<_>>()?;
            let kind = match e.kind {
                EnsembleKind::Voting => "voting",
                EnsembleKind::Pasting => "pasting",
                EnsembleKind::AdaBoost => "adaboost",
            };
            (
                kind,
                json!({}),
                json!({
                    "members": members,
                    "member_weights": e.member_weights,
                    "member_errors": e.member_errors,
                }),
            )
        }
    };
    Ok(ModelDocument {
        schema_version: SCHEMA_VERSION,
        model_kind: model_kind.to_owned(),
        hyperparams,
        parameters,
    })
}

fn corrupt(context: &str) -> impl FnOnce(serde_json::Error) -> Error + '_ {
    move |e| Error::CorruptModel(format!("{context}: {e}"))
}

pub fn model_from_document(doc: &ModelDocument) -> Result<TrainedModel> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::UnknownSchema(doc.schema_version));
    }
    let p = &doc.parameters;
    let h = &doc.hyperparams;
    Ok(match doc.model_kind.as_str() {
        "linear" => {
            #[derive(Deserialize)]
            struct LinearParams {
                weights: ndarray::Array1<f64>,
                bias: f64,
                threshold: f64,
                score_min: f64,
                score_max: f64,
            }
            #[derive(Deserialize)]
            struct LinearHyper {
                loss: crate::models::LossKind,
                l2_lambda: f64,
            }
            let params: LinearParams =
                serde_json::from_value(p.clone()).map_err(corrupt("linear parameters"))?;
            let hyper: LinearHyper =
                serde_json::from_value(h.clone()).map_err(corrupt("linear hyperparams"))?;
            TrainedModel::Linear(LinearModel {
                weights: params.weights,
                bias: params.bias,
                loss: hyper.loss,
                l2_lambda: hyper.l2_lambda,
                threshold: params.threshold,
                score_min: params.score_min,
                score_max: params.score_max,
            })
        }
        "multinomial_nb" => {
            #[derive(Deserialize)]
            struct MnbParams {
                class_log_prior: [f64; 2],
                feature_log_prob: ndarray::Array2<f64>,
            }
            let params: MnbParams =
                serde_json::from_value(p.clone()).map_err(corrupt("mnb parameters"))?;
            let alpha = h
                .get("alpha")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::CorruptModel("mnb alpha missing".into()))?;
            TrainedModel::Mnb(MnbModel {
                class_log_prior: params.class_log_prior,
                feature_log_prob: params.feature_log_prob,
                alpha,
            })
        }
        "gaussian_nb" => {
            #[derive(Deserialize)]
            struct GnbParams {
                class_log_prior: [f64; 2],
                means: ndarray::Array2<f64>,
                variances: ndarray::Array2<f64>,
            }
            let params: GnbParams =
                serde_json::from_value(p.clone()).map_err(corrupt("gnb parameters"))?;
            let var_floor = h
                .get("var_floor")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::CorruptModel("gnb var_floor missing".into()))?;
            TrainedModel::Gnb(GnbModel {
                class_log_prior: params.class_log_prior,
                means: params.means,
                variances: params.variances,
                var_floor,
            })
        }
        "random_forest" => {
            #[derive(Deserialize)]
            struct ForestParams {
                trees: Vec<crate::models::DecisionTree>,
                feature_importances: Vec<f64>,
                n_features: usize,
            }
            let params: ForestParams =
                serde_json::from_value(p.clone()).map_err(corrupt("forest parameters"))?;
            let options = serde_json::from_value(h.clone()).map_err(corrupt("forest options"))?;
            TrainedModel::Forest(ForestModel {
                trees: params.trees,
                options,
                feature_importances: params.feature_importances,
                n_features: params.n_features,
            })
        }
        "lda" => {
            #[derive(Deserialize)]
            struct LdaParams {
                mean0: ndarray::Array1<f64>,
                mean1: ndarray::Array1<f64>,
                w: ndarray::Array1<f64>,
                threshold: f64,
                projected_std: f64,
            }
            let params: LdaParams =
                serde_json::from_value(p.clone()).map_err(corrupt("lda parameters"))?;
            let ridge = h
                .get("ridge")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::CorruptModel("lda ridge missing".into()))?;
            TrainedModel::Lda(LdaModel {
                mean0: params.mean0,
                mean1: params.mean1,
                w: params.w,
                threshold: params.threshold,
                projected_std: params.projected_std,
                ridge,
            })
        }
        "stump" => {
            let stump: StumpModel =
                serde_json::from_value(p.clone()).map_err(corrupt("stump parameters"))?;
            TrainedModel::Stump(stump)
        }
        kind @ ("voting" | "pasting" | "adaboost") => {
            #[derive(Deserialize)]
            struct EnsParams {
                members: Vec<ModelDocument>,
                member_weights: Vec<f64>,
                #[serde(default)]
                member_errors: Vec<f64>,
            }
            let params: EnsParams =
                serde_json::from_value(p.clone()).map_err(corrupt("ensemble parameters"))?;
            let members: Vec<TrainedModel> = params
                .members
                .iter()
                .map(model_from_document)
                .collect::<Result<_>>()?;
            let kind = match kind {
                "voting" => EnsembleKind::Voting,
                "pasting" => EnsembleKind::Pasting,
                _ => EnsembleKind::AdaBoost,
            };
            TrainedModel::Ensemble(EnsembleModel {
                kind,
                members,
                member_weights: params.member_weights,
                member_errors: params.member_errors,
                pasting_indices: None,
            })
        }
        other => {
            return Err(Error::CorruptModel(format!("unknown model kind {other:?}")));
        }
    })
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let doc = model_to_document(model)?;
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path)?;
    let doc: ModelDocument =
        serde_json::from_str(&text).map_err(|e| Error::CorruptModel(e.to_string()))?;
    model_from_document(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LearnerSpec;
    use crate::test_fixtures::{blobs, count_blobs};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn roundtrip(model: &TrainedModel) -> TrainedModel {
        let doc = model_to_document(model).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: ModelDocument = serde_json::from_str(&text).unwrap();
        model_from_document(&parsed).unwrap()
    }

    #[test]
    fn every_kind_round_trips_with_identical_predictions() {
        let (x, y) = blobs(15, 19);
        let (counts, yc) = count_blobs(15, 19);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let probe = ndarray::Array2::from_shape_fn((100, 2), |_| rng.gen_range(-4.0..4.0));
        let probe_counts = ndarray::Array2::from_shape_fn((100, 4), |_| rng.gen_range(0.0..8.0));
        let specs = [
            LearnerSpec::svm(),
            LearnerSpec::logistic(),
            LearnerSpec::RandomForest {
                n_trees: 8,
                max_depth: Some(4),
            },
            LearnerSpec::Lda { ridge: 1e-6 },
            LearnerSpec::Gnb { var_floor: 1e-9 },
            LearnerSpec::Stump,
            LearnerSpec::AdaBoost { n_rounds: 5 },
            LearnerSpec::Pasting {
                base: Some(Box::new(LearnerSpec::Gnb { var_floor: 1e-9 })),
                n_estimators: 3,
                sample_size: 20,
            },
        ];
        for spec in specs {
            let model = spec.train(x.view(), &y, 3).unwrap();
            let loaded = roundtrip(&model);
            let a = model.predict_score(probe.view()).unwrap();
            let b = loaded.predict_score(probe.view()).unwrap();
            assert_eq!(a, b, "{}", model.kind_name());
        }
        for spec in [
            LearnerSpec::Mnb { alpha: 1.0 },
            LearnerSpec::Voting { members: None },
        ] {
            let model = spec.train(counts.view(), &yc, 3).unwrap();
            let loaded = roundtrip(&model);
            assert_eq!(
                model.predict_score(probe_counts.view()).unwrap(),
                loaded.predict_score(probe_counts.view()).unwrap(),
                "{}",
                model.kind_name()
            );
        }
    }

    #[test]
    fn unknown_schema_is_rejected() {
        let (x, y) = blobs(5, 1);
        let model = LearnerSpec::Gnb { var_floor: 1e-9 }
            .train(x.view(), &y, 0)
            .unwrap();
        let mut doc = model_to_document(&model).unwrap();
        doc.schema_version = 999;
        assert!(matches!(
            model_from_document(&doc),
            Err(Error::UnknownSchema(999))
        ));
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let (x, y) = blobs(5, 2);
        let model = LearnerSpec::Gnb { var_floor: 1e-9 }
            .train(x.view(), &y, 0)
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&model, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_model(&path), Err(Error::CorruptModel(_))));
    }

    #[test]
    fn save_load_from_disk() {
        let (x, y) = blobs(10, 3);
        let model = LearnerSpec::svm().train(x.view(), &y, 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(
            model.predict(x.view()).unwrap(),
            loaded.predict(x.view()).unwrap()
        );
    }
}
