//! End-to-end orchestration: normalize, tokenize, featurize, train,
//! evaluate, persist. Every stateful transform is fitted on the training
//! split only and frozen before it touches held-out rows.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ClusterFeatureMode, ExperimentConfig, FeatureConfig, KMeansSpace,
    NormalizeConfig, TokenizeConfig};
use crate::dataset::{split_train_test, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    accuracy, confusion, cross_validate, learning_curve, learning_curve_to_csv,
    precision_recall_f1, roc_auc, roc_to_csv, tune_threshold_scores, ConfusionCounts, CvResult,
    FoldMetrics, LearningCurvePoint, MetricStats, RocCurve, ThresholdChoice, ThresholdTarget,
};
use crate::features::{
    build_vocabulary, cluster_center_features, cluster_distance_features, combine_features,
    count_transform, kmeans_fit, pca_fit, pca_transform, select_features_by_importance,
    apply_column_mask, tfidf_transform, FeatureMatrix, ImportanceThreshold, KMeansModel,
    PcaModel, Vocabulary,
};
use crate::models::{save_model, ForestOptions, TrainedModel};
use crate::text_norm::{normalize, transliterate_fenglish, NormalizationTable, NormalizedText,
    TransliterationTable};
use crate::tokenize::{load_stopwords, remove_stopwords, shipped_stopwords, stem_stream,
    tokenize, StemmerRules, TokenStream};

/// Loaded text-processing tables: normalization, optional FEnglish
/// transliteration, stopwords, and stemmer rules.
pub struct TextPrep {
    table: NormalizationTable,
    fenglish: bool,
    stopwords: Option<HashSet<String>>,
    stem_rules: Option<StemmerRules>,
}

impl TextPrep {
    pub fn from_config(norm: &NormalizeConfig, tok: &TokenizeConfig) -> Result<TextPrep> {
        let table = match (&norm.table, &norm.affixes) {
            (None, None) => NormalizationTable::shipped().clone(),
            (t, a) => {
                let table_text = match t {
                    Some(p) => std::fs::read_to_string(p)?,
                    None => include_str!("data/norm_table.tsv").to_owned(),
                };
                let affix_text = match a {
                    Some(p) => std::fs::read_to_string(p)?,
                    None => include_str!("data/affixes.txt").to_owned(),
                };
                NormalizationTable::from_strs(&table_text, &affix_text)?
            }
        };
        let stopwords = if tok.stopwords {
            let raw = match &tok.stopword_file {
                Some(p) => load_stopwords(p)?,
                None => shipped_stopwords().clone(),
            };
            // keep the set canonical under the active table
            Some(raw.iter().map(|w| normalize(w, &table).text).collect())
        } else {
            None
        };
        let stem_rules = if tok.stem {
            Some(match &tok.stem_rules_file {
                Some(p) => StemmerRules::from_file(p)?,
                None => StemmerRules::shipped().clone(),
            })
        } else {
            None
        };
        Ok(TextPrep {
            table,
            fenglish: norm.fenglish,
            stopwords,
            stem_rules,
        })
    }

    pub fn normalize_text(&self, raw: &str) -> NormalizedText {
        if self.fenglish {
            transliterate_fenglish(raw, TransliterationTable::shipped(), &self.table)
        } else {
            normalize(raw, &self.table)
        }
    }

    /// Normalize, tokenize, filter stopwords, stem.
    pub fn process(&self, raw: &str, doc_id: &str) -> TokenStream {
        let normalized = self.normalize_text(raw);
        let mut stream = tokenize(&normalized.text, doc_id);
        if let Some(stop) = &self.stopwords {
            stream = remove_stopwords(&stream, stop);
        }
        if let Some(rules) = &self.stem_rules {
            stream = stem_stream(&stream, rules);
        }
        stream
    }
}

/// KMeans feature stage as fitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansStage {
    pub model: KMeansModel,
    pub mode: ClusterFeatureMode,
    pub space: KMeansSpace,
}

/// The fitted feature pipeline: vocabulary with IDF statistics, optional
/// PCA, optional KMeans-derived features, optional selection mask.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub config: FeatureConfig,
    pub vocab: Vocabulary,
    pub pca: Option<PcaModel>,
    pub kmeans: Option<KMeansStage>,
    pub mask: Option<Vec<bool>>,
}

impl FeaturePipeline {
    /// Fit every stage on the training documents only.
    pub fn fit(
        cfg: &FeatureConfig,
        docs: &[TokenStream],
        y: &[usize],
        seed: u64,
    ) -> Result<FeaturePipeline> {
        let vocab = build_vocabulary(docs, cfg.unit, cfg.n, cfg.min_df)?;
        let base = base_matrix(cfg, docs, &vocab);

        let pca = match cfg.pca_ratio {
            Some(ratio) => Some(pca_fit(&base, ratio)?),
            None => None,
        };
        let reduced = match &pca {
            Some(model) => pca_transform(&base, model)?,
            None => base.clone(),
        };

        let kmeans = match &cfg.kmeans {
            Some(kc) => {
                let space = match kc.space {
                    KMeansSpace::Pca => &reduced,
                    KMeansSpace::Tfidf => &base,
                };
                let k = kc.k.min(space.rows());
                Some(KMeansStage {
                    model: kmeans_fit(&space.data, k, seed)?,
                    mode: kc.features,
                    space: kc.space,
                })
            }
            None => None,
        };

        let mut pipeline = FeaturePipeline {
            config: cfg.clone(),
            vocab,
            pca,
            kmeans,
            mask: None,
        };
        if cfg.select_features {
            let unmasked = pipeline.transform(docs)?;
            let mask = select_features_by_importance(
                &unmasked,
                y,
                ImportanceThreshold::Mean,
                &ForestOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            pipeline.mask = Some(mask);
        }
        Ok(pipeline)
    }

    /// Apply the frozen stages to any documents.
    pub fn transform(&self, docs: &[TokenStream]) -> Result<FeatureMatrix> {
        let base = base_matrix(&self.config, docs, &self.vocab);
        let reduced = match &self.pca {
            Some(model) => pca_transform(&base, model)?,
            None => base.clone(),
        };
        let assembled = match &self.kmeans {
            None => reduced,
            Some(stage) => {
                let space = match stage.space {
                    KMeansSpace::Pca => &reduced,
                    KMeansSpace::Tfidf => &base,
                };
                match stage.mode {
                    ClusterFeatureMode::Distances => {
                        cluster_distance_features(space, &stage.model)?
                    }
                    ClusterFeatureMode::Centers => cluster_center_features(space, &stage.model)?,
                    ClusterFeatureMode::Combined => {
                        let dist = cluster_distance_features(space, &stage.model)?;
                        let cent = cluster_center_features(space, &stage.model)?;
                        combine_features(&[&dist, &cent, &reduced])?
                    }
                }
            }
        };
        match &self.mask {
            Some(mask) => apply_column_mask(&assembled, mask),
            None => Ok(assembled),
        }
    }
}

fn base_matrix(cfg: &FeatureConfig, docs: &[TokenStream], vocab: &Vocabulary) -> FeatureMatrix {
    if cfg.tfidf {
        tfidf_transform(docs, vocab)
    } else {
        count_transform(docs, vocab)
    }
}

/// Metrics over one split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitMetrics {
    pub n: usize,
    pub confusion: ConfusionCounts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub auc: Option<f64>,
    pub degenerate: bool,
}

fn split_metrics(model: &TrainedModel, x: &FeatureMatrix, y: &[usize]) -> Result<(SplitMetrics, Option<RocCurve>)> {
    let pred = model.predict(x.data.view())?;
    let scores = model.predict_score(x.data.view())?.to_vec();
    let c = confusion(y, &pred)?;
    let prf = precision_recall_f1(&c);
    let curve = roc_auc(y, &scores).ok();
    Ok((
        SplitMetrics {
            n: y.len(),
            confusion: c,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            accuracy: accuracy(&c),
            auc: curve.as_ref().map(|r| r.auc),
            degenerate: prf.degenerate,
        },
        curve,
    ))
}

/// Cross-validation summary embedded in the report (fold indices omitted).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub per_fold: Vec<FoldMetrics>,
    pub precision: MetricStats,
    pub recall: MetricStats,
    pub f1: MetricStats,
    pub accuracy: MetricStats,
    pub auc: MetricStats,
}

impl From<CvResult> for CvReport {
    fn from(r: CvResult) -> Self {
        CvReport {
            k: r.k,
            per_fold: r.per_fold,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
            accuracy: r.accuracy,
            auc: r.auc,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_docs: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub unit: String,
    pub n: usize,
    pub tfidf: bool,
    pub vocab_size: usize,
    pub pca_components: Option<usize>,
    pub pca_retained_ratio: Option<f64>,
    pub kmeans_k: Option<usize>,
    pub selected_columns: Option<usize>,
    pub final_columns: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub target_recall: f64,
    pub choice: ThresholdChoice,
}

/// The `report.json` document. Contains no wall-clock data, so identical
/// config + dataset + seed reproduce it byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub model_kind: String,
    pub dataset: DatasetSummary,
    pub features: FeatureSummary,
    pub train: SplitMetrics,
    pub test: SplitMetrics,
    pub threshold: Option<ThresholdReport>,
    pub cv: Option<CvReport>,
    pub learning_curve: Vec<LearningCurvePoint>,
}

/// Everything `run_experiment` produces.
pub struct ExperimentOutput {
    pub report: RunReport,
    pub model: TrainedModel,
    pub features: FeaturePipeline,
    pub test_roc: Option<RocCurve>,
}

/// Execute the full pipeline. A dataset without a split gets a stratified
/// one from the config.
pub fn run_experiment(config: &ExperimentConfig, dataset: &mut Dataset) -> Result<ExperimentOutput> {
    config.validate()?;
    let prep = TextPrep::from_config(&config.normalize, &config.tokenize)?;
    let streams: Vec<TokenStream> = dataset
        .documents
        .iter()
        .map(|d| prep.process(&d.text, &d.doc_id))
        .collect();
    let y = dataset.labels();

    if dataset.split.is_none() {
        split_train_test(dataset, config.test_fraction, true, config.seed)?;
    }
    let split = dataset.split.clone().expect("split assigned above");
    let gather = |idx: &[usize]| -> (Vec<TokenStream>, Vec<usize>) {
        (
            idx.iter().map(|&i| streams[i].clone()).collect(),
            idx.iter().map(|&i| y[i]).collect(),
        )
    };
    let (train_streams, y_train) = gather(&split.train);
    let (test_streams, y_test) = gather(&split.test);

    let features = FeaturePipeline::fit(&config.features, &train_streams, &y_train, config.seed)?;
    let x_train = features.transform(&train_streams)?;
    let x_test = features.transform(&test_streams)?;

    let model = config.learner.train(x_train.data.view(), &y_train, config.seed)?;
    let (train_metrics, _) = split_metrics(&model, &x_train, &y_train)?;
    let (test_metrics, test_roc) = split_metrics(&model, &x_test, &y_test)?;

    let threshold = match config.eval.tune_recall {
        Some(target) => {
            let scores = model.predict_score(x_test.data.view())?.to_vec();
            let choice = tune_threshold_scores(
                &y_test,
                &scores,
                ThresholdTarget::Recall(target),
            )?;
            Some(ThresholdReport {
                target_recall: target,
                choice,
            })
        }
        None => None,
    };

    let cv = match config.eval.cv_folds {
        Some(k) => {
            let result = cross_validate(&y_train, k, config.seed, |tr, val| {
                fit_predict_fold(config, &train_streams, &y_train, tr, val)
            })?;
            Some(CvReport::from(result))
        }
        None => None,
    };

    let curve = if config.eval.learning_curve_fractions.is_empty() {
        Vec::new()
    } else {
        learning_curve(
            train_streams.len(),
            &config.eval.learning_curve_fractions,
            0.25,
            config.seed,
            |tr, val| {
                let (pred_tr, _) = fit_predict_fold(config, &train_streams, &y_train, tr, tr)?;
                let (pred_val, _) = fit_predict_fold(config, &train_streams, &y_train, tr, val)?;
                let truth_tr: Vec<usize> = tr.iter().map(|&i| y_train[i]).collect();
                let truth_val: Vec<usize> = val.iter().map(|&i| y_train[i]).collect();
                let acc_tr = accuracy(&confusion(&truth_tr, &pred_tr)?);
                let acc_val = accuracy(&confusion(&truth_val, &pred_val)?);
                Ok((acc_tr, acc_val))
            },
        )?
    };

    let report = RunReport {
        schema_version: crate::models::SCHEMA_VERSION,
        config_hash: config.hash()?,
        seed: config.seed,
        model_kind: model.kind_name().to_owned(),
        dataset: DatasetSummary {
            n_docs: dataset.len(),
            n_train: split.train.len(),
            n_test: split.test.len(),
            source: dataset.provenance.source.clone(),
            sha256: dataset.provenance.sha256.clone(),
        },
        features: FeatureSummary {
            unit: features.config.unit.to_string(),
            n: features.config.n,
            tfidf: features.config.tfidf,
            vocab_size: features.vocab.len(),
            pca_components: features.pca.as_ref().map(|p| p.n_components()),
            pca_retained_ratio: features.pca.as_ref().map(|p| p.retained_ratio()),
            kmeans_k: features.kmeans.as_ref().map(|s| s.model.k),
            selected_columns: features
                .mask
                .as_ref()
                .map(|m| m.iter().filter(|&&b| b).count()),
            final_columns: x_train.cols(),
        },
        train: train_metrics,
        test: test_metrics,
        threshold,
        cv,
        learning_curve: curve,
    };

    Ok(ExperimentOutput {
        report,
        model,
        features,
        test_roc,
    })
}

/// Preprocess every document of a dataset with the configured tables.
pub fn preprocess_dataset(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<TokenStream>> {
    let prep = TextPrep::from_config(&config.normalize, &config.tokenize)?;
    Ok(dataset
        .documents
        .iter()
        .map(|d| prep.process(&d.text, &d.doc_id))
        .collect())
}

/// Stratified k-fold cross-validation of the configured learner over the
/// whole dataset, re-fitting the feature pipeline inside every fold.
pub fn cross_validate_experiment(
    config: &ExperimentConfig,
    dataset: &Dataset,
    k: usize,
) -> Result<CvResult> {
    let streams = preprocess_dataset(config, dataset)?;
    let y = dataset.labels();
    cross_validate(&y, k, config.seed, |tr, val| {
        fit_predict_fold(config, &streams, &y, tr, val)
    })
}

/// Learning curve of the configured learner over the whole dataset.
pub fn learning_curve_experiment(
    config: &ExperimentConfig,
    dataset: &Dataset,
    fractions: &[f64],
) -> Result<Vec<LearningCurvePoint>> {
    let streams = preprocess_dataset(config, dataset)?;
    let y = dataset.labels();
    learning_curve(streams.len(), fractions, 0.25, config.seed, |tr, val| {
        let (pred_tr, _) = fit_predict_fold(config, &streams, &y, tr, tr)?;
        let (pred_val, _) = fit_predict_fold(config, &streams, &y, tr, val)?;
        let truth_tr: Vec<usize> = tr.iter().map(|&i| y[i]).collect();
        let truth_val: Vec<usize> = val.iter().map(|&i| y[i]).collect();
        Ok((
            accuracy(&confusion(&truth_tr, &pred_tr)?),
            accuracy(&confusion(&truth_val, &pred_val)?),
        ))
    })
}

/// Fit the feature pipeline and learner on `train` rows of `streams`, then
/// predict the `evalset` rows. The building block for CV and curves.
fn fit_predict_fold(
    config: &ExperimentConfig,
    streams: &[TokenStream],
    y: &[usize],
    train: &[usize],
    evalset: &[usize],
) -> Result<(Vec<usize>, Vec<f64>)> {
    let tr_streams: Vec<TokenStream> = train.iter().map(|&i| streams[i].clone()).collect();
    let tr_y: Vec<usize> = train.iter().map(|&i| y[i]).collect();
    let pipe = FeaturePipeline::fit(&config.features, &tr_streams, &tr_y, config.seed)?;
    let x_train = pipe.transform(&tr_streams)?;
    let model = config.learner.train(x_train.data.view(), &tr_y, config.seed)?;
    let ev_streams: Vec<TokenStream> = evalset.iter().map(|&i| streams[i].clone()).collect();
    let x_eval = pipe.transform(&ev_streams)?;
    let pred = model.predict(x_eval.data.view())?;
    let scores = model.predict_score(x_eval.data.view())?;
    Ok((pred, scores.to_vec()))
}

/// Fitted transforms persisted next to the model so held-out data can be
/// scored in a later process.
#[derive(Serialize, Deserialize)]
pub struct PipelineDocument {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub features: FeaturePipeline,
}

/// Write the output-directory layout: `model.json`, `report.json`,
/// `roc.csv`, `learning_curve.csv`, `config.resolved.json`, and
/// `pipeline.json`; `--svg` adds simple charts.
pub fn write_artifacts(
    out_dir: &Path,
    config: &ExperimentConfig,
    output: &ExperimentOutput,
    svg: bool,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    save_model(&output.model, &out_dir.join("model.json"))?;
    std::fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&output.report)?,
    )?;
    let roc_csv = match &output.test_roc {
        Some(curve) => roc_to_csv(curve),
        None => String::from("fpr,tpr,threshold\n"),
    };
    std::fs::write(out_dir.join("roc.csv"), &roc_csv)?;
    std::fs::write(
        out_dir.join("learning_curve.csv"),
        learning_curve_to_csv(&output.report.learning_curve),
    )?;
    std::fs::write(
        out_dir.join("config.resolved.json"),
        config.to_canonical_json()?,
    )?;
    let doc = PipelineDocument {
        schema_version: crate::models::SCHEMA_VERSION,
        config: config.clone(),
        features: output.features.clone(),
    };
    std::fs::write(
        out_dir.join("pipeline.json"),
        serde_json::to_string(&doc)?,
    )?;
    if svg {
        if let Some(curve) = &output.test_roc {
            let pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.fpr, p.tpr)).collect();
            std::fs::write(
                out_dir.join("roc.svg"),
                crate::charts::line_chart_svg(
                    "ROC curve (test split)",
                    "false positive rate",
                    "true positive rate",
                    &[("roc", &pts)],
                ),
            )?;
        }
        if !output.report.learning_curve.is_empty() {
            let train_pts: Vec<(f64, f64)> = output
                .report
                .learning_curve
                .iter()
                .map(|p| (p.size as f64, p.train))
                .collect();
            let val_pts: Vec<(f64, f64)> = output
                .report
                .learning_curve
                .iter()
                .map(|p| (p.size as f64, p.val))
                .collect();
            std::fs::write(
                out_dir.join("learning_curve.svg"),
                crate::charts::line_chart_svg(
                    "Learning curves",
                    "training size",
                    "accuracy",
                    &[("train", &train_pts), ("validation", &val_pts)],
                ),
            )?;
        }
    }
    Ok(())
}

pub fn load_pipeline(path: &Path) -> Result<(ExperimentConfig, FeaturePipeline)> {
    let text = std::fs::read_to_string(path)?;
    let doc: PipelineDocument =
        serde_json::from_str(&text).map_err(|e| Error::CorruptModel(e.to_string()))?;
    if doc.schema_version != crate::models::SCHEMA_VERSION {
        return Err(Error::UnknownSchema(doc.schema_version));
    }
    Ok((doc.config, doc.features))
}
