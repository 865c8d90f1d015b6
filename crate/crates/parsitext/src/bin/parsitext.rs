//! Batch CLI over the parsitext pipeline. Each subcommand is a thin
//! wrapper around the library; see the crate examples for API usage.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use parsitext::config::{ClusterFeatureMode, ExperimentConfig, KMeansConfig};
use parsitext::dataset::{load_dataset, write_tsv, Dataset, DatasetFormat};
use parsitext::error::Result;
use parsitext::eval::{learning_curve_to_csv, tune_threshold_scores, ThresholdTarget};
use parsitext::features::NgramUnit;
use parsitext::models::{load_model, LearnerSpec};
use parsitext::pipeline::{
    cross_validate_experiment, learning_curve_experiment, load_pipeline, run_experiment,
    write_artifacts, TextPrep,
};
use parsitext::synth::generate_synthetic_corpus;

#[derive(Parser)]
#[command(name = "parsitext", version, about = "Persian text classification pipeline")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment config JSON; missing keys take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Dataset file (TSV or CSV by extension) with text and label columns.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize UTF-8 lines from stdin to stdout.
    Normalize {
        /// Character rule table override (SRC<TAB>DST hex code points).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Affix list override (one suffix per line).
        #[arg(long)]
        affixes: Option<PathBuf>,
        /// Transliterate FEnglish input before normalizing.
        #[arg(long)]
        fenglish: bool,
    },
    /// Normalize and tokenize stdin lines; tokens are space-joined.
    Tokenize {
        /// Stopword list override.
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Stemmer rule file override (SUFFIX<TAB>MINLEN).
        #[arg(long, value_name = "PATH")]
        stem_rules: Option<PathBuf>,
        /// Skip stemming.
        #[arg(long)]
        no_stem: bool,
    },
    /// Build a feature matrix from a dataset and dump it as triples.
    Featurize {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "word")]
        unit: UnitArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Apply TF-IDF weighting (raw counts otherwise).
        #[arg(long)]
        tfidf: bool,
        /// PCA retained-variance ratio.
        #[arg(long)]
        pca: Option<f64>,
        /// Fit KMeans with this many clusters.
        #[arg(long)]
        kmeans: Option<usize>,
        /// Cluster feature mode (requires --kmeans).
        #[arg(long, value_enum, requires = "kmeans")]
        cluster_features: Option<ClusterArg>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model on the full dataset and persist it with its pipeline.
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Learner: svm, lg, rnd, lda, mnb, gnb, stump, voting, pasting,
        /// adaboost. Overrides the config.
        #[arg(long)]
        learner: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a persisted model on a dataset.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        /// Directory holding model.json and pipeline.json.
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate the configured learner.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        learner: Option<String>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learning curve over growing training prefixes.
    LearningCurve {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        learner: Option<String>,
        /// Training fractions in (0, 1].
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.5, 0.75, 1.0])]
        fractions: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pick a decision threshold reaching a recall target.
    TuneThreshold {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model_dir: PathBuf,
        /// Recall the threshold must reach.
        #[arg(long)]
        recall: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the deterministic synthetic corpus as TSV.
    Synth {
        #[arg(long)]
        n: usize,
        /// Fraction of labels to flip.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full experiment and write the artifact directory.
    Run {
        /// Dataset file; mutually exclusive with --synth.
        #[arg(long, conflicts_with = "synth")]
        data: Option<PathBuf>,
        /// Generate a synthetic corpus of this size instead.
        #[arg(long)]
        synth: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also render SVG charts.
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum UnitArg {
    Word,
    Char,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ClusterArg {
    Distances,
    Centers,
    Combined,
}

fn load_config(cli_config: &Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match cli_config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn read_dataset(cfg: &ExperimentConfig, path: &Path) -> Result<Dataset> {
    load_dataset(
        path,
        DatasetFormat::from_path(path),
        &cfg.text_col,
        &cfg.label_col,
        &cfg.label_map,
    )
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe (e.g. piping into `head`) is not a failure
        Err(parsitext::Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.config, cli.seed)?;
    match cli.command {
        Command::Normalize {
            table,
            affixes,
            fenglish,
        } => {
            cfg.normalize.table = table.or(cfg.normalize.table);
            cfg.normalize.affixes = affixes.or(cfg.normalize.affixes);
            cfg.normalize.fenglish = fenglish || cfg.normalize.fenglish;
            let prep = TextPrep::from_config(&cfg.normalize, &cfg.tokenize)?;
            let stdin = std::io::stdin().lock();
            let mut stdout = std::io::stdout().lock();
            for line in stdin.lines() {
                writeln!(stdout, "{}", prep.normalize_text(&line?).text)?;
            }
        }
        Command::Tokenize {
            stopwords,
            stem_rules,
            no_stem,
        } => {
            cfg.tokenize.stopword_file = stopwords.or(cfg.tokenize.stopword_file);
            cfg.tokenize.stem_rules_file = stem_rules.or(cfg.tokenize.stem_rules_file);
            if no_stem {
                cfg.tokenize.stem = false;
            }
            let prep = TextPrep::from_config(&cfg.normalize, &cfg.tokenize)?;
            let stdin = std::io::stdin().lock();
            let mut stdout = std::io::stdout().lock();
            for (i, line) in stdin.lines().enumerate() {
                let stream = prep.process(&line?, &i.to_string());
                writeln!(stdout, "{}", stream.tokens.join(" "))?;
            }
        }
        Command::Featurize {
            data,
            unit,
            n,
            tfidf,
            pca,
            kmeans,
            cluster_features,
            out,
        } => {
            cfg.features.unit = match unit {
                UnitArg::Word => NgramUnit::Word,
                UnitArg::Char => NgramUnit::Char,
            };
            cfg.features.n = n;
            cfg.features.tfidf = tfidf;
            cfg.features.pca_ratio = pca;
            cfg.features.kmeans = kmeans.map(|k| KMeansConfig {
                k,
                features: match cluster_features {
                    Some(ClusterArg::Centers) => ClusterFeatureMode::Centers,
                    Some(ClusterArg::Combined) => ClusterFeatureMode::Combined,
                    _ => ClusterFeatureMode::Distances,
                },
                ..Default::default()
            });
            cfg.validate()?;
            let ds = read_dataset(&cfg, &data.data)?;
            let streams = parsitext::pipeline::preprocess_dataset(&cfg, &ds)?;
            let pipe = parsitext::pipeline::FeaturePipeline::fit(
                &cfg.features,
                &streams,
                &ds.labels(),
                cfg.seed,
            )?;
            let matrix = pipe.transform(&streams)?;
            let mut buf = Vec::new();
            matrix.dump(&mut buf)?;
            emit(&out, std::str::from_utf8(&buf).expect("dump is utf-8"))?;
        }
        Command::Train { data, learner, out } => {
            if let Some(name) = learner {
                cfg.learner = LearnerSpec::from_cli_name(&name)?;
            }
            let ds = read_dataset(&cfg, &data.data)?;
            let streams = parsitext::pipeline::preprocess_dataset(&cfg, &ds)?;
            let y = ds.labels();
            let pipe = parsitext::pipeline::FeaturePipeline::fit(
                &cfg.features,
                &streams,
                &y,
                cfg.seed,
            )?;
            let x = pipe.transform(&streams)?;
            let model = cfg.learner.train(x.data.view(), &y, cfg.seed)?;
            std::fs::create_dir_all(&out)?;
            parsitext::models::save_model(&model, &out.join("model.json"))?;
            let doc = parsitext::pipeline::PipelineDocument {
                schema_version: parsitext::models::SCHEMA_VERSION,
                config: cfg.clone(),
                features: pipe,
            };
            std::fs::write(out.join("pipeline.json"), serde_json::to_string(&doc)?)?;
            std::fs::write(out.join("config.resolved.json"), cfg.to_canonical_json()?)?;
            println!("trained {} on {} rows -> {}", model.kind_name(), ds.len(), out.display());
        }
        Command::Evaluate {
            data,
            model_dir,
            out,
        } => {
            let (saved_cfg, pipe) = load_pipeline(&model_dir.join("pipeline.json"))?;
            let model = load_model(&model_dir.join("model.json"))?;
            let ds = read_dataset(&saved_cfg, &data.data)?;
            let streams = parsitext::pipeline::preprocess_dataset(&saved_cfg, &ds)?;
            let x = pipe.transform(&streams)?;
            let y = ds.labels();
            let pred = model.predict(x.data.view())?;
            let scores = model.predict_score(x.data.view())?.to_vec();
            let c = parsitext::eval::confusion(&y, &pred)?;
            let prf = parsitext::eval::precision_recall_f1(&c);
            let curve = parsitext::eval::roc_auc(&y, &scores).ok();
            let report = serde_json::json!({
                "n": y.len(),
                "confusion": c,
                "precision": prf.precision,
                "recall": prf.recall,
                "f1": prf.f1,
                "accuracy": parsitext::eval::accuracy(&c),
                "auc": curve.as_ref().map(|r| r.auc),
                "degenerate": prf.degenerate,
            });
            emit(&out, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        }
        Command::Cv {
            data,
            learner,
            k,
            out,
        } => {
            if let Some(name) = learner {
                cfg.learner = LearnerSpec::from_cli_name(&name)?;
            }
            let ds = read_dataset(&cfg, &data.data)?;
            let result = cross_validate_experiment(&cfg, &ds, k)?;
            emit(&out, &format!("{}\n", serde_json::to_string_pretty(&result)?))?;
        }
        Command::LearningCurve {
            data,
            learner,
            fractions,
            out,
        } => {
            if let Some(name) = learner {
                cfg.learner = LearnerSpec::from_cli_name(&name)?;
            }
            let ds = read_dataset(&cfg, &data.data)?;
            let points = learning_curve_experiment(&cfg, &ds, &fractions)?;
            emit(&out, &learning_curve_to_csv(&points))?;
        }
        Command::TuneThreshold {
            data,
            model_dir,
            recall,
            out,
        } => {
            let (saved_cfg, pipe) = load_pipeline(&model_dir.join("pipeline.json"))?;
            let model = load_model(&model_dir.join("model.json"))?;
            let ds = read_dataset(&saved_cfg, &data.data)?;
            let streams = parsitext::pipeline::preprocess_dataset(&saved_cfg, &ds)?;
            let x = pipe.transform(&streams)?;
            let scores = model.predict_score(x.data.view())?.to_vec();
            let choice = tune_threshold_scores(
                &ds.labels(),
                &scores,
                ThresholdTarget::Recall(recall),
            )?;
            emit(&out, &format!("{}\n", serde_json::to_string_pretty(&choice)?))?;
        }
        Command::Synth { n, noise, out } => {
            let ds = generate_synthetic_corpus(n, noise, cfg.seed)?;
            write_tsv(&ds, &out)?;
            println!("wrote {} documents -> {}", ds.len(), out.display());
        }
        Command::Run {
            data,
            synth,
            noise,
            out,
            svg,
        } => {
            let mut ds = match (data, synth) {
                (Some(path), None) => read_dataset(&cfg, &path)?,
                (None, Some(n)) => generate_synthetic_corpus(n, noise, cfg.seed)?,
                _ => {
                    return Err(parsitext::Error::InvalidConfig(
                        "run needs exactly one of --data or --synth".into(),
                    ))
                }
            };
            let output = run_experiment(&cfg, &mut ds)?;
            write_artifacts(&out, &cfg, &output, svg)?;
            let r = &output.report;
            println!(
                "{}: test precision {:.4} recall {:.4} f1 {:.4} auc {} -> {}",
                r.model_kind,
                r.test.precision,
                r.test.recall,
                r.test.f1,
                r.test
                    .auc
                    .map_or_else(|| "n/a".to_owned(), |a| format!("{a:.4}")),
                out.display()
            );
        }
    }
    Ok(())
}
