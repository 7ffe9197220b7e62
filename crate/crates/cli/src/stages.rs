//! Stage implementations behind the subcommands.
//!
//! Every stage reads artifacts, calls the library, and writes artifacts
//! atomically with a provenance stamp (config hash + seed). Errors carry
//! the stage name and classify into exit codes: 2 for bad input or
//! configuration, 1 for internal failures.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use depstrat_core::config::{atomic_write, write_json_artifact, RunConfig};
use depstrat_core::dataset::Dataset;
use depstrat_core::ecosystem::{
    apply_filters, impute_missing, load_librariesio, read_ndjson, write_ndjson, EcosystemSnapshot,
    FilterReport, ImputationReport, LoadReport,
};
use depstrat_core::eval::{
    evaluate as evaluate_predictions, partial_dependence, permutation_importance,
    EvaluationReport, PdpOptions,
};
use depstrat_core::evolution::{detect_shifts, evolution_series, Month, ShiftEvent};
use depstrat_core::features::{assemble_dataset, audit, derive_features, fit_domain_model};
use depstrat_core::forest::{
    baseline_balanced, baseline_stratified, default_grid, split_dataset,
    split_dataset_unstratified, train_forest, DatasetSplit, ForestModel, ForestParams,
};
use depstrat_core::graph::DepGraph;
use depstrat_core::labeling::{
    label_all, read_labels_csv, sweep_thresholds, write_labels_csv, LabelClass, LabelRow,
};
use depstrat_core::rng::shuffle_indices;
use depstrat_core::semver::{admission_profile, classify, parse_range};
use depstrat_core::{Error as CoreError, Real};

use crate::{
    ClassifyArgs, EvaluateArgs, EvolveArgs, ExplainArgs, FeaturesArgs, GraphArgs, IngestArgs,
    LabelArgs, PipelineArgs, RecommendArgs, SampleArgs, TrainArgs,
};

// ---- error handling ----

#[derive(Debug)]
pub struct StageError {
    stage: &'static str,
    detail: String,
    code: u8,
}

impl StageError {
    fn from_core(stage: &'static str, e: CoreError) -> StageError {
        StageError {
            stage,
            detail: e.to_string(),
            code: exit_code_for(&e),
        }
    }

    pub fn config(detail: String) -> StageError {
        StageError {
            stage: "config",
            detail,
            code: 2,
        }
    }

    pub fn internal(detail: String) -> StageError {
        StageError {
            stage: "internal",
            detail,
            code: 1,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage={}: {}", self.stage, self.detail)
    }
}

/// Bad input/config (exit 2) versus internal failure (exit 1).
fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::MalformedVersion(..)
        | CoreError::MalformedRange(..)
        | CoreError::UnsupportedConstraint(..)
        | CoreError::EmptyRange(..)
        | CoreError::MissingFile(..)
        | CoreError::SchemaMismatch { .. }
        | CoreError::UnknownPackage(..)
        | CoreError::InsufficientDependents { .. }
        | CoreError::TooFewRows(..)
        | CoreError::FeatureArity { .. }
        | CoreError::InvalidConfig(..)
        | CoreError::Csv(..) => 2,
        CoreError::Io(io) if io.kind() == std::io::ErrorKind::NotFound => 2,
        _ => 1,
    }
}

trait Tag<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError>;
}

impl<T> Tag<T> for Result<T, CoreError> {
    fn stage(self, stage: &'static str) -> Result<T, StageError> {
        self.map_err(|e| StageError::from_core(stage, e))
    }
}

fn invalid(detail: impl Into<String>) -> CoreError {
    CoreError::InvalidConfig(detail.into())
}

// ---- ingest ----

#[derive(Serialize)]
struct IngestReport<'a> {
    packages: usize,
    edges: usize,
    load: &'a LoadReport,
    filter: &'a FilterReport,
    imputation: &'a ImputationReport,
}

fn ingest_with(args: &IngestArgs, config: &RunConfig) -> Result<(), CoreError> {
    let (s, load) = load_librariesio(
        &args.projects,
        &args.versions,
        &args.dependencies,
        args.snapshot,
    )?;
    let (s, filter) = apply_filters(s, &config.spam_stems);
    let (s, imputation) = impute_missing(s);
    write_ndjson(&args.out, &s, config)?;
    let report = IngestReport {
        packages: s.packages.len(),
        edges: s.edges.len(),
        load: &load,
        filter: &filter,
        imputation: &imputation,
    };
    write_json_artifact(
        &args.out.with_file_name("ingest-report.json"),
        config,
        &report,
    )?;
    println!(
        "ingested {} packages, {} edges -> {}",
        s.packages.len(),
        s.edges.len(),
        args.out.display()
    );
    Ok(())
}

pub fn ingest(args: &IngestArgs) -> Result<(), StageError> {
    let config = RunConfig {
        snapshot_date: args.snapshot,
        spam_stems: args.spam_stems.clone(),
        ..RunConfig::default()
    };
    ingest_with(args, &config).stage("ingest")
}

// ---- graph ----

fn graph_impl(args: &GraphArgs) -> Result<(), CoreError> {
    let snapshot: EcosystemSnapshot = match (&args.input, &args.projects) {
        (Some(path), _) => {
            if args.pre_filter_graph {
                return Err(invalid(
                    "--pre-filter-graph needs the raw CSV inputs; a snapshot file is already filtered",
                ));
            }
            read_ndjson(path)?
        }
        (None, Some(projects)) => {
            let (versions, dependencies, date) =
                match (&args.versions, &args.dependencies, args.snapshot) {
                    (Some(v), Some(d), Some(s)) => (v, d, s),
                    _ => {
                        return Err(invalid(
                            "raw-CSV mode needs --projects, --versions, --dependencies, and --snapshot",
                        ))
                    }
                };
            let (s, _) = load_librariesio(projects, versions, dependencies, date)?;
            if args.pre_filter_graph {
                s
            } else {
                apply_filters(s, &[]).0
            }
        }
        (None, None) => {
            return Err(invalid(
                "provide --in <snapshot> or the raw CSV inputs",
            ))
        }
    };

    let config = RunConfig {
        snapshot_date: snapshot.snapshot_date,
        ..RunConfig::default()
    };
    let graph = DepGraph::build(&snapshot);
    let mut out = config.csv_header();
    out.push_str(
        "package,dependent_count,transitive_dependents,dependency_count,transitive_dependencies\n",
    );
    for m in graph.metric_rows() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            m.package,
            m.dependent_count,
            m.transitive_dependents,
            m.dependency_count,
            m.transitive_dependencies
        ));
    }
    atomic_write(&args.out, out.as_bytes())?;
    println!(
        "graph over {} packages, {} edges -> {}",
        graph.len(),
        graph.edge_count(),
        args.out.display()
    );
    Ok(())
}

pub fn graph(args: &GraphArgs) -> Result<(), StageError> {
    graph_impl(args).stage("graph")
}

// ---- label ----

fn label_with(args: &LabelArgs, config: Option<&RunConfig>) -> Result<(), CoreError> {
    let s = read_ndjson(&args.input)?;
    let config = config.cloned().unwrap_or_else(|| RunConfig {
        snapshot_date: s.snapshot_date,
        threshold: args.threshold,
        ..RunConfig::default()
    });
    let labels = label_all(&s, args.threshold)?;
    write_labels_csv(&args.out, &labels, &config)?;
    if !args.sweep.is_empty() {
        let rows = sweep_thresholds(&s, &args.sweep)?;
        let mut csv = config.csv_header();
        csv.push_str("threshold,balanced,permissive,restrictive,unspecialized,labeled_total\n");
        for r in rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.threshold, r.balanced, r.permissive, r.restrictive, r.unspecialized,
                r.labeled_total
            ));
        }
        atomic_write(&sibling(&args.out, "-sweep.csv"), csv.as_bytes())?;
    }
    let mut by_class: BTreeMap<&str, usize> = BTreeMap::new();
    for row in labels.values() {
        *by_class.entry(row.label.as_str()).or_default() += 1;
    }
    println!(
        "labeled {} packages ({}) -> {}",
        labels.len(),
        by_class
            .iter()
            .map(|(k, v)| format!("{k} {v}"))
            .collect::<Vec<_>>()
            .join(", "),
        args.out.display()
    );
    Ok(())
}

/// "<stem><suffix>" next to `path` (e.g. labels.csv -> labels-sweep.csv).
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn label(args: &LabelArgs) -> Result<(), StageError> {
    label_with(args, None).stage("label")
}

// ---- features ----

fn features_with(args: &FeaturesArgs, config: Option<&RunConfig>) -> Result<(), CoreError> {
    let s = read_ndjson(&args.input)?;
    let config = config.cloned().unwrap_or_else(|| RunConfig {
        snapshot_date: s.snapshot_date,
        seed: args.seed,
        ..RunConfig::default()
    });
    let labels = read_labels_csv(&args.labels)?;
    let domains = fit_domain_model(&s, args.seed)?;
    if domains.degenerate {
        eprintln!(
            "warning: fewer than 10 distinct keywords in the corpus; every package gets domain 1"
        );
    }
    let graph = DepGraph::build(&s);
    let per_package = derive_features(&s, &graph, &domains)?;
    let dataset = assemble_dataset(&per_package, &labels);
    if dataset.rows.is_empty() {
        eprintln!("warning: no labeled package has features; the table is empty");
    }
    dataset.write_csv(&args.out, &config)?;
    if args.audit_correlations {
        let report = audit(&dataset, &[]);
        write_json_artifact(
            &args.out.with_file_name("correlations.json"),
            &config,
            &report,
        )?;
    }
    println!(
        "feature table: {} rows x {} columns -> {}",
        dataset.n_rows(),
        dataset.n_features(),
        args.out.display()
    );
    Ok(())
}

pub fn features(args: &FeaturesArgs) -> Result<(), StageError> {
    features_with(args, None).stage("features")
}

// ---- train ----

fn train_with(args: &TrainArgs, config: Option<&RunConfig>) -> Result<(), CoreError> {
    let dataset = Dataset::read_csv(&args.features)?;
    let split = make_split(&dataset.labels, args.seed, !args.no_stratify)?;
    let train = dataset.subset(&split.train_indices);

    let (params, cv_report) = if args.tune {
        let report = depstrat_core::forest::tune_cv(
            &train.rows,
            &train.labels,
            &train.feature_names,
            &default_grid(),
            args.seed,
        )?;
        (report.best, Some(report))
    } else {
        (
            ForestParams {
                n_trees: args.trees,
                min_samples_split: args.min_split,
            },
            None,
        )
    };

    let config = config.cloned().unwrap_or_else(|| RunConfig {
        seed: args.seed,
        trees: params.n_trees,
        min_split: params.min_samples_split,
        stratified: !args.no_stratify,
        ..RunConfig::default()
    });

    let mut model = train_forest(
        &train.rows,
        &train.labels,
        &train.feature_names,
        &params,
        args.seed,
    )?;
    model.stratified = !args.no_stratify;
    model.save(&args.out, &config)?;
    if let Some(report) = cv_report {
        write_json_artifact(&args.out.with_file_name("cv-report.json"), &config, &report)?;
        println!(
            "cross-validation picked {} trees, min-split {}",
            params.n_trees, params.min_samples_split
        );
    }
    let empty = model.empty_classes();
    if !empty.is_empty() {
        let names: Vec<&str> = empty.iter().map(|c| c.as_str()).collect();
        eprintln!(
            "warning: no training examples for {}; those probabilities stay zero",
            names.join(", ")
        );
    }
    println!(
        "trained {} trees on {} rows ({} held out) -> {}",
        model.n_trees,
        split.train_indices.len(),
        split.test_indices.len(),
        args.out.display()
    );
    Ok(())
}

fn make_split(
    labels: &[LabelClass],
    seed: u64,
    stratified: bool,
) -> Result<DatasetSplit, CoreError> {
    if stratified {
        split_dataset(labels, seed)
    } else {
        split_dataset_unstratified(labels.len(), seed)
    }
}

pub fn train(args: &TrainArgs) -> Result<(), StageError> {
    train_with(args, None).stage("train")
}

// ---- evaluate ----

#[derive(Serialize)]
struct SplitSummary {
    train_rows: usize,
    test_rows: usize,
    stratified: bool,
    seed: u64,
}

#[derive(Serialize)]
struct FullEvaluation {
    split: SplitSummary,
    forest: EvaluationReport,
    baseline_stratified: EvaluationReport,
    baseline_balanced: EvaluationReport,
}

/// Rebuild the model's own train/test partition from its seed and split
/// mode; the features file must match the training schema.
fn replay_split(model: &ForestModel, dataset: &Dataset) -> Result<DatasetSplit, CoreError> {
    if dataset.feature_names != model.feature_names {
        return Err(CoreError::SchemaMismatch {
            file: "features".into(),
            detail: "feature columns differ from the model's training schema".into(),
        });
    }
    make_split(&dataset.labels, model.seed, model.stratified)
}

fn evaluate_with(args: &EvaluateArgs, config: Option<&RunConfig>) -> Result<(), CoreError> {
    let (model, provenance) = ForestModel::load(&args.model)?;
    let dataset = Dataset::read_csv(&args.features)?;
    let split = replay_split(&model, &dataset)?;
    let test = dataset.subset(&split.test_indices);
    let config = config.cloned().unwrap_or_else(|| RunConfig {
        snapshot_date: provenance.snapshot_date,
        seed: model.seed,
        trees: model.n_trees,
        min_split: model.min_samples_split,
        stratified: model.stratified,
        ..RunConfig::default()
    });

    let forest_preds = model.predict_matrix(&test.rows)?;
    let forest = evaluate_predictions(&forest_preds, &test.labels)?;

    let train_labels: Vec<LabelClass> = split
        .train_indices
        .iter()
        .map(|&i| dataset.labels[i])
        .collect();
    let strat_preds = baseline_stratified(&train_labels, test.rows.len(), model.seed);
    let baseline_strat = evaluate_predictions(&strat_preds, &test.labels)?;
    let bal_preds = baseline_balanced(test.rows.len());
    let baseline_bal = evaluate_predictions(&bal_preds, &test.labels)?;

    let auc_text = forest
        .macro_ovr_roc_auc
        .map(|a| format!("{a:.4}"))
        .unwrap_or_else(|| "undefined".into());
    let report = FullEvaluation {
        split: SplitSummary {
            train_rows: split.train_indices.len(),
            test_rows: split.test_indices.len(),
            stratified: model.stratified,
            seed: model.seed,
        },
        forest,
        baseline_stratified: baseline_strat,
        baseline_balanced: baseline_bal,
    };
    write_json_artifact(&args.out, &config, &report)?;
    println!(
        "evaluated on {} held-out rows: macro OvR AUC {}, weighted F1 {:.4} -> {}",
        split.test_indices.len(),
        auc_text,
        report.forest.weighted_f1,
        args.out.display()
    );
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), StageError> {
    evaluate_with(args, None).stage("evaluate")
}

// ---- explain ----

fn parse_classes(raw: &[String]) -> Result<Vec<LabelClass>, CoreError> {
    if raw.len() == 1 && raw[0].eq_ignore_ascii_case("all") {
        return Ok(LabelClass::ORDER.to_vec());
    }
    raw.iter().map(|r| r.parse::<LabelClass>()).collect()
}

fn explain_with(args: &ExplainArgs, config: Option<&RunConfig>) -> Result<(), CoreError> {
    let (model, provenance) = ForestModel::load(&args.model)?;
    let dataset = Dataset::read_csv(&args.features)?;
    let split = replay_split(&model, &dataset)?;
    let test = dataset.subset(&split.test_indices);
    let config = config.cloned().unwrap_or_else(|| RunConfig {
        snapshot_date: provenance.snapshot_date,
        seed: model.seed,
        trees: model.n_trees,
        min_split: model.min_samples_split,
        stratified: model.stratified,
        ..RunConfig::default()
    });

    std::fs::create_dir_all(&args.out)?;
    let run_both = !args.importance && !args.pdp;

    if args.importance || run_both {
        let report = permutation_importance(&model, &test.rows, &test.labels, model.seed)?;
        let by_name: BTreeMap<&str, _> = report
            .features
            .iter()
            .map(|f| (f.feature.as_str(), f))
            .collect();
        let mut csv = config.csv_header();
        csv.push_str(&format!(
            "# baseline_macro_auc={}\n",
            report.baseline_macro_auc
        ));
        csv.push_str("feature,mean_drop,q1,median,q3\n");
        for name in report.ranking() {
            let f = by_name[name.as_str()];
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                f.feature, f.mean, f.q1, f.median, f.q3
            ));
        }
        atomic_write(&args.out.join("importance.csv"), csv.as_bytes())?;
        println!(
            "importance over {} features -> {}",
            report.features.len(),
            args.out.join("importance.csv").display()
        );
    }

    if args.pdp || run_both {
        let classes = parse_classes(&args.classes)?;
        let feature_indices: Vec<usize> = if args.pdp_features.is_empty() {
            (0..model.feature_names.len()).collect()
        } else {
            args.pdp_features
                .iter()
                .map(|name| {
                    model
                        .feature_names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| invalid(format!("unknown feature {name:?}")))
                })
                .collect::<Result<_, _>>()?
        };
        let options = PdpOptions {
            subsample_above: Some(50_000),
            seed: model.seed,
        };
        let mut written = 0usize;
        for &class in &classes {
            for &feature in &feature_indices {
                let grid = partial_dependence(&model, &dataset.rows, feature, class, &options)?;
                let mut csv = config.csv_header();
                let deciles = grid
                    .deciles
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                csv.push_str(&format!("# deciles={deciles}\n"));
                csv.push_str("grid_value,mean_probability\n");
                for (g, p) in grid.grid.iter().zip(&grid.mean_probability) {
                    csv.push_str(&format!("{g},{p}\n"));
                }
                let name = format!(
                    "pdp_{}_{}.csv",
                    class.as_str(),
                    model.feature_names[feature]
                );
                atomic_write(&args.out.join(name), csv.as_bytes())?;
                written += 1;
            }
        }
        println!("{written} partial-dependence grids -> {}", args.out.display());
    }
    Ok(())
}

pub fn explain(args: &ExplainArgs) -> Result<(), StageError> {
    explain_with(args, None).stage("explain")
}

// ---- evolve ----

#[derive(Serialize)]
struct ShiftsArtifact<'a> {
    target: &'a str,
    persistence: usize,
    first_post_1_0_0: Option<&'a str>,
    events: &'a [ShiftEvent],
}

fn evolve_impl(args: &EvolveArgs) -> Result<(), CoreError> {
    let s = read_ndjson(&args.input)?;
    let from: Month = args.from.parse()?;
    let to: Month = args.to.parse()?;
    let series = evolution_series(&s, &args.package, from, to)?;
    let config = RunConfig {
        snapshot_date: s.snapshot_date,
        ..RunConfig::default()
    };

    let mut csv = config.csv_header();
    csv.push_str("month,balanced,restrictive,permissive,marker_1_0_0\n");
    for m in &series.months {
        let marker = (series.first_post_1_0_0.as_deref() == Some(m.month.as_str())) as u8;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            m.month, m.balanced, m.restrictive, m.permissive, marker
        ));
    }
    atomic_write(&args.out, csv.as_bytes())?;
    println!(
        "{} months of {} -> {}",
        series.months.len(),
        args.package,
        args.out.display()
    );

    if args.detect_shifts {
        let events = detect_shifts(&series, args.persistence);
        let artifact = ShiftsArtifact {
            target: &series.target,
            persistence: args.persistence,
            first_post_1_0_0: series.first_post_1_0_0.as_deref(),
            events: &events,
        };
        let path = args.out.with_file_name("shifts.json");
        write_json_artifact(&path, &config, &artifact)?;
        println!("{} dominant-strategy shifts -> {}", events.len(), path.display());
    }
    Ok(())
}

pub fn evolve(args: &EvolveArgs) -> Result<(), StageError> {
    evolve_impl(args).stage("evolve")
}

// ---- recommend ----

#[derive(Serialize)]
struct Recommendation {
    package: String,
    predicted_strategy: String,
    probabilities: BTreeMap<String, Real>,
    context: RecommendContext,
}

#[derive(Serialize)]
struct RecommendContext {
    release_status: Option<Real>,
    dependent_count: Option<Real>,
    age_months: Option<Real>,
}

fn inline_row(raw: &str, feature_names: &[String]) -> Result<Vec<Real>, CoreError> {
    let value: serde_json::Value = serde_json::from_str(raw)
        .map_err(|e| invalid(format!("inline features are not valid JSON: {e}")))?;
    let schema = |detail: String| CoreError::SchemaMismatch {
        file: "--inline".into(),
        detail,
    };
    match value {
        serde_json::Value::Array(items) => {
            if items.len() != feature_names.len() {
                return Err(CoreError::FeatureArity {
                    got: items.len(),
                    expected: feature_names.len(),
                });
            }
            items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_f64()
                        .ok_or_else(|| schema(format!("position {i} is not a number")))
                })
                .collect()
        }
        serde_json::Value::Object(map) => {
            for key in map.keys() {
                if !feature_names.iter().any(|n| n == key) {
                    return Err(schema(format!("unknown feature {key:?}")));
                }
            }
            feature_names
                .iter()
                .map(|name| {
                    map.get(name)
                        .ok_or_else(|| schema(format!("missing feature {name:?}")))?
                        .as_f64()
                        .ok_or_else(|| schema(format!("feature {name:?} is not a number")))
                })
                .collect()
        }
        _ => Err(schema("expected a JSON array or object".into())),
    }
}

fn recommend_impl(args: &RecommendArgs) -> Result<(), CoreError> {
    let (model, _) = ForestModel::load(&args.model)?;
    let (package, row): (String, Vec<Real>) = if let Some(raw) = &args.inline {
        ("<inline>".to_string(), inline_row(raw, &model.feature_names)?)
    } else {
        let features_path = args
            .features
            .as_ref()
            .ok_or_else(|| invalid("--features is required with --package"))?;
        let package = args
            .package
            .as_ref()
            .ok_or_else(|| invalid("--package or --inline is required"))?;
        let dataset = Dataset::read_csv(features_path)?;
        if dataset.feature_names != model.feature_names {
            return Err(CoreError::SchemaMismatch {
                file: features_path.display().to_string(),
                detail: "feature columns differ from the model's training schema".into(),
            });
        }
        let i = dataset
            .packages
            .iter()
            .position(|p| p == package)
            .ok_or_else(|| CoreError::UnknownPackage(package.clone()))?;
        (package.clone(), dataset.rows[i].clone())
    };

    let prediction = model.predict(&row)?;
    let feature_value = |name: &str| {
        model
            .feature_names
            .iter()
            .position(|n| n == name)
            .map(|i| row[i])
    };
    let recommendation = Recommendation {
        package,
        predicted_strategy: prediction.predicted.to_string(),
        probabilities: model
            .class_order
            .iter()
            .cloned()
            .zip(prediction.class_probabilities.iter().copied())
            .collect(),
        context: RecommendContext {
            release_status: feature_value("release_status"),
            dependent_count: feature_value("dependent_count"),
            age_months: feature_value("age_months"),
        },
    };
    println!("{}", serde_json::to_string_pretty(&recommendation)?);
    Ok(())
}

pub fn recommend(args: &RecommendArgs) -> Result<(), StageError> {
    recommend_impl(args).stage("recommend")
}

// ---- classify ----

#[derive(Serialize)]
struct ClassifiedRange {
    source: String,
    strategy: String,
    min_version: String,
    rendered: String,
    pinned: bool,
    admits_patch: bool,
    admits_minor: bool,
    admits_major: bool,
    prerelease_anchors: Vec<String>,
}

fn classify_impl(args: &ClassifyArgs) -> Result<(), CoreError> {
    let set = parse_range(&args.range)?;
    let profile = admission_profile(&set);
    let out = ClassifiedRange {
        source: args.range.clone(),
        strategy: classify(&set).to_string(),
        min_version: set.min_version().to_string(),
        rendered: set.render(),
        pinned: profile.pinned,
        admits_patch: profile.admits_patch,
        admits_minor: profile.admits_minor,
        admits_major: profile.admits_major,
        prerelease_anchors: set
            .prerelease_anchors
            .iter()
            .map(|(a, b, c)| format!("{a}.{b}.{c}"))
            .collect(),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

pub fn classify_range(args: &ClassifyArgs) -> Result<(), StageError> {
    classify_impl(args).stage("classify")
}

// ---- pipeline ----

pub fn pipeline(args: &PipelineArgs) -> Result<(), StageError> {
    let dir = &args.out_dir;
    let mut paths = BTreeMap::new();
    for (role, file) in [
        ("eco", "eco.ndjson"),
        ("labels", "labels.csv"),
        ("features", "features.csv"),
        ("model", "model.json"),
        ("report", "report.json"),
        ("explain", "explain"),
    ] {
        paths.insert(role.to_string(), file.to_string());
    }
    let config = RunConfig {
        snapshot_date: args.snapshot,
        threshold: args.threshold,
        seed: args.seed,
        trees: args.trees,
        min_split: args.min_split,
        threads: 1,
        stratified: !args.no_stratify,
        spam_stems: args.spam_stems.clone(),
        paths,
    };

    let eco = dir.join("eco.ndjson");
    ingest_with(
        &IngestArgs {
            projects: args.projects.clone(),
            versions: args.versions.clone(),
            dependencies: args.dependencies.clone(),
            snapshot: args.snapshot,
            spam_stems: args.spam_stems.clone(),
            out: eco.clone(),
        },
        &config,
    )
    .stage("ingest")?;

    let labels = dir.join("labels.csv");
    label_with(
        &LabelArgs {
            input: eco.clone(),
            threshold: args.threshold,
            sweep: Vec::new(),
            out: labels.clone(),
        },
        Some(&config),
    )
    .stage("label")?;

    let features_path = dir.join("features.csv");
    features_with(
        &FeaturesArgs {
            input: eco,
            labels,
            seed: args.seed,
            audit_correlations: false,
            out: features_path.clone(),
        },
        Some(&config),
    )
    .stage("features")?;

    let model = dir.join("model.json");
    train_with(
        &TrainArgs {
            features: features_path.clone(),
            seed: args.seed,
            trees: args.trees,
            min_split: args.min_split,
            no_stratify: args.no_stratify,
            tune: false,
            out: model.clone(),
        },
        Some(&config),
    )
    .stage("train")?;

    evaluate_with(
        &EvaluateArgs {
            model: model.clone(),
            features: features_path.clone(),
            out: dir.join("report.json"),
        },
        Some(&config),
    )
    .stage("evaluate")?;

    explain_with(
        &ExplainArgs {
            model,
            features: features_path,
            importance: true,
            pdp: true,
            classes: vec!["all".to_string()],
            pdp_features: Vec::new(),
            out: dir.join("explain"),
        },
        Some(&config),
    )
    .stage("explain")?;

    println!("pipeline complete -> {}", dir.display());
    Ok(())
}

// ---- sample ----

fn sample_impl(args: &SampleArgs) -> Result<(), CoreError> {
    if args.band_split < args.min_dependents {
        return Err(invalid(format!(
            "--band-split {} is below --min-dependents {}",
            args.band_split, args.min_dependents
        )));
    }
    let labels = read_labels_csv(&args.labels)?;
    let config = RunConfig {
        seed: args.seed,
        ..RunConfig::default()
    };
    let low_band = format!("{}-{}", args.min_dependents, args.band_split);
    let high_band = format!(">{}", args.band_split);

    let mut csv = config.csv_header();
    csv.push_str("package,label,agreement,n_dependents,band\n");
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for class in LabelClass::ORDER {
        let low: Vec<&LabelRow> = labels
            .values()
            .filter(|r| {
                r.label == class
                    && r.n_dependents >= args.min_dependents
                    && r.n_dependents <= args.band_split
            })
            .collect();
        let high: Vec<&LabelRow> = labels
            .values()
            .filter(|r| r.label == class && r.n_dependents > args.band_split)
            .collect();

        let mut low_take = low.len().min(args.per_class - args.per_class / 2);
        let mut high_take = high.len().min(args.per_class / 2);
        let deficit = args.per_class - low_take - high_take;
        if deficit > 0 {
            let extra_low = (low.len() - low_take).min(deficit);
            low_take += extra_low;
            high_take += (high.len() - high_take).min(deficit - extra_low);
        }

        for (band_name, candidates, take, tag) in [
            (&low_band, &low, low_take, "low"),
            (&high_band, &high, high_take, "high"),
        ] {
            let order = shuffle_indices(args.seed, &["sample", class.as_str(), tag], candidates.len());
            let mut chosen: Vec<&LabelRow> =
                order.iter().take(take).map(|&i| candidates[i]).collect();
            chosen.sort_by(|a, b| a.package.cmp(&b.package));
            for row in chosen {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.package, row.label, row.agreement, row.n_dependents, band_name
                ));
            }
            *totals.entry(class.as_str()).or_default() += take;
        }
    }
    atomic_write(&args.out, csv.as_bytes())?;
    println!(
        "sampled {} -> {}",
        totals
            .iter()
            .map(|(k, v)| format!("{k} {v}"))
            .collect::<Vec<_>>()
            .join(", "),
        args.out.display()
    );
    Ok(())
}

pub fn sample(args: &SampleArgs) -> Result<(), StageError> {
    sample_impl(args).stage("sample")
}
