//! depstrat — mine, model, and recommend dependency update strategies.
//!
//! One binary orchestrating the whole flow: ingest a registry export into a
//! snapshot, label packages by their dependents' majority strategy, derive
//! per-package characteristics, train and evaluate the ensemble, explain it
//! with importances and partial-dependence grids, trace strategy evolution
//! over time, and recommend a strategy for a single package.
//!
//! Every random decision derives from one `--seed`; thread count and output
//! location never change artifact bytes. Exit codes: 0 success, 1 internal
//! error, 2 bad input or configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

mod stages;

use stages::StageError;

#[derive(Parser)]
#[command(
    name = "depstrat",
    version,
    about = "Dependency update strategy mining for npm-style ecosystems",
    arg_required_else_help = true
)]
struct Cli {
    /// Worker threads (falls back to DEPSTRAT_THREADS, then all cores).
    /// Never affects output bytes, only wall-clock time.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a libraries.io CSV export into a filtered snapshot file
    Ingest(IngestArgs),
    /// Compute per-package dependency-graph metrics
    Graph(GraphArgs),
    /// Label packages by their dependents' majority update strategy
    Label(LabelArgs),
    /// Derive the per-package characteristics table
    Features(FeaturesArgs),
    /// Train the random-forest strategy classifier
    Train(TrainArgs),
    /// Evaluate a trained model on its held-out split
    Evaluate(EvaluateArgs),
    /// Export permutation importances and partial-dependence grids
    Explain(ExplainArgs),
    /// Trace a package's dependent-strategy mix month by month
    Evolve(EvolveArgs),
    /// Recommend an update strategy for one package
    Recommend(RecommendArgs),
    /// Classify a single version constraint (debug helper)
    Classify(ClassifyArgs),
    /// Run ingest → label → features → train → evaluate → explain
    Pipeline(PipelineArgs),
    /// Draw a stratified review sample of labeled packages
    Sample(SampleArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// projects CSV from the libraries.io export
    #[arg(long, value_name = "FILE")]
    pub projects: PathBuf,
    /// versions CSV from the libraries.io export
    #[arg(long, value_name = "FILE")]
    pub versions: PathBuf,
    /// dependencies CSV from the libraries.io export
    #[arg(long, value_name = "FILE")]
    pub dependencies: PathBuf,
    /// snapshot date (YYYY-MM-DD); later releases are ignored
    #[arg(long, value_name = "DATE")]
    pub snapshot: NaiveDate,
    /// extra spam package-name stems to drop (repeatable)
    #[arg(long = "spam-stem", value_name = "STEM")]
    pub spam_stems: Vec<String>,
    /// snapshot output path; ingest-report.json lands beside it
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct GraphArgs {
    /// snapshot produced by `ingest`
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["projects", "versions", "dependencies", "snapshot"])]
    pub input: Option<PathBuf>,
    /// projects CSV (raw-CSV mode, with --versions/--dependencies/--snapshot)
    #[arg(long, value_name = "FILE", requires_all = ["versions", "dependencies", "snapshot"])]
    pub projects: Option<PathBuf>,
    /// versions CSV (raw-CSV mode)
    #[arg(long, value_name = "FILE")]
    pub versions: Option<PathBuf>,
    /// dependencies CSV (raw-CSV mode)
    #[arg(long, value_name = "FILE")]
    pub dependencies: Option<PathBuf>,
    /// snapshot date for raw-CSV mode (YYYY-MM-DD)
    #[arg(long, value_name = "DATE")]
    pub snapshot: Option<NaiveDate>,
    /// build the graph before spam filtering (raw-CSV mode only; the
    /// snapshot file is already filtered)
    #[arg(long)]
    pub pre_filter_graph: bool,
    /// metrics CSV output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct LabelArgs {
    /// snapshot produced by `ingest`
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// majority share a strategy must strictly exceed, in [0.5, 1)
    #[arg(long, default_value_t = 0.5, value_name = "FRACTION")]
    pub threshold: f64,
    /// also tabulate the class mix at these thresholds (comma separated);
    /// writes <out-stem>-sweep.csv
    #[arg(long, value_delimiter = ',', value_name = "T1,T2,...")]
    pub sweep: Vec<f64>,
    /// labels CSV output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FeaturesArgs {
    /// snapshot produced by `ingest`
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// labels CSV produced by `label`
    #[arg(long, value_name = "FILE")]
    pub labels: PathBuf,
    /// master seed (drives keyword-domain clustering)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// also write correlations.json beside the output
    #[arg(long)]
    pub audit_correlations: bool,
    /// features CSV output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TrainArgs {
    /// features CSV produced by `features`
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    /// master seed (drives the split, bootstraps, and tree growth)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// number of trees
    #[arg(long, default_value_t = 500)]
    pub trees: usize,
    /// minimum node size eligible for splitting
    #[arg(long, default_value_t = 8)]
    pub min_split: usize,
    /// split train/test without preserving class shares
    #[arg(long)]
    pub no_stratify: bool,
    /// pick trees/min-split by 10-fold cross-validation instead;
    /// writes cv-report.json beside the model
    #[arg(long)]
    pub tune: bool,
    /// model JSON output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// trained model JSON
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// features CSV the model was trained from
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    /// evaluation report output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ExplainArgs {
    /// trained model JSON
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// features CSV the model was trained from
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    /// write permutation importances (importance.csv)
    #[arg(long)]
    pub importance: bool,
    /// write partial-dependence grids (pdp_<class>_<feature>.csv)
    #[arg(long)]
    pub pdp: bool,
    /// classes to sweep: "all" or comma-separated class names
    #[arg(long, default_value = "all", value_delimiter = ',', value_name = "CLASSES")]
    pub classes: Vec<String>,
    /// restrict partial dependence to these features (default: all)
    #[arg(long, value_delimiter = ',', value_name = "F1,F2,...")]
    pub pdp_features: Vec<String>,
    /// output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvolveArgs {
    /// snapshot produced by `ingest`
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// target package to trace
    #[arg(long, value_name = "NAME")]
    pub package: String,
    /// first month, inclusive (YYYY-MM)
    #[arg(long, value_name = "MONTH")]
    pub from: String,
    /// last month, inclusive (YYYY-MM)
    #[arg(long, value_name = "MONTH")]
    pub to: String,
    /// also detect dominant-strategy shifts; writes shifts.json beside out
    #[arg(long)]
    pub detect_shifts: bool,
    /// months a new dominant strategy must persist to count as a shift
    #[arg(long, default_value_t = 3)]
    pub persistence: usize,
    /// series CSV output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RecommendArgs {
    /// trained model JSON
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// features CSV to look the package up in
    #[arg(long, value_name = "FILE", required_unless_present = "inline")]
    pub features: Option<PathBuf>,
    /// package name to recommend for
    #[arg(long, value_name = "NAME", required_unless_present = "inline", conflicts_with = "inline")]
    pub package: Option<String>,
    /// inline feature values as JSON: an array in column order, or an
    /// object keyed by feature name
    #[arg(long, value_name = "JSON")]
    pub inline: Option<String>,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// version constraint to classify, e.g. "^1.2.3"
    #[arg(value_name = "RANGE")]
    pub range: String,
}

#[derive(Args)]
pub struct PipelineArgs {
    /// projects CSV from the libraries.io export
    #[arg(long, value_name = "FILE")]
    pub projects: PathBuf,
    /// versions CSV from the libraries.io export
    #[arg(long, value_name = "FILE")]
    pub versions: PathBuf,
    /// dependencies CSV from the libraries.io export
    #[arg(long, value_name = "FILE")]
    pub dependencies: PathBuf,
    /// snapshot date (YYYY-MM-DD)
    #[arg(long, value_name = "DATE")]
    pub snapshot: NaiveDate,
    /// specialization threshold, in [0.5, 1)
    #[arg(long, default_value_t = 0.5, value_name = "FRACTION")]
    pub threshold: f64,
    /// master seed for every stage
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// number of trees
    #[arg(long, default_value_t = 500)]
    pub trees: usize,
    /// minimum node size eligible for splitting
    #[arg(long, default_value_t = 8)]
    pub min_split: usize,
    /// split train/test without preserving class shares
    #[arg(long)]
    pub no_stratify: bool,
    /// extra spam package-name stems to drop (repeatable)
    #[arg(long = "spam-stem", value_name = "STEM")]
    pub spam_stems: Vec<String>,
    /// directory receiving every artifact
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct SampleArgs {
    /// labels CSV produced by `label`
    #[arg(long, value_name = "FILE")]
    pub labels: PathBuf,
    /// packages to draw per class
    #[arg(long, default_value_t = 40)]
    pub per_class: usize,
    /// ignore packages with fewer classified dependents than this
    #[arg(long, default_value_t = 100)]
    pub min_dependents: usize,
    /// boundary between the two popularity bands
    #[arg(long, default_value_t = 1000)]
    pub band_split: usize,
    /// seed for the draw
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// sample CSV output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

fn init_threads(flag: Option<usize>) -> Result<(), StageError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("DEPSTRAT_THREADS") {
            Ok(raw) => Some(raw.parse::<usize>().map_err(|_| {
                StageError::config(format!(
                    "DEPSTRAT_THREADS must be a positive integer, got {raw:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    match n {
        Some(0) => Err(StageError::config("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| StageError::internal(format!("thread pool: {e}"))),
        None => Ok(()),
    }
}

fn run(command: Command) -> Result<(), StageError> {
    match command {
        Command::Ingest(a) => stages::ingest(&a).map(|_| ()),
        Command::Graph(a) => stages::graph(&a),
        Command::Label(a) => stages::label(&a).map(|_| ()),
        Command::Features(a) => stages::features(&a).map(|_| ()),
        Command::Train(a) => stages::train(&a).map(|_| ()),
        Command::Evaluate(a) => stages::evaluate(&a),
        Command::Explain(a) => stages::explain(&a),
        Command::Evolve(a) => stages::evolve(&a),
        Command::Recommend(a) => stages::recommend(&a),
        Command::Classify(a) => stages::classify_range(&a),
        Command::Pipeline(a) => stages::pipeline(&a),
        Command::Sample(a) => stages::sample(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("depstrat: {e}");
        return ExitCode::from(e.exit_code());
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("depstrat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
