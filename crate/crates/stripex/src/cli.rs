//! Command-line interface.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use stripex_core::dgp::build_dgp;
use stripex_core::estimators::{Conditional, ConditionalModel, LearnerSpec, SelectionConfig, SelectionModel, SurrogateConfig};
use stripex_core::explainers::explain_dataset;
use stripex_core::math::binary_entropy;
use stripex_core::scores::{
    encode_meter_predictive_probs, encoding_check, entropies, evalx_from_probs, evalx_probs, fresh_score, roar_score,
    stripe_x, EncodingCheckConfig, ScoreReport, ScoreSet, YSampling,
};
use stripex_core::{Dgp, DgpSpec, Explainer, ExplainerSpec, Schema, SelectionVocabulary, Value, WeightedSamples};

use crate::error::{CliError, Result};
use crate::io;
use crate::parallel;
use crate::report::{emit_report, ReportFormat};

#[derive(Parser, Debug)]
#[command(name = "stripex", version, about = "Score feature-selection explanations and detect encoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample from or tabulate a data-generating process.
    #[command(subcommand)]
    Dgp(DgpCommand),
    /// Apply an explainer to every row of a dataset.
    Explain(ExplainArgs),
    /// Score row-aligned masks.
    Score(ScoreArgs),
    /// Run the encoding check on row-aligned masks.
    Detect(DetectArgs),
    /// Run a benchmark suite and write its reports.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
pub enum DgpCommand {
    /// Write a dataset (JSON Lines) and its schema sidecar.
    Sample(SampleArgs),
    /// Write the exact joint table of a finite DGP.
    Table(TableArgs),
}

#[derive(Args, Debug, Default)]
pub struct DgpSource {
    /// DGP family: three_switch, five_discrete, hybrid, four_block, attention.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters as key=value pairs, e.g. rho=0.8,gamma=5.
    #[arg(long, value_delimiter = ',', requires = "family")]
    pub params: Vec<String>,
    /// DGP configuration file (TOML or JSON).
    #[arg(long, conflicts_with_all = ["family", "table"])]
    pub dgp_config: Option<PathBuf>,
    /// Joint table file (JSON).
    #[arg(long, conflicts_with = "family")]
    pub table: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub dgp: DgpSource,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub dgp: DgpSource,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Estimated,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    /// Explainer kind: constant, all_inputs, optimal_switch, pos_enc,
    /// pred_enc, marg_enc, attention_argmax, reductive.
    #[arg(long, required_unless_present = "explainer_config")]
    pub explainer: Option<String>,
    /// Explainer configuration file (TOML or JSON).
    #[arg(long, conflicts_with = "explainer")]
    pub explainer_config: Option<PathBuf>,
    /// Selected feature indices (0-based) for constant.
    #[arg(long, value_delimiter = ',')]
    pub select: Option<Vec<usize>>,
    /// Subset budget for reductive.
    #[arg(long)]
    pub k: Option<usize>,
    /// Selections for pos_enc when the prediction is high / low.
    #[arg(long, value_delimiter = ',')]
    pub high: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub low: Option<Vec<usize>>,
    /// Switch layout as control,one,zero (0-based).
    #[arg(long, value_delimiter = ',')]
    pub layout: Option<Vec<usize>>,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub dgp: DgpSource,
    /// Conditional used by pos_enc, pred_enc and reductive; defaults to
    /// exact when a DGP is given.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub masks: PathBuf,
    /// Any of roar, fresh, evalx, encode_meter, stripex.
    #[arg(long, value_delimiter = ',', default_value = "roar,fresh,evalx,encode_meter,stripex")]
    pub scores: Vec<String>,
    #[arg(long, value_enum, default_value = "estimated")]
    pub backend: BackendArg,
    #[command(flatten)]
    pub dgp: DgpSource,
    /// Load the EVAL-X model from a model file instead of a backend.
    #[arg(long, conflicts_with = "save_model")]
    pub model: Option<PathBuf>,
    /// Write the fitted EVAL-X model.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
    /// Training data for refitting (ROAR, FRESH, selection models); defaults to --data.
    #[arg(long, requires = "train_masks")]
    pub train: Option<PathBuf>,
    #[arg(long, requires = "train")]
    pub train_masks: Option<PathBuf>,
    #[arg(long, default_value_t = 20.0)]
    pub alpha: f64,
    /// Labels drawn per row for ENCODE-METER; 0 averages both labels exactly.
    #[arg(long, default_value_t = 8)]
    pub y_samples: usize,
    /// Tree depth for real-valued inputs.
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explainer name recorded in the report; defaults to the mask file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub masks: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, default_value_t = 10)]
    pub min_samples: usize,
    #[arg(long, default_value_t = 0.02)]
    pub acc_tol: f64,
    #[arg(long, default_value_t = 0.01)]
    pub kl_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Report formats: json, csv, markdown, plotdata.
    #[arg(long, value_delimiter = ',', default_value = "json,csv,markdown,plotdata")]
    pub formats: Vec<String>,
}

/// Parses `argv`, runs the command and returns the exit status. Errors go
/// to `stderr` as one JSON line.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = CliError::usage(e.to_string().lines().next().unwrap_or("invalid arguments").trim().to_string());
            let _ = writeln!(stderr, "{}", err.to_json_line());
            return err.exit_code();
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_json_line());
            err.exit_code()
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Dgp(DgpCommand::Sample(a)) => dgp_sample(a),
        Command::Dgp(DgpCommand::Table(a)) => dgp_table(a),
        Command::Explain(a) => explain(a),
        Command::Score(a) => score(a),
        Command::Detect(a) => detect(a),
        Command::Bench(a) => bench(a, stdout),
    }
}

fn parse_param_value(v: &str) -> serde_json::Value {
    serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.to_string()))
}

/// Loads `path` entries of table specs relative to `base`.
pub fn resolve_table_path(spec: DgpSpec, base: &Path) -> Result<DgpSpec> {
    match spec {
        DgpSpec::Table { path: Some(p), table: None } => {
            let table = io::read_table(&base.join(p))?;
            Ok(DgpSpec::Table { path: None, table: Some(table) })
        }
        other => Ok(other),
    }
}

impl DgpSource {
    pub fn resolve(&self) -> Result<Option<DgpSpec>> {
        if let Some(path) = &self.dgp_config {
            let spec = io::read_dgp_spec(path)?;
            return resolve_table_path(spec, path.parent().unwrap_or(Path::new("."))).map(Some);
        }
        if let Some(path) = &self.table {
            return Ok(Some(DgpSpec::Table { path: None, table: Some(io::read_table(path)?) }));
        }
        let Some(family) = &self.family else { return Ok(None) };
        let mut obj = serde_json::Map::new();
        obj.insert("family".into(), serde_json::Value::String(family.clone()));
        for p in &self.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("parameter {p:?} is not key=value")))?;
            obj.insert(k.trim().to_string(), parse_param_value(v.trim()));
        }
        serde_json::from_value(serde_json::Value::Object(obj))
            .map(Some)
            .map_err(|e| CliError::usage(format!("invalid DGP parameters: {e}")))
    }

    fn require(&self, what: &str) -> Result<DgpSpec> {
        self.resolve()?
            .ok_or_else(|| CliError::usage(format!("{what} needs --family, --dgp-config or --table")))
    }
}

fn check_schema(dgp: &Dgp, schema: &Schema) -> Result<()> {
    if dgp.schema() != schema {
        return Err(CliError::Core(stripex_core::Error::data("dataset schema differs from the DGP schema")));
    }
    Ok(())
}

fn dgp_sample(a: SampleArgs) -> Result<()> {
    let dgp = build_dgp(&a.dgp.require("dgp sample")?)?;
    io::write_dataset(&a.out, &dgp.sample(a.n, a.seed)?)
}

fn dgp_table(a: TableArgs) -> Result<()> {
    let dgp = build_dgp(&a.dgp.require("dgp table")?)?;
    io::write_json(&a.out, dgp.table()?.as_ref())
}

fn explainer_spec(a: &ExplainArgs) -> Result<ExplainerSpec> {
    if let Some(path) = &a.explainer_config {
        return io::read_config(path);
    }
    let kind = a.explainer.clone().expect("clap requires an explainer");
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), serde_json::Value::String(kind));
    let mut put = |k: &str, v: serde_json::Value| {
        obj.insert(k.into(), v);
    };
    if let Some(s) = &a.select {
        put("select", serde_json::json!(s));
    }
    if let Some(k) = a.k {
        put("k", serde_json::json!(k));
    }
    if let Some(h) = &a.high {
        put("high", serde_json::json!(h));
    }
    if let Some(l) = &a.low {
        put("low", serde_json::json!(l));
    }
    if let Some(l) = &a.layout {
        if l.len() != 3 {
            return Err(CliError::usage("--layout takes control,one,zero"));
        }
        put("layout", serde_json::json!({"control": l[0], "one": l[1], "zero": l[2]}));
    }
    serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| CliError::usage(format!("invalid explainer: {e}")))
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| CliError::usage(format!("{what} is stochastic and needs --seed")))
}

fn surrogate(set: &WeightedSamples, seed: Option<u64>) -> Result<ConditionalModel> {
    let seed = need_seed(seed, "fitting a surrogate conditional")?;
    Ok(ConditionalModel::surrogate(set, &SurrogateConfig::default_for(set.schema(), seed))?)
}

fn explain(a: ExplainArgs) -> Result<()> {
    let spec = explainer_spec(&a)?;
    let data = io::read_dataset(&a.data)?;
    let set = WeightedSamples::from_dataset(&data);
    let dgp = a.dgp.resolve()?.map(|s| build_dgp(&s)).transpose()?;
    if let Some(d) = &dgp {
        check_schema(d, data.schema())?;
    }
    let needs_pi =
        matches!(spec, ExplainerSpec::PosEnc { .. } | ExplainerSpec::PredEnc | ExplainerSpec::Reductive { .. });
    let pi: Option<Arc<dyn Conditional>> = if needs_pi {
        let backend = a.backend.unwrap_or(if dgp.is_some() { BackendArg::Exact } else { BackendArg::Estimated });
        Some(match (backend, &dgp) {
            (BackendArg::Exact, Some(d)) => Arc::new(ConditionalModel::exact(d)?),
            (BackendArg::Exact, None) => return Err(CliError::usage("--backend exact needs a DGP")),
            (BackendArg::Estimated, _) => Arc::new(surrogate(&set, a.seed)?),
        })
    } else {
        None
    };
    let layout = dgp.as_ref().and_then(|d| d.switch_layout());
    let explainer = Explainer::build_for_schema(&spec, data.schema(), layout, pi, Some(&set))?;
    let (exps, _) = explain_dataset(&explainer, &data)?;
    io::write_atomic(&a.out, io::explanations_jsonl(&exps).as_bytes())
}

const SCORE_NAMES: [&str; 5] = ["roar", "fresh", "evalx", "encode_meter", "stripex"];

fn score(a: ScoreArgs) -> Result<()> {
    for s in &a.scores {
        if !SCORE_NAMES.contains(&s.as_str()) && s != "stripe_x" {
            return Err(CliError::usage(format!("unknown score {s:?}; expected one of {}", SCORE_NAMES.join(","))));
        }
    }
    let want = |n: &str| a.scores.iter().any(|s| s == n || (n == "stripex" && s == "stripe_x"));
    let data = io::read_dataset(&a.data)?;
    let masks = io::read_masks(&a.masks, data.len(), data.dim())?;
    let eval = WeightedSamples::from_dataset(&data);
    let (train, train_masks) = match (&a.train, &a.train_masks) {
        (Some(t), Some(m)) => {
            let td = io::read_dataset(t)?;
            if td.schema() != data.schema() {
                return Err(CliError::Core(stripex_core::Error::data("training schema differs from --data")));
            }
            let tm = io::read_masks(m, td.len(), td.dim())?;
            (WeightedSamples::from_dataset(&td), tm)
        }
        _ => (eval.clone(), masks.clone()),
    };
    let dgp = a.dgp.resolve()?.map(|s| build_dgp(&s)).transpose()?;
    if let Some(d) = &dgp {
        check_schema(d, data.schema())?;
    }
    let (model, estimator) = if let Some(path) = &a.model {
        let m = ConditionalModel::from_document(&io::read_model(path)?)?;
        (m, "model_file")
    } else {
        match a.backend {
            BackendArg::Exact => {
                let d = dgp.as_ref().ok_or_else(|| {
                    CliError::usage("--backend exact needs --family, --dgp-config or --table")
                })?;
                (ConditionalModel::exact(d)?, "exact")
            }
            BackendArg::Estimated => (surrogate(&train, a.seed)?, "estimated"),
        }
    };
    if let Some(path) = &a.save_model {
        io::write_model(path, &model.to_document(dgp.as_ref().map(|d| d.spec()))?)?;
    }
    let learner = if data.schema().all_categorical() { LearnerSpec::table() } else { LearnerSpec::tree(a.depth) };
    let probs = evalx_probs(&model, &masks, &eval)?;
    let evalx = evalx_from_probs(&probs, &eval)?;
    let mut scores = ScoreSet::default();
    if want("roar") {
        scores.roar = Some(roar_score(&train, &train_masks, &eval, &masks, &learner)?.complement_loglik.value);
    }
    if want("fresh") {
        scores.fresh = Some(fresh_score(&train, &train_masks, &eval, &masks, &learner, Value::Pad)?.value);
    }
    if want("evalx") {
        scores.evalx = Some(evalx.value);
    }
    if want("encode_meter") || want("stripex") {
        let vocab = SelectionVocabulary::from_masks(&train_masks, &train.ws)?;
        let selection = SelectionModel::fit(&train, &train_masks, &vocab, &SelectionConfig { learner })?;
        let sampling = match a.y_samples {
            0 => YSampling::Exact,
            k => YSampling::Samples { k, seed: need_seed(a.seed, "label sampling")? },
        };
        let phi = encode_meter_predictive_probs(&eval, &masks, &selection, &probs, sampling)?;
        if want("encode_meter") {
            scores.encode_meter = Some(phi.value);
        }
        if want("stripex") {
            scores.stripe_x = Some(stripe_x(&evalx, &phi, a.alpha)?.value);
        }
    }
    let entropy_y = match &dgp {
        Some(d) => entropies(d)?.h_y,
        None => binary_entropy(eval.p_y1()),
    };
    let verdict = encoding_check(&eval, &masks, &EncodingCheckConfig::estimated())?;
    let name = a.name.clone().unwrap_or_else(|| {
        a.masks.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "masks".into())
    });
    let report = ScoreReport {
        dgp: dgp.as_ref().map_or_else(|| "data".to_string(), |d| d.family().to_string()),
        explainer: name,
        scores,
        alpha: a.alpha,
        entropy_y,
        verdict: Some(verdict),
        estimator: estimator.to_string(),
        seed: a.seed,
    };
    io::write_json(&a.out, &report)
}

fn detect(a: DetectArgs) -> Result<()> {
    let data = io::read_dataset(&a.data)?;
    let masks = io::read_masks(&a.masks, data.len(), data.dim())?;
    let set = WeightedSamples::from_dataset(&data);
    let cfg = EncodingCheckConfig {
        learner: LearnerSpec::tree(a.depth),
        min_samples: a.min_samples,
        acc_tol: a.acc_tol,
        kl_tol: a.kl_tol,
    };
    io::write_json(&a.out, &encoding_check(&set, &masks, &cfg)?)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Artifact {
    file: String,
    format: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    config_file: String,
    config_sha256: String,
    model_format_version: u32,
    artifacts: Vec<Artifact>,
}

fn bench(a: BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    let formats = a.formats.iter().map(|f| f.parse()).collect::<Result<Vec<ReportFormat>>>()?;
    let config_bytes = fs::read(&a.config).map_err(|e| CliError::io(&a.config, e))?;
    let mut cfg = io::read_suite(&a.config)?;
    cfg.dgp = resolve_table_path(cfg.dgp, a.config.parent().unwrap_or(Path::new(".")))?;
    let threads = parallel::threads_from_env()?;
    let result = parallel::run_suite(&cfg, threads)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let mut artifacts = Vec::new();
    for f in &formats {
        let text = emit_report(&result, *f);
        io::write_atomic(&a.out.join(f.file_name()), text.as_bytes())?;
        artifacts.push(Artifact {
            file: f.file_name().to_string(),
            format: format!("{f:?}").to_lowercase(),
            sha256: sha256_hex(text.as_bytes()),
            bytes: text.len(),
        });
    }
    let manifest = Manifest {
        tool: "stripex",
        version: env!("CARGO_PKG_VERSION"),
        config_file: a.config.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        config_sha256: sha256_hex(&config_bytes),
        model_format_version: io::MODEL_FORMAT_VERSION,
        artifacts,
    };
    io::write_json(&a.out.join("manifest.json"), &manifest)?;
    let _ = stdout.write_all(emit_report(&result, ReportFormat::Markdown).as_bytes());
    Ok(())
}
